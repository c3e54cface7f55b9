#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "model.hpp"
#include "random.hpp"
#include "workload.hpp"

namespace patternlab {

enum class ServiceTimeDist { Deterministic, Exponential };

inline const char* to_string(ServiceTimeDist dist) {
  return dist == ServiceTimeDist::Deterministic ? "deterministic" : "exponential";
}

inline ServiceTimeDist service_time_dist_from_string(const std::string& text) {
  if (text == "deterministic") return ServiceTimeDist::Deterministic;
  if (text == "exponential") return ServiceTimeDist::Exponential;
  throw std::invalid_argument("unknown service time distribution '" + text +
                              "' (expected deterministic or exponential)");
}

struct SimConfig {
  double duration = 120.0;  // simulated seconds
  int users = 16;           // closed-loop population, zero think time
  double time_unit = 0.01;  // seconds per work unit
  ServiceTimeDist service_time_dist = ServiceTimeDist::Exponential;
  double sample_interval = 1.0;  // seconds between cumulative-CPU samples
  double warmup_fraction = 0.1;
  std::uint64_t seed = 1;

  double warmup_cut() const { return duration * warmup_fraction; }
};

struct DelayRecord {
  int type;      // request type id
  double start;  // issue time, s
  double end;    // completion time, s
};

struct ServiceTrace {
  std::string service;
  double capacity = 1.0;
  std::vector<std::pair<double, double>> cpu_samples;  // (t, cumulative busy CPU-s)
  double work_delivered = 0.0;  // CPU-s handed to jobs; conservation cross-check
};

struct RunResult {
  std::string model_name;
  LoadMix mix;
  SimConfig config;
  std::vector<DelayRecord> delays;
  std::vector<ServiceTrace> services;
  std::int64_t completed = 0;
};

namespace detail {

// Index-based view of a PatternModel for the event loop.
struct CompiledModel {
  struct Call {
    int service;
    CallMode mode;
  };
  struct Service {
    double capacity = 1.0;
    std::vector<double> work;              // [type] seconds per visit
    std::vector<std::vector<Call>> calls;  // [type]
  };
  std::vector<Service> services;
  std::vector<int> entry;           // [type]
  std::vector<double> probability;  // [type]
};

inline CompiledModel compile(const PatternModel& model, const LoadMix& mix, double time_unit) {
  CompiledModel compiled;
  const std::size_t n_types = model.request_types.size();
  compiled.services.resize(model.services.size());
  for (std::size_t k = 0; k < model.services.size(); ++k) {
    auto& svc = compiled.services[k];
    svc.capacity = model.services[k].cpu_capacity;
    svc.work.resize(n_types, 0.0);
    svc.calls.resize(n_types);
    for (std::size_t t = 0; t < n_types; ++t) {
      const auto& label = model.request_types[t].label;
      svc.work[t] = model.services[k].work_for(label) * time_unit;
      if (const auto* calls = model.services[k].calls_for(label))
        for (const auto& call : *calls)
          svc.calls[t].push_back({model.service_index(call.to), call.mode});
    }
  }
  compiled.entry.resize(n_types);
  compiled.probability.resize(n_types);
  for (std::size_t t = 0; t < n_types; ++t) {
    compiled.entry[t] = model.service_index(model.entry.at(model.request_types[t].label));
    compiled.probability[t] = mix.probability(model.request_types[t].label);
  }
  return compiled;
}

// Event loop for one run. Every station is egalitarian processor sharing with
// a capacity cap: n resident jobs each progress at rate min(c/n, 1), so the
// station delivers min(n, c) CPU in total. Per-job progress is tracked with a
// single `attained` accumulator per station; a job arriving when the
// accumulator reads A with requirement w departs when it reaches A + w, which
// keeps the loop exact under rate changes without per-job bookkeeping.
class Engine {
 public:
  Engine(const PatternModel& model, const LoadMix& mix, const SimConfig& cfg)
      : compiled_(compile(model, mix, cfg.time_unit)), cfg_(cfg), rng_(cfg.seed) {
    stations_.resize(compiled_.services.size());
    result_.services.resize(compiled_.services.size());
    for (std::size_t k = 0; k < stations_.size(); ++k) {
      stations_[k].capacity = compiled_.services[k].capacity;
      result_.services[k].service = model.services[k].name;
      result_.services[k].capacity = compiled_.services[k].capacity;
    }
    result_.model_name = model.name;
    result_.mix = mix;
    result_.config = cfg;
  }

  RunResult run() {
    for (int u = 0; u < cfg_.users; ++u) issue_request(u);
    record_samples();
    double next_sample = cfg_.sample_interval;
    while (true) {
      int station = -1;
      double completion_t = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < stations_.size(); ++k) {
        const auto& st = stations_[k];
        if (st.jobs.empty()) continue;
        double n = static_cast<double>(st.jobs.size());
        double rate = std::min(st.capacity / n, 1.0);
        double dt = std::max(0.0, (st.jobs.top().threshold - st.attained) / rate);
        if (now_ + dt < completion_t) {
          completion_t = now_ + dt;
          station = static_cast<int>(k);
        }
      }
      double event_t = std::min(completion_t, next_sample);
      if (event_t > cfg_.duration) {
        advance_to(cfg_.duration);
        break;
      }
      advance_to(event_t);
      if (station >= 0 && completion_t <= next_sample) {
        finish_top(station);
      } else {
        record_samples();
        next_sample += cfg_.sample_interval;
      }
    }
    record_samples();

    // Requests still in flight contribute their delivered CPU but no delay.
    for (std::size_t k = 0; k < stations_.size(); ++k) {
      auto& st = stations_[k];
      while (!st.jobs.empty()) {
        const Job job = st.jobs.top();
        st.jobs.pop();
        st.delivered += st.attained - (job.threshold - frames_[static_cast<std::size_t>(job.frame)].work);
      }
      result_.services[k].work_delivered = st.delivered;
    }
    return std::move(result_);
  }

 private:
  struct Frame {
    int service;
    int type;
    int parent;  // -1 for the root visit of a request
    int user = -1;
    double start = 0.0;
    double work = 0.0;
    int pending = 0;
    std::size_t cursor = 0;
  };

  struct Job {
    double threshold;
    std::int64_t seq;
    int frame;
    bool operator>(const Job& other) const {
      return std::tie(threshold, seq) > std::tie(other.threshold, other.seq);
    }
  };

  struct Station {
    double capacity = 1.0;
    double attained = 0.0;
    double busy = 0.0;
    double delivered = 0.0;
    std::priority_queue<Job, std::vector<Job>, std::greater<Job>> jobs;
  };

  void advance_to(double t) {
    double dt = t - now_;
    if (dt > 0.0) {
      for (auto& st : stations_) {
        if (st.jobs.empty()) continue;
        double n = static_cast<double>(st.jobs.size());
        st.attained += std::min(st.capacity / n, 1.0) * dt;
        st.busy += std::min(n, st.capacity) * dt;
      }
    }
    now_ = t;
  }

  void record_samples() {
    for (std::size_t k = 0; k < stations_.size(); ++k) {
      auto& samples = result_.services[k].cpu_samples;
      if (!samples.empty() && samples.back().first >= now_) continue;
      samples.emplace_back(now_, stations_[k].busy);
    }
  }

  int sample_type() {
    double u = rng_.uniform01();
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < compiled_.probability.size(); ++t) {
      acc += compiled_.probability[t];
      if (u < acc) return static_cast<int>(t);
    }
    return static_cast<int>(compiled_.probability.size()) - 1;
  }

  int new_frame(int service, int type, int parent) {
    frames_.push_back(Frame{service, type, parent});
    return static_cast<int>(frames_.size()) - 1;
  }

  void issue_request(int user) {
    int type = sample_type();
    int f = new_frame(compiled_.entry[static_cast<std::size_t>(type)], type, -1);
    frames_[static_cast<std::size_t>(f)].user = user;
    frames_[static_cast<std::size_t>(f)].start = now_;
    start_visit(f);
  }

  void start_visit(int f) {
    Frame& frame = frames_[static_cast<std::size_t>(f)];
    double mean = compiled_.services[static_cast<std::size_t>(frame.service)]
                      .work[static_cast<std::size_t>(frame.type)];
    double w = cfg_.service_time_dist == ServiceTimeDist::Deterministic
                   ? mean
                   : rng_.exponential(mean);
    frame.work = w;
    if (w <= 0.0) {
      // Zero-work visit: pass straight through to downstream calls.
      advance_downstream(f);
      return;
    }
    auto& st = stations_[static_cast<std::size_t>(frame.service)];
    st.jobs.push(Job{st.attained + w, seq_++, f});
  }

  void finish_top(int station) {
    auto& st = stations_[static_cast<std::size_t>(station)];
    const Job job = st.jobs.top();
    st.jobs.pop();
    st.delivered += frames_[static_cast<std::size_t>(job.frame)].work;
    advance_downstream(job.frame);
  }

  // frames_ may reallocate while children start, so always re-index.
  void advance_downstream(int f) {
    int service = frames_[static_cast<std::size_t>(f)].service;
    int type = frames_[static_cast<std::size_t>(f)].type;
    const auto& calls = compiled_.services[static_cast<std::size_t>(service)]
                            .calls[static_cast<std::size_t>(type)];
    std::size_t cursor = frames_[static_cast<std::size_t>(f)].cursor;
    if (cursor >= calls.size()) {
      complete(f);
      return;
    }
    if (calls[cursor].mode == CallMode::Sequential) {
      frames_[static_cast<std::size_t>(f)].cursor = cursor + 1;
      frames_[static_cast<std::size_t>(f)].pending = 1;
      int child = new_frame(calls[cursor].service, type, f);
      start_visit(child);
      return;
    }
    // Fork the maximal run of consecutive parallel calls; the forking visit
    // holds no CPU while it waits for the join.
    std::size_t end = cursor;
    while (end < calls.size() && calls[end].mode == CallMode::Parallel) ++end;
    frames_[static_cast<std::size_t>(f)].cursor = end;
    frames_[static_cast<std::size_t>(f)].pending = static_cast<int>(end - cursor);
    std::vector<int> children;
    children.reserve(end - cursor);
    for (std::size_t i = cursor; i < end; ++i)
      children.push_back(new_frame(calls[i].service, type, f));
    for (int child : children) start_visit(child);
  }

  void complete(int f) {
    int parent = frames_[static_cast<std::size_t>(f)].parent;
    if (parent < 0) {
      result_.delays.push_back(
          {frames_[static_cast<std::size_t>(f)].type, frames_[static_cast<std::size_t>(f)].start, now_});
      ++result_.completed;
      issue_request(frames_[static_cast<std::size_t>(f)].user);
      return;
    }
    if (--frames_[static_cast<std::size_t>(parent)].pending == 0) advance_downstream(parent);
  }

  CompiledModel compiled_;
  SimConfig cfg_;
  Rng rng_;
  std::vector<Station> stations_;
  std::vector<Frame> frames_;
  RunResult result_;
  double now_ = 0.0;
  std::int64_t seq_ = 0;
};

}  // namespace detail

// Closed-loop simulation of a PatternModel under a LoadMix: each of
// cfg.users virtual clients keeps exactly one request outstanding, sampling
// its type from the mix with zero think time. Deterministic for a fixed
// seed.
inline RunResult simulate(const PatternModel& model, const LoadMix& mix, const SimConfig& cfg) {
  auto violations = validate(model);
  if (!violations.empty()) {
    std::string message = "invalid model:";
    for (const auto& v : violations) message += "\n  " + v;
    throw std::invalid_argument(message);
  }
  auto mix_problem = check_mix(mix, model.request_types);
  if (!mix_problem.empty()) throw std::invalid_argument(mix_problem);
  if (!(cfg.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (cfg.users < 1) throw std::invalid_argument("users must be >= 1");
  if (!(cfg.time_unit > 0.0)) throw std::invalid_argument("time_unit must be positive");
  if (!(cfg.sample_interval > 0.0) || cfg.sample_interval > cfg.duration)
    throw std::invalid_argument("sample_interval must lie in (0, duration]");
  if (cfg.warmup_fraction < 0.0 || cfg.warmup_fraction >= 1.0)
    throw std::invalid_argument("warmup window must be shorter than the run");

  // A request type that occurs but performs no work anywhere would complete
  // in zero simulated time and the closed loop could not advance.
  auto reach = reachability(model);
  for (std::size_t t = 0; t < model.request_types.size(); ++t) {
    const auto& label = model.request_types[t].label;
    if (mix.probability(label) <= 0.0) continue;
    double total = 0.0;
    for (std::size_t k = 0; k < model.services.size(); ++k)
      if (reach[t][k]) total += model.services[k].work_for(label);
    if (total <= 0.0)
      throw std::invalid_argument("request type '" + label +
                                  "' performs no work anywhere on its path");
  }

  return detail::Engine(model, mix, cfg).run();
}

// Runs the same experiment `repetitions` times; run i uses seed cfg.seed + i.
inline std::vector<RunResult> repeat_runs(const PatternModel& model, const LoadMix& mix,
                                          const SimConfig& cfg, int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  std::vector<RunResult> out;
  out.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) {
    SimConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
    out.push_back(simulate(model, mix, run_cfg));
  }
  return out;
}

}  // namespace patternlab
