#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "workload.hpp"

namespace patternlab {

struct StationDemand {
  std::string service;
  double demand = 0.0;  // mix-weighted seconds per request
  int servers = 1;
};

// Effective per-service demands for one mix: work is counted once per request
// type that reaches the service, weighted by the mix.
struct DemandProfile {
  std::vector<StationDemand> stations;

  double total_demand() const {
    double sum = 0.0;
    for (const auto& st : stations) sum += st.demand;
    return sum;
  }
};

struct AnalyticPrediction {
  LoadMix mix;
  double throughput = 0.0;     // req/s
  double response_time = 0.0;  // s
  std::vector<std::pair<std::string, double>> utilization;  // busy fraction of capacity
  std::string bottleneck;
  std::string note;  // nonempty when the response time is an approximation

  double utilization_of(const std::string& service) const {
    for (const auto& [name, value] : utilization)
      if (name == service) return value;
    throw std::invalid_argument("no utilization entry for service '" + service + "'");
  }
};

// D_k = sum over request types of p(r) * [service reachable by r] *
// (demand + overhead) * time_unit. The solver station model needs a whole
// number of servers; fractional capacities are rejected here.
inline DemandProfile aggregate_demands(const PatternModel& model, const LoadMix& mix,
                                       double time_unit) {
  if (!(time_unit > 0.0)) throw std::invalid_argument("time_unit must be positive");
  auto mix_problem = check_mix(mix, model.request_types);
  if (!mix_problem.empty()) throw std::invalid_argument(mix_problem);

  auto reach = reachability(model);
  DemandProfile profile;
  profile.stations.reserve(model.services.size());
  for (std::size_t k = 0; k < model.services.size(); ++k) {
    const auto& svc = model.services[k];
    double rounded = std::round(svc.cpu_capacity);
    if (std::abs(svc.cpu_capacity - rounded) > 1e-9 || rounded < 1.0)
      throw std::invalid_argument("service '" + svc.name +
                                  "': the solver requires a whole number of servers");
    double demand = 0.0;
    for (std::size_t t = 0; t < model.request_types.size(); ++t) {
      const auto& label = model.request_types[t].label;
      if (reach[t][k]) demand += mix.probability(label) * svc.work_for(label);
    }
    profile.stations.push_back({svc.name, demand * time_unit, static_cast<int>(rounded)});
  }
  return profile;
}

// Exact mean value analysis for a single-chain closed network with
// load-dependent stations (service rate min(n, c)/D with n resident jobs),
// recursing over populations 1..users. Zero think time recirculates requests
// immediately, matching the saturation-oriented generator.
inline AnalyticPrediction mva_closed(const DemandProfile& profile, int users,
                                     double think_time = 0.0) {
  if (users < 1) throw std::invalid_argument("users must be >= 1");
  if (think_time < 0.0) throw std::invalid_argument("think_time must be >= 0");
  for (const auto& st : profile.stations) {
    if (st.demand < 0.0)
      throw std::invalid_argument("station '" + st.service + "': negative demand");
    if (st.servers < 1)
      throw std::invalid_argument("station '" + st.service + "': needs at least one server");
  }
  if (!(profile.total_demand() > 0.0))
    throw std::invalid_argument("degenerate input: every station demand is zero");

  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < profile.stations.size(); ++k)
    if (profile.stations[k].demand > 0.0) active.push_back(k);

  // Marginal queue-length distribution per active station for the previous
  // population; p[a][j] = P(j jobs at station a).
  std::vector<std::vector<double>> p(active.size());
  for (auto& dist : p) {
    dist.assign(static_cast<std::size_t>(users) + 1, 0.0);
    dist[0] = 1.0;
  }

  double throughput = 0.0;
  double response = 0.0;
  for (int n = 1; n <= users; ++n) {
    response = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& st = profile.stations[active[a]];
      double residence = 0.0;
      for (int j = 1; j <= n; ++j)
        residence += j * st.demand / std::min(j, st.servers) *
                     p[a][static_cast<std::size_t>(j - 1)];
      response += residence;
    }
    throughput = n / (think_time + response);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const auto& st = profile.stations[active[a]];
      double tail = 0.0;
      for (int j = n; j >= 1; --j) {
        p[a][static_cast<std::size_t>(j)] = throughput * st.demand / std::min(j, st.servers) *
                                            p[a][static_cast<std::size_t>(j - 1)];
        tail += p[a][static_cast<std::size_t>(j)];
      }
      p[a][0] = std::max(0.0, 1.0 - tail);
    }
  }

  AnalyticPrediction out;
  out.throughput = throughput;
  out.response_time = response;
  out.utilization.reserve(profile.stations.size());
  for (const auto& st : profile.stations)
    out.utilization.emplace_back(st.service, throughput * st.demand / st.servers);

  const StationDemand* bottleneck = nullptr;
  double best_ratio = -1.0;
  for (const auto& st : profile.stations) {
    double ratio = st.demand / st.servers;
    if (ratio > best_ratio || (ratio == best_ratio && st.service < bottleneck->service)) {
      best_ratio = ratio;
      bottleneck = &st;
    }
  }
  out.bottleneck = bottleneck->service;
  return out;
}

inline bool has_parallel_calls(const PatternModel& model) {
  for (const auto& s : model.services)
    for (const auto& [type, calls] : s.calls)
      for (const auto& call : calls)
        if (call.mode == CallMode::Parallel) return true;
  return false;
}

// Models with parallel fan-out are solved with their branches folded into a
// visit sequence, which upper-bounds the join delay; utilizations are exact
// either way because demands are unchanged. Tags the prediction so reports
// can say so.
inline void annotate_fork_join(const PatternModel& model, AnalyticPrediction& prediction) {
  if (has_parallel_calls(model))
    prediction.note = "fork-join folded into sequential visits; response time is an upper bound";
}

// One prediction per mix, in sweep order.
inline std::vector<AnalyticPrediction> predict_sweep(const PatternModel& model,
                                                     const SweepSpec& sweep, int users,
                                                     double time_unit) {
  std::vector<AnalyticPrediction> out;
  out.reserve(sweep.mixes.size());
  for (const auto& mix : sweep.mixes) {
    auto prediction = mva_closed(aggregate_demands(model, mix, time_unit), users);
    prediction.mix = mix;
    annotate_fork_join(model, prediction);
    out.push_back(std::move(prediction));
  }
  return out;
}

}  // namespace patternlab
