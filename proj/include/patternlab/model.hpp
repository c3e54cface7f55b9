#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace patternlab {

enum class CallMode { Sequential, Parallel };

// One downstream request a service issues after finishing its own work.
// Sequential calls run one after another; a run of consecutive parallel calls
// is forked together and joined on all completions.
struct ServiceCall {
  std::string to;
  CallMode mode = CallMode::Sequential;

  bool operator==(const ServiceCall&) const = default;
};

struct RequestType {
  int id = 0;
  std::string label;

  bool operator==(const RequestType&) const = default;
};

// A service node: CPU capacity, per-request-type work, and routing.
// `overhead` is added to every request's work regardless of type. A request
// type absent from `demand` contributes zero work.
struct ServiceSpec {
  std::string name;
  double cpu_capacity = 1.0;  // CPUs
  double overhead = 0.0;      // work units applied to every request
  std::map<std::string, double> demand;                     // type -> work units
  std::map<std::string, std::vector<ServiceCall>> calls;    // type -> downstream

  double work_for(const std::string& type) const {
    auto it = demand.find(type);
    return (it == demand.end() ? 0.0 : it->second) + overhead;
  }
  const std::vector<ServiceCall>* calls_for(const std::string& type) const {
    auto it = calls.find(type);
    return it == calls.end() ? nullptr : &it->second;
  }

  bool operator==(const ServiceSpec&) const = default;
};

// A validated pattern topology: services, request types, and one entry
// service per request type. Immutable after construction; safe to share
// across concurrent readers.
struct PatternModel {
  std::string name;
  std::vector<RequestType> request_types;
  std::vector<ServiceSpec> services;
  std::map<std::string, std::string> entry;  // request type label -> service

  int service_index(std::string_view service_name) const {
    for (std::size_t i = 0; i < services.size(); ++i)
      if (services[i].name == service_name) return static_cast<int>(i);
    return -1;
  }
  const ServiceSpec* find_service(std::string_view service_name) const {
    int i = service_index(service_name);
    return i < 0 ? nullptr : &services[static_cast<std::size_t>(i)];
  }
  const RequestType* find_request_type(std::string_view label) const {
    for (const auto& t : request_types)
      if (t.label == label) return &t;
    return nullptr;
  }

  bool operator==(const PatternModel&) const = default;
};

// reachable[t][k] is true when service k is visited by requests of type t,
// following the routing from that type's entry service.
inline std::vector<std::vector<bool>> reachability(const PatternModel& model) {
  std::vector<std::vector<bool>> reach(
      model.request_types.size(), std::vector<bool>(model.services.size(), false));
  for (std::size_t t = 0; t < model.request_types.size(); ++t) {
    const auto& label = model.request_types[t].label;
    auto entry_it = model.entry.find(label);
    if (entry_it == model.entry.end()) continue;
    int start = model.service_index(entry_it->second);
    if (start < 0) continue;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int k = stack.back();
      stack.pop_back();
      if (reach[t][static_cast<std::size_t>(k)]) continue;
      reach[t][static_cast<std::size_t>(k)] = true;
      if (const auto* calls = model.services[static_cast<std::size_t>(k)].calls_for(label))
        for (const auto& call : *calls) {
          int next = model.service_index(call.to);
          if (next >= 0 && !reach[t][static_cast<std::size_t>(next)]) stack.push_back(next);
        }
    }
  }
  return reach;
}

// Returns every violated model invariant, ordered by the offending service
// (model-level problems first). Empty result means the model is valid.
inline std::vector<std::string> validate(const PatternModel& model) {
  std::vector<std::pair<std::string, std::string>> found;  // (sort key, message)
  auto add = [&](const std::string& key, std::string message) {
    found.emplace_back(key, std::move(message));
  };

  if (model.request_types.empty()) add("", "no request types declared");
  if (model.services.empty()) add("", "no services declared");

  std::set<std::string> labels;
  for (const auto& t : model.request_types)
    if (!labels.insert(t.label).second)
      add("", "duplicate request type label '" + t.label + "'");

  std::set<std::string> names;
  for (const auto& s : model.services)
    if (!names.insert(s.name).second)
      add(s.name, "duplicate service name '" + s.name + "'");

  for (const auto& s : model.services) {
    if (!(s.cpu_capacity > 0.0))
      add(s.name, "service '" + s.name + "': non-positive capacity");
    if (s.overhead < 0.0)
      add(s.name, "service '" + s.name + "': negative overhead");
    for (const auto& [type, value] : s.demand) {
      if (value < 0.0)
        add(s.name, "service '" + s.name + "': negative demand for request type '" + type + "'");
      if (!labels.count(type))
        add(s.name, "service '" + s.name + "': demand for undeclared request type '" + type + "'");
    }
    for (const auto& [type, calls] : s.calls) {
      if (!labels.count(type))
        add(s.name, "service '" + s.name + "': calls for undeclared request type '" + type + "'");
      for (const auto& call : calls)
        if (model.service_index(call.to) < 0)
          add(s.name, "service '" + s.name + "': call to unknown service '" + call.to + "'");
    }
  }

  for (const auto& t : model.request_types) {
    auto it = model.entry.find(t.label);
    if (it == model.entry.end()) {
      add(t.label, "request type '" + t.label + "': missing entry");
      continue;
    }
    if (model.service_index(it->second) < 0)
      add(t.label, "request type '" + t.label + "': entry names unknown service '" + it->second + "'");
  }
  for (const auto& [type, service] : model.entry)
    if (!labels.count(type))
      add(type, "entry declared for undeclared request type '" + type + "'");

  // Per-type cycle check over the subgraph reachable from the entry.
  for (const auto& t : model.request_types) {
    auto it = model.entry.find(t.label);
    if (it == model.entry.end()) continue;
    int start = model.service_index(it->second);
    if (start < 0) continue;
    std::vector<int> color(model.services.size(), 0);  // 0 new, 1 open, 2 done
    std::set<std::string> reported;
    std::function<void(int)> dfs = [&](int k) {
      color[static_cast<std::size_t>(k)] = 1;
      if (const auto* calls = model.services[static_cast<std::size_t>(k)].calls_for(t.label))
        for (const auto& call : *calls) {
          int next = model.service_index(call.to);
          if (next < 0) continue;
          if (color[static_cast<std::size_t>(next)] == 1) {
            const auto& name = model.services[static_cast<std::size_t>(next)].name;
            if (reported.insert(name).second)
              add(name, "service '" + name + "': cycle detected for request type '" + t.label + "'");
          } else if (color[static_cast<std::size_t>(next)] == 0) {
            dfs(next);
          }
        }
      color[static_cast<std::size_t>(k)] = 2;
    };
    dfs(start);
  }

  auto reach = reachability(model);
  for (std::size_t k = 0; k < model.services.size(); ++k) {
    bool reached = false;
    for (const auto& row : reach) reached = reached || row[k];
    if (!reached)
      add(model.services[k].name,
          "service '" + model.services[k].name + "': unreachable from any entry");
  }

  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  std::vector<std::string> out;
  out.reserve(found.size());
  for (auto& [key, message] : found) out.push_back(std::move(message));
  return out;
}

}  // namespace patternlab
