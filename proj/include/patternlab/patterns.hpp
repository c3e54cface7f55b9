#pragma once

#include <stdexcept>
#include <string>

#include "model.hpp"

namespace patternlab {

// Gateway aggregation: a gateway fans one aggregated request out to three
// synthetic services in parallel; every request type visits all of them.
// The gateway performs no table work of its own; its cost is exposed as the
// `gateway_overhead` knob (work units charged to every request).
inline PatternModel build_gateway_aggregation(double gateway_overhead = 0.0) {
  if (gateway_overhead < 0.0)
    throw std::out_of_range("gateway_overhead must be >= 0");
  PatternModel m;
  m.name = "gateway_aggregation";
  m.request_types = {{0, "s1_intensive"}, {1, "s3_intensive"}};

  ServiceSpec gw;
  gw.name = "gateway";
  gw.overhead = gateway_overhead;
  gw.demand = {{"s1_intensive", 0.0}, {"s3_intensive", 0.0}};
  const std::vector<ServiceCall> fan_out = {{"s1", CallMode::Parallel},
                                            {"s2", CallMode::Parallel},
                                            {"s3", CallMode::Parallel}};
  gw.calls = {{"s1_intensive", fan_out}, {"s3_intensive", fan_out}};

  ServiceSpec s1;
  s1.name = "s1";
  s1.demand = {{"s1_intensive", 18.0}, {"s3_intensive", 7.0}};
  ServiceSpec s2;
  s2.name = "s2";
  s2.demand = {{"s1_intensive", 12.0}, {"s3_intensive", 15.0}};
  ServiceSpec s3;
  s3.name = "s3";
  s3.demand = {{"s1_intensive", 5.0}, {"s3_intensive", 20.0}};

  m.services = {gw, s1, s2, s3};
  m.entry = {{"s1_intensive", "gateway"}, {"s3_intensive", "gateway"}};
  return m;
}

// Gateway offloading: the gateway absorbs `offload` work units from every
// request, then forwards dashboard requests to s1 and monitoring requests to
// the s2 -> s3 pipeline. Service workloads shrink by the offloaded amount.
// The full [0, 10] range is accepted; larger values would drive s2 negative.
inline PatternModel build_gateway_offloading(int offload) {
  if (offload < 0 || offload > 10)
    throw std::out_of_range("offload must lie in [0, 10], got " + std::to_string(offload));
  const double w = offload;
  PatternModel m;
  m.name = "gateway_offloading_off" + std::to_string(offload);
  m.request_types = {{0, "dashboard"}, {1, "monitoring"}};

  ServiceSpec gw;
  gw.name = "gateway";
  gw.demand = {{"dashboard", w}, {"monitoring", w}};
  gw.calls = {{"dashboard", {{"s1", CallMode::Sequential}}},
              {"monitoring", {{"s2", CallMode::Sequential}}}};

  ServiceSpec s1;
  s1.name = "s1";
  s1.demand = {{"dashboard", 20.0 - w}};
  ServiceSpec s2;
  s2.name = "s2";
  s2.demand = {{"monitoring", 12.0 - w}};
  s2.calls = {{"monitoring", {{"s3", CallMode::Sequential}}}};
  ServiceSpec s3;
  s3.name = "s3";
  s3.demand = {{"monitoring", 15.0 - w}};

  m.services = {gw, s1, s2, s3};
  m.entry = {{"dashboard", "gateway"}, {"monitoring", "gateway"}};
  return m;
}

enum class PipesVariant { Joint1Cpu, Joint2Cpu, Separated };

inline const char* to_string(PipesVariant variant) {
  switch (variant) {
    case PipesVariant::Joint1Cpu: return "joint_1cpu";
    case PipesVariant::Joint2Cpu: return "joint_2cpu";
    case PipesVariant::Separated: return "separated";
  }
  return "joint_1cpu";
}

inline PipesVariant pipes_variant_from_string(const std::string& text) {
  if (text == "joint_1cpu") return PipesVariant::Joint1Cpu;
  if (text == "joint_2cpu") return PipesVariant::Joint2Cpu;
  if (text == "separated") return PipesVariant::Separated;
  throw std::invalid_argument("unknown pipes-and-filters variant '" + text +
                              "' (expected joint_1cpu, joint_2cpu, or separated)");
}

// Pipes and filters: a two-stage pipeline shared by both request types that
// splits into s3 or s4 at the end. joint_2cpu gives the shared stages two
// CPUs each; separated clones the shared stages into two disjoint pipelines,
// each clone keeping the original workload table.
inline PatternModel build_pipes_and_filters(PipesVariant variant) {
  PatternModel m;
  m.request_types = {{0, "s3_requests"}, {1, "s4_requests"}};

  if (variant != PipesVariant::Separated) {
    const double shared_capacity = variant == PipesVariant::Joint2Cpu ? 2.0 : 1.0;
    m.name = std::string("pipes_and_filters_") + to_string(variant);

    ServiceSpec s1;
    s1.name = "s1";
    s1.cpu_capacity = shared_capacity;
    s1.demand = {{"s3_requests", 12.0}, {"s4_requests", 8.0}};
    s1.calls = {{"s3_requests", {{"s2", CallMode::Sequential}}},
                {"s4_requests", {{"s2", CallMode::Sequential}}}};

    ServiceSpec s2;
    s2.name = "s2";
    s2.cpu_capacity = shared_capacity;
    s2.demand = {{"s3_requests", 15.0}, {"s4_requests", 9.0}};
    s2.calls = {{"s3_requests", {{"s3", CallMode::Sequential}}},
                {"s4_requests", {{"s4", CallMode::Sequential}}}};

    ServiceSpec s3;
    s3.name = "s3";
    s3.demand = {{"s3_requests", 11.0}};
    ServiceSpec s4;
    s4.name = "s4";
    s4.demand = {{"s4_requests", 10.0}};

    m.services = {s1, s2, s3, s4};
    m.entry = {{"s3_requests", "s1"}, {"s4_requests", "s1"}};
    return m;
  }

  m.name = "pipes_and_filters_separated";

  ServiceSpec s1a;
  s1a.name = "s1a";
  s1a.demand = {{"s3_requests", 12.0}, {"s4_requests", 8.0}};
  s1a.calls = {{"s3_requests", {{"s2a", CallMode::Sequential}}}};
  ServiceSpec s1b;
  s1b.name = "s1b";
  s1b.demand = {{"s3_requests", 12.0}, {"s4_requests", 8.0}};
  s1b.calls = {{"s4_requests", {{"s2b", CallMode::Sequential}}}};
  ServiceSpec s2a;
  s2a.name = "s2a";
  s2a.demand = {{"s3_requests", 15.0}, {"s4_requests", 9.0}};
  s2a.calls = {{"s3_requests", {{"s3", CallMode::Sequential}}}};
  ServiceSpec s2b;
  s2b.name = "s2b";
  s2b.demand = {{"s3_requests", 15.0}, {"s4_requests", 9.0}};
  s2b.calls = {{"s4_requests", {{"s4", CallMode::Sequential}}}};
  ServiceSpec s3;
  s3.name = "s3";
  s3.demand = {{"s3_requests", 11.0}};
  ServiceSpec s4;
  s4.name = "s4";
  s4.demand = {{"s4_requests", 10.0}};

  m.services = {s1a, s1b, s2a, s2b, s3, s4};
  m.entry = {{"s3_requests", "s1a"}, {"s4_requests", "s1b"}};
  return m;
}

}  // namespace patternlab
