#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "random.hpp"

namespace patternlab {

// Probability of each request type in the generated stream.
struct LoadMix {
  std::map<std::string, double> probabilities;

  double probability(const std::string& label) const {
    auto it = probabilities.find(label);
    return it == probabilities.end() ? 0.0 : it->second;
  }

  bool operator==(const LoadMix&) const = default;
};

struct SweepSpec {
  std::vector<LoadMix> mixes;  // ascending in the first type's probability
  int granularity = 0;
};

// Empty string when the mix is valid for the given request types, otherwise a
// description of the problem.
inline std::string check_mix(const LoadMix& mix, const std::vector<RequestType>& types) {
  if (mix.probabilities.size() != types.size())
    return "mix must assign a probability to every request type";
  double sum = 0.0;
  for (const auto& t : types) {
    auto it = mix.probabilities.find(t.label);
    if (it == mix.probabilities.end()) return "mix missing request type '" + t.label + "'";
    if (it->second < 0.0 || it->second > 1.0)
      return "mix probability for '" + t.label + "' outside [0, 1]";
    sum += it->second;
  }
  if (std::abs(sum - 1.0) > 1e-9) return "mix probabilities do not sum to 1";
  return "";
}

// The granularity+1 heterogeneous mixes p(r1) = i/granularity, i = 0..g,
// uniformly covering the two-type mix space. Experiments define exactly two
// request types; anything else is unsupported.
inline SweepSpec enumerate_mixes(int granularity, const std::vector<RequestType>& types) {
  if (granularity < 1) throw std::invalid_argument("granularity must be >= 1");
  if (types.size() != 2)
    throw std::invalid_argument("heterogeneous sweeps require exactly two request types");
  SweepSpec sweep;
  sweep.granularity = granularity;
  for (int i = 0; i <= granularity; ++i) {
    double p = static_cast<double>(i) / granularity;
    LoadMix mix;
    mix.probabilities[types[0].label] = p;
    mix.probabilities[types[1].label] = 1.0 - p;
    sweep.mixes.push_back(std::move(mix));
  }
  return sweep;
}

// One i.i.d. draw from the mix; deterministic for a given rng state.
inline const RequestType& sample_request_type(const LoadMix& mix,
                                              const std::vector<RequestType>& types,
                                              Rng& rng) {
  if (types.empty()) throw std::invalid_argument("no request types to sample");
  double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < types.size(); ++i) {
    acc += mix.probability(types[i].label);
    if (u < acc) return types[i];
  }
  return types.back();
}

}  // namespace patternlab
