// Copyright 2026 The scengen Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCENGEN_SAMPLING_HPP_
#define SCENGEN_SAMPLING_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "scengen/scenario.hpp"

namespace scengen {

// Raised when the requested moments lie outside the feasible region
// (kurtosis must exceed skewness^2 + 1) or a fitted shape degenerates.
class MomentRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic draw stream: the standard 64-bit Mersenne engine (bit-exact
// by specification) plus fixed transforms, so a seed pins every sample.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // open (0,1)
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal();
  // unit-scale gamma, any shape > 0
  double gamma(double shape);
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
};

enum class PearsonFamily {
  kNormal,
  kTypeI,    // bounded support, beta
  kTypeIII,  // gamma
  kTypeIV,   // unbounded skewed, arctan family
  kTypeV,    // inverse gamma
  kTypeVI,   // beta prime
  kTypeVII,  // symmetric heavy tails, scaled t
  kEmpirical,
};

const char* to_string(PearsonFamily family);

// A univariate generator matching four prescribed moments. Fitted on the
// magnitude of the skewness; negative targets sample mirrored around the
// mean. param[] meaning depends on the family, see fit_pearson.
struct MarginalModel {
  PearsonFamily family = PearsonFamily::kNormal;
  double mean = 0.0;
  double variance = 1.0;
  double skewness = 0.0;
  double kurtosis = 3.0;
  bool mirrored = false;
  double param[4] = {0.0, 0.0, 0.0, 0.0};
  std::vector<double> pool;  // kEmpirical only, sorted

  double sample(Rng& rng) const;

  // Inverse-ECDF generator over observed data (config-selected alternative
  // to the moment fit).
  static MarginalModel empirical(std::vector<double> data);
};

// Selects the Pearson family from the normalized shape pair and solves the
// closed-form parameterization that reproduces all four moments (types V
// and VII pin the kurtosis only up to their one-parameter curve).
MarginalModel fit_pearson(double mean, double variance, double skewness,
                          double kurtosis);

// Draws N correlated scenarios: Gaussian-copula pseudo-observations mapped
// through each marginal pool's interpolated quantile function. A single
// marginal skips the copula and returns its Pearson sample directly.
ScenarioSet sample_original(const std::vector<std::string>& names,
                            const std::vector<MarginalModel>& marginals,
                            const std::vector<std::vector<double>>& correlation,
                            int n, std::uint64_t seed);

struct ClusterAssignment {
  std::vector<int> label;                     // [n], cluster in 0..K-1
  std::vector<std::vector<double>> centroid;  // [k][i], original units
  std::vector<double> sse_trace;              // standardized SSE per sweep

  int num_clusters() const { return static_cast<int>(centroid.size()); }
};

// Lloyd iterations (at most 300 sweeps) from a kmeans++ seeding, run on
// standardized coordinates with scenario probabilities as point weights.
// Every cluster is nonempty on return; K = N short-circuits to the identity
// assignment.
ClusterAssignment kmeans(const ScenarioSet& set, int k, std::uint64_t seed);

}  // namespace scengen

#endif  // SCENGEN_SAMPLING_HPP_
