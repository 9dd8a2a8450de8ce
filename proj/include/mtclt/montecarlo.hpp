#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mtclt/symbols.hpp"

namespace mtclt {

struct OUBridgeConfig {
  int n = 10;
  std::vector<double> times;
  long samples = 1000;
  std::uint64_t seed = 1;
  bool rescale = true;  // xi = x / sqrt(n)
  int threads = 1;

  void validate() const;
};

// Eigenvalues (ascending, rescaled if requested) of the matrix OU process at each time.
std::vector<std::vector<double>> sample_matrix_ou_path(int n, const std::vector<double>& times,
                                                       std::mt19937_64& rng, bool rescale = true);

struct ExperimentReport {
  long samples = 0;
  double mean = 0, variance = 0, k3 = 0, k4 = 0;
  double se_mean = 0, se_variance = 0, se_k3 = 0, se_k4 = 0;
  std::vector<double> layer_means;
  std::vector<std::vector<double>> layer_covariance;
  std::vector<double> per_sample;  // X for each sample, in sample order
  double wall_seconds = 0;
  bool used_power_sums = false;
};

// Polynomial statistics of degree <= 2 are evaluated from traces; anything else from eigenvalues.
ExperimentReport run_experiment(const OUBridgeConfig& config, const LayeredStatistic& stat);

// Sample cumulant summary of a data vector (k-statistics with normal-theory standard errors).
ExperimentReport summarize(const std::vector<double>& x);

}  // namespace mtclt
