#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mtclt/banded.hpp"

namespace mtclt {

// Discrete orthogonal polynomial ensemble on a finite grid.
struct DiscreteOPE {
  std::vector<double> grid;
  std::vector<double> weights;
  int n = 1;
  Eigen::MatrixXd ortho;       // ortho(i, j) = p_j(x_i), j = 0..grid.size()-1
  std::vector<double> a, b;    // recurrence of the full orthonormal basis
  std::vector<std::string> warnings;

  static DiscreteOPE build(std::vector<double> grid, std::vector<double> weights, int n);

  // Standard finite families (grid in natural units).
  static DiscreteOPE krawtchouk(int M, double p, int n);
  // Unbounded families truncated where the tail mass drops below 1e-15, or at grid_max if given.
  static DiscreteOPE charlier(double mu, int n, int grid_max = -1);
  static DiscreteOPE meixner(double gamma, double mu, int n, int grid_max = -1);

  int size() const { return static_cast<int>(grid.size()); }
  // The full (M+1)-dimensional Jacobi matrix; the moment identity is exact with it.
  BandedMatrix jacobi() const;
};

struct KernelTable {
  Eigen::MatrixXd K;             // K(x_i, x_j)
  std::vector<double> weights;   // w(x_i)
  int n = 0;
  static KernelTable from(const DiscreteOPE& ope);
};

double variance_oracle_single_time(const DiscreteOPE& ope, const std::vector<double>& f_values);

struct EnumerationResult {
  std::vector<double> values;          // distinct outcomes of X
  std::vector<double> probabilities;
  double mean = 0, variance = 0, k3 = 0, k4 = 0;
  std::vector<double> raw_moments;     // E X^k, k = 1..4
  long configurations = 0;
};

EnumerationResult enumerate_small(const DiscreteOPE& ope, const std::vector<double>& f_values);

// Sequential sampler for a rank-n projection kernel; returns grid indices in increasing order.
std::vector<int> sample_projection_dpp(const KernelTable& kernel, std::mt19937_64& rng);
std::vector<int> sample_projection_dpp(const KernelTable& kernel, std::uint64_t seed);

}  // namespace mtclt
