#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtclt/banded.hpp"
#include "mtclt/symbols.hpp"

namespace mtclt {

struct CumulantRequest {
  std::vector<BandedMatrix> J_list;  // one recurrence matrix per layer
  LayeredStatistic stat;
  int n = 1;                         // cut index
  int k_max = 4;
  std::optional<double> radius;      // empty means auto
  int quad_points = 64;
};

enum class CumulantMethod { contour_full, contour_windowed, composition_series };
std::string method_name(CumulantMethod m);

struct CumulantReport {
  std::map<int, double> values;  // order k -> cumulant C_k (coefficient of lambda^k / k!)
  CumulantMethod method = CumulantMethod::contour_full;
  double radius = 0.0;
  int truncation = 0;
  int window = 0;           // half width ell; 0 for the full computation
  double residual = 0.0;    // largest imaginary part among extracted coefficients (scaled by k!)
  int quad_points = 0;
};

// f(m, J_m) scaled by the layer weight.
std::vector<BandedMatrix> layer_operators(const std::vector<BandedMatrix>& J_list,
                                          const LayeredStatistic& stat);

// Smallest truncation satisfying the margin policy for a cut n.
int required_truncation(int n, int k_max, const LayeredStatistic& stat, int bandwidth = 1);

// Window half width 2 a (k + 1), a the largest bandwidth among the layer operators.
int comparison_window(const std::vector<BandedMatrix>& ops, int k);

BlockDet moment_generating_det(const CumulantRequest& req, double lambda);

CumulantReport cumulants_contour(const CumulantRequest& req);

// Second and higher cumulants from the active block around the cut only.
double cumulants_windowed(const CumulantRequest& req, int k);
// All orders 2..k_max in one pass, using the window for k_max.
CumulantReport cumulants_windowed_report(const CumulantRequest& req);

double composition_series_C2(const std::vector<BandedMatrix>& J_list, const LayeredStatistic& stat, int n);

// Raw moments E X^k, k = 1..k_max, from Richardson-extrapolated central differences of the
// determinant identity. Returns the values; errors (if requested) receive the error estimates.
std::vector<double> moments_by_finite_difference(const CumulantRequest& req, int k_max,
                                                 std::vector<double>* errors = nullptr);

namespace detail {

struct ContourResult {
  std::vector<std::complex<double>> coeffs;  // [lambda^k] of log det - lambda C1, k = 0..k_max
  double residual = 0.0;
};

// Taylor coefficients of log det P_cut (prod_m e^{lambda A_m}) P_cut - lambda * mean.
ContourResult contour_coefficients(const std::vector<BandedMatrix>& ops, int cut, double mean,
                                   int k_max, double radius, int points);

}  // namespace detail

}  // namespace mtclt
