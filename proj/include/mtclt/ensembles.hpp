#pragma once

#include <string>

#include "mtclt/banded.hpp"
#include "mtclt/polynomial.hpp"
#include "mtclt/symbols.hpp"

namespace mtclt {

enum class Family {
  HermiteOU,
  LaguerreSquaredOU,
  JacobiDiffusion,
  Meixner,
  CharlierEdge,
  CharlierBulk,
  Krawtchouk,
  Hahn,
  NonStationaryHermite,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);  // throws std::invalid_argument

struct EnsembleSpec {
  Family family = Family::HermiteOU;
  int n = 1;
  double r = 0.0;                      // Laguerre
  double alpha = 0.0, beta = 0.0;      // Jacobi
  double gamma = 1.0, mu = 0.5;        // Meixner (gamma, mu); Charlier uses mu; Krawtchouk uses gamma
  double p = 0.5;                      // Krawtchouk
  double B = 1.0, C = 1.0;             // Hahn
  Polynomial V = Polynomial({0.0, 0.0, 0.5});  // NonStationaryHermite potential

  void validate() const;  // throws std::invalid_argument naming the violated constraint
};

// Symmetric tridiagonal Jacobi matrix of the scaled orthonormal family, indices 1..S.
// For Hahn the layer coordinate is the horizontal position rho rather than a time.
BandedMatrix jacobi_matrix(const EnsembleSpec& spec, double layer_time, int S);

// Conjugation by the c-weights: (J)_{kl} = (c_k / c_l) (Jacobi)_{kl}.
BandedMatrix weighted_recurrence(const EnsembleSpec& spec, double layer_time, int S);

// e^{-t} Jacobi on the strict lower part; e^{-t} Jacobi + 2 sinh(t) V'(Jacobi) on the rest.
BandedMatrix nonstationary_J(const BandedMatrix& jacobi, const Polynomial& Vprime, double t);

struct LimitData {
  double a0 = 0.0;
  double a1 = 1.0;
  double tau = 0.0;         // tau(t) at the requested time
  double kappa_n = 1.0;     // physical time = kappa_n * t
  std::string kappa_desc;   // human-readable description of kappa_n
  LaurentSymbol symbol;     // limit of the diagonals of J near the cut
};

LimitData limit_symbol(const EnsembleSpec& spec, double t);
double tau_of_time(const EnsembleSpec& spec, double t);

// tau_m = 1/2 ln(t_m / (1 - t_m)) for the bridge preset on (0, 1)
double bridge_tau(double t);

struct HahnLimits {
  double a_inf = 0.0, b_inf = 0.0;
  double a_n = 0.0, a_2n = 0.0, b_n = 0.0, b_2n = 0.0;
  int n = 0;
  double tau = 0.0;          // from the c-weight ratio of the finite-n construction
  double tau_printed = 0.0;  // 1/2 ln((1+B+C-rho)/(1+rho))
};

HahnLimits hahn_limits(double B, double C, double rho, int n = 2000);

// Hahn recurrence coefficients (unscaled) for weight 1/(x!(x+alpha)!(M+beta-x)!(M-x)!) on 0..M.
double hahn_a(int k, double alpha, double beta, int M);
double hahn_b(int k, double alpha, double beta, int M);

// Recurrence entries at index n (1-based row n): off-diagonal a_n and diagonal b_{n-1}.
struct RecurrenceProbe {
  double a = 0.0, b = 0.0;
};
RecurrenceProbe probe_recurrence(const EnsembleSpec& spec, double layer_time, int index);

}  // namespace mtclt
