#pragma once

// Thermal reference distributions, surface gravities of both horizon
// models, and the Fermi-Dirac temperature fit used on measured spectra.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawking/lattice_model.hpp"
#include "hawking/wavepackets.hpp"

namespace hawking {

// f(omega) = 1 / (exp(2 pi omega / kappa) + 1)
double fermi_dirac(double omega, double kappa);

// sqrt(f(omega) f(-omega)) = 1 / (2 cosh(pi omega / kappa))
double pair_correlation(double omega, double kappa);

// f averaged over a Gaussian energy distribution of standard deviation spread.
double smeared_fermi_dirac(double omega, double kappa, double spread);

struct SurfaceGravity {
  double kappa = 0.0;       // kappa_tilde v_Fl tanh(kappa_tilde pi W / 4)
  double asymptotic = 0.0;  // kappa_tilde v_Fl
  double relative_difference = 0.0;
};

SurfaceGravity surface_gravity_floquet(const FloquetProfileParams& p, const LatticeParams& lat);

double surface_gravity_local(const LocalProfileParams& p, double t = 1.0);

// Binary entropy -f ln f - (1 - f) ln(1 - f) in nats.
double binary_entropy(double f);

// Entropy per unit time carried by a thermal chiral channel at T = kappa / 2 pi,
// integral of binary_entropy(f(omega)) d omega / 2 pi = kappa / 12.
double entropy_rate_theory(double kappa);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Orientation { positive, negative };

struct HawkingFit {
  double T_fit = 0.0;
  double T_theory = 0.0;
  double residual_max = 0.0;         // against the fitted curve
  double theory_residual_max = 0.0;  // against f at T_theory
  double omega_min = 0.0;            // fitted window
  double omega_max = 0.0;
  std::size_t n_used = 0;
  int iterations = 0;
  // negative: the data decrease with -omega, fitted as N(-omega).
  Orientation orientation = Orientation::positive;

  double relative_error() const { return T_fit / T_theory - 1.0; }
};

// Least squares of N(omega) against 1 / (exp(omega / T) + 1) over points with
// 0.02 < N < 0.98. Requires 8 points whose omega range covers [-kappa, kappa].
// Throws FitError when the data cannot be fitted.
HawkingFit fit_hawking_temperature(std::span<const SpectrumPoint> points, double kappa_theory);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

std::string to_string(Orientation o);

}  // namespace hawking
