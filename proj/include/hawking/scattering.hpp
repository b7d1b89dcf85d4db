#pragma once

// Stationary scattering off a single black-hole kink of the local model on an
// open chain. Left of the kink t_j = -t (inside), right of it t_j = +t
// (outside). A solution is seeded on the left with the incoming inside
// doubler wave exp(i q2 j) and continued to the right by the three-term
// recursion of the lattice Schrodinger equation.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hawking/lattice_model.hpp"
#include "hawking/wavepackets.hpp"

namespace hawking {

struct BranchMomenta {
  double k1 = 0.0;  // outside doubler, k*_out - k2
  double k2 = 0.0;  // outside gapless, positive group velocity
  double q1 = 0.0;  // inside gapless, q*_in - q2
  double q2 = 0.0;  // inside doubler, positive group velocity
};

BranchMomenta branch_momenta(double energy, double t, double mu);

struct ScatteringSolution {
  double E = 0.0;
  double q = 0.0;  // q2 - q*_in
  double k1 = 0.0;
  double k2 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  cplx A_L{};
  cplx A_R{};
  int first_site = 0;  // f[0] is the amplitude at this site
  std::vector<cplx> f;
  std::vector<double> J;  // current on bonds (j, j+1), j = first_site, ...
  // Evaluated in quad precision: | |A_R|^2 - |A_L|^2 - 1 | and
  // max_j |J_j - J_first| / |J_first|.
  double flux_residual = 0.0;
  double current_residual = 0.0;

  cplx at(int site) const { return f[static_cast<std::size_t>(site - first_site)]; }
};

// Iterates the recursion from f(j_L - 1), f(j_L) = exp(i q2 j) up to f(j_R + 1)
// and extracts the outside amplitudes at j_R. The profile must be flat at -t
// for j < j_L and at +t for j >= j_R, with t read from the right end.
// Momenta, recursion and extraction run in quad precision: far above the
// Fermi level |A_R|^2 reaches 1e8 and more, and the flux identity is checked
// in absolute terms.
ScatteringSolution solve_recursion(const HoppingProfile& profile, double mu, double energy,
                                   int j_L, int j_R);

// Amplitudes of f(j) = A_L exp(i k1 j) + A_R exp(i k2 j) from f(j_R), f(j_R + 1).
std::pair<cplx, cplx> extract_amplitudes(cplx f_jR, cplx f_jR1, int j_R, double k1, double k2);

// Current across bond (j, j+1).
double probability_current(cplx f_j, cplx f_j1, double t_j, double mu);

struct TransmissionReflection {
  double T = 0.0;
  double R = 0.0;
};

TransmissionReflection transmission_reflection(cplx A_L, cplx A_R);

// Single kink t_j = t (1 - 2 S(2 kappa_hat (j - j_b))) with flat buffers of
// max(20 / kappa_hat, ln(2e12) / (2 kappa_hat)) sites on both sides, so the
// tails deviate from -t and +t by less than 1e-12 t outside [j_L, j_R].
struct KinkGeometry {
  HoppingProfile profile;
  int j_b = 0;
  int j_L = 0;
  int j_R = 0;
};

KinkGeometry kink_geometry(double kappa_hat, double t = 1.0);

struct ScatteringPoint {
  double E = 0.0;
  std::optional<ScatteringSolution> solution;
  std::string failure;

  double occupation() const;  // 1 / |A_R|^2, NaN on failure
};

std::vector<ScatteringPoint> scattering_spectrum(const KinkGeometry& geometry, double mu,
                                                 const std::vector<double>& energies);

std::vector<SpectrumPoint> to_spectrum_points(const std::vector<ScatteringPoint>& points);

}  // namespace hawking
