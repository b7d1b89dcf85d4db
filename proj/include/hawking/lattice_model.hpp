#pragma once

// Hopping profiles, single-particle Hamiltonians and dispersions of the
// uniform chain, the Floquet horizon model and the local chirality-flipping
// model. Units: lattice constant a = 1, hbar = k_B = 1. Sites are labelled
// 0..N-1 on a ring (site N is site 0), site j sits at position x = j.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawking/linalg.hpp"

namespace hawking {

// Raised when a parameter set violates a documented invariant. `field` names
// the offending parameter.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct LatticeParams {
  int n_sites = 0;
  // Floquet period; the Floquet hopping scale is t = 1/dt and v_Fl = 1/dt.
  double dt = 1.0;

  void validate() const;
  double length() const { return static_cast<double>(n_sites); }
  double floquet_velocity() const { return 1.0 / dt; }
};

struct FloquetProfileParams {
  double kappa_tilde = 0.1;  // inverse length
  double b = 3.0;
  double width = 600.0;  // W, outside region width in sites

  void validate(const LatticeParams& lat) const;
};

struct LocalProfileParams {
  double kappa_hat = 0.1;
  int j_b = 0;
  int j_w = 0;
  double mu = 0.5;  // in units of t

  void validate(const LatticeParams& lat) const;
};

struct HoppingProfile {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
};

enum class OperatorKind { hermitian, unitary };

struct SingleParticleOperator {
  Mat matrix;
  OperatorKind kind = OperatorKind::hermitian;

  Eigen::Index dim() const { return matrix.rows(); }
};

// Continuous hopping function t(x) of the Floquet model for energy scale t = 1/dt.
double floquet_hopping_at(double x, const FloquetProfileParams& p, const LatticeParams& lat);
std::function<double(double)> floquet_hopping_function(const FloquetProfileParams& p,
                                                       const LatticeParams& lat);

// Horizon positions x_b = L/2 - W/2 and x_w = L/2 + W/2.
double floquet_black_hole_position(const FloquetProfileParams& p, const LatticeParams& lat);
double floquet_white_hole_position(const FloquetProfileParams& p, const LatticeParams& lat);

HoppingProfile floquet_hopping_profile(const FloquetProfileParams& p, const LatticeParams& lat);

// Hopping in units of t = 1: t_j = 1 - 2 S(2 kappa (j - j_b)) - 2 S(-2 kappa (j - j_w)).
HoppingProfile local_hopping_profile(const LocalProfileParams& p, const LatticeParams& lat);

HoppingProfile uniform_profile(int n_sites, double t);

SingleParticleOperator build_minkowski_hamiltonian(const LatticeParams& lat, double t);
SingleParticleOperator build_floquet_hamiltonian(const HoppingProfile& profile);
SingleParticleOperator build_local_hamiltonian(const HoppingProfile& profile, double mu);

// Same matrices in sparse form, for short-time exponentials.
SparseMat floquet_hamiltonian_sparse(const HoppingProfile& profile);

// omega(k) = v sin(k) - k v_Fl reduced to (-pi/dt, pi/dt].
double floquet_dispersion(double k, double v, double v_floquet, double dt);

// Doubler momentum k* > 0 with v sin(k*) = k* v_Fl; requires v > v_Fl.
double floquet_doubler_momentum(double v, double v_floquet);

// E(k) = s t sin(k) + mu cos(k) - mu, s = +1 outside (t_j = t), s = -1 inside.
enum class Side { outside, inside };
double local_dispersion(double k, double t, double mu, Side side);
double local_group_velocity(double k, double t, double mu, Side side);

// Which of the two zero-energy branches of a local-model region.
enum class LocalBranch { gapless, doubler };

// Doubler zero 2 arccos(mu / sqrt(t^2 + mu^2)) of the outside dispersion; the
// inside doubler sits at minus this value.
double local_doubler_momentum(double t, double mu);

// Solves E(k) = energy on one monotone branch of the local dispersion by
// bisection. Gapless branches contain k = 0, doubler branches contain the
// doubler zero. Throws std::domain_error when the energy is outside the band.
double solve_local_branch(double energy, double t, double mu, Side side, LocalBranch branch,
                          double tol = 1e-14);

}  // namespace hawking
