#include "hawking/lattice_model.hpp"

#include <cmath>
#include <numbers>

namespace hawking {

using std::numbers::pi;

void LatticeParams::validate() const {
  if (n_sites < 4) throw ValidationError("lattice.n_sites", "must be at least 4");
  if (n_sites % 2 != 0) throw ValidationError("lattice.n_sites", "must be even");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("lattice.dt", "must be positive");
}

void FloquetProfileParams::validate(const LatticeParams& lat) const {
  if (!(kappa_tilde > 0.0)) throw ValidationError("profile.kappa_tilde", "must be positive");
  if (kappa_tilde >= 1.0) {
    throw ValidationError("profile.kappa_tilde", "must be small on the lattice scale (< 1)");
  }
  if (!(b >= 1.0)) throw ValidationError("profile.b", "must be at least 1");
  if (!(width > 0.0) || width >= lat.length()) {
    throw ValidationError("profile.width", "must lie in (0, N)");
  }
  if (kappa_tilde * pi * width / 4.0 <= 2.0) {
    throw ValidationError("profile.width",
                          "kappa_tilde * pi * W / 4 must exceed 2 (horizons too close)");
  }
}

void LocalProfileParams::validate(const LatticeParams& lat) const {
  if (!(kappa_hat > 0.0)) throw ValidationError("profile.kappa_hat", "must be positive");
  if (j_b <= 0 || j_b >= lat.n_sites) throw ValidationError("profile.j_b", "must lie in (0, N)");
  if (j_w <= j_b || j_w >= lat.n_sites) {
    throw ValidationError("profile.j_w", "must lie in (j_b, N)");
  }
  if (!(mu >= 0.0)) throw ValidationError("profile.mu", "must be non-negative");
}

double floquet_hopping_at(double x, const FloquetProfileParams& p, const LatticeParams& lat) {
  const double L = lat.length();
  const double t = 1.0 / lat.dt;
  const double numerator = std::cosh(p.kappa_tilde * pi * p.width / 4.0);
  const double denominator = std::cosh(pi * p.kappa_tilde * (x - L / 2.0) / 2.0);
  // Both cosh factors overflow together for extreme widths; the ratio does not.
  double ratio = numerator / denominator;
  if (!std::isfinite(ratio)) {
    const double a = p.kappa_tilde * pi * p.width / 4.0;
    const double c = std::abs(pi * p.kappa_tilde * (x - L / 2.0) / 2.0);
    ratio = std::exp(a - c) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * c));
  }
  const double base = 4.0 / (pi * p.b) * std::atan(ratio) + (p.b - 1.0) / p.b;
  return t * std::pow(base, p.b);
}

std::function<double(double)> floquet_hopping_function(const FloquetProfileParams& p,
                                                       const LatticeParams& lat) {
  return [p, lat](double x) { return floquet_hopping_at(x, p, lat); };
}

double floquet_black_hole_position(const FloquetProfileParams& p, const LatticeParams& lat) {
  return lat.length() / 2.0 - p.width / 2.0;
}

double floquet_white_hole_position(const FloquetProfileParams& p, const LatticeParams& lat) {
  return lat.length() / 2.0 + p.width / 2.0;
}

HoppingProfile floquet_hopping_profile(const FloquetProfileParams& p, const LatticeParams& lat) {
  lat.validate();
  p.validate(lat);
  HoppingProfile out;
  out.values.resize(lat.n_sites);
  for (int j = 0; j < lat.n_sites; ++j) out.values[j] = floquet_hopping_at(j, p, lat);
  return out;
}

namespace {
double logistic_s(double x) { return 1.0 / (1.0 + std::exp(x)); }
}  // namespace

HoppingProfile local_hopping_profile(const LocalProfileParams& p, const LatticeParams& lat) {
  lat.validate();
  p.validate(lat);
  HoppingProfile out;
  out.values.resize(lat.n_sites);
  for (int j = 0; j < lat.n_sites; ++j) {
    out.values[j] = 1.0 - 2.0 * logistic_s(2.0 * p.kappa_hat * (j - p.j_b)) -
                    2.0 * logistic_s(-2.0 * p.kappa_hat * (j - p.j_w));
  }
  return out;
}

HoppingProfile uniform_profile(int n_sites, double t) {
  return HoppingProfile{std::vector<double>(static_cast<std::size_t>(n_sites), t)};
}

SingleParticleOperator build_minkowski_hamiltonian(const LatticeParams& lat, double t) {
  lat.validate();
  return build_floquet_hamiltonian(uniform_profile(lat.n_sites, t));
}

SingleParticleOperator build_floquet_hamiltonian(const HoppingProfile& profile) {
  const auto n = static_cast<Eigen::Index>(profile.size());
  Mat h = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index next = (j + 1) % n;
    const double bond = (profile[j] + profile[next]) / 4.0;
    h(next, j) += kI * bond;
    h(j, next) += -kI * bond;
  }
  return {std::move(h), OperatorKind::hermitian};
}

SparseMat floquet_hamiltonian_sparse(const HoppingProfile& profile) {
  const auto n = static_cast<Eigen::Index>(profile.size());
  std::vector<Eigen::Triplet<cplx>> entries;
  entries.reserve(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index next = (j + 1) % n;
    const double bond = (profile[j] + profile[next]) / 4.0;
    entries.emplace_back(next, j, kI * bond);
    entries.emplace_back(j, next, -kI * bond);
  }
  SparseMat h(n, n);
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

SingleParticleOperator build_local_hamiltonian(const HoppingProfile& profile, double mu) {
  const auto n = static_cast<Eigen::Index>(profile.size());
  Mat h = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index next = (j + 1) % n;
    const cplx forward = (kI * profile[j] + mu) / 2.0;
    h(next, j) += forward;
    h(j, next) += std::conj(forward);
    h(j, j) += -mu;
  }
  return {std::move(h), OperatorKind::hermitian};
}

double floquet_dispersion(double k, double v, double v_floquet, double dt) {
  const double omega = v * std::sin(k) - k * v_floquet;
  const double period = 2.0 * pi / dt;
  double r = std::fmod(omega + pi / dt, period);
  if (r <= 0.0) r += period;
  return r - pi / dt;
}

double floquet_doubler_momentum(double v, double v_floquet) {
  if (!(v > v_floquet)) throw std::domain_error("doubler zeros need v > v_Fl");
  auto g = [&](double k) { return v * std::sin(k) - k * v_floquet; };
  // g rises from 0 up to k = arccos(v_Fl / v) and is negative at pi.
  double lo = std::acos(v_floquet / v);
  double hi = pi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double local_dispersion(double k, double t, double mu, Side side) {
  const double s = side == Side::outside ? 1.0 : -1.0;
  return s * t * std::sin(k) + mu * std::cos(k) - mu;
}

double local_group_velocity(double k, double t, double mu, Side side) {
  const double s = side == Side::outside ? 1.0 : -1.0;
  return s * t * std::cos(k) - mu * std::sin(k);
}

double local_doubler_momentum(double t, double mu) {
  return 2.0 * std::acos(mu / std::hypot(t, mu));
}

double solve_local_branch(double energy, double t, double mu, Side side, LocalBranch branch,
                          double tol) {
  // E(k) = R cos(k - s phi) - mu with R = sqrt(t^2 + mu^2), phi = atan2(t, mu).
  const double radius = std::hypot(t, mu);
  const double phi = std::atan2(t, mu);
  if (!(energy > -radius - mu && energy < radius - mu)) {
    throw std::domain_error("energy outside the propagating band");
  }
  double lo = 0.0;
  double hi = 0.0;
  if (side == Side::outside) {
    if (branch == LocalBranch::gapless) {
      lo = phi - pi;
      hi = phi;
    } else {
      lo = phi;
      hi = phi + pi;
    }
  } else {
    if (branch == LocalBranch::gapless) {
      lo = -phi;
      hi = pi - phi;
    } else {
      lo = -pi - phi;
      hi = -phi;
    }
  }
  const bool increasing = local_dispersion(hi, t, mu, side) > local_dispersion(lo, t, mu, side);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool above = local_dispersion(mid, t, mu, side) > energy;
    if (above == increasing) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double k = 0.5 * (lo + hi);
  if (k > pi) k -= 2.0 * pi;
  if (k <= -pi) k += 2.0 * pi;
  return k;
}

}  // namespace hawking
