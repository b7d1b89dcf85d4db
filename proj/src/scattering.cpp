#include "hawking/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <quadmath.h>
#include <stdexcept>
#include <tuple>

namespace hawking {

BranchMomenta branch_momenta(double energy, double t, double mu) {
  if (!(t > 0.0)) throw ValidationError("scattering.t", "must be positive");
  if (!(mu > 0.0)) throw ValidationError("scattering.mu", "must be positive");
  const double k_star = local_doubler_momentum(t, mu);
  BranchMomenta m;
  m.k2 = solve_local_branch(energy, t, mu, Side::outside, LocalBranch::gapless);
  m.q2 = solve_local_branch(energy, t, mu, Side::inside, LocalBranch::doubler);
  m.k1 = k_star - m.k2;
  m.q1 = -k_star - m.q2;
  return m;
}

double probability_current(cplx f_j, cplx f_j1, double t_j, double mu) {
  const cplx forward = std::conj(f_j) * f_j1;
  const cplx value = (t_j / 2.0) * (forward + std::conj(forward)) +
                     (kI * mu / 2.0) * (forward - std::conj(forward));
  return value.real();
}

std::pair<cplx, cplx> extract_amplitudes(cplx f_jR, cplx f_jR1, int j_R, double k1, double k2) {
  const cplx e1 = std::polar(1.0, k1);
  const cplx e2 = std::polar(1.0, k2);
  if (std::abs(e1 - e2) < 1e-12) throw std::domain_error("degenerate outside momenta k1 = k2");
  const cplx a_l = (e2 * f_jR - f_jR1) / (std::polar(1.0, k1 * j_R) * (e2 - e1));
  const cplx a_r = (e1 * f_jR - f_jR1) / (std::polar(1.0, k2 * j_R) * (e1 - e2));
  return {a_l, a_r};
}

namespace {

using qreal = __float128;
using qcplx = std::complex<qreal>;

qcplx qexpi(qreal phase) { return {cosq(phase), sinq(phase)}; }

qreal qnorm(const qcplx& z) { return z.real() * z.real() + z.imag() * z.imag(); }

cplx to_double(const qcplx& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Newton polish of a branch root of s t sin k + mu cos k - mu = E.
qreal polish(double k, double energy, double t, double mu, double s) {
  qreal q = k;
  for (int it = 0; it < 4; ++it) {
    const qreal value = s * t * sinq(q) + mu * cosq(q) - mu - energy;
    const qreal slope = s * t * cosq(q) - mu * sinq(q);
    q -= value / slope;
  }
  return q;
}

qreal quad_current(const qcplx& f_j, const qcplx& f_j1, qreal t_j, qreal mu) {
  const qcplx forward = std::conj(f_j) * f_j1;
  return t_j * forward.real() - mu * forward.imag();
}

}  // namespace

ScatteringSolution solve_recursion(const HoppingProfile& profile, double mu, double energy,
                                   int j_L, int j_R) {
  const int size = static_cast<int>(profile.size());
  if (j_L < 1 || j_R <= j_L + 1 || j_R + 1 >= size) {
    throw std::out_of_range("recursion window must satisfy 1 <= j_L < j_R - 1, j_R < size - 1");
  }
  const double t = profile[static_cast<std::size_t>(size - 1)];
  for (int j = 0; j <= j_L; ++j) {
    if (std::abs(profile[static_cast<std::size_t>(j)] + t) > 1e-12 * t) {
      throw std::domain_error("profile not flat at -t left of j_L");
    }
  }
  for (int j = j_R - 1; j < size; ++j) {
    if (std::abs(profile[static_cast<std::size_t>(j)] - t) > 1e-12 * t) {
      throw std::domain_error("profile not flat at +t right of j_R");
    }
  }
  const BranchMomenta m = branch_momenta(energy, t, mu);
  const qreal k2 = polish(m.k2, energy, t, mu, 1.0);
  const qreal q2 = polish(m.q2, energy, t, mu, -1.0);
  const qreal k_star = 2 * acosq(mu / sqrtq(static_cast<qreal>(t) * t + static_cast<qreal>(mu) * mu));
  const qreal k1 = k_star - k2;

  ScatteringSolution s;
  s.E = energy;
  s.k1 = static_cast<double>(k1);
  s.k2 = static_cast<double>(k2);
  s.q1 = static_cast<double>(-k_star - q2);
  s.q2 = static_cast<double>(q2);
  s.q = static_cast<double>(q2 + k_star);
  s.first_site = j_L - 1;

  const auto count = static_cast<std::size_t>(j_R - j_L + 3);
  std::vector<qcplx> f(count);
  f[0] = qexpi(q2 * (j_L - 1));
  f[1] = qexpi(q2 * j_L);
  const qreal qmu = mu;
  const qreal shifted = static_cast<qreal>(energy) + qmu;
  for (int j = j_L; j <= j_R; ++j) {
    const std::size_t i = static_cast<std::size_t>(j - s.first_site);
    const qcplx lead(qmu / 2, -static_cast<qreal>(profile[static_cast<std::size_t>(j)]) / 2);
    const qcplx back(qmu / 2, static_cast<qreal>(profile[static_cast<std::size_t>(j - 1)]) / 2);
    if (qnorm(lead) == 0) throw std::domain_error("vanishing recursion coefficient");
    f[i + 1] = (shifted * f[i] - back * f[i - 1]) / lead;
    if (!std::isfinite(static_cast<double>(qnorm(f[i + 1])))) {
      throw std::domain_error("recursion diverged; energy off the propagating band");
    }
  }

  std::vector<qreal> current;
  for (int j = s.first_site; j <= j_R; ++j) {
    const std::size_t i = static_cast<std::size_t>(j - s.first_site);
    current.push_back(quad_current(f[i], f[i + 1], profile[static_cast<std::size_t>(j)], qmu));
  }
  qreal worst = 0;
  for (qreal value : current) worst = fmaxq(worst, fabsq(value - current.front()));
  s.current_residual = static_cast<double>(worst / fabsq(current.front()));

  const qcplx e1 = qexpi(k1);
  const qcplx e2 = qexpi(k2);
  if (qnorm(e1 - e2) < 1e-24) throw std::domain_error("degenerate outside momenta k1 = k2");
  const qcplx f_r = f[static_cast<std::size_t>(j_R - s.first_site)];
  const qcplx f_r1 = f[static_cast<std::size_t>(j_R + 1 - s.first_site)];
  const qcplx a_l = (e2 * f_r - f_r1) / (qexpi(k1 * j_R) * (e2 - e1));
  const qcplx a_r = (e1 * f_r - f_r1) / (qexpi(k2 * j_R) * (e1 - e2));
  // Both outside waves and the seeded wave share |group velocity|, so the
  // conserved current reduces to the flux identity.
  s.flux_residual = static_cast<double>(fabsq(qnorm(a_r) - qnorm(a_l) - 1));

  s.A_L = to_double(a_l);
  s.A_R = to_double(a_r);
  s.f.reserve(count);
  for (const auto& z : f) s.f.push_back(to_double(z));
  for (qreal value : current) s.J.push_back(static_cast<double>(value));
  return s;
}

TransmissionReflection transmission_reflection(cplx A_L, cplx A_R) {
  const double r2 = std::norm(A_R);
  return {1.0 / r2, std::norm(A_L) / r2};
}

KinkGeometry kink_geometry(double kappa_hat, double t) {
  if (!(kappa_hat > 0.0)) throw ValidationError("scattering.kappa_hat", "must be positive");
  if (!(t > 0.0)) throw ValidationError("scattering.t", "must be positive");
  const double needed = std::max(20.0 / kappa_hat, std::log(2e12) / (2.0 * kappa_hat));
  // 20 / kappa_hat also makes tanh round to exactly +-1 in double.
  const int buffer = static_cast<int>(std::ceil(needed));
  KinkGeometry g;
  g.j_L = 1;
  g.j_b = buffer + 1;
  g.j_R = g.j_b + buffer + 1;
  const int size = g.j_R + 2;
  g.profile.values.resize(static_cast<std::size_t>(size));
  for (int j = 0; j < size; ++j) {
    const double x = 2.0 * kappa_hat * (j - g.j_b);
    // 1 - 2 S(x) = tanh(x / 2)
    g.profile.values[static_cast<std::size_t>(j)] = t * std::tanh(x / 2.0);
  }
  return g;
}

double ScatteringPoint::occupation() const {
  if (!solution) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 / std::norm(solution->A_R);
}

std::vector<ScatteringPoint> scattering_spectrum(const KinkGeometry& geometry, double mu,
                                                 const std::vector<double>& energies) {
  std::vector<ScatteringPoint> out(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) {
    out[i].E = energies[i];
    try {
      out[i].solution = solve_recursion(geometry.profile, mu, energies[i], geometry.j_L, geometry.j_R);
    } catch (const std::exception& e) {
      out[i].failure = e.what();
    }
  }
  return out;
}

std::vector<SpectrumPoint> to_spectrum_points(const std::vector<ScatteringPoint>& points) {
  std::vector<SpectrumPoint> out;
  for (const auto& p : points) {
    if (p.solution) out.push_back({p.E, p.occupation(), 0.0, 0.0});
  }
  return out;
}

}  // namespace hawking
