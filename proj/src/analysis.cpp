#include "hawking/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hawking {

using std::numbers::pi;

double fermi_dirac(double omega, double kappa) {
  if (!(kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  const double x = 2.0 * pi * omega / kappa;
  // exp(-x) form for large positive x avoids overflow
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

double pair_correlation(double omega, double kappa) {
  if (!(kappa > 0.0)) throw ValidationError("kappa", "must be positive");
  return 0.5 / std::cosh(pi * omega / kappa);
}

double smeared_fermi_dirac(double omega, double kappa, double spread) {
  if (!(spread > 0.0)) return fermi_dirac(omega, kappa);
  constexpr int n = 801;
  const double half = 8.0 * spread;
  const double h = 2.0 * half / (n - 1);
  double sum = 0.0;
  double weight = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = -half + i * h;
    const double g = std::exp(-0.5 * d * d / (spread * spread)) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    sum += g * fermi_dirac(omega + d, kappa);
    weight += g;
  }
  return sum / weight;
}

SurfaceGravity surface_gravity_floquet(const FloquetProfileParams& p, const LatticeParams& lat) {
  p.validate(lat);
  SurfaceGravity s;
  s.asymptotic = p.kappa_tilde * lat.floquet_velocity();
  s.kappa = s.asymptotic * std::tanh(p.kappa_tilde * pi * p.width / 4.0);
  s.relative_difference = std::abs(s.kappa - s.asymptotic) / s.asymptotic;
  return s;
}

double surface_gravity_local(const LocalProfileParams& p, double t) {
  if (!(p.kappa_hat > 0.0)) throw ValidationError("kappa_hat", "must be positive");
  return p.kappa_hat * t;
}

double binary_entropy(double f) {
  double s = 0.0;
  if (f > 0.0) s -= f * std::log(f);
  if (f < 1.0) s -= (1.0 - f) * std::log1p(-f);
  return s;
}

double entropy_rate_theory(double kappa) { return kappa / 12.0; }

namespace {

double fermi_beta(double beta, double omega) {
  const double x = beta * omega;
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

}  // namespace

HawkingFit fit_hawking_temperature(std::span<const SpectrumPoint> points, double kappa_theory) {
  if (!(kappa_theory > 0.0)) throw ValidationError("kappa", "must be positive");
  if (points.size() < 8) throw FitError("need at least 8 spectrum points");
  double lo = points.front().omega;
  double hi = lo;
  for (const auto& p : points) {
    if (!std::isfinite(p.occupation)) throw FitError("non-finite occupation in fit input");
    lo = std::min(lo, p.omega);
    hi = std::max(hi, p.omega);
  }
  if (lo > -kappa_theory || hi < kappa_theory) {
    std::ostringstream msg;
    msg << "omega range [" << lo << ", " << hi << "] does not cover [-kappa, kappa] = ["
        << -kappa_theory << ", " << kappa_theory << "]";
    throw FitError(msg.str());
  }

  // Orientation from the sign of the least-squares slope of N against omega.
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : points) {
    xs.push_back(p.omega);
    ys.push_back(p.occupation);
  }
  HawkingFit fit;
  fit.orientation = linear_fit(xs, ys).slope > 0.0 ? Orientation::negative : Orientation::positive;
  const double sign = fit.orientation == Orientation::positive ? 1.0 : -1.0;

  std::vector<double> omega;
  std::vector<double> occ;
  for (const auto& p : points) {
    if (p.occupation > 0.02 && p.occupation < 0.98) {
      omega.push_back(sign * p.omega);
      occ.push_back(p.occupation);
    }
  }
  if (omega.size() < 3) throw FitError("fewer than 3 points inside 0.02 < N < 0.98");
  fit.n_used = omega.size();
  fit.omega_min = *std::min_element(omega.begin(), omega.end()) * sign;
  fit.omega_max = *std::max_element(omega.begin(), omega.end()) * sign;
  if (fit.omega_min > fit.omega_max) std::swap(fit.omega_min, fit.omega_max);

  // Start from the logit regression ln(1/N - 1) = beta omega.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    num += omega[i] * std::log(1.0 / occ[i] - 1.0);
    den += omega[i] * omega[i];
  }
  if (!(den > 0.0)) throw FitError("all fitted points sit at omega = 0");
  double beta = num / den;
  if (!(beta > 0.0)) {
    std::ostringstream msg;
    msg << "data are not decreasing in omega (initial beta " << beta << ")";
    throw FitError(msg.str());
  }

  auto sse = [&](double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const double r = occ[i] - fermi_beta(b, omega[i]);
      s += r * r;
    }
    return s;
  };

  double current = sse(beta);
  for (fit.iterations = 0; fit.iterations < 100; ++fit.iterations) {
    double jtj = 0.0;
    double jtr = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const double model = fermi_beta(beta, omega[i]);
      const double d = -omega[i] * model * (1.0 - model);
      jtj += d * d;
      jtr += d * (occ[i] - model);
    }
    if (!(jtj > 0.0)) throw FitError("singular fit Jacobian");
    double step = jtr / jtj;
    double trial = beta + step;
    double next = trial > 0.0 ? sse(trial) : INFINITY;
    int halvings = 0;
    while (!(next <= current) && halvings < 60) {
      step *= 0.5;
      trial = beta + step;
      next = trial > 0.0 ? sse(trial) : INFINITY;
      ++halvings;
    }
    if (!(next <= current)) break;
    const bool done = std::abs(step) <= 1e-14 * std::abs(beta);
    beta = trial;
    current = next;
    if (done) break;
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) throw FitError("fit diverged");

  fit.T_fit = 1.0 / beta;
  fit.T_theory = kappa_theory / (2.0 * pi);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    fit.residual_max = std::max(fit.residual_max, std::abs(occ[i] - fermi_beta(beta, omega[i])));
    fit.theory_residual_max =
        std::max(fit.theory_residual_max, std::abs(occ[i] - fermi_dirac(omega[i], kappa_theory)));
  }
  return fit;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs 2+ pairs");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

std::string to_string(Orientation o) {
  return o == Orientation::positive ? "positive" : "negative";
}

}  // namespace hawking
