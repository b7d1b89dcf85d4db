#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hawking/analysis.hpp"

using namespace hawking;
using doctest::Approx;
using std::numbers::pi;

TEST_CASE("fermi dirac reference values") {
  CHECK(fermi_dirac(0.0, 0.1) == 0.5);
  CHECK(fermi_dirac(0.014, 0.1) == Approx(0.293251153587).epsilon(1e-11));
  CHECK(fermi_dirac(0.1 / (2.0 * pi), 0.1) == Approx(0.268941421370).epsilon(1e-11));
  CHECK(fermi_dirac(100.0, 0.1) == 0.0);
  CHECK(fermi_dirac(-100.0, 0.1) == 1.0);
  for (double w : {0.003, 0.02, 0.07}) {
    CHECK(fermi_dirac(w, 0.1) + fermi_dirac(-w, 0.1) == Approx(1.0).epsilon(1e-15));
    CHECK(pair_correlation(w, 0.1) ==
          Approx(std::sqrt(fermi_dirac(w, 0.1) * fermi_dirac(-w, 0.1))).epsilon(1e-13));
  }
  CHECK_THROWS_AS(fermi_dirac(0.1, 0.0), ValidationError);
}

TEST_CASE("smeared distribution reduces to f for vanishing spread") {
  CHECK(smeared_fermi_dirac(0.02, 0.1, 0.0) == fermi_dirac(0.02, 0.1));
  CHECK(smeared_fermi_dirac(0.02, 0.1, 1e-6) == Approx(fermi_dirac(0.02, 0.1)).epsilon(1e-9));
  // smearing flattens the curve
  CHECK(smeared_fermi_dirac(0.05, 0.1, 0.02) > fermi_dirac(0.05, 0.1));
}

TEST_CASE("surface gravities") {
  const auto s = surface_gravity_floquet({0.1, 3.0, 600.0}, {3000, 1.0});
  CHECK(s.kappa == Approx(0.1).epsilon(1e-15));
  CHECK(s.relative_difference < 1e-12);
  const auto narrow = surface_gravity_floquet({0.1, 3.0, 30.0}, {200, 1.0});
  CHECK(narrow.relative_difference == Approx(1.0 - std::tanh(0.1 * pi * 30.0 / 4.0)).epsilon(1e-12));
  CHECK(narrow.relative_difference > 0.01);
  CHECK(surface_gravity_local({0.1, 10, 90, 0.5}, 2.0) == Approx(0.2));
}

TEST_CASE("entropy rate of a thermal channel") {
  // trapezoid integral of the binary entropy against kappa / 12
  const double kappa = 0.1;
  double sum = 0.0;
  const double h = 1e-4;
  for (int i = -20000; i <= 20000; ++i) sum += binary_entropy(fermi_dirac(i * h, kappa)) * h;
  CHECK(sum / (2.0 * pi) == Approx(entropy_rate_theory(kappa)).epsilon(1e-9));
  CHECK(binary_entropy(0.5) == Approx(std::log(2.0)));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
}

namespace {

std::vector<SpectrumPoint> thermal(double temperature, double sign, int n = 41) {
  std::vector<SpectrumPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double w = -0.15 + 0.3 * i / (n - 1);
    pts.push_back({w, 1.0 / (std::exp(sign * w / temperature) + 1.0), 0.0, 0.0});
  }
  return pts;
}

}  // namespace

TEST_CASE("temperature fit recovers exact thermal data") {
  const double kappa = 0.1;
  const double t = 1.1 * kappa / (2.0 * pi);
  const auto fit = fit_hawking_temperature(thermal(t, 1.0), kappa);
  CHECK(fit.T_fit == Approx(t).epsilon(1e-10));
  CHECK(fit.relative_error() == Approx(0.1).epsilon(1e-8));
  CHECK(fit.residual_max < 1e-12);
  CHECK(fit.orientation == Orientation::positive);
  CHECK(fit.n_used >= 8);

  const auto inside = fit_hawking_temperature(thermal(t, -1.0), kappa);
  CHECK(inside.orientation == Orientation::negative);
  CHECK(inside.T_fit == Approx(t).epsilon(1e-10));
}

TEST_CASE("temperature fit rejects unusable data") {
  auto pts = thermal(0.016, 1.0, 5);
  CHECK_THROWS_AS(fit_hawking_temperature(pts, 0.1), FitError);
  std::vector<SpectrumPoint> narrow;
  for (int i = 0; i < 20; ++i) narrow.push_back({-0.05 + 0.005 * i, 0.5, 0.0, 0.0});
  CHECK_THROWS_AS(fit_hawking_temperature(narrow, 0.1), FitError);
  std::vector<SpectrumPoint> flat;
  for (int i = 0; i < 41; ++i) flat.push_back({-0.15 + 0.0075 * i, 0.999, 0.0, 0.0});
  CHECK_THROWS_AS(fit_hawking_temperature(flat, 0.1), FitError);
  auto bad = thermal(0.016, 1.0);
  bad[3].occupation = NAN;
  CHECK_THROWS_AS(fit_hawking_temperature(bad, 0.1), FitError);
}

TEST_CASE("linear fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{1, 3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r_squared == Approx(1.0));
}
