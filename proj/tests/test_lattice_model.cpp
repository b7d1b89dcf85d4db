#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hawking/gaussian_dynamics.hpp"
#include "hawking/lattice_model.hpp"

using namespace hawking;
using doctest::Approx;
using std::numbers::pi;

TEST_CASE("parameter validation names the field") {
  CHECK_THROWS_AS(LatticeParams({1, 1.0}).validate(), ValidationError);
  CHECK_THROWS_AS(LatticeParams({100, 0.0}).validate(), ValidationError);
  const LatticeParams lat{100, 1.0};
  try {
    FloquetProfileParams{0.1, 3.0, 150.0}.validate(lat);
    FAIL("width larger than the lattice accepted");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "profile.width");
  }
  CHECK_THROWS_AS((LocalProfileParams{0.1, 60, 40, 0.5}.validate(lat)), ValidationError);
  CHECK_NOTHROW((LocalProfileParams{0.1, 20, 80, 0.5}.validate(lat)));
}

TEST_CASE("floquet hopping profile has plateau and horizons") {
  const LatticeParams lat{3000, 1.0};
  const FloquetProfileParams p{0.1, 3.0, 2000.0};
  CHECK(floquet_black_hole_position(p, lat) == 500.0);
  CHECK(floquet_white_hole_position(p, lat) == 2500.0);
  // (4/3)^3 on the plateau, v_Fl at the horizons
  CHECK(floquet_hopping_at(1500.0, p, lat) == Approx(64.0 / 27.0).epsilon(1e-12));
  CHECK(floquet_hopping_at(500.0, p, lat) == Approx(1.0).epsilon(1e-9));
  CHECK(floquet_hopping_at(2500.0, p, lat) == Approx(1.0).epsilon(1e-9));
  CHECK(floquet_hopping_at(0.0, p, lat) < 1.0);
  const auto prof = floquet_hopping_profile(p, lat);
  CHECK(prof.size() == 3000);
}

TEST_CASE("floquet doubler momentum") {
  CHECK(floquet_doubler_momentum(2.0, 1.0) == Approx(1.895494267034).epsilon(1e-12));
  CHECK(floquet_doubler_momentum(64.0 / 27.0, 1.0) == Approx(2.075186550519).epsilon(1e-12));
  const double k = floquet_doubler_momentum(64.0 / 27.0, 1.0);
  CHECK(std::abs(64.0 / 27.0 * std::cos(k) - 1.0) == Approx(2.145537635032).epsilon(1e-12));
  CHECK_THROWS(floquet_doubler_momentum(0.9, 1.0));
}

TEST_CASE("floquet dispersion is reduced to the quasi-energy zone") {
  for (double k : {-3.0, -1.0, 0.0, 0.5, 2.5}) {
    const double w = floquet_dispersion(k, 3.0, 1.0, 1.0);
    CHECK(w > -pi);
    CHECK(w <= pi);
    const double raw = 3.0 * std::sin(k) - k;
    CHECK(std::abs(std::remainder(w - raw, 2.0 * pi)) < 1e-12);
  }
}

TEST_CASE("local model dispersion and branches") {
  const double kout = local_doubler_momentum(1.0, 0.5);
  CHECK(kout == Approx(2.214297435588).epsilon(1e-12));
  CHECK(std::abs(local_dispersion(kout, 1.0, 0.5, Side::outside)) < 1e-14);
  CHECK(std::abs(local_dispersion(-kout, 1.0, 0.5, Side::inside)) < 1e-14);
  for (double e : {-0.2, -0.01, 0.0, 0.03, 0.2}) {
    const double k2 = solve_local_branch(e, 1.0, 0.5, Side::outside, LocalBranch::gapless);
    CHECK(local_dispersion(k2, 1.0, 0.5, Side::outside) == Approx(e).epsilon(1e-12));
    CHECK(local_group_velocity(k2, 1.0, 0.5, Side::outside) > 0.0);
    const double q2 = solve_local_branch(e, 1.0, 0.5, Side::inside, LocalBranch::doubler);
    CHECK(local_dispersion(q2, 1.0, 0.5, Side::inside) == Approx(e).epsilon(1e-12));
    CHECK(local_group_velocity(q2, 1.0, 0.5, Side::inside) > 0.0);
  }
  CHECK_THROWS_AS(solve_local_branch(5.0, 1.0, 0.5, Side::outside, LocalBranch::gapless), std::domain_error);
}

TEST_CASE("local profile flips sign between the horizons") {
  const LatticeParams lat{400, 1.0};
  const auto prof = local_hopping_profile({0.1, 100, 300, 0.5}, lat);
  CHECK(prof[200] == Approx(1.0).epsilon(1e-8));
  CHECK(prof[10] == Approx(-1.0).epsilon(1e-3));
  CHECK(std::abs(prof[100]) < 1e-3);
  CHECK(std::abs(prof[300]) < 1e-3);
}

TEST_CASE("hamiltonians are hermitian") {
  const LatticeParams lat{60, 1.0};
  CHECK(hermiticity_error(build_minkowski_hamiltonian(lat, 1.0).matrix) < 1e-15);
  const auto fprof = floquet_hopping_profile({0.1, 3.0, 30.0}, lat);
  CHECK(hermiticity_error(build_floquet_hamiltonian(fprof).matrix) < 1e-15);
  const auto lprof = local_hopping_profile({0.1, 15, 45, 0.5}, lat);
  CHECK(hermiticity_error(build_local_hamiltonian(lprof, 0.5).matrix) < 1e-15);
  const Mat dense = build_floquet_hamiltonian(fprof).matrix;
  const Mat sparse = Mat(floquet_hamiltonian_sparse(fprof));
  CHECK((dense - sparse).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("ground energy of the uniform chain") {
  const LatticeParams lat{100, 1.0};
  const Mat h = build_minkowski_hamiltonian(lat, 1.0).matrix;
  const GaussianState g = minkowski_ground_state(lat);
  // <H> = sum_ij h_ij <c_i^dagger c_j>
  const double e0 = h.cwiseProduct(g.G).sum().real();
  CHECK(e0 == Approx(-31.820515953774).epsilon(1e-12));
}
