#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hawking/gaussian_dynamics.hpp"
#include "hawking/wavepackets.hpp"

using namespace hawking;
using doctest::Approx;

TEST_CASE("ground state filling and coherences") {
  for (int n : {8, 100, 200}) {
    const GaussianState g = minkowski_ground_state({n, 1.0});
    CHECK(g.particle_number() == Approx(n / 2.0 - 1.0).epsilon(1e-13));
    for (int j = 0; j < n; j += 7) CHECK(g.G(j, j).real() == Approx(0.5 - 1.0 / n).epsilon(1e-13));
    CHECK(g.purity_error() < 1e-13);
    CHECK(g.hermiticity_error() < 1e-15);
  }
  // <c_j^dagger c_{j+1}> = (1/N) sum over filled k of e^{ik}
  const GaussianState g8 = minkowski_ground_state({8, 1.0});
  CHECK(std::abs(g8.G(0, 1) - cplx(0.0, -0.301776695296637)) < 1e-12);
  CHECK(std::abs(g8.G(3, 4) - g8.G(0, 1)) < 1e-15);
}

TEST_CASE("filled_below_zero reproduces the uniform ground state") {
  const LatticeParams lat{40, 1.0};
  const auto h = build_minkowski_hamiltonian(lat, 1.0);
  const GaussianState a = filled_below_zero(h);
  const GaussianState b = minkowski_ground_state(lat);
  CHECK((a.G - b.G).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("propagators are unitary and compose") {
  const LatticeParams lat{120, 1.0};
  const auto prof = floquet_hopping_profile({0.1, 3.0, 60.0}, lat);
  const Propagator u = floquet_step(prof, lat);
  CHECK(unitarity_error(u.matrix()) < 1e-12);
  const Propagator u2 = u.then(u);
  CHECK(u2.steps() == 2);
  CHECK(u2.time() == Approx(2.0));
  CHECK((u2.matrix() - u.matrix() * u.matrix()).cwiseAbs().maxCoeff() < 1e-14);

  const SpectralEvolution ev(build_local_hamiltonian(local_hopping_profile({0.1, 30, 90, 0.5}, lat), 0.5));
  const Propagator p = ev.propagator(37.5);
  CHECK(unitarity_error(p.matrix()) < 1e-12);
  const Vec w = Vec::Random(lat.n_sites);
  CHECK((ev.evolve(w, 37.5) - p.apply(w)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ev.evolve(ev.evolve(w, 12.0), -12.0) - w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("translation shifts amplitudes to the left") {
  const LatticeParams lat{10, 1.0};
  const Propagator t = translation_operator(lat);
  Vec w = Vec::Zero(10);
  w(3) = 1.0;
  const Vec v = t.apply(w);
  CHECK(std::abs(v(2) - 1.0) < 1e-15);
  CHECK(std::abs(translation_operator(lat).apply(Vec::Unit(10, 0))(9) - 1.0) < 1e-15);
}

TEST_CASE("band step operator matches dense powers") {
  const LatticeParams lat{150, 1.0};
  const auto prof = floquet_hopping_profile({0.1, 3.0, 80.0}, lat);
  const Propagator u = floquet_step(prof, lat);
  const StepOperator step(u);
  CHECK(step.nonzeros_per_row() < lat.n_sites / 2.0);
  Mat block = Mat::Random(lat.n_sites, 3);
  Mat dense = block;
  for (int i = 0; i < 25; ++i) dense = u.matrix() * dense;
  CHECK((step.forward(block, 25) - dense).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((step.backward(step.forward(block, 25), 25) - block).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("packet backward evolution and state forward evolution agree") {
  const LatticeParams lat{200, 1.0};
  const FloquetProfileParams p{0.1, 3.0, 100.0};
  const auto prof = floquet_hopping_profile(p, lat);
  const Propagator u = floquet_step(prof, lat);
  auto g0 = std::make_shared<const GaussianState>(minkowski_ground_state(lat));
  auto step = std::make_shared<const StepOperator>(u);
  Propagator un = Propagator::identity(lat.n_sites);
  for (int i = 0; i < 40; ++i) un = un.then(u);
  const GaussianState gt = evolve_state(*g0, un);
  CHECK(gt.purity_error() < 1e-10);
  CHECK(gt.particle_number() == Approx(g0->particle_number()).epsilon(1e-12));
  const auto kin = floquet_kinematics(p, lat);
  const Quench q = Quench::stroboscopic(g0, step, 40, 1.0);
  for (double w : {-0.04, 0.0, 0.04}) {
    const auto pk = make_packet(80.0, carrier_momentum(w, Branch::outside_zero, kin), 0.05, lat, w);
    const double a = occupation(q, pk);
    const double b = correlation(gt, pk.amplitudes, pk.amplitudes).real();
    CHECK(std::abs(a - b) < 1e-10);
    const WavePacket back = evolve_packet(pk, u, Direction::backward, 40);
    CHECK(std::abs(correlation(*g0, back.amplitudes, back.amplitudes).real() - a) < 1e-10);
  }
}

TEST_CASE("falling-lattice step equals the Floquet step for a static profile") {
  const LatticeParams lat{80, 1.0};
  const double t = 2.5;
  const Propagator a = floquet_step(uniform_profile(lat.n_sites, t), lat);
  const Propagator b = cj_step([t](double) { return t; }, lat, 8);
  CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("falling-lattice step converges at second order in the substeps") {
  const LatticeParams lat{100, 1.0};
  const FloquetProfileParams p{0.1, 3.0, 50.0};
  const Mat u8 = cj_step(p, lat, 8).matrix();
  const Mat u16 = cj_step(p, lat, 16).matrix();
  const Mat u32 = cj_step(p, lat, 32).matrix();
  const double d1 = (u8 - u16).cwiseAbs().maxCoeff();
  const double d2 = (u16 - u32).cwiseAbs().maxCoeff();
  CHECK(d1 / d2 > 3.0);
  CHECK(unitarity_error(u8) < 1e-12);
}

TEST_CASE("taylor exponential matches the spectral exponential") {
  const LatticeParams lat{60, 1.0};
  const auto prof = floquet_hopping_profile({0.1, 3.0, 30.0}, lat);
  const auto h = build_floquet_hamiltonian(prof);
  const Mat dense = hamiltonian_propagator(h, 0.125).matrix();
  const Mat taylor = Mat(taylor_exponential(floquet_hamiltonian_sparse(prof), 0.125));
  CHECK((dense - taylor).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("entanglement entropy") {
  const LatticeParams lat{200, 1.0};
  const GaussianState g = minkowski_ground_state(lat);
  const double s10 = entanglement_entropy(g, 50, 59);
  const double s40 = entanglement_entropy(g, 50, 89);
  CHECK(s10 > 0.0);
  // critical chain: S grows like (1/3) ln l
  CHECK(s40 - s10 == Approx(std::log(4.0) / 3.0).epsilon(0.1));
  CHECK(entanglement_entropy(g, 0, 0) == Approx(-(0.495 * std::log(0.495) + 0.505 * std::log(0.505))));
  Mat pure = Mat::Zero(3, 3);
  pure(0, 0) = 1.0;
  CHECK(restricted_entropy(pure) == 0.0);
}

TEST_CASE("entropy curve from backward site vectors matches the evolved state") {
  const LatticeParams lat{120, 1.0};
  const auto prof = floquet_hopping_profile({0.1, 3.0, 60.0}, lat);
  const Propagator u = floquet_step(prof, lat);
  const GaussianState g0 = minkowski_ground_state(lat);
  const StepOperator step(u);
  const auto curve = entropy_curve(g0, step, 20, 30, 12, 4, 1.0);
  REQUIRE(curve.times.size() == 4);
  Propagator un = Propagator::identity(lat.n_sites);
  for (int i = 0; i < 12; ++i) un = un.then(u);
  CHECK(curve.entropies.back() == Approx(entanglement_entropy(evolve_state(g0, un), 20, 30)).epsilon(1e-9));
  CHECK(curve.entropies.front() == Approx(entanglement_entropy(g0, 20, 30)).epsilon(1e-12));
}
