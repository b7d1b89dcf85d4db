#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hawking/wavepackets.hpp"

using namespace hawking;
using doctest::Approx;
using std::numbers::pi;

TEST_CASE("packets are normalized, centred and carry their momentum") {
  const LatticeParams lat{400, 1.0};
  const auto w = make_packet(150.0, 0.4, 0.05, lat, 0.02);
  CHECK(w.amplitudes.norm() == Approx(1.0).epsilon(1e-14));
  CHECK(centroid(snapshot(w)) == Approx(150.0).epsilon(1e-6));
  CHECK(w.omega == 0.02);
  // phase advance between neighbours near the centre
  const cplx r = w.amplitudes(151) / w.amplitudes(150);
  CHECK(std::arg(r) == Approx(0.4).epsilon(1e-2));
  // width 1 / (2 sigma) in position
  double var = 0.0;
  const auto prob = snapshot(w);
  for (int j = 0; j < 400; ++j) var += prob[j] * (j - 150.0) * (j - 150.0);
  CHECK(std::sqrt(var) == Approx(1.0 / (2.0 * 0.05)).epsilon(0.02));
  CHECK_THROWS_AS(make_packet(150.0, 0.4, 0.0, lat), ValidationError);
}

TEST_CASE("momenta wrap around the zone") {
  const LatticeParams lat{300, 1.0};
  const auto a = make_packet(100.0, pi - 0.01, 0.05, lat);
  const auto b = make_packet(100.0, -pi - 0.01, 0.05, lat);
  CHECK((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shift_packet moves a packet by whole sites") {
  const LatticeParams lat{200, 1.0};
  const auto a = make_packet(50.0, 0.3, 0.05, lat);
  const auto b = make_packet(80.0, 0.3, 0.05, lat);
  const auto s = shift_packet(a, 30);
  CHECK((s.amplitudes - b.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.x0 == 80.0);
}

TEST_CASE("carrier momenta follow the branch velocities") {
  const LatticeParams lat{3000, 1.0};
  const auto kin = floquet_kinematics({0.1, 3.0, 2000.0}, lat);
  CHECK(kin.v_out == Approx(1.370370370370).epsilon(1e-10));
  CHECK(kin.v_in == Approx(0.703703703704).epsilon(1e-9));
  CHECK(kin.k_star == Approx(2.075186550519).epsilon(1e-12));
  CHECK(carrier_momentum(0.01, Branch::outside_zero, kin) == Approx(0.01 / kin.v_out));
  CHECK(carrier_momentum(0.01, Branch::inside_zero, kin) == Approx(-0.01 / kin.v_in));
  CHECK(carrier_momentum(0.0, Branch::floquet_doubler, kin) == Approx(-kin.k_star));
  CHECK_THROWS(carrier_momentum(0.0, Branch::local_doubler_in, kin));

  const LocalKinematics lk{1.0, 0.5};
  CHECK(carrier_momentum(0.0, Branch::local_doubler_in, lk) == Approx(-2.214297435588).epsilon(1e-12));
  CHECK(carrier_momentum(0.0, Branch::local_doubler_out, lk) == Approx(2.214297435588).epsilon(1e-12));
  CHECK(std::abs(carrier_momentum(0.0, Branch::outside_zero, lk)) < 1e-13);
  CHECK_THROWS(carrier_momentum(0.0, Branch::floquet_doubler, lk));
}

TEST_CASE("placement policy warns and rejects by tail mass") {
  const LatticeParams lat{3000, 1.0};
  const double sigma = 4.0 * pi / 3000.0;
  const auto far = make_packet(1200.0, 0.0, sigma, lat);
  CHECK(horizon_tail_mass(far, 500.0, 2500.0) < 1e-4);
  CHECK_FALSE(check_placement(far, 500.0, 2500.0).has_value());
  const auto near = make_packet(820.0, 0.0, sigma, lat);
  const double m = horizon_tail_mass(near, 500.0, 2500.0);
  CHECK(m > 1e-4);
  CHECK(m < 1e-2);
  CHECK(check_placement(near, 500.0, 2500.0).has_value());
  const auto on = make_packet(520.0, 0.0, sigma, lat);
  CHECK_THROWS_AS(check_placement(on, 500.0, 2500.0), ValidationError);
}

TEST_CASE("occupations do not depend on the thread count") {
  const LatticeParams lat{300, 1.0};
  const FloquetProfileParams p{0.1, 3.0, 150.0};
  const auto kin = floquet_kinematics(p, lat);
  auto g0 = std::make_shared<const GaussianState>(minkowski_ground_state(lat));
  auto step = std::make_shared<const StepOperator>(floquet_step(floquet_hopping_profile(p, lat), lat));
  const Quench q = Quench::stroboscopic(g0, step, 30, 1.0);
  std::vector<WavePacket> packets;
  for (int i = 0; i < 37; ++i) {
    const double w = -0.1 + 0.2 * i / 36.0;
    packets.push_back(make_packet(150.0, carrier_momentum(w, Branch::outside_zero, kin), 0.05, lat, w));
  }
  const auto one = occupations(q, packets, 1);
  const auto four = occupations(q, packets, 4);
  REQUIRE(one.size() == packets.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i] == four[i]);
    CHECK(one[i] == Approx(occupation(q, packets[i])).epsilon(1e-12));
  }
}

TEST_CASE("frozen quench gives the vacuum occupation of the packet") {
  const LatticeParams lat{200, 1.0};
  auto g0 = std::make_shared<const GaussianState>(minkowski_ground_state(lat));
  const Quench q = Quench::frozen(g0);
  // deep in the filled half, deep in the empty half
  CHECK(occupation(q, make_packet(100.0, -pi / 2, 0.05, lat)) == Approx(1.0).epsilon(1e-8));
  CHECK(occupation(q, make_packet(100.0, pi / 2, 0.05, lat)) == Approx(0.0).epsilon(1e-8));
}

TEST_CASE("correlation scan finds a shifted copy") {
  // With no dynamics, C(offset) between a packet and the shifted base peaks
  // where the two coincide, at |<W^dagger W>| = occupation.
  const LatticeParams lat{300, 1.0};
  auto g0 = std::make_shared<const GaussianState>(minkowski_ground_state(lat));
  const Quench q = Quench::frozen(g0);
  const auto inner = make_packet(140.0, -1.0, 0.05, lat);
  const auto base = make_packet(100.0, -1.0, 0.05, lat);
  const auto scan = correlation_scan(q, inner, base, 0, 80);
  CHECK(scan.argmax_offset == 40);
  CHECK(scan.max_magnitude == Approx(occupation(q, inner)).epsilon(1e-10));
  CHECK(std::abs(cross_correlation(q, inner, shift_packet(base, 40))) == Approx(scan.max_magnitude).epsilon(1e-12));
}

TEST_CASE("lobe weights split a profile at the horizons") {
  const std::vector<double> prof{0.1, 0.2, 0.3, 0.4};
  const auto a = lobe_weights(prof, 1);
  CHECK(a.inside == Approx(0.3));
  CHECK(a.outside == Approx(0.7));
  const auto b = lobe_weights(prof, 0, 2);
  CHECK(b.inside == Approx(0.5));
  CHECK(b.outside == Approx(0.5));
  CHECK(centroid(prof) == Approx(2.0));
}
