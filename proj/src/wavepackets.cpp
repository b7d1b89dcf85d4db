#include "hawking/wavepackets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hawking {

using std::numbers::pi;

namespace {

double wrap_angle(double k) {
  double r = std::fmod(k + pi, 2.0 * pi);
  if (r <= 0.0) r += 2.0 * pi;
  return r - pi;
}

}  // namespace

WavePacket make_packet(double x0, double k0, double sigma, const LatticeParams& lat,
                       double omega) {
  lat.validate();
  if (!(sigma > 0.0)) throw ValidationError("packet.sigma", "must be positive");
  const int n = lat.n_sites;
  const double cutoff = 14.0 * sigma;
  Vec w = Vec::Zero(n);
  for (int m = -n / 2 + 1; m <= n / 2; ++m) {
    const double k = 2.0 * pi * m / n;
    const double d = wrap_angle(k - k0);
    if (std::abs(d) > cutoff) continue;
    const double weight = std::exp(-d * d / (4.0 * sigma * sigma));
    const cplx origin = std::polar(weight, -k * x0);
    for (int j = 0; j < n; ++j) {
      // k j reduced exactly through the integer product m j.
      const long r = (static_cast<long>(m) * j) % n;
      w(j) += origin * std::polar(1.0, 2.0 * pi * static_cast<double>(r) / n);
    }
  }
  const double norm = w.norm();
  if (!(norm > 0.0)) throw ValidationError("packet.k0", "no grid momentum near the carrier");
  return {w / norm, x0, k0, sigma, omega};
}

WavePacket shift_packet(const WavePacket& w, int sites) {
  const auto n = w.size();
  WavePacket out = w;
  const Eigen::Index s = ((sites % n) + n) % n;
  for (Eigen::Index j = 0; j < n; ++j) out.amplitudes((j + s) % n) = w.amplitudes(j);
  out.x0 = w.x0 + sites;
  return out;
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::outside_zero: return "outside_zero";
    case Branch::inside_zero: return "inside_zero";
    case Branch::floquet_doubler: return "floquet_doubler";
    case Branch::local_doubler_in: return "local_doubler_in";
    case Branch::local_doubler_out: return "local_doubler_out";
  }
  return "unknown";
}

FloquetKinematics floquet_kinematics(const FloquetProfileParams& p, const LatticeParams& lat) {
  p.validate(lat);
  FloquetKinematics kin;
  kin.v_floquet = lat.floquet_velocity();
  kin.v_outside = floquet_hopping_at(lat.length() / 2.0, p, lat);
  kin.v_inside = floquet_hopping_at(0.0, p, lat);
  kin.v_out = kin.v_outside - kin.v_floquet;
  kin.v_in = kin.v_floquet - kin.v_inside;
  kin.k_star = floquet_doubler_momentum(kin.v_outside, kin.v_floquet);
  kin.v_star = std::abs(kin.v_outside * std::cos(kin.k_star) - kin.v_floquet);
  return kin;
}

double carrier_momentum(double omega, Branch branch, const FloquetKinematics& kin) {
  switch (branch) {
    case Branch::outside_zero: return omega / kin.v_out;
    case Branch::inside_zero: return -omega / kin.v_in;
    case Branch::floquet_doubler: return -kin.k_star - omega / kin.v_star;
    default: break;
  }
  throw std::domain_error("branch " + to_string(branch) + " does not exist in the Floquet model");
}

double carrier_momentum(double omega, Branch branch, const LocalKinematics& kin) {
  switch (branch) {
    case Branch::outside_zero:
      return solve_local_branch(omega, kin.t, kin.mu, Side::outside, LocalBranch::gapless);
    case Branch::inside_zero:
      return solve_local_branch(omega, kin.t, kin.mu, Side::inside, LocalBranch::gapless);
    case Branch::local_doubler_in:
      return solve_local_branch(omega, kin.t, kin.mu, Side::inside, LocalBranch::doubler);
    case Branch::local_doubler_out:
      return solve_local_branch(omega, kin.t, kin.mu, Side::outside, LocalBranch::doubler);
    default: break;
  }
  throw std::domain_error("branch " + to_string(branch) + " does not exist in the local model");
}

double horizon_tail_mass(const WavePacket& w, double x_b, double x_w) {
  const bool outside = w.x0 > x_b && w.x0 <= x_w;
  double mass = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const bool site_outside = j > x_b && j <= x_w;
    if (site_outside != outside) mass += std::norm(w.amplitudes(j));
  }
  return mass;
}

std::optional<std::string> check_placement(const WavePacket& w, double x_b, double x_w,
                                           const PlacementPolicy& policy) {
  const double mass = horizon_tail_mass(w, x_b, x_w);
  std::ostringstream msg;
  msg << "packet at x0=" << w.x0 << " has tail mass " << mass << " across a horizon";
  if (mass > policy.error_mass) throw ValidationError("packet.x0", msg.str());
  if (mass > policy.warn_mass) return msg.str();
  return std::nullopt;
}

Quench::Quench(std::shared_ptr<const GaussianState> initial, BlockMap backward, BlockMap forward,
               double time)
    : initial_(std::move(initial)),
      backward_(std::move(backward)),
      forward_(std::move(forward)),
      time_(time) {
  if (!initial_) throw std::invalid_argument("quench needs an initial state");
}

Quench Quench::stroboscopic(std::shared_ptr<const GaussianState> initial,
                            std::shared_ptr<const StepOperator> step, long steps, double dt) {
  return Quench(
      std::move(initial), [step, steps](const Mat& b) { return step->backward(b, steps); },
      [step, steps](const Mat& b) { return step->forward(b, steps); },
      static_cast<double>(steps) * dt);
}

Quench Quench::continuous(std::shared_ptr<const GaussianState> initial,
                          std::shared_ptr<const SpectralEvolution> evolution, double time) {
  return Quench(
      std::move(initial), [evolution, time](const Mat& b) { return evolution->evolve(b, -time); },
      [evolution, time](const Mat& b) { return evolution->evolve(b, time); }, time);
}

Quench Quench::frozen(std::shared_ptr<const GaussianState> initial) {
  auto same = [](const Mat& b) { return b; };
  return Quench(std::move(initial), same, same, 0.0);
}

cplx correlation(const GaussianState& state, const Vec& a, const Vec& b) {
  return a.transpose() * (state.G * b.conjugate());
}

double occupation(const Quench& q, const WavePacket& w) {
  const Vec evolved = q.backward(w.amplitudes);
  return correlation(q.initial(), evolved, evolved).real();
}

void parallel_chunks(int chunks, int threads, const std::function<void(int)>& fn) {
  if (chunks <= 0) return;
  const int workers = std::clamp(threads, 1, chunks);
  if (workers == 1) {
    for (int c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int c = next++; c < chunks; c = next++) {
        try {
          fn(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> occupations(const Quench& q, std::span<const WavePacket> packets,
                                int threads) {
  const auto count = static_cast<int>(packets.size());
  std::vector<double> out(packets.size());
  const int chunks = (count + kPacketChunk - 1) / kPacketChunk;
  parallel_chunks(chunks, threads, [&](int chunk) {
    const int first = chunk * kPacketChunk;
    const int width = std::min(kPacketChunk, count - first);
    Mat block(packets[first].size(), width);
    for (int p = 0; p < width; ++p) block.col(p) = packets[first + p].amplitudes;
    const Mat evolved = q.backward(block);
    const Mat contracted = q.initial().G * evolved.conjugate();
    for (int p = 0; p < width; ++p) {
      out[first + p] = evolved.col(p).cwiseProduct(contracted.col(p)).sum().real();
    }
  });
  return out;
}

cplx cross_correlation(const Quench& q, const WavePacket& packet_in,
                       const WavePacket& packet_out) {
  Mat block(packet_in.size(), 2);
  block.col(0) = packet_in.amplitudes;
  block.col(1) = packet_out.amplitudes;
  const Mat evolved = q.backward(block);
  return correlation(q.initial(), evolved.col(0), evolved.col(1));
}

CorrelationScan correlation_scan(const Quench& q, const WavePacket& inner_packet,
                                 const WavePacket& outer_base, int first, int last) {
  if (last < first) throw std::invalid_argument("empty correlation scan range");
  const Vec inner_back = q.backward(inner_packet.amplitudes);
  const Vec pulled = q.initial().G.conjugate() * inner_back;
  const Vec propagated = q.forward(pulled);

  CorrelationScan scan;
  const auto n = outer_base.size();
  for (int offset = first; offset <= last; ++offset) {
    // sum_b y_b conj(w_out(b - offset))
    cplx c{};
    for (Eigen::Index b = 0; b < n; ++b) {
      const Eigen::Index src = (((b - offset) % n) + n) % n;
      c += propagated(b) * std::conj(outer_base.amplitudes(src));
    }
    scan.offsets.push_back(offset);
    scan.magnitudes.push_back(std::abs(c));
    if (scan.magnitudes.size() == 1 || std::abs(c) > scan.max_magnitude) {
      scan.max_magnitude = std::abs(c);
      scan.argmax_offset = offset;
    }
  }
  return scan;
}

std::vector<double> snapshot(const Vec& amplitudes) {
  std::vector<double> out(static_cast<std::size_t>(amplitudes.size()));
  for (Eigen::Index j = 0; j < amplitudes.size(); ++j) out[j] = std::norm(amplitudes(j));
  return out;
}

std::vector<double> snapshot(const WavePacket& w) { return snapshot(w.amplitudes); }

LobeWeights lobe_weights(std::span<const double> profile, int boundary) {
  LobeWeights out;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    (static_cast<int>(j) <= boundary ? out.inside : out.outside) += profile[j];
  }
  return out;
}

LobeWeights lobe_weights(std::span<const double> profile, int j_b, int j_w) {
  LobeWeights out;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const int site = static_cast<int>(j);
    (site <= j_b || site > j_w ? out.inside : out.outside) += profile[j];
  }
  return out;
}

double centroid(std::span<const double> profile) {
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    mass += profile[j];
    moment += static_cast<double>(j) * profile[j];
  }
  return moment / mass;
}

}  // namespace hawking
