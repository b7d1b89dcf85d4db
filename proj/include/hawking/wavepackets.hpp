#pragma once

// Gaussian measurement packets, energy-to-momentum maps per dispersion
// branch, and quench measurements (occupations, cross-horizon correlations,
// snapshots) evaluated with backward-evolved packets.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hawking/gaussian_dynamics.hpp"
#include "hawking/lattice_model.hpp"
#include "hawking/wave_packet.hpp"

namespace hawking {

// w_j = N sum_k exp(-(k - k0)^2 / 4 sigma^2) exp(ik(j - x0)) over the grid
// k = 2 pi m / N, -pi < k <= pi, normalized. Momentum differences are taken
// modulo 2 pi; terms below 1e-20 relative are skipped.
WavePacket make_packet(double x0, double k0, double sigma, const LatticeParams& lat,
                       double omega = 0.0);

// Cyclic shift of a packet by an integer number of sites.
WavePacket shift_packet(const WavePacket& w, int sites);

enum class Branch { outside_zero, inside_zero, floquet_doubler, local_doubler_in, local_doubler_out };

std::string to_string(Branch b);

// Asymptotic velocities of the Floquet model away from the horizons.
struct FloquetKinematics {
  double v_floquet = 1.0;
  double v_outside = 0.0;  // a t(x) on the plateau between the horizons
  double v_inside = 0.0;   // a t(x) far behind the horizons
  double v_out = 0.0;      // v_outside - v_Fl
  double v_in = 0.0;       // v_Fl - v_inside
  double k_star = 0.0;     // doubler zero on the outside
  double v_star = 0.0;     // |d omega / dk| at -k_star
};

FloquetKinematics floquet_kinematics(const FloquetProfileParams& p, const LatticeParams& lat);

struct LocalKinematics {
  double t = 1.0;
  double mu = 0.5;
};

double carrier_momentum(double omega, Branch branch, const FloquetKinematics& kin);
double carrier_momentum(double omega, Branch branch, const LocalKinematics& kin);

struct SpectrumPoint {
  double omega = 0.0;
  double occupation = 0.0;
  double time = 0.0;
  double x0 = 0.0;
};

// Mass of |w|^2 on the far side of the horizons: the packet's own region is
// (x_b, x_w] when x_b < x0 <= x_w and its complement otherwise.
double horizon_tail_mass(const WavePacket& w, double x_b, double x_w);

struct PlacementPolicy {
  double warn_mass = 1e-4;
  double error_mass = 1e-2;
};

// Throws ValidationError above policy.error_mass, returns a warning message
// above policy.warn_mass.
std::optional<std::string> check_placement(const WavePacket& w, double x_b, double x_w,
                                           const PlacementPolicy& policy = {});

// Initial state plus single-particle dynamics at one measurement time.
// backward maps packet amplitudes w to w(-t) = U(t)^dagger w, forward to U(t) w.
class Quench {
 public:
  using BlockMap = std::function<Mat(const Mat&)>;

  Quench(std::shared_ptr<const GaussianState> initial, BlockMap backward, BlockMap forward,
         double time);

  static Quench stroboscopic(std::shared_ptr<const GaussianState> initial,
                             std::shared_ptr<const StepOperator> step, long steps, double dt);
  static Quench continuous(std::shared_ptr<const GaussianState> initial,
                           std::shared_ptr<const SpectralEvolution> evolution, double time);
  static Quench frozen(std::shared_ptr<const GaussianState> initial);

  const GaussianState& initial() const { return *initial_; }
  double time() const { return time_; }
  Mat backward(const Mat& block) const { return backward_(block); }
  Mat forward(const Mat& block) const { return forward_(block); }

 private:
  std::shared_ptr<const GaussianState> initial_;
  BlockMap backward_;
  BlockMap forward_;
  double time_ = 0.0;
};

// a^T G conj(b) = <A^dagger B> for A^dagger = sum a_j c_j^dagger.
cplx correlation(const GaussianState& state, const Vec& a, const Vec& b);

double occupation(const Quench& q, const WavePacket& w);

// Occupations of many packets, evolved in blocks of kPacketChunk columns.
// Chunks are spread over `threads` workers; the chunking does not depend on
// the thread count, so results are bit-identical for any thread count.
inline constexpr int kPacketChunk = 16;
std::vector<double> occupations(const Quench& q, std::span<const WavePacket> packets,
                                int threads = 1);

// Runs fn(chunk_index) for chunk_index in [0, chunks) on up to `threads` workers.
void parallel_chunks(int chunks, int threads, const std::function<void(int)>& fn);

// <W_in^dagger W_out> at the quench time, both packets evolved backward.
cplx cross_correlation(const Quench& q, const WavePacket& packet_in, const WavePacket& packet_out);

struct CorrelationScan {
  std::vector<int> offsets;
  std::vector<double> magnitudes;
  int argmax_offset = 0;
  double max_magnitude = 0.0;
};

// |C| between inner_packet and outer_base shifted by each offset in
// [first, last]. Evaluated as (U^n conj(G) w_in(-t))^T conj(w_out), which needs
// two evolutions in total instead of one per offset.
CorrelationScan correlation_scan(const Quench& q, const WavePacket& inner_packet,
                                 const WavePacket& outer_base, int first, int last);

std::vector<double> snapshot(const WavePacket& w);
std::vector<double> snapshot(const Vec& amplitudes);

struct LobeWeights {
  double inside = 0.0;
  double outside = 0.0;
};

// Inside is j <= boundary.
LobeWeights lobe_weights(std::span<const double> profile, int boundary);
// Inside is j <= j_b or j > j_w.
LobeWeights lobe_weights(std::span<const double> profile, int j_b, int j_w);

double centroid(std::span<const double> profile);

}  // namespace hawking
