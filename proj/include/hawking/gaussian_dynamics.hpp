#pragma once

// Free-fermion Gaussian states, single-particle propagators and their action
// on states and packets.
//
// Conventions: G_ij = <c_i^dagger c_j>. A packet W^dagger = sum_j w_j c_j^dagger
// has occupation <W^dagger W> = sum_ij w_i conj(w_j) G_ij = w^T G conj(w).
// Heisenberg evolution of W^dagger by a single-particle unitary U maps its
// amplitudes to U^dagger w, so <W^dagger W>(t) = (U^dagger w)^T G(0) conj(U^dagger w),
// which fixes the state rule G(t) = conj(U) G(0) U^T.

#include <functional>
#include <memory>
#include <vector>

#include "hawking/lattice_model.hpp"
#include "hawking/linalg.hpp"
#include "hawking/wave_packet.hpp"

namespace hawking {

struct GaussianState {
  Mat G;

  Eigen::Index dim() const { return G.rows(); }
  double particle_number() const { return G.trace().real(); }
  double hermiticity_error() const;
  // max |G^2 - G|
  double purity_error() const;
};

// Fills the plane waves e^{ikj}/sqrt(N) with -pi < k < 0 strictly; the two
// zero-energy modes k = 0 and k = -pi stay empty.
GaussianState minkowski_ground_state(const LatticeParams& lat);

// Fills every eigenmode of h with energy below -zero_tol.
GaussianState filled_below_zero(const SingleParticleOperator& h, double zero_tol = 1e-9);

class Propagator {
 public:
  Propagator(Mat u, long steps, double time);

  static Propagator identity(Eigen::Index n);

  const Mat& matrix() const { return u_; }
  Eigen::Index dim() const { return u_.rows(); }
  long steps() const { return steps_; }
  double time() const { return time_; }

  // later * this
  Propagator then(const Propagator& later) const;

  Vec apply(const Vec& w) const { return u_ * w; }
  Vec apply_adjoint(const Vec& w) const { return u_.adjoint() * w; }

 private:
  Mat u_;
  long steps_ = 0;
  double time_ = 0.0;
};

// Eigen-decomposition of a static Hamiltonian, reusable for any time.
class SpectralEvolution {
 public:
  explicit SpectralEvolution(const SingleParticleOperator& h);

  const HermitianSpectrum& spectrum() const { return spectrum_; }

  // exp(-i time h)
  Propagator propagator(double time) const;

  // exp(-i time h) applied to every column; negative time evolves backward.
  Mat evolve(const Mat& block, double time) const;

 private:
  HermitianSpectrum spectrum_;
};

Propagator hamiltonian_propagator(const SingleParticleOperator& h, double time);

// T_L: (T w)_j = w_{j+1}, indices mod N.
Propagator translation_operator(const LatticeParams& lat);

// U = T_L exp(-i dt h) with h the Floquet hopping Hamiltonian of the profile.
Propagator floquet_step(const HoppingProfile& profile, const LatticeParams& lat);

// T_L times the time-ordered exponential of the falling-lattice Hamiltonian
// with hopping t_j(s) = t(j - v_Fl s), approximated by n_sub midpoint factors
// with later factors to the left. Each factor is a truncated Taylor series of
// a nearest-neighbour matrix with norm below ~dt max t / n_sub.
Propagator cj_step(const std::function<double(double)>& hopping_at, const LatticeParams& lat,
                   int n_sub = 8);
Propagator cj_step(const FloquetProfileParams& p, const LatticeParams& lat, int n_sub = 8);

// exp(-i dt h) for sparse h by Taylor series, terms dropped once below tol.
SparseMat taylor_exponential(const SparseMat& h, double dt, double tol = 1e-18);

// One-period propagator stored by ring diagonals for many repeated
// applications. The Floquet step is banded to machine precision: the kept
// band is the contiguous run of diagonals around the dominant one whose
// largest entry exceeds drop_tol. Cost O(N * bandwidth) per period.
class StepOperator {
 public:
  explicit StepOperator(const Propagator& u, double drop_tol = 1e-13);

  Eigen::Index dim() const { return dim_; }
  // Stored diagonals, i.e. entries per row including explicit zeros.
  double nonzeros_per_row() const { return static_cast<double>(forward_.offsets.size()); }

  Mat forward(Mat block, long steps) const;
  Mat backward(Mat block, long steps) const;

 private:
  // m(i, i + offsets[d] mod N) = diagonals[d](i)
  struct RingBand {
    std::vector<Eigen::Index> offsets;
    std::vector<Vec> diagonals;

    Mat apply(const Mat& x) const;
  };

  static RingBand band_of(const Mat& m, double drop_tol);

  Eigen::Index dim_ = 0;
  RingBand forward_;
  RingBand backward_;
};

enum class Direction { forward, backward };

WavePacket evolve_packet(const WavePacket& w, const Propagator& u, Direction direction,
                         long steps = 1);

GaussianState evolve_state(const GaussianState& state, const Propagator& u);

// von Neumann entropy (nats) of sites j1..j2 inclusive.
double entanglement_entropy(const GaussianState& state, int j1, int j2);

// Same for an already restricted correlation block.
double restricted_entropy(const Mat& block);

struct EntropyCurve {
  std::vector<double> times;
  std::vector<double> entropies;
};

// S_[j1, j2](n dt) for n = 0, stride, 2 stride, ..., n_steps, computed with
// backward-evolved site vectors contracted against the initial state.
EntropyCurve entropy_curve(const GaussianState& initial, const StepOperator& step, int j1, int j2,
                           long n_steps, long stride, double dt);

}  // namespace hawking
