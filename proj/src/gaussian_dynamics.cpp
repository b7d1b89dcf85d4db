#include "hawking/gaussian_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hawking {

using std::numbers::pi;

double GaussianState::hermiticity_error() const { return hawking::hermiticity_error(G); }

double GaussianState::purity_error() const { return (G * G - G).cwiseAbs().maxCoeff(); }

GaussianState minkowski_ground_state(const LatticeParams& lat) {
  lat.validate();
  const long n = lat.n_sites;
  // G_ij = (1/N) sum_{-pi<k<0} exp(-ik(i-j)) depends on d = i - j only.
  // Angles are reduced with integer arithmetic so that every phase is exact
  // to one rounding.
  std::vector<cplx> row(static_cast<std::size_t>(n));
  for (long d = 0; d < n; ++d) {
    cplx sum{};
    for (long m = -n / 2 + 1; m <= -1; ++m) {
      const long r = ((-m * d) % n + n) % n;
      sum += std::polar(1.0, 2.0 * pi * static_cast<double>(r) / static_cast<double>(n));
    }
    row[static_cast<std::size_t>(d)] = sum / static_cast<double>(n);
  }
  Mat g(n, n);
  for (long j = 0; j < n; ++j) {
    for (long i = 0; i < n; ++i) g(i, j) = row[static_cast<std::size_t>(((i - j) % n + n) % n)];
  }
  return {std::move(g)};
}

GaussianState filled_below_zero(const SingleParticleOperator& h, double zero_tol) {
  const HermitianSpectrum s = hermitian_eigensystem(h.matrix);
  Eigen::Index filled = 0;
  while (filled < s.energies.size() && s.energies(filled) < -zero_tol) ++filled;
  const auto occupied = s.modes.leftCols(filled);
  Mat projector = occupied * occupied.adjoint();
  return {projector.conjugate()};
}

Propagator::Propagator(Mat u, long steps, double time)
    : u_(std::move(u)), steps_(steps), time_(time) {
  if (u_.rows() != u_.cols()) throw std::invalid_argument("propagator must be square");
}

Propagator Propagator::identity(Eigen::Index n) { return {Mat::Identity(n, n), 0, 0.0}; }

Propagator Propagator::then(const Propagator& later) const {
  if (later.dim() != dim()) throw std::invalid_argument("propagator dimensions differ");
  return {later.u_ * u_, steps_ + later.steps_, time_ + later.time_};
}

namespace {

void require_hermitian(const SingleParticleOperator& h) {
  const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
  if (hermiticity_error(h.matrix) > 1e-12 * scale) {
    throw std::invalid_argument("Hamiltonian is not Hermitian");
  }
}

}  // namespace

SpectralEvolution::SpectralEvolution(const SingleParticleOperator& h) {
  require_hermitian(h);
  spectrum_ = hermitian_eigensystem(h.matrix);
}

Propagator SpectralEvolution::propagator(double time) const {
  const Vec phases = (-kI * time * spectrum_.energies.cast<cplx>()).array().exp();
  return {spectral_function(spectrum_, phases), 0, time};
}

Mat SpectralEvolution::evolve(const Mat& block, double time) const {
  const Vec phases = (-kI * time * spectrum_.energies.cast<cplx>()).array().exp();
  Mat coefficients = spectrum_.modes.adjoint() * block;
  coefficients = phases.asDiagonal() * coefficients;
  return spectrum_.modes * coefficients;
}

Propagator hamiltonian_propagator(const SingleParticleOperator& h, double time) {
  return SpectralEvolution(h).propagator(time);
}

Propagator translation_operator(const LatticeParams& lat) {
  lat.validate();
  const Eigen::Index n = lat.n_sites;
  Mat t = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) t(j, (j + 1) % n) = 1.0;
  return {std::move(t), 0, 0.0};
}

namespace {

// Rows of T_L m are the rows of m shifted up by one site.
Mat translate_left(const Mat& m) {
  const Eigen::Index n = m.rows();
  Mat out(n, m.cols());
  out.topRows(n - 1) = m.bottomRows(n - 1);
  out.row(n - 1) = m.row(0);
  return out;
}

}  // namespace

Propagator floquet_step(const HoppingProfile& profile, const LatticeParams& lat) {
  lat.validate();
  if (static_cast<int>(profile.size()) != lat.n_sites) {
    throw std::invalid_argument("profile length differs from lattice size");
  }
  const Propagator hop = hamiltonian_propagator(build_floquet_hamiltonian(profile), lat.dt);
  return {translate_left(hop.matrix()), 1, lat.dt};
}

SparseMat taylor_exponential(const SparseMat& h, double dt, double tol) {
  const Eigen::Index n = h.rows();
  double row_sum = 0.0;
  for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
    for (SparseMat::InnerIterator it(h, c); it; ++it) row_sum = std::max(row_sum, std::abs(it.value()));
  }
  row_sum *= 3.0 * std::abs(dt);
  if (row_sum > 8.0) throw std::invalid_argument("time step too large for a Taylor exponential");

  SparseMat identity(n, n);
  identity.setIdentity();
  const SparseMat generator = (-kI * dt) * h;
  SparseMat result = identity;
  SparseMat term = identity;
  for (int order = 1; order < 200; ++order) {
    term = (generator * term) / static_cast<double>(order);
    term.prune([tol](Eigen::Index, Eigen::Index, const cplx& value) {
      return std::abs(value) > tol;
    });
    if (term.nonZeros() == 0) break;
    result += term;
  }
  return result;
}

Propagator cj_step(const std::function<double(double)>& hopping_at, const LatticeParams& lat,
                   int n_sub) {
  lat.validate();
  if (n_sub < 1) throw ValidationError("cj.n_sub", "must be at least 1");
  const int n = lat.n_sites;
  const double sub_dt = lat.dt / n_sub;
  SparseMat total(n, n);
  total.setIdentity();
  HoppingProfile shifted{std::vector<double>(static_cast<std::size_t>(n))};
  for (int s = 0; s < n_sub; ++s) {
    // The profile falls to the right by v_Fl * time = (s + 1/2)/n_sub sites
    // at the midpoint of substep s.
    const double shift = (s + 0.5) / n_sub;
    for (int j = 0; j < n; ++j) {
      double x = std::fmod(j - shift, lat.length());
      if (x < 0.0) x += lat.length();
      shifted.values[j] = hopping_at(x);
    }
    const SparseMat factor = taylor_exponential(floquet_hamiltonian_sparse(shifted), sub_dt);
    total = SparseMat(factor * total);
  }
  return {translate_left(Mat(total)), 1, lat.dt};
}

Propagator cj_step(const FloquetProfileParams& p, const LatticeParams& lat, int n_sub) {
  p.validate(lat);
  return cj_step(floquet_hopping_function(p, lat), lat, n_sub);
}

StepOperator::StepOperator(const Propagator& u, double drop_tol) : dim_(u.dim()) {
  forward_ = band_of(u.matrix(), drop_tol);
  backward_ = band_of(u.matrix().adjoint(), drop_tol);
}

StepOperator::RingBand StepOperator::band_of(const Mat& m, double drop_tol) {
  const Eigen::Index n = m.rows();
  auto diagonal = [&](Eigen::Index offset) {
    Vec d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = m(i, (i + offset) % n);
    return d;
  };
  // The band is contiguous around the largest diagonal. Far diagonals carry
  // only the roundoff of the eigendecomposition and are cut at the first
  // diagonal whose largest entry falls below drop_tol.
  Eigen::Index center = 0;
  double best = -1.0;
  for (Eigen::Index offset = 0; offset < n; ++offset) {
    const double value = diagonal(offset).cwiseAbs().maxCoeff();
    if (value > best) {
      best = value;
      center = offset;
    }
  }
  Eigen::Index lo = 0;
  while (lo + 1 < n / 2 && diagonal((center - lo - 1 + n) % n).cwiseAbs().maxCoeff() > drop_tol) ++lo;
  Eigen::Index hi = 0;
  while (hi + 1 < n / 2 && diagonal((center + hi + 1) % n).cwiseAbs().maxCoeff() > drop_tol) ++hi;

  RingBand band;
  for (Eigen::Index k = -lo; k <= hi; ++k) {
    const Eigen::Index offset = ((center + k) % n + n) % n;
    band.offsets.push_back(offset);
    band.diagonals.push_back(diagonal(offset));
  }
  return band;
}

Mat StepOperator::RingBand::apply(const Mat& x) const {
  const Eigen::Index n = x.rows();
  Mat y = Mat::Zero(n, x.cols());
  for (std::size_t d = 0; d < offsets.size(); ++d) {
    const Eigen::Index s = offsets[d];
    const Vec& diag = diagonals[d];
    // rows i < n - s read x(i + s), the rest wrap to x(i + s - n)
    y.topRows(n - s).noalias() += diag.head(n - s).asDiagonal() * x.middleRows(s, n - s);
    if (s > 0) y.bottomRows(s).noalias() += diag.tail(s).asDiagonal() * x.topRows(s);
  }
  return y;
}

Mat StepOperator::forward(Mat block, long steps) const {
  for (long s = 0; s < steps; ++s) block = forward_.apply(block);
  return block;
}

Mat StepOperator::backward(Mat block, long steps) const {
  for (long s = 0; s < steps; ++s) block = backward_.apply(block);
  return block;
}

WavePacket evolve_packet(const WavePacket& w, const Propagator& u, Direction direction,
                         long steps) {
  WavePacket out = w;
  for (long s = 0; s < steps; ++s) {
    out.amplitudes = direction == Direction::forward ? u.apply(out.amplitudes)
                                                     : u.apply_adjoint(out.amplitudes);
  }
  return out;
}

GaussianState evolve_state(const GaussianState& state, const Propagator& u) {
  if (u.dim() != state.dim()) throw std::invalid_argument("state and propagator sizes differ");
  Mat g = u.matrix().conjugate() * state.G * u.matrix().transpose();
  return {std::move(g)};
}

double restricted_entropy(const Mat& block) {
  if (block.rows() == 0) return 0.0;
  const Mat hermitian = 0.5 * (block + block.adjoint());
  const Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda < -1e-8 || lambda > 1.0 + 1e-8) {
      throw std::domain_error("correlation eigenvalue outside [0, 1]");
    }
    lambda = std::clamp(lambda, 0.0, 1.0);
    if (lambda > 0.0) entropy -= lambda * std::log(lambda);
    if (lambda < 1.0) entropy -= (1.0 - lambda) * std::log1p(-lambda);
  }
  return std::max(entropy, 0.0);
}

double entanglement_entropy(const GaussianState& state, int j1, int j2) {
  if (j1 < 0 || j2 < j1 || j2 >= state.dim()) throw std::out_of_range("bad entropy interval");
  const int len = j2 - j1 + 1;
  return restricted_entropy(state.G.block(j1, j1, len, len));
}

EntropyCurve entropy_curve(const GaussianState& initial, const StepOperator& step, int j1, int j2,
                           long n_steps, long stride, double dt) {
  if (j1 < 0 || j2 < j1 || j2 >= initial.dim()) throw std::out_of_range("bad entropy interval");
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  const int len = j2 - j1 + 1;
  Mat sites = Mat::Zero(initial.dim(), len);
  for (int a = 0; a < len; ++a) sites(j1 + a, a) = 1.0;

  EntropyCurve curve;
  for (long n = 0; n <= n_steps; n += stride) {
    if (n > 0) sites = step.backward(std::move(sites), stride);
    // The evolved site vectors stay inside a light cone; rows below 1e-30 in
    // squared norm are dropped from the contraction.
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < sites.rows(); ++r) {
      if (sites.row(r).squaredNorm() > 1e-30) rows.push_back(r);
    }
    const Mat support = sites(rows, Eigen::all);
    const Mat g = initial.G(rows, rows);
    const Mat block = support.transpose() * (g * support.conjugate());
    curve.times.push_back(static_cast<double>(n) * dt);
    curve.entropies.push_back(restricted_entropy(block));
  }
  return curve;
}

}  // namespace hawking
