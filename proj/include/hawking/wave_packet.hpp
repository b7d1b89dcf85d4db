#pragma once

#include "hawking/linalg.hpp"

namespace hawking {

// Single-particle amplitudes w_j of a packet creation operator sum_j w_j c_j^dagger,
// together with the labels it was built from.
struct WavePacket {
  Vec amplitudes;
  double x0 = 0.0;
  double k0 = 0.0;
  double sigma = 0.0;
  double omega = 0.0;

  Eigen::Index size() const { return amplitudes.size(); }
};

}  // namespace hawking
