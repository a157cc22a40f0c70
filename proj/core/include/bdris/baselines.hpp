// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "bdris/channel.hpp"
#include "bdris/rng.hpp"
#include "bdris/solver.hpp"

namespace bdris {

// Conventional diagonal RIS optimized by the anchored phase-projected power
// iteration on the diagonal-restricted refinement operator (S = I).
ReflectionMatrix diagonal_power_iteration(const SubcarrierChannel& chan, int iterations = 100);

// For each tap, extract the principal rank-one component of the per-tap
// cascaded matrix H^(l), compute the symmetric-unitary configuration that
// attains the |tr(Psi H)| <= sigma_1 bound on it, evaluate every candidate's
// power on its own tap, and return the best.
ReflectionMatrix strongest_tap(const TapSet& taps, const SubcarrierChannel& chan);

// Haar-distributed random unitary via QR of a complex Gaussian matrix with
// the R-diagonal phase fix.
Eigen::MatrixXcd random_unitary(int n, Rng& rng);

// Random beyond-diagonal configuration: random unitary S, diagonal phases
// refined by the power iteration, Psi = S D S^T.
ReflectionMatrix random_bd(const SubcarrierChannel& chan, std::uint64_t seed, int iterations = 100);

}  // namespace bdris
