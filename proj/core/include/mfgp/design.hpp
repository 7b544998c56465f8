#pragma once

#include <cstddef>

#include "mfgp/random.hpp"
#include "mfgp/types.hpp"

namespace mfgp {

/// Random Latin hypercube on (0,1)^p: column j is {(pi_j(i) + u_ij) / n} for a
/// uniformly random permutation pi_j and u_ij ~ U(0,1).
DesignMatrix lhs_sample(std::size_t n, std::size_t p, Rng& rng);

/// Maps a design on (0,1)^p affinely onto the box [lower, upper].
DesignMatrix scale_to_box(const DesignMatrix& unit, const Vector& lower, const Vector& upper);

/// n equally spaced points on [a, b], both ends included (n >= 2), as an n x 1 design.
DesignMatrix linspace(double a, double b, std::size_t n);

/// Full tensor grid with `resolution` points per axis over [lower, upper];
/// the first coordinate varies slowest.
DesignMatrix regular_grid(const Vector& lower, const Vector& upper, std::size_t resolution);

}  // namespace mfgp
