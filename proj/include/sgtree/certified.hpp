#pragma once

// Root of Psi(t) = 1 for sequences without a closed form, using 256-bit
// MPFR arithmetic with directed rounding and explicit tail bounds.

#include "sgtree/weights.hpp"

namespace sgt {

/// Bisection bracket of width <= 2^-80 around tau. Requires nu >= 1.
TauBracket certified_tau(const WeightSequence& w);

}  // namespace sgt
