#pragma once

namespace eepc {

/// Principal branch of the Lambert W function: the w >= -1 with w e^w = x.
///
/// Defined for x >= -1/e. Inputs up to 1e-12 below the branch point are
/// clamped to it; anything further out throws std::domain_error.
double lambert_w0(double x);

}  // namespace eepc
