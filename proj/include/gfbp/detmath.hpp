#pragma once

namespace gfbp::detmath {

// Natural logarithm built from IEEE-exact operations only, so results agree
// bit for bit across platforms.  x must be positive and finite.
double log(double x);

// Inverse of the standard normal CDF (Wichura's AS241, about 1e-16 relative),
// using log() above and the correctly rounded sqrt.  p must lie in (0, 1).
double normal_quantile(double p);

}  // namespace gfbp::detmath
