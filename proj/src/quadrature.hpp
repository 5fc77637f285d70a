#pragma once

#include <functional>
#include <vector>

#include "extended_value.hpp"

namespace hardy {

using Integrand = std::function<double(double)>;

// Improper integral of f over (lo, hi), 0 <= lo < hi <= inf. The infinite
// end is mapped to a finite one with t = u/(1-u); endpoints are approached
// through dyadic shells whose geometric tail is extrapolated, which is exact
// for power-law integrands. A divergent endpoint is reported as an infinite
// ExtendedValue with the site; interior blow-ups between the given points
// surface as Interior.
//
// f must be pointwise evaluable on the open interval; +inf/NaN samples are
// treated as divergence of the enclosing shell. Integrands are expected to
// be nonnegative and power-like near singular endpoints (the only shapes the
// shell ratio test certifies).
ExtendedValue integrate(const Integrand& f, double lo, double hi,
                        double rel_tol = 1e-8);

// Same, but subdivides at the given interior points first. Callers must
// split at every knot where the integrand may jump or blow up.
ExtendedValue integrate_split(const Integrand& f, double lo, double hi,
                              double rel_tol,
                              std::vector<double> interior_points);

}  // namespace hardy
