#ifndef RDBOUND_NUMERICS_HPP
#define RDBOUND_NUMERICS_HPP

#include <functional>
#include <vector>

namespace rdbound {

/// x^e for nonnegative integer e by repeated squaring.
double pow_int(double x, int e);

/// Binomial coefficient as a double (n small, exact well below 2^53).
double binomial(int n, int k);

/// Maximize a unimodal-enough scalar function on [lo, hi] by golden-section
/// search. Returns the abscissa of the maximum; stops when the bracket is
/// shorter than tol.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-9, int max_iter = 200);

/// count points geometrically spaced in [lo, hi], endpoints included (lo > 0).
std::vector<double> geometric_grid(double lo, double hi, int count);

/// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone
/// (false then true). Requires pred(hi); returns hi-side bisection endpoint,
/// so pred holds at the returned value. rel_tol is relative to max(1, |x|).
double bisect_first_true(const std::function<bool(double)>& pred, double lo,
                         double hi, double rel_tol = 1e-9);

}  // namespace rdbound

#endif  // RDBOUND_NUMERICS_HPP
