#include "rdbound/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace rdbound {

double pow_int(double x, int e) {
  double result = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol, int max_iter) {
  const double gr = (std::sqrt(5.0) + 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - (b - a) / gr;
  double d = a + (b - a) / gr;
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) / gr;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) / gr;
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (lo <= 0.0 || hi < lo || count < 2) {
    throw std::invalid_argument("geometric_grid: need 0 < lo <= hi, count >= 2");
  }
  std::vector<double> g(count);
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    g[i] = lo * std::exp(ratio * i);
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

double bisect_first_true(const std::function<bool(double)>& pred, double lo,
                         double hi, double rel_tol) {
  if (!pred(hi)) {
    throw std::invalid_argument("bisect_first_true: predicate false at hi");
  }
  if (pred(lo)) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(hi))) break;
    if (mid <= lo || mid >= hi) break;  // bracket exhausted in FP
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace rdbound
