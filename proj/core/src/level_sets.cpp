#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rdbound/errors.hpp"
#include "rdbound/llf.hpp"
#include "rdbound/numerics.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound {

namespace {

constexpr int kLineScanPoints = 4096;

double line_scan_max(const RationalTermFunction& fn, double L, int points,
                     bool absolute = false) {
  double best = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= points; ++i) {
    const double u = L * i / points;
    const double v = std::max(0.0, L - u);
    double val = fn.eval(u, v);
    if (absolute) val = std::abs(val);
    if (val > best) {
      best = val;
      best_i = i;
    }
  }
  // Golden refinement around the best bracket.
  const double lo = L * std::max(0, best_i - 1) / points;
  const double hi = L * std::min(points, best_i + 1) / points;
  if (hi > lo) {
    auto g = [&](double u) {
      const double val = fn.eval(u, std::max(0.0, L - u));
      return absolute ? std::abs(val) : val;
    };
    const double tol = std::max(1e-9, L * 1e-15);
    const double u_star = golden_max(g, lo, hi, tol);
    best = std::max(best, g(u_star));
  }
  return best;
}

}  // namespace

double level_line_max(const RationalTermFunction& W, LineTarget target,
                      double L) {
  const RationalTermFunction fn = (target == LineTarget::value) ? W
                                  : (target == LineTarget::du)  ? W.du()
                                                                : W.dv();
  if (L <= 0.0) return fn.eval(0.0, 0.0);
  return line_scan_max(fn, L, kLineScanPoints);
}

double triangle_abs_max(const RationalTermFunction& f, double L) {
  if (L <= 0.0) return std::abs(f.eval(0.0, 0.0));
  double best = 0.0;
  int best_j = 0;
  const int lines = 256;
  for (int j = 0; j <= lines; ++j) {
    const double Lj = L * j / lines;
    const double val = line_scan_max(f, Lj, 256, /*absolute=*/true);
    if (val > best) {
      best = val;
      best_j = j;
    }
  }
  // Refine across lines around the best one.
  const double lo = L * std::max(0, best_j - 1) / lines;
  const double hi = L * std::min(lines, best_j + 1) / lines;
  if (hi > lo) {
    auto g = [&](double Lj) { return line_scan_max(f, Lj, 256, true); };
    const double L_star = golden_max(g, lo, hi, std::max(1e-9, L * 1e-12));
    best = std::max(best, g(L_star));
  }
  return best;
}

KResult find_K(const RationalTermFunction& W, double K_underbar,
               double u_underbar, double v_underbar) {
  if (!(K_underbar > 0.0)) {
    throw std::invalid_argument("find_K: K_underbar must be positive");
  }
  KResult out;
  const double T = u_underbar + v_underbar;

  // M_hat = max W over the triangle of norm radius T.
  double M_hat;
  if (T <= 0.0) {
    M_hat = W.eval(0.0, 0.0);
  } else {
    M_hat = -std::numeric_limits<double>::infinity();
    const int lines = 512;
    for (int j = 0; j <= lines; ++j) {
      M_hat = std::max(M_hat, line_scan_max(W, T * j / lines, 512));
    }
  }
  out.M_hat = M_hat;

  // phi_u(x) = min over v in [0, v_underbar] of W(x, v); smallest x with
  // phi_u > M_hat. The set where the predicate fails contains [0, u_underbar]
  // and the crossing beyond it is unique by monotonicity.
  auto segment_min_u = [&](double x) {
    if (v_underbar <= 0.0) return W.eval(x, 0.0);
    double m = std::numeric_limits<double>::infinity();
    const int pts = 256;
    for (int i = 0; i <= pts; ++i) {
      m = std::min(m, W.eval(x, v_underbar * i / pts));
    }
    auto neg = [&](double v) { return -W.eval(x, v); };
    const double v_star = golden_max(neg, 0.0, v_underbar, 1e-9);
    return std::min(m, W.eval(x, v_star));
  };
  auto segment_min_v = [&](double y) {
    if (u_underbar <= 0.0) return W.eval(0.0, y);
    double m = std::numeric_limits<double>::infinity();
    const int pts = 256;
    for (int i = 0; i <= pts; ++i) {
      m = std::min(m, W.eval(u_underbar * i / pts, y));
    }
    auto neg = [&](double u) { return -W.eval(u, y); };
    const double u_star = golden_max(neg, 0.0, u_underbar, 1e-9);
    return std::min(m, W.eval(u_star, y));
  };

  auto threshold_search = [&](const std::function<double(double)>& phi,
                              double start) -> std::optional<double> {
    auto pred = [&](double x) { return phi(x) > M_hat; };
    double lo = start;
    double hi = std::max(start, 1.0);
    if (pred(lo)) return lo;
    int guard = 0;
    while (!pred(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12 || ++guard > 60) return std::nullopt;
    }
    return bisect_first_true(pred, lo, hi, 1e-9);
  };

  auto ut = threshold_search(segment_min_u, u_underbar);
  auto vt = threshold_search(segment_min_v, v_underbar);
  if (!ut || !vt) {
    out.verdict = Verdict::inconclusive;
    return out;
  }
  out.u_tilde = *ut;
  out.v_tilde = *vt;
  out.K = std::max(K_underbar, out.u_tilde + out.v_tilde);

  // Sampled validation of the defining property M^(L) < M^(K).
  const double M_K = level_line_max(W, LineTarget::value, out.K);
  for (int i = 1; i <= 20; ++i) {
    const double L = out.K * i / 21.0;
    const double M_L = level_line_max(W, LineTarget::value, L);
    if (!(M_L < M_K)) {
      out.verdict = Verdict::inconclusive;
      return out;
    }
  }
  out.verdict = Verdict::verified;
  return out;
}

RatioSup ratio_sup(const RationalTermFunction& W, double L, double u_underbar,
                   double v_underbar, double v_cap) {
  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();
  RatioSup out;

  // Exact limits of N/D as the free variable grows, read off the dominant
  // Laurent orders at the fixed value of the other variable.
  auto ratio_limit = [](const RationalTermFunction& num,
                        const RationalTermFunction& den, double fixed,
                        bool vary_v) -> std::optional<double> {
    const TailBehavior tn = vary_v ? tail_v(num, fixed) : tail_u(num, fixed);
    const TailBehavior td = vary_v ? tail_v(den, fixed) : tail_u(den, fixed);
    if (tn.sign == 0) return 0.0;
    if (td.sign == 0) return std::nullopt;  // |N/D| -> infinity
    if (tn.degree > td.degree) return std::nullopt;
    if (tn.degree < td.degree) return 0.0;
    return std::abs(tn.leading / td.leading);
  };

  auto strip_sup = [&](const RationalTermFunction& num,
                       const RationalTermFunction& den, double fixed_max,
                       double free_lo, bool vary_v) -> std::pair<double, bool> {
    double sup = 0.0;
    bool finite = true;
    const int fixed_pts = 256;
    std::vector<double> free_grid;
    free_grid.push_back(free_lo);
    const double glo = std::max(free_lo, 1e-9);
    if (v_cap > glo) {
      auto g = geometric_grid(glo, v_cap, 256);
      free_grid.insert(free_grid.end(), g.begin(), g.end());
    }
    for (int i = 0; i <= fixed_pts; ++i) {
      const double x = fixed_max * i / fixed_pts;
      for (double y : free_grid) {
        const double u = vary_v ? x : y;
        const double v = vary_v ? y : x;
        const double n = num.eval(u, v);
        const double d_val = den.eval(u, v);
        if (std::abs(d_val) < 1e-300) {
          if (std::abs(n) > 1e-12 * std::max(1.0, num.eval_abs(u, v))) {
            finite = false;
          }
          continue;
        }
        sup = std::max(sup, std::abs(n / d_val));
      }
      const auto lim = ratio_limit(num, den, x, vary_v);
      if (!lim) {
        finite = false;
      } else {
        sup = std::max(sup, *lim);
      }
      if (fixed_max <= 0.0) break;
    }
    return {sup, finite};
  };

  const auto [ru, ru_fin] = strip_sup(Wu, Wv, L, v_underbar, /*vary_v=*/true);
  const auto [rv, rv_fin] = strip_sup(Wv, Wu, L, u_underbar, /*vary_v=*/false);
  out.R_u = 1.05 * ru;
  out.R_v = 1.05 * rv;
  out.finite = ru_fin && rv_fin;
  return out;
}

LevelScan sublevel_max_norm(const RationalTermFunction& W, double level,
                            int rays) {
  LevelScan out;
  if (rays < 2) throw std::invalid_argument("sublevel_max_norm: rays >= 2");
  double best = -1.0;
  bool any_crossing = false;

  for (int k = 0; k < rays; ++k) {
    // l1-normalized directions: along (1-a, a) the parameter t equals u+v.
    const double a = double(k) / (rays - 1);
    const double du = 1.0 - a, dv = a;
    auto f = [&](double t) { return W.eval(t * du, t * dv) - level; };

    double cap = 1e6;
    while (f(cap) < 0.0 && cap < 1e250) cap *= 1e3;
    if (f(cap) < 0.0) {
      out.verdict = Verdict::inconclusive;  // sub-level set extends past cap
      continue;
    }

    auto grid = geometric_grid(1e-8, cap, 512);
    grid.insert(grid.begin(), 0.0);
    double last_t = grid.front();
    double last_f = f(last_t);
    double outermost = -1.0;
    for (std::size_t j = 1; j < grid.size(); ++j) {
      const double t = grid[j];
      const double ft = f(t);
      if ((last_f <= 0.0 && ft > 0.0) || (last_f > 0.0 && ft <= 0.0)) {
        double lo = last_t, hi = t;
        for (int it = 0; it < 200; ++it) {
          if (hi - lo <= 1e-8 * std::max(1.0, hi)) break;
          const double mid = 0.5 * (lo + hi);
          if ((f(mid) > 0.0) == (ft > 0.0)) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        outermost = std::max(outermost, 0.5 * (lo + hi));
      }
      last_t = t;
      last_f = ft;
    }
    if (outermost >= 0.0) {
      any_crossing = true;
      best = std::max(best, outermost);
    }
  }

  if (!any_crossing) {
    out.verdict = Verdict::inconclusive;
    out.max_norm = 0.0;
    return out;
  }
  out.max_norm = 1.05 * best;
  return out;
}

}  // namespace rdbound
