#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rdbound/llf.hpp"
#include "rdbound/numerics.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// Row-major sweep engine: f(u, v) * (u+1)^R is a polynomial in u whose
// coefficients are functions of v, so each row costs one coefficient load
// plus a Horner evaluation per point. This is what makes spacing 0.01 over
// a few-hundred-wide extent affordable.
class RowSweeper {
 public:
  explicit RowSweeper(const RationalTermFunction& f) : poly_(f.u_poly()) {}

  int den_pow() const { return poly_.den_pow; }

  void load_row(double v, std::vector<double>& coeffs) const {
    coeffs.resize(poly_.coeff.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      coeffs[k] = poly_.coeff[k].eval(0.0, v);
    }
  }

  // Returns f(u, v) * (u+1)^R for the loaded row.
  static double eval(const std::vector<double>& coeffs, double u) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * u + coeffs[k];
    return acc;
  }

 private:
  RationalTermFunction::UPoly poly_;
};

// Hunt for a concrete point beyond `from` where f has the given sign with a
// margin above cancellation noise; used to attach witnesses to tail-based
// refutations.
std::optional<std::array<double, 2>> hunt_witness(
    const RationalTermFunction& f, bool along_u, double fixed, double from,
    int want_sign, double margin) {
  double x = std::max(from, 1.0);
  for (int i = 0; i < 1000 && x < 1e280; ++i, x *= 2.0) {
    const double u = along_u ? x : fixed;
    const double v = along_u ? fixed : x;
    const double val = f.eval(u, v);
    const double scale = std::max(1.0, f.eval_abs(u, v));
    if (want_sign > 0 ? (val > margin * scale) : (val < -margin * scale)) {
      return std::array<double, 2>{u, v};
    }
  }
  return std::nullopt;
}

std::vector<double> axis_samples(const GridSpec& grid, int count) {
  std::vector<double> xs;
  xs.reserve(count + 1);
  for (int i = 0; i <= count; ++i) {
    xs.push_back(grid.extent * i / count);
  }
  return xs;
}

}  // namespace

PropertyReport check_p1(const RationalTermFunction& W,
                        const ReactionPair& reactions, const GridSpec& grid,
                        double tol) {
  PropertyReport rep;
  rep.property = "P1";
  rep.grid = grid;

  const RationalTermFunction dot =
      W.du() * reactions.f + W.dv() * reactions.g;

  // Exact tail signs: u -> inf along grid rows and v -> inf along grid
  // columns. A positive tail means the dot product turns positive outside
  // any grid, so no threshold can exist.
  const auto lu = dot.laurent_u();
  const auto lv = dot.laurent_v();
  const int tail_lines = 2048;
  for (int j = 0; j <= tail_lines; ++j) {
    const double v = grid.extent * j / tail_lines;
    for (const auto& [order, coeff] : lu) {
      const double val = coeff.eval(0.0, v);
      const double scale = coeff.eval_abs(0.0, v);
      if (std::abs(val) <= 1e-11 * std::max(scale, 1e-300)) continue;
      if (val > 0.0) {
        auto w = hunt_witness(dot, true, v, grid.extent, +1, 1e-12);
        if (w) {
          rep.verdict = Verdict::refuted;
          rep.witness = w;
          rep.witness_value = dot.eval((*w)[0], (*w)[1]);
          rep.detail = "positive tail as u -> inf at v = " + std::to_string(v);
          return rep;
        }
        rep.verdict = Verdict::inconclusive;
        rep.detail = "positive u-tail below tolerance";
        return rep;
      }
      break;  // dominant order is negative: this row is fine
    }
    const double u = grid.extent * j / tail_lines;
    for (const auto& [order, coeff] : lv) {
      const double val = coeff.eval(u, 0.0);
      const double scale = coeff.eval_abs(u, 0.0);
      if (std::abs(val) <= 1e-11 * std::max(scale, 1e-300)) continue;
      if (val > 0.0) {
        auto w = hunt_witness(dot, false, u, grid.extent, +1, 1e-12);
        if (w) {
          rep.verdict = Verdict::refuted;
          rep.witness = w;
          rep.witness_value = dot.eval((*w)[0], (*w)[1]);
          rep.detail = "positive tail as v -> inf at u = " + std::to_string(u);
          return rep;
        }
        rep.verdict = Verdict::inconclusive;
        rep.detail = "positive v-tail below tolerance";
        return rep;
      }
      break;
    }
  }

  // Grid part: the largest violating norm determines the certified
  // threshold.
  const RowSweeper sweeper(dot);
  const int m = int(grid.extent / grid.spacing);
  std::vector<double> us(m + 1), den_pows(m + 1);
  for (int i = 0; i <= m; ++i) {
    us[i] = i * grid.spacing;
    den_pows[i] = pow_int(us[i] + 1.0, sweeper.den_pow());
  }
  std::vector<double> row;
  double worst_norm = -1.0;
  for (int j = 0; j <= m; ++j) {
    const double v = j * grid.spacing;
    sweeper.load_row(v, row);
    const double v_norm = v;
    for (int i = 0; i <= m; ++i) {
      if (RowSweeper::eval(row, us[i]) > tol * den_pows[i]) {
        const double norm = us[i] + v_norm;
        if (norm > worst_norm) worst_norm = norm;
      }
    }
  }

  const double K_cand =
      worst_norm < 0.0 ? grid.spacing : worst_norm + grid.spacing;
  if (K_cand > grid.extent) {
    rep.verdict = Verdict::inconclusive;
    rep.detail = "grid extent exhausted without certification";
    rep.K_underbar = K_cand;
    return rep;
  }
  rep.verdict = Verdict::verified;
  rep.K_underbar = K_cand;
  rep.detail = "grid-certified with exact axis tails";
  return rep;
}

PropertyReport check_p2(const RationalTermFunction& W, const GridSpec& grid) {
  PropertyReport rep;
  rep.property = "P2";
  rep.grid = grid;

  const RationalTermFunction Wuu = W.du().du();
  const RationalTermFunction Wvv = W.dv().dv();
  const RationalTermFunction Wuv = W.du().dv();

  struct Cond {
    const RationalTermFunction* f;
    bool strict;  // strict: need > 0; else >= 0
    const char* name;
  };
  const Cond conds[] = {
      {&Wuu, true, "Wuu"}, {&Wvv, true, "Wvv"}, {&Wuv, false, "Wuv"}};

  for (const auto& cond : conds) {
    // Tail signs in both directions along sampled lines.
    const auto lu = cond.f->laurent_u();
    const auto lv = cond.f->laurent_v();
    const int tail_lines = 512;
    for (int j = 0; j <= tail_lines; ++j) {
      const double fixed = grid.extent * j / tail_lines;
      for (int dir = 0; dir < 2; ++dir) {
        const auto& laurent = dir == 0 ? lu : lv;
        for (const auto& [order, coeff] : laurent) {
          const double val =
              dir == 0 ? coeff.eval(0.0, fixed) : coeff.eval(fixed, 0.0);
          const double scale =
              dir == 0 ? coeff.eval_abs(0.0, fixed) : coeff.eval_abs(fixed, 0.0);
          if (std::abs(val) <= 1e-11 * std::max(scale, 1e-300)) continue;
          if (val < 0.0) {
            auto w = hunt_witness(*cond.f, dir == 0, fixed, grid.extent, -1,
                                  1e-12);
            rep.verdict = Verdict::refuted;
            rep.detail = std::string(cond.name) + " negative tail";
            if (w) {
              rep.witness = w;
              rep.witness_value = cond.f->eval((*w)[0], (*w)[1]);
            } else {
              rep.witness = std::array<double, 2>{grid.extent, fixed};
              rep.witness_value = 0.0;
            }
            return rep;
          }
          break;
        }
      }
    }

    // Grid part: the denominator-cleared polynomial has the sign of the
    // function, so strict positivity is a pure polynomial sign sweep.
    const RowSweeper sweeper(*cond.f);
    const int m = int(grid.extent / grid.spacing);
    std::vector<double> row;
    for (int j = 0; j <= m; ++j) {
      const double v = j * grid.spacing;
      sweeper.load_row(v, row);
      for (int i = 0; i <= m; ++i) {
        const double u = i * grid.spacing;
        const double val = RowSweeper::eval(row, u);
        const bool bad = cond.strict ? !(val > 0.0) : val < 0.0;
        if (!bad) continue;
        const double real_val = cond.f->eval(u, v);
        const double scale = cond.f->eval_abs(u, v);
        // Cancellation-aware: exact zeros of Wuv are fine.
        if (!cond.strict && std::abs(real_val) <= 1e-12 * std::max(1.0, scale)) {
          continue;
        }
        rep.verdict = Verdict::refuted;
        rep.witness = std::array<double, 2>{u, v};
        rep.witness_value = real_val;
        rep.detail = std::string(cond.name) +
                     (cond.strict ? " not strictly positive" : " negative");
        return rep;
      }
    }
  }

  rep.verdict = Verdict::verified;
  rep.detail = "grid positive with nonnegative tails";
  return rep;
}

PropertyReport check_p3(const RationalTermFunction& W) {
  PropertyReport rep;
  rep.property = "P3";

  const int fan = 64;
  for (int k = 0; k < fan; ++k) {
    const double a = double(k) / (fan - 1);
    const double du = 1.0 - a, dv = a;
    RayGrowth g = ray_growth(W, du, dv);
    bool diverges = g.degree >= 1 && g.leading > 0.0;
    if (g.ambiguous) {
      // A cancelled top order: confirm numerically along the ray.
      const double w1 = W.eval(1e6 * du, 1e6 * dv);
      const double w2 = W.eval(1e9 * du, 1e9 * dv);
      const bool numeric_growth = w2 > 2.0 * std::abs(w1) + 1e3;
      if (diverges != numeric_growth) {
        rep.verdict = Verdict::inconclusive;
        rep.detail = "cancelled leading order along a fan ray";
        rep.witness = std::array<double, 2>{1e9 * du, 1e9 * dv};
        return rep;
      }
    }
    if (!diverges) {
      rep.verdict = Verdict::refuted;
      const double t = 1e8;
      rep.witness = std::array<double, 2>{t * du, t * dv};
      rep.witness_value = W.eval(t * du, t * dv);
      rep.detail = "bounded (or decreasing) along a fan ray";
      return rep;
    }
  }
  rep.verdict = Verdict::verified;
  rep.detail = "diverges along all 64 fan rays";
  return rep;
}

PropertyReport check_p4(const RationalTermFunction& W, double u_underbar,
                        double v_underbar, const GridSpec& grid) {
  PropertyReport rep;
  rep.property = "P4";
  rep.grid = grid;

  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();

  struct Side {
    const RationalTermFunction* num;
    const RationalTermFunction* den;
    double den_floor;  // free variable starts here
    bool vary_v;
    const char* name;
  };
  const Side sides[] = {
      {&Wu, &Wv, v_underbar, true, "sup_v |Wu/Wv|"},
      {&Wv, &Wu, u_underbar, false, "sup_u |Wv/Wu|"},
  };

  for (const auto& side : sides) {
    // Fixed-variable samples: linear over the grid plus geometric beyond.
    std::vector<double> fixed = axis_samples(grid, 256);
    if (grid.v_cap > grid.extent + 1.0) {
      auto far = geometric_grid(grid.extent + 1.0, grid.v_cap, 16);
      fixed.insert(fixed.end(), far.begin(), far.end());
    }
    for (double x : fixed) {
      // Exact limit of |num/den| as the free variable grows.
      const TailBehavior tn =
          side.vary_v ? tail_v(*side.num, x) : tail_u(*side.num, x);
      const TailBehavior td =
          side.vary_v ? tail_v(*side.den, x) : tail_u(*side.den, x);
      if (tn.sign != 0 && (td.sign == 0 || tn.degree > td.degree)) {
        // Ratio diverges; produce a concrete large-v (large-u) witness.
        const double big = 1e10;
        const double u = side.vary_v ? x : big;
        const double v = side.vary_v ? big : x;
        rep.verdict = Verdict::refuted;
        rep.witness = std::array<double, 2>{u, v};
        const double dv_ = side.den->eval(u, v);
        rep.witness_value =
            dv_ == 0.0 ? std::numeric_limits<double>::infinity()
                       : std::abs(side.num->eval(u, v) / dv_);
        rep.detail = std::string(side.name) + " diverges";
        return rep;
      }

      // Finite part: geometric samples of the free variable.
      std::vector<double> free_grid;
      free_grid.push_back(side.den_floor);
      const double glo = std::max(side.den_floor, 1e-9);
      if (grid.v_cap > glo) {
        auto g = geometric_grid(glo, grid.v_cap, 128);
        free_grid.insert(free_grid.end(), g.begin(), g.end());
      }
      for (double y : free_grid) {
        const double u = side.vary_v ? x : y;
        const double v = side.vary_v ? y : x;
        const double d_val = side.den->eval(u, v);
        const double n_val = side.num->eval(u, v);
        const double d_scale = side.den->eval_abs(u, v);
        if (std::abs(d_val) <= 1e-14 * std::max(1.0, d_scale) &&
            std::abs(n_val) > 1e-10 * std::max(1.0, side.num->eval_abs(u, v))) {
          rep.verdict = Verdict::refuted;
          rep.witness = std::array<double, 2>{u, v};
          rep.witness_value = std::numeric_limits<double>::infinity();
          rep.detail = std::string(side.name) + " denominator vanishes";
          return rep;
        }
      }
    }
  }

  rep.verdict = Verdict::verified;
  rep.detail = "tangent ratios finite (grid + exact limits)";
  return rep;
}

PropertyReport check_p5(const RationalTermFunction& W) {
  PropertyReport rep;
  rep.property = "P5";

  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();
  const RationalTermFunction Wuv = Wu.dv();

  struct Dir {
    const RationalTermFunction* deriv;
    bool along_u;
    const char* name;
  };
  const Dir dirs[] = {{&Wu, true, "u"}, {&Wv, false, "v"}};

  for (const auto& dir : dirs) {
    std::vector<double> samples = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 17.0, 123.0};
    bool all_finite = true;
    for (double x : samples) {
      const TailBehavior td =
          dir.along_u ? tail_u(*dir.deriv, x) : tail_v(*dir.deriv, x);
      if (td.degree > 0 && td.sign != 0) {
        all_finite = false;
        continue;  // divergent branch: nothing more to check at this x
      }
      const TailBehavior tm = dir.along_u ? tail_u(Wuv, x) : tail_v(Wuv, x);
      if (tm.degree > 0 && tm.sign != 0) {
        rep.verdict = Verdict::refuted;
        rep.witness = std::array<double, 2>{dir.along_u ? 1e10 : x,
                                            dir.along_u ? x : 1e10};
        rep.witness_value = Wuv.eval((*rep.witness)[0], (*rep.witness)[1]);
        rep.detail = std::string("mixed-derivative limit diverges along ") +
                     dir.name;
        return rep;
      }
    }

    if (all_finite) {
      // Finite branch everywhere sampled: the limit must be independent of
      // the other variable and the mixed limit must vanish.
      const auto lim = dir.along_u ? limit_u_function(*dir.deriv)
                                   : limit_v_function(*dir.deriv);
      const auto mix =
          dir.along_u ? limit_u_function(Wuv) : limit_v_function(Wuv);
      const bool lim_varies =
          lim && (dir.along_u ? lim->depends_on_v() : lim->depends_on_u());
      const bool mix_nonzero = mix && !mix->identically_zero();
      if (lim_varies || mix_nonzero || !lim) {
        rep.verdict = Verdict::refuted;
        const double a = 0.0, b = 5.0;
        double la = 0.0, lb = 0.0;
        if (lim) {
          la = lim->eval(a, a);
          lb = lim->eval(b, b);
        }
        rep.witness = std::array<double, 2>{dir.along_u ? 1e10 : b,
                                            dir.along_u ? b : 1e10};
        rep.witness_value = lim_varies ? (lb - la)
                            : mix ? mix->eval(b, b)
                                  : 0.0;
        rep.detail =
            std::string("finite derivative limit along ") + dir.name +
            (lim_varies ? " depends on the other variable"
                        : " with nonzero mixed-derivative limit");
        return rep;
      }
    }
  }

  rep.verdict = Verdict::verified;
  rep.detail = "limits finite-with-vanishing-mixed or divergent";
  return rep;
}

UnderbarResult find_underbars(const RationalTermFunction& W, double cap) {
  UnderbarResult out;
  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();

  auto search = [cap](auto&& positive_at) -> std::optional<double> {
    if (positive_at(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (!positive_at(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > cap) return std::nullopt;
    }
    return bisect_first_true([&](double x) { return positive_at(x); }, lo, hi,
                             1e-9);
  };

  auto u_res = search([&](double x) { return Wu.eval(x, 0.0) > 0.0; });
  auto v_res = search([&](double x) { return Wv.eval(0.0, x) > 0.0; });
  if (!u_res || !v_res) {
    out.verdict = Verdict::inconclusive;
    return out;
  }
  out.u_underbar = *u_res;
  out.v_underbar = *v_res;
  out.verdict = Verdict::verified;
  return out;
}

SeparablePromotion promote_separable(const RationalTermFunction& W) {
  SeparablePromotion out;
  out.p4.property = "P4";
  out.p5.property = "P5";
  if (!W.additively_separable()) {
    out.eligible = false;
    out.p4.verdict = Verdict::inconclusive;
    out.p5.verdict = Verdict::inconclusive;
    out.p4.detail = out.p5.detail = "not additively separable";
    return out;
  }
  out.eligible = true;
  out.p4.verdict = Verdict::verified;
  out.p4.detail = "separable promotion";
  out.p5.verdict = Verdict::verified;
  out.p5.detail = "separable promotion";
  return out;
}

bool VerificationResult::all_verified() const {
  return p1.verdict == Verdict::verified && p2.verdict == Verdict::verified &&
         p3.verdict == Verdict::verified && p4.verdict == Verdict::verified &&
         p5.verdict == Verdict::verified &&
         underbars_verdict == Verdict::verified &&
         K_verdict == Verdict::verified && B_K_verdict == Verdict::verified;
}

Verdict VerificationResult::overall() const {
  const Verdict all[] = {p1.verdict,        p2.verdict, p3.verdict,
                         p4.verdict,        p5.verdict, underbars_verdict,
                         K_verdict,         B_K_verdict};
  for (Verdict v : all) {
    if (v == Verdict::refuted) return Verdict::refuted;
  }
  for (Verdict v : all) {
    if (v == Verdict::inconclusive) return Verdict::inconclusive;
  }
  return Verdict::verified;
}

VerificationResult verify_llf(const RationalTermFunction& W,
                              const ReactionPair& reactions,
                              const VerifySettings& settings) {
  VerificationResult r;
  r.candidate.W = W;

  r.p3 = check_p3(W);

  const auto underbars = find_underbars(W);
  r.underbars_verdict = underbars.verdict;
  r.candidate.u_underbar = underbars.u_underbar;
  r.candidate.v_underbar = underbars.v_underbar;

  // Grid extent: explicit, or derived from a coarse threshold estimate.
  double extent = settings.extent;
  if (extent <= 0.0) {
    double K_est = 0.0;
    bool certified = false;
    for (double E = 64.0; E <= 4096.0; E *= 2.0) {
      GridSpec coarse{E, std::max(0.1, E / 2048.0), settings.v_cap};
      const auto probe = check_p1(W, reactions, coarse, settings.p1_tol);
      if (probe.verdict == Verdict::refuted) {
        certified = true;  // tails will refute again on the final grid
        K_est = 0.0;
        break;
      }
      if (probe.verdict == Verdict::verified) {
        certified = true;
        K_est = probe.K_underbar;
        break;
      }
    }
    const double base = underbars.u_underbar + underbars.v_underbar + K_est;
    extent = certified ? 3.0 * (base + 10.0) : 4096.0;
    extent = std::max(extent, 32.0);
  }
  r.grid_extent_used = extent;
  const GridSpec grid{extent, settings.spacing, settings.v_cap};

  r.p2 = check_p2(W, grid);
  r.p1 = check_p1(W, reactions, grid, settings.p1_tol);
  r.candidate.K_underbar = r.p1.K_underbar;
  r.p4 = check_p4(W, underbars.u_underbar, underbars.v_underbar, grid);
  r.p5 = check_p5(W);

  const bool prerequisites_ok = r.p1.verdict == Verdict::verified &&
                                r.p2.verdict == Verdict::verified &&
                                r.p3.verdict == Verdict::verified &&
                                underbars.verdict == Verdict::verified &&
                                r.candidate.K_underbar > 0.0;
  if (prerequisites_ok) {
    const auto kr = find_K(W, r.candidate.K_underbar,
                           underbars.u_underbar, underbars.v_underbar);
    r.K_verdict = kr.verdict;
    r.candidate.K = kr.K;
    if (kr.verdict == Verdict::verified) {
      r.constants.M_K = level_line_max(W, LineTarget::value, kr.K);
      const auto scan = sublevel_max_norm(W, r.constants.M_K);
      r.B_K_verdict = scan.verdict;
      r.constants.B_K = scan.max_norm;
      if (scan.verdict == Verdict::verified) {
        const auto rs = ratio_sup(W, r.constants.B_K, underbars.u_underbar,
                                  underbars.v_underbar, settings.v_cap);
        r.constants.R_u_BK = rs.R_u;
        r.constants.R_v_BK = rs.R_v;
        if (!rs.finite) r.B_K_verdict = Verdict::inconclusive;
      }
      const auto mu = limit_u_function(W.du());
      const auto mv = limit_v_function(W.dv());
      if (mu && !mu->depends_on_v()) r.constants.M_u_inf = mu->eval(0.0, 0.0);
      if (mv && !mv->depends_on_u()) r.constants.M_v_inf = mv->eval(0.0, 0.0);
    }
  }
  return r;
}

}  // namespace rdbound
