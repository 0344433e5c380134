#include "rdbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

#include "rdbound/errors.hpp"
#include "rdbound/numerics.hpp"

namespace rdbound {

void ConstantLedger::set(std::string name, double value,
                         std::vector<std::string> prereqs,
                         std::string method) {
  if (!std::isfinite(value)) {
    throw LedgerOverflowError("ledger field '" + name + "' is non-finite", -1);
  }
  for (const auto& p : prereqs) {
    if (!has(p)) {
      throw PipelineOrderError("ledger field '" + name +
                               "' requires missing prerequisite '" + p + "'");
    }
  }
  entries_.emplace_back(std::move(name),
                        LedgerEntry{value, std::move(prereqs), std::move(method)});
}

double ConstantLedger::get(std::string_view name) const {
  for (const auto& [n, e] : entries_) {
    if (n == name) return e.value;
  }
  throw PipelineOrderError("ledger field '" + std::string(name) +
                           "' has not been computed yet");
}

bool ConstantLedger::has(std::string_view name) const {
  for (const auto& [n, e] : entries_) {
    if (n == name) return true;
  }
  return false;
}

std::string to_json_string(const ConstantLedger& ledger) {
  nlohmann::ordered_json fields = nlohmann::ordered_json::object();
  for (const auto& [name, entry] : ledger.entries()) {
    fields[name] = {{"value", entry.value},
                    {"prerequisites", entry.prerequisites},
                    {"method", entry.method}};
  }
  nlohmann::ordered_json root = {{"fields", fields},
                                 {"warnings", ledger.warnings()},
                                 {"safety_factor", 1.05}};
  return root.dump(2);
}

namespace {

// max |f| over [0, u_max] x [0, v_max]: grid scan plus coordinate-wise
// golden refinement around the best cell.
double rect_abs_max(const RationalTermFunction& f, double u_max,
                    double v_max) {
  const int pts = 128;
  double best = 0.0;
  double bu = 0.0, bv = 0.0;
  for (int j = 0; j <= pts; ++j) {
    const double v = v_max * j / pts;
    for (int i = 0; i <= pts; ++i) {
      const double u = u_max * i / pts;
      const double val = std::abs(f.eval(u, v));
      if (val > best) {
        best = val;
        bu = u;
        bv = v;
      }
    }
  }
  const double du = u_max / pts, dv = v_max / pts;
  if (du > 0.0) {
    auto g = [&](double u) { return std::abs(f.eval(u, bv)); };
    const double u_star = golden_max(g, std::max(0.0, bu - du),
                                     std::min(u_max, bu + du),
                                     std::max(1e-9, u_max * 1e-14));
    if (g(u_star) > best) {
      best = g(u_star);
      bu = u_star;
    }
  }
  if (dv > 0.0) {
    auto g = [&](double v) { return std::abs(f.eval(bu, v)); };
    const double v_star = golden_max(g, std::max(0.0, bv - dv),
                                     std::min(v_max, bv + dv),
                                     std::max(1e-9, v_max * 1e-14));
    best = std::max(best, g(v_star));
  }
  return best;
}

// Solve deriv(x along its axis) = target by doubling plus bisection; the
// derivative restricted to the axis is monotone increasing under P2.
std::optional<double> solve_axis_level(const RationalTermFunction& deriv,
                                       bool along_u, double target) {
  auto value_at = [&](double x) {
    return along_u ? deriv.eval(x, 0.0) : deriv.eval(0.0, x);
  };
  auto pred = [&](double x) { return value_at(x) >= target; };
  if (pred(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (!pred(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e290 || ++guard > 1000) {
      return std::nullopt;
    }
  }
  return bisect_first_true(pred, lo, hi, 1e-12);
}

}  // namespace

FMaxParts compute_F_max(const RationalTermFunction& W, double B_K,
                        double R_u_BK, double R_v_BK, double d) {
  if (!(B_K > 0.0) || !std::isfinite(R_u_BK) || !std::isfinite(R_v_BK) ||
      !(d > 0.0)) {
    throw PipelineOrderError(
        "compute_F_max requires finite B_K > 0, R_u_BK, R_v_BK and d > 0");
  }
  FMaxParts out;
  out.u_star = B_K * (1.0 + d * R_v_BK);
  out.v_star = B_K * (d + R_u_BK) / d;
  out.max_abs_du = rect_abs_max(W.du(), B_K, out.v_star);
  out.max_abs_dv = rect_abs_max(W.dv(), out.u_star, B_K);
  out.value = B_K * (out.max_abs_du + d * out.max_abs_dv);
  return out;
}

GuParts compute_G_u(const RationalTermFunction& W, double A, double L,
                    double d, double u_underbar, double v_underbar,
                    const BoundsSettings& settings) {
  if (!(A > 0.0) || !(L > 0.0)) {
    throw PipelineOrderError("compute_G_u requires A > 0 and L > 0");
  }
  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();

  GuParts out;
  out.M_u_L = level_line_max(W, LineTarget::du, L);
  out.R_v_L =
      ratio_sup(W, L, u_underbar, v_underbar, settings.v_cap).R_v;
  const double max_Wv_T = triangle_abs_max(Wv, L);

  std::optional<GuParts> best;
  double L_tilde = L;
  for (int k = 0; k < settings.max_doublings; ++k) {
    L_tilde *= 2.0;
    if (!std::isfinite(L_tilde)) break;
    const double M = level_line_max(W, LineTarget::du, L_tilde);
    if (!(M >= settings.m_floor)) continue;
    const double C1 = 1.0 - out.M_u_L / M;
    if (!(C1 > 1e-12)) continue;
    const auto u_tilde = solve_axis_level(Wu, true, M);
    if (!u_tilde) continue;
    const double C2 = (out.R_v_L + max_Wv_T / M) * L;
    const double G = std::max(*u_tilde + L, (A + d * M * C2) / (M * C1));

    GuParts cand = out;
    cand.L_tilde = L_tilde;
    cand.M_u_Ltilde = M;
    cand.C1 = C1;
    cand.C2 = C2;
    cand.u_tilde = *u_tilde;
    cand.value = G;
    if (C1 >= settings.c1_floor) return cand;  // preferred recipe satisfied
    if (!best || cand.value < best->value) best = cand;
  }
  if (!best) {
    throw LedgerOverflowError("compute_G_u: no usable L_tilde found", -1);
  }
  return *best;
}

GvParts compute_G_v(const RationalTermFunction& W, double A, double L,
                    double d, double u_underbar, double v_underbar,
                    const BoundsSettings& settings) {
  if (!(A > 0.0) || !(L > 0.0)) {
    throw PipelineOrderError("compute_G_v requires A > 0 and L > 0");
  }
  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();

  GvParts out;
  out.M_v_L = level_line_max(W, LineTarget::dv, L);
  out.R_u_L =
      ratio_sup(W, L, u_underbar, v_underbar, settings.v_cap).R_u;
  const double max_Wu_T = triangle_abs_max(Wu, L);

  std::optional<GvParts> best;
  double L_tilde = L;
  for (int k = 0; k < settings.max_doublings; ++k) {
    L_tilde *= 2.0;
    if (!std::isfinite(L_tilde)) break;
    const double M = level_line_max(W, LineTarget::dv, L_tilde);
    if (!(M >= settings.m_floor)) continue;
    const double C3 = 1.0 - out.M_v_L / M;
    if (!(C3 > 1e-12)) continue;
    const auto v_tilde = solve_axis_level(Wv, false, M);
    if (!v_tilde) continue;
    const double C4 = L * (out.R_u_L + max_Wu_T / M);
    const double G = std::max(*v_tilde + L, (A + M * C4) / (d * M * C3));

    GvParts cand = out;
    cand.L_tilde = L_tilde;
    cand.M_v_Ltilde = M;
    cand.C3 = C3;
    cand.C4 = C4;
    cand.v_tilde = *v_tilde;
    cand.value = G;
    if (C3 >= settings.c1_floor) return cand;
    if (!best || cand.value < best->value) best = cand;
  }
  if (!best) {
    throw LedgerOverflowError("compute_G_v: no usable L_tilde found", -1);
  }
  return *best;
}

GResult compute_G(const RationalTermFunction& W, double A, double L, double d,
                  double B_K, double u_underbar, double v_underbar,
                  const BoundsSettings& settings) {
  GResult out;
  out.gu = compute_G_u(W, A, L, d, u_underbar, v_underbar, settings);
  out.gv = compute_G_v(W, A, L, d, u_underbar, v_underbar, settings);
  out.value = std::max({2.0 * out.gu.value, 2.0 * out.gv.value, B_K});
  return out;
}

ChainResult compute_C(const RationalTermFunction& W, int n, double A,
                      double B_K, double d, double u_underbar,
                      double v_underbar, const BoundsSettings& settings) {
  if (n < 2) throw InvalidSystemError("compute_C: n must be >= 2");
  ChainResult out;
  long double acc = B_K;
  double L = B_K;
  for (int i = 1; i <= n - 1; ++i) {
    const auto g =
        compute_G(W, A, L, d, B_K, u_underbar, v_underbar, settings);
    ChainStep step;
    step.L_in = L;
    step.G = g.value;
    step.L_out = L + g.value;
    if (!std::isfinite(step.L_out)) {
      throw LedgerOverflowError("compartment chain overflowed", i);
    }
    out.steps.push_back(step);
    acc += g.value;
    L = step.L_out;
  }
  out.C = static_cast<double>(acc);
  if (!std::isfinite(out.C)) {
    throw LedgerOverflowError("threshold C overflowed", n - 1);
  }
  return out;
}

double compute_C_underbar(double C, const std::vector<double>& u0,
                          const std::vector<double>& v0) {
  double max_norm = 0.0;
  for (std::size_t i = 0; i < u0.size() && i < v0.size(); ++i) {
    max_norm = std::max(max_norm, u0[i] + v0[i]);
  }
  return std::max(C, max_norm);
}

BResult compute_B(const RationalTermFunction& W, double C_underbar, int n,
                  int rays) {
  BResult out;
  out.M_C_underbar = level_line_max(W, LineTarget::value, C_underbar);
  const auto scan = sublevel_max_norm(W, n * out.M_C_underbar, rays);
  out.B = scan.max_norm;
  out.verdict = scan.verdict;
  return out;
}

ConstantLedger compute_ledger(const DiscretizedSystem& sys,
                              const LLFCandidate& candidate,
                              const LevelSetConstants& constants,
                              const BoundsSettings& settings) {
  const auto& W = candidate.W;
  ConstantLedger lg;
  lg.set("n", sys.n(), {}, "input");
  lg.set("gamma", sys.gamma(), {}, "input");
  lg.set("d", sys.d(), {}, "input");
  lg.set("K_underbar", candidate.K_underbar, {}, "P1 grid certification");
  lg.set("u_underbar", candidate.u_underbar, {}, "axis bisection");
  lg.set("v_underbar", candidate.v_underbar, {}, "axis bisection");
  lg.set("K", candidate.K,
         {"K_underbar", "u_underbar", "v_underbar"}, "threshold construction");
  lg.set("M_K", constants.M_K, {"K"}, "level-line max");
  lg.set("B_K", constants.B_K, {"M_K"}, "level-set ray scan x1.05");
  lg.set("R_u_BK", constants.R_u_BK, {"B_K", "v_underbar"}, "strip sup x1.05");
  lg.set("R_v_BK", constants.R_v_BK, {"B_K", "u_underbar"}, "strip sup x1.05");

  const auto fm = compute_F_max(W, constants.B_K, constants.R_u_BK,
                                constants.R_v_BK, sys.d());
  lg.set("u_star", fm.u_star, {"B_K", "R_v_BK", "d"}, "B_K (1 + d R_v)");
  lg.set("v_star", fm.v_star, {"B_K", "R_u_BK", "d"}, "B_K (d + R_u) / d");
  lg.set("F_max", fm.value, {"B_K", "u_star", "v_star", "d"},
         "rectangle maxima of |Wu|, |Wv|");
  const double A = sys.n() * fm.value;
  lg.set("A", A, {"n", "F_max"}, "A = n F_max");

  const auto chain =
      compute_C(W, sys.n(), A, constants.B_K, sys.d(), candidate.u_underbar,
                candidate.v_underbar, settings);
  lg.set("L_0", constants.B_K, {"B_K"}, "chain start");
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const auto idx = std::to_string(i + 1);
    lg.set("G_" + idx, chain.steps[i].G,
           {"L_" + std::to_string(i), "A"}, "max{2 G_u, 2 G_v, B_K}");
    lg.set("L_" + idx, chain.steps[i].L_out,
           {"L_" + std::to_string(i), "G_" + idx}, "L + G");
  }
  lg.set("C", chain.C, {"B_K", "A"}, "B_K + sum of chain gaps");

  const double c_ub = compute_C_underbar(chain.C, sys.u0(), sys.v0());
  lg.set("C_underbar", c_ub, {"C"}, "max of C and initial norms");
  if (!(c_ub > candidate.K)) {
    lg.add_warning("C_underbar <= K: the boundedness argument's implicit "
                   "ordering failed; the reported B is unreliable");
  }

  const auto b = compute_B(W, c_ub, sys.n(), settings.rays);
  lg.set("M_C_underbar", b.M_C_underbar, {"C_underbar"}, "level-line max");
  if (b.verdict != Verdict::verified) {
    lg.add_warning("B ray scan was inconclusive on some ray");
  }
  lg.set("B", b.B, {"M_C_underbar", "n"}, "level-set ray scan x1.05");
  if (!(b.B >= c_ub)) {
    lg.add_warning("B < C_underbar: sub-level containment check failed");
  }
  return lg;
}

}  // namespace rdbound
