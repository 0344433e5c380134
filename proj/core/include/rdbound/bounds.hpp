#ifndef RDBOUND_BOUNDS_HPP
#define RDBOUND_BOUNDS_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rdbound/llf.hpp"
#include "rdbound/system.hpp"

namespace rdbound {

struct LedgerEntry {
  double value = 0.0;
  std::vector<std::string> prerequisites;
  std::string method;
};

/// Ordered map of named constants with provenance. Reading a field that has
/// not been computed yet throws PipelineOrderError, which is what enforces
/// the pipeline order deterministically.
class ConstantLedger {
 public:
  void set(std::string name, double value, std::vector<std::string> prereqs,
           std::string method);
  double get(std::string_view name) const;
  bool has(std::string_view name) const;
  const std::vector<std::pair<std::string, LedgerEntry>>& entries() const {
    return entries_;
  }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<std::pair<std::string, LedgerEntry>> entries_;
  std::vector<std::string> warnings_;
};

/// Flat JSON object: field -> {value, prerequisites, method}, plus warnings.
std::string to_json_string(const ConstantLedger& ledger);

struct BoundsSettings {
  /// L_tilde selection: first of {2L, 4L, 8L, ...} with M >= m_floor and
  /// C1 >= c1_floor; if the floor is unreachable within max_doublings the
  /// valid candidate minimizing G is used instead (C1 > 0 always required).
  double c1_floor = 0.1;
  double m_floor = 1e-6;
  int max_doublings = 40;
  double v_cap = 1e6;
  double safety = 1.05;
  int rays = 1024;
};

struct FMaxParts {
  double u_star = 0.0;
  double v_star = 0.0;
  double max_abs_du = 0.0;  // max |Wu| over [0,B_K] x [0,v_star]
  double max_abs_dv = 0.0;  // max |Wv| over [0,u_star] x [0,B_K]
  double value = 0.0;       // F_max
};
/// Upper bound for boundary-edge flux effects:
///   u* = B_K (1 + d R_{v,B_K}),  v* = B_K (d + R_{u,B_K}) / d,
///   F_max = B_K (max|Wu| + d max|Wv|) over the stated rectangles.
FMaxParts compute_F_max(const RationalTermFunction& W, double B_K,
                        double R_u_BK, double R_v_BK, double d);

struct GuParts {
  double L_tilde = 0.0;
  double M_u_L = 0.0;
  double M_u_Ltilde = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double u_tilde = 0.0;
  double R_v_L = 0.0;
  double value = 0.0;  // G_u
};
/// G_u = max{ u_tilde + L, (A + d M C2) / (M C1) } with M = M_u^(L_tilde),
/// C1 = 1 - M_u^(L)/M, C2 = (R_{v,L} + max|Wv| over {u+v<L} / M) L and
/// u_tilde solving Wu(u_tilde, 0) = M.
GuParts compute_G_u(const RationalTermFunction& W, double A, double L,
                    double d, double u_underbar, double v_underbar,
                    const BoundsSettings& settings = {});

struct GvParts {
  double L_tilde = 0.0;
  double M_v_L = 0.0;
  double M_v_Ltilde = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double v_tilde = 0.0;
  double R_u_L = 0.0;
  double value = 0.0;  // G_v
};
/// Mirrored: G_v = max{ v_tilde + L, (A + M C4) / (d M C3) }.
GvParts compute_G_v(const RationalTermFunction& W, double A, double L,
                    double d, double u_underbar, double v_underbar,
                    const BoundsSettings& settings = {});

struct GResult {
  GuParts gu;
  GvParts gv;
  double value = 0.0;  // max{2 G_u, 2 G_v, B_K}
};
GResult compute_G(const RationalTermFunction& W, double A, double L, double d,
                  double B_K, double u_underbar, double v_underbar,
                  const BoundsSettings& settings = {});

struct ChainStep {
  double L_in = 0.0;
  double G = 0.0;
  double L_out = 0.0;
};
struct ChainResult {
  std::vector<ChainStep> steps;  // n-1 steps
  double C = 0.0;                // B_K + sum G_i
};
/// Worst-case compartment chain: L_0 = B_K, G_i from compute_G with
/// L = L_{i-1}, L_i = G_i + L_{i-1}; C = B_K + sum G_i. A full-length chain
/// dominates every anchor split, so C is valid regardless of which
/// compartment anchors the argument. Non-finite growth throws
/// LedgerOverflowError carrying the step index. Accumulation in long double.
ChainResult compute_C(const RationalTermFunction& W, int n, double A,
                      double B_K, double d, double u_underbar,
                      double v_underbar, const BoundsSettings& settings = {});

/// Threshold concentration: max of C and the largest initial compartment
/// norm u_{i,0} + v_{i,0}.
double compute_C_underbar(double C, const std::vector<double>& u0,
                          const std::vector<double>& v0);

struct BResult {
  double M_C_underbar = 0.0;
  double B = 0.0;
  Verdict verdict = Verdict::verified;
};
/// Final a priori bound: B = max(u+v) over {W <= n M^(C_underbar)} by the
/// same ray scan as B^(K).
BResult compute_B(const RationalTermFunction& W, double C_underbar, int n,
                  int rays = 1024);

/// Full ledger for a verified candidate: u*, v*, F_max, A = n F_max, the
/// G/L chain, C, C_underbar, M^(C_underbar) and B, with provenance on every
/// field. Checks C_underbar > K and records a warning if it fails.
ConstantLedger compute_ledger(const DiscretizedSystem& sys,
                              const LLFCandidate& candidate,
                              const LevelSetConstants& constants,
                              const BoundsSettings& settings = {});

}  // namespace rdbound

#endif  // RDBOUND_BOUNDS_HPP
