#ifndef RDBOUND_LLF_HPP
#define RDBOUND_LLF_HPP

#include <array>
#include <optional>
#include <string>

#include "rdbound/system.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound {

/// Numeric checking cannot prove universally quantified statements, so
/// "verified" means grid-plus-tail certified; only refutation is definitive.
enum class Verdict { verified, refuted, inconclusive };

std::string to_string(Verdict v);

/// Rectangular verification grid [0, extent]^2 with uniform spacing, plus a
/// cap for geometric sampling toward infinity.
struct GridSpec {
  double extent = 64.0;
  double spacing = 0.01;
  double v_cap = 1e6;
};

struct PropertyReport {
  std::string property;  // "P1".."P5"
  Verdict verdict = Verdict::inconclusive;
  /// Concrete refutation point; always present on refuted verdicts.
  std::optional<std::array<double, 2>> witness;
  double witness_value = 0.0;  // magnitude of the failed inequality
  GridSpec grid;
  std::string detail;
  /// P1 only: smallest grid-certified threshold.
  double K_underbar = 0.0;
};

/// Candidate function together with its verified thresholds.
struct LLFCandidate {
  RationalTermFunction W;
  double K_underbar = 0.0;  // P1 threshold
  double u_underbar = 0.0;  // dW/du > 0 for u >= u_underbar
  double v_underbar = 0.0;
  double K = 0.0;           // level with M^(L) < M^(K) for all L < K
};

/// Geometry of the sub-level region: level value at K, the norm bound of its
/// boundary, tail limits of the partial derivatives, and the tangent-ratio
/// suprema at L = B_K used by the flux bound.
struct LevelSetConstants {
  double M_K = 0.0;
  double B_K = 0.0;
  double R_u_BK = 0.0;
  double R_v_BK = 0.0;
  std::optional<double> M_u_inf;  // nullopt: diverges
  std::optional<double> M_v_inf;
};

/// P1: grad(W).(f,g) <= 0 once u+v >= K_underbar. Grid part finds the
/// smallest certified threshold; exact tail signs along u->inf (v on grid
/// rows) and v->inf (u on grid columns) reject candidates whose dot product
/// turns positive beyond the grid.
PropertyReport check_p1(const RationalTermFunction& W,
                        const ReactionPair& reactions, const GridSpec& grid,
                        double tol = 1e-10);

/// P2: Wuu > 0, Wvv > 0 and Wuv >= 0 on the grid, with tail sign checks in
/// both directions.
PropertyReport check_p2(const RationalTermFunction& W, const GridSpec& grid);

/// P3: W diverges along every ray of a 64-direction quadrant fan.
PropertyReport check_p3(const RationalTermFunction& W);

/// P4: level-set tangent ratios stay finite: sup over v >= v_underbar of
/// |Wu/Wv| for each sampled u (geometric samples to v_cap plus the exact
/// v->inf ratio limit), and mirrored.
PropertyReport check_p4(const RationalTermFunction& W, double u_underbar,
                        double v_underbar, const GridSpec& grid);

/// P5: for each direction, either the derivative limit is finite together
/// with the mixed-derivative limit (which must then be 0 and independent of
/// the other variable), or the derivative limit diverges.
PropertyReport check_p5(const RationalTermFunction& W);

struct UnderbarResult {
  Verdict verdict = Verdict::verified;
  double u_underbar = 0.0;
  double v_underbar = 0.0;
};
/// Smallest thresholds with dW/du(u,0) > 0 at u = u_underbar (bisection;
/// monotone by P2) and mirrored. The returned points satisfy the strict
/// inequality, so downstream ratio denominators stay positive.
UnderbarResult find_underbars(const RationalTermFunction& W,
                              double cap = 1e9);

struct KResult {
  Verdict verdict = Verdict::inconclusive;
  double K = 0.0;
  double M_hat = 0.0;
  double u_tilde = 0.0;
  double v_tilde = 0.0;
};
/// Level threshold K >= max{K_underbar, u_underbar, v_underbar} with
/// M^(L) < M^(K) for L < K: M_hat over the initial triangle, then the two
/// min-conditions by monotone search, K = max{K_underbar, u_tilde+v_tilde}.
/// Validated on 20 sampled L < K. Requires K_underbar > 0.
KResult find_K(const RationalTermFunction& W, double K_underbar,
               double u_underbar, double v_underbar);

enum class LineTarget { value, du, dv };

/// Maximum of W (or a partial derivative) on the segment u+v = L, u,v >= 0:
/// 4096-point scan plus golden-section refinement around the best bracket,
/// absolute tolerance 1e-9.
double level_line_max(const RationalTermFunction& W, LineTarget target,
                      double L);

/// max |f| over the closed triangle {u, v >= 0, u + v <= L} by a line sweep
/// with golden refinement of the best line.
double triangle_abs_max(const RationalTermFunction& f, double L);

struct RatioSup {
  double R_u = 0.0;
  double R_v = 0.0;
  bool finite = true;
};
/// R_{u,L} = sup |Wu/Wv| over u in [0,L], v in [v_underbar, inf) and the
/// mirrored R_{v,L}. Grid part up to v_cap plus the exact ratio limit;
/// multiplied by a 1.05 safety factor so the downstream bound stays valid.
RatioSup ratio_sup(const RationalTermFunction& W, double L, double u_underbar,
                   double v_underbar, double v_cap = 1e6);

struct LevelScan {
  Verdict verdict = Verdict::verified;
  double max_norm = 0.0;
};
/// max(u+v) over the level set W = level by 1024 quadrant rays: geometric
/// scan for sign changes, bisection refinement of each crossing, outermost
/// crossing per ray, then the 1.05 safety factor. A ray with no crossing
/// within the cap makes the result inconclusive (the level set may be
/// unbounded, contradicting P3).
LevelScan sublevel_max_norm(const RationalTermFunction& W, double level,
                            int rays = 1024);

struct SeparablePromotion {
  bool eligible = false;
  PropertyReport p4;
  PropertyReport p5;
};
/// For additively separable W passing P2 (with P1 and P3 supplied by the
/// caller), P4 and P5 hold automatically; no search needed.
SeparablePromotion promote_separable(const RationalTermFunction& W);

/// Settings for the whole verification pipeline. extent 0 means automatic:
/// a coarse P1 pass estimates K_underbar, then the final grids use
/// 3 * (u_underbar + v_underbar + K_est + 10).
struct VerifySettings {
  double extent = 0.0;
  double spacing = 0.01;
  double v_cap = 1e6;
  double p1_tol = 1e-10;
};

struct VerificationResult {
  PropertyReport p1, p2, p3, p4, p5;
  Verdict underbars_verdict = Verdict::inconclusive;
  Verdict K_verdict = Verdict::inconclusive;
  Verdict B_K_verdict = Verdict::inconclusive;
  LLFCandidate candidate;
  LevelSetConstants constants;
  double grid_extent_used = 0.0;

  bool all_verified() const;
  Verdict overall() const;
};

/// P2, P3, underbars, P1 (coarse then final grid), P4, P5, then the constant
/// chain K, M^(K), B^(K), R at B^(K) and the derivative tail limits.
VerificationResult verify_llf(const RationalTermFunction& W,
                              const ReactionPair& reactions,
                              const VerifySettings& settings = {});

}  // namespace rdbound

#endif  // RDBOUND_LLF_HPP
