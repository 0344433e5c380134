#ifndef RDBOUND_CERTIFICATES_HPP
#define RDBOUND_CERTIFICATES_HPP

#include <optional>
#include <string>
#include <vector>

#include "rdbound/sim.hpp"
#include "rdbound/system.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound {

/// Evidence that no LLF can exist for a reaction pair.
struct NoLLFCertificate {
  enum class Condition {
    ratio_divergence_u,  // f stays positive and |f/g| -> inf as u -> inf
    ratio_divergence_v,  // mirrored
    mutualism_ray        // quadratic ray term positive: b2 c1 > b1 c2
  };
  Condition condition = Condition::ratio_divergence_u;
  double fixed_value = 0.0;  // the fixed v (or u), or the ray slope b2/c2
  std::string evidence;
};
std::string to_string(NoLLFCertificate::Condition c);
std::string to_json_string(const NoLLFCertificate& cert);

/// Tail test along u -> inf at fixed sampled v (and mirrored): fires when
/// liminf f > 0 and |f/g| -> inf, both read off the exact tail expansion.
std::optional<NoLLFCertificate> no_llf_ratio_test(
    const ReactionPair& reactions,
    const std::vector<double>& fixed_samples = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0,
                                                8.0});

struct MutualismParams {
  double a1 = -1.0, a2 = 1.0;
  double b1 = 1.0, b2 = 2.0;
  double c1 = 1.0, c2 = 1.0;
};
/// Along v = (b2/c2) u the reactive derivative of any candidate would need
/// c1 b2 - b1 c2 <= 0; strong mutualism contradicts that.
std::optional<NoLLFCertificate> no_llf_mutualism_test(
    const MutualismParams& p);

/// Two-variable system obtained from the n=2 symmetric-IC reduction with
/// gamma = d = 1: du/dt = f(u,v) + 4(v-u), dv/dt = f(v,u) + 4(u-v).
struct ReducedSystem {
  double delta = 0.0;
  RationalTermFunction du_dt;
  RationalTermFunction dv_dt;
  double u0 = 0.0;
  double v0 = 0.0;
};
/// Requires the symmetric cross-coupled kinetics, n = 2, gamma = d = 1 and
/// mirrored initial data u_{1,0} = v_{2,0}, u_{2,0} = v_{1,0}; throws
/// ReductionError otherwise. delta is read off the kinetics.
ReducedSystem reduce_symmetric(const DiscretizedSystem& sys);

OdeResult simulate_reduced(const ReducedSystem& reduced,
                           const IntegratorSettings& settings);

/// h(u,v) = u v (u + v + 2) - (8 + delta); its sign gates divergence of
/// u - v in the reduced system.
double blowup_h(double delta, double u, double v);
/// Positive branch of h(u,v) = eps solved for v.
double blowup_curve_v(double delta, double eps, double u);

enum class BlowupVerdict { certified_blow_up, not_certified, inapplicable };
std::string to_string(BlowupVerdict v);

struct BlowupCertificate {
  double delta = 0.0;
  double C_root = 0.0;       // real root of C^3 + 2C^2 - 32
  double A_cert = 0.0;       // 8 / (36/((C+1)(C+2)) + 3)
  double threshold_A = 0.0;  // 2 A / (27 - 2 A)
  double threshold_C = 0.0;  // (4 C - 1) / 27
  double h0 = 0.0;           // h(u0, v0)
  int sign_u_minus_v = 0;
  double epsilon = 0.0;      // min(0.9 h0, 1 - delta - 1e-6), clamped > 0
  BlowupVerdict verdict = BlowupVerdict::inapplicable;
  std::string detail;
};
std::string to_json_string(const BlowupCertificate& cert);

/// Certified iff delta is below both thresholds, delta + epsilon < 1 is
/// feasible, and the initial point has h > 0 with u0 != v0 (either
/// orientation; the verdict records which species diverges). not_certified
/// does not imply boundedness.
BlowupCertificate blowup_certificate(double delta, double u0, double v0);

struct GronwallReport {
  bool ok = false;
  double epsilon = 0.0;
  double min_slack = 0.0;  // min of (u-v) - (u0-v0) e^(eps t) over frames
  std::optional<double> first_violation_t;
  bool h_positive_throughout = false;
};
std::string to_json_string(const GronwallReport& report);

/// Checks u(t) - v(t) >= (u0 - v0) e^(eps t) - 1e-8 and h > 0 along the
/// recorded reduced trajectory until the guard fired.
GronwallReport verify_gronwall(const OdeResult& trajectory,
                               const BlowupCertificate& cert, double epsilon);

}  // namespace rdbound

#endif  // RDBOUND_CERTIFICATES_HPP
