#include "rdbound/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rdbound/errors.hpp"

namespace rdbound {

std::string to_string(NoLLFCertificate::Condition c) {
  switch (c) {
    case NoLLFCertificate::Condition::ratio_divergence_u:
      return "ratio-divergence-u";
    case NoLLFCertificate::Condition::ratio_divergence_v:
      return "ratio-divergence-v";
    case NoLLFCertificate::Condition::mutualism_ray:
      return "mutualism-ray";
  }
  return "?";
}

std::string to_json_string(const NoLLFCertificate& cert) {
  nlohmann::ordered_json j = {{"condition", to_string(cert.condition)},
                              {"fixed_value", cert.fixed_value},
                              {"evidence", cert.evidence}};
  return j.dump(2);
}

std::optional<NoLLFCertificate> no_llf_ratio_test(
    const ReactionPair& reactions, const std::vector<double>& fixed_samples) {
  for (double v : fixed_samples) {
    const TailBehavior tf = tail_u(reactions.f, v);
    const TailBehavior tg = tail_u(reactions.g, v);
    const bool f_positive = tf.sign > 0 && tf.degree >= 0;
    const bool ratio_diverges = tg.sign == 0 || tf.degree > tg.degree;
    if (f_positive && ratio_diverges) {
      std::ostringstream ev;
      ev << "at v=" << v << ": f ~ " << tf.leading << " u^" << tf.degree
         << ", g ~ " << tg.leading << " u^" << tg.degree
         << "; liminf f > 0 and |f/g| -> inf";
      return NoLLFCertificate{NoLLFCertificate::Condition::ratio_divergence_u,
                              v, ev.str()};
    }
  }
  for (double u : fixed_samples) {
    const TailBehavior tg = tail_v(reactions.g, u);
    const TailBehavior tf = tail_v(reactions.f, u);
    const bool g_positive = tg.sign > 0 && tg.degree >= 0;
    const bool ratio_diverges = tf.sign == 0 || tg.degree > tf.degree;
    if (g_positive && ratio_diverges) {
      std::ostringstream ev;
      ev << "at u=" << u << ": g ~ " << tg.leading << " v^" << tg.degree
         << ", f ~ " << tf.leading << " v^" << tf.degree
         << "; liminf g > 0 and |g/f| -> inf";
      return NoLLFCertificate{NoLLFCertificate::Condition::ratio_divergence_v,
                              u, ev.str()};
    }
  }
  return std::nullopt;
}

std::optional<NoLLFCertificate> no_llf_mutualism_test(
    const MutualismParams& p) {
  if (!(p.b2 * p.c1 > p.b1 * p.c2)) return std::nullopt;
  std::ostringstream ev;
  ev << "along v = (b2/c2) u the reactive derivative needs "
     << "c1 b2 - b1 c2 <= 0, but c1 b2 - b1 c2 = "
     << (p.c1 * p.b2 - p.b1 * p.c2) << " > 0";
  return NoLLFCertificate{NoLLFCertificate::Condition::mutualism_ray,
                          p.b2 / p.c2, ev.str()};
}

namespace {

RationalTermFunction swap_variables(const RationalTermFunction& f) {
  std::vector<RationalTerm> out;
  out.reserve(f.terms().size());
  for (const auto& t : f.terms()) {
    out.push_back({t.coef, t.v_pow, t.u_pow, t.v_den, t.u_den});
  }
  return RationalTermFunction{out};
}

}  // namespace

ReducedSystem reduce_symmetric(const DiscretizedSystem& sys) {
  if (sys.n() != 2) {
    throw ReductionError("symmetric reduction requires n = 2");
  }
  if (sys.gamma() != 1.0 || sys.d() != 1.0) {
    throw ReductionError("symmetric reduction requires gamma = d = 1");
  }
  if (sys.u0()[0] != sys.v0()[1] || sys.u0()[1] != sys.v0()[0]) {
    throw ReductionError(
        "symmetric reduction requires mirrored initial data "
        "u_{1,0} = v_{2,0} and u_{2,0} = v_{1,0}");
  }
  // g must be f with the roles of u and v swapped.
  if (!(sys.reactions().g - swap_variables(sys.reactions().f))
           .identically_zero()) {
    throw ReductionError("symmetric reduction requires g(u,v) = f(v,u)");
  }

  ReducedSystem out;
  // Linear decay coefficient, when present as a pure -delta*u term.
  for (const auto& t : sys.reactions().f.terms()) {
    if (t.u_pow == 1 && t.v_pow == 0 && t.u_den == 0 && t.v_den == 0) {
      out.delta = -t.coef;
    }
  }
  // Diffusive coupling with n = 2 contributes (1/h^2)(other - self) = 4(v-u).
  const RationalTermFunction coupling_u{
      {{4.0, 0, 1, 0, 0}, {-4.0, 1, 0, 0, 0}}};
  out.du_dt = sys.reactions().f + coupling_u;
  out.dv_dt = swap_variables(out.du_dt);
  out.u0 = sys.u0()[0];
  out.v0 = sys.u0()[1];
  return out;
}

OdeResult simulate_reduced(const ReducedSystem& reduced,
                           const IntegratorSettings& settings) {
  auto deriv = [&reduced](double /*t*/, std::span<const double> y,
                          std::span<double> dy) {
    dy[0] = reduced.du_dt.eval(y[0], y[1]);
    dy[1] = reduced.dv_dt.eval(y[0], y[1]);
  };
  return integrate_generic(deriv, {reduced.u0, reduced.v0}, settings);
}

double blowup_h(double delta, double u, double v) {
  return u * v * (u + v + 2.0) - (8.0 + delta);
}

double blowup_curve_v(double delta, double eps, double u) {
  return -1.0 - 0.5 * u +
         std::sqrt((8.0 + delta + eps) / u + 1.0 + u + 0.25 * u * u);
}

std::string to_string(BlowupVerdict v) {
  switch (v) {
    case BlowupVerdict::certified_blow_up: return "certified-blow-up";
    case BlowupVerdict::not_certified: return "not-certified";
    case BlowupVerdict::inapplicable: return "inapplicable";
  }
  return "?";
}

std::string to_json_string(const BlowupCertificate& cert) {
  nlohmann::ordered_json j = {
      {"delta", cert.delta},
      {"C_root", cert.C_root},
      {"A_cert", cert.A_cert},
      {"threshold_A", cert.threshold_A},
      {"threshold_C", cert.threshold_C},
      {"delta_threshold", std::min(cert.threshold_A, cert.threshold_C)},
      {"paper_threshold", 0.13},
      {"h0", cert.h0},
      {"sign_u_minus_v", cert.sign_u_minus_v},
      {"epsilon", cert.epsilon},
      {"verdict", to_string(cert.verdict)},
      {"detail", cert.detail}};
  return j.dump(2);
}

BlowupCertificate blowup_certificate(double delta, double u0, double v0) {
  BlowupCertificate cert;
  cert.delta = delta;

  // Real root of C^3 + 2C^2 - 32 on [2, 3].
  auto cubic = [](double c) { return (c + 2.0) * c * c - 32.0; };
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (cubic(mid) < 0.0 ? lo : hi) = mid;
  }
  cert.C_root = 0.5 * (lo + hi);

  const double C = cert.C_root;
  cert.A_cert = 8.0 / (36.0 / ((C + 1.0) * (C + 2.0)) + 3.0);
  cert.threshold_A = 2.0 * cert.A_cert / (27.0 - 2.0 * cert.A_cert);
  cert.threshold_C = (4.0 * C - 1.0) / 27.0;

  cert.h0 = blowup_h(delta, u0, v0);
  cert.sign_u_minus_v = (u0 > v0) ? 1 : (u0 < v0 ? -1 : 0);
  cert.epsilon =
      std::max(0.0, std::min(0.9 * cert.h0, 1.0 - delta - 1e-6));

  if (cert.sign_u_minus_v == 0) {
    cert.verdict = BlowupVerdict::inapplicable;
    cert.detail = "u0 = v0: the difference cannot grow";
    return cert;
  }
  const double threshold = std::min(cert.threshold_A, cert.threshold_C);
  if (!(delta < threshold)) {
    cert.verdict = BlowupVerdict::not_certified;
    cert.detail = "delta outside the certified range (not a boundedness proof)";
    return cert;
  }
  if (!(cert.h0 > 0.0)) {
    cert.verdict = BlowupVerdict::not_certified;
    cert.detail = "h(u0, v0) <= 0";
    return cert;
  }
  if (!(cert.epsilon > 0.0) || !(delta + cert.epsilon < 1.0)) {
    cert.verdict = BlowupVerdict::not_certified;
    cert.detail = "no feasible epsilon with delta + epsilon < 1";
    return cert;
  }
  cert.verdict = BlowupVerdict::certified_blow_up;
  cert.detail = (cert.sign_u_minus_v > 0 ? "u" : "v") +
                std::string(" diverges; difference grows at rate >= epsilon");
  return cert;
}

std::string to_json_string(const GronwallReport& report) {
  nlohmann::ordered_json j = {
      {"ok", report.ok},
      {"epsilon", report.epsilon},
      {"min_slack", report.min_slack},
      {"h_positive_throughout", report.h_positive_throughout}};
  if (report.first_violation_t) {
    j["first_violation_t"] = *report.first_violation_t;
  } else {
    j["first_violation_t"] = nullptr;
  }
  return j.dump(2);
}

GronwallReport verify_gronwall(const OdeResult& trajectory,
                               const BlowupCertificate& cert, double epsilon) {
  GronwallReport report;
  report.epsilon = epsilon;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.h_positive_throughout = true;
  if (trajectory.states.empty() || cert.sign_u_minus_v == 0) {
    report.ok = false;
    report.min_slack = 0.0;
    return report;
  }
  const double u0 = trajectory.states.front()[0];
  const double v0 = trajectory.states.front()[1];
  const double d0 = std::abs(u0 - v0);
  const int sign = cert.sign_u_minus_v;

  bool ok = true;
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const double t = trajectory.ts[k];
    const double u = trajectory.states[k][0];
    const double v = trajectory.states[k][1];
    const double diff = sign * (u - v);
    const double target = d0 * std::exp(epsilon * t);
    const double slack = diff - target;
    report.min_slack = std::min(report.min_slack, slack);
    if (slack < -1e-8 && ok) {
      ok = false;
      report.first_violation_t = t;
    }
    if (!(blowup_h(cert.delta, u, v) > 0.0)) {
      report.h_positive_throughout = false;
      if (ok) {
        ok = false;
        report.first_violation_t = t;
      }
    }
  }
  report.ok = ok;
  return report;
}

}  // namespace rdbound
