#include "rdbound/system.hpp"

#include <cmath>

#include "rdbound/errors.hpp"
#include "rdbound/numerics.hpp"

namespace rdbound {

QuasiPositivityReport verify_quasi_positivity(const ReactionPair& reactions,
                                              double cap, int samples) {
  QuasiPositivityReport report;
  const RationalTermFunction f0 = reactions.f.fix_u(0.0);  // f(0, v)
  const RationalTermFunction g0 = reactions.g.fix_v(0.0);  // g(u, 0)

  auto grid = geometric_grid(1e-6, cap, samples - 1);
  grid.insert(grid.begin(), 0.0);

  for (double v : grid) {
    const double val = f0.eval(0.0, v);
    if (val < -1e-12 * std::max(1.0, f0.eval_abs(0.0, v))) {
      return {false, "f(0,v)", v, val};
    }
  }
  for (double u : grid) {
    const double val = g0.eval(u, 0.0);
    if (val < -1e-12 * std::max(1.0, g0.eval_abs(u, 0.0))) {
      return {false, "g(u,0)", u, val};
    }
  }
  // Exact tail signs beyond the sampled range.
  if (tail_v(f0, 0.0).sign < 0) {
    return {false, "f(0,v) tail", cap, -1.0};
  }
  if (tail_u(g0, 0.0).sign < 0) {
    return {false, "g(u,0) tail", cap, -1.0};
  }
  return report;
}

DiscretizedSystem::DiscretizedSystem(int n, double gamma, double d,
                                     ReactionPair reactions,
                                     std::vector<double> u0,
                                     std::vector<double> v0)
    : n_(n),
      gamma_(gamma),
      d_(d),
      reactions_(std::move(reactions)),
      u0_(std::move(u0)),
      v0_(std::move(v0)) {
  if (n_ < 2) throw InvalidSystemError("compartment count must be >= 2");
  if (!(gamma_ > 0.0)) throw InvalidSystemError("gamma must be positive");
  if (!(d_ > 0.0)) throw InvalidSystemError("d must be positive");
  if (u0_.size() != std::size_t(n_) || v0_.size() != std::size_t(n_)) {
    throw InvalidSystemError("initial data must have length n");
  }
  for (double x : u0_) {
    if (!(x >= 0.0)) throw InvalidSystemError("initial u must be nonnegative");
  }
  for (double x : v0_) {
    if (!(x >= 0.0)) throw InvalidSystemError("initial v must be nonnegative");
  }
}

double forward_diff(std::span<const double> w, std::size_t i) {
  if (i + 1 >= w.size()) throw IndexError("forward_diff: index out of range");
  return w[i + 1] - w[i];
}

double backward_diff(std::span<const double> w, std::size_t i) {
  if (i == 0 || i >= w.size()) {
    throw IndexError("backward_diff: index out of range");
  }
  return w[i] - w[i - 1];
}

std::vector<double> apply_diffusion(std::span<const double> w) {
  const std::size_t n = w.size();
  if (n < 2) throw InvalidSystemError("apply_diffusion: need length >= 2");
  std::vector<double> out(n);
  out[0] = w[1] - w[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (w[i - 1] - 2.0 * w[i]) + w[i + 1];
  }
  out[n - 1] = w[n - 2] - w[n - 1];
  return out;
}

Derivatives rhs(const DiscretizedSystem& sys, const StateVector& s) {
  const int n = sys.n();
  const double inv_h2 = sys.inv_h2();
  const double gamma = sys.gamma();
  const double d = sys.d();
  const auto Du = apply_diffusion(s.u);
  const auto Dv = apply_diffusion(s.v);

  Derivatives out;
  out.du.resize(n);
  out.dv.resize(n);
  for (int i = 0; i < n; ++i) {
    const double fu = sys.reactions().f.eval(s.u[i], s.v[i]);
    const double gv = sys.reactions().g.eval(s.u[i], s.v[i]);
    out.du[i] = gamma * fu + inv_h2 * Du[i];
    out.dv[i] = gamma * gv + d * inv_h2 * Dv[i];
    if (!std::isfinite(out.du[i]) || !std::isfinite(out.dv[i])) {
      throw NumericOverflowError("non-finite right-hand side", i);
    }
  }
  return out;
}

}  // namespace rdbound
