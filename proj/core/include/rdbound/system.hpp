#ifndef RDBOUND_SYSTEM_HPP
#define RDBOUND_SYSTEM_HPP

#include <span>
#include <string>
#include <vector>

#include "rdbound/term_function.hpp"

namespace rdbound {

/// The reaction pair (f, g) of the two-species kinetics.
struct ReactionPair {
  RationalTermFunction f;
  RationalTermFunction g;
};

/// Quasi-positivity check f(0,v) >= 0 and g(u,0) >= 0: geometric samples on
/// [0, cap] plus the exact tail sign of the restricted function. Required for
/// nonnegativity of solutions.
struct QuasiPositivityReport {
  bool ok = true;
  std::string which;     // "f(0,v)" or "g(u,0)" when failed
  double arg = 0.0;      // offending sample
  double value = 0.0;    // offending value
};
QuasiPositivityReport verify_quasi_positivity(const ReactionPair& reactions,
                                              double cap = 1e6,
                                              int samples = 10000);

/// Method-of-lines compartment model on [0,1]: n compartments of width
/// h = 1/n, kinetics scaled by gamma, second species diffusing d times
/// faster. h is always derived from n, never stored.
class DiscretizedSystem {
 public:
  DiscretizedSystem(int n, double gamma, double d, ReactionPair reactions,
                    std::vector<double> u0, std::vector<double> v0);

  int n() const { return n_; }
  double h() const { return 1.0 / n_; }
  /// 1/h^2 = n^2, computed in exact integer arithmetic.
  double inv_h2() const { return static_cast<double>(n_) * n_; }
  double gamma() const { return gamma_; }
  double d() const { return d_; }
  const ReactionPair& reactions() const { return reactions_; }
  const std::vector<double>& u0() const { return u0_; }
  const std::vector<double>& v0() const { return v0_; }

 private:
  int n_;
  double gamma_;
  double d_;
  ReactionPair reactions_;
  std::vector<double> u0_, v0_;
};

struct StateVector {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;
};

/// Forward difference w[i+1] - w[i], valid for i in [0, n-2] (0-based).
double forward_diff(std::span<const double> w, std::size_t i);
/// Backward difference w[i] - w[i-1], valid for i in [1, n-1] (0-based).
double backward_diff(std::span<const double> w, std::size_t i);

/// Neumann diffusion operator: first row w2-w1, interior rows
/// w_{i-1} - 2 w_i + w_{i+1}, last row w_{n-1} - w_n. Row sums telescope
/// to zero, so total mass is conserved.
std::vector<double> apply_diffusion(std::span<const double> w);

struct Derivatives {
  std::vector<double> du;
  std::vector<double> dv;
};

/// Right-hand side of the compartment ODE:
///   du_i/dt = gamma f(u_i, v_i) + n^2 (D u)_i
///   dv_i/dt = gamma g(u_i, v_i) + d n^2 (D v)_i
/// Throws NumericOverflowError (with the compartment index) on non-finite
/// evaluations.
Derivatives rhs(const DiscretizedSystem& sys, const StateVector& s);

}  // namespace rdbound

#endif  // RDBOUND_SYSTEM_HPP
