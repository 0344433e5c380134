#ifndef RDBOUND_TERM_FUNCTION_HPP
#define RDBOUND_TERM_FUNCTION_HPP

#include <map>
#include <optional>
#include <vector>

namespace rdbound {

/// One term of the rational grammar:
///
///   coef * u^u_pow * v^v_pow / ((u+1)^u_den * (v+1)^v_den)
///
/// All exponents are nonnegative, so every term (and every finite sum of
/// terms) is finite on the closed nonnegative quadrant.
struct RationalTerm {
  double coef = 0.0;
  int u_pow = 0;
  int v_pow = 0;
  int u_den = 0;
  int v_den = 0;
};

/// Sum of rational terms. This family is closed under +, *, d/du and d/dv,
/// which keeps derivatives and u->inf / v->inf limits exact: no numerical
/// differentiation or limit estimation is ever needed.
class RationalTermFunction {
 public:
  RationalTermFunction() = default;
  explicit RationalTermFunction(std::vector<RationalTerm> terms);

  static RationalTermFunction constant(double value);

  double eval(double u, double v) const;
  double operator()(double u, double v) const { return eval(u, v); }
  /// Same sum with every coefficient replaced by its absolute value; used as
  /// a cancellation scale when deciding whether an evaluation is "zero".
  double eval_abs(double u, double v) const;

  RationalTermFunction du() const;
  RationalTermFunction dv() const;

  RationalTermFunction operator+(const RationalTermFunction& o) const;
  RationalTermFunction operator-(const RationalTermFunction& o) const;
  RationalTermFunction operator*(const RationalTermFunction& o) const;
  RationalTermFunction scaled(double factor) const;

  /// Substitute a numeric u (v), folding its powers into the coefficients.
  /// The result depends on the remaining variable only.
  RationalTermFunction fix_u(double u) const;
  RationalTermFunction fix_v(double v) const;

  const std::vector<RationalTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Merge terms with identical exponent tuples and drop zero coefficients.
  void normalize(double drop_tol = 0.0);

  /// Exact zero test: clear denominators, expand, and compare the resulting
  /// bivariate polynomial coefficients against a cancellation-aware floor.
  /// Catches hidden cancellations such as v/(v+1) + 1/(v+1) - 1.
  bool identically_zero(double rel_tol = 1e-9) const;
  bool depends_on_u(double rel_tol = 1e-9) const;
  bool depends_on_v(double rel_tol = 1e-9) const;
  /// True when no term mixes a u-part with a v-part (W = w1(u) + w2(v)).
  bool additively_separable() const;

  /// Exact finite Laurent decomposition in w = 1/(u+1):
  ///   f(u,v) = sum_j c_j(v) * (u+1)^(-j)
  /// Keys may be negative (growth in u). Holds for all u, not just
  /// asymptotically, since u = (1-w)/w turns each term into a polynomial
  /// in w times a function of v.
  std::map<int, RationalTermFunction> laurent_u() const;
  std::map<int, RationalTermFunction> laurent_v() const;

  /// Polynomial view used by grid sweeps: f(u,v) * (u+1)^den_pow is a
  /// polynomial in u whose coefficients are functions of v.
  struct UPoly {
    int den_pow = 0;
    std::vector<RationalTermFunction> coeff;  // coeff[k] multiplies u^k
  };
  UPoly u_poly() const;
  UPoly v_poly() const;  // mirrored: coefficients are functions of u

 private:
  std::vector<RationalTerm> terms_;
};

/// Sign and growth order of f(u, v) as u -> inf at fixed v:
///   f ~ leading * u^degree   (degree 0: f -> leading; all-cancelled: sign 0).
struct TailBehavior {
  int sign = 0;        // -1, 0, +1
  int degree = 0;      // growth order in u (negative: decays to 0)
  double leading = 0;  // aggregated leading coefficient at that order
};
TailBehavior tail_u(const RationalTermFunction& f, double v,
                    double rel_tol = 1e-11);
TailBehavior tail_v(const RationalTermFunction& f, double u,
                    double rel_tol = 1e-11);

/// Pointwise limit of f as u -> inf at fixed v.
struct ScalarLimit {
  bool finite = true;
  double value = 0.0;  // meaningful when finite
  int sign = 0;        // +-1 when infinite
};
ScalarLimit limit_u(const RationalTermFunction& f, double v,
                    double rel_tol = 1e-11);
ScalarLimit limit_v(const RationalTermFunction& f, double u,
                    double rel_tol = 1e-11);

/// lim_{u->inf} f(u, .) as a symbolic function of v, when finite everywhere
/// (every negative Laurent power is identically zero). nullopt otherwise.
std::optional<RationalTermFunction> limit_u_function(
    const RationalTermFunction& f, double rel_tol = 1e-9);
std::optional<RationalTermFunction> limit_v_function(
    const RationalTermFunction& f, double rel_tol = 1e-9);

/// Leading behavior of f(t*du, t*dv) as t -> inf along a quadrant ray
/// (du, dv >= 0, not both zero). Per-term degrees are exact; aggregation of
/// same-degree leading coefficients is numeric, so a cancelled top degree is
/// flagged ambiguous rather than trusted.
struct RayGrowth {
  int degree = 0;
  double leading = 0.0;
  bool ambiguous = false;
};
RayGrowth ray_growth(const RationalTermFunction& f, double du, double dv,
                     double rel_tol = 1e-9);

}  // namespace rdbound

#endif  // RDBOUND_TERM_FUNCTION_HPP
