#include "rdbound/term_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "rdbound/numerics.hpp"

namespace rdbound {

namespace {

// Packed exponent key for merging like terms.
std::uint64_t term_key(const RationalTerm& t) {
  return (std::uint64_t(std::uint16_t(t.u_pow)) << 48) |
         (std::uint64_t(std::uint16_t(t.v_pow)) << 32) |
         (std::uint64_t(std::uint16_t(t.u_den)) << 16) |
         std::uint64_t(std::uint16_t(t.v_den));
}

void check_term(const RationalTerm& t) {
  if (t.u_pow < 0 || t.v_pow < 0 || t.u_den < 0 || t.v_den < 0) {
    throw std::invalid_argument("RationalTerm: exponents must be nonnegative");
  }
}

// Swap the roles of u and v in every term.
std::vector<RationalTerm> transposed(const std::vector<RationalTerm>& in) {
  std::vector<RationalTerm> out;
  out.reserve(in.size());
  for (const auto& t : in) {
    out.push_back({t.coef, t.v_pow, t.u_pow, t.v_den, t.u_den});
  }
  return out;
}

}  // namespace

RationalTermFunction::RationalTermFunction(std::vector<RationalTerm> terms)
    : terms_(std::move(terms)) {
  for (const auto& t : terms_) check_term(t);
}

RationalTermFunction RationalTermFunction::constant(double value) {
  if (value == 0.0) return RationalTermFunction{};
  return RationalTermFunction{{{value, 0, 0, 0, 0}}};
}

double RationalTermFunction::eval(double u, double v) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    sum += t.coef * pow_int(u, t.u_pow) * pow_int(v, t.v_pow) /
           (pow_int(u + 1.0, t.u_den) * pow_int(v + 1.0, t.v_den));
  }
  return sum;
}

double RationalTermFunction::eval_abs(double u, double v) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    sum += std::abs(t.coef) * pow_int(std::abs(u), t.u_pow) *
           pow_int(std::abs(v), t.v_pow) /
           (pow_int(std::abs(u) + 1.0, t.u_den) *
            pow_int(std::abs(v) + 1.0, t.v_den));
  }
  return sum;
}

RationalTermFunction RationalTermFunction::du() const {
  // d/du [u^p (u+1)^-r] = p u^(p-1) (u+1)^-r - r u^p (u+1)^-(r+1)
  std::vector<RationalTerm> out;
  out.reserve(2 * terms_.size());
  for (const auto& t : terms_) {
    if (t.u_pow > 0) {
      out.push_back({t.coef * t.u_pow, t.u_pow - 1, t.v_pow, t.u_den, t.v_den});
    }
    if (t.u_den > 0) {
      out.push_back(
          {-t.coef * t.u_den, t.u_pow, t.v_pow, t.u_den + 1, t.v_den});
    }
  }
  RationalTermFunction f{std::move(out)};
  f.normalize();
  return f;
}

RationalTermFunction RationalTermFunction::dv() const {
  std::vector<RationalTerm> out;
  out.reserve(2 * terms_.size());
  for (const auto& t : terms_) {
    if (t.v_pow > 0) {
      out.push_back({t.coef * t.v_pow, t.u_pow, t.v_pow - 1, t.u_den, t.v_den});
    }
    if (t.v_den > 0) {
      out.push_back(
          {-t.coef * t.v_den, t.u_pow, t.v_pow, t.u_den, t.v_den + 1});
    }
  }
  RationalTermFunction f{std::move(out)};
  f.normalize();
  return f;
}

RationalTermFunction RationalTermFunction::operator+(
    const RationalTermFunction& o) const {
  std::vector<RationalTerm> out = terms_;
  out.insert(out.end(), o.terms_.begin(), o.terms_.end());
  RationalTermFunction f{std::move(out)};
  f.normalize();
  return f;
}

RationalTermFunction RationalTermFunction::operator-(
    const RationalTermFunction& o) const {
  return *this + o.scaled(-1.0);
}

RationalTermFunction RationalTermFunction::operator*(
    const RationalTermFunction& o) const {
  std::vector<RationalTerm> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      out.push_back({a.coef * b.coef, a.u_pow + b.u_pow, a.v_pow + b.v_pow,
                     a.u_den + b.u_den, a.v_den + b.v_den});
    }
  }
  RationalTermFunction f{std::move(out)};
  f.normalize();
  return f;
}

RationalTermFunction RationalTermFunction::scaled(double factor) const {
  std::vector<RationalTerm> out = terms_;
  for (auto& t : out) t.coef *= factor;
  return RationalTermFunction{std::move(out)};
}

RationalTermFunction RationalTermFunction::fix_u(double u) const {
  std::vector<RationalTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const double c =
        t.coef * pow_int(u, t.u_pow) / pow_int(u + 1.0, t.u_den);
    out.push_back({c, 0, t.v_pow, 0, t.v_den});
  }
  RationalTermFunction f{std::move(out)};
  f.normalize();
  return f;
}

RationalTermFunction RationalTermFunction::fix_v(double v) const {
  std::vector<RationalTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const double c =
        t.coef * pow_int(v, t.v_pow) / pow_int(v + 1.0, t.v_den);
    out.push_back({c, t.u_pow, 0, t.u_den, 0});
  }
  RationalTermFunction f{std::move(out)};
  f.normalize();
  return f;
}

void RationalTermFunction::normalize(double drop_tol) {
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<RationalTerm> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    const auto key = term_key(t);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, merged.size());
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  std::erase_if(merged, [drop_tol](const RationalTerm& t) {
    return t.coef == 0.0 || std::abs(t.coef) <= drop_tol;
  });
  // Canonical order keeps downstream expansions deterministic.
  std::sort(merged.begin(), merged.end(),
            [](const RationalTerm& a, const RationalTerm& b) {
              return std::tuple(a.u_pow, a.v_pow, a.u_den, a.v_den) <
                     std::tuple(b.u_pow, b.v_pow, b.u_den, b.v_den);
            });
  terms_ = std::move(merged);
}

bool RationalTermFunction::identically_zero(double rel_tol) const {
  if (terms_.empty()) return true;
  int R = 0, S = 0;
  for (const auto& t : terms_) {
    R = std::max(R, t.u_den);
    S = std::max(S, t.v_den);
  }
  // f * (u+1)^R (v+1)^S is a polynomial; expand and compare against the
  // sum of absolute contributions per coefficient.
  int max_u = 0, max_v = 0;
  for (const auto& t : terms_) {
    max_u = std::max(max_u, t.u_pow + (R - t.u_den));
    max_v = std::max(max_v, t.v_pow + (S - t.v_den));
  }
  std::vector<double> poly(std::size_t(max_u + 1) * (max_v + 1), 0.0);
  std::vector<double> scale(poly.size(), 0.0);
  const auto at = [max_v](int i, int j) {
    return std::size_t(i) * (max_v + 1) + j;
  };
  for (const auto& t : terms_) {
    const int ru = R - t.u_den;
    const int sv = S - t.v_den;
    for (int i = 0; i <= ru; ++i) {
      const double bu = binomial(ru, i);
      for (int j = 0; j <= sv; ++j) {
        const double c = t.coef * bu * binomial(sv, j);
        poly[at(t.u_pow + i, t.v_pow + j)] += c;
        scale[at(t.u_pow + i, t.v_pow + j)] += std::abs(c);
      }
    }
  }
  for (std::size_t k = 0; k < poly.size(); ++k) {
    if (std::abs(poly[k]) > rel_tol * std::max(scale[k], 1e-300)) return false;
  }
  return true;
}

bool RationalTermFunction::depends_on_u(double rel_tol) const {
  // f is independent of u exactly when f - f(0, .) vanishes identically.
  return !(*this - this->fix_u(0.0)).identically_zero(rel_tol);
}

bool RationalTermFunction::depends_on_v(double rel_tol) const {
  return !(*this - this->fix_v(0.0)).identically_zero(rel_tol);
}

bool RationalTermFunction::additively_separable() const {
  for (const auto& t : terms_) {
    const bool has_u = t.u_pow > 0 || t.u_den > 0;
    const bool has_v = t.v_pow > 0 || t.v_den > 0;
    if (has_u && has_v) return false;
  }
  return true;
}

std::map<int, RationalTermFunction> RationalTermFunction::laurent_u() const {
  // With w = 1/(u+1): u = (1-w)/w, so u^p (u+1)^-r = (1-w)^p w^(r-p).
  // Expanding (1-w)^p gives exact powers w^(r-p+k), k = 0..p.
  std::map<int, std::vector<RationalTerm>> parts;
  for (const auto& t : terms_) {
    for (int k = 0; k <= t.u_pow; ++k) {
      const int j = t.u_den - t.u_pow + k;
      const double c = t.coef * binomial(t.u_pow, k) * ((k % 2) ? -1.0 : 1.0);
      parts[j].push_back({c, 0, t.v_pow, 0, t.v_den});
    }
  }
  std::map<int, RationalTermFunction> out;
  for (auto& [j, terms] : parts) {
    RationalTermFunction f{std::move(terms)};
    f.normalize();
    out.emplace(j, std::move(f));
  }
  return out;
}

std::map<int, RationalTermFunction> RationalTermFunction::laurent_v() const {
  RationalTermFunction t{transposed(terms_)};
  auto swapped = t.laurent_u();
  std::map<int, RationalTermFunction> out;
  for (auto& [j, f] : swapped) {
    out.emplace(j, RationalTermFunction{transposed(f.terms())});
  }
  return out;
}

RationalTermFunction::UPoly RationalTermFunction::u_poly() const {
  int R = 0;
  for (const auto& t : terms_) R = std::max(R, t.u_den);
  int max_deg = 0;
  for (const auto& t : terms_) {
    max_deg = std::max(max_deg, t.u_pow + (R - t.u_den));
  }
  std::vector<std::vector<RationalTerm>> parts(max_deg + 1);
  for (const auto& t : terms_) {
    const int e = R - t.u_den;
    for (int k = 0; k <= e; ++k) {
      parts[t.u_pow + k].push_back(
          {t.coef * binomial(e, k), 0, t.v_pow, 0, t.v_den});
    }
  }
  UPoly poly;
  poly.den_pow = R;
  poly.coeff.reserve(parts.size());
  for (auto& p : parts) {
    RationalTermFunction f{std::move(p)};
    f.normalize();
    poly.coeff.push_back(std::move(f));
  }
  return poly;
}

RationalTermFunction::UPoly RationalTermFunction::v_poly() const {
  RationalTermFunction t{transposed(terms_)};
  UPoly poly = t.u_poly();
  for (auto& c : poly.coeff) {
    c = RationalTermFunction{transposed(c.terms())};
  }
  return poly;
}

namespace {

ScalarLimit limit_from_tail(const TailBehavior& tail) {
  if (tail.degree > 0) return {false, 0.0, tail.sign};
  if (tail.degree == 0) return {true, tail.leading, 0};
  return {true, 0.0, 0};
}

}  // namespace

TailBehavior tail_u(const RationalTermFunction& f, double v, double rel_tol) {
  // Coefficients of laurent_u depend on v only; evaluate at (., v).
  auto laurent = f.laurent_u();
  for (const auto& [j, coeff] : laurent) {
    const double val = coeff.eval(0.0, v);
    const double scale = coeff.eval_abs(0.0, v);
    if (std::abs(val) > rel_tol * std::max(scale, 1e-300)) {
      return {val > 0 ? 1 : -1, -j, val};
    }
  }
  return {0, 0, 0.0};
}

TailBehavior tail_v(const RationalTermFunction& f, double u, double rel_tol) {
  auto laurent = f.laurent_v();
  for (const auto& [j, coeff] : laurent) {
    const double val = coeff.eval(u, 0.0);
    const double scale = coeff.eval_abs(u, 0.0);
    if (std::abs(val) > rel_tol * std::max(scale, 1e-300)) {
      return {val > 0 ? 1 : -1, -j, val};
    }
  }
  return {0, 0, 0.0};
}

ScalarLimit limit_u(const RationalTermFunction& f, double v, double rel_tol) {
  return limit_from_tail(tail_u(f, v, rel_tol));
}

ScalarLimit limit_v(const RationalTermFunction& f, double u, double rel_tol) {
  return limit_from_tail(tail_v(f, u, rel_tol));
}

std::optional<RationalTermFunction> limit_u_function(
    const RationalTermFunction& f, double rel_tol) {
  auto laurent = f.laurent_u();
  for (const auto& [j, coeff] : laurent) {
    if (j >= 0) break;
    if (!coeff.identically_zero(rel_tol)) return std::nullopt;
  }
  auto it = laurent.find(0);
  if (it == laurent.end()) return RationalTermFunction{};
  return it->second;
}

std::optional<RationalTermFunction> limit_v_function(
    const RationalTermFunction& f, double rel_tol) {
  auto laurent = f.laurent_v();
  for (const auto& [j, coeff] : laurent) {
    if (j >= 0) break;
    if (!coeff.identically_zero(rel_tol)) return std::nullopt;
  }
  auto it = laurent.find(0);
  if (it == laurent.end()) return RationalTermFunction{};
  return it->second;
}

RayGrowth ray_growth(const RationalTermFunction& f, double du, double dv,
                     double rel_tol) {
  if (du < 0.0 || dv < 0.0 || (du == 0.0 && dv == 0.0)) {
    throw std::invalid_argument("ray_growth: direction must be in the quadrant");
  }
  // Per-term exact degree along (t du, t dv); terms with a positive power of
  // a zero component vanish identically.
  std::map<int, std::pair<double, double>> agg;  // degree -> (sum, abs-sum)
  for (const auto& t : f.terms()) {
    if (du == 0.0 && t.u_pow > 0) continue;
    if (dv == 0.0 && t.v_pow > 0) continue;
    int deg = 0;
    double lead = t.coef;
    if (du > 0.0) {
      deg += t.u_pow - t.u_den;
      lead *= pow_int(du, t.u_pow) / pow_int(du, t.u_den);
    }
    if (dv > 0.0) {
      deg += t.v_pow - t.v_den;
      lead *= pow_int(dv, t.v_pow) / pow_int(dv, t.v_den);
    }
    auto& [s, a] = agg[deg];
    s += lead;
    a += std::abs(lead);
  }
  RayGrowth out;
  bool ambiguous = false;
  for (auto it = agg.rbegin(); it != agg.rend(); ++it) {
    const auto [sum, abs_sum] = it->second;
    if (std::abs(sum) > rel_tol * std::max(abs_sum, 1e-300)) {
      out.degree = it->first;
      out.leading = sum;
      out.ambiguous = ambiguous;
      return out;
    }
    if (abs_sum > 0.0) ambiguous = true;  // a cancelled order was skipped
  }
  out.degree = 0;
  out.leading = 0.0;
  out.ambiguous = ambiguous;
  return out;
}

}  // namespace rdbound
