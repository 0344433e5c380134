#include "rdbound/examples.hpp"

#include <algorithm>
#include <vector>

namespace rdbound::examples {

namespace {

// Linear interpolation of the two reference compartment states across n
// compartments; n = 2 reproduces them exactly.
std::pair<std::vector<double>, std::vector<double>> interpolate_ics(
    int n, double u_left, double v_left, double u_right, double v_right) {
  std::vector<double> u(n), v(n);
  for (int i = 0; i < n; ++i) {
    const double s = (n == 1) ? 0.0 : double(i) / (n - 1);
    u[i] = u_left + s * (u_right - u_left);
    v[i] = v_left + s * (v_right - v_left);
  }
  return {u, v};
}

}  // namespace

ReactionPair Schnakenberg::reactions() const {
  // f = a - u + u^2 v, g = b - u^2 v
  RationalTermFunction f{{{a, 0, 0, 0, 0}, {-1.0, 1, 0, 0, 0}, {1.0, 2, 1, 0, 0}}};
  RationalTermFunction g{{{b, 0, 0, 0, 0}, {-1.0, 2, 1, 0, 0}}};
  return {f, g};
}

double Schnakenberg::llf_c() const {
  return std::max((2.0 * a + 4.0 * b) / a, 2.0 * a + 4.0 * b) + 1.0;
}

RationalTermFunction Schnakenberg::llf() const {
  // W = u + 2v + c/(u+1) + 1/(v+1)
  const double c = llf_c();
  return RationalTermFunction{{{1.0, 1, 0, 0, 0},
                               {2.0, 0, 1, 0, 0},
                               {c, 0, 0, 1, 0},
                               {1.0, 0, 0, 0, 1}}};
}

ReactionPair Mutualism::reactions() const {
  // f = a1 u - b1 u^2 + c1 u v, g = a2 v + b2 u v - c2 v^2
  RationalTermFunction f{
      {{a1, 1, 0, 0, 0}, {-b1, 2, 0, 0, 0}, {c1, 1, 1, 0, 0}}};
  RationalTermFunction g{
      {{a2, 0, 1, 0, 0}, {b2, 1, 1, 0, 0}, {-c2, 0, 2, 0, 0}}};
  return {f, g};
}

ReactionPair Weinberger::reactions() const {
  // f = u v (u - v)(u + 1) - delta u = u^3 v + u^2 v - u^2 v^2 - u v^2 - delta u
  RationalTermFunction f{{{1.0, 3, 1, 0, 0},
                          {1.0, 2, 1, 0, 0},
                          {-1.0, 2, 2, 0, 0},
                          {-1.0, 1, 2, 0, 0},
                          {-delta, 1, 0, 0, 0}}};
  RationalTermFunction g{{{1.0, 1, 3, 0, 0},
                          {1.0, 1, 2, 0, 0},
                          {-1.0, 2, 2, 0, 0},
                          {-1.0, 2, 1, 0, 0},
                          {-delta, 0, 1, 0, 0}}};
  return {f, g};
}

RationalTermFunction Weinberger::global_lyapunov() {
  // (u+1)^2 (v+1)^2 expanded
  std::vector<RationalTerm> terms;
  const double cu[3] = {1.0, 2.0, 1.0};
  for (int i = 0; i <= 2; ++i) {
    for (int j = 0; j <= 2; ++j) {
      terms.push_back({cu[i] * cu[j], i, j, 0, 0});
    }
  }
  return RationalTermFunction{terms};
}

DiscretizedSystem schnakenberg_system(int n, double gamma, double d,
                                      const Schnakenberg& p) {
  auto [u0, v0] = interpolate_ics(n, 0.8, 0.1, 2.0, 0.7);
  return DiscretizedSystem(n, gamma, d, p.reactions(), u0, v0);
}

DiscretizedSystem mutualism_system(int n, double gamma, double d,
                                   const Mutualism& p) {
  auto [u0, v0] = interpolate_ics(n, 3.0, 0.001, 0.001, 3.0);
  return DiscretizedSystem(n, gamma, d, p.reactions(), u0, v0);
}

DiscretizedSystem weinberger_system(int n, double gamma, double d,
                                    const Weinberger& p) {
  auto [u0, v0] = interpolate_ics(n, 2.0, 4.0, 4.0, 2.0);
  return DiscretizedSystem(n, gamma, d, p.reactions(), u0, v0);
}

}  // namespace rdbound::examples
