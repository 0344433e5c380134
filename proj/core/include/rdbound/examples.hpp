#ifndef RDBOUND_EXAMPLES_HPP
#define RDBOUND_EXAMPLES_HPP

#include "rdbound/system.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound::examples {

/// Activator-depletion kinetics f = a - u + u^2 v, g = b - u^2 v. Bounded
/// with diffusion; the companion candidate W = u + 2v + c/(u+1) + 1/(v+1)
/// verifies as an LLF once c exceeds max{(2a+4b)/a, 2a+4b}.
struct Schnakenberg {
  double a = 0.1;
  double b = 1.0;
  ReactionPair reactions() const;
  double llf_c() const;  // max{(2a+4b)/a, 2a+4b} + 1
  RationalTermFunction llf() const;
};

/// Two mutualistic populations: f = u(a1 - b1 u + c1 v),
/// g = v(a2 + b2 u - c2 v). Strong mutualism (b2 c1 > b1 c2) admits no LLF
/// and the diffusive system blows up.
struct Mutualism {
  double a1 = -1.0, a2 = 1.0;
  double b1 = 1.0, b2 = 2.0;
  double c1 = 1.0, c2 = 1.0;
  ReactionPair reactions() const;
};

/// Cross-symmetric kinetics f = u v (u - v)(u + 1) - delta u and the
/// mirrored g. Globally stable without diffusion (V = (u+1)^2 (v+1)^2),
/// yet the diffusive system diverges.
struct Weinberger {
  double delta = 10.0;
  ReactionPair reactions() const;
  static RationalTermFunction global_lyapunov();
};

/// Reference two-compartment systems with the standard parameter sets.
/// For n > 2 the two initial points are linearly interpolated across
/// compartments.
DiscretizedSystem schnakenberg_system(int n = 2, double gamma = 150.0,
                                      double d = 30.0,
                                      const Schnakenberg& p = {});
DiscretizedSystem mutualism_system(int n = 2, double gamma = 1.0,
                                   double d = 1.0, const Mutualism& p = {});
DiscretizedSystem weinberger_system(int n = 2, double gamma = 1.0,
                                    double d = 1.0, const Weinberger& p = {});

}  // namespace rdbound::examples

#endif  // RDBOUND_EXAMPLES_HPP
