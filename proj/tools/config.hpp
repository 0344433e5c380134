#ifndef RDBOUND_TOOLS_CONFIG_HPP
#define RDBOUND_TOOLS_CONFIG_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdbound/llf.hpp"
#include "rdbound/sim.hpp"
#include "rdbound/system.hpp"
#include "rdbound/term_function.hpp"

namespace rdbound::cli {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat key = value run configuration with dotted sections. Reaction and
/// candidate functions are given as term tables, one "coef,p,q,r,s" line
/// per term. Unknown keys are rejected; emit -> parse round-trips exactly.
struct RunConfig {
  std::string example;  // schnakenberg | mutualism | weinberger | "" (custom)
  std::optional<int> n;
  std::optional<double> gamma;
  std::optional<double> d;
  std::map<std::string, double> params;  // system.param.<name>
  std::vector<double> u0, v0;            // empty: example defaults
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<double> monitor_every;
  std::optional<bool> adaptive_halving;
  double verify_extent = 0.0;
  double verify_spacing = 0.01;
  double verify_v_cap = 1e6;
  std::vector<RationalTerm> f_terms, g_terms, llf_terms;
  std::string out_dir = "out";

  bool operator==(const RunConfig& o) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);

/// A config resolved against the example catalog defaults into runnable
/// pieces. The LLF candidate is present for examples that ship one
/// (schnakenberg's companion function, weinberger's global Lyapunov
/// function) or when llf.term lines were given.
struct ResolvedRun {
  std::string example;
  DiscretizedSystem system;
  std::optional<RationalTermFunction> llf;
  IntegratorSettings integrator;
  VerifySettings verify;
  std::string out_dir;
};

ResolvedRun resolve(const RunConfig& config);

}  // namespace rdbound::cli

#endif  // RDBOUND_TOOLS_CONFIG_HPP
