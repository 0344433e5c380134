#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rdbound/examples.hpp"

namespace rdbound::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("invalid number '" + t + "' for key '" + key + "'");
  }
  return value;
}

int parse_int(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  int value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ConfigError("invalid integer '" + t + "' for key '" + key + "'");
  }
  return value;
}

bool parse_bool(const std::string& s, const std::string& key) {
  const std::string t = trim(s);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("invalid boolean '" + t + "' for key '" + key + "'");
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (in >> item) {
    if (!item.empty() && item.back() == ',') item.pop_back();
    if (item.empty()) continue;
    out.push_back(parse_double(item, key));
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

RationalTerm parse_term(const std::string& s, const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  if (parts.size() != 5) {
    throw ConfigError("term for key '" + key +
                      "' must be 'coef,p,q,r,s', got '" + trim(s) + "'");
  }
  RationalTerm t;
  t.coef = parse_double(parts[0], key);
  t.u_pow = parse_int(parts[1], key);
  t.v_pow = parse_int(parts[2], key);
  t.u_den = parse_int(parts[3], key);
  t.v_den = parse_int(parts[4], key);
  if (t.u_pow < 0 || t.v_pow < 0 || t.u_den < 0 || t.v_den < 0) {
    throw ConfigError("negative exponent in term for key '" + key + "'");
  }
  return t;
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  auto terms_eq = [](const std::vector<RationalTerm>& a,
                     const std::vector<RationalTerm>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].coef != b[i].coef || a[i].u_pow != b[i].u_pow ||
          a[i].v_pow != b[i].v_pow || a[i].u_den != b[i].u_den ||
          a[i].v_den != b[i].v_den) {
        return false;
      }
    }
    return true;
  };
  return example == o.example && n == o.n && gamma == o.gamma && d == o.d &&
         params == o.params && u0 == o.u0 && v0 == o.v0 && t_end == o.t_end &&
         dt == o.dt && monitor_every == o.monitor_every &&
         adaptive_halving == o.adaptive_halving &&
         verify_extent == o.verify_extent &&
         verify_spacing == o.verify_spacing && verify_v_cap == o.verify_v_cap &&
         terms_eq(f_terms, o.f_terms) && terms_eq(g_terms, o.g_terms) &&
         terms_eq(llf_terms, o.llf_terms) && out_dir == o.out_dir;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "system.example") {
      cfg.example = value;
    } else if (key == "system.n") {
      cfg.n = parse_int(value, key);
    } else if (key == "system.gamma") {
      cfg.gamma = parse_double(value, key);
    } else if (key == "system.d") {
      cfg.d = parse_double(value, key);
    } else if (key.rfind("system.param.", 0) == 0) {
      const std::string name = key.substr(std::string("system.param.").size());
      if (name.empty()) throw ConfigError("empty parameter name in '" + key + "'");
      cfg.params[name] = parse_double(value, key);
    } else if (key == "init.u") {
      cfg.u0 = parse_list(value, key);
    } else if (key == "init.v") {
      cfg.v0 = parse_list(value, key);
    } else if (key == "reaction.f.term") {
      cfg.f_terms.push_back(parse_term(value, key));
    } else if (key == "reaction.g.term") {
      cfg.g_terms.push_back(parse_term(value, key));
    } else if (key == "llf.term") {
      cfg.llf_terms.push_back(parse_term(value, key));
    } else if (key == "integrator.t_end") {
      cfg.t_end = parse_double(value, key);
    } else if (key == "integrator.dt") {
      cfg.dt = parse_double(value, key);
    } else if (key == "integrator.monitor_every") {
      cfg.monitor_every = parse_double(value, key);
    } else if (key == "integrator.adaptive_halving") {
      cfg.adaptive_halving = parse_bool(value, key);
    } else if (key == "verify.extent") {
      cfg.verify_extent = parse_double(value, key);
    } else if (key == "verify.spacing") {
      cfg.verify_spacing = parse_double(value, key);
    } else if (key == "verify.v_cap") {
      cfg.verify_v_cap = parse_double(value, key);
    } else if (key == "output.dir") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto term_line = [&](const char* key, const RationalTerm& t) {
    out << key << " = " << format_double(t.coef) << "," << t.u_pow << ","
        << t.v_pow << "," << t.u_den << "," << t.v_den << "\n";
  };
  if (!cfg.example.empty()) out << "system.example = " << cfg.example << "\n";
  if (cfg.n) out << "system.n = " << *cfg.n << "\n";
  if (cfg.gamma) out << "system.gamma = " << format_double(*cfg.gamma) << "\n";
  if (cfg.d) out << "system.d = " << format_double(*cfg.d) << "\n";
  for (const auto& [name, value] : cfg.params) {
    out << "system.param." << name << " = " << format_double(value) << "\n";
  }
  auto list_line = [&](const char* key, const std::vector<double>& xs) {
    out << key << " =";
    for (double x : xs) out << " " << format_double(x);
    out << "\n";
  };
  if (!cfg.u0.empty()) list_line("init.u", cfg.u0);
  if (!cfg.v0.empty()) list_line("init.v", cfg.v0);
  for (const auto& t : cfg.f_terms) term_line("reaction.f.term", t);
  for (const auto& t : cfg.g_terms) term_line("reaction.g.term", t);
  for (const auto& t : cfg.llf_terms) term_line("llf.term", t);
  if (cfg.t_end) out << "integrator.t_end = " << format_double(*cfg.t_end) << "\n";
  if (cfg.dt) out << "integrator.dt = " << format_double(*cfg.dt) << "\n";
  if (cfg.monitor_every) {
    out << "integrator.monitor_every = " << format_double(*cfg.monitor_every)
        << "\n";
  }
  if (cfg.adaptive_halving) {
    out << "integrator.adaptive_halving = "
        << (*cfg.adaptive_halving ? "true" : "false") << "\n";
  }
  out << "verify.extent = " << format_double(cfg.verify_extent) << "\n";
  out << "verify.spacing = " << format_double(cfg.verify_spacing) << "\n";
  out << "verify.v_cap = " << format_double(cfg.verify_v_cap) << "\n";
  out << "output.dir = " << cfg.out_dir << "\n";
  return out.str();
}

namespace {

double param_or(const RunConfig& cfg, const std::string& name,
                double fallback) {
  const auto it = cfg.params.find(name);
  return it == cfg.params.end() ? fallback : it->second;
}

void reject_unknown_params(const RunConfig& cfg,
                           const std::vector<std::string>& known) {
  for (const auto& [name, value] : cfg.params) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == name;
    if (!ok) {
      throw ConfigError("unknown parameter 'system.param." + name +
                        "' for example '" + cfg.example + "'");
    }
  }
}

}  // namespace

ResolvedRun resolve(const RunConfig& cfg) {
  int n = cfg.n.value_or(2);
  double gamma = 1.0, d = 1.0;
  double t_end = 10.0, dt = 1e-4, monitor_every = 1e-2;
  bool halving = false;
  ReactionPair reactions;
  std::optional<RationalTermFunction> llf;
  std::vector<double> u0 = cfg.u0, v0 = cfg.v0;

  auto default_ics = [&](double ul, double vl, double ur, double vr) {
    if (!u0.empty()) return;
    u0.resize(n);
    v0.resize(n);
    for (int i = 0; i < n; ++i) {
      const double s = (n == 1) ? 0.0 : double(i) / (n - 1);
      u0[i] = ul + s * (ur - ul);
      v0[i] = vl + s * (vr - vl);
    }
  };

  if (cfg.example == "schnakenberg") {
    reject_unknown_params(cfg, {"a", "b"});
    examples::Schnakenberg p{param_or(cfg, "a", 0.1), param_or(cfg, "b", 1.0)};
    gamma = 150.0;
    d = 30.0;
    reactions = p.reactions();
    llf = p.llf();
    default_ics(0.8, 0.1, 2.0, 0.7);
  } else if (cfg.example == "mutualism") {
    reject_unknown_params(cfg, {"a1", "a2", "b1", "b2", "c1", "c2"});
    examples::Mutualism p;
    p.a1 = param_or(cfg, "a1", p.a1);
    p.a2 = param_or(cfg, "a2", p.a2);
    p.b1 = param_or(cfg, "b1", p.b1);
    p.b2 = param_or(cfg, "b2", p.b2);
    p.c1 = param_or(cfg, "c1", p.c1);
    p.c2 = param_or(cfg, "c2", p.c2);
    t_end = 30.0;
    reactions = p.reactions();
    default_ics(3.0, 0.001, 0.001, 3.0);
  } else if (cfg.example == "weinberger") {
    reject_unknown_params(cfg, {"delta"});
    examples::Weinberger p{param_or(cfg, "delta", 10.0)};
    halving = true;  // the blow-up stiffens the decaying species
    reactions = p.reactions();
    llf = examples::Weinberger::global_lyapunov();
    default_ics(2.0, 4.0, 4.0, 2.0);
  } else if (cfg.example.empty()) {
    if (cfg.f_terms.empty() || cfg.g_terms.empty()) {
      throw ConfigError(
          "custom systems need reaction.f.term and reaction.g.term lines");
    }
    if (!cfg.gamma || !cfg.d) {
      throw ConfigError("custom systems need system.gamma and system.d");
    }
    if (u0.empty() || v0.empty()) {
      throw ConfigError("custom systems need init.u and init.v");
    }
    reactions = {RationalTermFunction{cfg.f_terms},
                 RationalTermFunction{cfg.g_terms}};
  } else {
    throw ConfigError("unknown example '" + cfg.example +
                      "' (expected schnakenberg, mutualism or weinberger)");
  }

  if (!cfg.llf_terms.empty()) llf = RationalTermFunction{cfg.llf_terms};
  if (cfg.gamma) gamma = *cfg.gamma;
  if (cfg.d) d = *cfg.d;
  if (cfg.t_end) t_end = *cfg.t_end;
  if (cfg.dt) dt = *cfg.dt;
  if (cfg.monitor_every) monitor_every = *cfg.monitor_every;
  if (cfg.adaptive_halving) halving = *cfg.adaptive_halving;

  if (int(u0.size()) != n || int(v0.size()) != n) {
    throw ConfigError("init.u / init.v must have length n = " +
                      std::to_string(n));
  }

  const auto qp = verify_quasi_positivity(reactions);
  if (!qp.ok) {
    throw ConfigError("reactions violate quasi-positivity: " + qp.which +
                      " < 0 at " + format_double(qp.arg));
  }

  IntegratorSettings is;
  is.t_end = t_end;
  is.dt = dt;
  is.monitor_every = monitor_every;
  is.adaptive_halving = halving;
  is.max_halvings = 45;

  VerifySettings vs;
  vs.extent = cfg.verify_extent;
  vs.spacing = cfg.verify_spacing;
  vs.v_cap = cfg.verify_v_cap;

  try {
    return ResolvedRun{cfg.example,
                       DiscretizedSystem(n, gamma, d, reactions, u0, v0),
                       llf, is, vs, cfg.out_dir};
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace rdbound::cli
