// Command-line front end: simulate | verify-llf | bounds | certify.
//
// Exit codes: 0 ok, 1 usage/config error, 2 blow-up detected,
// 3 candidate refuted, 4 verification inconclusive.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "rdbound/bounds.hpp"
#include "rdbound/certificates.hpp"
#include "rdbound/errors.hpp"
#include "rdbound/examples.hpp"
#include "rdbound/llf.hpp"
#include "rdbound/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace rdbound;
using cli::ConfigError;
using cli::ResolvedRun;
using cli::RunConfig;

namespace {

struct CommonOpts {
  std::string example;
  std::string config_path;
  std::string out;
  std::optional<double> t_end, dt, monitor_every;
  std::optional<int> n;
  std::optional<double> gamma, d;
  std::vector<std::string> params;
  std::vector<double> init_u, init_v;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--example", o.example,
                  "Built-in example: schnakenberg | mutualism | weinberger");
  cmd->add_option("--config", o.config_path, "Run configuration file");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--t-end", o.t_end, "Integration end time");
  cmd->add_option("--dt", o.dt, "Fixed integration step");
  cmd->add_option("--monitor-every", o.monitor_every,
                  "Monitor cadence (multiple of dt)");
  cmd->add_option("--n", o.n, "Compartment count");
  cmd->add_option("--gamma", o.gamma, "Kinetic scaling");
  cmd->add_option("--d", o.d, "Relative diffusivity of the second species");
  cmd->add_option("--param", o.params,
                  "Example parameter override, e.g. --param delta=0.1")
      ->take_all();
  cmd->add_option("--init-u", o.init_u, "Initial u per compartment")
      ->delimiter(',');
  cmd->add_option("--init-v", o.init_v, "Initial v per compartment")
      ->delimiter(',');
}

RunConfig build_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = cli::load_config(o.config_path);
  if (!o.example.empty()) cfg.example = o.example;
  if (o.n) cfg.n = o.n;
  if (o.gamma) cfg.gamma = o.gamma;
  if (o.d) cfg.d = o.d;
  if (o.t_end) cfg.t_end = o.t_end;
  if (o.dt) cfg.dt = o.dt;
  if (o.monitor_every) cfg.monitor_every = o.monitor_every;
  if (!o.init_u.empty()) cfg.u0 = o.init_u;
  if (!o.init_v.empty()) cfg.v0 = o.init_v;
  if (!o.out.empty()) cfg.out_dir = o.out;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--param expects name=value, got '" + kv + "'");
    }
    cfg.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

ordered_json verdict_json(const PropertyReport& rep) {
  ordered_json j;
  j["verdict"] = to_string(rep.verdict);
  if (rep.witness) {
    j["witness"] = {{"u", (*rep.witness)[0]}, {"v", (*rep.witness)[1]}};
    j["witness_value"] = rep.witness_value;
  } else {
    j["witness"] = nullptr;
  }
  j["detail"] = rep.detail;
  if (rep.property == "P1") j["K_underbar"] = rep.K_underbar;
  return j;
}

ordered_json verification_json(const VerificationResult& vr,
                               const std::string& example) {
  ordered_json j;
  j["command"] = "verify-llf";
  j["example"] = example;
  j["properties"] = {{"P1", verdict_json(vr.p1)},
                     {"P2", verdict_json(vr.p2)},
                     {"P3", verdict_json(vr.p3)},
                     {"P4", verdict_json(vr.p4)},
                     {"P5", verdict_json(vr.p5)}};
  j["underbars"] = to_string(vr.underbars_verdict);
  j["K_construction"] = to_string(vr.K_verdict);
  j["B_K_scan"] = to_string(vr.B_K_verdict);
  ordered_json c;
  c["K_underbar"] = vr.candidate.K_underbar;
  c["u_underbar"] = vr.candidate.u_underbar;
  c["v_underbar"] = vr.candidate.v_underbar;
  c["K"] = vr.candidate.K;
  c["M_K"] = vr.constants.M_K;
  c["B_K"] = vr.constants.B_K;
  c["R_u_BK"] = vr.constants.R_u_BK;
  c["R_v_BK"] = vr.constants.R_v_BK;
  c["M_u_inf"] = vr.constants.M_u_inf ? ordered_json(*vr.constants.M_u_inf)
                                      : ordered_json("infinite");
  c["M_v_inf"] = vr.constants.M_v_inf ? ordered_json(*vr.constants.M_v_inf)
                                      : ordered_json("infinite");
  j["constants"] = c;
  j["grid_extent"] = vr.grid_extent_used;
  j["all_verified"] = vr.all_verified();
  j["overall"] = to_string(vr.overall());
  return j;
}

struct LoadedLedger {
  double M_K = 0, C_underbar = 0, F_max = 0, B = 0;
};

std::optional<LoadedLedger> try_load_ledger(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = ordered_json::parse(in);
    LoadedLedger lg;
    lg.M_K = j.at("fields").at("M_K").at("value").get<double>();
    lg.C_underbar = j.at("fields").at("C_underbar").at("value").get<double>();
    lg.F_max = j.at("fields").at("F_max").at("value").get<double>();
    lg.B = j.at("fields").at("B").at("value").get<double>();
    return lg;
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<double> try_load_report_MK(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    const auto j = ordered_json::parse(in);
    if (!j.at("all_verified").get<bool>()) return std::nullopt;
    return j.at("constants").at("M_K").get<double>();
  } catch (...) {
    return std::nullopt;
  }
}

int cmd_simulate(const ResolvedRun& run) {
  const fs::path out_dir(run.out_dir);

  std::optional<MonitorContext> monitor;
  std::optional<LoadedLedger> ledger = try_load_ledger(out_dir / "ledger.json");
  if (run.llf) {
    if (ledger) {
      monitor = MonitorContext{*run.llf, ledger->M_K, run.system.gamma(),
                               ledger->C_underbar, ledger->F_max};
    } else if (auto mk = try_load_report_MK(out_dir / "report.json")) {
      monitor = MonitorContext{*run.llf, *mk, run.system.gamma(), std::nullopt,
                               std::nullopt};
    }
  }

  const TrajectoryRecord record = integrate(run.system, run.integrator, monitor);

  {
    std::ostringstream os;
    write_trajectory_csv(os, record);
    write_file(out_dir / "trajectory.csv", os.str());
  }
  {
    std::ostringstream os;
    write_monitors_csv(os, record);
    write_file(out_dir / "monitors.csv", os.str());
  }

  ordered_json j;
  j["command"] = "simulate";
  j["example"] = run.example;
  j["status"] = to_string(record.status);
  j["t_final"] = record.t_final;
  j["max_norm"] = record.max_norm_overall;
  j["n"] = run.system.n();
  j["frames"] = record.frames.size();
  j["monitored"] = monitor.has_value();
  j["lemma_threshold_reached"] = record.lemma_threshold_reached;
  ordered_json viol = ordered_json::array();
  for (const auto& v : record.violations) {
    viol.push_back({{"lemma", v.lemma}, {"t", v.t}, {"magnitude", v.magnitude}});
  }
  j["violations"] = viol;
  if (ledger) {
    j["bound"] = {{"B", ledger->B},
                  {"fields", {"B"}},
                  {"max_norm", record.max_norm_overall},
                  {"satisfied", record.max_norm_overall <= ledger->B}};
  } else {
    j["bound"] = nullptr;
  }
  write_file(out_dir / "summary.json", j.dump(2) + "\n");

  switch (record.status) {
    case RunStatus::completed: return 0;
    case RunStatus::blow_up_detected: return 2;
    default:
      std::cerr << "run ended with status " << to_string(record.status)
                << "\n";
      return 1;
  }
}

int cmd_verify(const ResolvedRun& run) {
  if (!run.llf) {
    std::cerr << "no LLF candidate: the example provides none and no "
                 "llf.term lines were given\n";
    return 1;
  }
  const auto vr = verify_llf(*run.llf, run.system.reactions(), run.verify);
  const auto j = verification_json(vr, run.example);
  write_file(fs::path(run.out_dir) / "report.json", j.dump(2) + "\n");
  switch (vr.overall()) {
    case Verdict::verified: return 0;
    case Verdict::refuted: return 3;
    case Verdict::inconclusive: return 4;
  }
  return 4;
}

int cmd_bounds(const ResolvedRun& run, bool force) {
  if (!run.llf) {
    std::cerr << "pipeline order: bounds needs a verified LLF candidate and "
                 "none is available\n";
    return 1;
  }
  const auto vr = verify_llf(*run.llf, run.system.reactions(), run.verify);
  write_file(fs::path(run.out_dir) / "report.json",
             verification_json(vr, run.example).dump(2) + "\n");
  if (!vr.all_verified() && !force) {
    std::cerr << "pipeline order: LLF verification did not pass ("
              << to_string(vr.overall())
              << "); rerun with --force to compute the ledger anyway\n";
    return 1;
  }
  const auto ledger = compute_ledger(run.system, vr.candidate, vr.constants);
  write_file(fs::path(run.out_dir) / "ledger.json",
             to_json_string(ledger) + "\n");
  return 0;
}

int cmd_certify(const ResolvedRun& run, const RunConfig& cfg) {
  ordered_json j;
  j["command"] = "certify";
  j["example"] = run.example;

  const auto ratio = no_llf_ratio_test(run.system.reactions());
  std::optional<NoLLFCertificate> mutual;
  if (run.example == "mutualism") {
    MutualismParams p;
    auto param_or = [&](const char* k, double f) {
      const auto it = cfg.params.find(k);
      return it == cfg.params.end() ? f : it->second;
    };
    p.a1 = param_or("a1", p.a1);
    p.a2 = param_or("a2", p.a2);
    p.b1 = param_or("b1", p.b1);
    p.b2 = param_or("b2", p.b2);
    p.c1 = param_or("c1", p.c1);
    p.c2 = param_or("c2", p.c2);
    mutual = no_llf_mutualism_test(p);
  }
  const auto& no_llf = ratio ? ratio : mutual;
  j["no_llf"] = no_llf ? ordered_json::parse(to_json_string(*no_llf))
                       : ordered_json(nullptr);

  j["blowup"] = nullptr;
  j["gronwall"] = nullptr;
  j["reduced_status"] = nullptr;
  try {
    const auto reduced = reduce_symmetric(run.system);
    const auto cert =
        blowup_certificate(reduced.delta, reduced.u0, reduced.v0);
    j["blowup"] = ordered_json::parse(to_json_string(cert));
    if (cert.verdict == BlowupVerdict::certified_blow_up) {
      auto settings = run.integrator;
      settings.adaptive_halving = true;
      const auto traj = simulate_reduced(reduced, settings);
      j["reduced_status"] = to_string(traj.status);
      const auto gr = verify_gronwall(traj, cert, cert.epsilon);
      j["gronwall"] = ordered_json::parse(to_json_string(gr));
    }
  } catch (const ReductionError&) {
    // Not a symmetric two-compartment setup: the blow-up certificate does
    // not apply.
  }

  write_file(fs::path(run.out_dir) / "certificate.json", j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Discretized two-species reaction-diffusion systems: simulation, "
      "Lyapunov-like-function verification, certified bounds and blow-up "
      "certificates"};
  app.require_subcommand(1);

  CommonOpts sim_opts, verify_opts, bounds_opts, certify_opts;
  bool force = false;

  CLI::App* sim = app.add_subcommand("simulate", "Integrate and monitor");
  add_common(sim, sim_opts);
  CLI::App* verify =
      app.add_subcommand("verify-llf", "Check properties P1-P5 and constants");
  add_common(verify, verify_opts);
  CLI::App* bounds =
      app.add_subcommand("bounds", "Compute the full constant ledger");
  add_common(bounds, bounds_opts);
  bounds->add_flag("--force", force,
                   "Compute the ledger even if verification did not pass");
  CLI::App* certify = app.add_subcommand(
      "certify", "No-LLF tests and the blow-up certificate");
  add_common(certify, certify_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(cli::resolve(build_config(sim_opts)));
    }
    if (verify->parsed()) {
      return cmd_verify(cli::resolve(build_config(verify_opts)));
    }
    if (bounds->parsed()) {
      return cmd_bounds(cli::resolve(build_config(bounds_opts)), force);
    }
    if (certify->parsed()) {
      const auto cfg = build_config(certify_opts);
      return cmd_certify(cli::resolve(cfg), cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
