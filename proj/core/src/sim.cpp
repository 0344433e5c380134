#include "rdbound/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdbound/errors.hpp"

namespace rdbound {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blow_up_detected: return "blow-up-detected";
    case RunStatus::positivity_violation: return "positivity-violation";
    case RunStatus::step_failure: return "step-failure";
  }
  return "?";
}

PartitionSnapshot snapshot_partition(const StateVector& s,
                                     const RationalTermFunction& W,
                                     double M_K) {
  const int n = int(s.u.size());
  PartitionSnapshot p;
  p.in_Y.resize(n);
  for (int i = 0; i < n; ++i) {
    // The region is open: points exactly on the level set count as outside.
    p.in_Y[i] = W.eval(s.u[i], s.v[i]) < M_K ? 1 : 0;
    p.n_t += p.in_Y[i];
  }
  p.edge_sign.resize(std::max(0, n - 1));
  for (int e = 0; e + 1 < n; ++e) {
    p.edge_sign[e] = int(p.in_Y[e + 1]) - int(p.in_Y[e]);
    if (p.edge_sign[e] != 0) {
      p.Z_bdy.push_back(e);
    } else if (!p.in_Y[e]) {
      p.Z_int.push_back(e);
    }
  }
  return p;
}

std::vector<CrossingEvent> detect_crossings(const PartitionSnapshot& prev,
                                            const PartitionSnapshot& next) {
  std::vector<CrossingEvent> events;
  for (std::size_t i = 0; i < prev.in_Y.size() && i < next.in_Y.size(); ++i) {
    if (prev.in_Y[i] != next.in_Y[i]) {
      events.push_back({int(i), next.in_Y[i] != 0});
    }
  }
  return events;
}

FluxEffects flux_effects(const StateVector& s, const RationalTermFunction& W,
                         const PartitionSnapshot& partition, double d) {
  const int n = int(s.u.size());
  const RationalTermFunction Wu = W.du();
  const RationalTermFunction Wv = W.dv();
  std::vector<double> pu(n), pv(n);
  for (int i = 0; i < n; ++i) {
    pu[i] = Wu.eval(s.u[i], s.v[i]);
    pv[i] = Wv.eval(s.u[i], s.v[i]);
  }

  FluxEffects out;
  out.F_bdy.assign(std::max(0, n - 1), 0.0);
  out.F_int.assign(std::max(0, n - 1), 0.0);
  for (int e : partition.Z_int) {
    const double du_e = s.u[e + 1] - s.u[e];
    const double dv_e = s.v[e + 1] - s.v[e];
    out.F_int[e] = -((pu[e + 1] - pu[e]) * du_e + d * (pv[e + 1] - pv[e]) * dv_e);
    out.W_YC_D += out.F_int[e];
  }
  for (int e : partition.Z_bdy) {
    const int sign = partition.edge_sign[e];
    const int yc_side = e + (1 - sign) / 2;  // derivative on the Y^C side
    const double du_e = s.u[e + 1] - s.u[e];
    const double dv_e = s.v[e + 1] - s.v[e];
    out.F_bdy[e] = sign * (pu[yc_side] * du_e + d * pv[yc_side] * dv_e);
    out.W_YC_D += out.F_bdy[e];
  }
  return out;
}

std::vector<Violation> assert_lemmas(const MonitorFrame& frame,
                                     const MonitorFrame* prev,
                                     const MonitorContext& ctx) {
  std::vector<Violation> out;
  constexpr double tol = 1e-8;
  if (ctx.F_max) {
    for (int e : frame.partition.Z_bdy) {
      const double excess = frame.fluxes.F_bdy[e] - *ctx.F_max;
      if (excess > tol) {
        out.push_back({"F_bdy<=F_max", frame.t, excess});
      }
    }
  }
  if (ctx.C_underbar && frame.max_norm >= *ctx.C_underbar) {
    if (frame.W_YC_D > tol) {
      out.push_back({"W_YCD<=0", frame.t, frame.W_YC_D});
    }
    const double total = ctx.gamma * frame.W_YC_R + frame.W_YC_D;
    if (total > tol) {
      out.push_back({"dW_YC/dt<=0", frame.t, total});
    }
    if (prev && prev->max_norm >= *ctx.C_underbar) {
      const double rise = frame.mathcal_W - prev->mathcal_W;
      if (rise > tol) {
        out.push_back({"mathcalW-nonincreasing", frame.t, rise});
      }
    }
  }
  return out;
}

namespace {

using RhsFn =
    std::function<void(double, std::span<const double>, std::span<double>)>;
using GuardFn = std::function<bool(const std::vector<double>&)>;

enum class StepStatus { ok, nonfinite, guarded };

// One RK4 step with optional recursive halving when a stage increment is
// large. The guard is consulted between half-steps so a blow-up terminates
// the recursion instead of driving the sub-step count without bound.
StepStatus rk4_step(const RhsFn& f, double t, double dt,
                    std::vector<double>& y, const IntegratorSettings& settings,
                    int depth, const GuardFn* guard) {
  const std::size_t m = y.size();
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);

  auto stage_bad = [&](const std::vector<double>& k) {
    double sup = 0.0;
    for (double x : k) {
      if (!std::isfinite(x)) return 2;
      sup = std::max(sup, std::abs(x) * dt);
    }
    return (settings.adaptive_halving && sup > settings.halving_threshold &&
            depth < settings.max_halvings)
               ? 1
               : 0;
  };
  auto halve = [&]() {
    const StepStatus first =
        rk4_step(f, t, dt / 2, y, settings, depth + 1, guard);
    if (first != StepStatus::ok) return first;
    if (guard && (*guard)(y)) return StepStatus::guarded;
    return rk4_step(f, t + dt / 2, dt / 2, y, settings, depth + 1, guard);
  };

  f(t, y, k1);
  if (int b = stage_bad(k1)) return b == 1 ? halve() : StepStatus::nonfinite;
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  f(t + 0.5 * dt, tmp, k2);
  if (int b = stage_bad(k2)) return b == 1 ? halve() : StepStatus::nonfinite;
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  f(t + 0.5 * dt, tmp, k3);
  if (int b = stage_bad(k3)) return b == 1 ? halve() : StepStatus::nonfinite;
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + dt * k3[i];
  f(t + dt, tmp, k4);
  if (int b = stage_bad(k4)) return b == 1 ? halve() : StepStatus::nonfinite;

  for (std::size_t i = 0; i < m; ++i) {
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(y[i])) return StepStatus::nonfinite;
  }
  return StepStatus::ok;
}

enum class ClipResult { ok, violation };

ClipResult clip_nonnegative(std::vector<double>& y, double clip_tol) {
  for (double x : y) {
    if (x < -clip_tol) return ClipResult::violation;
  }
  for (double& x : y) {
    if (x < 0.0) x = 0.0;
  }
  return ClipResult::ok;
}

long long steps_per_frame(const IntegratorSettings& s) {
  if (!(s.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const long long k = std::llround(s.monitor_every / s.dt);
  if (k < 1 ||
      std::abs(k * s.dt - s.monitor_every) >
          1e-9 * std::max(s.dt, s.monitor_every)) {
    throw std::invalid_argument(
        "monitor_every must be a positive multiple of dt");
  }
  return k;
}

}  // namespace

TrajectoryRecord integrate(const DiscretizedSystem& sys,
                           const IntegratorSettings& settings,
                           const std::optional<MonitorContext>& monitor) {
  const int n = sys.n();
  const long long frame_stride = steps_per_frame(settings);
  const long long total_steps = std::llround(settings.t_end / settings.dt);

  TrajectoryRecord record;
  std::vector<double> y(2 * n);
  std::copy(sys.u0().begin(), sys.u0().end(), y.begin());
  std::copy(sys.v0().begin(), sys.v0().end(), y.begin() + n);

  StateVector scratch;
  scratch.u.resize(n);
  scratch.v.resize(n);
  Derivatives deriv_out;
  bool overflow = false;
  int overflow_compartment = -1;

  RhsFn f = [&](double t, std::span<const double> yy, std::span<double> dy) {
    std::copy(yy.begin(), yy.begin() + n, scratch.u.begin());
    std::copy(yy.begin() + n, yy.end(), scratch.v.begin());
    scratch.t = t;
    try {
      deriv_out = rhs(sys, scratch);
    } catch (const NumericOverflowError& e) {
      overflow = true;
      overflow_compartment = e.compartment;
      std::fill(dy.begin(), dy.end(),
                std::numeric_limits<double>::quiet_NaN());
      return;
    }
    std::copy(deriv_out.du.begin(), deriv_out.du.end(), dy.begin());
    std::copy(deriv_out.dv.begin(), deriv_out.dv.end(), dy.begin() + n);
  };

  auto max_norm_of = [&](const std::vector<double>& yy) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, yy[i] + yy[i + n]);
    return m;
  };
  auto state_at = [&](double t) {
    StateVector s;
    s.u.assign(y.begin(), y.begin() + n);
    s.v.assign(y.begin() + n, y.end());
    s.t = t;
    return s;
  };

  auto push_frame = [&](double t) {
    record.states.push_back(state_at(t));
    if (!monitor) return;
    const auto& ctx = *monitor;
    const StateVector& s = record.states.back();
    MonitorFrame frame;
    frame.t = t;
    frame.partition = snapshot_partition(s, ctx.W, ctx.M_K);
    frame.n_t = frame.partition.n_t;
    const RationalTermFunction Wu = ctx.W.du();
    const RationalTermFunction Wv = ctx.W.dv();
    for (int i = 0; i < n; ++i) {
      const double wi = ctx.W.eval(s.u[i], s.v[i]);
      frame.W_N += wi;
      if (!frame.partition.in_Y[i]) {
        frame.W_YC += wi;
        frame.W_YC_R +=
            Wu.eval(s.u[i], s.v[i]) * sys.reactions().f.eval(s.u[i], s.v[i]) +
            Wv.eval(s.u[i], s.v[i]) * sys.reactions().g.eval(s.u[i], s.v[i]);
      }
    }
    frame.fluxes = flux_effects(s, ctx.W, frame.partition, sys.d());
    frame.W_YC_D = frame.fluxes.W_YC_D;
    frame.mathcal_W = frame.n_t * ctx.M_K + frame.W_YC;
    frame.max_norm = max_norm_of(y);
    const MonitorFrame* prev =
        record.frames.empty() ? nullptr : &record.frames.back();
    if (prev) {
      for (const auto& ev : detect_crossings(prev->partition, frame.partition)) {
        (ev.entered ? frame.crossings_in : frame.crossings_out)++;
      }
    }
    if (ctx.C_underbar && frame.max_norm >= *ctx.C_underbar) {
      record.lemma_threshold_reached = true;
    }
    auto violations = assert_lemmas(frame, prev, ctx);
    record.violations.insert(record.violations.end(), violations.begin(),
                             violations.end());
    record.frames.push_back(std::move(frame));
  };

  record.max_norm_overall = max_norm_of(y);
  push_frame(0.0);
  record.t_final = 0.0;

  const GuardFn guard = [&](const std::vector<double>& yy) {
    return max_norm_of(yy) > settings.blow_up_guard;
  };

  for (long long k = 1; k <= total_steps; ++k) {
    const double t_prev = (k - 1) * settings.dt;
    const double t_now = k * settings.dt;
    const StepStatus st =
        rk4_step(f, t_prev, settings.dt, y, settings, 0, &guard);
    if (st == StepStatus::nonfinite || overflow) {
      record.status = RunStatus::step_failure;
      record.t_final = t_prev;
      (void)overflow_compartment;
      return record;
    }
    if (st == StepStatus::ok &&
        clip_nonnegative(y, settings.clip_tol) == ClipResult::violation) {
      record.status = RunStatus::positivity_violation;
      record.t_final = t_now;
      push_frame(t_now);
      return record;
    }
    const double norm = max_norm_of(y);
    record.max_norm_overall = std::max(record.max_norm_overall, norm);
    if (st == StepStatus::guarded || norm > settings.blow_up_guard) {
      record.status = RunStatus::blow_up_detected;
      record.t_final = t_now;
      push_frame(t_now);
      return record;
    }
    if (k % frame_stride == 0) {
      push_frame(t_now);
      record.t_final = t_now;
    }
  }
  if (total_steps % frame_stride != 0) {
    push_frame(total_steps * settings.dt);
  }
  record.t_final = total_steps * settings.dt;
  record.status = RunStatus::completed;
  return record;
}

OdeResult integrate_generic(const RhsFn& deriv, std::vector<double> y0,
                            const IntegratorSettings& settings) {
  const long long frame_stride = steps_per_frame(settings);
  const long long total_steps = std::llround(settings.t_end / settings.dt);

  OdeResult out;
  std::vector<double> y = std::move(y0);
  auto norm_of = [&](const std::vector<double>& yy) {
    double s = 0.0;
    for (double x : yy) s += x;
    return s;
  };
  out.ts.push_back(0.0);
  out.states.push_back(y);

  const GuardFn guard = [&](const std::vector<double>& yy) {
    return norm_of(yy) > settings.blow_up_guard;
  };

  for (long long k = 1; k <= total_steps; ++k) {
    const double t_prev = (k - 1) * settings.dt;
    const double t_now = k * settings.dt;
    const StepStatus st =
        rk4_step(deriv, t_prev, settings.dt, y, settings, 0, &guard);
    if (st == StepStatus::nonfinite) {
      out.status = RunStatus::step_failure;
      out.t_final = t_prev;
      return out;
    }
    if (st == StepStatus::ok &&
        clip_nonnegative(y, settings.clip_tol) == ClipResult::violation) {
      out.status = RunStatus::positivity_violation;
      out.t_final = t_now;
      return out;
    }
    if (st == StepStatus::guarded || norm_of(y) > settings.blow_up_guard) {
      out.ts.push_back(t_now);
      out.states.push_back(y);
      out.status = RunStatus::blow_up_detected;
      out.t_final = t_now;
      return out;
    }
    if (k % frame_stride == 0) {
      out.ts.push_back(t_now);
      out.states.push_back(y);
    }
  }
  out.t_final = total_steps * settings.dt;
  out.status = RunStatus::completed;
  return out;
}

namespace {

void append_double(std::string& line, double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  line.append(buf, res.ptr);
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  if (record.states.empty()) return;
  const int n = int(record.states.front().u.size());
  std::string line = "t";
  for (int i = 1; i <= n; ++i) line += ",u_" + std::to_string(i);
  for (int i = 1; i <= n; ++i) line += ",v_" + std::to_string(i);
  line += "\n";
  os << line;
  for (const auto& s : record.states) {
    line.clear();
    append_double(line, s.t);
    for (double x : s.u) {
      line += ',';
      append_double(line, x);
    }
    for (double x : s.v) {
      line += ',';
      append_double(line, x);
    }
    line += '\n';
    os << line;
  }
}

void write_monitors_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "t,W_N,W_YC,W_YC_R,W_YC_D,mathcalW,max_norm,n_t,crossings\n";
  std::string line;
  for (const auto& f : record.frames) {
    line.clear();
    append_double(line, f.t);
    line += ',';
    append_double(line, f.W_N);
    line += ',';
    append_double(line, f.W_YC);
    line += ',';
    append_double(line, f.W_YC_R);
    line += ',';
    append_double(line, f.W_YC_D);
    line += ',';
    append_double(line, f.mathcal_W);
    line += ',';
    append_double(line, f.max_norm);
    line += ',';
    line += std::to_string(f.n_t);
    line += ',';
    line += std::to_string(f.crossings_in + f.crossings_out);
    line += '\n';
    os << line;
  }
}

}  // namespace rdbound
