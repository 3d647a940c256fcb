#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grbell/error.hpp"
#include "grbell/random.hpp"
#include "grbell/scenario.hpp"

using namespace grbell;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitAudit = 4;

struct Globals {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  bool quiet = false;
  bool timing = false;
};

int exit_code(ErrorCode c) {
  return c == ErrorCode::ParseError || c == ErrorCode::ValidationError ? kExitConfig
                                                                       : kExitGeometry;
}

int exit_code(std::string_view status) {
  if (status == "ok" || status == "ok_swapped") return kExitOk;
  if (status == "ParseError" || status == "ValidationError") return kExitConfig;
  return kExitGeometry;
}

void note(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << "\n";
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ValidationError, "--out: cannot write " + out_path);
  f << text;
}

ScenarioConfig load(const std::string& path, const Globals& g) {
  ScenarioConfig cfg = load_config(path);
  if (g.tol) {
    if (!(*g.tol > 0.0 && *g.tol <= 1e-3)) {
      throw Error(ErrorCode::ValidationError, "--tol: must lie in (0, 1e-3]");
    }
    cfg.tol = *g.tol;
  }
  if (g.seed) cfg.mc_seed = *g.seed;
  return cfg;
}

int cmd_run(const Globals& g, const std::string& config, const std::string& out,
            const std::string& format) {
  const ScenarioConfig cfg = load(config, g);
  const RunReport rep = run_scenario(cfg, {g.workers});
  if (format == "json") {
    emit(out, report_json(rep, cfg, g.timing));
  } else if (format == "csv") {
    SweepRow row{cfg.name, rep.inequality.swapped ? "ok_swapped" : "ok", rep};
    emit(out, std::string(kSweepHeader) + "\n" + sweep_csv_row(row) + "\n");
  } else {
    emit(out, report_text(rep, g.timing));
  }
  if (rep.audit && !rep.audit->pass) {
    note(g, "lhv audit failed");
    return kExitAudit;
  }
  return kExitOk;
}

int cmd_sweep(const Globals& g, const std::string& config, const std::string& out) {
  const ScenarioConfig cfg = load(config, g);
  if (!cfg.sweep) throw Error(ErrorCode::ValidationError, "sweep: missing from config");
  const auto rows = run_sweep(cfg, {g.workers});
  emit(out, sweep_csv(rows));
  int code = kExitOk;
  std::size_t failed = 0;
  for (const auto& row : rows) {
    int c = exit_code(row.status);
    if (row.report && row.report->audit && !row.report->audit->pass) c = std::max(c, kExitAudit);
    if (c != kExitOk) ++failed;
    code = std::max(code, c);
  }
  note(g, std::to_string(rows.size()) + " rows, " + std::to_string(failed) + " failed");
  return code;
}

int cmd_horizon(const Globals& g, HorizonSweepInput in, const std::string& out) {
  if (g.tol) in.tol = *g.tol;
  const auto rows = run_horizon_sweep(in, {g.workers});
  emit(out, horizon_csv(rows, in.mass));
  std::size_t ok = 0, guarded = 0;
  for (const auto& row : rows) {
    ok += row.report.has_value();
    guarded += row.status == "horizon_guard";
  }
  note(g, std::to_string(rows.size()) + " radii: " + std::to_string(ok) + " ok, " +
              std::to_string(guarded) + " inside the guard, " +
              std::to_string(rows.size() - ok - guarded) + " failed");
  return kExitOk;
}

int cmd_audit(const Globals& g, const std::string& config, std::optional<std::uint64_t> n,
              std::optional<std::uint64_t> seed) {
  ScenarioConfig cfg = load(config, g);
  if (n) cfg.mc_n = *n;
  if (seed) cfg.mc_seed = *seed;
  cfg.lhv_audit = false;

  std::vector<AuditCase> cases;
  std::vector<std::string> ids;
  if (cfg.sweep) {
    for (const auto& row : run_sweep(cfg, {g.workers})) {
      if (!row.report) {
        note(g, row.id + " skipped: " + row.status);
        continue;
      }
      cases.push_back({row.report->settings, row.report->proj_b, row.report->proj_c});
      ids.push_back(row.id);
    }
  } else {
    const RunReport rep = run_scenario(cfg, {g.workers});
    cases.push_back({rep.settings, rep.proj_b, rep.proj_c});
    ids.push_back(cfg.name);
  }

  const auto report =
      lhv_inequality_audit(make_sign_model(cfg.mc_seed), cases, cfg.mc_n, cfg.mc_seed, g.workers);
  std::string out = "case,lhs,rhs,margin,sigma,pass\n";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& e = report.entries[i];
    out += ids[i] + "," + format_real(e.lhs) + "," + format_real(e.rhs) + "," +
           format_real(e.margin) + "," + format_real(e.sigma) + (e.pass ? ",1\n" : ",0\n");
  }
  std::cout << out;
  note(g, std::to_string(cases.size()) + " cases, n = " + std::to_string(cfg.mc_n) +
              ", seed = " + std::to_string(cfg.mc_seed) + ", " +
              std::to_string(report.failures) + " beyond 4 sigma");
  return report.pass ? kExitOk : kExitAudit;
}

constexpr const char* kFlatConfig = R"({
  "name": "selftest",
  "metric": {"kind": "minkowski"},
  "origin": [0, 0, 0, 0],
  "u1": {"spatial": [-0.6, 0, 0]},
  "u2": {"spatial": [0.6, 0, 0]},
  "stop1": {"kind": "proper_time", "value": 5},
  "stop2": {"kind": "proper_time", "value": 5},
  "settings": {"a": {"azimuth_deg": 0}, "b": {"azimuth_deg": 60}, "c": {"azimuth_deg": 120}}
})";

int cmd_selftest(const Globals& g) {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) ++failures;
    if (!g.quiet || !ok) std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
  };

  ScenarioConfig cfg = parse_config(kFlatConfig);
  const RunReport base = run_scenario(cfg, {g.workers});
  const auto& q = base.inequality;
  check(std::abs(q.w_b - 1.0) <= 1e-9 && std::abs(q.w_c - 1.0) <= 1e-9, "flat weights equal 1");
  check(std::abs(q.lhs - 1.0) <= 1e-9 && std::abs(q.rhs - 0.5) <= 1e-9 &&
            std::abs(q.margin - 0.5) <= 1e-9 && q.violated,
        "0/60/120 settings: lhs 1, rhs 0.5, violated");
  check(base.best && base.best->report.margin > 0.0, "optimal left setting violates");

  RandomStream rng(g.seed.value_or(0), 0);
  bool weights = true, law = true, classic = true;
  for (int i = 0; i < 100; ++i) {
    for (SettingInput* s : {&cfg.a, &cfg.b, &cfg.c}) {
      s->from_vector = true;
      s->vector = rng.unit_vector();
    }
    const RunReport r = run_scenario(cfg, {g.workers});
    const auto& t = r.inequality;
    weights &= std::abs(t.w_b - 1.0) <= 1e-9 && std::abs(t.w_c - 1.0) <= 1e-9;
    law &= std::abs(t.p_ab + dot(r.settings.a, t.b_rl)) <= 1e-9 &&
           std::abs(dot(r.settings.b, t.b_rl) - 1.0) <= 1e-9;
    classic &= std::abs(t.rhs - (1.0 + t.p_bc)) <= 1e-12;
  }
  check(weights, "100 random settings keep unit weights");
  check(law, "P(a,b) = -cos(theta_ab) on 100 random settings");
  check(classic, "inequality reduces to |P(a,b) - P(a,c)| <= 1 + P(b,c)");

  cfg = parse_config(kFlatConfig);
  cfg.c = cfg.b;
  const RunReport same = run_scenario(cfg, {g.workers});
  check(same.inequality.margin <= 0.0 && !same.inequality.violated, "b = c is never violated");

  return failures == 0 ? kExitOk : kExitGeometry;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"General relativistic Bell correlations: scenarios, sweeps and LHV audits"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol", g.tol, "Geodesic integrator tolerance");
  app.add_option("--seed", g.seed, "Monte Carlo seed, overrides mc.seed");
  app.add_option("--workers", g.workers, "Worker threads, 0 for one per core");
  app.add_flag("--quiet", g.quiet, "Suppress progress notes");
  app.add_flag("--timing", g.timing, "Include wall-clock timings in reports");

  std::string config, out, format = "text";
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config)->required();
  run->add_option("--out", out);
  run->add_option("--format", format)->check(CLI::IsMember({"text", "csv", "json"}));

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep to CSV");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--out", out)->required();

  HorizonSweepInput horizon;
  auto* hz = app.add_subcommand("horizon", "Projection weights approaching a Schwarzschild horizon");
  hz->add_option("--mass", horizon.mass)->required();
  hz->add_option("--r-start", horizon.r_start)->required();
  hz->add_option("--r-end", horizon.r_end)->required();
  hz->add_option("--steps", horizon.steps)->required();
  hz->add_option("--epsilon", horizon.horizon_epsilon, "Horizon guard epsilon");
  hz->add_option("--out", out)->required();

  std::optional<std::uint64_t> audit_n, audit_seed;
  auto* audit = app.add_subcommand("lhv-audit", "Monte Carlo audit of the sign LHV model");
  audit->add_option("--config", config)->required();
  audit->add_option("--n", audit_n, "Samples per correlation");
  audit->add_option("--seed", audit_seed, "Monte Carlo seed");

  auto* selftest = app.add_subcommand("selftest", "Flat-space reduction checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(g, config, out, format);
    if (sweep->parsed()) return cmd_sweep(g, config, out);
    if (hz->parsed()) return cmd_horizon(g, horizon, out);
    if (audit->parsed()) return cmd_audit(g, config, audit_n, audit_seed);
    if (selftest->parsed()) return cmd_selftest(g);
  } catch (const Error& e) {
    std::cerr << "error";
    if (!e.stage().empty()) std::cerr << " [" << e.stage() << "]";
    std::cerr << " " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  }
  return kExitOk;
}
