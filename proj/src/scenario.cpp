#include "grbell/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "grbell/error.hpp"
#include "grbell/parallel.hpp"

namespace grbell {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ValidationError, field + ": " + why);
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void allow_only(const json& j, const std::string& where,
                std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) invalid(where.empty() ? "config" : where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
      invalid(join(where, it.key()), "unknown field");
    }
  }
}

const json& required(const json& j, const std::string& where, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) invalid(join(where, key), "missing");
  return *it;
}

double real(const json& j, const std::string& field) {
  if (!j.is_number()) invalid(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(field, "must be finite");
  return v;
}

std::uint64_t count(const json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  invalid(field, "expected a non-negative integer");
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) invalid(field, "expected a string");
  return j.get<std::string>();
}

template <std::size_t N>
std::array<double, N> reals(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != N) {
    invalid(field, "expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = real(j[i], field + "[" + std::to_string(i) + "]");
  return out;
}

MetricSpec parse_metric(const json& j) {
  allow_only(j, "metric", {"kind", "mass", "horizon_epsilon"});
  const std::string kind = text(required(j, "metric", "kind"), "metric.kind");
  if (kind == "minkowski") {
    if (j.contains("mass") || j.contains("horizon_epsilon")) {
      invalid("metric", "mass and horizon_epsilon apply to schwarzschild only");
    }
    return MetricSpec::minkowski();
  }
  if (kind != "schwarzschild") invalid("metric.kind", "expected minkowski or schwarzschild");
  const double mass = real(required(j, "metric", "mass"), "metric.mass");
  if (!(mass > 0.0)) invalid("metric.mass", "must be positive");
  double eps = 1e-6;
  if (j.contains("horizon_epsilon")) {
    eps = real(j["horizon_epsilon"], "metric.horizon_epsilon");
    if (!(eps > 0.0 && eps < 1.0)) invalid("metric.horizon_epsilon", "must lie in (0, 1)");
  }
  return MetricSpec::schwarzschild(mass, eps);
}

SpacetimePoint parse_origin(const json& j, const MetricSpec& spec) {
  const SpacetimePoint p{reals<4>(j, "origin"), spec.chart()};
  if (spec.kind == MetricKind::Schwarzschild) {
    if (!(p.coords[1] > spec.guard_radius())) {
      throw Error(ErrorCode::ValidationError,
                  "origin: origin inside horizon guard (r = " + format_real(p.coords[1]) +
                      ", guard = " + format_real(spec.guard_radius()) + ")");
    }
    if (!(p.coords[2] > 0.0 && p.coords[2] < std::numbers::pi)) {
      invalid("origin", "polar coordinate must lie in (0, pi)");
    }
  }
  return p;
}

VelocityInput parse_velocity(const json& j, const std::string& field) {
  VelocityInput v;
  if (j.is_object()) {
    allow_only(j, field, {"spatial"});
    v.spatial_only = true;
    v.spatial = reals<3>(required(j, field, "spatial"), field + ".spatial");
  } else {
    v.full = reals<4>(j, field);
  }
  return v;
}

FourVector resolve_velocity(const ScenarioConfig& cfg, const VelocityInput& v) {
  if (v.spatial_only) return normalized_tangent(cfg.metric, cfg.origin, v.spatial, cfg.particle);
  return {v.full, cfg.origin};
}

void check_velocity(const ScenarioConfig& cfg, const VelocityInput& v, const std::string& field) {
  FourVector u;
  try {
    u = resolve_velocity(cfg, v);
  } catch (const Error& e) {
    invalid(field, e.what());
  }
  const MetricTensor g = metric_at(cfg.metric, cfg.origin);
  double terms = 1.0;
  for (std::size_t i = 0; i < 4; ++i) terms += std::abs(g(i, i)) * u.components[i] * u.components[i];
  const double n0 = cfg.particle == CurveKind::Timelike ? -1.0 : 0.0;
  const double n = inner(g, u, u);
  if (std::abs(n - n0) > 1e-9 * terms) {
    invalid(field, "g(u,u) = " + format_real(n) + ", expected " + format_real(n0));
  }
  if (!(u.components[0] > 0.0)) invalid(field, "must be future pointing (u^t > 0)");
}

StopCondition parse_stop(const json& j, const std::string& field, const MetricSpec& spec) {
  allow_only(j, field, {"kind", "value", "tolerance"});
  const std::string kind = text(required(j, field, "kind"), field + ".kind");
  const double value = real(required(j, field, "value"), field + ".value");
  StopCondition s;
  if (kind == "proper_time") {
    if (value < 0.0) invalid(field + ".value", "proper time must be non-negative");
    s = StopCondition::proper_time(value);
  } else if (kind == "radius") {
    if (spec.kind != MetricKind::Schwarzschild) {
      invalid(field + ".kind", "radius stop requires the schwarzschild metric");
    }
    if (!(value > spec.guard_radius())) invalid(field + ".value", "radius inside horizon guard");
    s = StopCondition::radius(value);
  } else if (kind == "coordinate_time") {
    s = StopCondition::coordinate_time(value);
  } else {
    invalid(field + ".kind", "expected proper_time, radius or coordinate_time");
  }
  if (j.contains("tolerance")) {
    s.tolerance = real(j["tolerance"], field + ".tolerance");
    if (!(s.tolerance > 0.0)) invalid(field + ".tolerance", "must be positive");
  }
  return s;
}

SettingInput parse_setting(const json& j, const std::string& field) {
  SettingInput s;
  if (!j.is_object()) invalid(field, "expected an object");
  if (j.contains("vector")) {
    allow_only(j, field, {"vector"});
    s.from_vector = true;
    s.vector = reals<3>(j["vector"], field + ".vector");
    if (norm(s.vector) == 0.0) invalid(field + ".vector", "must be non-zero");
    return s;
  }
  allow_only(j, field, {"polar_deg", "azimuth_deg"});
  s.azimuth_deg = real(required(j, field, "azimuth_deg"), field + ".azimuth_deg");
  if (j.contains("polar_deg")) s.polar_deg = real(j["polar_deg"], field + ".polar_deg");
  return s;
}

double unit_weight(const json& j, const std::string& field) {
  const double w = real(j, field);
  if (w < 0.0 || w > 1.0) invalid(field, "must lie in [0, 1]");
  return w;
}

constexpr std::array<std::string_view, 9> kSweepParameters = {
    "a_azimuth_deg", "a_polar_deg", "b_azimuth_deg", "b_polar_deg", "c_azimuth_deg",
    "c_polar_deg",   "w",           "w_b",           "w_c"};

void apply_sweep_value(ScenarioConfig& cfg, std::string_view p, double v) {
  auto weight = [&](double& w) {
    if (v < 0.0 || v > 1.0) invalid("sweep", "weight " + format_real(v) + " outside [0, 1]");
    w = v;
  };
  if (p == "a_azimuth_deg") cfg.a.azimuth_deg = v;
  else if (p == "a_polar_deg") cfg.a.polar_deg = v;
  else if (p == "b_azimuth_deg") cfg.b.azimuth_deg = v;
  else if (p == "b_polar_deg") cfg.b.polar_deg = v;
  else if (p == "c_azimuth_deg") cfg.c.azimuth_deg = v;
  else if (p == "c_polar_deg") cfg.c.polar_deg = v;
  else if (p == "w") {
    weight(cfg.synthetic->w_b);
    cfg.synthetic->w_c = v;
  } else if (p == "w_b") weight(cfg.synthetic->w_b);
  else if (p == "w_c") weight(cfg.synthetic->w_c);
}

SweepInput parse_sweep(const json& j, const ScenarioConfig& cfg) {
  allow_only(j, "sweep", {"parameter", "start", "stop", "step"});
  SweepInput s;
  s.parameter = text(required(j, "sweep", "parameter"), "sweep.parameter");
  if (std::find(kSweepParameters.begin(), kSweepParameters.end(), s.parameter) ==
      kSweepParameters.end()) {
    invalid("sweep.parameter", "unknown parameter '" + s.parameter + "'");
  }
  s.start = real(required(j, "sweep", "start"), "sweep.start");
  s.stop = real(required(j, "sweep", "stop"), "sweep.stop");
  s.step = real(required(j, "sweep", "step"), "sweep.step");
  if (s.step == 0.0) invalid("sweep.step", "must be non-zero");
  if (s.count() > 1e7) invalid("sweep", "more than 10^7 points");

  const char arm = s.parameter[0];
  if (s.parameter.starts_with("w")) {
    if (!cfg.synthetic) invalid("sweep.parameter", "weight sweeps need the synthetic block");
  } else {
    const SettingInput& in = arm == 'a' ? cfg.a : arm == 'b' ? cfg.b : cfg.c;
    if (in.from_vector) {
      invalid("sweep.parameter", std::string("settings.") + arm + " is given as a vector");
    }
  }
  return s;
}

}  // namespace

Direction3 SettingInput::direction() const {
  if (from_vector) return Direction3::normalized(vector);
  return Direction3::from_degrees(polar_deg, azimuth_deg);
}

double SweepInput::count() const {
  const double span = (stop - start) / step;
  return span >= -1e-9 ? std::floor(span + 1e-9) + 1.0 : 0.0;
}

std::vector<double> SweepInput::values() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(count());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

ScenarioConfig parse_config(std::string_view text_in) {
  json j;
  try {
    j = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  allow_only(j, "", {"name", "metric", "origin", "u1", "u2", "stop1", "stop2", "particle", "frame",
                     "settings", "tol", "mc", "lhv_audit", "synthetic", "sweep"});

  ScenarioConfig cfg;
  if (j.contains("name")) {
    cfg.name = text(j["name"], "name");
    if (cfg.name.empty() || cfg.name.find_first_of(",\"\r\n") != std::string::npos) {
      invalid("name", "must be non-empty without commas, quotes or newlines");
    }
  }

  const json& settings = required(j, "", "settings");
  allow_only(settings, "settings", {"a", "b", "c"});
  cfg.a = parse_setting(required(settings, "settings", "a"), "settings.a");
  cfg.b = parse_setting(required(settings, "settings", "b"), "settings.b");
  cfg.c = parse_setting(required(settings, "settings", "c"), "settings.c");

  if (j.contains("tol")) {
    cfg.tol = real(j["tol"], "tol");
    if (!(cfg.tol > 0.0 && cfg.tol <= 1e-3)) invalid("tol", "must lie in (0, 1e-3]");
  }
  if (j.contains("mc")) {
    const json& mc = j["mc"];
    allow_only(mc, "mc", {"n", "seed"});
    if (mc.contains("n")) cfg.mc_n = count(mc["n"], "mc.n");
    if (mc.contains("seed")) cfg.mc_seed = count(mc["seed"], "mc.seed");
    if (cfg.mc_n < kMinSamples) invalid("mc.n", "at least " + std::to_string(kMinSamples) + " samples");
  }
  if (j.contains("lhv_audit")) {
    if (!j["lhv_audit"].is_boolean()) invalid("lhv_audit", "expected true or false");
    cfg.lhv_audit = j["lhv_audit"].get<bool>();
  }

  if (j.contains("synthetic")) {
    for (const char* key : {"metric", "origin", "u1", "u2", "stop1", "stop2", "particle", "frame"}) {
      if (j.contains(key)) invalid(key, "not used with a synthetic block");
    }
    const json& s = j["synthetic"];
    allow_only(s, "synthetic", {"w_b", "w_c"});
    cfg.synthetic = SyntheticInput{unit_weight(required(s, "synthetic", "w_b"), "synthetic.w_b"),
                                   unit_weight(required(s, "synthetic", "w_c"), "synthetic.w_c")};
  } else {
    cfg.metric = parse_metric(required(j, "", "metric"));
    cfg.origin = parse_origin(required(j, "", "origin"), cfg.metric);
    if (j.contains("particle")) {
      const std::string p = text(j["particle"], "particle");
      if (p == "null") cfg.particle = CurveKind::Null;
      else if (p != "timelike") invalid("particle", "expected timelike or null");
    }
    if (j.contains("frame")) {
      const std::string f = text(j["frame"], "frame");
      if (f == "comoving") cfg.frame = FrameChoice::Comoving;
      else if (f != "static") invalid("frame", "expected static or comoving");
    }
    if (cfg.frame == FrameChoice::Comoving && cfg.particle == CurveKind::Null) {
      invalid("frame", "comoving frames need timelike particles");
    }
    cfg.u1 = parse_velocity(required(j, "", "u1"), "u1");
    cfg.u2 = parse_velocity(required(j, "", "u2"), "u2");
    check_velocity(cfg, cfg.u1, "u1");
    check_velocity(cfg, cfg.u2, "u2");
    if (resolve_velocity(cfg, cfg.u1).components == resolve_velocity(cfg, cfg.u2).components) {
      invalid("u2", "must differ from u1");
    }
    cfg.stop1 = parse_stop(required(j, "", "stop1"), "stop1", cfg.metric);
    cfg.stop2 = parse_stop(required(j, "", "stop2"), "stop2", cfg.metric);
  }

  if (j.contains("sweep")) cfg.sweep = parse_sweep(j["sweep"], cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

ojson setting_json(const SettingInput& s) {
  if (s.from_vector) return {{"vector", s.vector}};
  return {{"polar_deg", s.polar_deg}, {"azimuth_deg", s.azimuth_deg}};
}

ojson stop_json(const StopCondition& s) {
  const char* kind = s.kind == StopCondition::Kind::ProperTime ? "proper_time"
                     : s.kind == StopCondition::Kind::Radius   ? "radius"
                                                               : "coordinate_time";
  return {{"kind", kind}, {"value", s.target}, {"tolerance", s.tolerance}};
}

ojson velocity_json(const VelocityInput& v) {
  if (v.spatial_only) return {{"spatial", v.spatial}};
  return v.full;
}

ojson config_object(const ScenarioConfig& cfg) {
  ojson j;
  j["name"] = cfg.name;
  if (cfg.synthetic) {
    j["synthetic"] = {{"w_b", cfg.synthetic->w_b}, {"w_c", cfg.synthetic->w_c}};
  } else {
    if (cfg.metric.kind == MetricKind::Minkowski) {
      j["metric"] = {{"kind", "minkowski"}};
    } else {
      j["metric"] = {{"kind", "schwarzschild"},
                     {"mass", cfg.metric.mass},
                     {"horizon_epsilon", cfg.metric.horizon_epsilon}};
    }
    j["origin"] = cfg.origin.coords;
    j["u1"] = velocity_json(cfg.u1);
    j["u2"] = velocity_json(cfg.u2);
    j["stop1"] = stop_json(cfg.stop1);
    j["stop2"] = stop_json(cfg.stop2);
    j["particle"] = cfg.particle == CurveKind::Timelike ? "timelike" : "null";
    j["frame"] = cfg.frame == FrameChoice::Static ? "static" : "comoving";
  }
  j["settings"] = {{"a", setting_json(cfg.a)}, {"b", setting_json(cfg.b)}, {"c", setting_json(cfg.c)}};
  j["tol"] = cfg.tol;
  j["mc"] = {{"n", cfg.mc_n}, {"seed", cfg.mc_seed}};
  j["lhv_audit"] = cfg.lhv_audit;
  if (cfg.sweep) {
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"start", cfg.sweep->start},
                  {"stop", cfg.sweep->stop},
                  {"step", cfg.sweep->step}};
  }
  return j;
}

template <class F>
auto staged(const char* stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  }
}

PathSummary summarize(const GeodesicPath& p) {
  PathSummary s;
  s.start = p.front().x;
  s.end = p.back().x;
  s.proper_length = p.back().tau - p.front().tau;
  s.samples = p.samples().size();
  s.diagnostics = diagnose(p);
  return s;
}

void check_drift(const PathSummary& s, const char* which) {
  const auto& d = s.diagnostics;
  const double worst =
      std::max({d.max_normalization_drift, d.max_energy_drift, d.max_angular_momentum_drift});
  if (worst > kDriftLimit) {
    throw Error(ErrorCode::StepFailure,
                std::string(which) + " geodesic drift " + format_real(worst) + " exceeds " +
                    format_real(kDriftLimit),
                "drift");
  }
}

LocalFrame frame_at(const ScenarioConfig& cfg, const GeodesicPath& p) {
  if (cfg.frame == FrameChoice::Static) return build_static_frame(cfg.metric, p.end_point());
  return build_comoving_frame(cfg.metric, p.end_point(), p.end_tangent());
}

}  // namespace

std::string config_to_json(const ScenarioConfig& cfg) { return config_object(cfg).dump(2); }

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.name = cfg.name;
  rep.settings = cfg.settings();

  if (cfg.synthetic) {
    rep.synthetic = true;
    rep.proj_b = make_projection(cfg.synthetic->w_b, rep.settings.b);
    rep.proj_c = make_projection(cfg.synthetic->w_c, rep.settings.c);
  } else {
    GeodesicOptions gopt;
    gopt.tol = cfg.tol;
    const auto geo_l = staged("geodesic-left", [&] {
      return integrate_geodesic(cfg.metric, cfg.origin, resolve_velocity(cfg, cfg.u1), cfg.stop1,
                                cfg.particle, gopt);
    });
    const auto geo_r = staged("geodesic-right", [&] {
      return integrate_geodesic(cfg.metric, cfg.origin, resolve_velocity(cfg, cfg.u2), cfg.stop2,
                                cfg.particle, gopt);
    });
    rep.left = summarize(geo_l);
    rep.right = summarize(geo_r);
    check_drift(*rep.left, "left");
    check_drift(*rep.right, "right");

    const auto frame_l = staged("frames", [&] { return frame_at(cfg, geo_l); });
    const auto frame_r = staged("frames", [&] { return frame_at(cfg, geo_r); });
    const auto vb = staged("transport", [&] {
      return transport_R_to_L(geo_l, geo_r, embed_direction(frame_r, rep.settings.b)).v;
    });
    const auto vc = staged("transport", [&] {
      return transport_R_to_L(geo_l, geo_r, embed_direction(frame_r, rep.settings.c)).v;
    });
    rep.proj_b = staged("projection", [&] { return project_to_frame(frame_l, vb); });
    rep.proj_c = staged("projection", [&] { return project_to_frame(frame_l, vc); });
  }

  rep.inequality = generalized_bell_check(rep.settings, rep.proj_b, rep.proj_c);
  rep.angles = violation_condition(rep.settings, rep.proj_b, rep.proj_c);
  if (rep.angles.d_norm > 1e-12) rep.best = find_max_violation(rep.proj_b, rep.proj_c);

  if (cfg.lhv_audit) {
    const AuditCase c{rep.settings, rep.proj_b, rep.proj_c};
    const auto audit = staged("audit", [&] {
      return lhv_inequality_audit(make_sign_model(cfg.mc_seed), std::span(&c, 1), cfg.mc_n,
                                  cfg.mc_seed, opt.workers);
    });
    rep.audit = audit.entries.front();
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (!cfg.sweep) throw Error(ErrorCode::ValidationError, "sweep: missing");
  const auto values = cfg.sweep->values();
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), opt.workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.id = cfg.name + "/" + std::to_string(i);
    try {
      ScenarioConfig point = cfg;
      apply_sweep_value(point, cfg.sweep->parameter, values[i]);
      row.report = run_scenario(point, {1});
      row.status = row.report->inequality.swapped ? "ok_swapped" : "ok";
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
  });
  return rows;
}

namespace {

double angle_deg(const Direction3& x, const Direction3& y) {
  return std::acos(std::clamp(dot(x, y), -1.0, 1.0)) / kDeg;
}

}  // namespace

std::string sweep_csv_row(const SweepRow& row) {
  std::string out = row.id + "," + row.status;
  if (!row.report) {
    for (int i = 0; i < 11; ++i) out += ",nan";
    return out + ",0";
  }
  const auto& r = row.report->inequality;
  const auto& a = row.report->settings.a;
  for (double v : {angle_deg(a, r.b_rl), angle_deg(a, r.c_rl), angle_deg(r.b_rl, r.c_rl), r.w_b,
                   r.w_c, r.p_ab, r.p_ac, r.p_bc, r.lhs, r.rhs, r.margin}) {
    out += "," + format_real(v);
  }
  return out + (r.violated ? ",1" : ",0");
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out(kSweepHeader);
  out += "\n";
  for (const auto& row : rows) out += sweep_csv_row(row) + "\n";
  return out;
}

std::vector<double> horizon_radii(const HorizonSweepInput& in) {
  const double rh = 2.0 * in.mass;
  if (!(in.mass > 0.0) || !std::isfinite(in.mass)) invalid("mass", "must be positive");
  if (!(in.r_end > rh)) invalid("r-end", "must exceed 2M");
  if (!(in.r_start > in.r_end) || !std::isfinite(in.r_start)) {
    invalid("r-start", "must be finite and exceed r-end");
  }
  if (in.steps < 1) invalid("steps", "must be at least 1");
  std::vector<double> r{in.r_start};
  if (in.steps == 1) return r;
  const double x0 = in.r_start - rh;
  const double q = std::pow((in.r_end - rh) / x0, 1.0 / (in.steps - 1));
  for (int i = 1; i < in.steps - 1; ++i) r.push_back(rh + x0 * std::pow(q, i));
  r.push_back(in.r_end);
  return r;
}

ScenarioConfig horizon_config(const HorizonSweepInput& in, double r) {
  ScenarioConfig cfg;
  cfg.name = "horizon";
  cfg.metric = MetricSpec::schwarzschild(in.mass, in.horizon_epsilon);
  const double r0 = r + in.mass;
  cfg.origin = {{0.0, r0, std::numbers::pi / 2, 0.0}, Chart::Schwarzschild};
  // Launched at half the speed of light relative to the static observer at O.
  const double f0 = (r0 - 2.0 * in.mass) / r0;
  const double beta = 0.5, gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  cfg.u1.full = {gamma / std::sqrt(f0), gamma * beta * std::sqrt(f0), 0.0, 0.0};
  cfg.u2.full = {gamma / std::sqrt(f0), -gamma * beta * std::sqrt(f0), 0.0, 0.0};
  cfg.stop1 = StopCondition::proper_time(in.mass);
  cfg.stop2 = StopCondition::radius(r);
  cfg.frame = FrameChoice::Static;
  cfg.b.from_vector = true;
  cfg.b.vector = {1.0, 0.0, 0.0};
  cfg.a = cfg.b;
  cfg.c.azimuth_deg = 60.0;
  cfg.tol = in.tol;
  return cfg;
}

std::vector<HorizonRow> run_horizon_sweep(const HorizonSweepInput& in, const RunOptions& opt) {
  const auto radii = horizon_radii(in);
  const MetricSpec spec = MetricSpec::schwarzschild(in.mass, in.horizon_epsilon);
  std::vector<HorizonRow> rows(radii.size());
  parallel_for(radii.size(), opt.workers, [&](std::size_t i) {
    HorizonRow& row = rows[i];
    row.r = radii[i];
    if (!(row.r > spec.guard_radius())) {
      row.status = "horizon_guard";
      return;
    }
    try {
      RunReport rep = run_scenario(horizon_config(in, row.r), {1});
      if (rep.best) {
        rep.settings.a = rep.best->a;
        rep.inequality = rep.best->report;
        rep.angles = violation_condition(rep.settings, rep.proj_b, rep.proj_c);
      }
      row.status = rep.inequality.swapped ? "ok_swapped" : "ok";
      row.report = std::move(rep);
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
  });
  return rows;
}

std::string horizon_csv(const std::vector<HorizonRow>& rows, double mass) {
  std::string out(kHorizonHeader);
  out += "\n";
  for (const auto& row : rows) {
    out += format_real(row.r / mass) + "," + row.status;
    if (!row.report) {
      for (int i = 0; i < 8; ++i) out += ",nan";
      out += ",0\n";
      continue;
    }
    const auto& r = row.report->inequality;
    for (double v : {r.w_b, r.w_c, r.p_ab, r.p_ac, r.p_bc, r.lhs, r.rhs, r.margin}) {
      out += "," + format_real(v);
    }
    out += r.violated ? ",1\n" : ",0\n";
  }
  return out;
}

namespace {

template <std::size_t N>
std::string tuple(const std::array<double, N>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < N; ++i) out += (i ? ", " : "") + format_real(v[i]);
  return out + ")";
}

void path_text(std::ostringstream& os, const char* which, const PathSummary& p) {
  os << which << " end " << tuple(p.end) << ", proper length " << format_real(p.proper_length)
     << ", " << p.samples << " samples\n";
  os << "  drift: norm " << format_real(p.diagnostics.max_normalization_drift) << ", energy "
     << format_real(p.diagnostics.max_energy_drift) << ", L_z "
     << format_real(p.diagnostics.max_angular_momentum_drift) << "\n";
}

ojson path_json(const PathSummary& p) {
  return {{"start", p.start},
          {"end", p.end},
          {"proper_length", p.proper_length},
          {"samples", p.samples},
          {"energy", p.diagnostics.energy},
          {"angular_momentum", p.diagnostics.angular_momentum},
          {"normalization_drift", p.diagnostics.max_normalization_drift},
          {"energy_drift", p.diagnostics.max_energy_drift},
          {"angular_momentum_drift", p.diagnostics.max_angular_momentum_drift}};
}

ojson projection_json(const ProjectionResult& p) {
  return {{"w", p.w},
          {"direction", p.direction.vec()},
          {"degenerate", p.degenerate},
          {"time_component", p.time_component}};
}

ojson estimate_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"n", e.n}, {"seed", e.seed}};
}

}  // namespace

std::string report_text(const RunReport& r, bool timing) {
  std::ostringstream os;
  const auto& q = r.inequality;
  os << "scenario " << r.name << (r.synthetic ? " (synthetic weights)" : "") << "\n";
  if (r.left) path_text(os, "left ", *r.left);
  if (r.right) path_text(os, "right", *r.right);
  os << "w_b = " << format_real(q.w_b) << (q.degenerate_b ? " (degenerate)" : "") << ", w_c = "
     << format_real(q.w_c) << (q.degenerate_c ? " (degenerate)" : "")
     << (q.swapped ? ", b and c swapped so that w_b >= w_c" : "") << "\n";
  os << "b_RL = " << tuple(q.b_rl.vec()) << "\n";
  os << "c_RL = " << tuple(q.c_rl.vec()) << "\n";
  os << "P(a,b) = " << format_real(q.p_ab) << ", P(a,c) = " << format_real(q.p_ac)
     << ", P(b,c) = " << format_real(q.p_bc) << "\n";
  os << "lhs = " << format_real(q.lhs) << ", rhs = " << format_real(q.rhs)
     << ", margin = " << format_real(q.margin) << (q.violated ? ", violated" : ", satisfied")
     << "\n";
  if (r.angles.d_norm > 1e-12) {
    os << "cos phi = " << format_real(r.angles.cos_phi)
       << ", cos theta = " << format_real(r.angles.cos_theta)
       << (r.angles.condition_holds ? ", LHV condition holds" : ", LHV condition fails") << "\n";
  } else {
    os << "d vanishes, LHV condition holds trivially\n";
  }
  if (r.best) {
    os << "best a = " << tuple(r.best->a.vec())
       << ", margin = " << format_real(r.best->report.margin) << "\n";
  }
  if (r.audit) {
    const auto& e = *r.audit;
    os << "lhv audit (n = " << e.p_ab.n << ", seed = " << e.p_ab.seed
       << "): lhs = " << format_real(e.lhs) << ", rhs = " << format_real(e.rhs)
       << ", margin = " << format_real(e.margin) << ", sigma = " << format_real(e.sigma)
       << (e.pass ? ", pass" : ", FAIL") << "\n";
  }
  if (timing) os << "elapsed " << format_real(r.elapsed_seconds) << " s\n";
  return os.str();
}

std::string report_json(const RunReport& r, const ScenarioConfig& cfg, bool timing) {
  ojson j;
  j["config"] = config_object(cfg);
  if (r.left) j["left"] = path_json(*r.left);
  if (r.right) j["right"] = path_json(*r.right);
  j["proj_b"] = projection_json(r.proj_b);
  j["proj_c"] = projection_json(r.proj_c);
  const auto& q = r.inequality;
  j["inequality"] = {{"lhs", q.lhs},     {"rhs", q.rhs},     {"margin", q.margin},
                     {"violated", q.violated}, {"swapped", q.swapped}, {"w_b", q.w_b},
                     {"w_c", q.w_c},     {"b_RL", q.b_rl.vec()}, {"c_RL", q.c_rl.vec()},
                     {"P_ab", q.p_ab},   {"P_ac", q.p_ac},   {"P_bc", q.p_bc}};
  j["violation_condition"] = {{"d", r.angles.d},
                              {"d_norm", r.angles.d_norm},
                              {"cos_phi", r.angles.cos_phi},
                              {"cos_theta", r.angles.cos_theta},
                              {"condition_holds", r.angles.condition_holds}};
  if (r.best) j["max_violation"] = {{"a", r.best->a.vec()}, {"margin", r.best->report.margin}};
  if (r.audit) {
    const auto& e = *r.audit;
    j["lhv_audit"] = {{"P_ab", estimate_json(e.p_ab)},
                      {"P_ac", estimate_json(e.p_ac)},
                      {"P_bc", estimate_json(e.p_bc)},
                      {"lhs", e.lhs},
                      {"rhs", e.rhs},
                      {"margin", e.margin},
                      {"sigma", e.sigma},
                      {"pass", e.pass}};
  }
  if (timing) j["elapsed_seconds"] = r.elapsed_seconds;
  return j.dump(2) + "\n";
}

}  // namespace grbell
