#pragma once

// End-to-end pipeline: two geodesics from a common origin, transport of the
// right-hand settings to the left frame, projection, quantum inequality and
// optional LHV audit. Configs are strict JSON documents.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grbell/bell.hpp"
#include "grbell/geodesic.hpp"
#include "grbell/lhv.hpp"

namespace grbell {

// A measurement direction as written in the config: either angles in degrees
// or an explicit 3-vector in the frame legs.
struct SettingInput {
  bool from_vector = false;
  double polar_deg = 90.0;
  double azimuth_deg = 0.0;
  Vec3 vector{1.0, 0.0, 0.0};

  Direction3 direction() const;
};

struct VelocityInput {
  bool spatial_only = false;
  Vec4 full{};     // complete 4-velocity, must already be normalized
  Vec3 spatial{};  // time component solved from the normalization
};

enum class FrameChoice { Static, Comoving };

struct SyntheticInput {
  double w_b = 1.0;
  double w_c = 1.0;
};

struct SweepInput {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  // Points start + i*step up to stop; none when step points away from stop.
  double count() const;
  std::vector<double> values() const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  MetricSpec metric = MetricSpec::minkowski();
  SpacetimePoint origin{{0.0, 0.0, 0.0, 0.0}, Chart::Cartesian};
  VelocityInput u1;
  VelocityInput u2;
  StopCondition stop1;
  StopCondition stop2;
  CurveKind particle = CurveKind::Timelike;
  FrameChoice frame = FrameChoice::Static;
  SettingInput a, b, c;
  double tol = 1e-12;
  std::uint64_t mc_n = 100'000;
  std::uint64_t mc_seed = 0;
  bool lhv_audit = false;
  std::optional<SyntheticInput> synthetic;
  std::optional<SweepInput> sweep;

  SettingsTriple settings() const { return {a.direction(), b.direction(), c.direction()}; }
};

// Throws Error{ParseError} for malformed JSON and Error{ValidationError} naming
// the offending field otherwise.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Full config with every default filled in.
std::string config_to_json(const ScenarioConfig& cfg);

struct PathSummary {
  Vec4 start{};
  Vec4 end{};
  double proper_length = 0.0;
  std::size_t samples = 0;
  GeodesicDiagnostics diagnostics;
};

struct RunReport {
  std::string name;
  bool synthetic = false;
  std::optional<PathSummary> left;
  std::optional<PathSummary> right;
  SettingsTriple settings;
  ProjectionResult proj_b;
  ProjectionResult proj_c;
  InequalityReport inequality;
  ViolationAngles angles;
  std::optional<MaxViolation> best;  // absent when d vanishes
  std::optional<AuditEntry> audit;
  double elapsed_seconds = 0.0;
};

// Conservation drift above this marks the run failed.
inline constexpr double kDriftLimit = 1e-8;

struct RunOptions {
  unsigned workers = 0;
};

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opt = {});

struct SweepRow {
  std::string id;
  std::string status;  // "ok", "ok_swapped" or the error name
  std::optional<RunReport> report;
};

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const RunOptions& opt = {});

inline constexpr std::string_view kSweepHeader =
    "scenario_id,status,theta_ab_deg,theta_ac_deg,theta_bc_deg,w_b,w_c,P_ab,P_ac,P_bc,lhs,rhs,"
    "margin,violated";

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_csv_row(const SweepRow& row);

struct HorizonSweepInput {
  double mass = 1.0;
  double r_start = 20.0;
  double r_end = 2.1;
  int steps = 10;
  double horizon_epsilon = 1e-6;
  double tol = 1e-12;
};

struct HorizonRow {
  double r = 0.0;
  std::string status;  // "ok", "horizon_guard" or the error name
  std::optional<RunReport> report;
};

// Radii spaced geometrically in r - 2M from r_start down to r_end.
std::vector<double> horizon_radii(const HorizonSweepInput& in);

// For each radius, R sits at r on a radial infall from an origin one mass
// above it; b is radial and c 60 degrees off it in R's static frame, and a is
// the analytic optimum at L.
std::vector<HorizonRow> run_horizon_sweep(const HorizonSweepInput& in, const RunOptions& opt = {});
ScenarioConfig horizon_config(const HorizonSweepInput& in, double r);

inline constexpr std::string_view kHorizonHeader =
    "r_over_M,status,w_b,w_c,P_ab,P_ac,P_bc,lhs,rhs,margin,violated";

std::string horizon_csv(const std::vector<HorizonRow>& rows, double mass);

std::string report_text(const RunReport& r, bool timing = false);
std::string report_json(const RunReport& r, const ScenarioConfig& cfg, bool timing = false);

// Real numbers in reports use 17 significant digits.
std::string format_real(double x);

}  // namespace grbell
