#pragma once

// Local hidden-variable models: outcomes A(a, lambda) = +-1 on the left arm and
// B(b_RL, lambda) = +-w^2(b) on the right arm, with lambda drawn from a shared
// density. Correlations are Monte Carlo estimates over reproducible streams.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grbell/bell.hpp"
#include "grbell/random.hpp"

namespace grbell {

struct HiddenVariable {
  Vec3 lambda{};  // unit vector
};

struct LHVModel {
  std::string name;
  std::uint64_t seed = 0;
  std::function<HiddenVariable(RandomStream&)> sample;
  std::function<double(const Direction3&, const HiddenVariable&)> respond_A;
  std::function<double(const ProjectionResult&, const HiddenVariable&)> respond_B;
};

// lambda uniform on the sphere, A = sign(a . lambda), B = -w^2 sign(b_RL . lambda),
// with sign(0) = +1.
LHVModel make_sign_model(std::uint64_t seed = 0);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kMinSamples = 100;
inline constexpr std::uint64_t kBlockSize = 4096;
inline constexpr double kSigmaThreshold = 4.0;

// Samples are split in blocks of kBlockSize, block k drawing from stream
// (stream, k); partial sums are reduced in block order, so the estimate does
// not depend on `workers`.
MCEstimate correlation_mc(const LHVModel& model, const Direction3& a,
                          const ProjectionResult& proj_b, std::uint64_t n, std::uint64_t seed,
                          unsigned workers = 0, std::uint32_t stream = 0);

// Checks B(proj_a, lambda) == -w^2(a) A(a_RL, lambda) on n sampled lambdas.
// `a` stands in for a_RL when the projection is degenerate.
bool verify_anticorrelation(const LHVModel& model, const Direction3& a,
                            const ProjectionResult& proj_a, std::uint64_t n, std::uint64_t seed);

struct AuditCase {
  SettingsTriple settings;
  ProjectionResult proj_b;
  ProjectionResult proj_c;
};

struct AuditEntry {
  MCEstimate p_ab;
  MCEstimate p_ac;
  MCEstimate p_bc;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs
  double sigma = 0.0;   // combined standard error
  bool swapped = false;
  bool pass = true;  // margin <= kSigmaThreshold * sigma + kInequalityTol
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  std::size_t failures = 0;
  bool pass = true;
};

// Estimates P(a,b), P(a,c) and P(b_RL,c) for every case from one common set of
// lambda draws per case (streams keyed by case index) and checks
// |P(a,b) - P(a,c)| <= w^2(b) + P(b_RL,c) within kSigmaThreshold standard errors.
AuditReport lhv_inequality_audit(const LHVModel& model, std::span<const AuditCase> cases,
                                 std::uint64_t n, std::uint64_t seed, unsigned workers = 0);

}  // namespace grbell
