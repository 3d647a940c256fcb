#include "grbell/lhv.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "grbell/error.hpp"
#include "grbell/parallel.hpp"

namespace grbell {
namespace {

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

double weight2(const ProjectionResult& p) { return p.degenerate ? 0.0 : p.w * p.w; }

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

template <std::size_t K>
using BlockMoments = std::array<Moments, K>;

std::size_t block_count(std::uint64_t n) { return static_cast<std::size_t>((n + kBlockSize - 1) / kBlockSize); }

// Draws the samples of one block and accumulates K product observables.
template <std::size_t K, class Observe>
BlockMoments<K> run_block(const LHVModel& model, std::uint64_t n, std::uint64_t seed,
                          std::uint32_t stream, std::size_t block, Observe&& observe) {
  RandomStream rng(seed, stream_key(stream, static_cast<std::uint32_t>(block)));
  const std::uint64_t begin = static_cast<std::uint64_t>(block) * kBlockSize;
  const std::uint64_t end = std::min<std::uint64_t>(n, begin + kBlockSize);
  BlockMoments<K> m{};
  for (std::uint64_t i = begin; i < end; ++i) {
    const HiddenVariable lambda = model.sample(rng);
    const std::array<double, K> x = observe(lambda);
    for (std::size_t k = 0; k < K; ++k) {
      m[k].sum += x[k];
      m[k].sum_sq += x[k] * x[k];
    }
  }
  return m;
}

template <std::size_t K>
std::array<MCEstimate, K> finish(const std::vector<BlockMoments<K>>& blocks, std::uint64_t n,
                                 std::uint64_t seed) {
  std::array<MCEstimate, K> out{};
  for (std::size_t k = 0; k < K; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& b : blocks) {
      sum += b[k].sum;
      sum_sq += b[k].sum_sq;
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    out[k] = {mean, std::sqrt(var / nn), n, seed};
  }
  return out;
}

void require_samples(std::uint64_t n) {
  if (n < kMinSamples) {
    throw Error(ErrorCode::InsufficientSamples,
                "Monte Carlo estimates need at least " + std::to_string(kMinSamples) + " samples");
  }
}

}  // namespace

LHVModel make_sign_model(std::uint64_t seed) {
  LHVModel m;
  m.name = "sign";
  m.seed = seed;
  m.sample = [](RandomStream& rng) { return HiddenVariable{rng.unit_vector()}; };
  m.respond_A = [](const Direction3& a, const HiddenVariable& h) {
    return sign(dot(a.vec(), h.lambda));
  };
  m.respond_B = [](const ProjectionResult& p, const HiddenVariable& h) {
    return -weight2(p) * sign(dot(p.direction.vec(), h.lambda));
  };
  return m;
}

MCEstimate correlation_mc(const LHVModel& model, const Direction3& a,
                          const ProjectionResult& proj_b, std::uint64_t n, std::uint64_t seed,
                          unsigned workers, std::uint32_t stream) {
  require_samples(n);
  std::vector<BlockMoments<1>> blocks(block_count(n));
  parallel_for(blocks.size(), workers, [&](std::size_t b) {
    blocks[b] = run_block<1>(model, n, seed, stream, b, [&](const HiddenVariable& h) {
      return std::array<double, 1>{model.respond_A(a, h) * model.respond_B(proj_b, h)};
    });
  });
  return finish(blocks, n, seed)[0];
}

bool verify_anticorrelation(const LHVModel& model, const Direction3& a,
                            const ProjectionResult& proj_a, std::uint64_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  const Direction3& a_rl = proj_a.degenerate ? a : proj_a.direction;
  const double w2 = weight2(proj_a);
  for (std::uint64_t i = 0; i < n; ++i) {
    const HiddenVariable h = model.sample(rng);
    if (model.respond_B(proj_a, h) != -w2 * model.respond_A(a_rl, h)) return false;
  }
  return true;
}

AuditReport lhv_inequality_audit(const LHVModel& model, std::span<const AuditCase> cases,
                                 std::uint64_t n, std::uint64_t seed, unsigned workers) {
  require_samples(n);
  AuditReport report;
  report.entries.resize(cases.size());
  parallel_for(cases.size(), workers, [&](std::size_t k) {
    const AuditCase& c = cases[k];
    const bool swapped = needs_swap(c.proj_b, c.proj_c);
    const ProjectionResult& pb = swapped ? c.proj_c : c.proj_b;
    const ProjectionResult& pc = swapped ? c.proj_b : c.proj_c;
    const Direction3& a = c.settings.a;
    const Direction3& b_rl = pb.direction;

    std::vector<BlockMoments<3>> blocks(block_count(n));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b] = run_block<3>(model, n, seed, static_cast<std::uint32_t>(k), b,
                               [&](const HiddenVariable& h) {
                                 const double a_l = model.respond_A(a, h);
                                 return std::array<double, 3>{
                                     a_l * model.respond_B(pb, h), a_l * model.respond_B(pc, h),
                                     model.respond_A(b_rl, h) * model.respond_B(pc, h)};
                               });
    }
    const auto est = finish(blocks, n, seed);

    AuditEntry e;
    e.p_ab = est[0];
    e.p_ac = est[1];
    e.p_bc = est[2];
    e.swapped = swapped;
    e.lhs = std::abs(e.p_ab.mean - e.p_ac.mean);
    e.rhs = weight2(pb) + e.p_bc.mean;
    e.margin = e.lhs - e.rhs;
    e.sigma = std::sqrt(e.p_ab.std_error * e.p_ab.std_error + e.p_ac.std_error * e.p_ac.std_error +
                        e.p_bc.std_error * e.p_bc.std_error);
    e.pass = e.margin <= kSigmaThreshold * e.sigma + kInequalityTol;
    report.entries[k] = e;
  });
  for (const auto& e : report.entries) {
    if (!e.pass) ++report.failures;
  }
  report.pass = report.failures == 0;
  return report;
}

}  // namespace grbell
