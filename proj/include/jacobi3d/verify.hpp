#pragma once

#include "jacobi3d/expr.hpp"

#include <cstdint>
#include <functional>
#include <string>

#include <json.hpp>

namespace jacobi3d {

struct sampling_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling policy shared by all identity checks. Points are derived from
// (seed, sample index, attempt) counters, so reports are deterministic and
// enlarging the sample count never changes already-drawn points.
struct SamplingConfig {
    int count = 1000;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
    double magnitude_guard = 1e6;
    int max_retries = 0;  // 0 selects the default budget of 100 * count

    int retry_budget() const { return max_retries > 0 ? max_retries : 100 * count; }
};

enum class Verdict { Zero, NonZero };

struct VerificationReport {
    Verdict verdict = Verdict::Zero;
    double max_abs_residual = 0.0;
    double mean_abs_residual = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
    std::optional<Point> witness;  // present iff NonZero
    double witness_residual = 0.0;
    int skipped = 0;

    bool zero() const { return verdict == Verdict::Zero; }
    nlohmann::json to_json() const;
};

// Where and how to sample: a box, the frame its coordinates bind to, and
// parameter values or ranges.
struct SamplePlan {
    Domain domain;
    Frame frame = Frame::x();
    std::map<std::string, ParamSpec> params;
};

Point sample_point(const SamplePlan& plan, std::uint64_t seed, std::uint64_t sample,
                   std::uint64_t attempt);

// Evaluates an arbitrary residual functional over sampled points. Points
// where the functional is undefined or trips the magnitude guard are
// resampled (counted in `skipped`) until the retry budget runs out, which
// raises sampling_error.
using ResidualFn = std::function<GuardedEval(const Point&)>;
VerificationReport sample_residual(const ResidualFn& fn, const SamplePlan& plan,
                                   const SamplingConfig& cfg);

// Zero iff |e| <= tolerance at every accepted sample; otherwise NonZero
// with the max-residual point as witness.
VerificationReport is_zero_on(const Expr& e, const SamplePlan& plan, const SamplingConfig& cfg);
VerificationReport is_zero_on(const Expr& e, const Domain& d, int count, std::uint64_t seed,
                              double tolerance);

}  // namespace jacobi3d
