#include "jacobi3d/verify.hpp"

#include <cmath>

namespace jacobi3d {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform draw in the open interval (0, 1), keyed by counters only.
double unit_open(std::uint64_t seed, std::uint64_t sample, std::uint64_t attempt,
                 std::uint64_t dim) {
    std::uint64_t h = splitmix64(seed ^ 0x8f1bbcdcbfa53e0bULL);
    h = splitmix64(h ^ (sample * 0xd6e8feb86659fd93ULL));
    h = splitmix64(h ^ (attempt * 0xa5a5a5a5a5a5a5a5ULL));
    h = splitmix64(h ^ (dim * 0x2545f4914f6cdd1dULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

Point sample_point(const SamplePlan& plan, std::uint64_t seed, std::uint64_t sample,
                   std::uint64_t attempt) {
    Point p;
    for (std::uint64_t i = 0; i < 3; ++i) {
        const Interval& iv = plan.domain.box[i];
        p.coords[i] = iv.lo + unit_open(seed, sample, attempt, i) * (iv.hi - iv.lo);
    }
    std::uint64_t dim = 3;
    for (const auto& [name, spec] : plan.params) {
        p.params[name] = spec.is_fixed()
                             ? spec.lo
                             : spec.lo + unit_open(seed, sample, attempt, dim) * (spec.hi - spec.lo);
        ++dim;
    }
    return p;
}

VerificationReport sample_residual(const ResidualFn& fn, const SamplePlan& plan,
                                   const SamplingConfig& cfg) {
    if (cfg.count < 1) throw std::invalid_argument("sampling count must be >= 1");
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    plan.domain.validate();

    VerificationReport report;
    report.seed = cfg.seed;

    const int budget = cfg.retry_budget();
    int attempts_used = 0;
    double sum = 0.0;
    double worst = -1.0;
    Point worst_point;

    for (int i = 0; i < cfg.count; ++i) {
        bool accepted = false;
        for (std::uint64_t attempt = 0; !accepted; ++attempt) {
            if (++attempts_used > budget)
                throw sampling_error(
                    "exhausted retry budget while sampling (domain too restrictive)");
            Point p = sample_point(plan, cfg.seed, static_cast<std::uint64_t>(i), attempt);
            GuardedEval r = fn(p);
            if (!r.ok()) {
                ++report.skipped;
                continue;
            }
            const double a = std::abs(r.value);
            sum += a;
            if (a > worst) {
                worst = a;
                worst_point = p;
            }
            accepted = true;
        }
    }

    report.n_samples = cfg.count;
    report.max_abs_residual = worst;
    report.mean_abs_residual = sum / cfg.count;
    if (worst > cfg.tolerance) {
        report.verdict = Verdict::NonZero;
        report.witness = worst_point;
        report.witness_residual = worst;
    }
    return report;
}

VerificationReport is_zero_on(const Expr& e, const SamplePlan& plan, const SamplingConfig& cfg) {
    return sample_residual(
        [&](const Point& p) { return eval_guarded(e, make_env(p, plan.frame), cfg.magnitude_guard); },
        plan, cfg);
}

VerificationReport is_zero_on(const Expr& e, const Domain& d, int count, std::uint64_t seed,
                              double tolerance) {
    SamplePlan plan;
    plan.domain = d;
    SamplingConfig cfg;
    cfg.count = count;
    cfg.seed = seed;
    cfg.tolerance = tolerance;
    return is_zero_on(e, plan, cfg);
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["verdict"] = zero() ? "zero" : "nonzero";
    j["max_abs_residual"] = max_abs_residual;
    j["mean_abs_residual"] = mean_abs_residual;
    j["n_samples"] = n_samples;
    j["seed"] = seed;
    if (witness) {
        nlohmann::json w;
        w["x1"] = witness->coords[0];
        w["x2"] = witness->coords[1];
        w["x3"] = witness->coords[2];
        if (!witness->params.empty()) w["params"] = witness->params;
        w["residual"] = witness_residual;
        j["witness"] = w;
    } else {
        j["witness"] = nullptr;
    }
    j["skipped"] = skipped;
    return j;
}

}  // namespace jacobi3d
