#include "jacobi3d/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jacobi3d {

namespace {

const Frame& other_frame(const Frame& f) { return f == Frame::x() ? Frame::y() : Frame::x(); }

Expr det3(const Mat3Expr& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

Mat3Expr jacobian(const Diffeomorphism& phi, MapDirection dir, const Frame& source) {
    const std::array<Expr, 3>& comps =
        dir == MapDirection::Forward ? phi.forward : phi.inverse;
    const Frame& vars = dir == MapDirection::Forward ? source : other_frame(source);
    Mat3Expr out;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) out[i][k] = diff(comps[i], vars.names[k]);
    return out;
}

VerificationReport check_diffeomorphism(const Diffeomorphism& phi,
                                        const std::map<std::string, ParamSpec>& params,
                                        const SamplingConfig& cfg, const Frame& source) {
    const Frame& image = other_frame(source);
    const Expr det = det3(jacobian(phi, MapDirection::Forward, source));

    SamplePlan plan;
    plan.domain = phi.domain;
    plan.frame = source;
    plan.params = params;

    return sample_residual(
        [&](const Point& p) -> GuardedEval {
            EvalEnv env = make_env(p, source);
            std::array<double, 3> yv{};
            for (std::size_t i = 0; i < 3; ++i) {
                GuardedEval r = eval_guarded(phi.forward[i], env, cfg.magnitude_guard);
                if (!r.ok()) return r;
                yv[i] = r.value;
            }
            Point yp;
            yp.coords = yv;
            yp.params = p.params;
            EvalEnv env_y = make_env(yp, image);
            double worst = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                GuardedEval r = eval_guarded(phi.inverse[i], env_y, cfg.magnitude_guard);
                if (!r.ok()) return r;
                worst = std::max(worst, std::abs(r.value - p.coords[i]));
            }
            GuardedEval d = eval_guarded(det, env, cfg.magnitude_guard);
            if (!d.ok()) return d;
            if (std::abs(d.value) <= 1e-12)
                return {GuardedEval::Status::Ok, 1.0};  // degenerate Jacobian is a violation
            return {GuardedEval::Status::Ok, worst};
        },
        plan, cfg);
}

namespace {

Domain image_bounding_box(const StructureMatrix& S, const Diffeomorphism& phi) {
    const auto params = default_param_values(S);
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());

    auto absorb = [&](const std::array<double, 3>& x) {
        Point p;
        p.coords = x;
        p.params = params;
        EvalEnv env = make_env(p, S.frame);
        for (std::size_t i = 0; i < 3; ++i) {
            const double v = eval(phi.forward[i], env);
            lo[i] = std::min(lo[i], v);
            hi[i] = std::max(hi[i], v);
        }
    };

    // Corners of the source box plus a deterministic interior sample; exact
    // for coordinatewise-monotone maps, a usable approximation otherwise.
    for (int mask = 0; mask < 8; ++mask) {
        std::array<double, 3> x{};
        for (std::size_t i = 0; i < 3; ++i) {
            const Interval& iv = phi.domain.box[i];
            x[i] = (mask >> i) & 1 ? iv.hi : iv.lo;
        }
        absorb(x);
    }
    SamplePlan plan;
    plan.domain = phi.domain;
    plan.frame = S.frame;
    for (std::uint64_t s = 0; s < 32; ++s)
        absorb(sample_point(plan, 7u, s, 0).coords);

    Domain out;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!(lo[i] < hi[i])) throw expr_error("degenerate image domain in pushforward");
        out.box[i] = {lo[i], hi[i]};
        out.positive[i] = lo[i] >= 0.0;
    }
    return out;
}

}  // namespace

StructureMatrix pushforward(const StructureMatrix& S, const Diffeomorphism& phi,
                            std::optional<Domain> image_domain) {
    const Frame& from = S.frame;
    const Frame& to = other_frame(from);

    const Mat3Expr F = jacobian(phi, MapDirection::Forward, from);
    const Expr zero;
    const Mat3Expr J = {{{zero, S.u, neg(S.v)},
                         {neg(S.u), zero, S.w},
                         {S.v, neg(S.w), zero}}};

    auto entry = [&](std::size_t i, std::size_t j) {
        Expr acc;
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t l = 0; l < 3; ++l) acc = acc + F[i][k] * J[k][l] * F[j][l];
        return acc;
    };

    std::map<std::string, Expr> x_to_y;
    for (std::size_t k = 0; k < 3; ++k) x_to_y[from.names[k]] = phi.inverse[k];

    StructureMatrix out;
    out.u = substitute(entry(0, 1), x_to_y);
    out.v = substitute(entry(2, 0), x_to_y);
    out.w = substitute(entry(1, 2), x_to_y);
    out.frame = to;
    out.params = S.params;
    out.domain = image_domain ? *image_domain : image_bounding_box(S, phi);
    return out;
}

Diffeomorphism inverse_of(const Diffeomorphism& phi, const Domain& image_domain) {
    Diffeomorphism rev;
    rev.forward = phi.inverse;
    rev.inverse = phi.forward;
    rev.domain = image_domain;
    return rev;
}

}  // namespace jacobi3d
