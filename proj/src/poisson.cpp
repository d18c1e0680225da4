#include "jacobi3d/poisson.hpp"

#include <cmath>

namespace jacobi3d {

SamplePlan plan_of(const StructureMatrix& S) {
    SamplePlan plan;
    plan.domain = S.domain;
    plan.frame = S.frame;
    plan.params = S.params;
    return plan;
}

std::map<std::string, double> default_param_values(const StructureMatrix& S) {
    std::map<std::string, double> out;
    for (const auto& [name, spec] : S.params) out[name] = spec.is_fixed() ? spec.lo : spec.midpoint();
    return out;
}

namespace {

// Full matrix from the (u, v, w) entries: J12 = u, J31 = v, J23 = w.
std::array<std::array<Expr, 3>, 3> full_matrix(const StructureMatrix& S) {
    const Expr zero;
    return {{{zero, S.u, neg(S.v)},
             {neg(S.u), zero, S.w},
             {S.v, neg(S.w), zero}}};
}

}  // namespace

Expr jacobi_residual(const StructureMatrix& S) {
    const auto& n = S.frame.names;
    const Expr& u = S.u;
    const Expr& v = S.v;
    const Expr& w = S.w;
    return u * diff(v, n[0]) - v * diff(u, n[0]) + w * diff(u, n[1]) - u * diff(w, n[1]) +
           v * diff(w, n[2]) - w * diff(v, n[2]);
}

Expr bracket(const Expr& f, const Expr& g, const StructureMatrix& S) {
    const auto& n = S.frame.names;
    const auto J = full_matrix(S);
    std::array<Expr, 3> df, dg;
    for (int i = 0; i < 3; ++i) {
        df[static_cast<std::size_t>(i)] = diff(f, n[static_cast<std::size_t>(i)]);
        dg[static_cast<std::size_t>(i)] = diff(g, n[static_cast<std::size_t>(i)]);
    }
    Expr acc;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) acc = acc + df[i] * J[i][j] * dg[j];
    return acc;
}

VectorFieldExpr hamiltonian_vector_field(const StructureMatrix& S, const Expr& H) {
    const auto& n = S.frame.names;
    const auto J = full_matrix(S);
    VectorFieldExpr field;
    for (std::size_t i = 0; i < 3; ++i) {
        Expr acc;
        for (std::size_t j = 0; j < 3; ++j) acc = acc + J[i][j] * diff(H, n[j]);
        field.comps[i] = acc;
    }
    return field;
}

int rank_at(const StructureMatrix& S, const Point& p, double tol) {
    const EvalEnv env = make_env(p, S.frame);
    const double m = std::max({std::abs(eval(S.u, env)), std::abs(eval(S.v, env)),
                               std::abs(eval(S.w, env))});
    return m > tol ? 2 : 0;
}

VerificationReport check_jacobi(const StructureMatrix& S, const SamplingConfig& cfg) {
    return is_zero_on(jacobi_residual(S), plan_of(S), cfg);
}

VerificationReport is_casimir(const Expr& C, const StructureMatrix& S, const SamplingConfig& cfg) {
    std::array<Expr, 3> brackets;
    for (std::size_t j = 0; j < 3; ++j)
        brackets[j] = bracket(C, Expr::symbol(S.frame.names[j]), S);
    // One residual functional: the worst of the three bracket values.
    return sample_residual(
        [&](const Point& p) -> GuardedEval {
            const EvalEnv env = make_env(p, S.frame);
            double worst = 0.0;
            for (const Expr& b : brackets) {
                GuardedEval r = eval_guarded(b, env, cfg.magnitude_guard);
                if (!r.ok()) return r;
                worst = std::max(worst, std::abs(r.value));
            }
            return {GuardedEval::Status::Ok, worst};
        },
        plan_of(S), cfg);
}

}  // namespace jacobi3d
