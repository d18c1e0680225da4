#include "jacobi3d/family.hpp"

#include <algorithm>
#include <cmath>

namespace jacobi3d {

Expr lambda_of(const StructureMatrix& S) {
    const auto& n = S.frame.names;
    return diff(S.u - S.v, n[0]) + diff(S.w - S.u, n[1]) + diff(S.v - S.w, n[2]);
}

CaseKind classify_case(const StructureMatrix& S, const SamplingConfig& cfg) {
    return is_zero_on(lambda_of(S), plan_of(S), cfg).zero() ? CaseKind::CaseI
                                                            : CaseKind::CaseII_or_III;
}

VectorFieldExpr characteristic_field(const StructureMatrix& S) {
    return {{S.u - S.v, S.w - S.u, S.v - S.w}};
}

Expr pde_residual(const StructureMatrix& S, const Expr& xi) {
    const auto& n = S.frame.names;
    const VectorFieldExpr f = characteristic_field(S);
    return f.comps[0] * diff(xi, n[0]) + f.comps[1] * diff(xi, n[1]) +
           f.comps[2] * diff(xi, n[2]) - lambda_of(S) * xi;
}

VerificationReport check_pde(const StructureMatrix& S, const Expr& xi, const SamplingConfig& cfg) {
    return is_zero_on(pde_residual(S, xi), plan_of(S), cfg);
}

// ---------------------------------------------------------------------------
// Characteristic trajectories
// ---------------------------------------------------------------------------

namespace {

constexpr double kLocalErrorTol = 1e-6;
constexpr double kXiFloor = 1e-12;

struct CompiledField {
    std::array<CompiledExpr, 3> comps;
    CompiledExpr lambda;
    bool carry_xi = false;

    // State layout: (c1, c2, c3[, xi]).
    void deriv(const std::array<double, 4>& s, std::array<double, 4>& out) const {
        const std::array<double, 3> c{s[0], s[1], s[2]};
        for (std::size_t i = 0; i < 3; ++i) out[i] = comps[i](c);
        out[3] = carry_xi ? lambda(c) * s[3] : 0.0;
    }
};

bool finite_state(const std::array<double, 4>& s) {
    return std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]) &&
           std::isfinite(s[3]);
}

std::array<double, 4> rk4_step(const CompiledField& f, const std::array<double, 4>& s, double h) {
    std::array<double, 4> k1{}, k2{}, k3{}, k4{}, tmp{};
    f.deriv(s, k1);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    f.deriv(tmp, k2);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    f.deriv(tmp, k3);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + h * k3[i];
    f.deriv(tmp, k4);
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i)
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace

Trajectory integrate_characteristics(const StructureMatrix& S, const Point& x0, double t_end,
                                     double step, std::optional<double> xi0) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!S.domain.contains(x0.coords))
        throw std::invalid_argument("initial point lies outside the domain");

    const auto params = [&] {
        auto p = default_param_values(S);
        for (const auto& [name, value] : x0.params) p[name] = value;
        return p;
    }();

    CompiledField field;
    const VectorFieldExpr vf = characteristic_field(S);
    const std::span<const std::string> slots(S.frame.names);
    for (std::size_t i = 0; i < 3; ++i)
        field.comps[i] = CompiledExpr::compile(vf.comps[i], slots, params);
    field.lambda = CompiledExpr::compile(lambda_of(S), slots, params);
    field.carry_xi = xi0.has_value();

    Trajectory traj;
    traj.step = step;
    traj.frame = S.frame;

    std::array<double, 4> state{x0.coords[0], x0.coords[1], x0.coords[2], xi0.value_or(0.0)};
    double t = 0.0;
    auto record = [&] {
        TrajectorySample s;
        s.t = t;
        s.point.coords = {state[0], state[1], state[2]};
        s.point.params = params;
        if (field.carry_xi) s.xi = state[3];
        const std::array<double, 3> c{state[0], state[1], state[2]};
        if (std::max({std::abs(field.comps[0](c)), std::abs(field.comps[1](c)),
                      std::abs(field.comps[2](c))}) < 1e-10)
            ++traj.near_degenerate;
        traj.samples.push_back(std::move(s));
    };
    record();

    const long long n_steps = static_cast<long long>(std::ceil(t_end / step - 1e-12));
    for (long long k = 0; k < n_steps; ++k) {
        const double h = std::min(step, t_end - t);
        const std::array<double, 4> full = rk4_step(field, state, h);
        std::array<double, 4> half = rk4_step(field, state, 0.5 * h);
        half = rk4_step(field, half, 0.5 * h);
        if (!finite_state(full) || !finite_state(half)) {
            traj.complete = false;
            break;
        }
        double local_err = 0.0;
        for (int i = 0; i < 4; ++i) local_err = std::max(local_err, std::abs(full[i] - half[i]));
        if (local_err > kLocalErrorTol)
            throw integration_error("step rejected: local error estimate " +
                                    std::to_string(local_err) + " exceeds 1e-6 at t=" +
                                    std::to_string(t) + "; reduce the step size");
        state = half;
        t += h;
        if (!S.domain.contains({state[0], state[1], state[2]})) {
            traj.complete = false;
            break;
        }
        if (field.carry_xi && std::abs(state[3]) < kXiFloor) traj.xi_crossed_zero = true;
        record();
    }
    return traj;
}

std::vector<QuantityDrift> conservation_report(
    const Trajectory& T, const std::vector<std::pair<std::string, Expr>>& quantities,
    const std::map<std::string, double>& params) {
    if (T.samples.empty()) throw std::invalid_argument("empty trajectory");

    std::vector<QuantityDrift> out;
    for (const auto& [name, q] : quantities) {
        std::map<std::string, double> bound = T.samples.front().point.params;
        for (const auto& [k, v] : params) bound[k] = v;
        const CompiledExpr c =
            CompiledExpr::compile(q, std::span<const std::string>(T.frame.names), bound);

        QuantityDrift d;
        d.name = name;
        d.initial_value = c(T.samples.front().point.coords);
        d.relative = std::abs(d.initial_value) >= 1e-8;
        for (const TrajectorySample& s : T.samples) {
            const double v = c(s.point.coords);
            double drift = std::abs(v - d.initial_value);
            if (d.relative) drift /= std::abs(d.initial_value);
            d.max_drift = std::max(d.max_drift, drift);
        }
        out.push_back(std::move(d));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

StructureMatrix SolutionFamily::materialize(const Expr& with_psi) const {
    const std::map<std::string, Expr> repl{{"k1", k1_invariant}, {"k2", k2_invariant}};
    const Expr xi = substitute(with_psi, repl);
    StructureMatrix out = base;
    out.u = base.u + xi * multipliers[0];
    out.v = base.v + xi * multipliers[1];
    out.w = base.w + xi * multipliers[2];
    out.verified = false;
    return out;
}

namespace {

Expr coordinate_sum(const Frame& f) {
    return Expr::symbol(f.names[0]) + Expr::symbol(f.names[1]) + Expr::symbol(f.names[2]);
}

void require_psi_symbols(const Expr& psi) {
    for (const std::string& s : symbols_of(psi)) {
        if (s == "k1" || s == "k2") continue;
        if (classify_symbol(s) == SymbolKind::Parameter) continue;
        throw precondition_error("psi must be written over k1, k2 and parameters; found '" + s +
                                 "'");
    }
}

}  // namespace

SolutionFamily case1_family(const StructureMatrix& S, const Expr& casimir, const Expr& psi,
                            const SamplingConfig& cfg) {
    require_psi_symbols(psi);
    if (classify_case(S, cfg) != CaseKind::CaseI)
        throw precondition_error("case 1 requires lambda to vanish on the domain");
    const VerificationReport cas = is_casimir(casimir, S, cfg);
    if (!cas.zero())
        throw precondition_error("supplied Casimir fails verification (max residual " +
                                 std::to_string(cas.max_abs_residual) + ")");

    SolutionFamily fam;
    fam.base = S;
    fam.k1_invariant = coordinate_sum(S.frame);
    fam.k2_invariant = casimir;
    fam.psi = psi;
    return fam;
}

SolutionFamily case3_family(const StructureMatrix& S, const Diffeomorphism& phi,
                            const StructureMatrix& target, const Expr& casimir_y, const Expr& psi,
                            const SamplingConfig& cfg) {
    require_psi_symbols(psi);
    if (target.frame == S.frame)
        throw precondition_error("target must live in the opposite coordinate frame");

    // Pushforward of S through phi must agree with the supplied target.
    {
        const StructureMatrix pushed = pushforward(S, phi, target.domain);
        const std::array<const Expr*, 3> a{&pushed.u, &pushed.v, &pushed.w};
        const std::array<const Expr*, 3> b{&target.u, &target.v, &target.w};
        SamplingConfig match_cfg = cfg;
        match_cfg.tolerance = 1e-8;
        const VerificationReport match = sample_residual(
            [&](const Point& p) -> GuardedEval {
                EvalEnv env = make_env(p, S.frame);
                std::array<double, 3> yv{};
                for (std::size_t i = 0; i < 3; ++i) {
                    GuardedEval r = eval_guarded(phi.forward[i], env, cfg.magnitude_guard);
                    if (!r.ok()) return r;
                    yv[i] = r.value;
                }
                Point yp;
                yp.coords = yv;
                yp.params = p.params;
                EvalEnv env_y = make_env(yp, target.frame);
                double worst = 0.0;
                for (std::size_t i = 0; i < 3; ++i) {
                    GuardedEval ra = eval_guarded(*a[i], env_y, cfg.magnitude_guard);
                    if (!ra.ok()) return ra;
                    GuardedEval rb = eval_guarded(*b[i], env_y, cfg.magnitude_guard);
                    if (!rb.ok()) return rb;
                    worst = std::max(worst, std::abs(ra.value - rb.value));
                }
                return {GuardedEval::Status::Ok, worst};
            },
            plan_of(S), match_cfg);
        if (!match.zero())
            throw precondition_error(
                "pushforward of the base does not match the target (max mismatch " +
                std::to_string(match.max_abs_residual) + ")");
    }

    if (classify_case(target, cfg) != CaseKind::CaseI)
        throw precondition_error("target must have vanishing lambda (Case I in new coordinates)");
    const VerificationReport cas = is_casimir(casimir_y, target, cfg);
    if (!cas.zero())
        throw precondition_error("casimir_y fails verification against the target (max residual " +
                                 std::to_string(cas.max_abs_residual) + ")");

    // Invariants transported back: Psi arguments are (y1+y2+y3, C(y)) with
    // y = forward(x).
    std::map<std::string, Expr> y_to_fwd;
    for (std::size_t k = 0; k < 3; ++k) y_to_fwd[target.frame.names[k]] = phi.forward[k];
    const Expr k1x = substitute(coordinate_sum(target.frame), y_to_fwd);
    const Expr k2x = substitute(casimir_y, y_to_fwd);

    // Multipliers M_ij = sum_kl (dxi/dyk) A_kl (dxj/dyl) expressed in x,
    // with A the skew matrix carrying the (1,1,1) perturbation.
    const Expr one = Expr::constant(1.0);
    const Expr zero;
    const Mat3Expr A = {{{zero, one, neg(one)}, {neg(one), zero, one}, {one, neg(one), zero}}};
    const Mat3Expr G = jacobian(phi, MapDirection::Inverse, S.frame);  // dx/dy in y
    Mat3Expr P;  // dx/dy composed with y = forward(x)
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) P[i][k] = substitute(G[i][k], y_to_fwd);

    auto multiplier = [&](std::size_t i, std::size_t j) {
        Expr acc;
        for (std::size_t k = 0; k < 3; ++k)
            for (std::size_t l = 0; l < 3; ++l) acc = acc + P[i][k] * A[k][l] * P[j][l];
        return acc;
    };

    SolutionFamily fam;
    fam.base = S;
    fam.k1_invariant = k1x;
    fam.k2_invariant = k2x;
    fam.psi = psi;
    fam.multipliers = {multiplier(0, 1), multiplier(2, 0), multiplier(1, 2)};
    return fam;
}

// ---------------------------------------------------------------------------
// Case II machinery
// ---------------------------------------------------------------------------

namespace {

std::pair<int, int> non_pivot_indices(int pivot) {
    switch (pivot) {
        case 0: return {1, 2};
        case 1: return {0, 2};
        case 2: return {0, 1};
        default: throw std::invalid_argument("pivot index must be 0, 1 or 2");
    }
}

}  // namespace

VerificationReport verify_elimination(const StructureMatrix& S, const Expr& K1, const Expr& K2,
                                      int pivot, const Expr& alpha, const Expr& beta,
                                      const SamplingConfig& cfg) {
    const auto [i_first, i_second] = non_pivot_indices(pivot);
    const auto& names = S.frame.names;

    return sample_residual(
        [&, i_first = i_first, i_second = i_second](const Point& p) -> GuardedEval {
            EvalEnv env = make_env(p, S.frame);
            GuardedEval k1v = eval_guarded(K1, env, cfg.magnitude_guard);
            if (!k1v.ok()) return k1v;
            GuardedEval k2v = eval_guarded(K2, env, cfg.magnitude_guard);
            if (!k2v.ok()) return k2v;

            EvalEnv elim_env;
            elim_env.emplace(names[static_cast<std::size_t>(pivot)],
                             p.coords[static_cast<std::size_t>(pivot)]);
            elim_env.emplace("k1", k1v.value);
            elim_env.emplace("k2", k2v.value);
            for (const auto& [name, value] : p.params) elim_env.emplace(name, value);

            GuardedEval av = eval_guarded(alpha, elim_env, cfg.magnitude_guard);
            if (!av.ok()) return av;
            GuardedEval bv = eval_guarded(beta, elim_env, cfg.magnitude_guard);
            if (!bv.ok()) return bv;

            const double ra = std::abs(av.value - p.coords[static_cast<std::size_t>(i_first)]);
            const double rb = std::abs(bv.value - p.coords[static_cast<std::size_t>(i_second)]);
            return {GuardedEval::Status::Ok, std::max(ra, rb)};
        },
        plan_of(S), cfg);
}

K3Evaluator quadrature_K3(const StructureMatrix& S, const Expr& K1, const Expr& K2, int pivot,
                          const Expr& alpha, const Expr& beta, const QuadratureSpec& spec,
                          const SamplingConfig& cfg) {
    const VerificationReport elim = verify_elimination(S, K1, K2, pivot, alpha, beta, cfg);
    if (!elim.zero())
        throw precondition_error("elimination functions fail verification (max residual " +
                                 std::to_string(elim.max_abs_residual) + ")");

    const auto [i_first, i_second] = non_pivot_indices(pivot);
    const auto& names = S.frame.names;

    std::map<std::string, Expr> elim_map;
    elim_map[names[static_cast<std::size_t>(i_first)]] = alpha;
    elim_map[names[static_cast<std::size_t>(i_second)]] = beta;

    const Expr num = substitute(lambda_of(S), elim_map);
    const Expr den =
        substitute(characteristic_field(S).comps[static_cast<std::size_t>(pivot)], elim_map);

    const auto params = default_param_values(S);
    const std::array<std::string, 3> slots{names[static_cast<std::size_t>(pivot)], "k1", "k2"};

    K3Evaluator ev;
    ev.numerator_ = CompiledExpr::compile(num, std::span<const std::string>(slots), params);
    ev.denominator_ = CompiledExpr::compile(den, std::span<const std::string>(slots), params);
    ev.k1_of_x_ = CompiledExpr::compile(K1, std::span<const std::string>(names), params);
    ev.k2_of_x_ = CompiledExpr::compile(K2, std::span<const std::string>(names), params);
    ev.pivot_ = pivot;
    ev.spec_ = spec;
    ev.params_ = params;
    ev.frame_ = S.frame;
    return ev;
}

double K3Evaluator::H(double pivot, double k1, double k2) const {
    const double a = spec_.pivot_ref;
    const double b = pivot;
    if (a == b) return 1.0;

    auto kappa = [&](double s) {
        const std::array<double, 3> args{s, k1, k2};
        const double d = denominator_(args);
        if (!std::isfinite(d) || std::abs(d) < spec_.denom_guard)
            throw quadrature_error(
                "pivot characteristic component too close to zero along the quadrature path");
        const double n = numerator_(args);
        if (!std::isfinite(n)) throw quadrature_error("kappa undefined along the quadrature path");
        return n / d;
    };

    auto simpson = [&](int n) {
        const double h = (b - a) / n;
        double acc = kappa(a) + kappa(b);
        for (int i = 1; i < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * kappa(a + i * h);
        return acc * h / 3.0;
    };

    double prev = simpson(8);
    for (int n = 16; n <= (1 << 20); n *= 2) {
        const double cur = simpson(n);
        if (std::abs(cur - prev) <= spec_.rel_tol * std::max(1.0, std::abs(cur)))
            return std::exp(cur);
        prev = cur;
    }
    throw quadrature_error("composite Simpson failed to converge to the requested tolerance");
}

double K3Evaluator::k3(const Point& p, double xi) const {
    const double k1 = k1_of_x_(p.coords);
    const double k2 = k2_of_x_(p.coords);
    if (!std::isfinite(k1) || !std::isfinite(k2))
        throw quadrature_error("invariants undefined at the evaluation point");
    return xi / H(p.coords[static_cast<std::size_t>(pivot_)], k1, k2);
}

double K3Evaluator::explicit_xi(const Point& p, const Expr& g) const {
    const double k1 = k1_of_x_(p.coords);
    const double k2 = k2_of_x_(p.coords);
    EvalEnv env{{"k1", k1}, {"k2", k2}};
    for (const auto& [name, value] : params_) env.emplace(name, value);
    return H(p.coords[static_cast<std::size_t>(pivot_)], k1, k2) * eval(g, env);
}

// ---------------------------------------------------------------------------
// Lotka-Volterra exponents
// ---------------------------------------------------------------------------

LvExponents lv_exponents(double a12, double a31, double a23) {
    if (a12 == 0.0 || a31 == 0.0 || a23 == 0.0)
        throw std::invalid_argument("lv_exponents requires all three coefficients nonzero");
    const double product = a12 * a31 * a23;
    const int s = product > 0.0 ? 1 : -1;
    // (alpha*beta*gamma)^2 = s^3 / product = 1 / |product|.
    const double abg = std::sqrt(1.0 / std::abs(product));
    LvExponents e;
    e.sign = s;
    e.alpha = abg * a23 / s;  // alpha = abg / (beta*gamma), beta*gamma = s / a23
    e.beta = abg * a31 / s;
    e.gamma = abg * a12 / s;
    return e;
}

// ---------------------------------------------------------------------------
// Family-level verification
// ---------------------------------------------------------------------------

FamilyReport check_family(const SolutionFamily& F, const std::vector<Expr>& psi_set,
                          const SamplingConfig& cfg) {
    FamilyReport out;
    for (const Expr& psi : psi_set) {
        FamilyCheck check;
        check.psi_text = to_string(psi);
        check.report = check_jacobi(F.materialize(psi), cfg);
        out.all_zero = out.all_zero && check.report.zero();
        out.checks.push_back(std::move(check));
    }
    return out;
}

}  // namespace jacobi3d
