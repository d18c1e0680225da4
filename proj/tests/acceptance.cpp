// Acceptance suite: identity-reproduction and property checks for the whole
// library, one pass/fail line per criterion. Exit code is the number of
// failed criteria.

#include "jacobi3d/document.hpp"

#include "test_support.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

using namespace jacobi3d;
using jacobi3d::testing::random_point;
using jacobi3d::testing::random_polynomial;

namespace {

double eval_at(const Expr& e, const Point& p, const Frame& f) { return eval(e, make_env(p, f)); }

std::vector<std::string> case1_base_names() {
    std::vector<std::string> out;
    for (const auto& [name, description] : catalog::list())
        if (classify_case(catalog::get(name).structure) == CaseKind::CaseI) out.push_back(name);
    return out;
}

std::vector<Expr> psi_test_set() {
    return {parse("0"), parse("1"), parse("k1"), parse("k2"), parse("k1*k2"), parse("k1^2 - k2")};
}

std::vector<Diffeomorphism> test_diffeomorphisms(const Domain& d) {
    std::vector<Diffeomorphism> out;
    Diffeomorphism identity;
    identity.forward = {parse("x1"), parse("x2"), parse("x3")};
    identity.inverse = {parse("y1"), parse("y2"), parse("y3")};
    identity.domain = d;
    out.push_back(identity);

    Diffeomorphism scale;
    scale.forward = {parse("2*x1"), parse("2*x2"), parse("2*x3")};
    scale.inverse = {parse("y1/2"), parse("y2/2"), parse("y3/2")};
    scale.domain = d;
    out.push_back(scale);

    Diffeomorphism stretch;
    stretch.forward = {parse("2*x1"), parse("0.5*x2"), parse("3*x3")};
    stretch.inverse = {parse("y1/2"), parse("2*y2"), parse("y3/3")};
    stretch.domain = d;
    out.push_back(stretch);

    Diffeomorphism shear;
    shear.forward = {parse("x1 + 0.5*x2"), parse("x2"), parse("x3")};
    shear.inverse = {parse("y1 - 0.5*y2"), parse("y2"), parse("y3")};
    shear.domain = d;
    out.push_back(shear);

    Diffeomorphism bend;
    bend.forward = {parse("x1"), parse("x2"), parse("x3 + 0.01*x1^2")};
    bend.inverse = {parse("y1"), parse("y2"), parse("y3 - 0.01*y1^2")};
    bend.domain = d;
    out.push_back(bend);
    return out;
}

// Ten deterministic interior starting points for trajectory tests.
std::vector<Point> start_points(const Domain& box, std::uint64_t seed,
                                const std::map<std::string, double>& params) {
    SamplePlan plan;
    plan.domain = box;
    std::vector<Point> out;
    for (std::uint64_t i = 0; i < 10; ++i) {
        Point p = sample_point(plan, seed, i, 0);
        p.params = params;
        out.push_back(p);
    }
    return out;
}

// --------------------------------------------------------------------------
// Criteria
// --------------------------------------------------------------------------

bool criterion_catalog_soundness(std::string& detail) {
    double worst_jacobi = 0.0, worst_casimir = 0.0;
    bool ok = true;
    for (const auto& [name, description] : catalog::list()) {
        const CatalogEntry& e = catalog::get(name);
        const VerificationReport jac = check_jacobi(e.structure);  // 1000 samples, tol 1e-9
        const VerificationReport cas = is_casimir(e.casimir, e.structure);
        ok = ok && jac.zero() && cas.zero() && jac.max_abs_residual < 1e-9;
        worst_jacobi = std::max(worst_jacobi, jac.max_abs_residual);
        worst_casimir = std::max(worst_casimir, cas.max_abs_residual);
    }
    std::ostringstream s;
    s << "max jacobi residual " << worst_jacobi << ", max casimir residual " << worst_casimir;
    detail = s.str();
    return ok;
}

bool criterion_lambda_reproduction(std::string& detail) {
    double worst = 0.0;
    std::mt19937_64 rng(201);
    for (const auto& [name, description] : catalog::list()) {
        if (name == "darboux") continue;  // the five classic structures carry recorded formulas
        const CatalogEntry& e = catalog::get(name);
        const Expr lam = lambda_of(e.structure);
        const auto params = default_param_values(e.structure);
        for (int i = 0; i < 100; ++i) {
            Point p = random_point(rng, e.structure.domain);
            p.params = params;
            const EvalEnv env = make_env(p, e.structure.frame);
            worst = std::max(worst, std::abs(eval(lam, env) - eval(e.lambda_expected, env)));
        }
    }
    std::ostringstream s;
    s << "max |lambda - recorded formula| = " << worst;
    detail = s.str();
    return worst < 1e-10;
}

bool criterion_linearization(std::string& detail) {
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (const char* name : {"so3", "kermack_mckendrick"}) {
        const CatalogEntry& entry = catalog::get(name);
        const StructureMatrix& S = entry.structure;
        const auto params = default_param_values(S);
        for (int trial = 0; trial < 20; ++trial) {
            const Expr xi = random_polynomial(rng);
            StructureMatrix perturbed = S;
            perturbed.u = S.u + xi;
            perturbed.v = S.v + xi;
            perturbed.w = S.w + xi;
            const Expr lhs = jacobi_residual(perturbed);
            const Expr rhs = pde_residual(S, xi);
            for (int i = 0; i < 100; ++i) {
                Point p = random_point(rng, S.domain);
                p.params = params;
                worst = std::max(worst, std::abs(eval_at(lhs, p, S.frame) -
                                                 eval_at(rhs, p, S.frame)));
            }
        }
    }
    std::ostringstream s;
    s << "max |jacobi(base+xi) - linear PDE residual| = " << worst;
    detail = s.str();
    return worst < 1e-8;
}

bool criterion_case1_families(std::string& detail) {
    SamplingConfig cfg;
    cfg.tolerance = 1e-8;
    double worst = 0.0;
    bool ok = true;
    int families = 0;
    for (const std::string& name : case1_base_names()) {
        const CatalogEntry& e = catalog::get(name);
        const SolutionFamily fam = case1_family(e.structure, e.casimir, parse("k1"), cfg);
        const FamilyReport report = check_family(fam, psi_test_set(), cfg);
        ok = ok && report.all_zero;
        for (const FamilyCheck& c : report.checks) {
            worst = std::max(worst, c.report.max_abs_residual);
            ++families;
        }
    }
    std::ostringstream s;
    s << families << " materialized families, max residual " << worst;
    detail = s.str();
    return ok && worst < 1e-8;
}

bool criterion_kermack_case2(std::string& detail) {
    const CatalogEntry& e = catalog::get("kermack_mckendrick");
    const Expr K1 = parse("x1 + x2 + x3");

    StructureMatrix with_k = e.structure;
    with_k.params["k"] = ParamSpec::range(0.5, 2.0);
    const VerificationReport pde = check_pde(with_k, parse("k*x1*x2"));
    if (!pde.zero() || pde.max_abs_residual >= 1e-9) {
        detail = "xi = k*x1*x2 failed the PDE check";
        return false;
    }

    const VerificationReport elim =
        verify_elimination(e.structure, K1, e.casimir, e.elimination->pivot,
                           e.elimination->alpha, e.elimination->beta);
    if (!elim.zero()) {
        detail = "elimination verification failed";
        return false;
    }

    QuadratureSpec spec;
    spec.pivot_ref = 2.5;
    const K3Evaluator k3 = quadrature_K3(e.structure, K1, e.casimir, e.elimination->pivot,
                                         e.elimination->alpha, e.elimination->beta, spec);

    Domain starts;
    starts.box = {Interval{0.9, 1.1}, Interval{1.8, 2.2}, Interval{2.8, 3.2}};
    double worst_ratio = 0.0, worst_drift = 0.0;
    for (const Point& x0 : start_points(starts, 11, default_param_values(e.structure))) {
        const double xi0 = x0.coords[0] * x0.coords[1];
        const Trajectory traj = integrate_characteristics(e.structure, x0, 1.0, 1e-3, xi0);
        if (!traj.complete) {
            detail = "characteristic left the domain";
            return false;
        }
        const double k3_ref = k3.k3(traj.front().point, *traj.front().xi);
        auto closed = [](const TrajectorySample& s) {
            return (*s.xi / s.point.coords[1]) * std::exp(s.point.coords[2]);  // r = a = 1
        };
        const double ratio_ref = closed(traj.front()) / k3_ref;
        for (std::size_t i = 0; i < traj.samples.size(); i += 25) {
            const TrajectorySample& s = traj.samples[i];
            const double k3_here = k3.k3(s.point, *s.xi);
            worst_drift = std::max(worst_drift, std::abs(k3_here / k3_ref - 1.0));
            worst_ratio = std::max(worst_ratio,
                                   std::abs(closed(s) / k3_here / ratio_ref - 1.0));
        }
    }
    std::ostringstream s;
    s << "level-set ratio deviation " << worst_ratio << ", carried-xi K3 drift " << worst_drift;
    detail = s.str();
    return worst_ratio < 1e-5 && worst_drift < 1e-5;
}

bool criterion_lotka_volterra_case3(std::string& detail) {
    const LvExponents lv = lv_exponents(1.0, 1.0, 4.0);
    if (1.0 * lv.alpha * lv.beta != 1.0 || 1.0 * lv.alpha * lv.gamma != 1.0 ||
        4.0 * lv.beta * lv.gamma != 1.0) {
        detail = "exponent products are not exactly 1";
        return false;
    }

    const CatalogEntry& e = catalog::get("lotka_volterra");
    const StructureMatrix pushed = pushforward(e.structure, e.case3->phi, e.case3->target.domain);
    std::mt19937_64 rng(203);
    const auto params = default_param_values(e.structure);
    double worst_push = 0.0;
    for (int i = 0; i < 100; ++i) {
        Point p = random_point(rng, e.case3->target.domain);
        p.params = params;
        worst_push = std::max(
            {worst_push,
             std::abs(eval_at(pushed.u, p, Frame::y()) - p.coords[0] * p.coords[1]),
             std::abs(eval_at(pushed.v, p, Frame::y()) - p.coords[0] * p.coords[2]),
             std::abs(eval_at(pushed.w, p, Frame::y()) - p.coords[1] * p.coords[2])});
    }
    if (worst_push >= 1e-9) {
        std::ostringstream s;
        s << "pushforward mismatch " << worst_push;
        detail = s.str();
        return false;
    }

    SamplingConfig cfg;
    cfg.tolerance = 1e-8;
    const SolutionFamily fam =
        case3_family(e.structure, e.case3->phi, e.case3->target, e.case3->casimir_y, parse("k1"),
                     cfg);
    const FamilyReport report =
        check_family(fam, {parse("1"), parse("k1"), parse("k1*k2")}, cfg);
    double worst_family = 0.0;
    for (const FamilyCheck& c : report.checks)
        worst_family = std::max(worst_family, c.report.max_abs_residual);
    std::ostringstream s;
    s << "pushforward mismatch " << worst_push << ", family residual " << worst_family;
    detail = s.str();
    return report.all_zero && worst_family < 1e-8;
}

bool criterion_darboux_case3(std::string& detail) {
    const CatalogEntry& darboux = catalog::get("darboux");
    Diffeomorphism identity;
    identity.forward = {parse("x1"), parse("x2"), parse("x3")};
    identity.inverse = {parse("y1"), parse("y2"), parse("y3")};
    identity.domain = darboux.structure.domain;
    StructureMatrix target;
    target.u = Expr::constant(1.0);
    target.v = Expr::constant(0.0);
    target.w = Expr::constant(0.0);
    target.frame = Frame::y();
    target.domain = darboux.structure.domain;

    const SolutionFamily fam =
        case3_family(darboux.structure, identity, target, parse("y3"), parse("k1*k2"));
    const StructureMatrix m = fam.materialize();
    std::mt19937_64 rng(204);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Point p = random_point(rng, darboux.structure.domain);
        const double psi = (p.coords[0] + p.coords[1] + p.coords[2]) * p.coords[2];
        worst = std::max({worst, std::abs(eval_at(m.u, p, Frame::x()) - (1.0 + psi)),
                          std::abs(eval_at(m.v, p, Frame::x()) - psi),
                          std::abs(eval_at(m.w, p, Frame::x()) - psi)});
    }
    std::ostringstream s;
    s << "max deviation from {1+psi, psi, psi} = " << worst;
    detail = s.str();
    return worst < 1e-12;
}

bool criterion_transform_laws(std::string& detail) {
    std::mt19937_64 rng(205);
    double worst_roundtrip = 0.0;
    bool preserved = true;
    for (const auto& [name, description] : catalog::list()) {
        const CatalogEntry& e = catalog::get(name);
        const auto params = default_param_values(e.structure);
        for (const Diffeomorphism& phi : test_diffeomorphisms(e.structure.domain)) {
            const StructureMatrix pushed = pushforward(e.structure, phi);
            preserved = preserved && check_jacobi(pushed).zero();

            const StructureMatrix back = pushforward(pushed, inverse_of(phi, pushed.domain));
            for (int i = 0; i < 100; ++i) {
                Point p = random_point(rng, e.structure.domain);
                p.params = params;
                worst_roundtrip = std::max(
                    {worst_roundtrip,
                     std::abs(eval_at(back.u, p, Frame::x()) - eval_at(e.structure.u, p, Frame::x())),
                     std::abs(eval_at(back.v, p, Frame::x()) - eval_at(e.structure.v, p, Frame::x())),
                     std::abs(eval_at(back.w, p, Frame::x()) -
                              eval_at(e.structure.w, p, Frame::x()))});
            }
        }
    }
    std::ostringstream s;
    s << "round-trip deviation " << worst_roundtrip
      << (preserved ? ", all pushforwards verified" : ", a pushforward FAILED verification");
    detail = s.str();
    return preserved && worst_roundtrip < 1e-9;
}

bool criterion_characteristic_conservation(std::string& detail) {
    double worst = 0.0;
    for (const std::string& name : case1_base_names()) {
        const CatalogEntry& e = catalog::get(name);
        Domain starts = Domain::cube(-0.8, 0.8);
        for (const Point& x0 : start_points(starts, 31, default_param_values(e.structure))) {
            const Trajectory traj = integrate_characteristics(e.structure, x0, 10.0, 1e-3);
            if (!traj.complete) {
                detail = "trajectory left the domain for base " + name;
                return false;
            }
            const auto drifts = conservation_report(
                traj, {{"K1", parse("x1 + x2 + x3")}, {"C", e.casimir}});
            for (const QuantityDrift& d : drifts) worst = std::max(worst, d.max_drift);
        }
    }
    std::ostringstream s;
    s << "max K1/Casimir drift over " << case1_base_names().size() * 10 << " trajectories = "
      << worst;
    detail = s.str();
    return worst < 1e-6;
}

bool criterion_negative_controls(std::string& detail) {
    StructureMatrix bad;
    bad.u = parse("x3");
    bad.v = parse("x1");
    bad.w = Expr::constant(0.0);
    bad.domain = Domain::cube(-2.0, 2.0);
    const VerificationReport r = check_jacobi(bad);
    const bool rejected = !r.zero() && r.witness.has_value();

    const CatalogEntry& so3 = catalog::get("so3");
    SolutionFamily corrupted = case1_family(so3.structure, so3.casimir, parse("k1"));
    corrupted.multipliers[0] = Expr::constant(2.0);
    SamplingConfig cfg;
    cfg.tolerance = 1e-8;
    const bool corrupted_caught = !check_family(corrupted, {parse("k1")}, cfg).all_zero;

    bool case1_refused = false;
    const CatalogEntry& kmck = catalog::get("kermack_mckendrick");
    try {
        case1_family(kmck.structure, kmck.casimir, parse("k1"));
    } catch (const precondition_error&) {
        case1_refused = true;
    }

    std::ostringstream s;
    s << "{x3,x1,0} " << (rejected ? "rejected" : "ACCEPTED") << ", corrupted multiplier "
      << (corrupted_caught ? "caught" : "MISSED") << ", case 1 on Kermack-McKendrick "
      << (case1_refused ? "refused" : "ALLOWED");
    detail = s.str();
    return rejected && corrupted_caught && case1_refused;
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "catalog soundness (Jacobi + Casimirs)", criterion_catalog_soundness},
        {2, "lambda reproduction", criterion_lambda_reproduction},
        {3, "ansatz substitution linearizes exactly", criterion_linearization},
        {4, "case I families verify for the psi test set", criterion_case1_families},
        {5, "Kermack-McKendrick case II quadrature", criterion_kermack_case2},
        {6, "Lotka-Volterra case III family", criterion_lotka_volterra_case3},
        {7, "Darboux case III sanity", criterion_darboux_case3},
        {8, "transform laws (round trip + Jacobi preservation)", criterion_transform_laws},
        {9, "characteristic conservation", criterion_characteristic_conservation},
        {10, "negative controls", criterion_negative_controls},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& err) {
            detail = std::string("exception: ") + err.what();
        }
        if (!ok) ++failures;
        std::printf("[%2d] %s  %s (%s)\n", c.id, ok ? "PASS" : "FAIL", c.name, detail.c_str());
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
