#include "jacobi3d/catalog.hpp"

#include <stdexcept>

namespace jacobi3d {
namespace catalog {

namespace {

CatalogEntry make_constant() {
    CatalogEntry e;
    e.name = "constant";
    e.description = "constant skew-symmetric structure {u0, v0, w0}, defaults (1, 2, 3)";
    e.notes = "every constant 3D skew matrix solves the Jacobi equation; Casimir is linear";
    e.structure.u = parse("u0");
    e.structure.v = parse("v0");
    e.structure.w = parse("w0");
    e.structure.domain = Domain::cube(-50.0, 50.0);
    e.structure.params = {{"u0", ParamSpec::fixed(1.0)},
                          {"v0", ParamSpec::fixed(2.0)},
                          {"w0", ParamSpec::fixed(3.0)}};
    e.structure.verified = true;
    e.casimir = parse("w0*x1 + v0*x2 + u0*x3");
    e.lambda_expected = Expr::constant(0.0);
    return e;
}

CatalogEntry make_so3() {
    CatalogEntry e;
    e.name = "so3";
    e.description = "Lie-Poisson structure of so(3): {x3, x2, x1}";
    e.notes = "Casimir is the squared radius; lambda vanishes identically";
    e.structure.u = parse("x3");
    e.structure.v = parse("x2");
    e.structure.w = parse("x1");
    e.structure.domain = Domain::cube(-5.0, 5.0);
    e.structure.verified = true;
    e.casimir = parse("x1^2 + x2^2 + x3^2");
    e.lambda_expected = Expr::constant(0.0);
    return e;
}

CatalogEntry make_ray_optics() {
    CatalogEntry e;
    e.name = "ray_optics";
    e.description = "Hamiltonian ray optics structure {4*x3, -2*x1, -2*x2}";
    e.notes = "Lie-Poisson type; Casimir x1*x2 - x3^2; lambda vanishes identically";
    e.structure.u = parse("4*x3");
    e.structure.v = parse("-2*x1");
    e.structure.w = parse("-2*x2");
    e.structure.domain = Domain::cube(-5.0, 5.0);
    e.structure.verified = true;
    e.casimir = parse("x1*x2 - x3^2");
    e.lambda_expected = Expr::constant(0.0);
    return e;
}

CatalogEntry make_kermack_mckendrick() {
    CatalogEntry e;
    e.name = "kermack_mckendrick";
    e.description =
        "Kermack-McKendrick epidemic structure {-r*x1*x2, 0, -a*x2} on the positive orthant";
    e.notes = "lambda = r*(x1-x2) - a is not identically zero; Case II applies with the "
              "elimination through K1 and the logarithmic Casimir";
    e.structure.u = parse("-r*x1*x2");
    e.structure.v = Expr::constant(0.0);
    e.structure.w = parse("-a*x2");
    e.structure.domain = Domain::positive_cube(1e-6, 25.0);
    e.structure.params = {{"r", ParamSpec::fixed(1.0)}, {"a", ParamSpec::fixed(1.0)}};
    e.structure.verified = true;
    e.casimir = parse("x3 + (a/r)*ln(x1)");
    e.lambda_expected = parse("r*(x1 - x2) - a");
    EliminationData elim;
    elim.pivot = 2;  // x3; x1 and x2 recovered through K1, K2
    elim.alpha = parse("exp((r/a)*(k2 - x3))");
    elim.beta = parse("k1 - x3 - exp((r/a)*(k2 - x3))");
    e.elimination = elim;
    return e;
}

CatalogEntry make_lotka_volterra() {
    CatalogEntry e;
    e.name = "lotka_volterra";
    e.description = "generalized Lotka-Volterra structure {a12*x1*x2, a31*x1*x3, a23*x2*x3} on "
                    "the positive orthant";
    e.notes = "lambda does not vanish and K1, K2 admit no elimination; the power map "
              "y = (x1^alpha, x2^beta, x3^gamma) reaches Case I coordinates";
    e.structure.u = parse("a12*x1*x2");
    e.structure.v = parse("a31*x1*x3");
    e.structure.w = parse("a23*x2*x3");
    e.structure.domain = Domain::positive_cube(0.1, 5.0);
    e.structure.params = {{"a12", ParamSpec::fixed(1.0)},
                          {"a31", ParamSpec::fixed(1.0)},
                          {"a23", ParamSpec::fixed(4.0)}};
    e.structure.verified = true;
    e.casimir = parse("x1^a23 * x2^a31 * x3^a12");
    e.lambda_expected = parse("(a31 - a12)*x1 + (a12 - a23)*x2 + (a23 - a31)*x3");

    // Case III route for the default coefficients.
    const LvExponents lv = lv_exponents(1.0, 1.0, 4.0);
    Case3Data c3;
    c3.phi.forward = {pow(Expr::symbol("x1"), lv.alpha), pow(Expr::symbol("x2"), lv.beta),
                      pow(Expr::symbol("x3"), lv.gamma)};
    c3.phi.inverse = {pow(Expr::symbol("y1"), 1.0 / lv.alpha),
                      pow(Expr::symbol("y2"), 1.0 / lv.beta),
                      pow(Expr::symbol("y3"), 1.0 / lv.gamma)};
    c3.phi.domain = e.structure.domain;
    const Expr sgn = Expr::constant(static_cast<double>(lv.sign));
    c3.target.u = sgn * Expr::symbol("y1") * Expr::symbol("y2");
    c3.target.v = sgn * Expr::symbol("y1") * Expr::symbol("y3");
    c3.target.w = sgn * Expr::symbol("y2") * Expr::symbol("y3");
    c3.target.frame = Frame::y();
    Domain ydom;
    for (std::size_t i = 0; i < 3; ++i) {
        const Interval& iv = e.structure.domain.box[i];
        const double ex = i == 0 ? lv.alpha : (i == 1 ? lv.beta : lv.gamma);
        ydom.box[i] = {std::pow(iv.lo, ex), std::pow(iv.hi, ex)};
        ydom.positive[i] = true;
    }
    c3.target.domain = ydom;
    c3.target.verified = true;
    c3.casimir_y = Expr::symbol("y1") * Expr::symbol("y2") * Expr::symbol("y3");
    e.case3 = c3;
    return e;
}

CatalogEntry make_darboux() {
    CatalogEntry e;
    e.name = "darboux";
    e.description = "Darboux canonical form {1, 0, 0} (constant rank 2)";
    e.notes = "the canonical Case III target; every regular 3D structure reduces to it";
    e.structure.u = Expr::constant(1.0);
    e.structure.v = Expr::constant(0.0);
    e.structure.w = Expr::constant(0.0);
    e.structure.domain = Domain::cube(-20.0, 20.0);
    e.structure.verified = true;
    e.casimir = parse("x3");
    e.lambda_expected = Expr::constant(0.0);
    return e;
}

const std::vector<CatalogEntry>& entries() {
    static const std::vector<CatalogEntry> all = [] {
        std::vector<CatalogEntry> v;
        v.push_back(make_constant());
        v.push_back(make_so3());
        v.push_back(make_ray_optics());
        v.push_back(make_kermack_mckendrick());
        v.push_back(make_lotka_volterra());
        v.push_back(make_darboux());
        return v;
    }();
    return all;
}

}  // namespace

const CatalogEntry& get(std::string_view name) {
    for (const CatalogEntry& e : entries())
        if (e.name == name) return e;
    throw std::out_of_range("unknown catalog entry '" + std::string(name) + "'");
}

std::vector<std::pair<std::string, std::string>> list() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const CatalogEntry& e : entries()) out.emplace_back(e.name, e.description);
    return out;
}

}  // namespace catalog
}  // namespace jacobi3d
