#include "jacobi3d/catalog.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace jacobi3d;
using jacobi3d::testing::random_point;
using jacobi3d::testing::random_polynomial;

TEST_CASE("the catalog lists six entries in a stable order") {
    const auto entries = catalog::list();
    REQUIRE(entries.size() == 6);
    std::vector<std::string> names;
    for (const auto& [name, description] : entries) {
        names.push_back(name);
        CHECK(!description.empty());
        CHECK(catalog::get(name).name == name);  // round trip
    }
    const std::vector<std::string> expected{"constant", "so3",            "ray_optics",
                                            "kermack_mckendrick", "lotka_volterra", "darboux"};
    CHECK(names == expected);
    CHECK(catalog::get("kermack_mckendrick").description.find("positive orthant") !=
          std::string::npos);
    CHECK_THROWS_AS(catalog::get("unknown"), std::out_of_range);
}

TEST_CASE("every entry passes its own invariants") {
    for (const auto& [name, description] : catalog::list()) {
        INFO("entry ", name);
        const CatalogEntry& e = catalog::get(name);
        CHECK(check_jacobi(e.structure).zero());
        CHECK(is_casimir(e.casimir, e.structure).zero());

        // lambda_of agrees with the recorded formula at 100 sampled points
        const Expr lam = lambda_of(e.structure);
        std::mt19937_64 rng(101);
        const auto params = default_param_values(e.structure);
        for (int i = 0; i < 100; ++i) {
            Point p = random_point(rng, e.structure.domain);
            p.params = params;
            const EvalEnv env = make_env(p, e.structure.frame);
            CHECK(std::abs(eval(lam, env) - eval(e.lambda_expected, env)) < 1e-10);
        }
    }
}

TEST_CASE("default parameter bindings") {
    const CatalogEntry& kmck = catalog::get("kermack_mckendrick");
    CHECK(kmck.structure.params.at("r").lo == 1.0);
    CHECK(kmck.structure.params.at("a").lo == 1.0);
    const CatalogEntry& lv = catalog::get("lotka_volterra");
    CHECK(lv.structure.params.at("a12").lo == 1.0);
    CHECK(lv.structure.params.at("a31").lo == 1.0);
    CHECK(lv.structure.params.at("a23").lo == 4.0);
    const CatalogEntry& c = catalog::get("constant");
    CHECK(c.structure.params.at("u0").lo == 1.0);
    CHECK(c.structure.params.at("v0").lo == 2.0);
    CHECK(c.structure.params.at("w0").lo == 3.0);
}

TEST_CASE("the constant entry's Casimir is w0*x1 + v0*x2 + u0*x3 at the defaults") {
    const CatalogEntry& c = catalog::get("constant");
    std::mt19937_64 rng(102);
    const auto params = default_param_values(c.structure);
    for (int i = 0; i < 20; ++i) {
        Point p = random_point(rng, c.structure.domain);
        p.params = params;
        const double expected = 3.0 * p.coords[0] + 2.0 * p.coords[1] + 1.0 * p.coords[2];
        CHECK(eval(c.casimir, make_env(p, Frame::x())) == doctest::Approx(expected));
    }
}

TEST_CASE("equal constant entries make the PDE trivial") {
    // u0 = v0 = w0 != 0: the characteristic field vanishes and lambda = 0,
    // so every differentiable xi solves the linear PDE.
    StructureMatrix S = catalog::get("constant").structure;
    S.params["u0"] = ParamSpec::fixed(2.0);
    S.params["v0"] = ParamSpec::fixed(2.0);
    S.params["w0"] = ParamSpec::fixed(2.0);
    CHECK(classify_case(S) == CaseKind::CaseI);
    std::mt19937_64 rng(103);
    for (int i = 0; i < 5; ++i) CHECK(check_pde(S, random_polynomial(rng)).zero());
    CHECK(check_pde(S, parse("exp(x1)*ln(x2 + 60)")).zero());
}

TEST_CASE("darboux entry is a valid Case III target") {
    const CatalogEntry& d = catalog::get("darboux");
    CHECK(d.structure.u.is_constant(1.0));
    CHECK(classify_case(d.structure) == CaseKind::CaseI);
    CHECK(is_casimir(d.casimir, d.structure).zero());
}

TEST_CASE("the Lotka-Volterra entry carries a consistent case 3 block") {
    const CatalogEntry& lv = catalog::get("lotka_volterra");
    REQUIRE(lv.case3.has_value());
    CHECK(check_diffeomorphism(lv.case3->phi, lv.structure.params).zero());
    CHECK(classify_case(lv.case3->target) == CaseKind::CaseI);
    CHECK(is_casimir(lv.case3->casimir_y, lv.case3->target).zero());
}
