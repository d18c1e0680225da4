// Python bindings for the jacobi3d core: expression engine, structure
// matrices, verification, solution families, transforms and the catalog.

#include "jacobi3d/document.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace jacobi3d;

namespace {

EvalEnv env_from_dict(const py::dict& values) {
    EvalEnv env;
    for (const auto& item : values)
        env[item.first.cast<std::string>()] = item.second.cast<double>();
    return env;
}

std::map<std::string, ParamSpec> params_from_dict(const py::dict& params) {
    std::map<std::string, ParamSpec> out;
    for (const auto& item : params) {
        const std::string name = item.first.cast<std::string>();
        if (py::isinstance<py::tuple>(item.second) || py::isinstance<py::list>(item.second)) {
            const auto pair = item.second.cast<std::pair<double, double>>();
            out[name] = ParamSpec::range(pair.first, pair.second);
        } else {
            out[name] = ParamSpec::fixed(item.second.cast<double>());
        }
    }
    return out;
}

Expr as_expr(const py::object& obj) {
    if (py::isinstance<py::str>(obj)) return parse(obj.cast<std::string>());
    return obj.cast<Expr>();
}

Point point_from(const std::array<double, 3>& coords, const py::dict& params) {
    Point p;
    p.coords = coords;
    for (const auto& item : params)
        p.params[item.first.cast<std::string>()] = item.second.cast<double>();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Solution families of the 3D Jacobi identities from a known Poisson structure";

    py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
    py::register_exception<eval_error>(m, "EvalError", PyExc_ValueError);
    py::register_exception<precondition_error>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<document_error>(m, "DocumentError", PyExc_ValueError);

    py::class_<Expr>(m, "Expr")
        .def(py::init([](const std::string& text) { return parse(text); }), py::arg("text"))
        .def("__str__", [](const Expr& e) { return to_string(e); })
        .def("__repr__", [](const Expr& e) { return "Expr('" + to_string(e) + "')"; })
        .def("eval",
             [](const Expr& e, const py::dict& values) { return eval(e, env_from_dict(values)); },
             py::arg("values"))
        .def("diff", [](const Expr& e, const std::string& var) { return diff(e, var); },
             py::arg("var"))
        .def("substitute",
             [](const Expr& e, const py::dict& repl) {
                 std::map<std::string, Expr> map;
                 for (const auto& item : repl)
                     map[item.first.cast<std::string>()] = as_expr(
                         py::reinterpret_borrow<py::object>(item.second));
                 return substitute(e, map);
             },
             py::arg("replacements"))
        .def("simplify", [](const Expr& e) { return simplify(e); })
        .def("symbols", [](const Expr& e) { return symbols_of(e); });

    m.def("parse", [](const std::string& text) { return parse(text); }, py::arg("text"));

    py::class_<Domain>(m, "Domain")
        .def_static("cube", &Domain::cube, py::arg("lo"), py::arg("hi"))
        .def_static("positive_cube", &Domain::positive_cube, py::arg("lo"), py::arg("hi"))
        .def("__repr__", [](const Domain& d) {
            std::string s = "Domain(";
            for (std::size_t i = 0; i < 3; ++i) {
                s += "[" + std::to_string(d.box[i].lo) + ", " + std::to_string(d.box[i].hi) + "]";
                if (i < 2) s += ", ";
            }
            return s + ")";
        });

    py::class_<SamplingConfig>(m, "SamplingConfig")
        .def(py::init([](int count, std::uint64_t seed, double tolerance, double guard) {
                 SamplingConfig cfg;
                 cfg.count = count;
                 cfg.seed = seed;
                 cfg.tolerance = tolerance;
                 cfg.magnitude_guard = guard;
                 return cfg;
             }),
             py::arg("count") = 1000, py::arg("seed") = 42, py::arg("tolerance") = 1e-9,
             py::arg("guard") = 1e6)
        .def_readwrite("count", &SamplingConfig::count)
        .def_readwrite("seed", &SamplingConfig::seed)
        .def_readwrite("tolerance", &SamplingConfig::tolerance);

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_property_readonly("zero", &VerificationReport::zero)
        .def_readonly("max_abs_residual", &VerificationReport::max_abs_residual)
        .def_readonly("mean_abs_residual", &VerificationReport::mean_abs_residual)
        .def_readonly("n_samples", &VerificationReport::n_samples)
        .def_readonly("skipped", &VerificationReport::skipped)
        .def_property_readonly("witness",
                               [](const VerificationReport& r) -> py::object {
                                   if (!r.witness) return py::none();
                                   return py::cast(r.witness->coords);
                               })
        .def("json", [](const VerificationReport& r) { return r.to_json().dump(); })
        .def("__repr__", [](const VerificationReport& r) {
            return std::string("VerificationReport(") + (r.zero() ? "zero" : "nonzero") +
                   ", max=" + std::to_string(r.max_abs_residual) + ")";
        });

    py::class_<StructureMatrix>(m, "StructureMatrix")
        .def(py::init([](const py::object& u, const py::object& v, const py::object& w,
                         const Domain& domain, const py::dict& params) {
                 StructureMatrix S;
                 S.u = as_expr(u);
                 S.v = as_expr(v);
                 S.w = as_expr(w);
                 S.domain = domain;
                 S.params = params_from_dict(params);
                 return S;
             }),
             py::arg("u"), py::arg("v"), py::arg("w"), py::arg("domain") = Domain::cube(-1, 1),
             py::arg("params") = py::dict())
        .def_readonly("u", &StructureMatrix::u)
        .def_readonly("v", &StructureMatrix::v)
        .def_readonly("w", &StructureMatrix::w)
        .def_readonly("domain", &StructureMatrix::domain)
        .def("__repr__", [](const StructureMatrix& S) {
            return "StructureMatrix({" + to_string(S.u) + ", " + to_string(S.v) + ", " +
                   to_string(S.w) + "})";
        });

    m.def("jacobi_residual", &jacobi_residual, py::arg("structure"));
    m.def("bracket",
          [](const py::object& f, const py::object& g, const StructureMatrix& S) {
              return bracket(as_expr(f), as_expr(g), S);
          },
          py::arg("f"), py::arg("g"), py::arg("structure"));
    m.def("hamiltonian_vector_field",
          [](const StructureMatrix& S, const py::object& H) {
              const VectorFieldExpr f = hamiltonian_vector_field(S, as_expr(H));
              return py::make_tuple(f.comps[0], f.comps[1], f.comps[2]);
          },
          py::arg("structure"), py::arg("hamiltonian"));
    m.def("rank_at",
          [](const StructureMatrix& S, const std::array<double, 3>& coords, double tol) {
              Point p = point_from(coords, py::dict());
              p.params = default_param_values(S);
              return rank_at(S, p, tol);
          },
          py::arg("structure"), py::arg("point"), py::arg("tol") = 1e-12);
    m.def("check_jacobi", &check_jacobi, py::arg("structure"),
          py::arg("config") = SamplingConfig{});
    m.def("is_casimir",
          [](const py::object& C, const StructureMatrix& S, const SamplingConfig& cfg) {
              return is_casimir(as_expr(C), S, cfg);
          },
          py::arg("casimir"), py::arg("structure"), py::arg("config") = SamplingConfig{});

    m.def("lambda_of", [](const StructureMatrix& S) { return simplify(lambda_of(S)); },
          py::arg("structure"));
    m.def("classify_case",
          [](const StructureMatrix& S, const SamplingConfig& cfg) {
              return classify_case(S, cfg) == CaseKind::CaseI ? "I" : "II_or_III";
          },
          py::arg("structure"), py::arg("config") = SamplingConfig{});
    m.def("characteristic_field",
          [](const StructureMatrix& S) {
              const VectorFieldExpr f = characteristic_field(S);
              return py::make_tuple(f.comps[0], f.comps[1], f.comps[2]);
          },
          py::arg("structure"));
    m.def("check_pde",
          [](const StructureMatrix& S, const py::object& xi, const SamplingConfig& cfg) {
              return check_pde(S, as_expr(xi), cfg);
          },
          py::arg("structure"), py::arg("xi"), py::arg("config") = SamplingConfig{});

    py::class_<SolutionFamily>(m, "SolutionFamily")
        .def_readonly("k1_invariant", &SolutionFamily::k1_invariant)
        .def_readonly("k2_invariant", &SolutionFamily::k2_invariant)
        .def_readonly("psi", &SolutionFamily::psi)
        .def_property_readonly("multipliers",
                               [](const SolutionFamily& f) {
                                   return py::make_tuple(f.multipliers[0], f.multipliers[1],
                                                         f.multipliers[2]);
                               })
        .def("materialize",
             [](const SolutionFamily& f, const py::object& psi) {
                 if (psi.is_none()) return f.materialize();
                 return f.materialize(as_expr(psi));
             },
             py::arg("psi") = py::none());

    m.def("case1_family",
          [](const StructureMatrix& S, const py::object& casimir, const py::object& psi,
             const SamplingConfig& cfg) {
              return case1_family(S, as_expr(casimir), as_expr(psi), cfg);
          },
          py::arg("structure"), py::arg("casimir"), py::arg("psi"),
          py::arg("config") = SamplingConfig{});

    py::class_<Diffeomorphism>(m, "Diffeomorphism")
        .def(py::init([](const py::object& f1, const py::object& f2, const py::object& f3,
                         const py::object& i1, const py::object& i2, const py::object& i3,
                         const Domain& domain) {
                 Diffeomorphism phi;
                 phi.forward = {as_expr(f1), as_expr(f2), as_expr(f3)};
                 phi.inverse = {as_expr(i1), as_expr(i2), as_expr(i3)};
                 phi.domain = domain;
                 return phi;
             }),
             py::arg("f1"), py::arg("f2"), py::arg("f3"), py::arg("i1"), py::arg("i2"),
             py::arg("i3"), py::arg("domain") = Domain::cube(-1, 1));

    m.def("pushforward",
          [](const StructureMatrix& S, const Diffeomorphism& phi) { return pushforward(S, phi); },
          py::arg("structure"), py::arg("diffeomorphism"));

    m.def("case3_family",
          [](const StructureMatrix& S, const Diffeomorphism& phi, const StructureMatrix& target,
             const py::object& casimir_y, const py::object& psi, const SamplingConfig& cfg) {
              return case3_family(S, phi, target, as_expr(casimir_y), as_expr(psi), cfg);
          },
          py::arg("structure"), py::arg("diffeomorphism"), py::arg("target"),
          py::arg("casimir_y"), py::arg("psi"), py::arg("config") = SamplingConfig{});

    m.def("lv_exponents",
          [](double a12, double a31, double a23) {
              const LvExponents e = lv_exponents(a12, a31, a23);
              return py::make_tuple(e.alpha, e.beta, e.gamma, e.sign);
          },
          py::arg("a12"), py::arg("a31"), py::arg("a23"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("complete", &Trajectory::complete)
        .def_readonly("xi_crossed_zero", &Trajectory::xi_crossed_zero)
        .def_property_readonly("samples", [](const Trajectory& t) {
            py::list out;
            for (const TrajectorySample& s : t.samples) {
                py::dict item;
                item["t"] = s.t;
                item["point"] = s.point.coords;
                if (s.xi) item["xi"] = *s.xi;
                out.append(item);
            }
            return out;
        });

    m.def("integrate_characteristics",
          [](const StructureMatrix& S, const std::array<double, 3>& start, double t_end,
             double step, const py::object& xi0) {
              Point p = point_from(start, py::dict());
              p.params = default_param_values(S);
              std::optional<double> xi;
              if (!xi0.is_none()) xi = xi0.cast<double>();
              return integrate_characteristics(S, p, t_end, step, xi);
          },
          py::arg("structure"), py::arg("start"), py::arg("t_end") = 10.0, py::arg("step") = 1e-3,
          py::arg("xi0") = py::none());

    m.def("catalog_list", [] { return catalog::list(); });
    m.def("catalog_get", [](const std::string& name) {
        const CatalogEntry& e = catalog::get(name);
        py::dict out;
        out["name"] = e.name;
        out["description"] = e.description;
        out["structure"] = e.structure;
        out["casimir"] = e.casimir;
        out["lambda"] = simplify(e.lambda_expected);
        return out;
    });
}
