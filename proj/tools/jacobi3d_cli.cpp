// Command-line surface for the jacobi3d library: verify structure files,
// compute lambda and classify, generate solution families, integrate
// characteristics, and dump the built-in catalog.
//
// Exit codes: 0 identity holds / success, 1 identity violated, 2 usage or
// input error.

#include "jacobi3d/document.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace jacobi3d;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitError = 2;

struct GlobalOptions {
    std::uint64_t seed = 42;
    int points = 1000;
    double tol = 1e-9;

    SamplingConfig config() const {
        SamplingConfig cfg;
        cfg.seed = seed;
        cfg.count = points;
        cfg.tolerance = tol;
        return cfg;
    }
};

StructureDocument load_input(const std::string& path) {
    if (path == "-") {
        nlohmann::json j;
        std::cin >> j;
        return document_from_json(j);
    }
    return load_document(path);
}

int cmd_verify(const std::string& file, const GlobalOptions& opts) {
    const RealizedDocument doc = realize(load_input(file));
    const VerificationReport report = check_jacobi(doc.structure, opts.config());

    // Rank drops are legitimate on measure-zero sets; they are surfaced as a
    // warning, never as a failure.
    int rank_drops = 0;
    const SamplePlan plan = plan_of(doc.structure);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const Point p = sample_point(plan, opts.seed, i, 0);
        if (rank_at(doc.structure, p) == 0) ++rank_drops;
    }
    if (rank_drops > 0)
        std::cerr << "warning: rank drops below 2 at " << rank_drops
                  << " of 100 sampled points\n";

    nlohmann::json out = report.to_json();
    if (doc.casimir) {
        const VerificationReport cas = is_casimir(*doc.casimir, doc.structure, opts.config());
        out["casimir"] = cas.to_json();
        std::cout << out.dump(2) << "\n";
        return report.zero() && cas.zero() ? kExitPass : kExitViolation;
    }
    std::cout << out.dump(2) << "\n";
    return report.zero() ? kExitPass : kExitViolation;
}

int cmd_lambda(const std::string& file, const GlobalOptions& opts) {
    const RealizedDocument doc = realize(load_input(file));
    const Expr lambda = simplify(lambda_of(doc.structure));
    const CaseKind kind = classify_case(doc.structure, opts.config());
    nlohmann::json out;
    out["lambda"] = to_string(lambda);
    out["case"] = kind == CaseKind::CaseI ? "I" : "II_or_III";
    std::cout << out.dump(2) << "\n";
    return kExitPass;
}

int cmd_generate(const std::string& file, const std::string& psi_text, int which_case,
                 const std::string& target_file, const std::string& diffeo_file,
                 const GlobalOptions& opts) {
    StructureDocument raw = load_input(file);
    if (!psi_text.empty()) raw.psi = psi_text;
    if (!raw.psi) throw document_error("generate needs --psi or a psi field in the document");

    if (!diffeo_file.empty()) {
        const StructureDocument overlay = load_document(diffeo_file);
        if (!overlay.diffeomorphism)
            throw document_error("--diffeo file has no diffeomorphism block");
        raw.diffeomorphism = overlay.diffeomorphism;
    }
    if (!target_file.empty()) {
        if (!raw.diffeomorphism)
            throw document_error("--target requires a diffeomorphism (block or --diffeo)");
        raw.case3_target = std::make_shared<StructureDocument>(load_document(target_file));
    }

    const RealizedDocument doc = realize(raw);
    const SamplingConfig cfg = opts.config();

    SolutionFamily fam;
    if (which_case == 1) {
        if (!doc.casimir) throw document_error("case 1 needs a casimir field in the document");
        fam = case1_family(doc.structure, *doc.casimir, *doc.psi, cfg);
    } else if (which_case == 3) {
        if (!doc.case3)
            throw document_error(
                "case 3 needs diffeomorphism and case3_target blocks (or --diffeo/--target)");
        fam = case3_family(doc.structure, doc.case3->phi, doc.case3->target, doc.case3->casimir_y,
                           *doc.psi, cfg);
    } else {
        throw document_error("--case must be 1 or 3");
    }

    const StructureMatrix result = fam.materialize();
    SamplingConfig family_cfg = cfg;
    family_cfg.tolerance = std::max(cfg.tolerance, 1e-8);
    const VerificationReport report = check_jacobi(result, family_cfg);

    StructureDocument out = document_of(result);
    if (raw.name) out.name = *raw.name + "_family";
    std::ostringstream notes;
    notes << "case " << which_case << " family with psi = " << to_string(*doc.psi);
    out.notes = notes.str();
    out.psi = to_string(*doc.psi);

    std::cout << document_to_json(out).dump(2) << "\n";
    std::cerr << report.to_json().dump(2) << "\n";
    return report.zero() ? kExitPass : kExitViolation;
}

int cmd_characteristics(const std::string& file, const std::string& from, double t_end,
                        double step, const std::string& carry_xi, const GlobalOptions& opts) {
    const RealizedDocument doc = realize(load_input(file));
    const StructureMatrix& S = doc.structure;

    Point x0;
    {
        std::istringstream in(from);
        char c1 = 0, c2 = 0;
        if (!(in >> x0.coords[0] >> c1 >> x0.coords[1] >> c2 >> x0.coords[2]) || c1 != ',' ||
            c2 != ',')
            throw document_error("--from must be 'x1,x2,x3'");
    }
    x0.params = default_param_values(S);

    std::optional<double> xi0;
    if (!carry_xi.empty()) {
        const Expr xi_expr = parse(carry_xi);
        xi0 = eval(xi_expr, make_env(x0, S.frame));
    }

    const Trajectory traj = integrate_characteristics(S, x0, t_end, step, xi0);

    std::vector<std::pair<std::string, Expr>> quantities;
    quantities.emplace_back("K1", Expr::symbol(S.frame.names[0]) + Expr::symbol(S.frame.names[1]) +
                                      Expr::symbol(S.frame.names[2]));
    if (doc.casimir) quantities.emplace_back("C", *doc.casimir);

    std::optional<K3Evaluator> k3;
    if (xi0 && doc.elimination && doc.casimir) {
        QuadratureSpec spec;
        spec.pivot_ref =
            x0.coords[static_cast<std::size_t>(doc.elimination->pivot)];
        const Expr k1 = quantities.front().second;
        k3 = quadrature_K3(S, k1, *doc.casimir, doc.elimination->pivot, doc.elimination->alpha,
                           doc.elimination->beta, spec, opts.config());
    }

    // Header
    std::cout << "t," << S.frame.names[0] << "," << S.frame.names[1] << "," << S.frame.names[2];
    if (xi0) std::cout << ",xi";
    std::vector<CompiledExpr> compiled;
    for (const auto& [name, q] : quantities) {
        std::cout << "," << name << "_drift";
        compiled.push_back(CompiledExpr::compile(q, std::span<const std::string>(S.frame.names),
                                                 x0.params));
    }
    if (k3) std::cout << ",K3_drift";
    std::cout << "\n";

    std::vector<double> initial;
    for (const CompiledExpr& c : compiled) initial.push_back(c(traj.front().point.coords));
    double k3_initial = 0.0;
    if (k3) k3_initial = k3->k3(traj.front().point, *traj.front().xi);

    auto drift_of = [](double value, double initial_value) {
        const double d = std::abs(value - initial_value);
        return std::abs(initial_value) >= 1e-8 ? d / std::abs(initial_value) : d;
    };

    std::cout.precision(12);
    for (const TrajectorySample& s : traj.samples) {
        std::cout << s.t << "," << s.point.coords[0] << "," << s.point.coords[1] << ","
                  << s.point.coords[2];
        if (s.xi) std::cout << "," << *s.xi;
        for (std::size_t i = 0; i < compiled.size(); ++i)
            std::cout << "," << drift_of(compiled[i](s.point.coords), initial[i]);
        if (k3) std::cout << "," << drift_of(k3->k3(s.point, *s.xi), k3_initial);
        std::cout << "\n";
    }

    nlohmann::json summary;
    summary["complete"] = traj.complete;
    summary["samples"] = traj.samples.size();
    if (traj.xi_crossed_zero) summary["xi_crossed_zero"] = true;
    if (traj.near_degenerate > 0) summary["near_degenerate_samples"] = traj.near_degenerate;
    for (const QuantityDrift& d : conservation_report(traj, quantities))
        summary["max_drift"][d.name] = d.max_drift;
    std::cerr << summary.dump(2) << "\n";
    return kExitPass;
}

int cmd_catalog(bool list_entries, const std::string& export_name) {
    if (list_entries) {
        nlohmann::json out;
        out["entries"] = nlohmann::json::array();
        for (const auto& [name, description] : catalog::list())
            out["entries"].push_back({{"name", name}, {"description", description}});
        std::cout << out.dump(2) << "\n";
        return kExitPass;
    }
    if (!export_name.empty()) {
        const CatalogEntry& entry = catalog::get(export_name);
        std::cout << document_to_json(document_of(entry)).dump(2) << "\n";
        return kExitPass;
    }
    throw document_error("catalog needs --list or --export NAME");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D Poisson structure toolkit: verify Jacobi identities and build solution "
                 "families from a known one"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--seed", opts.seed, "sampling seed")->capture_default_str();
    app.add_option("--points", opts.points, "sample count")->capture_default_str();
    app.add_option("--tol", opts.tol, "zero-test tolerance")->capture_default_str();

    std::string file;
    auto* verify_cmd = app.add_subcommand("verify", "check the Jacobi identity of a document");
    verify_cmd->add_option("file", file, "structure document ('-' for stdin)")->required();

    auto* lambda_cmd =
        app.add_subcommand("lambda", "print lambda(x) and the case classification");
    lambda_cmd->add_option("file", file, "structure document ('-' for stdin)")->required();

    std::string psi_text, target_file, diffeo_file;
    int which_case = 1;
    auto* generate_cmd = app.add_subcommand("generate", "materialize a solution family");
    generate_cmd->add_option("file", file, "structure document ('-' for stdin)")->required();
    generate_cmd->add_option("--psi", psi_text, "generator over k1, k2");
    generate_cmd->add_option("--case", which_case, "construction case (1 or 3)")
        ->capture_default_str();
    generate_cmd->add_option("--target", target_file, "target structure document (case 3)");
    generate_cmd->add_option("--diffeo", diffeo_file, "document with a diffeomorphism block");

    std::string from = "1,1,1", carry_xi;
    double t_end = 10.0, step = 1e-3;
    auto* char_cmd =
        app.add_subcommand("characteristics", "integrate the characteristic equations");
    char_cmd->add_option("file", file, "structure document ('-' for stdin)")->required();
    char_cmd->add_option("--from", from, "initial point 'x1,x2,x3'")->capture_default_str();
    char_cmd->add_option("--t-end", t_end, "integration time")->capture_default_str();
    char_cmd->add_option("--step", step, "RK4 step size")->capture_default_str();
    char_cmd->add_option("--carry-xi", carry_xi,
                         "carry xi along the flow, seeded with this formula at the start");

    bool list_entries = false;
    std::string export_name;
    auto* catalog_cmd = app.add_subcommand("catalog", "list or export built-in structures");
    catalog_cmd->add_flag("--list", list_entries, "list entries");
    catalog_cmd->add_option("--export", export_name, "export one entry as a document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (verify_cmd->parsed()) return cmd_verify(file, opts);
        if (lambda_cmd->parsed()) return cmd_lambda(file, opts);
        if (generate_cmd->parsed())
            return cmd_generate(file, psi_text, which_case, target_file, diffeo_file, opts);
        if (char_cmd->parsed())
            return cmd_characteristics(file, from, t_end, step, carry_xi, opts);
        if (catalog_cmd->parsed()) return cmd_catalog(list_entries, export_name);
    } catch (const std::out_of_range& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    } catch (const std::runtime_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
