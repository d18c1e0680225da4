#include "jacobi3d/document.hpp"

#include <fstream>

namespace jacobi3d {

namespace {

const Frame& frame_for(const std::array<std::string, 3>& variables) {
    if (variables == Frame::x().names) return Frame::x();
    if (variables == Frame::y().names) return Frame::y();
    throw document_error("variables must be [x1,x2,x3] or [y1,y2,y3]");
}

std::array<std::string, 3> string_triple(const nlohmann::json& j, const char* field) {
    if (!j.is_array() || j.size() != 3)
        throw document_error(std::string(field) + " must be an array of three strings");
    std::array<std::string, 3> out;
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_string())
            throw document_error(std::string(field) + " must be an array of three strings");
        out[i] = j[i].get<std::string>();
    }
    return out;
}

Domain domain_from_json(const nlohmann::json& j, const std::array<std::string, 3>& variables) {
    Domain d;
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string& var = variables[i];
        if (!j.contains(var))
            throw document_error("domain block is missing an interval for " + var);
        const nlohmann::json& iv = j.at(var);
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            throw document_error("domain interval for " + var + " must be [lo, hi]");
        d.box[i] = {iv[0].get<double>(), iv[1].get<double>()};
        d.positive[i] = d.box[i].lo >= 0.0;
    }
    try {
        d.validate();
    } catch (const std::invalid_argument& err) {
        throw document_error(std::string("invalid domain: ") + err.what());
    }
    return d;
}

nlohmann::json domain_to_json(const Domain& d, const std::array<std::string, 3>& variables) {
    nlohmann::json j;
    for (std::size_t i = 0; i < 3; ++i) j[variables[i]] = {d.box[i].lo, d.box[i].hi};
    return j;
}

}  // namespace

StructureDocument document_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw document_error("structure document must be a JSON object");
    StructureDocument doc;

    if (j.contains("name")) doc.name = j.at("name").get<std::string>();
    if (j.contains("notes")) doc.notes = j.at("notes").get<std::string>();
    if (j.contains("variables")) doc.variables = string_triple(j.at("variables"), "variables");
    frame_for(doc.variables);

    if (j.contains("parameters")) {
        const nlohmann::json& params = j.at("parameters");
        if (!params.is_object()) throw document_error("parameters must be an object");
        for (const auto& [name, value] : params.items()) {
            if (value.is_number()) {
                doc.parameters[name] = ParamSpec::fixed(value.get<double>());
            } else if (value.is_array() && value.size() == 2 && value[0].is_number() &&
                       value[1].is_number()) {
                doc.parameters[name] =
                    ParamSpec::range(value[0].get<double>(), value[1].get<double>());
            } else {
                throw document_error("parameter '" + name + "' must be a number or [lo, hi]");
            }
        }
    }

    for (const char* field : {"u", "v", "w"})
        if (!j.contains(field) || !j.at(field).is_string())
            throw document_error(std::string("missing formula string '") + field + "'");
    doc.u = j.at("u").get<std::string>();
    doc.v = j.at("v").get<std::string>();
    doc.w = j.at("w").get<std::string>();

    if (j.contains("casimir")) doc.casimir = j.at("casimir").get<std::string>();
    if (j.contains("domain")) doc.domain = domain_from_json(j.at("domain"), doc.variables);
    if (j.contains("psi")) doc.psi = j.at("psi").get<std::string>();

    if (j.contains("diffeomorphism")) {
        const nlohmann::json& block = j.at("diffeomorphism");
        if (!block.is_object() || !block.contains("forward") || !block.contains("inverse"))
            throw document_error("diffeomorphism block needs forward and inverse triples");
        StructureDocument::DiffeoBlock d;
        d.forward = string_triple(block.at("forward"), "diffeomorphism.forward");
        d.inverse = string_triple(block.at("inverse"), "diffeomorphism.inverse");
        doc.diffeomorphism = d;
    }

    if (j.contains("elimination")) {
        const nlohmann::json& block = j.at("elimination");
        for (const char* field : {"pivot", "alpha", "beta"})
            if (!block.contains(field) || !block.at(field).is_string())
                throw document_error(std::string("elimination block needs string '") + field +
                                     "'");
        StructureDocument::EliminationBlock e;
        e.pivot = block.at("pivot").get<std::string>();
        e.alpha = block.at("alpha").get<std::string>();
        e.beta = block.at("beta").get<std::string>();
        doc.elimination = e;
    }

    if (j.contains("case3_target"))
        doc.case3_target =
            std::make_shared<StructureDocument>(document_from_json(j.at("case3_target")));

    return doc;
}

nlohmann::json document_to_json(const StructureDocument& doc) {
    nlohmann::json j;
    if (doc.name) j["name"] = *doc.name;
    if (doc.notes) j["notes"] = *doc.notes;
    j["variables"] = doc.variables;
    if (!doc.parameters.empty()) {
        nlohmann::json params;
        for (const auto& [name, spec] : doc.parameters) {
            if (spec.is_fixed())
                params[name] = spec.lo;
            else
                params[name] = {spec.lo, spec.hi};
        }
        j["parameters"] = params;
    }
    j["u"] = doc.u;
    j["v"] = doc.v;
    j["w"] = doc.w;
    if (doc.casimir) j["casimir"] = *doc.casimir;
    if (doc.domain) j["domain"] = domain_to_json(*doc.domain, doc.variables);
    if (doc.psi) j["psi"] = *doc.psi;
    if (doc.diffeomorphism) {
        j["diffeomorphism"] = {{"forward", doc.diffeomorphism->forward},
                               {"inverse", doc.diffeomorphism->inverse}};
    }
    if (doc.elimination) {
        j["elimination"] = {{"pivot", doc.elimination->pivot},
                            {"alpha", doc.elimination->alpha},
                            {"beta", doc.elimination->beta}};
    }
    if (doc.case3_target) j["case3_target"] = document_to_json(*doc.case3_target);
    return j;
}

StructureDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw document_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw document_error("invalid JSON in '" + path + "': " + err.what());
    }
    return document_from_json(j);
}

namespace {

Expr parse_field(const std::string& text, const std::string& field,
                 const std::set<std::string>& allowed) {
    Expr e;
    try {
        e = parse(text);
    } catch (const parse_error& err) {
        throw document_error("cannot parse " + field + ": " + err.what());
    }
    for (const std::string& s : symbols_of(e))
        if (!allowed.contains(s))
            throw document_error("unknown symbol '" + s + "' in " + field);
    return e;
}

std::set<std::string> names_of(const Frame& frame, const std::map<std::string, ParamSpec>& params) {
    std::set<std::string> out(frame.names.begin(), frame.names.end());
    for (const auto& [name, spec] : params) out.insert(name);
    return out;
}

}  // namespace

RealizedDocument realize(const StructureDocument& doc) {
    const Frame& frame = frame_for(doc.variables);
    const Frame& other = frame == Frame::x() ? Frame::y() : Frame::x();
    for (const std::string& p : {std::string("k1"), std::string("k2"), std::string("k3")})
        if (doc.parameters.contains(p))
            throw document_error("'" + p + "' is reserved and cannot be a parameter");

    RealizedDocument out;
    const std::set<std::string> base_symbols = names_of(frame, doc.parameters);

    out.structure.u = parse_field(doc.u, "u", base_symbols);
    out.structure.v = parse_field(doc.v, "v", base_symbols);
    out.structure.w = parse_field(doc.w, "w", base_symbols);
    out.structure.frame = frame;
    out.structure.params = doc.parameters;
    if (doc.domain) out.structure.domain = *doc.domain;

    if (doc.casimir) out.casimir = parse_field(*doc.casimir, "casimir", base_symbols);

    if (doc.psi) {
        std::set<std::string> allowed{"k1", "k2"};
        for (const auto& [name, spec] : doc.parameters) allowed.insert(name);
        out.psi = parse_field(*doc.psi, "psi", allowed);
    }

    if (doc.diffeomorphism) {
        Diffeomorphism phi;
        const std::set<std::string> inverse_symbols = names_of(other, doc.parameters);
        for (std::size_t i = 0; i < 3; ++i) {
            phi.forward[i] = parse_field(doc.diffeomorphism->forward[i],
                                         "diffeomorphism.forward[" + std::to_string(i) + "]",
                                         base_symbols);
            phi.inverse[i] = parse_field(doc.diffeomorphism->inverse[i],
                                         "diffeomorphism.inverse[" + std::to_string(i) + "]",
                                         inverse_symbols);
        }
        phi.domain = out.structure.domain;
        out.diffeomorphism = phi;
    }

    if (doc.elimination) {
        EliminationData elim;
        elim.pivot = -1;
        for (std::size_t i = 0; i < 3; ++i)
            if (doc.elimination->pivot == frame.names[i]) elim.pivot = static_cast<int>(i);
        if (elim.pivot < 0)
            throw document_error("elimination pivot must be one of the declared variables");
        std::set<std::string> allowed{"k1", "k2", doc.elimination->pivot};
        for (const auto& [name, spec] : doc.parameters) allowed.insert(name);
        elim.alpha = parse_field(doc.elimination->alpha, "elimination.alpha", allowed);
        elim.beta = parse_field(doc.elimination->beta, "elimination.beta", allowed);
        out.elimination = elim;
    }

    if (doc.case3_target) {
        if (!out.diffeomorphism)
            throw document_error("case3_target requires a diffeomorphism block");
        StructureDocument target_doc = *doc.case3_target;
        // Outer parameters remain visible inside the target block.
        for (const auto& [name, spec] : doc.parameters)
            target_doc.parameters.emplace(name, spec);
        RealizedDocument target = realize(target_doc);
        if (target.structure.frame == frame)
            throw document_error("case3_target must use the opposite coordinate frame");
        if (!target.casimir) throw document_error("case3_target needs a casimir");
        Case3Data c3;
        c3.phi = *out.diffeomorphism;
        c3.target = target.structure;
        c3.casimir_y = *target.casimir;
        out.case3 = c3;
    }

    return out;
}

StructureDocument document_of(const StructureMatrix& S) {
    StructureDocument doc;
    doc.variables = S.frame.names;
    doc.parameters = S.params;
    doc.u = to_string(S.u);
    doc.v = to_string(S.v);
    doc.w = to_string(S.w);
    doc.domain = S.domain;
    return doc;
}

StructureDocument document_of(const CatalogEntry& entry) {
    StructureDocument doc = document_of(entry.structure);
    doc.name = entry.name;
    doc.notes = entry.description;
    doc.casimir = to_string(entry.casimir);
    if (entry.elimination) {
        StructureDocument::EliminationBlock block;
        block.pivot = entry.structure.frame.names[static_cast<std::size_t>(entry.elimination->pivot)];
        block.alpha = to_string(entry.elimination->alpha);
        block.beta = to_string(entry.elimination->beta);
        doc.elimination = block;
    }
    if (entry.case3) {
        StructureDocument::DiffeoBlock diffeo;
        for (std::size_t i = 0; i < 3; ++i) {
            diffeo.forward[i] = to_string(entry.case3->phi.forward[i]);
            diffeo.inverse[i] = to_string(entry.case3->phi.inverse[i]);
        }
        doc.diffeomorphism = diffeo;

        StructureDocument target = document_of(entry.case3->target);
        target.casimir = to_string(entry.case3->casimir_y);
        doc.case3_target = std::make_shared<StructureDocument>(std::move(target));
    }
    return doc;
}

}  // namespace jacobi3d
