#pragma once

#include "jacobi3d/catalog.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace jacobi3d {

struct document_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON structure document: variable declaration, parameters with values or
// [lo, hi] ranges, the u/v/w formula strings, and optional casimir, domain,
// psi, diffeomorphism, elimination and case3_target blocks. Formulas follow
// the expr grammar; every referenced symbol must be declared.
struct StructureDocument {
    std::optional<std::string> name;
    std::optional<std::string> notes;
    std::array<std::string, 3> variables{"x1", "x2", "x3"};
    std::map<std::string, ParamSpec> parameters;
    std::string u, v, w;
    std::optional<std::string> casimir;
    std::optional<Domain> domain;
    std::optional<std::string> psi;
    struct DiffeoBlock {
        std::array<std::string, 3> forward;
        std::array<std::string, 3> inverse;
    };
    std::optional<DiffeoBlock> diffeomorphism;
    struct EliminationBlock {
        std::string pivot;
        std::string alpha;
        std::string beta;
    };
    std::optional<EliminationBlock> elimination;
    std::shared_ptr<StructureDocument> case3_target;  // nested target document
};

StructureDocument document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const StructureDocument& doc);
StructureDocument load_document(const std::string& path);

// Parsed and symbol-checked realization of a document.
struct RealizedDocument {
    StructureMatrix structure;
    std::optional<Expr> casimir;
    std::optional<Expr> psi;
    std::optional<Diffeomorphism> diffeomorphism;
    std::optional<EliminationData> elimination;
    std::optional<Case3Data> case3;
};

RealizedDocument realize(const StructureDocument& doc);

StructureDocument document_of(const CatalogEntry& entry);
StructureDocument document_of(const StructureMatrix& S);

}  // namespace jacobi3d
