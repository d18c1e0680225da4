#pragma once

#include "jacobi3d/family.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jacobi3d {

// Known elimination of the two non-pivot coordinates through K1, K2
// (Case II input; alpha/beta are written over the pivot, k1, k2).
struct EliminationData {
    int pivot = 0;
    Expr alpha;
    Expr beta;
};

// Known Case III route: a diffeomorphism onto `target`, where lambda
// vanishes, with a Casimir of the target.
struct Case3Data {
    Diffeomorphism phi;
    StructureMatrix target;
    Expr casimir_y;
};

struct CatalogEntry {
    std::string name;
    std::string description;
    std::string notes;
    StructureMatrix structure;
    Expr casimir;
    Expr lambda_expected;
    std::optional<EliminationData> elimination;
    std::optional<Case3Data> case3;
};

namespace catalog {

// Names: constant, so3, ray_optics, kermack_mckendrick, lotka_volterra,
// darboux. Parameterized entries bind defaults (r=1, a=1; a12=1, a31=1,
// a23=4). Throws std::out_of_range for unknown names.
const CatalogEntry& get(std::string_view name);

std::vector<std::pair<std::string, std::string>> list();

}  // namespace catalog

}  // namespace jacobi3d
