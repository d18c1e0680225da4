#pragma once

#include "jacobi3d/expr.hpp"
#include "jacobi3d/verify.hpp"

namespace jacobi3d {

// Skew-symmetric 3x3 structure-matrix candidate, stored through its three
// independent entries u = J12, v = J31, w = J23. Skew-symmetry is structural
// and never checked at runtime.
struct StructureMatrix {
    Expr u, v, w;
    Frame frame = Frame::x();
    Domain domain;
    std::map<std::string, ParamSpec> params;
    bool verified = false;
};

struct VectorFieldExpr {
    std::array<Expr, 3> comps;
};

SamplePlan plan_of(const StructureMatrix& S);

// Fixed parameter bindings for numeric work: the value of fixed specs, the
// midpoint of ranged ones.
std::map<std::string, double> default_param_values(const StructureMatrix& S);

// The single independent 3D Jacobi equation in (u, v, w):
//   u d1v - v d1u + w d2u - u d2w + v d3w - w d3v.
// S solves the Jacobi identities iff this is identically zero on the domain.
Expr jacobi_residual(const StructureMatrix& S);

// {f, g} = sum_ij dif Jij djg assembled from (u, v, w) by skew-symmetry.
Expr bracket(const Expr& f, const Expr& g, const StructureMatrix& S);

// Component i of J * grad(H).
VectorFieldExpr hamiltonian_vector_field(const StructureMatrix& S, const Expr& H);

// A 3x3 skew matrix has rank 0 or 2: rank 2 iff some entry magnitude at p
// exceeds tol.
int rank_at(const StructureMatrix& S, const Point& p, double tol = 1e-12);

VerificationReport check_jacobi(const StructureMatrix& S, const SamplingConfig& cfg = {});

// Zero verdict iff all three brackets {C, xi} vanish on the domain.
VerificationReport is_casimir(const Expr& C, const StructureMatrix& S,
                              const SamplingConfig& cfg = {});

}  // namespace jacobi3d
