#pragma once

#include "jacobi3d/poisson.hpp"
#include "jacobi3d/transform.hpp"

#include <optional>
#include <vector>

namespace jacobi3d {

struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct integration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// The linear problem attached to a known solution
// ---------------------------------------------------------------------------

// lambda(x) = d1(u0 - v0) + d2(w0 - u0) + d3(v0 - w0): the coefficient of
// the linear PDE governing the additive perturbation xi.
Expr lambda_of(const StructureMatrix& S);

enum class CaseKind { CaseI, CaseII_or_III };

// CaseI iff lambda vanishes on the domain by sampling verdict; telling II
// from III needs user-supplied elimination, so the non-zero verdict is
// returned jointly.
CaseKind classify_case(const StructureMatrix& S, const SamplingConfig& cfg = {});

// Characteristic directions (u0 - v0, w0 - u0, v0 - w0).
VectorFieldExpr characteristic_field(const StructureMatrix& S);

// Residual of the linear PDE
//   (u0-v0) d1 xi + (w0-u0) d2 xi + (v0-w0) d3 xi - lambda xi
// as a symbolic expression, and its sampling verdict over the domain.
Expr pde_residual(const StructureMatrix& S, const Expr& xi);
VerificationReport check_pde(const StructureMatrix& S, const Expr& xi,
                             const SamplingConfig& cfg = {});

// ---------------------------------------------------------------------------
// Characteristic trajectories
// ---------------------------------------------------------------------------

struct TrajectorySample {
    double t = 0.0;
    Point point;
    std::optional<double> xi;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double step = 0.0;
    int method_order = 4;
    std::uint64_t seed = 0;
    Frame frame = Frame::x();
    bool complete = true;          // false when halted at a domain exit
    bool xi_crossed_zero = false;  // |xi| dipped below 1e-12 while carried
    int near_degenerate = 0;       // samples where every field component is < 1e-10

    const TrajectorySample& front() const { return samples.front(); }
    const TrajectorySample& back() const { return samples.back(); }
};

// Classical fixed-step RK4 along the characteristic field, optionally
// carrying xi with d(xi)/dt = lambda * xi. Each step is checked against a
// half-step pair; a local discrepancy above 1e-6 raises integration_error.
// Leaving the domain truncates the trajectory and clears `complete`.
Trajectory integrate_characteristics(const StructureMatrix& S, const Point& x0, double t_end,
                                     double step, std::optional<double> xi0 = {});

// Max drift of a conserved quantity along a trajectory, relative to its
// value at t = 0 (absolute when that value is below 1e-8).
struct QuantityDrift {
    std::string name;
    double initial_value = 0.0;
    double max_drift = 0.0;
    bool relative = true;
};

std::vector<QuantityDrift> conservation_report(
    const Trajectory& T, const std::vector<std::pair<std::string, Expr>>& quantities,
    const std::map<std::string, double>& params = {});

// ---------------------------------------------------------------------------
// Solution families
// ---------------------------------------------------------------------------

// base + psi(K1, K2) * (M12, M31, M23), with psi written over the reserved
// symbols k1, k2. Materializing substitutes k1 <- K1(x), k2 <- K2(x).
struct SolutionFamily {
    StructureMatrix base;
    Expr k1_invariant;
    Expr k2_invariant;
    std::optional<Expr> k3_invariant;  // closed form when known
    Expr psi;
    std::array<Expr, 3> multipliers{Expr::constant(1.0), Expr::constant(1.0),
                                    Expr::constant(1.0)};

    StructureMatrix materialize() const { return materialize(psi); }
    StructureMatrix materialize(const Expr& with_psi) const;
};

// Case I: lambda must vanish and `casimir` must verify; the family is
// base + Psi(x1+x2+x3, C(x)) * (1,1,1).
SolutionFamily case1_family(const StructureMatrix& S, const Expr& casimir, const Expr& psi,
                            const SamplingConfig& cfg = {});

// Case III: push S to `target` coordinates via phi (verified against the
// supplied target), solve there as Case I with Casimir casimir_y, and pull
// the perturbation back, which turns (1,1,1) into the M_ij multipliers.
SolutionFamily case3_family(const StructureMatrix& S, const Diffeomorphism& phi,
                            const StructureMatrix& target, const Expr& casimir_y, const Expr& psi,
                            const SamplingConfig& cfg = {});

// ---------------------------------------------------------------------------
// Case II machinery
// ---------------------------------------------------------------------------

// Checks user-supplied elimination of the two non-pivot coordinates:
// with pivot index p and remaining indices i < j,
//   x_i = alpha(x_p, k1, k2)   and   x_j = beta(x_p, k1, k2)
// must reproduce the coordinates once k1 <- K1(x), k2 <- K2(x).
VerificationReport verify_elimination(const StructureMatrix& S, const Expr& K1, const Expr& K2,
                                      int pivot, const Expr& alpha, const Expr& beta,
                                      const SamplingConfig& cfg = {});

struct QuadratureSpec {
    double pivot_ref = 0.0;     // lower limit of the quadrature
    double denom_guard = 1e-8;  // floor for the pivot's characteristic component
    double rel_tol = 1e-8;      // composite-Simpson refinement target
};

// Numeric third invariant K3 = xi / H with
//   H(p, k1, k2) = exp( integral of kappa along the pivot ),
//   kappa = lambda / (pivot characteristic component), coordinates eliminated.
// The quadrature's integration constant is fixed by pivot_ref, i.e. one
// multiplicative constant per (k1, k2) level set.
class K3Evaluator {
public:
    double H(double pivot, double k1, double k2) const;
    double k3(const Point& p, double xi) const;
    // Explicit branch of the general integral: xi = H * g(k1, k2).
    double explicit_xi(const Point& p, const Expr& g) const;

private:
    friend K3Evaluator quadrature_K3(const StructureMatrix&, const Expr&, const Expr&, int,
                                     const Expr&, const Expr&, const QuadratureSpec&,
                                     const SamplingConfig&);
    CompiledExpr numerator_;    // lambda after elimination, over (pivot, k1, k2)
    CompiledExpr denominator_;  // pivot characteristic component, same slots
    CompiledExpr k1_of_x_, k2_of_x_;
    int pivot_ = 0;
    QuadratureSpec spec_;
    std::map<std::string, double> params_;
    Frame frame_ = Frame::x();
};

// Builds the Case II quadrature; verify_elimination must pass first (it is
// re-run here and failures raise precondition_error).
K3Evaluator quadrature_K3(const StructureMatrix& S, const Expr& K1, const Expr& K2, int pivot,
                          const Expr& alpha, const Expr& beta, const QuadratureSpec& spec,
                          const SamplingConfig& cfg = {});

// ---------------------------------------------------------------------------
// Case III exponents for Lotka-Volterra structures
// ---------------------------------------------------------------------------

// Solves a12*alpha*beta = a31*alpha*gamma = a23*beta*gamma = s with
// s = sign(a12*a31*a23), so the power map y = (x1^alpha, x2^beta, x3^gamma)
// carries {a12 x1x2, a31 x1x3, a23 x2x3} onto s * {y1y2, y1y3, y2y3}.
struct LvExponents {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    int sign = 1;
};

LvExponents lv_exponents(double a12, double a31, double a23);

// ---------------------------------------------------------------------------
// Family-level verification
// ---------------------------------------------------------------------------

struct FamilyCheck {
    std::string psi_text;
    VerificationReport report;
};

struct FamilyReport {
    std::vector<FamilyCheck> checks;
    bool all_zero = true;
};

FamilyReport check_family(const SolutionFamily& F, const std::vector<Expr>& psi_set,
                          const SamplingConfig& cfg = {});

}  // namespace jacobi3d
