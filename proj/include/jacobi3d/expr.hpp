#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jacobi3d {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct expr_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : expr_error {
    parse_error(const std::string& msg, std::size_t pos)
        : expr_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

struct eval_error : expr_error {
    using expr_error::expr_error;
};

// ---------------------------------------------------------------------------
// Symbols
//
// Coordinates x1,x2,x3 and the reserved names k1,k2,k3 (family-generator
// arguments) and y1,y2,y3 (transformed coordinates) are fixed by the formula
// grammar; every other identifier is a real parameter.
// ---------------------------------------------------------------------------

enum class SymbolKind { Coordinate, Reserved, Parameter };

SymbolKind classify_symbol(std::string_view name);

// ---------------------------------------------------------------------------
// Expr: immutable shared expression tree
// ---------------------------------------------------------------------------

class Expr {
public:
    enum class Kind { Constant, Symbol, Neg, Exp, Ln, Add, Sub, Mul, Div, Pow };

    struct Node {
        Kind kind = Kind::Constant;
        double value = 0.0;
        std::string name;
        std::shared_ptr<const Node> a, b;
    };

    Expr();  // the constant 0
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Expr constant(double value);
    static Expr symbol(std::string name);

    Kind kind() const { return node_->kind; }
    double value() const { return node_->value; }            // Constant only
    const std::string& name() const { return node_->name; }  // Symbol only
    Expr lhs() const { return Expr(node_->a); }
    Expr rhs() const { return Expr(node_->b); }
    Expr child() const { return Expr(node_->a); }
    const std::shared_ptr<const Node>& node() const { return node_; }

    bool is_constant() const { return node_->kind == Kind::Constant; }
    bool is_constant(double v) const { return is_constant() && node_->value == v; }

private:
    std::shared_ptr<const Node> node_;
};

// Smart constructors; they fold constants and the obvious 0/1 identities.
Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr neg(Expr a);
Expr exp(Expr a);
Expr ln(Expr a);
// The exponent must not depend on coordinates or reserved symbols.
Expr pow(Expr base, Expr exponent);
Expr pow(Expr base, double exponent);

inline Expr operator-(Expr a) { return neg(std::move(a)); }
inline Expr operator+(Expr a, double b) { return std::move(a) + Expr::constant(b); }
inline Expr operator+(double a, Expr b) { return Expr::constant(a) + std::move(b); }
inline Expr operator-(Expr a, double b) { return std::move(a) - Expr::constant(b); }
inline Expr operator-(double a, Expr b) { return Expr::constant(a) - std::move(b); }
inline Expr operator*(Expr a, double b) { return std::move(a) * Expr::constant(b); }
inline Expr operator*(double a, Expr b) { return Expr::constant(a) * std::move(b); }
inline Expr operator/(Expr a, double b) { return std::move(a) / Expr::constant(b); }
inline Expr operator/(double a, Expr b) { return Expr::constant(a) / std::move(b); }

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

// Recursive-descent parser for the formula grammar:
//   identifiers [a-zA-Z][a-zA-Z0-9_]*, operators + - * / ^, functions
//   exp( ) and ln( ), parentheses, decimal literals. Precedence
//   pow > unary minus > mul/div > add/sub, all left-associative.
Expr parse(std::string_view text);

std::string to_string(const Expr& e);

// Exact symbolic partial derivative with respect to a coordinate or
// reserved symbol.
Expr diff(const Expr& e, std::string_view var);

// Syntactic replacement of symbols. Rebuilt through the smart constructors.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);

// Best-effort cleanup: constant folding, 0/1 identities, and like-term
// cancellation on flattened sums. Identity-to-zero claims are settled by
// sampling, never by this.
Expr simplify(const Expr& e);

void collect_symbols(const Expr& e, std::set<std::string>& out);
std::set<std::string> symbols_of(const Expr& e);
bool depends_on(const Expr& e, std::string_view name);
bool structurally_equal(const Expr& a, const Expr& b);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

using EvalEnv = std::map<std::string, double, std::less<>>;

// Throws eval_error on unbound symbols, division by zero, ln of a
// non-positive value, non-integer powers of negative bases, or any
// non-finite intermediate.
double eval(const Expr& e, const EvalEnv& env);

struct GuardedEval {
    enum class Status { Ok, GuardTripped, Undefined };
    Status status = Status::Ok;
    double value = 0.0;
    bool ok() const { return status == Status::Ok; }
};

// Like eval, but instead of throwing on a partial-function violation it
// reports Undefined, and it reports GuardTripped when any subexpression
// magnitude exceeds `guard`. Unbound symbols still throw: resampling can
// never fix those.
GuardedEval eval_guarded(const Expr& e, const EvalEnv& env, double guard);

// ---------------------------------------------------------------------------
// Points, domains, frames
// ---------------------------------------------------------------------------

struct Point {
    std::array<double, 3> coords{0.0, 0.0, 0.0};
    std::map<std::string, double> params;
};

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

// Open box in 3-space. Positivity flags mark coordinates constrained to be
// positive (the lower bound must then be >= 0), e.g. the interior of the
// positive orthant.
struct Domain {
    std::array<Interval, 3> box{Interval{}, Interval{}, Interval{}};
    std::array<bool, 3> positive{false, false, false};

    static Domain cube(double lo, double hi);
    static Domain positive_cube(double lo, double hi);
    void validate() const;  // throws std::invalid_argument
    bool contains(const std::array<double, 3>& x) const;
};

struct Frame {
    std::array<std::string, 3> names;
    static const Frame& x();
    static const Frame& y();
    bool operator==(const Frame&) const = default;
};

// Parameter value or sampling range; fixed when lo == hi.
struct ParamSpec {
    double lo = 0.0;
    double hi = 0.0;
    static ParamSpec fixed(double v) { return {v, v}; }
    static ParamSpec range(double lo, double hi) { return {lo, hi}; }
    bool is_fixed() const { return lo == hi; }
    double midpoint() const { return 0.5 * (lo + hi); }
};

EvalEnv make_env(const Point& p, const Frame& frame);

// ---------------------------------------------------------------------------
// Compiled evaluation
//
// Flattens an Expr to a postfix program over named value slots, with all
// other symbols bound to fixed values at compile time. Used by the ODE
// integrator and the quadrature, where tree walking is too slow.
// ---------------------------------------------------------------------------

class CompiledExpr {
public:
    CompiledExpr() = default;
    static CompiledExpr compile(const Expr& e, std::span<const std::string> slots,
                                const std::map<std::string, double>& bound);
    // Returns NaN when a partial function is violated at the point.
    double operator()(std::span<const double> slot_values) const;

private:
    enum class Op : std::uint8_t { PushConst, PushSlot, Add, Sub, Mul, Div, Neg, Exp, Ln, Pow };
    struct Instr {
        Op op;
        int slot = 0;
        double value = 0.0;
    };
    std::vector<Instr> code_;
    int max_depth_ = 0;
};

}  // namespace jacobi3d
