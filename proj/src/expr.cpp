#include "jacobi3d/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

namespace jacobi3d {

SymbolKind classify_symbol(std::string_view name) {
    if (name == "x1" || name == "x2" || name == "x3") return SymbolKind::Coordinate;
    if (name == "k1" || name == "k2" || name == "k3" ||
        name == "y1" || name == "y2" || name == "y3")
        return SymbolKind::Reserved;
    return SymbolKind::Parameter;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<const Expr::Node> shared_zero() {
    static const auto node = std::make_shared<Expr::Node>();
    return node;
}

Expr make_unary(Expr::Kind k, const Expr& x) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = x.node();
    return Expr(std::move(n));
}

Expr make_binary(Expr::Kind k, const Expr& x, const Expr& y) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = x.node();
    n->b = y.node();
    return Expr(std::move(n));
}

}  // namespace

Expr::Expr() : node_(shared_zero()) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::symbol(std::string name) {
    if (name.empty()) throw expr_error("empty symbol name");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Symbol;
    n->name = std::move(name);
    return Expr(std::move(n));
}

namespace {

bool coordinate_free(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return true;
        case Expr::Kind::Symbol: return classify_symbol(e.name()) == SymbolKind::Parameter;
        case Expr::Kind::Neg:
        case Expr::Kind::Exp:
        case Expr::Kind::Ln: return coordinate_free(e.child());
        default: return coordinate_free(e.lhs()) && coordinate_free(e.rhs());
    }
}

}  // namespace

Expr operator+(Expr a, Expr b) {
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
    return make_binary(Expr::Kind::Add, std::move(a), std::move(b));
}

Expr operator-(Expr a, Expr b) {
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return neg(std::move(b));
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
    return make_binary(Expr::Kind::Sub, std::move(a), std::move(b));
}

Expr operator*(Expr a, Expr b) {
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
    return make_binary(Expr::Kind::Mul, std::move(a), std::move(b));
}

Expr operator/(Expr a, Expr b) {
    if (b.is_constant(1.0)) return a;
    if (a.is_constant() && b.is_constant() && b.value() != 0.0)
        return Expr::constant(a.value() / b.value());
    return make_binary(Expr::Kind::Div, std::move(a), std::move(b));
}

Expr neg(Expr a) {
    if (a.is_constant()) return Expr::constant(-a.value());
    if (a.kind() == Expr::Kind::Neg) return a.child();
    return make_unary(Expr::Kind::Neg, std::move(a));
}

Expr exp(Expr a) {
    if (a.is_constant(0.0)) return Expr::constant(1.0);
    if (a.is_constant()) return Expr::constant(std::exp(a.value()));
    return make_unary(Expr::Kind::Exp, std::move(a));
}

Expr ln(Expr a) {
    if (a.is_constant(1.0)) return Expr::constant(0.0);
    if (a.is_constant() && a.value() > 0.0) return Expr::constant(std::log(a.value()));
    return make_unary(Expr::Kind::Ln, std::move(a));
}

Expr pow(Expr base, Expr exponent) {
    if (!coordinate_free(exponent))
        throw expr_error("power exponent must not depend on coordinates or reserved symbols");
    if (exponent.is_constant(0.0)) return Expr::constant(1.0);
    if (exponent.is_constant(1.0)) return base;
    if (base.is_constant(1.0)) return Expr::constant(1.0);
    if (base.is_constant() && exponent.is_constant()) {
        const double v = std::pow(base.value(), exponent.value());
        if (std::isfinite(v)) return Expr::constant(v);
    }
    return make_binary(Expr::Kind::Pow, std::move(base), std::move(exponent));
}

Expr pow(Expr base, double exponent) { return pow(std::move(base), Expr::constant(exponent)); }

// ---------------------------------------------------------------------------
// Traversal helpers
// ---------------------------------------------------------------------------

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return;
        case Expr::Kind::Symbol: out.insert(e.name()); return;
        case Expr::Kind::Neg:
        case Expr::Kind::Exp:
        case Expr::Kind::Ln: collect_symbols(e.child(), out); return;
        default:
            collect_symbols(e.lhs(), out);
            collect_symbols(e.rhs(), out);
            return;
    }
}

std::set<std::string> symbols_of(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, out);
    return out;
}

bool depends_on(const Expr& e, std::string_view name) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return false;
        case Expr::Kind::Symbol: return e.name() == name;
        case Expr::Kind::Neg:
        case Expr::Kind::Exp:
        case Expr::Kind::Ln: return depends_on(e.child(), name);
        default: return depends_on(e.lhs(), name) || depends_on(e.rhs(), name);
    }
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::Constant: return a.value() == b.value();
        case Expr::Kind::Symbol: return a.name() == b.name();
        case Expr::Kind::Neg:
        case Expr::Kind::Exp:
        case Expr::Kind::Ln: return structurally_equal(a.child(), b.child());
        default:
            return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
    }
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

Expr diff(const Expr& e, std::string_view var) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return Expr::constant(0.0);
        case Expr::Kind::Symbol: return Expr::constant(e.name() == var ? 1.0 : 0.0);
        case Expr::Kind::Neg: return neg(diff(e.child(), var));
        case Expr::Kind::Exp: return exp(e.child()) * diff(e.child(), var);
        case Expr::Kind::Ln: return diff(e.child(), var) / e.child();
        case Expr::Kind::Add: return diff(e.lhs(), var) + diff(e.rhs(), var);
        case Expr::Kind::Sub: return diff(e.lhs(), var) - diff(e.rhs(), var);
        case Expr::Kind::Mul:
            return diff(e.lhs(), var) * e.rhs() + e.lhs() * diff(e.rhs(), var);
        case Expr::Kind::Div:
            return (diff(e.lhs(), var) * e.rhs() - e.lhs() * diff(e.rhs(), var)) /
                   (e.rhs() * e.rhs());
        case Expr::Kind::Pow: {
            // Exponents are coordinate-free by construction, so the result
            // is c * base^(c-1) * base'.
            const Expr& base = e.lhs();
            const Expr& c = e.rhs();
            return c * pow(base, c - Expr::constant(1.0)) * diff(base, var);
        }
    }
    throw expr_error("diff: malformed expression node");
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e;
        case Expr::Kind::Symbol: {
            auto it = repl.find(e.name());
            return it != repl.end() ? it->second : e;
        }
        case Expr::Kind::Neg: return neg(substitute(e.child(), repl));
        case Expr::Kind::Exp: return exp(substitute(e.child(), repl));
        case Expr::Kind::Ln: return ln(substitute(e.child(), repl));
        case Expr::Kind::Add: return substitute(e.lhs(), repl) + substitute(e.rhs(), repl);
        case Expr::Kind::Sub: return substitute(e.lhs(), repl) - substitute(e.rhs(), repl);
        case Expr::Kind::Mul: return substitute(e.lhs(), repl) * substitute(e.rhs(), repl);
        case Expr::Kind::Div: return substitute(e.lhs(), repl) / substitute(e.rhs(), repl);
        case Expr::Kind::Pow:
            return pow(substitute(e.lhs(), repl), substitute(e.rhs(), repl));
    }
    throw expr_error("substitute: malformed expression node");
}

// ---------------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------------

namespace {

// Pulls a leading sign out of Neg nodes and Mul chains, so -r*x2 and
// r*x2 cancel and print without double minuses.
std::pair<double, Expr> strip_sign(const Expr& e) {
    if (e.kind() == Expr::Kind::Neg) {
        auto [s, core] = strip_sign(e.child());
        return {-s, core};
    }
    if (e.kind() == Expr::Kind::Mul) {
        auto [s, core] = strip_sign(e.lhs());
        if (s < 0.0) return {s, core * e.rhs()};
    }
    return {1.0, e};
}

// Flattens nested Add/Sub into a signed term list.
void flatten_sum(const Expr& e, double sign, std::vector<std::pair<double, Expr>>& terms) {
    if (e.kind() == Expr::Kind::Add) {
        flatten_sum(e.lhs(), sign, terms);
        flatten_sum(e.rhs(), sign, terms);
    } else if (e.kind() == Expr::Kind::Sub) {
        flatten_sum(e.lhs(), sign, terms);
        flatten_sum(e.rhs(), -sign, terms);
    } else if (e.kind() == Expr::Kind::Neg) {
        flatten_sum(e.child(), -sign, terms);
    } else {
        auto [s, core] = strip_sign(e);
        terms.emplace_back(s * sign, core);
    }
}

Expr rebuild_sum(std::vector<std::pair<double, Expr>>& terms) {
    // Fold constants, cancel structurally equal terms of opposite sign.
    double constant_part = 0.0;
    std::vector<std::pair<double, Expr>> kept;
    for (auto& [sign, term] : terms) {
        if (term.is_constant()) {
            constant_part += sign * term.value();
            continue;
        }
        const std::string key = to_string(term);
        bool cancelled = false;
        for (auto it = kept.begin(); it != kept.end(); ++it) {
            if (it->first == -sign && to_string(it->second) == key) {
                kept.erase(it);
                cancelled = true;
                break;
            }
        }
        if (!cancelled) kept.emplace_back(sign, term);
    }
    Expr acc = Expr::constant(constant_part);
    for (auto& [sign, term] : kept) acc = sign > 0 ? acc + term : acc - term;
    return acc;
}

}  // namespace

Expr simplify(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant:
        case Expr::Kind::Symbol: return e;
        case Expr::Kind::Neg: return neg(simplify(e.child()));
        case Expr::Kind::Exp: return exp(simplify(e.child()));
        case Expr::Kind::Ln: return ln(simplify(e.child()));
        case Expr::Kind::Mul: return simplify(e.lhs()) * simplify(e.rhs());
        case Expr::Kind::Div: return simplify(e.lhs()) / simplify(e.rhs());
        case Expr::Kind::Pow: return pow(simplify(e.lhs()), simplify(e.rhs()));
        case Expr::Kind::Add:
        case Expr::Kind::Sub: {
            std::vector<std::pair<double, Expr>> terms;
            flatten_sum(e, 1.0, terms);
            for (auto& [sign, term] : terms) term = simplify(term);
            return rebuild_sum(terms);
        }
    }
    throw expr_error("simplify: malformed expression node");
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels: add/sub 1, mul/div 2, unary minus 3, pow 4, atoms 5.
int precedence(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div: return 2;
        case Expr::Kind::Neg: return 3;
        case Expr::Kind::Pow: return 4;
        default: return 5;
    }
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
    return std::string(buf, end);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, std::string& out, bool parens) {
    if (parens) out.push_back('(');
    print(e, out);
    if (parens) out.push_back(')');
}

// Right operands whose rendering leads with '-' get parentheses so the
// output never contains '--' or '*-'.
void print_rhs(const Expr& e, std::string& out, bool parens) {
    std::string rendered;
    print(e, rendered);
    if (parens || (!rendered.empty() && rendered.front() == '-')) {
        out.push_back('(');
        out += rendered;
        out.push_back(')');
    } else {
        out += rendered;
    }
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Constant: out += format_double(e.value()); return;
        case Expr::Kind::Symbol: out += e.name(); return;
        case Expr::Kind::Neg:
            // unary minus distributes over the leading factor, so mul/div
            // children reparse to an equal value without parentheses
            out.push_back('-');
            print_wrapped(e.child(), out, precedence(e.child()) < 2);
            return;
        case Expr::Kind::Exp:
            out += "exp(";
            print(e.child(), out);
            out.push_back(')');
            return;
        case Expr::Kind::Ln:
            out += "ln(";
            print(e.child(), out);
            out.push_back(')');
            return;
        case Expr::Kind::Add:
            print_wrapped(e.lhs(), out, false);
            out.push_back('+');
            print_rhs(e.rhs(), out, precedence(e.rhs()) <= 1);
            return;
        case Expr::Kind::Sub:
            print_wrapped(e.lhs(), out, false);
            out.push_back('-');
            print_rhs(e.rhs(), out, precedence(e.rhs()) <= 1);
            return;
        case Expr::Kind::Mul:
            print_wrapped(e.lhs(), out, precedence(e.lhs()) < 2);
            out.push_back('*');
            print_rhs(e.rhs(), out, precedence(e.rhs()) <= 2);
            return;
        case Expr::Kind::Div:
            print_wrapped(e.lhs(), out, precedence(e.lhs()) < 2);
            out.push_back('/');
            print_rhs(e.rhs(), out, precedence(e.rhs()) <= 2);
            return;
        case Expr::Kind::Pow: {
            print_wrapped(e.lhs(), out, precedence(e.lhs()) < 5);
            out.push_back('^');
            const Expr& c = e.rhs();
            const bool bare =
                (c.is_constant() && c.value() >= 0.0) || c.kind() == Expr::Kind::Symbol;
            print_wrapped(c, out, !bare);
            return;
        }
    }
    throw expr_error("to_string: malformed expression node");
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    out.reserve(64);
    print(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

double eval_strict(const Expr& e, const EvalEnv& env) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e.value();
        case Expr::Kind::Symbol: {
            auto it = env.find(e.name());
            if (it == env.end()) throw eval_error("unbound symbol '" + e.name() + "'");
            return it->second;
        }
        case Expr::Kind::Neg: return -eval_strict(e.child(), env);
        case Expr::Kind::Exp: {
            const double v = std::exp(eval_strict(e.child(), env));
            if (!std::isfinite(v)) throw eval_error("exp overflow");
            return v;
        }
        case Expr::Kind::Ln: {
            const double a = eval_strict(e.child(), env);
            if (a <= 0.0) throw eval_error("ln of non-positive value");
            return std::log(a);
        }
        case Expr::Kind::Add: return eval_strict(e.lhs(), env) + eval_strict(e.rhs(), env);
        case Expr::Kind::Sub: return eval_strict(e.lhs(), env) - eval_strict(e.rhs(), env);
        case Expr::Kind::Mul: {
            const double v = eval_strict(e.lhs(), env) * eval_strict(e.rhs(), env);
            if (!std::isfinite(v)) throw eval_error("non-finite product");
            return v;
        }
        case Expr::Kind::Div: {
            const double d = eval_strict(e.rhs(), env);
            if (d == 0.0) throw eval_error("division by zero");
            return eval_strict(e.lhs(), env) / d;
        }
        case Expr::Kind::Pow: {
            const double b = eval_strict(e.lhs(), env);
            const double c = eval_strict(e.rhs(), env);
            if (b < 0.0 && c != std::floor(c))
                throw eval_error("non-integer power of negative base");
            if (b == 0.0 && c < 0.0) throw eval_error("negative power of zero");
            const double v = std::pow(b, c);
            if (!std::isfinite(v)) throw eval_error("non-finite power");
            return v;
        }
    }
    throw eval_error("eval: malformed expression node");
}

// Guarded walk; NaN marks undefined, guard breaches surface through a flag.
double eval_soft(const Expr& e, const EvalEnv& env, double guard, bool& tripped) {
    double v = 0.0;
    switch (e.kind()) {
        case Expr::Kind::Constant: v = e.value(); break;
        case Expr::Kind::Symbol: {
            auto it = env.find(e.name());
            if (it == env.end()) throw eval_error("unbound symbol '" + e.name() + "'");
            v = it->second;
            break;
        }
        case Expr::Kind::Neg: v = -eval_soft(e.child(), env, guard, tripped); break;
        case Expr::Kind::Exp: v = std::exp(eval_soft(e.child(), env, guard, tripped)); break;
        case Expr::Kind::Ln: {
            const double a = eval_soft(e.child(), env, guard, tripped);
            v = a > 0.0 ? std::log(a) : std::numeric_limits<double>::quiet_NaN();
            break;
        }
        case Expr::Kind::Add:
            v = eval_soft(e.lhs(), env, guard, tripped) + eval_soft(e.rhs(), env, guard, tripped);
            break;
        case Expr::Kind::Sub:
            v = eval_soft(e.lhs(), env, guard, tripped) - eval_soft(e.rhs(), env, guard, tripped);
            break;
        case Expr::Kind::Mul:
            v = eval_soft(e.lhs(), env, guard, tripped) * eval_soft(e.rhs(), env, guard, tripped);
            break;
        case Expr::Kind::Div: {
            const double n = eval_soft(e.lhs(), env, guard, tripped);
            const double d = eval_soft(e.rhs(), env, guard, tripped);
            v = d != 0.0 ? n / d : std::numeric_limits<double>::quiet_NaN();
            break;
        }
        case Expr::Kind::Pow: {
            const double b = eval_soft(e.lhs(), env, guard, tripped);
            const double c = eval_soft(e.rhs(), env, guard, tripped);
            if ((b < 0.0 && c != std::floor(c)) || (b == 0.0 && c < 0.0))
                v = std::numeric_limits<double>::quiet_NaN();
            else
                v = std::pow(b, c);
            break;
        }
    }
    if (std::isfinite(v)) {
        if (std::abs(v) > guard) tripped = true;
    } else if (!std::isnan(v)) {
        tripped = true;  // overflow to infinity counts against the guard
        v = std::numeric_limits<double>::quiet_NaN();
    }
    return v;
}

}  // namespace

double eval(const Expr& e, const EvalEnv& env) {
    const double v = eval_strict(e, env);
    if (!std::isfinite(v)) throw eval_error("non-finite result");
    return v;
}

GuardedEval eval_guarded(const Expr& e, const EvalEnv& env, double guard) {
    bool tripped = false;
    const double v = eval_soft(e, env, guard, tripped);
    if (std::isnan(v)) return {GuardedEval::Status::Undefined, v};
    if (tripped) return {GuardedEval::Status::GuardTripped, v};
    return {GuardedEval::Status::Ok, v};
}

// ---------------------------------------------------------------------------
// Domains and frames
// ---------------------------------------------------------------------------

Domain Domain::cube(double lo, double hi) {
    Domain d;
    d.box = {Interval{lo, hi}, Interval{lo, hi}, Interval{lo, hi}};
    d.validate();
    return d;
}

Domain Domain::positive_cube(double lo, double hi) {
    Domain d = cube(lo, hi);
    d.positive = {true, true, true};
    d.validate();
    return d;
}

void Domain::validate() const {
    for (int i = 0; i < 3; ++i) {
        const auto& iv = box[static_cast<std::size_t>(i)];
        if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)))
            throw std::invalid_argument("domain bounds must be finite");
        if (!(iv.lo < iv.hi)) throw std::invalid_argument("domain requires lower < upper");
        if (positive[static_cast<std::size_t>(i)] && iv.lo < 0.0)
            throw std::invalid_argument("positive coordinate requires non-negative lower bound");
    }
}

bool Domain::contains(const std::array<double, 3>& x) const {
    for (int i = 0; i < 3; ++i) {
        const auto& iv = box[static_cast<std::size_t>(i)];
        if (!(x[static_cast<std::size_t>(i)] > iv.lo && x[static_cast<std::size_t>(i)] < iv.hi))
            return false;
    }
    return true;
}

const Frame& Frame::x() {
    static const Frame f{{"x1", "x2", "x3"}};
    return f;
}

const Frame& Frame::y() {
    static const Frame f{{"y1", "y2", "y3"}};
    return f;
}

EvalEnv make_env(const Point& p, const Frame& frame) {
    EvalEnv env;
    for (int i = 0; i < 3; ++i)
        env.emplace(frame.names[static_cast<std::size_t>(i)], p.coords[static_cast<std::size_t>(i)]);
    for (const auto& [name, value] : p.params) env.emplace(name, value);
    return env;
}

// ---------------------------------------------------------------------------
// Compiled evaluation
// ---------------------------------------------------------------------------

CompiledExpr CompiledExpr::compile(const Expr& e, std::span<const std::string> slots,
                                   const std::map<std::string, double>& bound) {
    CompiledExpr c;
    int depth = 0;
    int max_depth = 0;
    auto emit = [&](Instr instr, int delta) {
        c.code_.push_back(instr);
        depth += delta;
        max_depth = std::max(max_depth, depth);
    };
    auto walk = [&](auto&& self, const Expr& node) -> void {
        switch (node.kind()) {
            case Expr::Kind::Constant:
                emit({Op::PushConst, 0, node.value()}, 1);
                return;
            case Expr::Kind::Symbol: {
                for (std::size_t i = 0; i < slots.size(); ++i) {
                    if (slots[i] == node.name()) {
                        emit({Op::PushSlot, static_cast<int>(i), 0.0}, 1);
                        return;
                    }
                }
                auto it = bound.find(node.name());
                if (it == bound.end())
                    throw eval_error("compile: unbound symbol '" + node.name() + "'");
                emit({Op::PushConst, 0, it->second}, 1);
                return;
            }
            case Expr::Kind::Neg:
                self(self, node.child());
                emit({Op::Neg, 0, 0.0}, 0);
                return;
            case Expr::Kind::Exp:
                self(self, node.child());
                emit({Op::Exp, 0, 0.0}, 0);
                return;
            case Expr::Kind::Ln:
                self(self, node.child());
                emit({Op::Ln, 0, 0.0}, 0);
                return;
            case Expr::Kind::Add:
            case Expr::Kind::Sub:
            case Expr::Kind::Mul:
            case Expr::Kind::Div:
            case Expr::Kind::Pow: {
                self(self, node.lhs());
                self(self, node.rhs());
                Op op = Op::Add;
                if (node.kind() == Expr::Kind::Sub) op = Op::Sub;
                if (node.kind() == Expr::Kind::Mul) op = Op::Mul;
                if (node.kind() == Expr::Kind::Div) op = Op::Div;
                if (node.kind() == Expr::Kind::Pow) op = Op::Pow;
                emit({op, 0, 0.0}, -1);
                return;
            }
        }
        throw expr_error("compile: malformed expression node");
    };
    walk(walk, e);
    c.max_depth_ = max_depth;
    return c;
}

double CompiledExpr::operator()(std::span<const double> slot_values) const {
    constexpr int kInlineDepth = 64;
    double inline_stack[kInlineDepth];
    std::vector<double> heap_stack;
    double* stack = inline_stack;
    if (max_depth_ > kInlineDepth) {
        heap_stack.resize(static_cast<std::size_t>(max_depth_));
        stack = heap_stack.data();
    }
    int top = 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::PushConst: stack[top++] = in.value; break;
            case Op::PushSlot: stack[top++] = slot_values[static_cast<std::size_t>(in.slot)]; break;
            case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
            case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
            case Op::Ln:
                stack[top - 1] = stack[top - 1] > 0.0 ? std::log(stack[top - 1]) : nan;
                break;
            case Op::Add: --top; stack[top - 1] += stack[top]; break;
            case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
            case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
            case Op::Div:
                --top;
                stack[top - 1] = stack[top] != 0.0 ? stack[top - 1] / stack[top] : nan;
                break;
            case Op::Pow: {
                --top;
                const double b = stack[top - 1];
                const double c = stack[top];
                if ((b < 0.0 && c != std::floor(c)) || (b == 0.0 && c < 0.0))
                    stack[top - 1] = nan;
                else
                    stack[top - 1] = std::pow(b, c);
                break;
            }
        }
    }
    return top == 1 ? stack[0] : nan;
}

}  // namespace jacobi3d
