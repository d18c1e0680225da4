#include "jacobi3d/expr.hpp"

#include <cctype>
#include <charconv>

namespace jacobi3d {

namespace {

// Grammar:
//   expression := term { ('+'|'-') term }
//   term       := unary { ('*'|'/') unary }
//   unary      := '-' unary | power
//   power      := atom { '^' exponent }          (left-associative)
//   exponent   := '-' exponent | atom
//   atom       := NUMBER | IDENT | IDENT '(' expression ')' | '(' expression ')'
// The only functions are exp and ln.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expression() {
        Expr e = term();
        while (true) {
            if (accept('+'))
                e = std::move(e) + term();
            else if (accept('-'))
                e = std::move(e) - term();
            else
                return e;
        }
    }

    Expr term() {
        Expr e = unary();
        while (true) {
            if (accept('*'))
                e = std::move(e) * unary();
            else if (accept('/'))
                e = std::move(e) / unary();
            else
                return e;
        }
    }

    Expr unary() {
        if (accept('-')) return neg(unary());
        return power();
    }

    Expr power() {
        Expr e = atom();
        while (accept('^')) {
            const std::size_t op_pos = pos_ - 1;
            Expr c = exponent();
            try {
                e = pow(std::move(e), std::move(c));
            } catch (const expr_error& err) {
                throw parse_error(err.what(), op_pos);
            }
        }
        return e;
    }

    Expr exponent() {
        if (accept('-')) return neg(exponent());
        return atom();
    }

    Expr atom() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        if (c == '\0') fail("unexpected end of input");
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr number() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
            fail("malformed number");
        // Optional exponent part, so printed doubles round-trip.
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t probe = pos_ + 1;
            if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) ++probe;
            if (probe < text_.size() && std::isdigit(static_cast<unsigned char>(text_[probe]))) {
                pos_ = probe;
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            }
        }
        double value = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        auto [end, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || end != last) fail("malformed number");
        return Expr::constant(value);
    }

    Expr identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (peek() == '(') {
            if (name != "exp" && name != "ln") {
                pos_ = start;
                fail("unknown function '" + name + "'");
            }
            ++pos_;  // '('
            Expr arg = expression();
            if (!accept(')')) fail("expected ')'");
            return name == "exp" ? exp(std::move(arg)) : ln(std::move(arg));
        }
        return Expr::symbol(std::move(name));
    }
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace jacobi3d
