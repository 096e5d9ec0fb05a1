#include "dlambda/expr.hpp"

#include <cctype>
#include <string>

namespace dlambda {

namespace {

bool is_cont_name(const std::string& s) {
    // continuous jet variables: x, u, u1, u2, ...
    if (s == "x" || s == "u")
        return true;
    if (s.size() > 1 && s[0] == 'u') {
        for (size_t i = 1; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i])))
                return false;
        return true;
    }
    return false;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    Expr run() {
        skip_ws();
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected trailing input");
        return e;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at line " + std::to_string(line_) + ", column " +
                             std::to_string(col_),
                         line_, col_);
    }

    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    char advance() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            advance();
    }

    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    Expr parse_expr() {
        skip_ws();
        bool neg_first = false;
        if (peek() == '+' || peek() == '-')
            neg_first = advance() == '-';
        Expr e = parse_term();
        if (neg_first)
            e = neg(e);
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                advance();
                e = add(e, parse_term());
            } else if (peek() == '-') {
                advance();
                e = sub(e, parse_term());
            } else {
                return e;
            }
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                advance();
                e = mul(e, parse_factor());
            } else if (peek() == '/') {
                advance();
                e = div(e, parse_factor());
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        Expr b = parse_base();
        skip_ws();
        if (peek() == '^') {
            advance();
            long e = parse_int("exponent");
            return powi(b, e);
        }
        return b;
    }

    long parse_int(const char* what) {
        skip_ws();
        bool negative = false;
        if (peek() == '+' || peek() == '-')
            negative = advance() == '-';
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            fail(std::string("expected integer ") + what);
        long v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + (advance() - '0');
            if (v > 1000000)
                fail(std::string("integer ") + what + " out of range");
        }
        return negative ? -v : v;
    }

    Expr parse_number() {
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek())))
            digits += advance();
        if (peek() == '.') {
            digits += advance();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail("expected digits after decimal point");
            while (std::isdigit(static_cast<unsigned char>(peek())))
                digits += advance();
        }
        return num(Rational::from_string(digits));
    }

    std::string parse_ident() {
        std::string id;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
            id += advance();
        return id;
    }

    Expr parse_base() {
        skip_ws();
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)))
            return parse_number();
        if (c == '(') {
            advance();
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_')
            fail("expected number, identifier or '('");
        std::string id = parse_ident();
        if (id == "exp" || id == "log") {
            expect('(');
            Expr a = parse_expr();
            expect(')');
            return id == "exp" ? expf(a) : logf(a);
        }
        int primes = 0;
        while (peek() == '\'') {
            advance();
            ++primes;
        }
        if (peek() == '[') {
            advance();
            long k = parse_int("lattice offset");
            expect(']');
            skip_ws();
            if (peek() == '(') {
                advance();
                Expr a = parse_expr();
                expect(')');
                if (id == "u" || id == "x")
                    fail("'" + id + "' is reserved for lattice variables, not functions");
                return func(id, static_cast<int>(k), primes, a);
            }
            if (primes > 0)
                fail("derivative marks require a function argument");
            if (id != "u" && id != "x")
                fail("only u and x take lattice indices; '" + id + "[k]' needs an argument");
            return lattice(id[0], static_cast<int>(k));
        }
        if (primes > 0)
            fail("derivative marks require an indexed function symbol");
        if (is_cont_name(id))
            return cvar(id);
        return param(id);
    }
};

} // namespace

Expr parse(const std::string& text) { return Parser(text).run(); }

} // namespace dlambda
