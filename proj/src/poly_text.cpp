#include "polycover/poly_text.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace polycover {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
      position_(position)
{
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view s)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // U+2212 MINUS SIGN
        if (s.substr(i, 3) == "\xE2\x88\x92") {
            out.push_back({Tok::Minus, "-", i});
            i += 3;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = i;
            while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
                if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    i = j;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                }
            }
            out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
            continue;
        }
        if (ident_start(c)) {
            const std::size_t start = i;
            while (i < s.size() && ident_char(s[i])) ++i;
            out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
            continue;
        }
        Tok k;
        switch (c) {
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '/': k = Tok::Slash; break;
        case '^': k = Tok::Caret; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        out.push_back({k, std::string(1, c), i});
        ++i;
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

mpq_class number_value(const std::string& text, std::size_t pos)
{
    std::string mant = text;
    long exp10 = 0;
    if (auto e = mant.find_first_of("eE"); e != std::string::npos) {
        try {
            exp10 = std::stol(mant.substr(e + 1));
        }
        catch (const std::exception&) {
            throw ParseError("malformed exponent in '" + text + "'", pos);
        }
        mant.resize(e);
    }
    const auto dot = mant.find('.');
    if (dot != std::string::npos) {
        if (mant.find('.', dot + 1) != std::string::npos)
            throw ParseError("malformed number '" + text + "'", pos);
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty()) throw ParseError("malformed number '" + text + "'", pos);
    mpz_class digits(mant, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    mpq_class q = exp10 >= 0 ? mpq_class(digits * scale) : mpq_class(digits, scale);
    q.canonicalize();
    return q;
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<std::string> vars)
        : toks_(std::move(toks)), vars_(std::move(vars))
    {
    }

    Polynomial parse()
    {
        auto p = expr();
        if (peek().kind != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().pos);
        return p;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& take() { return toks_[i_++]; }

    Polynomial expr()
    {
        auto acc = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const bool minus = take().kind == Tok::Minus;
            auto rhs = term();
            if (minus) acc -= rhs;
            else acc += rhs;
        }
        return acc;
    }

    Polynomial term()
    {
        auto acc = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const auto op = take();
            auto rhs = factor();
            if (op.kind == Tok::Star) {
                acc = acc * rhs;
                continue;
            }
            if (rhs.total_degree() > 0)
                throw ParseError("division by a non-constant polynomial", op.pos);
            const mpq_class d = rhs.coefficient(Exponent(vars_.size(), 0));
            if (sgn(d) == 0) throw ParseError("division by zero", op.pos);
            acc *= mpq_class(1) / d;
        }
        return acc;
    }

    Polynomial factor()
    {
        if (peek().kind == Tok::Minus) {
            take();
            return -factor();
        }
        if (peek().kind == Tok::Plus) {
            take();
            return factor();
        }
        return power();
    }

    Polynomial power()
    {
        auto base = primary();
        if (peek().kind != Tok::Caret) return base;
        take();
        const auto& t = take();
        if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("exponent must be a non-negative integer", t.pos);
        if (t.text.size() > 4) throw ParseError("exponent too large", t.pos);
        return base.pow(static_cast<unsigned>(std::stoul(t.text)));
    }

    Polynomial primary()
    {
        const auto& t = take();
        switch (t.kind) {
        case Tok::Number:
            return Polynomial::constant(vars_, number_value(t.text, t.pos));
        case Tok::Ident:
            if (std::find(vars_.begin(), vars_.end(), t.text) == vars_.end())
                throw ParseError("unknown variable '" + t.text + "'", t.pos);
            return Polynomial::variable(vars_, t.text);
        case Tok::LParen: {
            auto inner = expr();
            if (peek().kind != Tok::RParen) throw ParseError("expected ')'", peek().pos);
            take();
            return inner;
        }
        case Tok::End:
            throw ParseError("unexpected end of input", t.pos);
        default:
            throw ParseError("unexpected '" + t.text + "'", t.pos);
        }
    }

    std::vector<Token> toks_;
    std::vector<std::string> vars_;
    std::size_t i_ = 0;
};

std::string monomial_text(const Exponent& e, const std::vector<std::string>& vars)
{
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!s.empty()) s += '*';
        s += vars[i];
        if (e[i] > 1) s += '^' + std::to_string(e[i]);
    }
    return s;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Polynomial parse_polynomial(std::string_view text, const std::optional<std::vector<std::string>>& vars)
{
    auto toks = tokenize(text);
    std::vector<std::string> names;
    if (vars) {
        names = *vars;
    }
    else {
        for (const auto& t : toks)
            if (t.kind == Tok::Ident) names.push_back(t.text);
        std::vector<std::string> none;
        names = merge_variables(names, none);
    }
    return Parser(std::move(toks), std::move(names)).parse();
}

mpq_class parse_rational(std::string_view text)
{
    auto p = parse_polynomial(text, std::vector<std::string>{});
    return p.coefficient(Exponent{});
}

std::string to_string(const mpq_class& q)
{
    return q.get_str();
}

std::string to_string(const Polynomial& p)
{
    if (p.is_zero()) return "0";
    std::string out;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        const bool neg = sgn(c) < 0;
        const mpq_class mag = abs(c);
        const auto mono = monomial_text(e, p.vars());
        if (out.empty()) out += neg ? "-" : "";
        else out += neg ? " - " : " + ";
        if (mono.empty()) out += mag.get_str();
        else if (mag == 1) out += mono;
        else out += mag.get_str() + "*" + mono;
    }
    return out;
}

std::string to_string(const ComplexPolynomial& p)
{
    if (p.is_zero()) return "0";
    std::string out;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        if (!out.empty()) out += " + ";
        out += "(" + format_double(c.real()) + (c.imag() < 0 ? "" : "+") + format_double(c.imag()) + "i)";
        const auto mono = monomial_text(e, p.vars());
        if (!mono.empty()) out += "*" + mono;
    }
    return out;
}

} // namespace polycover
