#pragma once
// Textual polynomial grammar, e.g. "3/2*p1^2*p2 - 1/4" or "x*(1 - x)".
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*      division by constants only
//   factor  := ('+' | '-') factor | power
//   power   := primary ('^' integer)?
//   primary := number | identifier | '(' expr ')'
//
// Numbers may be integers, decimals or use an exponent ("2.5e-3"); all are
// read as exact rationals.

#include "polycover/polynomial.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polycover {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses `text`. With `vars` given, the result uses exactly that list and any
/// other identifier is an error; otherwise the identifiers found, naturally sorted.
Polynomial parse_polynomial(std::string_view text,
                            const std::optional<std::vector<std::string>>& vars = std::nullopt);

/// Parses a single rational literal such as "-3/4" or "0.25".
mpq_class parse_rational(std::string_view text);

std::string to_string(const Polynomial& p);
std::string to_string(const ComplexPolynomial& p);
std::string to_string(const mpq_class& q);

} // namespace polycover
