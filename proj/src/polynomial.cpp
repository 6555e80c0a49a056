#include "polycover/polynomial.hpp"

#include <algorithm>
#include <cctype>

namespace polycover {

namespace {

// Splits a name into a text prefix and a trailing decimal suffix.
std::pair<std::string_view, std::string_view> split_digits(std::string_view s)
{
    std::size_t k = s.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
    return {s.substr(0, k), s.substr(k)};
}

} // namespace

bool variable_less(std::string_view a, std::string_view b)
{
    auto [pa, da] = split_digits(a);
    auto [pb, db] = split_digits(b);
    if (pa != pb || da.empty() || db.empty()) return a < b;
    // Same prefix, both numbered: compare the numbers by magnitude.
    auto strip = [](std::string_view d) {
        while (d.size() > 1 && d.front() == '0') d.remove_prefix(1);
        return d;
    };
    auto na = strip(da);
    auto nb = strip(db);
    if (na.size() != nb.size()) return na.size() < nb.size();
    if (na != nb) return na < nb;
    return da < db;
}

std::vector<std::string> merge_variables(std::span<const std::string> a,
                                         std::span<const std::string> b)
{
    std::vector<std::string> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return variable_less(x, y); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Polynomial integer_normalized(const Polynomial& p)
{
    if (p.is_zero()) return p;
    mpz_class lcm = 1;
    for (const auto& [e, c] : p.terms()) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    mpz_class content = 0;
    for (const auto& [e, c] : p.terms()) {
        mpz_class num = c.get_num() * (lcm / c.get_den());
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), num.get_mpz_t());
    }
    return p * mpq_class(lcm, content);
}

std::pair<Polynomial, unsigned> strip_variable_power(const Polynomial& p, std::string_view var,
                                                     unsigned keep)
{
    const auto j = p.index_of(var);
    if (p.is_zero()) return {p, 0};
    const unsigned mult = p.monomial_content()[j];
    if (mult <= keep) return {p, mult};
    Exponent m(p.nvars(), 0);
    m[j] = mult - keep;
    return {p.divide_monomial(m), mult};
}

} // namespace polycover
