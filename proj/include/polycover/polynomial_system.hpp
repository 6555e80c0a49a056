#pragma once

#include "polycover/polynomial.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polycover {

/// Raised for systems whose shape does not support the requested operation
/// (non-square systems, constant equations, ...).
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Equations sharing one variable list. Degrees are cached at construction.
template <class Coeff>
class BasicPolynomialSystem {
public:
    using poly_type = BasicPolynomial<Coeff>;

    BasicPolynomialSystem() = default;

    BasicPolynomialSystem(std::vector<poly_type> equations, std::vector<std::string> vars)
        : vars_(std::move(vars))
    {
        equations_.reserve(equations.size());
        for (auto& eq : equations) {
            equations_.push_back(eq.vars() == vars_ ? std::move(eq) : eq.aligned(vars_));
            degrees_.push_back(std::max(equations_.back().total_degree(), 0));
        }
    }

    /// Uses the merged variable list of all equations.
    explicit BasicPolynomialSystem(std::vector<poly_type> equations)
        : BasicPolynomialSystem(equations, merged_vars(equations))
    {
    }

    const std::vector<poly_type>& equations() const { return equations_; }
    const poly_type& operator[](std::size_t i) const { return equations_[i]; }
    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<int>& degrees() const { return degrees_; }
    std::size_t size() const { return equations_.size(); }
    std::size_t nvars() const { return vars_.size(); }
    bool is_square() const { return equations_.size() == vars_.size(); }

    BasicPolynomialSystem<Complex> to_numeric() const
    {
        std::vector<ComplexPolynomial> eqs;
        for (const auto& e : equations_) eqs.push_back(e.to_numeric());
        return {std::move(eqs), vars_};
    }

    std::vector<Complex> evaluate(std::span<const Complex> point) const
    {
        std::vector<Complex> out;
        out.reserve(equations_.size());
        for (const auto& e : equations_) out.push_back(e.evaluate(point));
        return out;
    }

    friend bool operator==(const BasicPolynomialSystem& a, const BasicPolynomialSystem& b)
    {
        return a.vars_ == b.vars_ && a.equations_ == b.equations_;
    }

private:
    static std::vector<std::string> merged_vars(const std::vector<poly_type>& eqs)
    {
        std::vector<std::string> v;
        for (const auto& e : eqs) v = merge_variables(v, e.vars());
        return v;
    }

    std::vector<std::string> vars_;
    std::vector<poly_type> equations_;
    std::vector<int> degrees_;
};

using PolynomialSystem = BasicPolynomialSystem<mpq_class>;
using ComplexSystem = BasicPolynomialSystem<Complex>;

/// Classical Bezout bound: the product of the equation degrees.
template <class Coeff>
std::uint64_t bezout_bound(const BasicPolynomialSystem<Coeff>& sys)
{
    if (!sys.is_square())
        throw StructuralError("Bezout bound needs a square system (" + std::to_string(sys.size()) +
                              " equations, " + std::to_string(sys.nvars()) + " variables)");
    std::uint64_t b = 1;
    for (int d : sys.degrees()) {
        if (d > 0 && b > UINT64_MAX / static_cast<std::uint64_t>(d))
            throw StructuralError("Bezout bound overflows 64 bits");
        b *= static_cast<std::uint64_t>(d);
    }
    return b;
}

} // namespace polycover
