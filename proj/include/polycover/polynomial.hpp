#pragma once
// Sparse multivariate polynomials over exact rationals (GMP) or complex doubles.
//
// A polynomial owns its ordered variable list. Binary arithmetic requires
// identical lists; use aligned() / align_pair() to bring two polynomials onto a
// common list first.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polycover {

using Complex = std::complex<double>;
using Exponent = std::vector<std::uint32_t>;

class AlignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnknownVariable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Natural ordering of variable names: "p2" < "p10", otherwise lexicographic.
bool variable_less(std::string_view a, std::string_view b);

/// Sorted, de-duplicated union of two variable lists under variable_less.
std::vector<std::string> merge_variables(std::span<const std::string> a,
                                         std::span<const std::string> b);

template <class Coeff>
struct CoeffTraits;

template <>
struct CoeffTraits<mpq_class> {
    static constexpr bool exact = true;
    static bool is_zero(const mpq_class& c) { return sgn(c) == 0; }
    static Complex to_complex(const mpq_class& c) { return {c.get_d(), 0.0}; }
    static mpq_class from_int(long v) { return mpq_class(v); }
};

template <>
struct CoeffTraits<Complex> {
    static constexpr bool exact = false;
    static bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
    static Complex to_complex(const Complex& c) { return c; }
    static Complex from_int(long v) { return {static_cast<double>(v), 0.0}; }
};

template <class Coeff>
class BasicPolynomial {
public:
    using coeff_type = Coeff;
    using traits = CoeffTraits<Coeff>;
    using TermMap = std::map<Exponent, Coeff>;

    BasicPolynomial() = default;
    explicit BasicPolynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static BasicPolynomial constant(std::vector<std::string> vars, const Coeff& c)
    {
        BasicPolynomial p(std::move(vars));
        p.add_term(Exponent(p.nvars(), 0), c);
        return p;
    }

    static BasicPolynomial variable(std::vector<std::string> vars, std::string_view name)
    {
        BasicPolynomial p(std::move(vars));
        Exponent e(p.nvars(), 0);
        e[p.index_of(name)] = 1;
        p.add_term(std::move(e), traits::from_int(1));
        return p;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    std::size_t nvars() const { return vars_.size(); }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    bool has_variable(std::string_view name) const
    {
        for (const auto& v : vars_)
            if (v == name) return true;
        return false;
    }

    std::size_t index_of(std::string_view name) const
    {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return i;
        throw UnknownVariable("unknown variable '" + std::string(name) + "'");
    }

    /// Adds c * x^e, dropping the term if the coefficient cancels to zero.
    void add_term(Exponent e, const Coeff& c)
    {
        if (e.size() != vars_.size())
            throw DimensionMismatch("exponent length does not match variable count");
        if (traits::is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) {
            it->second += c;
            if (traits::is_zero(it->second)) terms_.erase(it);
        }
    }

    Coeff coefficient(const Exponent& e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? Coeff(0) : it->second;
    }

    int total_degree() const
    {
        int d = terms_.empty() ? -1 : 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (auto k : e) s += static_cast<int>(k);
            d = std::max(d, s);
        }
        return d;
    }

    int degree_in(std::string_view name) const
    {
        const auto j = index_of(name);
        int d = terms_.empty() ? -1 : 0;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[j]));
        return d;
    }

    /// Re-expresses the polynomial over `target`, which must contain every
    /// variable that actually occurs.
    BasicPolynomial aligned(std::span<const std::string> target) const
    {
        std::vector<std::size_t> map(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            std::size_t j = 0;
            while (j < target.size() && target[j] != vars_[i]) ++j;
            map[i] = j;
        }
        BasicPolynomial out(std::vector<std::string>(target.begin(), target.end()));
        for (const auto& [e, c] : terms_) {
            Exponent ne(target.size(), 0);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (map[i] == target.size())
                    throw AlignmentError("variable '" + vars_[i] + "' missing from target list");
                ne[map[i]] = e[i];
            }
            out.add_term(std::move(ne), c);
        }
        return out;
    }

    BasicPolynomial operator-() const
    {
        BasicPolynomial out(vars_);
        for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
        return out;
    }

    BasicPolynomial& operator+=(const BasicPolynomial& o)
    {
        require_aligned(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    BasicPolynomial& operator-=(const BasicPolynomial& o)
    {
        require_aligned(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    BasicPolynomial& operator*=(const Coeff& s)
    {
        if (traits::is_zero(s)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend BasicPolynomial operator+(BasicPolynomial a, const BasicPolynomial& b) { return a += b; }
    friend BasicPolynomial operator-(BasicPolynomial a, const BasicPolynomial& b) { return a -= b; }
    friend BasicPolynomial operator*(BasicPolynomial a, const Coeff& s) { return a *= s; }
    friend BasicPolynomial operator*(const Coeff& s, BasicPolynomial a) { return a *= s; }

    friend BasicPolynomial operator*(const BasicPolynomial& a, const BasicPolynomial& b)
    {
        a.require_aligned(b);
        BasicPolynomial out(a.vars_);
        Exponent e(a.nvars());
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    BasicPolynomial& operator*=(const BasicPolynomial& o) { return *this = *this * o; }

    BasicPolynomial pow(unsigned k) const
    {
        auto result = constant(vars_, traits::from_int(1));
        auto base = *this;
        while (k) {
            if (k & 1u) result = result * base;
            k >>= 1u;
            if (k) base = base * base;
        }
        return result;
    }

    friend bool operator==(const BasicPolynomial& a, const BasicPolynomial& b)
    {
        return a.vars_ == b.vars_ && a.terms_ == b.terms_;
    }

    BasicPolynomial derivative(std::string_view name) const
    {
        const auto j = index_of(name);
        BasicPolynomial out(vars_);
        for (const auto& [e, c] : terms_) {
            if (e[j] == 0) continue;
            Exponent ne = e;
            --ne[j];
            out.add_term(std::move(ne), c * traits::from_int(static_cast<long>(e[j])));
        }
        return out;
    }

    /// Term-wise antiderivative with zero constant. Exact coefficients only.
    BasicPolynomial antiderivative(std::string_view name) const
        requires(CoeffTraits<Coeff>::exact)
    {
        const auto j = index_of(name);
        BasicPolynomial out(vars_);
        for (const auto& [e, c] : terms_) {
            Exponent ne = e;
            ++ne[j];
            Coeff nc = c / Coeff(static_cast<long>(ne[j]));
            out.add_term(std::move(ne), nc);
        }
        return out;
    }

    /// Replaces `name` by `replacement`. The result lives on the merged list of
    /// the remaining variables and the replacement's variables.
    BasicPolynomial substitute(std::string_view name, const BasicPolynomial& replacement) const
    {
        const auto j = index_of(name);
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (i != j) rest.push_back(vars_[i]);
        auto out_vars = merge_variables(rest, replacement.vars());
        const auto repl = replacement.aligned(out_vars);

        // Position of each surviving variable in the output list.
        std::vector<std::size_t> pos(vars_.size(), 0);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (i == j) continue;
            for (std::size_t k = 0; k < out_vars.size(); ++k)
                if (out_vars[k] == vars_[i]) pos[i] = k;
        }

        std::vector<BasicPolynomial> powers{constant(out_vars, traits::from_int(1))};
        BasicPolynomial out(out_vars);
        for (const auto& [e, c] : terms_) {
            while (powers.size() <= e[j]) powers.push_back(powers.back() * repl);
            Exponent mono(out_vars.size(), 0);
            for (std::size_t i = 0; i < e.size(); ++i)
                if (i != j) mono[pos[i]] += e[i];
            for (const auto& [pe, pc] : powers[e[j]].terms_) {
                Exponent ne = mono;
                for (std::size_t k = 0; k < ne.size(); ++k) ne[k] += pe[k];
                out.add_term(std::move(ne), c * pc);
            }
        }
        return out;
    }

    /// Evaluates at a complex point; exact coefficients are converted on the fly.
    Complex evaluate(std::span<const Complex> point) const
    {
        if (point.size() != vars_.size())
            throw DimensionMismatch("evaluation point has " + std::to_string(point.size()) +
                                    " coordinates, polynomial has " +
                                    std::to_string(vars_.size()) + " variables");
        Complex sum{0.0, 0.0};
        for (const auto& [e, c] : terms_) {
            Complex m = traits::to_complex(c);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (std::uint32_t k = 0; k < e[i]; ++k) m *= point[i];
            sum += m;
        }
        return sum;
    }

    /// Exact evaluation in the coefficient ring.
    Coeff evaluate_exact(std::span<const Coeff> point) const
    {
        if (point.size() != vars_.size())
            throw DimensionMismatch("evaluation point dimension mismatch");
        Coeff sum(0);
        for (const auto& [e, c] : terms_) {
            Coeff m = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (std::uint32_t k = 0; k < e[i]; ++k) m *= point[i];
            sum += m;
        }
        return sum;
    }

    BasicPolynomial<Complex> to_numeric() const
    {
        BasicPolynomial<Complex> out(vars_);
        for (const auto& [e, c] : terms_) out.add_term(e, traits::to_complex(c));
        return out;
    }

    /// Componentwise minimum exponent over all terms (zero for the zero polynomial).
    Exponent monomial_content() const
    {
        Exponent m(vars_.size(), 0);
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (first) {
                m = e;
                first = false;
            }
            else {
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(m[i], e[i]);
            }
        }
        return m;
    }

    BasicPolynomial divide_monomial(const Exponent& m) const
    {
        BasicPolynomial out(vars_);
        for (const auto& [e, c] : terms_) {
            Exponent ne = e;
            for (std::size_t i = 0; i < ne.size(); ++i) {
                if (ne[i] < m[i]) throw std::domain_error("monomial does not divide polynomial");
                ne[i] -= m[i];
            }
            out.terms_.emplace(std::move(ne), c);
        }
        return out;
    }

private:
    void require_aligned(const BasicPolynomial& o) const
    {
        if (vars_ != o.vars_)
            throw AlignmentError("polynomial variable lists differ; align them first");
    }

    std::vector<std::string> vars_;
    TermMap terms_;
};

using Polynomial = BasicPolynomial<mpq_class>;
using ComplexPolynomial = BasicPolynomial<Complex>;

/// Brings both operands onto the merged variable list.
template <class Coeff>
std::pair<BasicPolynomial<Coeff>, BasicPolynomial<Coeff>>
align_pair(const BasicPolynomial<Coeff>& a, const BasicPolynomial<Coeff>& b)
{
    const auto vars = merge_variables(a.vars(), b.vars());
    return {a.aligned(vars), b.aligned(vars)};
}

/// Multiplies by the LCM of the coefficient denominators and divides by the
/// integer content, yielding a primitive integer polynomial.
Polynomial integer_normalized(const Polynomial& p);

/// Divides out the largest power of `var` that divides p, keeping at most
/// `keep` powers of it. Returns the stripped multiplicity alongside.
std::pair<Polynomial, unsigned> strip_variable_power(const Polynomial& p,
                                                     std::string_view var,
                                                     unsigned keep);

} // namespace polycover
