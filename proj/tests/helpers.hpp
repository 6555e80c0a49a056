#pragma once

#include "oracles.hpp"
#include "polycover/poly_text.hpp"
#include "polycover/problem.hpp"

#include <string>

namespace testing {

inline polycover::CoverageProblem make_problem(const std::string& A, const std::string& B, int m,
                                               const std::string& phi, const std::string& f = "s")
{
    using namespace polycover;
    return CoverageProblem::create(parse_rational(A), parse_rational(B), m, parse_polynomial(phi),
                                   parse_polynomial(f));
}

inline polycover::CoverageProblem ex1(int m = 3) { return make_problem("0", "1", m, "x*(1 - x)"); }
inline polycover::CoverageProblem ex2(int m = 3) { return make_problem("-1", "1", m, "x^2 - x^4"); }

/// Double-valued univariate evaluation of an exact polynomial.
inline oracle::Fn as_function(const polycover::Polynomial& p)
{
    const auto n = p.to_numeric();
    return [n](double x) {
        const polycover::Complex z(x, 0.0);
        return n.nvars() == 0 ? n.evaluate(std::span<const polycover::Complex>{}).real()
                              : n.evaluate(std::span<const polycover::Complex>(&z, 1)).real();
    };
}

inline double quadrature_objective(const polycover::CoverageProblem& pr, const std::vector<double>& p)
{
    return oracle::objective(as_function(pr.phi), as_function(pr.f), pr.a(), pr.b(), p);
}

} // namespace testing
