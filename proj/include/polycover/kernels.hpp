#pragma once
// Batched evaluation of small dense real polynomials.
//
// The scalar routine is the reference; vector variants (AVX2+FMA on x86-64,
// NEON on AArch64) are picked at runtime and must agree with it to rounding.

#include "polycover/polynomial.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace polycover::kernels {

/// sum_{i,j} c[i][j] u^i v^j with row-major coefficients (row = power of u).
struct DenseBivariate {
    int deg_u = 0;
    int deg_v = 0;
    std::vector<double> coeffs;

    double at(int i, int j) const { return coeffs[static_cast<std::size_t>(i * (deg_v + 1) + j)]; }

    /// Converts an exact polynomial in at most the two named variables.
    /// Pass an empty `u` for a univariate polynomial in `v`.
    static DenseBivariate from(const Polynomial& p, std::string_view u, std::string_view v);

    double operator()(double u, double v) const;
};

enum class Isa { Scalar, Avx2, Neon };

const char* isa_name(Isa isa);

/// Best variant supported by this CPU. POLYCOVER_ISA=scalar forces the reference path.
Isa detect_isa();

/// Variants compiled into this binary and usable on this CPU.
std::vector<Isa> available_isas();

void eval_batch_scalar(const DenseBivariate& poly, std::span<const double> u,
                       std::span<const double> v, std::span<double> out);

/// Dispatches to `isa`; throws std::invalid_argument if the variant is unavailable.
void eval_batch(Isa isa, const DenseBivariate& poly, std::span<const double> u,
                std::span<const double> v, std::span<double> out);

/// Dispatches to detect_isa().
void eval_batch(const DenseBivariate& poly, std::span<const double> u, std::span<const double> v,
                std::span<double> out);

} // namespace polycover::kernels
