#include "polycover/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#define POLYCOVER_X86 1
#include <immintrin.h>
#else
#define POLYCOVER_X86 0
#endif

#if defined(__aarch64__)
#define POLYCOVER_NEON 1
#include <arm_neon.h>
#else
#define POLYCOVER_NEON 0
#endif

namespace polycover::kernels {

DenseBivariate DenseBivariate::from(const Polynomial& p, std::string_view u, std::string_view v)
{
    const bool has_u = !u.empty() && p.has_variable(u);
    const bool has_v = p.has_variable(v);
    for (const auto& name : p.vars())
        if (name != u && name != v)
            for (const auto& [e, c] : p.terms())
                if (e[p.index_of(name)] != 0)
                    throw AlignmentError("dense bivariate form: unexpected variable '" + name + "'");

    DenseBivariate d;
    d.deg_u = has_u && !p.is_zero() ? p.degree_in(u) : 0;
    d.deg_v = has_v && !p.is_zero() ? p.degree_in(v) : 0;
    d.coeffs.assign(static_cast<std::size_t>((d.deg_u + 1) * (d.deg_v + 1)), 0.0);
    const std::size_t iu = has_u ? p.index_of(u) : 0;
    const std::size_t iv = has_v ? p.index_of(v) : 0;
    for (const auto& [e, c] : p.terms()) {
        const int i = has_u ? static_cast<int>(e[iu]) : 0;
        const int j = has_v ? static_cast<int>(e[iv]) : 0;
        d.coeffs[static_cast<std::size_t>(i * (d.deg_v + 1) + j)] += c.get_d();
    }
    return d;
}

double DenseBivariate::operator()(double u, double v) const
{
    double acc = 0.0;
    for (int i = deg_u; i >= 0; --i) {
        double row = 0.0;
        for (int j = deg_v; j >= 0; --j) row = row * v + at(i, j);
        acc = acc * u + row;
    }
    return acc;
}

const char* isa_name(Isa isa)
{
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

namespace {

bool cpu_has_avx2()
{
#if POLYCOVER_X86 && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

void check_sizes(std::span<const double> u, std::span<const double> v, std::span<double> out)
{
    if (u.size() != v.size() || out.size() != v.size())
        throw std::invalid_argument("eval_batch: input and output lengths differ");
}

#if POLYCOVER_X86 && (defined(__GNUC__) || defined(__clang__))
__attribute__((target("avx2,fma"))) void eval_batch_avx2(const DenseBivariate& poly,
                                                         const double* u, const double* v,
                                                         double* out, std::size_t n)
{
    const int du = poly.deg_u;
    const int dv = poly.deg_v;
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d uu = _mm256_loadu_pd(u + k);
        const __m256d vv = _mm256_loadu_pd(v + k);
        __m256d acc = _mm256_setzero_pd();
        for (int i = du; i >= 0; --i) {
            __m256d row = _mm256_setzero_pd();
            for (int j = dv; j >= 0; --j)
                row = _mm256_fmadd_pd(row, vv, _mm256_set1_pd(poly.at(i, j)));
            acc = _mm256_fmadd_pd(acc, uu, row);
        }
        _mm256_storeu_pd(out + k, acc);
    }
    for (; k < n; ++k) out[k] = poly(u[k], v[k]);
}
#endif

#if POLYCOVER_NEON
void eval_batch_neon(const DenseBivariate& poly, const double* u, const double* v, double* out,
                     std::size_t n)
{
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t uu = vld1q_f64(u + k);
        const float64x2_t vv = vld1q_f64(v + k);
        float64x2_t acc = vdupq_n_f64(0.0);
        for (int i = poly.deg_u; i >= 0; --i) {
            float64x2_t row = vdupq_n_f64(0.0);
            for (int j = poly.deg_v; j >= 0; --j)
                row = vfmaq_f64(vdupq_n_f64(poly.at(i, j)), row, vv);
            acc = vfmaq_f64(row, acc, uu);
        }
        vst1q_f64(out + k, acc);
    }
    for (; k < n; ++k) out[k] = poly(u[k], v[k]);
}
#endif

} // namespace

std::vector<Isa> available_isas()
{
    std::vector<Isa> out{Isa::Scalar};
    if (cpu_has_avx2()) out.push_back(Isa::Avx2);
#if POLYCOVER_NEON
    out.push_back(Isa::Neon);
#endif
    return out;
}

Isa detect_isa()
{
    if (const char* forced = std::getenv("POLYCOVER_ISA"); forced && std::strcmp(forced, "scalar") == 0)
        return Isa::Scalar;
    const auto all = available_isas();
    return all.back();
}

void eval_batch_scalar(const DenseBivariate& poly, std::span<const double> u,
                       std::span<const double> v, std::span<double> out)
{
    check_sizes(u, v, out);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = poly(u[k], v[k]);
}

void eval_batch(Isa isa, const DenseBivariate& poly, std::span<const double> u,
                std::span<const double> v, std::span<double> out)
{
    check_sizes(u, v, out);
    switch (isa) {
    case Isa::Scalar:
        eval_batch_scalar(poly, u, v, out);
        return;
    case Isa::Avx2:
#if POLYCOVER_X86 && (defined(__GNUC__) || defined(__clang__))
        if (cpu_has_avx2()) {
            eval_batch_avx2(poly, u.data(), v.data(), out.data(), out.size());
            return;
        }
#endif
        break;
    case Isa::Neon:
#if POLYCOVER_NEON
        eval_batch_neon(poly, u.data(), v.data(), out.data(), out.size());
        return;
#endif
        break;
    }
    throw std::invalid_argument(std::string("kernel variant not available: ") + isa_name(isa));
}

void eval_batch(const DenseBivariate& poly, std::span<const double> u, std::span<const double> v,
                std::span<double> out)
{
    static const Isa isa = detect_isa();
    eval_batch(isa, poly, u, v, out);
}

} // namespace polycover::kernels
