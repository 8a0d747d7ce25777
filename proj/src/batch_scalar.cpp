#include "nfield/batch.hpp"

#include <cmath>

// Reference implementations. These define the semantics the SIMD variants
// are tested against.

namespace nf::batch {
namespace {

void exp_scalar(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void sincos_scalar(const double* x, double* s, double* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(x[i]);
        c[i] = std::cos(x[i]);
    }
}

void periodized_sum_scalar(const ExpFamily& fam, double T, const double* x,
                           double* out, std::size_t n) {
    double inv_den[2];
    for (int c = 0; c < fam.ncomp; ++c)
        inv_den[c] = 1.0 / (1.0 - std::exp(-fam.s[c] * T));
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < fam.ncomp; ++c) {
            const double e1 = std::exp(-fam.s[c] * x[i]);
            const double e2 = std::exp(-fam.s[c] * (T - x[i]));
            acc += fam.S[c] * (e1 + e2) * inv_den[c];
        }
        out[i] = acc;
    }
}

void periodized_integral_scalar(const ExpFamily& fam, double T, const double* x,
                                double* out, std::size_t n) {
    double emT[2], inv_sden[2];
    for (int c = 0; c < fam.ncomp; ++c) {
        emT[c] = std::exp(-fam.s[c] * T);
        inv_sden[c] = 1.0 / (fam.s[c] * (1.0 - emT[c]));
    }
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int c = 0; c < fam.ncomp; ++c) {
            const double e1 = std::exp(-fam.s[c] * x[i]);
            const double e2 = std::exp(fam.s[c] * (x[i] - T));
            acc += fam.S[c] * (e2 - e1 - emT[c] + 1.0) * inv_sden[c];
        }
        out[i] = acc;
    }
}

void symbol_branches_scalar(const BranchConsts& bc, const double* theta,
                            double* l1, double* l2, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ct = std::cos(theta[i]);
        const double st = std::sin(theta[i]);
        double diag = 0.0, re = 0.0, im = 0.0;
        for (int c = 0; c < bc.ncomp; ++c) {
            const double inv = 1.0 / (bc.cosh_sT[c] - ct);
            diag += bc.diag[c] * inv;
            re += (bc.off_cos[c] * ct + bc.off_const[c]) * inv;
            im -= bc.off_cos[c] * st * inv;
        }
        const double mag = std::sqrt(re * re + im * im);
        l1[i] = diag - mag;
        l2[i] = diag + mag;
    }
}

} // namespace

namespace detail {

const Vtable& scalar_vtable() {
    static const Vtable vt = {
        exp_scalar,
        sincos_scalar,
        periodized_sum_scalar,
        periodized_integral_scalar,
        symbol_branches_scalar,
    };
    return vt;
}

} // namespace detail
} // namespace nf::batch
