#pragma once

#include <cstddef>

// Batched inner loops for the hot numerical paths: periodized-kernel grid
// evaluation and eigenvalue-branch sampling over theta grids.
//
// Every kernel exists as a scalar reference implementation and, on x86-64,
// an AVX2+FMA variant. The active backend is picked once at runtime from
// CPU features; NFIELD_SIMD=scalar|avx2 in the environment overrides the
// choice. Both backends are equivalence-tested against each other.

namespace nf::batch {

enum class Backend { scalar, avx2 };

// Backend selected for this process.
Backend active();
const char* backend_name(Backend b);

// out[i] = exp(x[i])
void exp_v(const double* x, double* out, std::size_t n);

// s[i] = sin(x[i]), c[i] = cos(x[i]).  Valid for |x| <= 1e5.
void sincos_v(const double* x, double* s, double* c, std::size_t n);

// Sum of up to two exponential components S*e^{-s|x|}; signs folded into S.
struct ExpFamily {
    int ncomp = 0;
    double S[2] = {0, 0};
    double s[2] = {0, 0};
};

// out[i] = sum_c S_c * (e^{-s_c x} + e^{-s_c (T-x)}) / (1 - e^{-s_c T}),
// the lattice sum of the component family over period T.
// Requires x[i] already reduced to [0, T).
void periodized_sum_v(const ExpFamily& fam, double T, const double* x,
                      double* out, std::size_t n);

// out[i] = sum_c S_c * (e^{s_c(x-T)} - e^{-s_c x} - e^{-s_c T} + 1)
//                    / (s_c (1 - e^{-s_c T})),
// the antiderivative of periodized_sum_v from 0.  Requires x[i] in [0, T).
void periodized_integral_v(const ExpFamily& fam, double T, const double* x,
                           double* out, std::size_t n);

// Constants for the 2x2 symbol eigenvalue branches of an exponential-family
// linearization.  All values carry the 1/|u'_p(a)| factor already.
struct BranchConsts {
    int ncomp = 0;
    double cosh_sT[2] = {0, 0};   // cosh(s_c T)
    double diag[2] = {0, 0};      // S_c sinh(s_c T) / |u'|
    double off_cos[2] = {0, 0};   // S_c sinh(2 a s_c) / |u'|
    double off_const[2] = {0, 0}; // S_c sinh(s_c (T - 2a)) / |u'|
};

// l1[i], l2[i] = phi11 -/+ |phi12| evaluated at theta[i].
void symbol_branches_v(const BranchConsts& c, const double* theta,
                       double* l1, double* l2, std::size_t n);

namespace detail {

struct Vtable {
    void (*exp_v)(const double*, double*, std::size_t);
    void (*sincos_v)(const double*, double*, double*, std::size_t);
    void (*periodized_sum_v)(const ExpFamily&, double, const double*, double*, std::size_t);
    void (*periodized_integral_v)(const ExpFamily&, double, const double*, double*, std::size_t);
    void (*symbol_branches_v)(const BranchConsts&, const double*, double*, double*, std::size_t);
};

const Vtable& scalar_vtable();
#if defined(NFIELD_HAVE_AVX2)
const Vtable& avx2_vtable();
#endif

} // namespace detail

} // namespace nf::batch
