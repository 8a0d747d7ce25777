#include "nfield/batch.hpp"

#include <cstdlib>
#include <cstring>

namespace nf::batch {
namespace {

Backend detect() {
    const char* env = std::getenv("NFIELD_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
#if defined(NFIELD_HAVE_AVX2)
        if (std::strcmp(env, "avx2") == 0) return Backend::avx2;
#endif
    }
#if defined(NFIELD_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return Backend::avx2;
#endif
    return Backend::scalar;
}

const detail::Vtable& active_vtable() {
    static const detail::Vtable& vt = []() -> const detail::Vtable& {
#if defined(NFIELD_HAVE_AVX2)
        if (active() == Backend::avx2) return detail::avx2_vtable();
#endif
        return detail::scalar_vtable();
    }();
    return vt;
}

} // namespace

Backend active() {
    static const Backend b = detect();
    return b;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

void exp_v(const double* x, double* out, std::size_t n) {
    active_vtable().exp_v(x, out, n);
}

void sincos_v(const double* x, double* s, double* c, std::size_t n) {
    active_vtable().sincos_v(x, s, c, n);
}

void periodized_sum_v(const ExpFamily& fam, double T, const double* x,
                      double* out, std::size_t n) {
    active_vtable().periodized_sum_v(fam, T, x, out, n);
}

void periodized_integral_v(const ExpFamily& fam, double T, const double* x,
                           double* out, std::size_t n) {
    active_vtable().periodized_integral_v(fam, T, x, out, n);
}

void symbol_branches_v(const BranchConsts& c, const double* theta, double* l1,
                       double* l2, std::size_t n) {
    active_vtable().symbol_branches_v(c, theta, l1, l2, n);
}

} // namespace nf::batch
