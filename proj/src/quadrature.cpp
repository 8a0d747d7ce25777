#include "nfield/quadrature.hpp"

#include <cmath>
#include <string>

#include "nfield/numerics.hpp"

namespace nf {
namespace {

// Gauss-Kronrod 7/15 nodes and weights (nonnegative half).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.16900472663926790, 0.19035057806478540,
    0.20443294007529889, 0.20948214108472783,
};
constexpr double kWg[4] = {
    0.12948496616886969, 0.27970539148927664, 0.38183005050511894,
    0.41795918367346938,
};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - half * kXgk[i]);
        fv[14 - i] = f(c + half * kXgk[i]);
    }
    fv[7] = f(c);
    for (int i = 0; i < 15; ++i) {
        if (!std::isfinite(fv[i]))
            throw NumericalError("integrand non-finite near x = " +
                                 std::to_string(c + half * kXgk[7 - std::abs(7 - i)]));
    }
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
    resasc *= half;
    double err = std::abs(resk - resg) * half;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {resk * half, err};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double tol, int depth, int max_depth) {
    const PanelResult r = gk15(f, a, b);
    if (r.err <= tol || depth >= max_depth) {
        if (r.err > tol && r.err > 1e-6 * std::max(1.0, std::abs(r.kronrod)))
            throw NumericalError("quadrature failed to converge on [" +
                                 std::to_string(a) + ", " + std::to_string(b) + "]");
        return r.kronrod;
    }
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw std::invalid_argument("integrate: non-finite bounds");
    if (a == b) return 0.0;
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: abs_tol must be > 0");
    return adapt(f, a, b, abs_tol, 0, max_depth);
}

} // namespace nf
