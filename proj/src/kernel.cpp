#include "nfield/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "nfield/numerics.hpp"
#include "nfield/quadrature.hpp"

namespace nf {
namespace {

constexpr int kTruncationCap = 1 << 22;
constexpr int kPanelCap = 1 << 20;

double reduce_mod(double x, double T, double* floor_out = nullptr) {
    double fl = std::floor(x / T);
    double r = x - fl * T;
    if (r >= T) { // fp edge when x/T rounds up
        r -= T;
        fl += 1.0;
    }
    if (r < 0.0) {
        r += T;
        fl -= 1.0;
    }
    if (floor_out != nullptr) *floor_out = fl;
    return r;
}

// Upper bound on sum_{j>=K} env(jT).
double env_tail(const Kernel::Envelope& e, double T, int K) {
    if (e.exponential) {
        const double q = std::exp(-e.rate * T);
        return e.amp * std::exp(-e.rate * T * K) / (1.0 - q);
    }
    const double head = e.C * std::pow(1.0 + T * K, -1.0 - e.delta);
    const double tail = e.C * std::pow(1.0 + T * K, -e.delta) / (e.delta * T);
    return head + tail;
}

} // namespace

Kernel::Kernel(Exponential k) : v_(k) {
    if (!(k.S > 0.0) || !(k.s > 0.0))
        throw std::invalid_argument("Exponential kernel requires S > 0 and s > 0");
}

Kernel::Kernel(WizardHat k) : v_(k) {
    if (!(k.S1 > k.S2) || !(k.S2 > 0.0) || !(k.s1 > k.s2) || !(k.s2 > 0.0))
        throw std::invalid_argument(
            "WizardHat kernel requires S1 > S2 > 0 and s1 > s2 > 0");
    if (!(k.S1 / k.s1 - k.S2 / k.s2 > 0.0))
        throw AdmissibilityError("WizardHat kernel has integral h0 <= 0");
}

Kernel::Kernel(OscillatoryDecay k) : v_(k) {
    if (!(k.b > 0.0))
        throw std::invalid_argument("OscillatoryDecay kernel requires b > 0");
}

Kernel::Kernel(Tabulated k) : v_(std::move(k)) {
    const Tabulated& t = std::get<Tabulated>(v_);
    if (!t.eval) throw std::invalid_argument("Tabulated kernel requires an evaluator");
    if (!(t.decay_C > 0.0) || !(t.decay_delta > 0.0))
        throw std::invalid_argument("Tabulated kernel requires decay_C, decay_delta > 0");
    // probe the declared decay bound
    for (double x = 0.0; x <= 64.0; x += 0.25) {
        const double fx = t.eval(x);
        if (!std::isfinite(fx))
            throw std::invalid_argument("Tabulated kernel evaluates non-finite");
        if (std::abs(fx) > t.decay_C * std::pow(1.0 + x, -1.0 - t.decay_delta) * (1.0 + 1e-9))
            throw AdmissibilityError("Tabulated kernel violates its declared decay bound");
    }
}

double Kernel::operator()(double x) const {
    const double ax = std::abs(x);
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Exponential>) {
                return k.S * std::exp(-k.s * ax);
            } else if constexpr (std::is_same_v<K, WizardHat>) {
                return k.S1 * std::exp(-k.s1 * ax) - k.S2 * std::exp(-k.s2 * ax);
            } else if constexpr (std::is_same_v<K, OscillatoryDecay>) {
                return std::exp(-k.b * ax) * (k.b * std::sin(ax) + std::cos(ax));
            } else {
                return k.eval(ax);
            }
        },
        v_);
}

bool Kernel::closed_form() const {
    return std::holds_alternative<Exponential>(v_) || std::holds_alternative<WizardHat>(v_);
}

batch::ExpFamily Kernel::exp_family() const {
    batch::ExpFamily f;
    if (const auto* e = std::get_if<Exponential>(&v_)) {
        f.ncomp = 1;
        f.S[0] = e->S;
        f.s[0] = e->s;
    } else if (const auto* w = std::get_if<WizardHat>(&v_)) {
        f.ncomp = 2;
        f.S[0] = w->S1;
        f.s[0] = w->s1;
        f.S[1] = -w->S2;
        f.s[1] = w->s2;
    } else {
        throw std::logic_error("exp_family() requires a closed-form kernel");
    }
    return f;
}

Kernel::Envelope Kernel::envelope() const {
    Envelope e;
    if (const auto* k = std::get_if<Exponential>(&v_)) {
        e.exponential = true;
        e.amp = k->S;
        e.rate = k->s;
    } else if (const auto* k = std::get_if<WizardHat>(&v_)) {
        e.exponential = true;
        e.amp = k->S1 + k->S2;
        e.rate = k->s2;
    } else if (const auto* k = std::get_if<OscillatoryDecay>(&v_)) {
        e.exponential = true;
        e.amp = k->b + 1.0;
        e.rate = k->b;
    } else {
        const auto& t = std::get<Tabulated>(v_);
        e.exponential = false;
        e.C = t.decay_C;
        e.delta = t.decay_delta;
    }
    return e;
}

double Kernel::integral() const {
    double h0;
    if (const auto* e = std::get_if<Exponential>(&v_)) {
        h0 = 2.0 * e->S / e->s;
    } else if (const auto* w = std::get_if<WizardHat>(&v_)) {
        h0 = 2.0 * (w->S1 / w->s1 - w->S2 / w->s2);
    } else {
        // quadrature over [0, R] with the tail beyond R certified by the
        // decay envelope: integral = 2 * int_0^R omega + tail, tail <= tol/2
        const Envelope env = envelope();
        const double tol = 1e-12;
        double R;
        if (env.exponential) {
            R = std::log(std::max(1.0, 2.0 * env.amp / (env.rate * 0.5 * tol))) / env.rate;
        } else {
            R = std::pow(2.0 * env.C / (env.delta * 0.5 * tol), 1.0 / env.delta) - 1.0;
        }
        if (R > static_cast<double>(kPanelCap))
            throw NumericalError(
                "kernel integral: certified quadrature range infeasible (R = " +
                std::to_string(R) + ")");
        double acc = 0.0;
        const auto& self = *this;
        double x0 = 0.0;
        while (x0 < R) {
            const double x1 = std::min(x0 + 1.0, R);
            acc += integrate([&self](double x) { return self(x); }, x0, x1,
                             0.25 * tol / std::max(1.0, R));
            x0 = x1;
        }
        h0 = 2.0 * acc;
    }
    if (!(h0 > 0.0))
        throw AdmissibilityError("kernel integral h0 = " + std::to_string(h0) +
                                 " violates h0 > 0");
    return h0;
}

int lattice_truncation(const Kernel::Envelope& env, double T, double tol) {
    int k = 1;
    while (2.0 * env_tail(env, T, k) > tol) {
        if (k >= kTruncationCap)
            throw NumericalError(
                "lattice truncation infeasible: certified tail still " +
                std::to_string(2.0 * env_tail(env, T, k)) + " at K = " +
                std::to_string(k));
        k *= 2;
    }
    // minimal feasible K in (k/2, k]
    int lo = k / 2, hi = k;
    while (lo + 1 < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (2.0 * env_tail(env, T, mid) <= tol)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

PeriodizedKernel::PeriodizedKernel(Kernel k, double T, double series_tol)
    : k_(std::move(k)), T_(T), series_tol_(series_tol) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("PeriodizedKernel: T must be positive and finite");
    if (!(series_tol > 0.0))
        throw std::invalid_argument("PeriodizedKernel: series_tol must be > 0");
    h0_ = k_.integral();
    closed_ = k_.closed_form();
    if (closed_)
        fam_ = k_.exp_family();
    else
        trunc_K_ = lattice_truncation(k_.envelope(), T_, series_tol_);
}

double PeriodizedKernel::series_periodized(double xr) const {
    // far-to-near accumulation keeps the small terms from being absorbed
    double acc = 0.0;
    for (int k = trunc_K_; k >= 1; --k)
        acc += k_(xr - k * T_) + k_(xr + k * T_);
    return acc + k_(xr);
}

double PeriodizedKernel::periodized(double x) const {
    const double xr = reduce_mod(x, T_);
    if (closed_) {
        double out;
        batch::periodized_sum_v(fam_, T_, &xr, &out, 1);
        return out;
    }
    return series_periodized(xr);
}

double PeriodizedKernel::antiderivative(double x) const {
    double fl;
    const double xr = reduce_mod(x, T_, &fl);
    if (closed_) {
        double out;
        batch::periodized_integral_v(fam_, T_, &xr, &out, 1);
        return h0_ * fl + out;
    }
    if (xr == 0.0) return h0_ * fl;
    const double part =
        integrate([this](double y) { return series_periodized(y); }, 0.0, xr,
                  series_tol_);
    return h0_ * fl + part;
}

void PeriodizedKernel::periodized_many(std::span<const double> x,
                                       std::span<double> out) const {
    if (x.size() != out.size())
        throw std::invalid_argument("periodized_many: size mismatch");
    if (closed_) {
        std::vector<double> xr(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xr[i] = reduce_mod(x[i], T_);
        batch::periodized_sum_v(fam_, T_, xr.data(), out.data(), xr.size());
        return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = periodized(x[i]);
}

void PeriodizedKernel::antiderivative_many(std::span<const double> x,
                                           std::span<double> out) const {
    if (x.size() != out.size())
        throw std::invalid_argument("antiderivative_many: size mismatch");
    if (closed_) {
        std::vector<double> xr(x.size()), fl(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xr[i] = reduce_mod(x[i], T_, &fl[i]);
        batch::periodized_integral_v(fam_, T_, xr.data(), out.data(), xr.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] += h0_ * fl[i];
        return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = antiderivative(x[i]);
}

Kernel kernel_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("kernel config: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw std::invalid_argument("kernel config: missing string field 'type'");
    const std::string type = j["type"].get<std::string>();
    auto num = [&](const char* name) -> double {
        if (!j.contains(name) || !j[name].is_number())
            throw std::invalid_argument(std::string("kernel config: missing numeric field '") +
                                        name + "'");
        return j[name].get<double>();
    };
    if (type == "exponential") return Kernel(Exponential{num("S"), num("s")});
    if (type == "wizard_hat")
        return Kernel(WizardHat{num("S1"), num("s1"), num("S2"), num("s2")});
    if (type == "oscillatory") return Kernel(OscillatoryDecay{num("b")});
    throw std::invalid_argument("kernel config: unknown type '" + type + "'");
}

} // namespace nf
