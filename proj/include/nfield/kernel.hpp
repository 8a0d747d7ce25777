#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "nfield/batch.hpp"

namespace nf {

// Connectivity function fails an admissibility condition (even, decaying,
// positive integral).
struct AdmissibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Exponential {
    double S, s; // S e^{-s|x|}
};

struct WizardHat {
    double S1, s1, S2, s2; // S1 e^{-s1|x|} - S2 e^{-s2|x|}, S1>S2>0, s1>s2>0
};

struct OscillatoryDecay {
    double b; // e^{-b|x|} (b sin|x| + cos x)
};

struct Tabulated {
    std::function<double(double)> eval; // sampled at |x|, so even by construction
    double decay_C;                     // |f(x)| <= C (1+|x|)^{-1-delta}
    double decay_delta;
};

// Even, decaying connectivity function. Construction validates parameter
// ranges; the decay bound of a Tabulated kernel is probed at construction.
class Kernel {
  public:
    using Variant = std::variant<Exponential, WizardHat, OscillatoryDecay, Tabulated>;

    explicit Kernel(Exponential k);
    explicit Kernel(WizardHat k);
    explicit Kernel(OscillatoryDecay k);
    explicit Kernel(Tabulated k);

    double operator()(double x) const;

    // Integral over the real line (h_0). Closed form for the exponential
    // family, certified-tail quadrature otherwise. Throws AdmissibilityError
    // when the computed value is <= 0.
    double integral() const;

    const Variant& variant() const { return v_; }

    // Exponential-family kernels have closed periodization and symbol forms.
    bool closed_form() const;
    batch::ExpFamily exp_family() const; // valid only when closed_form()

    // Certified decay envelope used for lattice-sum truncation.
    struct Envelope {
        bool exponential;  // amp * e^{-rate |x|} when true, else C (1+|x|)^{-1-delta}
        double amp = 0.0, rate = 0.0;
        double C = 0.0, delta = 0.0;
    };
    Envelope envelope() const;

  private:
    Variant v_;
};

// Smallest K with sum_{|k|>K} env(|x - kT|) <= tol for all |x| <= T.
// Throws NumericalError when no feasible K exists below an internal cap.
int lattice_truncation(const Kernel::Envelope& env, double T, double tol);

// A kernel bound to a period T: omega_p(x;T) = sum_k omega(x - kT) and its
// antiderivative W_p(x;T) = int_0^x omega_p. Exponential-family kernels use
// the closed psi/Psi forms; other kernels a truncated lattice sum with the
// neglected tail certified <= series_tol.
class PeriodizedKernel {
  public:
    PeriodizedKernel(Kernel k, double T, double series_tol = 1e-12);

    double periodized(double x) const;     // omega_p(x;T)
    double antiderivative(double x) const; // W_p(x;T)

    void periodized_many(std::span<const double> x, std::span<double> out) const;
    void antiderivative_many(std::span<const double> x, std::span<double> out) const;

    double period() const { return T_; }
    double h0() const { return h0_; }
    double series_tol() const { return series_tol_; }
    int truncation_terms() const { return trunc_K_; }
    const Kernel& kernel() const { return k_; }

  private:
    double series_periodized(double xr) const;

    Kernel k_;
    double T_;
    double series_tol_;
    double h0_;
    int trunc_K_ = 0;
    bool closed_;
    batch::ExpFamily fam_{};
};

// Kernel config from a JSON document:
//   {"type": "exponential", "S": .., "s": ..}
//   {"type": "wizard_hat", "S1": .., "s1": .., "S2": .., "s2": ..}
//   {"type": "oscillatory", "b": ..}
// Throws std::invalid_argument on malformed input.
Kernel kernel_from_json(const std::string& text);

} // namespace nf
