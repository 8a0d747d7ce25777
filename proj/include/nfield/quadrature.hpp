#pragma once

#include <functional>

namespace nf {

// Adaptive Gauss-Kronrod 7/15 on [a, b]. Bisects until the summed Kronrod
// error estimate is below abs_tol. Throws NumericalError if the integrand
// is non-finite or the tolerance cannot be met within the evaluation budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 48);

} // namespace nf
