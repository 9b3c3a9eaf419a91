#pragma once

#include <cmath>
#include <utility>

namespace predprey {

struct MinResult {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section minimization of a unimodal f on [lo, hi].
/// Shrinks the bracket until its width is below rel_tol * max(|x|, 1).
template <class F>
MinResult golden_section_min(F&& f, double lo, double hi, double rel_tol = 1e-10,
                             int max_iter = 600) {
    constexpr double invphi = 0.6180339887498949;  // 1/phi
    constexpr double invphi2 = 0.3819660112501051; // 1/phi^2
    double a = lo, b = hi;
    double c = a + invphi2 * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter; ++it) {
        if (b - a <= rel_tol * std::max(1.0, std::fabs(a) + std::fabs(b)))
            break;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = a + invphi2 * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? MinResult{c, fc} : MinResult{d, fd};
}

/// Golden-section maximization of a unimodal f on [lo, hi].
template <class F>
MinResult golden_section_max(F&& f, double lo, double hi, double rel_tol = 1e-10,
                             int max_iter = 600) {
    auto neg = [&f](double x) { return -f(x); };
    MinResult m = golden_section_min(neg, lo, hi, rel_tol, max_iter);
    return {m.x, -m.value};
}

} // namespace predprey
