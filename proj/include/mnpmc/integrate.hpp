#pragma once

#include <stdexcept>

namespace mnpmc {

/// Composite Simpson rule with n panels (n rounded up to even).
template <typename F>
double integrate_simpson(F&& f, double a, double b, int n = 2000) {
    if (n < 2) throw std::invalid_argument("integrate_simpson requires n >= 2");
    if (n % 2 != 0) ++n;
    const double step = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        acc += f(a + i * step) * (i % 2 ? 4.0 : 2.0);
    }
    return acc * step / 3.0;
}

}  // namespace mnpmc
