#ifndef WGQKD_RK4_HPP
#define WGQKD_RK4_HPP

#include <utility>

namespace wgqkd {

// Classic fixed-step fourth-order Runge-Kutta integration of y' = f(t, y)
// over [t0, t1] in n_steps equal steps.  `rhs(t, y, dydt)` writes the
// derivative into dydt; `observe(step, t, y)` is called after every step
// with the state at time t.  Vec is any Eigen-like dense vector type.
template <typename Vec, typename Rhs, typename Observer>
void rk4_integrate(Vec& y, double t0, double t1, long n_steps, Rhs&& rhs,
                   Observer&& observe)
{
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    for (long i = 0; i < n_steps; ++i) {
        const double t = t0 + static_cast<double>(i) * h;
        rhs(t, y, k1);
        tmp = y + (0.5 * h) * k1;
        rhs(t + 0.5 * h, tmp, k2);
        tmp = y + (0.5 * h) * k2;
        rhs(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        rhs(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        observe(i, t + h, y);
    }
}

template <typename Vec, typename Rhs>
void rk4_integrate(Vec& y, double t0, double t1, long n_steps, Rhs&& rhs)
{
    rk4_integrate(y, t0, t1, n_steps, std::forward<Rhs>(rhs),
                  [](long, double, const Vec&) {});
}

} // namespace wgqkd

#endif
