#pragma once

#include "fdkl/dynamics.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// classical RK4 on (x, v)' = (v, gain f(t) - damping v - stiffness x) from rest, step h
inline std::vector<double> rk4(const fdkl::OscillatorParams& p, const std::function<double(double)>& f, double tau, double h) {
    const auto steps = static_cast<std::size_t>(std::llround(tau / h));
    std::vector<double> out(steps + 1, 0.0);
    double x = 0.0, v = 0.0;
    auto acc = [&](double t, double xx, double vv) { return p.gain * f(t) - p.damping * vv - p.stiffness * xx; };
    for (std::size_t m = 0; m < steps; ++m) {
        const double t = static_cast<double>(m) * h;
        const double k1x = v, k1v = acc(t, x, v);
        const double k2x = v + 0.5 * h * k1v, k2v = acc(t + 0.5 * h, x + 0.5 * h * k1x, v + 0.5 * h * k1v);
        const double k3x = v + 0.5 * h * k2v, k3v = acc(t + 0.5 * h, x + 0.5 * h * k2x, v + 0.5 * h * k2v);
        const double k4x = v + h * k3v, k4v = acc(t + h, x + h * k3x, v + h * k3v);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out[m + 1] = x;
    }
    return out;
}

} // namespace oracle
