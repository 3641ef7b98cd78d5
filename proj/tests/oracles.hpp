#ifndef STARFLOW_TESTS_ORACLES_HPP
#define STARFLOW_TESTS_ORACLES_HPP

// Independent reference computations for the test suites. Everything here is
// deliberately built from different formulas than the library: the flow is
// checked against adaptive scalar ODE integration, the surface geometry
// against the classical surface-of-revolution curvature formulas.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "starflow/rng.hpp"
#include "starflow/sphere_grid.hpp"

namespace oracles {

/// Adaptive Cash-Karp RK45 integration of dy/dt = f(y) from t0 to t1.
inline double integrate_ode(const std::function<double(double)>& f, double y0, double t0,
                            double t1, double tol = 1e-12) {
    double t = t0;
    double y = y0;
    double h = (t1 - t0) * 1e-3;
    if (h <= 0.0) return y0;

    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        const double k1 = f(y);
        const double k2 = f(y + h * (k1 / 5.0));
        const double k3 = f(y + h * (3.0 * k1 + 9.0 * k2) / 40.0);
        const double k4 = f(y + h * (3.0 * k1 - 9.0 * k2 + 12.0 * k3) / 10.0);
        const double k5 =
            f(y + h * (-11.0 * k1 / 54.0 + 5.0 * k2 / 2.0 - 70.0 * k3 / 27.0 +
                       35.0 * k4 / 27.0));
        const double k6 =
            f(y + h * (1631.0 * k1 / 55296.0 + 175.0 * k2 / 512.0 + 575.0 * k3 / 13824.0 +
                       44275.0 * k4 / 110592.0 + 253.0 * k5 / 4096.0));
        const double y5 = y + h * (37.0 * k1 / 378.0 + 250.0 * k3 / 621.0 +
                                   125.0 * k4 / 594.0 + 512.0 * k6 / 1771.0);
        const double y4 = y + h * (2825.0 * k1 / 27648.0 + 18575.0 * k3 / 48384.0 +
                                   13525.0 * k4 / 55296.0 + 277.0 * k5 / 14336.0 +
                                   k6 / 4.0);
        const double err = std::abs(y5 - y4);
        const double scale = tol * std::max(1.0, std::abs(y));
        if (err <= scale || h <= 1e-14) {
            t += h;
            y = y5;
        }
        const double factor =
            (err > 0.0) ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
        h *= std::min(5.0, std::max(0.1, factor));
    }
    return y;
}

/// Values of the scalar ODE at a list of increasing times.
inline std::vector<double> integrate_ode_at(const std::function<double(double)>& f,
                                            double y0, const std::vector<double>& times,
                                            double tol = 1e-12) {
    std::vector<double> out;
    out.reserve(times.size());
    double t = 0.0;
    double y = y0;
    for (const double target : times) {
        if (target < t) throw std::runtime_error("integrate_ode_at: times not increasing");
        y = integrate_ode(f, y, t, target, tol);
        t = target;
        out.push_back(y);
    }
    return out;
}

/// Principal curvatures of the surface of revolution with radial profile
/// rho(theta), from the classical meridian/parallel formulas applied to the
/// profile curve (R, Z) = (rho sin theta, rho cos theta), outward normal.
struct ProfileCurvatures {
    double meridian;
    double parallel;
};

inline ProfileCurvatures revolution_curvatures(double theta, double rho, double drho,
                                               double ddrho) {
    const double speed2 = rho * rho + drho * drho;
    const double meridian = (rho * rho + 2.0 * drho * drho - rho * ddrho) /
                            (speed2 * std::sqrt(speed2));
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double parallel = (rho * s - drho * c) / (rho * s * std::sqrt(speed2));
    return {meridian, parallel};
}

/// Smooth random field 1 + amplitude * (mix of first and second degree
/// harmonics), deterministic in the rng state.
inline starflow::NodeField random_harmonic_field(const starflow::SphereGrid& grid,
                                                 starflow::Rng& rng, double amplitude) {
    double c[6];
    double norm = 0.0;
    for (double& v : c) {
        v = rng.uniform(-1.0, 1.0);
        norm += std::abs(v);
    }
    for (double& v : c) v /= norm;

    starflow::NodeField rho(grid.node_count());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double th = grid.theta(i);
        const double ph = grid.phi(i);
        const double st = std::sin(th), ct = std::cos(th);
        const double mix = c[0] * ct + c[1] * st * std::cos(ph) + c[2] * st * std::sin(ph) +
                           c[3] * (1.5 * ct * ct - 0.5) +
                           c[4] * st * ct * std::cos(ph) +
                           c[5] * st * st * std::cos(2.0 * ph);
        rho[i] = 1.0 + amplitude * mix;
    }
    return rho;
}

}  // namespace oracles

#endif
