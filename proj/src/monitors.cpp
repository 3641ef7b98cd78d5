#include "starflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "starflow/errors.hpp"

namespace starflow {

MonitorSample sample_monitors(const SphereGrid& grid, const NodeField& rho,
                              const ShapeState& shape, const NodeField& G, double t,
                              const CurvatureSpec& F_spec, const PrescribedSpec& f_spec) {
    MonitorSample s;
    s.t = t;
    s.min_rho = std::numeric_limits<double>::infinity();
    s.max_rho = -s.min_rho;
    s.min_kappa = std::numeric_limits<double>::infinity();
    s.max_kappa = -s.min_kappa;
    s.min_F = std::numeric_limits<double>::infinity();
    s.min_G = std::numeric_limits<double>::infinity();
    s.max_G = -s.min_G;
    s.min_dt_rho = std::numeric_limits<double>::infinity();
    s.max_dt_rho = -s.min_dt_rho;

    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto& p = shape.pt[i];
        const double dt_rho = rho[i] * G[i];
        s.max_abs_dt_rho = std::max(s.max_abs_dt_rho, std::abs(dt_rho));
        s.min_dt_rho = std::min(s.min_dt_rho, dt_rho);
        s.max_dt_rho = std::max(s.max_dt_rho, dt_rho);
        s.min_rho = std::min(s.min_rho, rho[i]);
        s.max_rho = std::max(s.max_rho, rho[i]);
        const Vec2 gr = shape.grad_rho.at(i);
        s.max_grad_rho = std::max(s.max_grad_rho, gr.norm());
        s.min_kappa = std::min(s.min_kappa, p.kappa.first);
        s.max_kappa = std::max(s.max_kappa, p.kappa.second);
        const double F = eval_F(F_spec, p.kappa);
        s.min_F = std::min(s.min_F, F);
        s.residual = std::max(
            s.residual, std::abs(1.0 / F - eval_f(f_spec, rho[i], grid.unit_vector(i))));
        s.max_H = std::max(s.max_H, 0.5 * gr.norm2() / (rho[i] * rho[i]));
        s.min_G = std::min(s.min_G, G[i]);
        s.max_G = std::max(s.max_G, G[i]);
        if (!std::isfinite(rho[i]) || !std::isfinite(G[i])) {
            throw Error("sample_monitors: non-finite field value at node " +
                        std::to_string(i));
        }
    }
    s.cone_margin = min_cone_margin(shape, F_spec);
    return s;
}

double residual(const SphereGrid& grid, const NodeField& rho, const ShapeState& shape,
                const CurvatureSpec& F_spec, const PrescribedSpec& f_spec) {
    double r = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double F = eval_F(F_spec, shape.pt[i].kappa);
        r = std::max(r,
                     std::abs(1.0 / F - eval_f(f_spec, rho[i], grid.unit_vector(i))));
    }
    return r;
}

double initial_h_max(const ShapeState& shape) {
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& p : shape.pt) {
        if (!(p.kappa.second > 0.0)) {
            throw DomainError("initial_h_max: largest principal curvature not positive");
        }
        h = std::max(h, std::log(p.kappa.second / p.support));
    }
    return h;
}

Certificate cert_bounds(const MonitorSeries& series, double r1, double r2) {
    const double R1 = std::min(r1, series.meta.min_rho0);
    const double R2 = std::max(r2, series.meta.max_rho0);

    Certificate cert;
    cert.name = "bounds";
    cert.constants = {{"R1", R1}, {"R2", R2}};
    cert.worst_margin = std::numeric_limits<double>::infinity();
    cert.pass = true;
    for (const auto& s : series.samples) {
        const double margin =
            std::min(s.min_rho - (R1 - 1e-8), (R2 + 1e-8) - s.max_rho);
        if (margin < cert.worst_margin) {
            cert.worst_margin = margin;
            cert.worst_time = s.t;
        }
    }
    cert.pass = cert.worst_margin >= 0.0;
    return cert;
}

Certificate cert_decay(const MonitorSeries& series, double delta0, double R1, double R2,
                       double degree, double F0max) {
    const double lambda = (degree <= 1.0) ? delta0 / R2 : delta0 / R1;
    const double prefactor = (R2 / R1) * F0max;

    Certificate cert;
    cert.name = "decay";
    cert.constants = {{"lambda", lambda},
                      {"delta0", delta0},
                      {"prefactor", prefactor},
                      {"tolerance", 1.05},
                      {"fitted_rate", fitted_decay_rate(series)}};
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : series.samples) {
        const double bound = 1.05 * prefactor * std::exp(-lambda * s.t);
        double margin = bound - s.max_abs_dt_rho;
        // sign condition: d_t rho keeps the sign selected by the degree branch
        const double sign_margin =
            (degree <= 1.0) ? s.min_dt_rho + 1e-10 : 1e-10 - s.max_dt_rho;
        margin = std::min(margin, sign_margin);
        if (margin < cert.worst_margin) {
            cert.worst_margin = margin;
            cert.worst_time = s.t;
        }
    }
    cert.pass = cert.worst_margin >= 0.0;
    return cert;
}

Certificate cert_gradient(const MonitorSeries& series, double c0_grad, double R2,
                          double delta0, double H0max) {
    const double proof_cap = c0_grad * c0_grad * R2 * R2 / (2.0 * delta0 * delta0);
    const double cap = std::max(H0max, proof_cap);

    Certificate cert;
    cert.name = "gradient";
    cert.constants = {
        {"cap", cap}, {"proof_cap", proof_cap}, {"H0max", H0max}, {"c0_grad", c0_grad}};
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : series.samples) {
        const double margin = cap + 1e-8 - s.max_H;
        if (margin < cert.worst_margin) {
            cert.worst_margin = margin;
            cert.worst_time = s.t;
        }
    }
    cert.pass = cert.worst_margin >= 0.0;
    return cert;
}

Certificate cert_curvature(const MonitorSeries& series, const ShapeState& shape0,
                           const FNorms& f_norms, double delta0, double R2) {
    const double h0max = initial_h_max(shape0);
    const double C0 = std::max(std::log(f_norms.c2_norm / delta0), h0max);
    const double upper = R2 * std::exp(C0) * (1.0 + 1e-6);
    const double lower = -(CurvatureSpec::n - 1) * R2 * std::exp(C0) * (1.0 + 1e-6);

    Certificate cert;
    cert.name = "curvature";
    cert.constants = {{"C0", C0},
                      {"c2_norm", f_norms.c2_norm},
                      {"kappa_cap", upper},
                      {"kappa_floor", lower},
                      {"h0max", h0max}};
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : series.samples) {
        const double margin = std::min(upper - s.max_kappa, s.min_kappa - lower);
        if (margin < cert.worst_margin) {
            cert.worst_margin = margin;
            cert.worst_time = s.t;
        }
    }
    cert.pass = cert.worst_margin >= 0.0;
    return cert;
}

double fitted_decay_rate(const MonitorSeries& series) {
    // least squares slope of log max|d_t rho| against t, over positive samples
    double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
    int n = 0;
    for (const auto& s : series.samples) {
        if (!(s.max_abs_dt_rho > 0.0)) continue;
        const double y = std::log(s.max_abs_dt_rho);
        sum_t += s.t;
        sum_y += y;
        sum_tt += s.t * s.t;
        sum_ty += s.t * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sum_tt - sum_t * sum_t;
    if (denom == 0.0) return 0.0;
    const double slope = (n * sum_ty - sum_t * sum_y) / denom;
    return -slope;
}

}  // namespace starflow
