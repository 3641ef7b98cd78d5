#ifndef STARFLOW_MONITORS_HPP
#define STARFLOW_MONITORS_HPP

#include <map>
#include <string>
#include <vector>

#include "starflow/prescribed.hpp"
#include "starflow/shape.hpp"
#include "starflow/sphere_grid.hpp"
#include "starflow/symfunc.hpp"

namespace starflow {

/// One diagnostic snapshot of the evolving surface.
struct MonitorSample {
    double t = 0.0;
    double max_abs_dt_rho = 0.0;
    double min_dt_rho = 0.0;
    double max_dt_rho = 0.0;
    double min_rho = 0.0;
    double max_rho = 0.0;
    double max_grad_rho = 0.0;
    double min_kappa = 0.0;
    double max_kappa = 0.0;
    double residual = 0.0;   // max |1/F(a) - f(rho x)|
    double min_F = 0.0;
    double cone_margin = 0.0;
    double max_H = 0.0;      // H = |grad log rho|^2 / 2
    double min_G = 0.0;      // G = d_t rho / rho
    double max_G = 0.0;
};

/// Quantities frozen at run start that the certificates compare against.
struct SeriesMeta {
    double min_rho0 = 0.0;
    double max_rho0 = 0.0;
    double F0max = 0.0;  // max |F[rho_0]| = max |d_t rho| at t = 0
    double H0max = 0.0;
    double h0max = 0.0;  // max over nodes of log(max kappa / support) at t = 0
    double degree = 0.0; // homogeneity degree of the curvature function
};

struct MonitorSeries {
    SeriesMeta meta;
    std::vector<MonitorSample> samples;
};

/// Diagnostics of the state (rho, shape, G = d_t log rho) at time t.
MonitorSample sample_monitors(const SphereGrid& grid, const NodeField& rho,
                              const ShapeState& shape, const NodeField& G, double t,
                              const CurvatureSpec& F_spec, const PrescribedSpec& f_spec);

/// Max over nodes of |1/F(a) - f(rho x)|, the distance to the prescribed
/// curvature equation.
double residual(const SphereGrid& grid, const NodeField& rho, const ShapeState& shape,
                const CurvatureSpec& F_spec, const PrescribedSpec& f_spec);

/// Max over nodes of log(max kappa / support); feeds the curvature cap.
double initial_h_max(const ShapeState& shape);

/// Verdict of one quantitative estimate checked over a completed run.
struct Certificate {
    std::string name;
    bool pass = false;
    double worst_margin = 0.0;  // min over snapshots of (bound - observed)
    double worst_time = 0.0;
    std::map<std::string, double> constants;
};

/// rho stays in [R1, R2] with R1 = min(r1, min rho0), R2 = max(r2, max rho0).
Certificate cert_bounds(const MonitorSeries& series, double r1, double r2);

/// Exponential decay of max |d_t rho| at the proof rate lambda = delta0/R2
/// (degree <= 1) or delta0/R1 (degree > 1), prefactor (R2/R1) max |F[rho0]|,
/// multiplicative tolerance 1.05; plus the sign condition on d_t rho.
Certificate cert_decay(const MonitorSeries& series, double delta0, double R1, double R2,
                       double degree, double F0max);

/// Gradient cap: max H(t) <= max(H(0), c0^2 R2^2 / (2 delta0^2)).
Certificate cert_gradient(const MonitorSeries& series, double c0_grad, double R2,
                          double delta0, double H0max);

/// Curvature caps from the initial data and the C^2 norm of f:
/// kappa <= R2 e^{C0} and kappa >= -(n-1) R2 e^{C0} with
/// C0 = max(log(C/delta0), max h(0, .)).
Certificate cert_curvature(const MonitorSeries& series, const ShapeState& shape0,
                           const FNorms& f_norms, double delta0, double R2);

/// Least-squares decay rate of log max|d_t rho| over the sampled times;
/// informative only (the certificate uses the proof rate).
double fitted_decay_rate(const MonitorSeries& series);

}  // namespace starflow

#endif
