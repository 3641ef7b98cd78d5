#include "starflow/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "starflow/errors.hpp"

namespace starflow {

namespace test_hooks {
double hessian_stencil_perturbation = 0.0;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Lattice lookup with pole-crossing continuation: a row below theta = 0 or
// above theta = pi reads the antipodal node (-theta, phi + pi), phi wraps.
// Offsets stay within one stencil width, so the wrap needs at most one
// correction in each direction.
double lattice_value(const SphereGrid& g, const NodeField& u, int jj, int ii) {
    const int nt = g.n_theta();
    const int np = g.n_phi();
    bool crossed = false;
    if (jj < 0) {
        jj = -1 - jj;
        crossed = true;
    } else if (jj >= nt) {
        jj = 2 * nt - 1 - jj;
        crossed = true;
    }
    if (g.is_axisymmetric()) {
        return u[static_cast<std::size_t>(jj)];
    }
    if (crossed) ii += np / 2;
    if (ii < 0) {
        ii += np;
    } else if (ii >= np) {
        ii -= np;
    }
    return u[g.index(jj, ii)];
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

SphereGrid SphereGrid::build(GridMode mode, int n_theta, int n_phi) {
    if (n_theta < 8) {
        throw DomainError("build_grid: n_theta must be >= 8, got " + std::to_string(n_theta));
    }
    if (mode == GridMode::Full) {
        if (n_phi < 8) {
            throw DomainError("build_grid: n_phi must be >= 8, got " + std::to_string(n_phi));
        }
        if (n_phi % 2 != 0) {
            throw DomainError("build_grid: n_phi must be even (pole-crossing stencils map "
                              "phi to phi + pi)");
        }
    }

    SphereGrid g;
    g.mode_ = mode;
    g.n_theta_ = n_theta;
    g.n_phi_ = (mode == GridMode::Full) ? n_phi : 1;
    g.dtheta_ = kPi / n_theta;
    g.dphi_ = (mode == GridMode::Full) ? 2.0 * kPi / n_phi : 0.0;
    g.h_min_ = (mode == GridMode::Full) ? std::min(g.dtheta_, g.dphi_) : g.dtheta_;

    const std::size_t n_nodes =
        static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(g.n_phi_);
    g.theta_.resize(n_nodes);
    g.phi_.resize(n_nodes);
    g.unit_.resize(n_nodes);
    g.sin_theta_.resize(n_nodes);
    g.cos_theta_.resize(n_nodes);
    g.sin_phi_.resize(n_nodes);
    g.cos_phi_.resize(n_nodes);
    for (int j = 0; j < n_theta; ++j) {
        const double th = (j + 0.5) * g.dtheta_;
        for (int i = 0; i < g.n_phi_; ++i) {
            const std::size_t idx = g.index(j, i);
            const double ph = i * g.dphi_;
            g.theta_[idx] = th;
            g.phi_[idx] = ph;
            g.sin_theta_[idx] = std::sin(th);
            g.cos_theta_[idx] = std::cos(th);
            g.sin_phi_[idx] = std::sin(ph);
            g.cos_phi_[idx] = std::cos(ph);
            g.unit_[idx] = {g.sin_theta_[idx] * g.cos_phi_[idx],
                            g.sin_theta_[idx] * g.sin_phi_[idx], g.cos_theta_[idx]};
        }
    }
    return g;
}

double SphereGrid::sample(const NodeField& u, int j, int i, int dj, int di) const {
    return lattice_value(*this, u, j + dj, i + di);
}

NodeField SphereGrid::constant_field(double value) const {
    return NodeField(node_count(), value);
}

void covariant_gradient(const SphereGrid& grid, const NodeField& u, FrameVectorField& out) {
    FrameMatrixField scratch;
    covariant_derivatives(grid, u, out, scratch);
}

FrameVectorField covariant_gradient(const SphereGrid& grid, const NodeField& u) {
    FrameVectorField out;
    covariant_gradient(grid, u, out);
    return out;
}

void covariant_hessian(const SphereGrid& grid, const NodeField& u, FrameMatrixField& out) {
    FrameVectorField scratch;
    covariant_derivatives(grid, u, scratch, out);
}

FrameMatrixField covariant_hessian(const SphereGrid& grid, const NodeField& u) {
    FrameMatrixField out;
    covariant_hessian(grid, u, out);
    return out;
}

// The mixed and phi-phi Hessian components divide by sin(theta), which is
// O(h) on the two pole-adjacent rows and would eat one order of accuracy
// there. Two measures keep the operator uniformly second order:
//   - the mixed component uses the identity (u_tp - cot u_p)/sin = d_theta w
//     with w = u_p / sin theta, differencing the gradient component itself
//     (w flips sign across a pole: it is a frame component);
//   - on rows with sin(theta) < 1/2 the amplified pieces u_pp and cot * u_t
//     use fourth-order centered stencils (the amplification decays only like
//     1/sin(theta), so a fixed angular cap is treated, not a fixed row count).
void covariant_derivatives(const SphereGrid& grid, const NodeField& u,
                           FrameVectorField& grad, FrameMatrixField& hess) {
    const int nt = grid.n_theta();
    const int np = grid.n_phi();
    const double dt = grid.dtheta();
    const double dp = grid.dphi();
    const double inv_2dt = 1.0 / (2.0 * dt);
    const double inv_dt2 = 1.0 / (dt * dt);
    const double theta_theta_scale = 1.0 + test_hooks::hessian_stencil_perturbation;

    grad.t.resize(grid.node_count());
    grad.p.resize(grid.node_count());
    hess.tt.resize(grid.node_count());
    hess.tp.resize(grid.node_count());
    hess.pp.resize(grid.node_count());

#pragma omp parallel for schedule(static) if (grid.node_count() >= 4096)
    for (int j = 0; j < nt; ++j) {
        for (int i = 0; i < np; ++i) {
            const std::size_t idx = grid.index(j, i);
            const double sin_t = grid.sin_theta(idx);
            const double cot_t = grid.cos_theta(idx) / sin_t;
            const bool amplified = sin_t < 0.5;

            const double u_c = u[idx];
            const double u_n = grid.sample(u, j, i, +1, 0);
            const double u_s = grid.sample(u, j, i, -1, 0);
            const double u_t = (u_n - u_s) * inv_2dt;
            const double u_tt = (u_n - 2.0 * u_c + u_s) * inv_dt2 * theta_theta_scale;

            double u_p = 0.0, u_pp = 0.0;
            if (np > 1) {
                const double u_e = grid.sample(u, j, i, 0, +1);
                const double u_w = grid.sample(u, j, i, 0, -1);
                u_p = (u_e - u_w) / (2.0 * dp);
                if (amplified) {
                    // grouped so the stencil is exactly zero on constants
                    const double d2 = u_e - 2.0 * u_c + u_w;
                    const double d2w = grid.sample(u, j, i, 0, +2) - 2.0 * u_c +
                                       grid.sample(u, j, i, 0, -2);
                    u_pp = (16.0 * d2 - d2w) / (12.0 * dp * dp);
                } else {
                    u_pp = (u_e - 2.0 * u_c + u_w) / (dp * dp);
                }
            }

            double u_t_for_pp = u_t;
            if (amplified) {
                const double d1 = u_n - u_s;
                const double d1w = grid.sample(u, j, i, +2, 0) - grid.sample(u, j, i, -2, 0);
                u_t_for_pp = (8.0 * d1 - d1w) / (12.0 * dt);
            }

            grad.t[idx] = u_t;
            grad.p[idx] = u_p / sin_t;
            hess.tt[idx] = u_tt;
            hess.pp[idx] = u_pp / (sin_t * sin_t) + cot_t * u_t_for_pp;
        }
    }

    // mixed component: centered theta-derivative of w = grad.p, which picks
    // up a sign when the stencil crosses a pole
#pragma omp parallel for schedule(static) if (grid.node_count() >= 4096)
    for (int j = 0; j < nt; ++j) {
        for (int i = 0; i < np; ++i) {
            const std::size_t idx = grid.index(j, i);
            if (np == 1) {
                hess.tp[idx] = 0.0;
                continue;
            }
            const double w_n = (j + 1 < nt) ? grad.p[grid.index(j + 1, i)]
                                            : -grid.sample(grad.p, j, i, +1, 0);
            const double w_s = (j - 1 >= 0) ? grad.p[grid.index(j - 1, i)]
                                            : -grid.sample(grad.p, j, i, -1, 0);
            hess.tp[idx] = (w_n - w_s) * inv_2dt;
        }
    }
}

double interpolate(const SphereGrid& grid, const NodeField& u, double theta, double phi) {
    theta = std::clamp(theta, 0.0, kPi);

    const double tj = theta / grid.dtheta() - 0.5;
    int j0 = static_cast<int>(std::floor(tj));
    const double wt = tj - j0;

    if (grid.is_axisymmetric()) {
        return (1.0 - wt) * lattice_value(grid, u, j0, 0) +
               wt * lattice_value(grid, u, j0 + 1, 0);
    }

    const double two_pi = 2.0 * kPi;
    phi = std::fmod(phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    const double pi_frac = phi / grid.dphi();
    int i0 = static_cast<int>(std::floor(pi_frac));
    const double wp = pi_frac - i0;

    const double v00 = lattice_value(grid, u, j0, i0);
    const double v01 = lattice_value(grid, u, j0, i0 + 1);
    const double v10 = lattice_value(grid, u, j0 + 1, i0);
    const double v11 = lattice_value(grid, u, j0 + 1, i0 + 1);
    return (1.0 - wt) * ((1.0 - wp) * v00 + wp * v01) + wt * ((1.0 - wp) * v10 + wp * v11);
}

}  // namespace starflow
