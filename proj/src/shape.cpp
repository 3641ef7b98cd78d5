#include "starflow/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "starflow/errors.hpp"

namespace starflow {

ShapePoint shape_point(double rho, Vec2 grad_r, Sym2 hess_r) {
    if (!(rho > 0.0)) {
        throw DomainError("shape_point: rho must be positive (surface not starshaped)");
    }
    const double q = grad_r.norm2();
    const double w = std::sqrt(1.0 + q);
    const Sym2 dr_dr = Sym2::outer(grad_r);

    ShapePoint p;
    p.gamma = Sym2::identity() - (1.0 / (w * (1.0 + w))) * dr_dr;
    const Sym2 core = Sym2::identity() + dr_dr - hess_r;
    p.a = (1.0 / (rho * w)) * congruence(p.gamma, core);
    p.kappa = eigenvalues(p.a);

    p.g = (rho * rho) * (Sym2::identity() + dr_dr);
    p.g_inv_sqrt = (1.0 / rho) * p.gamma;
    p.h = (rho / w) * core;
    p.support = rho / w;
    p.w = w;
    return p;
}

Sym2 shape_matrix_rho_route(double rho, Vec2 grad_rho, Sym2 hess_rho) {
    const double q = grad_rho.norm2();
    const double v = std::sqrt(rho * rho + q);
    const Sym2 h = (1.0 / v) * ((rho * rho) * Sym2::identity() +
                                2.0 * Sym2::outer(grad_rho) - rho * hess_rho);
    const Sym2 sqrt_g_inv =
        (1.0 / rho) * (Sym2::identity() - (1.0 / (v * (rho + v))) * Sym2::outer(grad_rho));
    return congruence(sqrt_g_inv, h);
}

void shape_state_log(const SphereGrid& grid, const NodeField& u, const NodeField& rho,
                     ShapeState& out, ShapeWorkspace& work, bool verify) {
    const std::size_t n = grid.node_count();
    // validate before the parallel region so no exception crosses it
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) {
            throw DomainError("shape_state: rho must be positive and finite, node " +
                              std::to_string(i));
        }
    }
    covariant_derivatives(grid, u, work.grad, work.hess);

    out.pt.resize(n);
    out.grad_rho.t.resize(n);
    out.grad_rho.p.resize(n);
    out.nu.resize(n);

#pragma omp parallel for schedule(static) if (n >= 4096)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const Vec2 dr = work.grad.at(i);
        const Sym2 d2r = work.hess.at(i);
        out.pt[i] = shape_point(rho[i], dr, d2r);

        const Vec2 drho{rho[i] * dr.t, rho[i] * dr.p};
        out.grad_rho.t[i] = drho.t;
        out.grad_rho.p[i] = drho.p;

        const double st = grid.sin_theta(i);
        const double ct = grid.cos_theta(i);
        const double sp = grid.sin_phi(i);
        const double cp = grid.cos_phi(i);
        const Vec3 e_theta{ct * cp, ct * sp, -st};
        const Vec3 e_phi{-sp, cp, 0.0};
        const Vec3 grad_ambient = drho.t * e_theta + drho.p * e_phi;
        const double v = rho[i] * out.pt[i].w;  // sqrt(rho^2 + |grad rho|^2)
        out.nu[i] = (1.0 / v) * (rho[i] * grid.unit_vector(i) - grad_ambient);
    }

    if (verify) {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 dr = work.grad.at(i);
            const Sym2 d2r = work.hess.at(i);
            const Vec2 drho{rho[i] * dr.t, rho[i] * dr.p};
            const Sym2 d2rho = rho[i] * (d2r + Sym2::outer(dr));
            const Sym2 a2 = shape_matrix_rho_route(rho[i], drho, d2rho);
            const Sym2 a1 = out.pt[i].a;
            const double scale = std::max({std::abs(a1.tt), std::abs(a1.tp),
                                           std::abs(a1.pp), 1e-300});
            const double diff = std::max({std::abs(a1.tt - a2.tt), std::abs(a1.tp - a2.tp),
                                          std::abs(a1.pp - a2.pp)});
            if (diff > 1e-9 * scale) {
                throw Error("shape_state: log-route and rho-route shape matrices disagree "
                            "at node " + std::to_string(i) +
                            " (relative difference " + std::to_string(diff / scale) + ")");
            }
        }
    }
}

ShapeState shape_state(const SphereGrid& grid, const NodeField& rho, bool verify) {
    const std::size_t n = grid.node_count();
    NodeField u(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rho[i] > 0.0)) {
            throw DomainError("shape_state: rho must be positive everywhere, node " +
                              std::to_string(i));
        }
        u[i] = std::log(rho[i]);
    }
    ShapeState out;
    ShapeWorkspace work;
    shape_state_log(grid, u, rho, out, work, verify);
    return out;
}

KappaPair principal_curvatures(Sym2 a) { return eigenvalues(a); }

double min_cone_margin(const ShapeState& state, const CurvatureSpec& spec) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& p : state.pt) {
        const auto [k1, k2] = p.kappa;
        double slack;
        if (spec.family == CurvatureSpec::Family::InvSigmaK) {
            slack = std::min(k1, k2);
        } else {
            slack = k1 + k2;                                    // S_1
            if (spec.k >= 2) slack = std::min(slack, k1 * k2);  // S_2
        }
        margin = std::min(margin, slack);
    }
    return margin;
}

}  // namespace starflow
