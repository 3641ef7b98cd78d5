#include "starflow/flow.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "starflow/errors.hpp"

namespace starflow {

namespace {

NodeField exp_field(const NodeField& u) {
    NodeField rho(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::exp(u[i]);
    return rho;
}

double max_abs_dt_rho(const NodeField& rho, const NodeField& G) {
    double m = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) m = std::max(m, std::abs(rho[i] * G[i]));
    return m;
}

double min_f_on_annulus(const PrescribedSpec& f_spec, const SphereGrid& grid, double R1,
                        double R2, int rho_samples = 32) {
    double lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < rho_samples; ++s) {
        const double rho =
            R1 + (R2 - R1) * static_cast<double>(s) / static_cast<double>(rho_samples - 1);
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            lo = std::min(lo, eval_f(f_spec, rho, grid.unit_vector(i)));
        }
    }
    return lo;
}

}  // namespace

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::Horizon: return "horizon";
        case Termination::StepLimit: return "step-limit";
        case Termination::ConeViolation: return "cone-violation";
    }
    return "unknown";
}

namespace {

void velocity_into(const SphereGrid& grid, const NodeField& rho, const ShapeState& shape,
                   const CurvatureSpec& F_spec, const PrescribedSpec& f_spec, NodeField& G) {
    const std::size_t n = rho.size();
    G.resize(n);
    long long bad = -1;

#pragma omp parallel for schedule(static) reduction(max : bad) if (n >= 4096)
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const auto& p = shape.pt[i];
        if (!in_cone(F_spec, p.kappa)) {
            bad = std::max(bad, ii);
            G[i] = 0.0;
            continue;
        }
        const double F = eval_F(F_spec, p.kappa);
        G[i] = (1.0 / F - eval_f(f_spec, rho[i], grid.unit_vector(i))) * p.w / rho[i];
    }

    if (bad >= 0) {
        // report the first offending node in grid order
        for (std::size_t i = 0; i < n; ++i) {
            const auto kp = shape.pt[i].kappa;
            if (!in_cone(F_spec, kp)) {
                throw ConeError(i, kp.first, kp.second,
                                "velocity: curvature pair (" + std::to_string(kp.first) +
                                    ", " + std::to_string(kp.second) + ") at node " +
                                    std::to_string(i) + " left the " + F_spec.name() +
                                    " admissibility cone");
            }
        }
    }
}

}  // namespace

NodeField velocity_from_shape(const SphereGrid& grid, const NodeField& rho,
                              const ShapeState& shape, const CurvatureSpec& F_spec,
                              const PrescribedSpec& f_spec) {
    NodeField G;
    velocity_into(grid, rho, shape, F_spec, f_spec, G);
    return G;
}

NodeField velocity(const SphereGrid& grid, const NodeField& u, const CurvatureSpec& F_spec,
                   const PrescribedSpec& f_spec) {
    const NodeField rho = exp_field(u);
    const ShapeState shape = shape_state(grid, rho);
    return velocity_from_shape(grid, rho, shape, F_spec, f_spec);
}

double stable_dt_from_shape(const SphereGrid& grid, const NodeField& rho,
                            const ShapeState& shape, const CurvatureSpec& F_spec,
                            double safety, double cap) {
    double max_rad = 0.0;

#pragma omp parallel for schedule(static) reduction(max : max_rad) if (rho.size() >= 4096)
    for (long long ii = 0; ii < static_cast<long long>(rho.size()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const auto& p = shape.pt[i];
        if (!in_cone(F_spec, p.kappa)) continue;  // caught by the velocity pass
        const double F = eval_F(F_spec, p.kappa);
        const Sym2 diffusion =
            (1.0 / (rho[i] * rho[i] * F * F)) * congruence(p.gamma, grad_F_matrix(F_spec, p.a));
        max_rad = std::max(max_rad, spectral_radius(diffusion));
    }

    if (!(max_rad > 0.0)) {
        throw Error("stable_dt: degenerate diffusion tensor");
    }
    double dt = safety * grid.h_min() * grid.h_min() / (4.0 * max_rad);
    if (cap > 0.0) dt = std::min(dt, cap);
    return dt;
}

double stable_dt(const SphereGrid& grid, const NodeField& u, const CurvatureSpec& F_spec,
                 double safety, double cap) {
    const NodeField rho = exp_field(u);
    const ShapeState shape = shape_state(grid, rho);
    return stable_dt_from_shape(grid, rho, shape, F_spec, safety, cap);
}

InitialCheck check_initial(const SphereGrid& grid, const NodeField& u0,
                           const CurvatureSpec& F_spec, const PrescribedSpec& f_spec,
                           double r1, double r2) {
    const NodeField rho = exp_field(u0);
    const ShapeState shape = shape_state(grid, rho);

    InitialCheck out;
    out.degree = F_spec.degree();
    out.norm_note = "NOTE: |grad X0| in the degree>1 condition is the frame Frobenius "
                    "norm sqrt(trace g) = sqrt(2 rho^2 + |grad rho|^2)";

    if (out.degree <= 1.0) {
        const NodeField G = velocity_from_shape(grid, rho, shape, F_spec, f_spec);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const double dtrho = rho[i] * G[i];
            lo = std::min(lo, dtrho);
            hi = std::max(hi, dtrho);
        }
        out.lhs_min = lo;
        out.lhs_max = hi;
        out.rhs = 0.0;
        out.pass = lo >= -1e-12;
        return out;
    }

    double min_rho = std::numeric_limits<double>::infinity();
    double max_rho = -std::numeric_limits<double>::infinity();
    for (const double r : rho) {
        min_rho = std::min(min_rho, r);
        max_rho = std::max(max_rho, r);
    }
    const double R1 = std::min(r1, min_rho);
    const double R2 = std::max(r2, max_rho);
    const double min_f = min_f_on_annulus(f_spec, grid, R1, R2);
    out.rhs = out.degree * R1 / ((out.degree + 1.0) * R2) * min_f;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto& p = shape.pt[i];
        if (!in_cone(F_spec, p.kappa)) {
            throw ConeError(i, p.kappa.first, p.kappa.second,
                            "check_initial: inadmissible initial data at node " +
                                std::to_string(i));
        }
        const double speed = 1.0 / eval_F(F_spec, p.kappa) -
                             eval_f(f_spec, rho[i], grid.unit_vector(i));
        const Vec2 grad_rho = shape.grad_rho.at(i);
        const double grad_x0 = std::sqrt(2.0 * rho[i] * rho[i] + grad_rho.norm2());
        const double lhs = -speed * grad_x0 / rho[i];
        lo = std::min(lo, lhs);
        hi = std::max(hi, lhs);
    }
    out.lhs_min = lo;
    out.lhs_max = hi;
    out.pass = lo >= -1e-12 && hi <= out.rhs + 1e-12;
    return out;
}

namespace {

// reusable per-stage buffers: one shape evaluation per integrator stage
struct Stage {
    NodeField u;
    NodeField rho;
    ShapeState shape;
    ShapeWorkspace work;
    NodeField G;

    void eval(const SphereGrid& grid, const CurvatureSpec& F_spec,
              const PrescribedSpec& f_spec) {
        rho.resize(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::exp(u[i]);
        shape_state_log(grid, u, rho, shape, work);
        velocity_into(grid, rho, shape, F_spec, f_spec, G);
    }
};

void axpy_into(NodeField& dst, const NodeField& u, double dt, const NodeField& k) {
    dst.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) dst[i] = u[i] + dt * k[i];
}

}  // namespace

FlowReport evolve(const SphereGrid& grid, const NodeField& u0, const CurvatureSpec& F_spec,
                  const PrescribedSpec& f_spec, const FlowConfig& config) {
    if (!(config.safety > 0.0 && config.safety <= 1.0)) {
        throw DomainError("evolve: safety factor must lie in (0, 1]");
    }
    if (!(config.tol_residual > 0.0) || !(config.t_max > 0.0)) {
        throw DomainError("evolve: tol_residual and t_max must be positive");
    }

    const auto wall_start = std::chrono::steady_clock::now();
    FlowReport report;
    report.final_state.u = u0;

    NodeField u = u0;
    double t = 0.0;
    long long step = 0;

    try {
        Stage cur, s2, s3, s4;
        cur.u = u;
        cur.eval(grid, F_spec, f_spec);

        // constants the certificates compare against, frozen at t = 0
        auto& meta = report.series.meta;
        meta.min_rho0 = *std::min_element(cur.rho.begin(), cur.rho.end());
        meta.max_rho0 = *std::max_element(cur.rho.begin(), cur.rho.end());
        meta.F0max = max_abs_dt_rho(cur.rho, cur.G);
        meta.h0max = initial_h_max(cur.shape);
        meta.degree = F_spec.degree();
        double h0 = 0.0;
        for (std::size_t i = 0; i < cur.rho.size(); ++i) {
            const Vec2 gr = cur.shape.grad_rho.at(i);
            h0 = std::max(h0, 0.5 * gr.norm2() / (cur.rho[i] * cur.rho[i]));
        }
        meta.H0max = h0;

        double last_sample_t = -1.0;
        const auto record = [&]() {
            report.series.samples.push_back(
                sample_monitors(grid, cur.rho, cur.shape, cur.G, t, F_spec, f_spec));
            if (config.store_fields) report.snapshots.push_back({t, u, cur.G});
            last_sample_t = t;
        };

        for (;;) {
            const double residual_now = max_abs_dt_rho(cur.rho, cur.G);
            if (step % config.monitor_stride == 0) record();

            if (residual_now <= config.tol_residual) {
                report.termination = Termination::Converged;
                break;
            }
            if (t >= config.t_max) {
                report.termination = Termination::Horizon;
                break;
            }
            if (step >= config.max_steps) {
                report.termination = Termination::StepLimit;
                break;
            }

            const double dt = stable_dt_from_shape(grid, cur.rho, cur.shape, F_spec,
                                                   config.safety, config.t_max);
            switch (config.integrator) {
                case Integrator::Euler: {
                    axpy_into(cur.u, u, dt, cur.G);
                    u = cur.u;
                    break;
                }
                case Integrator::RK2: {
                    axpy_into(s2.u, u, 0.5 * dt, cur.G);
                    s2.eval(grid, F_spec, f_spec);
                    axpy_into(cur.u, u, dt, s2.G);
                    u = cur.u;
                    break;
                }
                case Integrator::RK4: {
                    axpy_into(s2.u, u, 0.5 * dt, cur.G);
                    s2.eval(grid, F_spec, f_spec);
                    axpy_into(s3.u, u, 0.5 * dt, s2.G);
                    s3.eval(grid, F_spec, f_spec);
                    axpy_into(s4.u, u, dt, s3.G);
                    s4.eval(grid, F_spec, f_spec);
                    for (std::size_t i = 0; i < u.size(); ++i) {
                        u[i] += dt / 6.0 *
                                (cur.G[i] + 2.0 * s2.G[i] + 2.0 * s3.G[i] + s4.G[i]);
                    }
                    cur.u = u;
                    break;
                }
            }
            t += dt;
            ++step;
            cur.u = u;
            cur.eval(grid, F_spec, f_spec);
        }

        if (last_sample_t < t) record();
    } catch (const ConeError& e) {
        report.termination = Termination::ConeViolation;
        report.cone_violation = ConeViolationInfo{e.node, e.kappa1, e.kappa2, e.what()};
    }

    report.final_state = FlowState{t, u, step};
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return report;
}

std::vector<DiffeoState> track_material_points(const SphereGrid& grid,
                                               const std::vector<Snapshot>& trajectory,
                                               const std::vector<Vec3>& seed_points) {
    if (trajectory.empty()) {
        throw DomainError("track_material_points: empty trajectory");
    }

    struct Frame {
        double t;
        NodeField rho;
        NodeField zx, zy, zz;  // ambient components of Z
    };
    std::vector<Frame> frames;
    frames.reserve(trajectory.size());
    for (const auto& snap : trajectory) {
        Frame fr;
        fr.t = snap.t;
        fr.rho = exp_field(snap.u);
        const FrameVectorField grad_r = covariant_gradient(grid, snap.u);
        const std::size_t n = grid.node_count();
        fr.zx.resize(n);
        fr.zy.resize(n);
        fr.zz.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double rho = fr.rho[i];
            const double dt_rho = rho * snap.G[i];
            const Vec2 grad_rho{rho * grad_r.t[i], rho * grad_r.p[i]};
            const double th = grid.theta(i);
            const double ph = grid.phi(i);
            const Vec3 e_theta{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph),
                               -std::sin(th)};
            const Vec3 e_phi{-std::sin(ph), std::cos(ph), 0.0};
            const Vec3 grad_ambient = grad_rho.t * e_theta + grad_rho.p * e_phi;
            const double denom = grad_rho.norm2() + rho * rho;
            fr.zx[i] = -dt_rho * grad_ambient.x / denom;
            fr.zy[i] = -dt_rho * grad_ambient.y / denom;
            fr.zz[i] = -dt_rho * grad_ambient.z / denom;
        }
        frames.push_back(std::move(fr));
    }

    const auto direction_angles = [](Vec3 v) {
        const double theta = std::acos(std::clamp(v.z, -1.0, 1.0));
        const double phi = std::atan2(v.y, v.x);
        return std::pair<double, double>{theta, phi};
    };
    const auto z_at = [&](const Frame& a, const Frame& b, double w, Vec3 y) {
        const auto [th, ph] = direction_angles(y);
        const Vec3 za{interpolate(grid, a.zx, th, ph), interpolate(grid, a.zy, th, ph),
                      interpolate(grid, a.zz, th, ph)};
        const Vec3 zb{interpolate(grid, b.zx, th, ph), interpolate(grid, b.zy, th, ph),
                      interpolate(grid, b.zz, th, ph)};
        return (1.0 - w) * za + w * zb;
    };
    const auto normalize = [](Vec3 v) {
        const double n = v.norm();
        return (1.0 / n) * v;
    };

    std::vector<Vec3> phi;
    phi.reserve(seed_points.size());
    for (const Vec3& s : seed_points) phi.push_back(normalize(s));

    std::vector<DiffeoState> history;
    const auto record = [&](const Frame& fr) {
        DiffeoState st;
        st.t = fr.t;
        st.phi = phi;
        st.X.reserve(phi.size());
        for (const Vec3& q : phi) {
            const auto [th, ph] = direction_angles(q);
            st.X.push_back(interpolate(grid, fr.rho, th, ph) * q);
        }
        history.push_back(std::move(st));
    };
    record(frames.front());

    constexpr int substeps = 4;
    for (std::size_t s = 0; s + 1 < frames.size(); ++s) {
        const Frame& a = frames[s];
        const Frame& b = frames[s + 1];
        const double span = b.t - a.t;
        const double h = span / substeps;
        for (int sub = 0; sub < substeps; ++sub) {
            const double w0 = static_cast<double>(sub) / substeps;
            const double w_half = (sub + 0.5) / substeps;
            for (Vec3& q : phi) {
                const Vec3 k1 = z_at(a, b, w0, q);
                const Vec3 q_mid = normalize(q + (0.5 * h) * k1);
                const Vec3 k2 = z_at(a, b, w_half, q_mid);
                q = normalize(q + h * k2);
            }
        }
        record(b);
    }
    return history;
}

double uniqueness_experiment(const SphereGrid& grid, const CurvatureSpec& F_spec,
                             const PrescribedSpec& f_spec, const NodeField& u0_a,
                             const NodeField& u0_b, const FlowConfig& config) {
    const FlowReport run_a = evolve(grid, u0_a, F_spec, f_spec, config);
    const FlowReport run_b = evolve(grid, u0_b, F_spec, f_spec, config);
    if (!run_a.converged() || !run_b.converged()) {
        throw Error(std::string("uniqueness_experiment: runs terminated as ") +
                    termination_name(run_a.termination) + " / " +
                    termination_name(run_b.termination));
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < u0_a.size(); ++i) {
        diff = std::max(diff, std::abs(std::exp(run_a.final_state.u[i]) -
                                       std::exp(run_b.final_state.u[i])));
    }
    return diff;
}

}  // namespace starflow
