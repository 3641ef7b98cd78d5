#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "starflow/errors.hpp"
#include "starflow/flow.hpp"
#include "starflow/rng.hpp"

using namespace starflow;

namespace {

PrescribedSpec radial(double p) {
    PrescribedSpec spec;
    spec.p = p;
    return spec;
}

PrescribedSpec tilted(double p, double eps) {
    PrescribedSpec spec;
    spec.p = p;
    spec.epsilon = eps;
    spec.harmonic = {0.0, 0.0, 1.0};
    return spec;
}

NodeField log_constant(const SphereGrid& grid, double rho) {
    return grid.constant_field(std::log(rho));
}

double max_dev_from(const NodeField& u, double target_rho) {
    double dev = 0.0;
    for (const double v : u) dev = std::max(dev, std::abs(std::exp(v) - target_rho));
    return dev;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("velocity on round spheres has the closed form rho^k - f") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);

    // k = 1, f = |X|^2, rho = 0.8: d_t rho = 0.8 - 0.64, d_t r = 0.2
    const NodeField g1 = velocity(grid, log_constant(grid, 0.8), sigma_k(1), radial(2.0));
    for (const double v : g1) CHECK(v == doctest::Approx(0.2).epsilon(1e-13));

    // steady unit sphere
    const NodeField g2 = velocity(grid, log_constant(grid, 1.0), sigma_k(1), radial(2.0));
    for (const double v : g2) CHECK(std::abs(v) <= 1e-14);

    // k = 2, f = |X|^3, rho = 1.05: d_t rho = 1.05^2 - 1.05^3
    const NodeField g3 = velocity(grid, log_constant(grid, 1.05), sigma_k(2), radial(3.0));
    for (const double v : g3) {
        CHECK(1.05 * v == doctest::Approx(-0.055125).epsilon(1e-12));
    }
}

TEST_CASE("velocity names the node on a cone violation") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
    // a second-harmonic ripple of this size makes a saddle waist: outside the
    // order-2 cone while still mean-convex
    NodeField u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::log(1.0 + 0.25 * std::cos(2.0 * grid.theta(i)));
    }
    const ShapeState st = shape_state(grid, [&] {
        NodeField rho(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) rho[i] = std::exp(u[i]);
        return rho;
    }());
    REQUIRE(min_cone_margin(st, sigma_k(2)) <= 0.0);
    REQUIRE(min_cone_margin(st, sigma_k(1)) > 0.0);
    CHECK_THROWS_AS(velocity(grid, u, sigma_k(2), radial(3.0)), ConeError);
    try {
        velocity(grid, u, sigma_k(2), radial(3.0));
    } catch (const ConeError& e) {
        CHECK(e.node < grid.node_count());
        CHECK_FALSE(in_cone(sigma_k(2), {e.kappa1, e.kappa2}));
    }
    // the same surface is fine for the order-1 cone
    CHECK_NOTHROW(velocity(grid, u, sigma_k(1), radial(2.0)));
}

TEST_CASE("stable_dt on round spheres") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);
    const double h2 = grid.h_min() * grid.h_min();
    // rho = 1, sigma_1: diffusion tensor is I/2, dt = safety h^2 / 2
    CHECK(stable_dt(grid, log_constant(grid, 1.0), sigma_k(1), 0.5) ==
          doctest::Approx(0.5 * h2 / 2.0).epsilon(1e-12));
    // rho = 2, sigma_1: scale-invariant for degree 1
    CHECK(stable_dt(grid, log_constant(grid, 2.0), sigma_k(1), 0.5) ==
          doctest::Approx(0.5 * h2 / 2.0).epsilon(1e-12));
    // halving h quarters dt
    const SphereGrid fine = SphereGrid::build(GridMode::Full, 32, 64);
    CHECK(stable_dt(grid, log_constant(grid, 1.0), sigma_k(1), 0.5) /
              stable_dt(fine, log_constant(fine, 1.0), sigma_k(1), 0.5) ==
          doctest::Approx(4.0).epsilon(1e-12));
    // positive and capped
    CHECK(stable_dt(grid, log_constant(grid, 1.0), sigma_k(2), 1.0, 1e-6) ==
          doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(stable_dt(grid, log_constant(grid, 1.0), sigma_k(2), 1.0) > 0.0);
}

TEST_CASE("initial check, degree <= 1 branch") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);
    const auto pass = check_initial(grid, log_constant(grid, 0.8), sigma_k(1), radial(2.0),
                                    0.8, 1.0);
    CHECK(pass.pass);
    CHECK(pass.lhs_min == doctest::Approx(0.16).epsilon(1e-12));

    const auto fail = check_initial(grid, log_constant(grid, 1.2), sigma_k(1), radial(2.0),
                                    0.8, 1.0);
    CHECK_FALSE(fail.pass);
    CHECK(fail.lhs_min == doctest::Approx(1.2 - 1.44).epsilon(1e-12));
}

TEST_CASE("initial check, degree > 1 branch matches the hand-evaluated constants") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);
    const auto check = check_initial(grid, log_constant(grid, 1.05), sigma_k(2), radial(3.0),
                                     0.9, 1.0);
    CHECK(check.pass);
    CHECK(check.lhs_max == doctest::Approx(0.055125 * std::sqrt(2.0)).epsilon(1e-10));
    CHECK(check.rhs == doctest::Approx((2.0 * 0.9) / (3.0 * 1.05) * 0.729).epsilon(1e-10));
    CHECK(check.norm_note.find("sqrt(trace g)") != std::string::npos);
}

TEST_CASE("evolve: logistic sphere relaxation reaches the unit sphere") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
    FlowConfig cfg;
    cfg.tol_residual = 1e-8;
    cfg.t_max = 40.0;
    const FlowReport report = evolve(grid, log_constant(grid, 0.8), sigma_k(1), radial(2.0),
                                     cfg);
    CHECK(report.converged());
    CHECK(max_dev_from(report.final_state.u, 1.0) <= 1e-6);
}

TEST_CASE("evolve: steady start converges at step 0") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);
    FlowConfig cfg;
    const FlowReport report = evolve(grid, log_constant(grid, 1.0), sigma_k(1), radial(2.0),
                                     cfg);
    CHECK(report.converged());
    CHECK(report.final_state.step == 0);
    CHECK(report.final_state.t == 0.0);
}

TEST_CASE("evolve: degree-2 branch decreases monotonically to the unit sphere") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
    FlowConfig cfg;
    cfg.tol_residual = 1e-7;
    const FlowReport report = evolve(grid, log_constant(grid, 1.05), sigma_k(2), radial(3.0),
                                     cfg);
    CHECK(report.converged());
    CHECK(max_dev_from(report.final_state.u, 1.0) <= 1e-6);
    for (const auto& s : report.series.samples) {
        CHECK(s.max_dt_rho <= 1e-10);  // sign preservation, degree > 1
    }
}

TEST_CASE("constant-field runs match adaptive scalar ODE integration to 1e-8") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
    struct Case {
        double rho0, p;
        CurvatureSpec spec;
    };
    for (const auto& c : {Case{0.8, 2.0, sigma_k(1)}, Case{1.05, 3.0, sigma_k(2)}}) {
        FlowConfig cfg;
        cfg.tol_residual = 1e-9;
        cfg.monitor_stride = 100;
        const FlowReport report =
            evolve(grid, log_constant(grid, c.rho0), c.spec, radial(c.p), cfg);
        REQUIRE(report.converged());
        std::vector<double> times;
        for (const auto& s : report.series.samples) times.push_back(s.t);
        const double degree = c.spec.degree();
        const double p = c.p;
        const auto rhs = [degree, p](double r) {
            return std::pow(r, degree) - std::pow(r, p);
        };
        const auto oracle = oracles::integrate_ode_at(rhs, c.rho0, times);
        for (std::size_t s = 0; s < times.size(); ++s) {
            // the grid run is spatially exact on constants; compare min = max
            CHECK(std::abs(report.series.samples[s].min_rho - oracle[s]) <= 1e-8);
            CHECK(std::abs(report.series.samples[s].max_rho - oracle[s]) <= 1e-8);
        }
    }
}

TEST_CASE("sign preservation for a passing degree <= 1 start") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 32, 0);
    // nonconstant admissible start below the barrier
    NodeField u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::log(0.75 * (1.0 + 0.05 * std::cos(grid.theta(i))));
    }
    const auto init = check_initial(grid, u, sigma_k(1), tilted(2.0, 0.1), 0.7, 1.2);
    REQUIRE(init.pass);
    FlowConfig cfg;
    cfg.tol_residual = 1e-7;
    cfg.monitor_stride = 20;
    const FlowReport report = evolve(grid, u, sigma_k(1), tilted(2.0, 0.1), cfg);
    REQUIRE(report.converged());
    for (const auto& s : report.series.samples) {
        CHECK(s.min_dt_rho >= -1e-10);
        CHECK(s.cone_margin > 0.0);  // admissibility persists
    }
}

TEST_CASE("RK2 and RK4 limits agree") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 32, 0);
    NodeField u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::log(0.8 * (1.0 + 0.04 * std::cos(grid.theta(i))));
    }
    FlowConfig cfg;
    cfg.tol_residual = 1e-9;
    FlowConfig cfg2 = cfg;
    cfg2.integrator = Integrator::RK2;
    const FlowReport r4 = evolve(grid, u, sigma_k(1), tilted(2.0, 0.1), cfg);
    const FlowReport r2 = evolve(grid, u, sigma_k(1), tilted(2.0, 0.1), cfg2);
    REQUIRE(r4.converged());
    REQUIRE(r2.converged());
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        diff = std::max(diff, std::abs(std::exp(r4.final_state.u[i]) -
                                       std::exp(r2.final_state.u[i])));
    }
    CHECK(diff <= 1e-7);
}

TEST_CASE("Euler integrator also converges on the logistic scenario") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 32, 0);
    FlowConfig cfg;
    cfg.integrator = Integrator::Euler;
    cfg.tol_residual = 1e-7;
    const FlowReport report = evolve(grid, log_constant(grid, 0.8), sigma_k(1), radial(2.0),
                                     cfg);
    CHECK(report.converged());
    CHECK(max_dev_from(report.final_state.u, 1.0) <= 1e-5);
}

TEST_CASE("cone violation terminates with a post-mortem") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 64, 0);
    NodeField u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::log(1.0 + 0.45 * std::cos(2.0 * grid.theta(i)));
    }
    FlowConfig cfg;
    const FlowReport report = evolve(grid, u, sigma_k(2), radial(3.0), cfg);
    CHECK(report.termination == Termination::ConeViolation);
    REQUIRE(report.cone_violation.has_value());
    CHECK(report.cone_violation->message.find("node") != std::string::npos);
}

TEST_CASE("horizon and step-limit terminations") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 32, 0);
    FlowConfig cfg;
    cfg.t_max = 0.01;
    cfg.tol_residual = 1e-14;
    const FlowReport horizon = evolve(grid, log_constant(grid, 0.8), sigma_k(1),
                                      radial(2.0), cfg);
    CHECK(horizon.termination == Termination::Horizon);
    CHECK(horizon.final_state.t >= 0.01);

    FlowConfig cfg2;
    cfg2.max_steps = 3;
    cfg2.tol_residual = 1e-14;
    const FlowReport limited = evolve(grid, log_constant(grid, 0.8), sigma_k(1),
                                      radial(2.0), cfg2);
    CHECK(limited.termination == Termination::StepLimit);
    CHECK(limited.final_state.step == 3);
}

TEST_CASE("material points stay put on spatially constant runs") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 16, 32);
    FlowConfig cfg;
    cfg.store_fields = true;
    cfg.monitor_stride = 25;
    cfg.tol_residual = 1e-7;
    const FlowReport report = evolve(grid, log_constant(grid, 0.8), sigma_k(1), radial(2.0),
                                     cfg);
    REQUIRE(report.converged());
    REQUIRE(report.snapshots.size() >= 2);
    const std::vector<Vec3> seeds = {{1, 0, 0}, {0, 0.6, 0.8}, {-0.5, 0.5, 0.7071}};
    const auto history = track_material_points(grid, report.snapshots, seeds);
    REQUIRE(history.size() == report.snapshots.size());
    for (const auto& state : history) {
        for (std::size_t q = 0; q < seeds.size(); ++q) {
            const Vec3 seed_unit = (1.0 / seeds[q].norm()) * seeds[q];
            CHECK((state.phi[q] - seed_unit).norm() <= 1e-10);
            CHECK(std::abs(state.phi[q].norm() - 1.0) <= 1e-10);
        }
    }
    // reconstructed points sit on the final sphere at the end
    for (const auto& X : history.back().X) {
        CHECK(X.norm() == doctest::Approx(std::exp(report.final_state.u[0])).epsilon(1e-6));
    }
}

TEST_CASE("axisymmetric tracking stays on the seed meridian") {
    const SphereGrid grid = SphereGrid::build(GridMode::Full, 32, 64);
    NodeField u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = std::log(0.8 * (1.0 + 0.05 * std::cos(grid.theta(i))));
    }
    FlowConfig cfg;
    cfg.store_fields = true;
    cfg.monitor_stride = 50;
    cfg.tol_residual = 1e-7;
    const FlowReport report = evolve(grid, u, sigma_k(1), tilted(2.0, 0.1), cfg);
    REQUIRE(report.converged());
    const std::vector<Vec3> seeds = {{0.6, 0.0, 0.8}, {0.0, 0.31, 0.95}};
    const auto history = track_material_points(grid, report.snapshots, seeds);
    for (const auto& state : history) {
        // azimuth is preserved: the tangential velocity has no phi component
        CHECK(std::abs(std::atan2(state.phi[0].y, state.phi[0].x)) <= 1e-9);
        CHECK(std::abs(std::atan2(state.phi[1].y, state.phi[1].x) -
                       std::atan2(0.31, 0.0)) <= 1e-9);
    }
}

TEST_CASE("uniqueness experiment at small scale") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 32, 0);
    FlowConfig cfg;
    cfg.tol_residual = 1e-8;
    const double diff = uniqueness_experiment(grid, sigma_k(1), radial(2.0),
                                              log_constant(grid, 0.6),
                                              log_constant(grid, 0.9), cfg);
    CHECK(diff <= 1e-5);
    // identical initial data give bitwise identical runs
    const double zero = uniqueness_experiment(grid, sigma_k(1), radial(2.0),
                                              log_constant(grid, 0.7),
                                              log_constant(grid, 0.7), cfg);
    CHECK(zero == 0.0);
}

TEST_CASE("invalid flow configuration is rejected") {
    const SphereGrid grid = SphereGrid::build(GridMode::Axisymmetric, 16, 0);
    FlowConfig bad;
    bad.safety = 0.0;
    CHECK_THROWS_AS(evolve(grid, log_constant(grid, 1.0), sigma_k(1), radial(2.0), bad),
                    DomainError);
    bad = FlowConfig{};
    bad.tol_residual = -1.0;
    CHECK_THROWS_AS(evolve(grid, log_constant(grid, 1.0), sigma_k(1), radial(2.0), bad),
                    DomainError);
}

}  // TEST_SUITE
