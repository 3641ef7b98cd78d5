#ifndef STARFLOW_FLOW_HPP
#define STARFLOW_FLOW_HPP

#include <optional>
#include <string>
#include <vector>

#include "starflow/monitors.hpp"
#include "starflow/prescribed.hpp"
#include "starflow/shape.hpp"
#include "starflow/sphere_grid.hpp"
#include "starflow/symfunc.hpp"

namespace starflow {

enum class Integrator { Euler, RK2, RK4 };

struct FlowConfig {
    double safety = 0.5;                  // CFL safety factor in (0, 1]
    Integrator integrator = Integrator::RK4;
    double tol_residual = 1e-7;           // stop when max |d_t rho| falls below
    double t_max = 50.0;
    long long max_steps = 2'000'000;
    int monitor_stride = 50;
    bool store_fields = false;            // keep (u, G) snapshots for post-processing
};

/// Evolving log-radial field r = log rho.
struct FlowState {
    double t = 0.0;
    NodeField u;
    long long step = 0;
};

enum class Termination { Converged, Horizon, StepLimit, ConeViolation };

const char* termination_name(Termination t);

struct Snapshot {
    double t = 0.0;
    NodeField u;  // log rho
    NodeField G;  // d_t log rho
};

struct ConeViolationInfo {
    std::size_t node = 0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    std::string message;
};

struct FlowReport {
    Termination termination = Termination::StepLimit;
    FlowState final_state;
    MonitorSeries series;
    double wall_seconds = 0.0;
    std::vector<Snapshot> snapshots;              // only when config.store_fields
    std::optional<ConeViolationInfo> cone_violation;

    bool converged() const { return termination == Termination::Converged; }
};

/// d_t r per node: (1/F(a) - f(rho x)) e^{-r} sqrt(1 + |grad r|^2).
/// Throws ConeError naming the first inadmissible node.
NodeField velocity(const SphereGrid& grid, const NodeField& u,
                   const CurvatureSpec& F_spec, const PrescribedSpec& f_spec);

/// Same, reusing an already-computed shape state for rho = e^u.
NodeField velocity_from_shape(const SphereGrid& grid, const NodeField& rho,
                              const ShapeState& shape, const CurvatureSpec& F_spec,
                              const PrescribedSpec& f_spec);

/// Explicit-scheme time step safety * h_min^2 / (4 max_nodes specrad(A)) where
/// A = gamma F'(a) gamma / (rho^2 F^2) is the diffusion tensor of the
/// linearized flow; optionally capped.
double stable_dt(const SphereGrid& grid, const NodeField& u, const CurvatureSpec& F_spec,
                 double safety, double cap = 0.0);

double stable_dt_from_shape(const SphereGrid& grid, const NodeField& rho,
                            const ShapeState& shape, const CurvatureSpec& F_spec,
                            double safety, double cap = 0.0);

/// Initial-data verdict: F[rho0] >= 0 for degree <= 1; for degree > 1 the
/// two-sided smallness condition against k R1 / ((k+1) R2) min f. The
/// gradient norm |grad X0| is taken as sqrt(trace g) = sqrt(2 rho^2 + |grad rho|^2),
/// the frame Frobenius norm (stated in `norm_note` on every verdict).
struct InitialCheck {
    bool pass = false;
    double degree = 0.0;
    double lhs_min = 0.0;  // min over nodes of the checked quantity
    double lhs_max = 0.0;  // max over nodes
    double rhs = 0.0;      // upper bound (0 means the one-sided branch)
    std::string norm_note;
};

InitialCheck check_initial(const SphereGrid& grid, const NodeField& u0,
                           const CurvatureSpec& F_spec, const PrescribedSpec& f_spec,
                           double r1, double r2);

/// Time-step the radial flow until max |d_t rho| <= tol_residual, the horizon,
/// the step limit, or a cone violation.
FlowReport evolve(const SphereGrid& grid, const NodeField& u0,
                  const CurvatureSpec& F_spec, const PrescribedSpec& f_spec,
                  const FlowConfig& config);

/// Material points of the moving surface, reconstructed from stored snapshots:
/// the sphere diffeomorphism phi solves d_t phi = Z(t, phi) with
/// Z = -d_t rho grad rho / (|grad rho|^2 + rho^2).
struct DiffeoState {
    double t = 0.0;
    std::vector<Vec3> phi;  // tracked directions, renormalized to |phi| = 1
    std::vector<Vec3> X;    // reconstructed ambient points rho(t, phi) phi
};

std::vector<DiffeoState> track_material_points(const SphereGrid& grid,
                                               const std::vector<Snapshot>& trajectory,
                                               const std::vector<Vec3>& seed_points);

/// Runs evolve from two initial fields and returns the max node-wise
/// difference of the final radial fields; throws if either run fails.
double uniqueness_experiment(const SphereGrid& grid, const CurvatureSpec& F_spec,
                             const PrescribedSpec& f_spec, const NodeField& u0_a,
                             const NodeField& u0_b, const FlowConfig& config);

}  // namespace starflow

#endif
