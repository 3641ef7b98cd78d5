#ifndef STARFLOW_PRESCRIBED_HPP
#define STARFLOW_PRESCRIBED_HPP

#include <optional>
#include <vector>

#include "starflow/sphere_grid.hpp"

namespace starflow {

/// Prescribed function f(X) = |X|^p (1 + eps * Y(X/|X|)) with Y either a
/// degree-one spherical harmonic c . x or a tabulated angular profile on a
/// grid (interpolated off-node).
struct PrescribedSpec {
    double p = 2.0;
    double epsilon = 0.0;
    Vec3 harmonic{0.0, 0.0, 1.0};  // Y(x) = c . x when no table is set

    // optional tabulated angular profile; values of Y at the nodes of `table_grid`
    std::optional<NodeField> table;
    const SphereGrid* table_grid = nullptr;

    /// Angular factor Y at a unit direction.
    double angular(Vec3 x) const;

    /// 1 + eps * Y(x); must stay positive for f to be positive.
    double angular_factor(Vec3 x) const { return 1.0 + epsilon * angular(x); }
};

double eval_f(const PrescribedSpec& spec, double rho, Vec3 x);
double d_rho_f(const PrescribedSpec& spec, double rho, Vec3 x);

/// f at an ambient point X != 0.
double eval_f_ambient(const PrescribedSpec& spec, Vec3 X);

/// Minimum of d/drho (rho^{-k} f) over a (rho, node) lattice; the
/// monotonicity condition holds iff this is positive.
double check_monotonicity(const PrescribedSpec& spec, double k,
                          double rho_lo, double rho_hi,
                          const SphereGrid& grid, int rho_samples = 32);

struct BarrierCheck {
    bool pass = false;
    double inner_margin = 0.0;  // r1^k - max f on |X| = r1
    double outer_margin = 0.0;  // min f on |X| = r2 - r2^k
};

/// Barrier radii check: f <= r1^k on the inner sphere, f >= r2^k on the outer.
BarrierCheck verify_barriers(const PrescribedSpec& spec, double k, double r1, double r2,
                             const SphereGrid& grid);

/// delta0 = min over [R1, R2] x S^2 of (rho d_rho f - k f); positive under
/// admissibility. Throws if the scan comes out nonpositive.
double delta0(const PrescribedSpec& spec, double k, double R1, double R2,
              const SphereGrid& grid, int rho_samples = 32);

struct FNorms {
    double c0_grad = 0.0;  // sup |grad f| over the annulus
    double c2_norm = 0.0;  // max of sup |f|, sup |grad f|, sup |hess f|
};

/// Ambient C^0/C^1/C^2 norms of f on the annulus R1 <= |X| <= R2, estimated
/// by central finite differences on a radial x angular sample lattice.
FNorms norms(const PrescribedSpec& spec, double R1, double R2, const SphereGrid& grid,
             int rho_samples = 32);

struct AdmissibilityReport {
    double r1 = 0.0;
    double r2 = 0.0;
    double min_mono = 0.0;
    double delta0 = 0.0;
    BarrierCheck barriers;
    double c0_grad = 0.0;
    double c2_norm = 0.0;

    // strict ">" conditions certified as ">= 1e-10"
    bool pass() const {
        return min_mono >= 1e-10 && delta0 >= 1e-10 && barriers.pass && r1 <= r2;
    }
};

/// Full admissibility scan over [r1, r2] (monotonicity, barriers, delta0, norms).
AdmissibilityReport admissibility_report(const PrescribedSpec& spec, double k,
                                         double r1, double r2, const SphereGrid& grid);

}  // namespace starflow

#endif
