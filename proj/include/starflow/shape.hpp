#ifndef STARFLOW_SHAPE_HPP
#define STARFLOW_SHAPE_HPP

#include <utility>
#include <vector>

#include "starflow/sphere_grid.hpp"
#include "starflow/symfunc.hpp"

namespace starflow {

/// All pointwise geometric quantities of the radial surface X = rho * x,
/// derived from the log-radius r = log rho and its frame derivatives. The
/// shape matrix is assembled on the log-radial route
///     a = e^{-r} * gamma (I + dr dr^T - hess r) gamma / sqrt(1 + |dr|^2),
/// which is algebraically identical to conjugating the second fundamental
/// form with the inverse metric square root.
struct ShapePoint {
    Sym2 g;            // induced metric (length^2)
    Sym2 g_inv_sqrt;   // positive square root of g^{-1}
    Sym2 h;            // second fundamental form (length)
    Sym2 a;            // shape matrix (1/length)
    Sym2 gamma;        // dimensionless rank-one correction of the log route
    KappaPair kappa;   // principal curvatures, ascending
    double support;    // <X, nu> = rho^2 / sqrt(rho^2 + |grad rho|^2)
    double w;          // sqrt(1 + |grad log rho|^2)
};

/// Pointwise geometry from (rho, grad r, hess r) with r = log rho.
ShapePoint shape_point(double rho, Vec2 grad_r, Sym2 hess_r);

/// Shape matrix by the rho-variable route: conjugation of the second
/// fundamental form with the explicit square root of the inverse metric.
/// Retained as an independent algebraic path for cross-checking.
Sym2 shape_matrix_rho_route(double rho, Vec2 grad_rho, Sym2 hess_rho);

/// Per-node geometry of the surface with radial field rho over the grid.
struct ShapeState {
    std::vector<ShapePoint> pt;
    FrameVectorField grad_rho;  // ambient-scaled gradient rho * grad r
    std::vector<Vec3> nu;       // outward unit normal

    std::size_t size() const { return pt.size(); }
};

/// Compute the state. With verify = true the rho-route shape matrix is also
/// evaluated at every node and compared against the log route (1e-9
/// relative); a mismatch throws.
ShapeState shape_state(const SphereGrid& grid, const NodeField& rho, bool verify = false);

/// Same computation driven by the log field u = log rho (rho passed alongside
/// to avoid re-exponentiating); `work` holds reusable derivative buffers.
struct ShapeWorkspace {
    FrameVectorField grad;
    FrameMatrixField hess;
};

void shape_state_log(const SphereGrid& grid, const NodeField& u, const NodeField& rho,
                     ShapeState& out, ShapeWorkspace& work, bool verify = false);

/// Principal curvatures of a symmetric 2x2 shape matrix, ascending.
KappaPair principal_curvatures(Sym2 a);

/// Minimum over nodes of the admissibility slack of the curvature pairs:
/// the raw symmetric functions S_1..S_k for the sigma families, min(kappa_i)
/// for the inverse families. Positive iff every node lies strictly in the cone.
double min_cone_margin(const ShapeState& state, const CurvatureSpec& spec);

}  // namespace starflow

#endif
