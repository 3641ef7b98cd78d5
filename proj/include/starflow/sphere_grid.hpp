#ifndef STARFLOW_SPHERE_GRID_HPP
#define STARFLOW_SPHERE_GRID_HPP

#include <cstddef>
#include <vector>

#include "starflow/mat2.hpp"

namespace starflow {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// One real value per grid node.
using NodeField = std::vector<double>;

/// Per-node tangent vectors in the orthonormal frame, stored as two scalar fields.
struct FrameVectorField {
    NodeField t;
    NodeField p;

    Vec2 at(std::size_t i) const { return {t[i], p[i]}; }
};

/// Per-node symmetric 2x2 matrices, stored as 3 scalar fields (symmetric by
/// construction).
struct FrameMatrixField {
    NodeField tt;
    NodeField tp;
    NodeField pp;

    Sym2 at(std::size_t i) const { return {tt[i], tp[i], pp[i]}; }
};

enum class GridMode { Full, Axisymmetric };

/// Latitude-offset discretization of the unit sphere. Nodes sit at
/// theta_j = (j + 1/2) * pi / n_theta, phi_i = 2 pi i / n_phi, so the poles
/// are never grid nodes; stencils that cross a pole read the antipodal
/// continuation (-theta, phi + pi).
class SphereGrid {
public:
    static SphereGrid build(GridMode mode, int n_theta, int n_phi);

    GridMode mode() const { return mode_; }
    int n_theta() const { return n_theta_; }
    int n_phi() const { return n_phi_; }
    std::size_t node_count() const { return theta_.size(); }

    double dtheta() const { return dtheta_; }
    double dphi() const { return dphi_; }
    double h_min() const { return h_min_; }

    std::size_t index(int j, int i) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_phi_) +
               static_cast<std::size_t>(i);
    }

    double theta(std::size_t node) const { return theta_[node]; }
    double phi(std::size_t node) const { return phi_[node]; }
    Vec3 unit_vector(std::size_t node) const { return unit_[node]; }

    double sin_theta(std::size_t node) const { return sin_theta_[node]; }
    double cos_theta(std::size_t node) const { return cos_theta_[node]; }
    double sin_phi(std::size_t node) const { return sin_phi_[node]; }
    double cos_phi(std::size_t node) const { return cos_phi_[node]; }

    /// Value of u at lattice offset (j + dj, i + di), crossing poles and the
    /// phi seam as needed. Offsets must stay within one row of the grid.
    double sample(const NodeField& u, int j, int i, int dj, int di) const;

    NodeField constant_field(double value) const;

    bool is_axisymmetric() const { return mode_ == GridMode::Axisymmetric; }

private:
    SphereGrid() = default;

    GridMode mode_ = GridMode::Full;
    int n_theta_ = 0;
    int n_phi_ = 0;
    double dtheta_ = 0.0;
    double dphi_ = 0.0;
    double h_min_ = 0.0;
    std::vector<double> theta_;
    std::vector<double> phi_;
    std::vector<Vec3> unit_;
    std::vector<double> sin_theta_;
    std::vector<double> cos_theta_;
    std::vector<double> sin_phi_;
    std::vector<double> cos_phi_;
};

/// Covariant gradient of u in the orthonormal frame: (d_theta u, d_phi u / sin theta).
/// Second-order centered differences, phi-periodic, pole-crossing.
FrameVectorField covariant_gradient(const SphereGrid& grid, const NodeField& u);
void covariant_gradient(const SphereGrid& grid, const NodeField& u, FrameVectorField& out);

/// Covariant Hessian of u for the round metric, frame components
/// (u_tt; (u_tp - cot t * u_p)/sin t; u_pp/sin^2 t + cot t * u_t).
FrameMatrixField covariant_hessian(const SphereGrid& grid, const NodeField& u);
void covariant_hessian(const SphereGrid& grid, const NodeField& u, FrameMatrixField& out);

/// Gradient and Hessian in one stencil pass (the flow's inner loop).
void covariant_derivatives(const SphereGrid& grid, const NodeField& u,
                           FrameVectorField& grad, FrameMatrixField& hess);

/// Bilinear interpolation of a scalar node field at an arbitrary direction
/// (theta, phi), using the same pole-crossing continuation as the stencils.
double interpolate(const SphereGrid& grid, const NodeField& u, double theta, double phi);

namespace test_hooks {
/// Additive perturbation of the theta-theta Hessian stencil coefficient,
/// used by the selftest mutation check. Zero in normal operation.
extern double hessian_stencil_perturbation;
}  // namespace test_hooks

}  // namespace starflow

#endif
