#ifndef STARFLOW_MAT2_HPP
#define STARFLOW_MAT2_HPP

#include <cmath>
#include <utility>

namespace starflow {

/// Tangent vector in the local orthonormal frame (e_theta, e_phi/sin theta).
struct Vec2 {
    double t = 0.0;
    double p = 0.0;

    double norm2() const { return t * t + p * p; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.t + b.t, a.p + b.p}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.t - b.t, a.p - b.p}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.t, s * v.p}; }
inline double dot(Vec2 a, Vec2 b) { return a.t * b.t + a.p * b.p; }

/// Symmetric 2x2 matrix in the local orthonormal frame, stored as 3 components.
struct Sym2 {
    double tt = 0.0;
    double tp = 0.0;
    double pp = 0.0;

    static Sym2 identity() { return {1.0, 0.0, 1.0}; }

    /// Rank-one v v^T.
    static Sym2 outer(Vec2 v) { return {v.t * v.t, v.t * v.p, v.p * v.p}; }

    double trace() const { return tt + pp; }
    double det() const { return tt * pp - tp * tp; }
};

inline Sym2 operator+(Sym2 a, Sym2 b) { return {a.tt + b.tt, a.tp + b.tp, a.pp + b.pp}; }
inline Sym2 operator-(Sym2 a, Sym2 b) { return {a.tt - b.tt, a.tp - b.tp, a.pp - b.pp}; }
inline Sym2 operator*(double s, Sym2 m) { return {s * m.tt, s * m.tp, s * m.pp}; }

inline Vec2 mul(Sym2 m, Vec2 v) {
    return {m.tt * v.t + m.tp * v.p, m.tp * v.t + m.pp * v.p};
}

/// Symmetric congruence product s m s for symmetric s, m (result is symmetric).
inline Sym2 congruence(Sym2 s, Sym2 m) {
    // w = m s
    const double w00 = m.tt * s.tt + m.tp * s.tp;
    const double w01 = m.tt * s.tp + m.tp * s.pp;
    const double w10 = m.tp * s.tt + m.pp * s.tp;
    const double w11 = m.tp * s.tp + m.pp * s.pp;
    // s w
    return {s.tt * w00 + s.tp * w10,
            s.tt * w01 + s.tp * w11,
            s.tp * w01 + s.pp * w11};
}

/// Eigenvalues of a symmetric 2x2 matrix in ascending order (closed form).
inline std::pair<double, double> eigenvalues(Sym2 m) {
    const double half_diff = 0.5 * (m.tt - m.pp);
    const double mean = 0.5 * (m.tt + m.pp);
    const double d = std::sqrt(half_diff * half_diff + m.tp * m.tp);
    return {mean - d, mean + d};
}

/// Largest absolute eigenvalue (spectral radius for symmetric matrices).
inline double spectral_radius(Sym2 m) {
    const auto [lo, hi] = eigenvalues(m);
    return std::max(std::abs(lo), std::abs(hi));
}

/// Unit eigenvector for the given eigenvalue of m; valid for either root of
/// the 2x2 characteristic polynomial, with a stable fallback when m is
/// (numerically) a multiple of the identity.
inline Vec2 eigenvector(Sym2 m, double lambda) {
    const Vec2 r0{m.tt - lambda, m.tp};
    const Vec2 r1{m.tp, m.pp - lambda};
    // the eigenvector is orthogonal to the larger residual row
    const Vec2 r = (r0.norm2() >= r1.norm2()) ? r0 : r1;
    const double n = r.norm();
    if (n == 0.0) return {1.0, 0.0};
    return {-r.p / n, r.t / n};
}

}  // namespace starflow

#endif
