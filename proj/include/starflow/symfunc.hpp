#ifndef STARFLOW_SYMFUNC_HPP
#define STARFLOW_SYMFUNC_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "starflow/mat2.hpp"

namespace starflow {

using KappaPair = std::pair<double, double>;

/// A symmetric curvature function of the two principal curvatures, together
/// with its admissibility cone. SigmaK(k) is the k-th elementary symmetric
/// function normalized so F(1,1) = 1, on the Garding cone of order k;
/// InvSigmaK(k) is the matching inverse family on the positive cone. An
/// exponent alpha != 1 raises the base family to that power (degree alpha*k,
/// same cone, same structure properties).
struct CurvatureSpec {
    enum class Family : std::uint8_t { SigmaK, InvSigmaK };

    Family family = Family::SigmaK;
    int k = 1;           // order of the symmetric function, 1 <= k <= n
    double alpha = 1.0;  // power-scaling exponent, > 0

    static constexpr int n = 2;  // eigenvalue count (surfaces in R^3)

    /// Homogeneity degree: alpha * k.
    double degree() const { return alpha * k; }

    std::string name() const;
};

CurvatureSpec sigma_k(int k, double alpha = 1.0);
CurvatureSpec inv_sigma_k(int k, double alpha = 1.0);

/// True iff kappa lies in the open admissibility cone of the spec.
bool in_cone(const CurvatureSpec& spec, KappaPair kappa);

/// F(kappa). Throws ConeError (node index 0) if kappa is outside the cone.
double eval_F(const CurvatureSpec& spec, KappaPair kappa);

/// Componentwise-positive gradient (dF/dk1, dF/dk2); Euler identity
/// kappa . grad = degree * F holds.
KappaPair grad_F(const CurvatureSpec& spec, KappaPair kappa);

/// Derivative matrix dF/da of F seen as a function of a symmetric 2x2 matrix,
/// evaluated at a: shares eigenvectors with a, with eigenvalues dF/dkappa_i.
Sym2 grad_F_matrix(const CurvatureSpec& spec, Sym2 a);

/// Sampled verification of the structure conditions: gradient positivity,
/// homogeneity, log-concavity and normalization.
struct StructureReport {
    double min_gradient = 0.0;        // min component of grad F over samples
    double max_homogeneity_defect = 0.0;  // relative, at t in {0.5, 2}
    double max_log_hessian_eigenvalue = 0.0;
    double normalization_defect = 0.0;    // |F(1,1) - 1|
    int samples = 0;

    static constexpr double log_hessian_tol = 1e-6;

    bool pass() const {
        return min_gradient > 0.0 && max_homogeneity_defect <= 1e-10 &&
               max_log_hessian_eigenvalue <= log_hessian_tol &&
               normalization_defect <= 1e-12;
    }
};

StructureReport check_structure(const CurvatureSpec& spec, int sample_count,
                                std::uint64_t seed);

/// Rejection-sample a point of the spec's cone from the box [-2,2]^2,
/// rescaled to unit Euclidean norm. Deterministic for a given rng state.
class Rng;
KappaPair sample_cone(const CurvatureSpec& spec, Rng& rng);

}  // namespace starflow

#endif
