#include "starflow/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "starflow/errors.hpp"
#include "starflow/rng.hpp"

namespace starflow {

namespace {

constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

[[noreturn]] void throw_cone(const CurvatureSpec& spec, KappaPair kappa) {
    throw ConeError(kNoNode, kappa.first, kappa.second,
                    "curvature pair (" + std::to_string(kappa.first) + ", " +
                        std::to_string(kappa.second) + ") outside admissibility cone of " +
                        spec.name());
}

// Base family value (alpha = 1).
double base_eval(const CurvatureSpec& spec, KappaPair k) {
    if (spec.family == CurvatureSpec::Family::SigmaK) {
        return spec.k == 1 ? 0.5 * (k.first + k.second) : k.first * k.second;
    }
    // inverse family: binom(n,k) / S_k(1/kappa)
    return spec.k == 1 ? 2.0 * (k.first * k.second) / (k.first + k.second)
                       : k.first * k.second;
}

KappaPair base_grad(const CurvatureSpec& spec, KappaPair k) {
    if (spec.family == CurvatureSpec::Family::SigmaK) {
        return spec.k == 1 ? KappaPair{0.5, 0.5} : KappaPair{k.second, k.first};
    }
    if (spec.k == 1) {
        const double s = k.first + k.second;
        return {2.0 * k.second * k.second / (s * s), 2.0 * k.first * k.first / (s * s)};
    }
    return {k.second, k.first};
}

void validate(const CurvatureSpec& spec) {
    if (spec.k < 1 || spec.k > CurvatureSpec::n) {
        throw DomainError("curvature spec: k must be 1 or 2, got " + std::to_string(spec.k));
    }
    if (!(spec.alpha > 0.0)) {
        throw DomainError("curvature spec: alpha must be positive");
    }
}

}  // namespace

std::string CurvatureSpec::name() const {
    std::string base = (family == Family::SigmaK) ? "sigma_" : "inv_sigma_";
    base += std::to_string(k);
    if (alpha != 1.0) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "^%g", alpha);
        base += buf;
    }
    return base;
}

CurvatureSpec sigma_k(int k, double alpha) {
    CurvatureSpec spec{CurvatureSpec::Family::SigmaK, k, alpha};
    validate(spec);
    return spec;
}

CurvatureSpec inv_sigma_k(int k, double alpha) {
    CurvatureSpec spec{CurvatureSpec::Family::InvSigmaK, k, alpha};
    validate(spec);
    return spec;
}

bool in_cone(const CurvatureSpec& spec, KappaPair kappa) {
    if (spec.family == CurvatureSpec::Family::InvSigmaK) {
        return kappa.first > 0.0 && kappa.second > 0.0;
    }
    const double s1 = kappa.first + kappa.second;
    if (spec.k == 1) return s1 > 0.0;
    return s1 > 0.0 && kappa.first * kappa.second > 0.0;
}

double eval_F(const CurvatureSpec& spec, KappaPair kappa) {
    if (!in_cone(spec, kappa)) throw_cone(spec, kappa);
    const double base = base_eval(spec, kappa);
    return spec.alpha == 1.0 ? base : std::pow(base, spec.alpha);
}

KappaPair grad_F(const CurvatureSpec& spec, KappaPair kappa) {
    if (!in_cone(spec, kappa)) throw_cone(spec, kappa);
    const KappaPair gb = base_grad(spec, kappa);
    if (spec.alpha == 1.0) return gb;
    const double scale = spec.alpha * std::pow(base_eval(spec, kappa), spec.alpha - 1.0);
    return {scale * gb.first, scale * gb.second};
}

Sym2 grad_F_matrix(const CurvatureSpec& spec, Sym2 a) {
    const auto [l1, l2] = eigenvalues(a);
    const auto [g1, g2] = grad_F(spec, {l1, l2});
    const Vec2 v1 = eigenvector(a, l1);
    const Vec2 v2{-v1.p, v1.t};
    return g1 * Sym2::outer(v1) + g2 * Sym2::outer(v2);
}

KappaPair sample_cone(const CurvatureSpec& spec, Rng& rng) {
    for (;;) {
        KappaPair k{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        if (!in_cone(spec, k)) continue;
        const double norm = std::hypot(k.first, k.second);
        if (norm < 1e-8) continue;
        return {k.first / norm, k.second / norm};
    }
}

StructureReport check_structure(const CurvatureSpec& spec, int sample_count,
                                std::uint64_t seed) {
    if (sample_count < 100) {
        throw DomainError("check_structure: sample_count must be >= 100");
    }

    Rng rng(seed);
    StructureReport report;
    report.samples = sample_count;
    report.min_gradient = std::numeric_limits<double>::infinity();
    report.max_log_hessian_eigenvalue = -std::numeric_limits<double>::infinity();
    report.normalization_defect = std::abs(eval_F(spec, {1.0, 1.0}) - 1.0);
    const double degree = spec.degree();

    // gradient of log F, used to form the log-Hessian by central differences
    const auto grad_log = [&](KappaPair k) -> KappaPair {
        const auto g = grad_F(spec, k);
        const double f = eval_F(spec, k);
        return {g.first / f, g.second / f};
    };

    for (int s = 0; s < sample_count; ++s) {
        const KappaPair k = sample_cone(spec, rng);

        const auto g = grad_F(spec, k);
        report.min_gradient = std::min({report.min_gradient, g.first, g.second});

        const double f = eval_F(spec, k);
        for (const double t : {0.5, 2.0}) {
            const double expected = std::pow(t, degree) * f;
            const double defect =
                std::abs(eval_F(spec, {t * k.first, t * k.second}) - expected);
            report.max_homogeneity_defect =
                std::max(report.max_homogeneity_defect, defect / std::abs(expected));
        }

        // central differences of the analytic log-gradient, relative step 1e-5
        const double h1 = 1e-5 * std::max(1.0, std::abs(k.first));
        const double h2 = 1e-5 * std::max(1.0, std::abs(k.second));
        const KappaPair k1p{k.first + h1, k.second}, k1m{k.first - h1, k.second};
        const KappaPair k2p{k.first, k.second + h2}, k2m{k.first, k.second - h2};
        if (!in_cone(spec, k1p) || !in_cone(spec, k1m) || !in_cone(spec, k2p) ||
            !in_cone(spec, k2m)) {
            continue;  // too close to the cone boundary for the stencil
        }
        const KappaPair gl1p = grad_log(k1p), gl1m = grad_log(k1m);
        const KappaPair gl2p = grad_log(k2p), gl2m = grad_log(k2m);
        Sym2 hess;
        hess.tt = (gl1p.first - gl1m.first) / (2.0 * h1);
        hess.pp = (gl2p.second - gl2m.second) / (2.0 * h2);
        hess.tp = 0.5 * ((gl2p.first - gl2m.first) / (2.0 * h2) +
                         (gl1p.second - gl1m.second) / (2.0 * h1));
        report.max_log_hessian_eigenvalue =
            std::max(report.max_log_hessian_eigenvalue, eigenvalues(hess).second);
    }
    return report;
}

}  // namespace starflow
