#include "starflow/prescribed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "starflow/errors.hpp"

namespace starflow {

namespace {

void check_rho(double rho) {
    if (!(rho > 0.0)) {
        throw DomainError("prescribed: rho must be positive, got " + std::to_string(rho));
    }
}

// rho^p with a multiply chain for small integer exponents (the hot path of
// the flow evaluates f once per node per stage)
double pow_rho(double rho, double p) {
    const int ip = static_cast<int>(p);
    if (static_cast<double>(ip) == p && ip >= -4 && ip <= 4) {
        double r = 1.0;
        for (int i = 0; i < (ip < 0 ? -ip : ip); ++i) r *= rho;
        return ip < 0 ? 1.0 / r : r;
    }
    return std::pow(rho, p);
}

double lattice_rho(double lo, double hi, int samples, int s) {
    if (samples <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(samples - 1);
}

}  // namespace

double PrescribedSpec::angular(Vec3 x) const {
    if (table) {
        const double theta = std::acos(std::clamp(x.z, -1.0, 1.0));
        const double phi = std::atan2(x.y, x.x);
        return interpolate(*table_grid, *table, theta, phi);
    }
    return dot(harmonic, x);
}

double eval_f(const PrescribedSpec& spec, double rho, Vec3 x) {
    check_rho(rho);
    return pow_rho(rho, spec.p) * spec.angular_factor(x);
}

double d_rho_f(const PrescribedSpec& spec, double rho, Vec3 x) {
    check_rho(rho);
    return spec.p * pow_rho(rho, spec.p - 1.0) * spec.angular_factor(x);
}

double eval_f_ambient(const PrescribedSpec& spec, Vec3 X) {
    const double rho = X.norm();
    check_rho(rho);
    return eval_f(spec, rho, (1.0 / rho) * X);
}

double check_monotonicity(const PrescribedSpec& spec, double k,
                          double rho_lo, double rho_hi,
                          const SphereGrid& grid, int rho_samples) {
    check_rho(rho_lo);
    double min_mono = std::numeric_limits<double>::infinity();
    for (int s = 0; s < rho_samples; ++s) {
        const double rho = lattice_rho(rho_lo, rho_hi, rho_samples, s);
        const double radial = (spec.p - k) * std::pow(rho, spec.p - k - 1.0);
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            min_mono = std::min(min_mono, radial * spec.angular_factor(grid.unit_vector(i)));
        }
    }
    return min_mono;
}

BarrierCheck verify_barriers(const PrescribedSpec& spec, double k, double r1, double r2,
                             const SphereGrid& grid) {
    if (!(0.0 < r1 && r1 <= r2)) {
        throw DomainError("verify_barriers: need 0 < r1 <= r2");
    }
    double max_f_inner = -std::numeric_limits<double>::infinity();
    double min_f_outer = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const Vec3 x = grid.unit_vector(i);
        max_f_inner = std::max(max_f_inner, eval_f(spec, r1, x));
        min_f_outer = std::min(min_f_outer, eval_f(spec, r2, x));
    }
    BarrierCheck out;
    out.inner_margin = std::pow(r1, k) - max_f_inner;
    out.outer_margin = min_f_outer - std::pow(r2, k);
    out.pass = out.inner_margin >= -1e-12 && out.outer_margin >= -1e-12;
    return out;
}

namespace {

// min over the (rho, node) lattice of rho * d_rho f - k f = (p-k) rho^p (1 + eps Y)
double scan_delta0(const PrescribedSpec& spec, double k, double R1, double R2,
                   const SphereGrid& grid, int rho_samples) {
    double lo = std::numeric_limits<double>::infinity();
    for (int s = 0; s < rho_samples; ++s) {
        const double rho = lattice_rho(R1, R2, rho_samples, s);
        const double radial = (spec.p - k) * std::pow(rho, spec.p);
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            lo = std::min(lo, radial * spec.angular_factor(grid.unit_vector(i)));
        }
    }
    return lo;
}

}  // namespace

double delta0(const PrescribedSpec& spec, double k, double R1, double R2,
              const SphereGrid& grid, int rho_samples) {
    check_rho(R1);
    const double d0 = scan_delta0(spec, k, R1, R2, grid, rho_samples);
    if (!(d0 > 0.0)) {
        throw DomainError("delta0: rho d_rho f - k f is not positive on the annulus "
                          "(got " + std::to_string(d0) + ")");
    }
    return d0;
}

FNorms norms(const PrescribedSpec& spec, double R1, double R2, const SphereGrid& grid,
             int rho_samples) {
    check_rho(R1);
    const double step = 1e-4 * R1;
    const Vec3 e[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    FNorms out;
    double max_f = 0.0, max_grad = 0.0, max_hess = 0.0;
    for (int s = 0; s < rho_samples; ++s) {
        const double rho = lattice_rho(R1, R2, rho_samples, s);
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            const Vec3 X = rho * grid.unit_vector(i);
            const double f0 = eval_f_ambient(spec, X);
            max_f = std::max(max_f, std::abs(f0));

            double fp[3], fm[3];
            double grad2 = 0.0;
            for (int a = 0; a < 3; ++a) {
                fp[a] = eval_f_ambient(spec, X + step * e[a]);
                fm[a] = eval_f_ambient(spec, X - step * e[a]);
                const double da = (fp[a] - fm[a]) / (2.0 * step);
                grad2 += da * da;
            }
            max_grad = std::max(max_grad, std::sqrt(grad2));

            double frob2 = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double haa = (fp[a] - 2.0 * f0 + fm[a]) / (step * step);
                frob2 += haa * haa;
                for (int b = a + 1; b < 3; ++b) {
                    const double hab =
                        (eval_f_ambient(spec, X + step * e[a] + step * e[b]) -
                         eval_f_ambient(spec, X + step * e[a] - step * e[b]) -
                         eval_f_ambient(spec, X - step * e[a] + step * e[b]) +
                         eval_f_ambient(spec, X - step * e[a] - step * e[b])) /
                        (4.0 * step * step);
                    frob2 += 2.0 * hab * hab;
                }
            }
            max_hess = std::max(max_hess, std::sqrt(frob2));
        }
    }
    out.c0_grad = max_grad;
    out.c2_norm = std::max({max_f, max_grad, max_hess});
    return out;
}

AdmissibilityReport admissibility_report(const PrescribedSpec& spec, double k,
                                         double r1, double r2, const SphereGrid& grid) {
    AdmissibilityReport report;
    report.r1 = r1;
    report.r2 = r2;
    report.min_mono = check_monotonicity(spec, k, r1, r2, grid);
    report.barriers = verify_barriers(spec, k, r1, r2, grid);
    report.delta0 = scan_delta0(spec, k, r1, r2, grid, 32);
    const FNorms fn = norms(spec, r1, r2, grid);
    report.c0_grad = fn.c0_grad;
    report.c2_norm = fn.c2_norm;
    return report;
}

}  // namespace starflow
