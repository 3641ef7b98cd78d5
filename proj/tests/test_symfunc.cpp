#include <doctest.h>

#include <cmath>

#include "starflow/errors.hpp"
#include "starflow/rng.hpp"
#include "starflow/symfunc.hpp"

using namespace starflow;

TEST_SUITE("symfunc") {

TEST_CASE("normalization F(1,1) = 1 for every family") {
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), inv_sigma_k(2),
                             sigma_k(1, 2.0), sigma_k(2, 0.5), inv_sigma_k(1, 3.0)}) {
        CHECK(eval_F(spec, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("closed-form values") {
    CHECK(eval_F(sigma_k(1), {2.0, 4.0}) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(eval_F(sigma_k(2), {2.0, 3.0}) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(eval_F(inv_sigma_k(1), {1.0, 2.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gradients") {
    const auto g1 = grad_F(sigma_k(1), {0.3, 5.0});
    CHECK(g1.first == 0.5);
    CHECK(g1.second == 0.5);
    const auto g2 = grad_F(sigma_k(2), {2.0, 3.0});
    CHECK(g2.first == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(g2.second == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("symmetry is exact") {
    Rng rng(7);
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), sigma_k(2, 1.7)}) {
        for (int s = 0; s < 200; ++s) {
            const auto k = sample_cone(spec, rng);
            CHECK(eval_F(spec, k) == eval_F(spec, {k.second, k.first}));
        }
    }
}

TEST_CASE("cone membership") {
    CHECK(in_cone(sigma_k(1), {1.0, 1.0}));
    CHECK(in_cone(sigma_k(2), {1.0, 1.0}));
    CHECK(in_cone(inv_sigma_k(1), {1.0, 1.0}));
    // (-0.5, 1): positive sum but negative product
    CHECK(in_cone(sigma_k(1), {-0.5, 1.0}));
    CHECK_FALSE(in_cone(sigma_k(2), {-0.5, 1.0}));
    CHECK_FALSE(in_cone(inv_sigma_k(1), {-0.5, 1.0}));
    // boundary of the order-2 cone
    CHECK_FALSE(in_cone(sigma_k(2), {0.0, 1.0}));
}

TEST_CASE("cone violation raises with the offending pair") {
    CHECK_THROWS_AS(eval_F(sigma_k(2), {-1.0, 2.0}), ConeError);
    CHECK_THROWS_AS(grad_F(inv_sigma_k(1), {-1.0, 2.0}), ConeError);
    try {
        eval_F(sigma_k(2), {-1.0, 2.0});
    } catch (const ConeError& e) {
        CHECK(e.kappa1 == -1.0);
        CHECK(e.kappa2 == 2.0);
    }
}

TEST_CASE("Euler identity kappa . grad F = degree * F") {
    Rng rng(11);
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), sigma_k(1, 2.0),
                             inv_sigma_k(1, 0.5)}) {
        for (int s = 0; s < 200; ++s) {
            const auto k = sample_cone(spec, rng);
            const auto g = grad_F(spec, k);
            const double lhs = k.first * g.first + k.second * g.second;
            const double rhs = spec.degree() * eval_F(spec, k);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
        }
    }
}

TEST_CASE("homogeneity over t in [0.25, 4]") {
    Rng rng(13);
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), sigma_k(2, 1.5)}) {
        for (int s = 0; s < 1000; ++s) {
            const auto k = sample_cone(spec, rng);
            const double F = eval_F(spec, k);
            for (const double t : {0.25, 0.7, 1.9, 4.0}) {
                const double expected = std::pow(t, spec.degree()) * F;
                const double got = eval_F(spec, {t * k.first, t * k.second});
                CHECK(std::abs(got - expected) <= 1e-10 * std::abs(expected));
            }
        }
    }
}

TEST_CASE("gradient positivity at cone samples") {
    Rng rng(17);
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1)}) {
        for (int s = 0; s < 1000; ++s) {
            const auto g = grad_F(spec, sample_cone(spec, rng));
            CHECK(g.first > 0.0);
            CHECK(g.second > 0.0);
        }
    }
}

TEST_CASE("sigma_2 degenerates toward the cone boundary") {
    // approach (0, 1) along a ray inside the cone; F decreases monotonically to 0
    double prev = eval_F(sigma_k(2), {1.0, 1.0});
    for (int s = 1; s <= 12; ++s) {
        const double k1 = std::pow(0.5, s);
        const double F = eval_F(sigma_k(2), {k1, 1.0});
        CHECK(F < prev);
        prev = F;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("grad_F matches central differences of eval_F") {
    Rng rng(19);
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), sigma_k(1, 2.0)}) {
        for (int s = 0; s < 100; ++s) {
            const auto k = sample_cone(spec, rng);
            const auto g = grad_F(spec, k);
            const double h = 1e-6;
            const double scale = std::max(std::abs(g.first), std::abs(g.second));
            const double fd1 = (eval_F(spec, {k.first + h, k.second}) -
                                eval_F(spec, {k.first - h, k.second})) /
                               (2.0 * h);
            const double fd2 = (eval_F(spec, {k.first, k.second + h}) -
                                eval_F(spec, {k.first, k.second - h})) /
                               (2.0 * h);
            CHECK(std::abs(g.first - fd1) <= 1e-6 * scale);
            CHECK(std::abs(g.second - fd2) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("grad_F_matrix shares eigenvectors with its argument") {
    const Sym2 a{2.0, 0.7, 1.1};
    const auto spec = sigma_k(2);
    const Sym2 fp = grad_F_matrix(spec, a);
    // for sigma_2 (= det for n = 2) the derivative is the adjugate
    CHECK(fp.tt == doctest::Approx(a.pp).epsilon(1e-12));
    CHECK(fp.pp == doctest::Approx(a.tt).epsilon(1e-12));
    CHECK(fp.tp == doctest::Approx(-a.tp).epsilon(1e-12));
    // multiples of the identity have isotropic derivative
    const Sym2 fi = grad_F_matrix(sigma_k(1), {3.0, 0.0, 3.0});
    CHECK(fi.tt == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(fi.tp == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("structure checker passes the four acceptance families") {
    for (const auto& spec : {sigma_k(1), sigma_k(2), inv_sigma_k(1), sigma_k(1, 2.0)}) {
        const auto report = check_structure(spec, 1000, 42);
        INFO(spec.name());
        CHECK(report.pass());
        CHECK(report.min_gradient > 0.0);
        CHECK(report.max_homogeneity_defect <= 1e-10);
        CHECK(report.max_log_hessian_eigenvalue <= 1e-6);
        CHECK(report.normalization_defect <= 1e-12);
    }
}

TEST_CASE("power scaling keeps the structure conditions with degree alpha k") {
    const auto spec = sigma_k(1, 2.0);
    CHECK(spec.degree() == 2.0);
    const auto report = check_structure(spec, 1000, 4242);
    CHECK(report.pass());
}

TEST_CASE("structure checker is deterministic in the seed") {
    const auto a = check_structure(sigma_k(2), 500, 123);
    const auto b = check_structure(sigma_k(2), 500, 123);
    CHECK(a.min_gradient == b.min_gradient);
    CHECK(a.max_log_hessian_eigenvalue == b.max_log_hessian_eigenvalue);
    CHECK(a.max_homogeneity_defect == b.max_homogeneity_defect);
}

TEST_CASE("sample count below 100 is rejected") {
    CHECK_THROWS_AS(check_structure(sigma_k(1), 50, 1), DomainError);
}

}  // TEST_SUITE
