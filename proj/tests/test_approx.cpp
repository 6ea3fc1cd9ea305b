#include <doctest.h>

#include <cmath>
#include <vector>

#include "levysim/approx.hpp"
#include "levysim/errors.hpp"
#include "test_util.hpp"

using namespace levysim;
using testutil::cgmy_quadrature_only;
using testutil::dataset1;
using testutil::dataset2;
using testutil::uniform_unit_measure;

TEST_SUITE_BEGIN("approx_optimizer");

TEST_CASE("solve_epsilon inverts simple intensity laws") {
    CHECK(solve_epsilon([](double e) { return 1.0 / e; }, 4.0) ==
          doctest::Approx(0.25).epsilon(1e-8));
    CHECK(solve_epsilon([](double e) { return 2.0 - 2.0 * e; }, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("solve_epsilon residual on the quadrature path") {
    // Frozen from the 40-digit oracle: eps solving nu(|y| > eps) = 8 for
    // data set II.
    const auto m = cgmy_quadrature_only(dataset2());
    const double lambda = 8.0;
    const double eps = solve_epsilon([&](double e) { return tail_mass(m, e); }, lambda);
    CHECK(eps == doctest::Approx(0.052992561619207779).epsilon(1e-6));
    CHECK(std::abs(tail_mass(m, eps) - lambda) <= 1e-8 * lambda);
}

TEST_CASE("solve_epsilon rejects unreachable intensities") {
    // Uniform density has total mass 2; lambda = 3 exceeds the supremum.
    const auto m = uniform_unit_measure();
    CHECK_THROWS_AS(build_oa2(m, 3.0), InfeasibleIntensityError);
}

TEST_CASE("OA2 on closed-form test measures") {
    const auto uniform = uniform_unit_measure();
    const auto a = build_oa2(uniform, 1.0);
    CHECK(a.cutoff == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(a.atoms.empty());
    CHECK(a.lambda_total == 1.0);

    // Tail integral exactly 1/x.
    LevyMeasureSpec reciprocal;
    reciprocal.density = [](double y) { return 0.5 / (y * y); };
    reciprocal.support_lo = -1e12;
    reciprocal.support_hi = 1e12;
    reciprocal.tail_hook = [](double c) { return 1.0 / c; };
    const auto b = build_oa2(reciprocal, 4.0);
    CHECK(b.cutoff == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("OA2 on data set I at lambda 2") {
    const auto m = cgmy_measure(dataset1());
    const auto a = build_oa2(m, 2.0);
    CHECK(a.cutoff == doctest::Approx(0.1070877306773987).epsilon(1e-6));
    CHECK(std::abs(tail_mass(m, a.cutoff) - 2.0) <= 2e-8 * 2.0);
}

TEST_CASE("OA3 on the uniform density, lambda 1") {
    // F(eps) = 2 - 11 eps / 6, so eps = 6/11 and each atom carries eps/12.
    const auto m = uniform_unit_measure();
    const auto a = build_oa3(m, 1.0);
    const double eps = 6.0 / 11.0;
    CHECK(a.epsilon == doctest::Approx(eps).epsilon(1e-8));
    REQUIRE(a.atoms.size() == 2);
    CHECK(a.atoms[0].location == doctest::Approx(-2.0 * eps).epsilon(1e-8));
    CHECK(a.atoms[1].location == doctest::Approx(2.0 * eps).epsilon(1e-8));
    CHECK(a.atoms[0].mass == doctest::Approx(eps / 12.0).epsilon(1e-7));
    CHECK(a.atoms[1].mass == doctest::Approx(eps / 12.0).epsilon(1e-7));
    // symmetric split leaves the atoms' first moment at zero
    CHECK(a.atom_moment(1) == doctest::Approx(0.0).epsilon(1e-12));
    // intensity and second moment both conserved
    CHECK(tail_mass(m, a.cutoff) + a.atom_mass() == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(moment_mismatch(m, a, 2) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("OA3 conserves the second moment of CGMY") {
    const auto m = cgmy_measure(dataset1());
    const auto a = build_oa3(m, 4.0);
    const double m2 = partial_moment(m, 2, Region::outside, 0.0, MomentMode::signed_moment);
    CHECK(std::abs(moment_mismatch(m, a, 2)) <= 1e-7 * m2);
}

TEST_CASE("OA3 third-moment split") {
    const auto m = cgmy_measure(dataset1());
    const auto plain = build_oa3(m, 4.0, false);
    const auto matched = build_oa3(m, 4.0, true);
    const double abs3 =
        partial_moment(m, 3, Region::inside, plain.cutoff, MomentMode::absolute_moment);
    CHECK(std::abs(moment_mismatch(m, matched, 3)) <= 1e-7 * abs3);
    CHECK(std::abs(moment_mismatch(m, plain, 3)) > 1e-4 * abs3);  // asymmetric tails
    for (const auto& atom : matched.atoms) CHECK(atom.mass >= 0.0);
    CHECK(matched.atom_mass() == doctest::Approx(plain.atom_mass()).epsilon(1e-12));
}

TEST_CASE("OA4 on the uniform density, lambda 1") {
    // Closed form: eps = 1/(2c - 2c^3/3), alpha1 = alpha2 = (c^3/3) eps,
    // with c = sqrt(sqrt(2) - 1).
    const auto m = uniform_unit_measure();
    const auto a = build_oa4(m, 1.0);
    const double c = oa4_cutoff_factor();
    const double eps = 1.0 / (2.0 * c - 2.0 * c * c * c / 3.0);
    const double mass = (c * c * c / 3.0) * eps;
    CHECK(a.epsilon == doctest::Approx(eps).epsilon(1e-8));
    CHECK(a.cutoff == doctest::Approx(c * eps).epsilon(1e-8));
    REQUIRE(a.atoms.size() == 2);
    CHECK(a.atoms[0].mass == doctest::Approx(mass).epsilon(1e-7));
    CHECK(a.atoms[1].mass == doctest::Approx(mass).epsilon(1e-7));
    CHECK(a.atoms[0].mass == doctest::Approx(a.atoms[1].mass).epsilon(1e-12));

    const double j_expected =
        std::pow(eps, 5) * (2.0 * std::pow(c, 5) / 5.0 + 2.0 * std::pow(c, 3) / 3.0);
    CHECK(error_functional(m, a) == doctest::Approx(j_expected).epsilon(1e-8));
}

TEST_CASE("OA4 matches second and third moments of CGMY") {
    const auto m = cgmy_measure(dataset2());
    const auto a = build_oa4(m, 8.0);
    CHECK(a.epsilon == doctest::Approx(0.14674023175476139).epsilon(1e-6));
    const double m2 = partial_moment(m, 2, Region::outside, 0.0, MomentMode::signed_moment);
    const double abs3 = partial_moment(m, 3, Region::outside, 0.0, MomentMode::absolute_moment);
    CHECK(std::abs(moment_mismatch(m, a, 2)) <= 1e-7 * m2);
    CHECK(std::abs(moment_mismatch(m, a, 3)) <= 1e-7 * abs3);
    for (const auto& atom : a.atoms) CHECK(atom.mass >= 0.0);
}

TEST_CASE("intensity conservation across builders and intensities") {
    for (const auto& params : {dataset1(), dataset2()}) {
        const auto m = cgmy_measure(params);
        for (int order : {2, 3, 4}) {
            for (double lambda : {0.5, 2.0, 7.3, 19.0}) {
                const auto a = build_approx(m, order, lambda);
                const double recomputed = tail_mass(m, a.cutoff) + a.atom_mass();
                CHECK(std::abs(recomputed - lambda) <= 1e-7 * lambda);
                for (const auto& atom : a.atoms) CHECK(atom.mass >= 0.0);
            }
        }
    }
}

TEST_CASE("error functional closed forms") {
    const auto m = uniform_unit_measure();
    const auto oa2 = build_oa2(m, 1.0);
    CHECK(error_functional(m, oa2) == doctest::Approx(1.0 / 12.0).epsilon(1e-8));
    CHECK(moment_mismatch(m, oa2, 2) == doctest::Approx(1.0 / 12.0).epsilon(1e-8));

    // J(OA3) = int_{|y|<eps} |y|^3 nu + 2 eps int_{|y|<eps} y^2 nu
    const auto oa3 = build_oa3(m, 1.0);
    const double direct =
        partial_moment(m, 3, Region::inside, oa3.cutoff, MomentMode::absolute_moment) +
        2.0 * oa3.epsilon *
            partial_moment(m, 2, Region::inside, oa3.cutoff, MomentMode::signed_moment);
    CHECK(error_functional(m, oa3) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("error functional agrees with a brute-force Riemann sum") {
    // Independent route: |nu - nu_bar| = nu on [-cutoff, cutoff] plus atoms.
    const auto m = uniform_unit_measure();
    for (int order : {2, 3, 4}) {
        const auto a = build_approx(m, order, 1.0);
        const long cells = 200000;
        const double h = 2.0 * a.cutoff / cells;
        double riemann = 0.0;
        for (long i = 0; i < cells; ++i) {
            const double y = -a.cutoff + (i + 0.5) * h;
            riemann += std::pow(std::abs(y), a.order) * 1.0 * h;
        }
        riemann += a.atom_moment(a.order, true);
        CHECK(error_functional(m, a) == doctest::Approx(riemann).epsilon(1e-5));
    }
}

TEST_CASE("OA4 optimality region identity") {
    // With P(y) = (y-eps)^2 (y+eps)^2, {2y^4 - P > 0} = {|y| > eps*sqrt(sqrt2-1)}.
    const double eps = 0.7;
    const double edge = eps * oa4_cutoff_factor();
    for (int i = 0; i < 10000; ++i) {
        const double y = -2.0 * eps + 4.0 * eps * (i + 0.5) / 10000.0;
        const double p = (y - eps) * (y - eps) * (y + eps) * (y + eps);
        const double g = 2.0 * std::pow(y, 4) - p;
        if (std::abs(std::abs(y) - edge) < 1e-9) continue;
        CHECK((g > 0.0) == (std::abs(y) > edge));
    }
}

TEST_CASE("builders reject unsupported orders") {
    const auto m = uniform_unit_measure();
    CHECK_THROWS_AS(build_approx(m, 5, 1.0), UnsupportedOrderError);
    CHECK_THROWS_AS(build_approx(m, 6, 1.0), UnsupportedOrderError);
}

TEST_CASE("minimal intensity table") {
    MomentVector mv;
    mv.m = {0.0, 0.0, 2.0, 0.0, 2.0};
    CHECK(minimal_intensity(mv, 2) == 0.0);
    CHECK(minimal_intensity(mv, 3) == 0.0);
    CHECK(minimal_intensity(mv, 4) == doctest::Approx(2.0));
    mv.m = {0.0, 0.0, 1.0, 0.0, 3.0};
    CHECK(minimal_intensity(mv, 5) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(minimal_intensity(mv, 6), UnsupportedOrderError);
    mv.m = {0.0, 0.0, -1.0, 0.0, 3.0};
    CHECK_THROWS_AS(minimal_intensity(mv, 4), InvalidMomentsError);
}

TEST_CASE("minimal intensity attained by two symmetric atoms") {
    // delta_{-1} + delta_{+1}: m0 = 2 = m2^2/m4.
    MomentVector mv;
    mv.m = {2.0, 0.0, 2.0, 0.0, 2.0};
    CHECK(minimal_intensity(mv, 4) == doctest::Approx(2.0));
    CHECK(hankel_feasible(mv, 2));
}

TEST_CASE("hankel feasibility boundary") {
    MomentVector mv;
    mv.m = {2.0 - 0.01, 0.0, 2.0, 0.0, 2.0};
    CHECK_FALSE(hankel_feasible(mv, 2));
    mv.m = {0.0, 0.0, 2.0, 0.0, 2.0};
    CHECK_FALSE(hankel_feasible(mv, 2));
    mv.m = {2.0 + 1e-6, 0.0, 2.0, 0.0, 2.0};
    CHECK(hankel_feasible(mv, 2));
    // m3 shifts the optimal m1 but not the minimum mass
    mv.m = {1.3, 0.0, 1.0, 0.4, 1.0};
    CHECK(hankel_feasible(mv, 2));
    mv.m = {0.97, 0.0, 1.0, 0.4, 1.0};
    CHECK_FALSE(hankel_feasible(mv, 2));
}

TEST_CASE("hankel feasibility validates the inner block") {
    MomentVector mv;
    mv.m = {1.0, 0.0, 1.0, 5.0, 1.0};  // inner [[1,5],[5,1]] is indefinite
    CHECK_THROWS_AS(hankel_feasible(mv, 2), InvalidMomentsError);
}

TEST_CASE("rate curve refines monotonically") {
    const auto m = cgmy_measure(dataset1());
    const auto curve = rate_curve(m, 3, {2.0, 4.0, 8.0, 16.0});
    REQUIRE(curve.points.size() == 4);
    for (size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].j < curve.points[i - 1].j);
        CHECK(curve.points[i].epsilon < curve.points[i - 1].epsilon);
    }
    CHECK(curve.slope < 0.0);
}

TEST_SUITE_END();
