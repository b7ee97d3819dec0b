#include <cmath>
#include <numbers>
#include <random>
#include <span>

#include <gtest/gtest.h>

#include "caflow/ellipse.hpp"
#include "caflow/geometry.hpp"
#include "oracles.hpp"

using namespace caflow;
using std::numbers::pi;

namespace {

SupportProfile perturbed(std::size_t n = 256, double amp = 0.05, int k = 4) {
    return SupportProfile::sample(n, [=](double t) { return 1.0 + amp * std::cos(k * t); });
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

LinearMap2 random_map(std::mt19937_64& rng, bool special) {
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    LinearMap2 T{1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng)};
    while (std::abs(T.det()) < 0.2) T = {1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng)};
    if (special) {
        if (T.det() < 0.0) T = {T.m12, T.m11, T.m22, T.m21};
        T = T.scaled(1.0 / std::sqrt(T.det()));
    }
    return T;
}

}  // namespace

TEST(AngularGrid, RejectsOddOrTinySizes) {
    EXPECT_THROW(AngularGrid(7), InvalidArgument);
    EXPECT_THROW(AngularGrid(6), InvalidArgument);
    EXPECT_NO_THROW(AngularGrid(8));
    EXPECT_DOUBLE_EQ(AngularGrid(8).angle(2), pi / 2.0);
}

TEST(Spectral, DerivativesMatchDirectDft) {
    std::mt19937_64 rng(3);
    const auto s = oracle::random_body(rng, 64);
    for (int order : {1, 2, 3}) {
        // The O(n^2) oracle sums carry their own roundoff, amplified by m^order.
        EXPECT_LT(max_abs_diff(spectral::derivative(s, order), oracle::dft_derivative(s, order)), 1e-9) << order;
    }
}

TEST(Spectral, CumulativeIntegralOfCosine) {
    const auto f = SupportProfile::sample(64, [](double t) { return std::cos(2.0 * t) + 0.5; });
    const auto F = spectral::cumulative_integral(f.values());
    for (std::size_t k = 0; k < 64; ++k) {
        const double t = f.grid().angle(k);
        EXPECT_NEAR(F[k], 0.5 * std::sin(2.0 * t) + 0.5 * t, 1e-13);
    }
}

TEST(RadiusOfCurvature, UnitCircleIsOne) {
    for (double r : radius_of_curvature(SupportProfile::constant(256, 1.0))) EXPECT_NEAR(r, 1.0, 1e-13);
}

TEST(RadiusOfCurvature, CosTwoThetaPerturbation) {
    const auto s = SupportProfile::sample(256, [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); });
    const auto r = radius_of_curvature(s);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(r[k], 1.0 - 0.3 * std::cos(2.0 * s.grid().angle(k)), 1e-10);
}

TEST(RadiusOfCurvature, ExactForBandLimitedProfiles) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto v = oracle::random_body(rng, 128, 0.7, 6);
        const auto r = radius_of_curvature(SupportProfile(v));
        EXPECT_LT(max_abs_diff(r, oracle::radius(v)), 1e-10);
    }
}

TEST(RadiusOfCurvature, EllipseMatchesClosedForm) {
    const auto s = EllipseSpec::make(2.0, 0.5, 0.3).profile(256);
    const auto r = radius_of_curvature(s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        EXPECT_NEAR(r[k], oracle::ellipse_radius(2.0, 0.5, 0.3, s.grid().angle(k)), 1e-8 * r[k]);
    }
}

TEST(RadiusOfCurvature, ThrowsOnConvexityLoss) {
    const auto s = SupportProfile::sample(64, [](double t) { return 1.0 + 0.6 * std::cos(2.0 * t); });
    try {
        radius_of_curvature(s);
        FAIL() << "expected NonConvex";
    } catch (const NonConvex& e) {
        EXPECT_LT(e.value(), 0.0);
        EXPECT_GE(e.index(), 0);
    }
}

TEST(Embed, CircleAndEllipsePoints) {
    const auto c = embed(SupportProfile::constant(64, 1.0));
    for (std::size_t k = 0; k < 64; ++k) {
        const double t = AngularGrid(64).angle(k);
        EXPECT_NEAR(c.points[k].x, std::cos(t), 1e-13);
        EXPECT_NEAR(c.points[k].y, std::sin(t), 1e-13);
    }
    const auto s = SupportProfile::sample(256, [](double t) {
        return std::sqrt(4.0 * std::cos(t) * std::cos(t) + 0.25 * std::sin(t) * std::sin(t));
    });
    for (const auto& p : embed(s).points) EXPECT_NEAR(p.x * p.x / 4.0 + p.y * p.y / 0.25, 1.0, 1e-8);
}

TEST(Embed, SupportIsRecovered) {
    std::mt19937_64 rng(5);
    const SupportProfile s(oracle::random_body(rng, 128));
    const auto e = embed(s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double t = s.grid().angle(k);
        EXPECT_NEAR(e.points[k].x * std::cos(t) + e.points[k].y * std::sin(t), s[k], 1e-12);
    }
}

TEST(Area, Examples) {
    EXPECT_NEAR(area(SupportProfile::constant(256, 1.0)), pi, 1e-13);
    EXPECT_NEAR(area(SupportProfile::constant(256, 1.7)), pi * 1.7 * 1.7, 1e-12);
    EXPECT_NEAR(area(EllipseSpec::make(2.0, 0.5).profile(256)), pi, 1e-10);
    std::mt19937_64 rng(9);
    const auto v = oracle::random_body(rng, 128);
    EXPECT_NEAR(area(SupportProfile(v)), oracle::area(v), 1e-12);
}

TEST(PolarArea, Examples) {
    EXPECT_NEAR(polar_area(SupportProfile::constant(256, 1.0)), pi, 1e-13);
    EXPECT_NEAR(polar_area(SupportProfile::constant(256, 2.0)), pi / 4.0, 1e-13);
    EXPECT_NEAR(polar_area(EllipseSpec::make(2.0, 0.5).profile(256)), pi, 1e-10);
    EXPECT_NEAR(polar_area(EllipseSpec::make(3.0, 0.5, 1.0).profile(256)), pi / 1.5, 1e-10);
}

TEST(PolarArea, InverseSquareScaling) {
    const auto s = perturbed();
    EXPECT_NEAR(polar_area(s.scaled(1.7)), polar_area(s) / (1.7 * 1.7), 1e-10 * polar_area(s));
}

TEST(TrigEval, Examples) {
    const auto s = SupportProfile::sample(64, [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); });
    EXPECT_NEAR(trig_eval(s, pi / 8.0), 1.0 + 0.1 * std::cos(pi / 4.0), 1e-15);
    EXPECT_DOUBLE_EQ(trig_eval(SupportProfile::constant(16, 1.0), 0.123), 1.0);
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(trig_eval(s, s.grid().angle(k)), s[k]);
}

TEST(ApplyLinearMap, IdentityAndDiagonal) {
    const auto s = perturbed(128);
    EXPECT_LT(max_abs_diff(apply_linear_map(s, LinearMap2::identity()).values(), s.values()), 1e-14);
    const auto e = apply_linear_map(SupportProfile::constant(256, 1.0), LinearMap2::diagonal(2.0, 0.5));
    for (std::size_t k = 0; k < e.size(); ++k) {
        EXPECT_NEAR(e[k], oracle::ellipse_support(2.0, 0.5, 0.0, e.grid().angle(k)), 1e-14);
    }
}

TEST(ApplyLinearMap, RejectsSingularMaps) {
    EXPECT_THROW(apply_linear_map(perturbed(64), LinearMap2::diagonal(1.0, 1e-13)), Singular);
}

TEST(ApplyLinearMap, AreaScalesByDeterminant) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const SupportProfile s(oracle::random_body(rng, 256, 0.5));
        const auto T = random_map(rng, false);
        const double lhs = area(apply_linear_map(s, T));
        EXPECT_NEAR(lhs, std::abs(T.det()) * area(s), 1e-8 * lhs) << trial;
    }
}

TEST(ApplyLinearMap, AreaProductIsSpecialLinearInvariant) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const SupportProfile s(oracle::random_body(rng, 256, 0.5));
        const auto T = random_map(rng, true);
        ASSERT_TRUE(T.is_special(1e-12));
        const auto ts = apply_linear_map(s, T);
        const double before = area(s) * polar_area(s), after = area(ts) * polar_area(ts);
        EXPECT_NEAR(after, before, 1e-8 * before) << trial;
    }
}

TEST(Validate, Reports) {
    const auto ok = validate(SupportProfile::constant(64, 1.0));
    EXPECT_TRUE(ok.ok());
    EXPECT_NEAR(ok.convexity_margin, 1.0, 1e-14);

    const auto bad = validate(SupportProfile::sample(64, [](double t) { return 1.0 + 0.6 * std::cos(2.0 * t); }));
    EXPECT_FALSE(bad.convex());
    EXPECT_NEAR(bad.convexity_margin, 1.0 - 1.8, 1e-12);

    std::vector<double> v(64, 1.0);
    v[0] = -1.0;
    const auto neg = validate(SupportProfile(v));
    EXPECT_FALSE(neg.positive);
    EXPECT_FALSE(neg.symmetric());
    EXPECT_THROW(require_valid(SupportProfile(v)), NonConvex);
}

TEST(Symmetrize, AveragesAntipodes) {
    std::vector<double> v(8, 1.0);
    v[1] = 2.0;
    const auto s = symmetrize(SupportProfile(v));
    EXPECT_DOUBLE_EQ(s[1], 1.5);
    EXPECT_DOUBLE_EQ(s[5], 1.5);
}

TEST(EllipseSpec, CanonicalForm) {
    const auto e = EllipseSpec::make(0.5, 2.0, 0.0);
    EXPECT_DOUBLE_EQ(e.a, 2.0);
    EXPECT_DOUBLE_EQ(e.b, 0.5);
    EXPECT_NEAR(e.phi, pi / 2.0, 1e-15);
    EXPECT_NEAR(e.support(0.0), 0.5, 1e-15);
    EXPECT_THROW(EllipseSpec::make(-1.0, 1.0), InvalidArgument);
}
