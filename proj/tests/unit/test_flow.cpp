#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "caflow/affine_invariants.hpp"
#include "caflow/ellipse.hpp"
#include "caflow/flow.hpp"
#include "oracles.hpp"

using namespace caflow;
using std::numbers::pi;

namespace {

FlowParams params_for(double p, std::optional<double> t_end = std::nullopt) {
    FlowParams f;
    f.p = p;
    f.t_end = t_end;
    return f;
}

double max_rel_diff(const SupportProfile& a, const SupportProfile& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]) / std::abs(b[k]));
    return d;
}

}  // namespace

TEST(FlowParams, Validation) {
    EXPECT_THROW(params_for(0.5).validate(), InvalidArgument);
    EXPECT_THROW(params_for(2.0, -0.1).validate(), InvalidArgument);
    EXPECT_NO_THROW(params_for(1.0, 0.0).validate());
    EXPECT_DOUBLE_EQ(params_for(2.0).alpha(), -0.5);
    EXPECT_DOUBLE_EQ(params_for(2.0).harnack_exponent(), 1.0 / 3.0);
}

TEST(Speed, ConstantProfiles) {
    for (double p : {1.0, 2.0, 3.5}) {
        for (double v : speed(SupportProfile::constant(64, 1.0), params_for(p))) EXPECT_NEAR(v, 1.0, 1e-13);
    }
    for (double v : speed(SupportProfile::constant(64, 1.6), params_for(2.0))) EXPECT_NEAR(v, 1.0 / 1.6, 1e-13);
}

TEST(Step, CircleMatchesSeparableOde) {
    const auto s = step(SupportProfile::constant(64, 1.0), params_for(2.0), 1e-3);
    for (double v : s.values()) EXPECT_NEAR(v, std::sqrt(1.0 - 2e-3), 1e-12);
}

TEST(Step, ZeroAndNegativeTimeSteps) {
    const auto s = EllipseSpec::make(2.0, 0.5).profile(64);
    EXPECT_TRUE(std::ranges::equal(step(s, params_for(2.0), 0.0).values(), s.values()));
    EXPECT_THROW(step(s, params_for(2.0), -1e-3), InvalidArgument);
}

TEST(Step, EllipseStaysSelfSimilar) {
    const auto s0 = EllipseSpec::make(2.0, 0.5).profile(256);
    const auto s1 = step(s0, params_for(2.0), 1e-3);
    const auto st = affine_state(s1);
    EXPECT_LT(st.sigma_max() - st.sigma_min(), 1e-8);
    const double lam = std::sqrt(1.0 - 2e-3);
    EXPECT_LT(max_rel_diff(s1, s0.scaled(lam)), 1e-10);
}

TEST(Simulate, CircleForTwoExponents) {
    auto tr = simulate(SupportProfile::constant(128, 1.0), params_for(2.0, 0.4), 50);
    EXPECT_EQ(tr.reason, Termination::reached_t_end);
    EXPECT_DOUBLE_EQ(tr.back().t, 0.4);
    EXPECT_NEAR(tr.back().state[0] / std::sqrt(0.2), 1.0, 1e-6);

    tr = simulate(SupportProfile::constant(128, 1.0), params_for(1.0, 0.6), 50);
    EXPECT_NEAR(tr.back().state[7] / std::pow(0.2, 0.75), 1.0, 1e-6);
}

TEST(Simulate, EllipseAreaFollowsClosedForm) {
    const auto tr = simulate(EllipseSpec::make(2.0, 0.5).profile(128), params_for(2.0, 0.25), 100);
    for (const auto& e : tr.entries) EXPECT_NEAR(e.record.A / (pi * (1.0 - 2.0 * e.t)), 1.0, 1e-6) << e.t;
}

TEST(Simulate, AreaFloorStopsRun) {
    auto params = params_for(2.0);
    params.stop_area = 0.5 * pi;
    const auto tr = simulate(SupportProfile::constant(64, 1.0), params, 100);
    EXPECT_EQ(tr.reason, Termination::area_floor);
    EXPECT_LE(tr.back().record.A, 0.5 * pi);
    EXPECT_NEAR(tr.back().t, 0.25, 1e-2);
}

TEST(Simulate, RejectsInvalidInput) {
    EXPECT_THROW(simulate(SupportProfile::constant(64, 1.0), params_for(0.9, 0.1)), InvalidArgument);
    EXPECT_THROW(simulate(SupportProfile::constant(64, 1.0), params_for(2.0, -0.1)), InvalidArgument);
    const auto bad = SupportProfile::sample(64, [](double t) { return 1.0 + 0.6 * std::cos(2.0 * t); });
    EXPECT_THROW(simulate(bad, params_for(2.0, 0.1)), NonConvex);
}

TEST(Simulate, SpecialLinearEquivariance) {
    const auto s0 = SupportProfile::sample(128, [](double t) { return 1.0 + 0.05 * std::cos(4.0 * t); });
    const auto T = LinearMap2{1.25, 0.3, 0.0, 0.8}.scaled(1.0 / std::sqrt(1.0));
    ASSERT_TRUE(T.is_special(1e-12));
    const auto params = params_for(2.0, 0.05);
    const auto a = simulate(apply_linear_map(s0, T), params, 1000).back().state;
    const auto b = apply_linear_map(simulate(s0, params, 1000).back().state, T);
    EXPECT_LT(max_rel_diff(a, b), 1e-5);
}

TEST(ClosedForm, CircleExamples) {
    EXPECT_NEAR(circle_closed_form(1.0, 2.0, 0.25), std::sqrt(0.5), 1e-15);
    EXPECT_DOUBLE_EQ(circle_closed_form(1.7, 3.0, 0.0), 1.7);
    EXPECT_DOUBLE_EQ(ellipse_extinction_time(1.0, 1.0, 1.0), 0.75);
    EXPECT_THROW(circle_closed_form(1.0, 1.0, 0.75), Extinct);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
        EXPECT_NEAR(circle_closed_form(1.3, p, 0.2), oracle::circle_ode(1.3, p, 0.2), 1e-12) << p;
    }
}

TEST(ClosedForm, EllipseExamples) {
    const auto e = ellipse_closed_form(2.0, 0.5, 2.0, 0.25);
    EXPECT_NEAR(e.a, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(e.b, std::sqrt(2.0) / 4.0, 1e-15);
    const auto c = ellipse_closed_form(1.3, 1.3, 1.5, 0.2);
    EXPECT_NEAR(c.a, circle_closed_form(1.3, 1.5, 0.2), 1e-15);
    EXPECT_NEAR(c.b, c.a, 1e-15);
}

TEST(ClosedForm, EllipseSigmaDecreases) {
    double prev = 1e300;
    for (double t : {0.0, 0.1, 0.2, 0.3}) {
        const auto e = ellipse_closed_form(2.0, 0.5, 2.0, t);
        const double sigma = std::cbrt(e.a * e.b * e.a * e.b);
        EXPECT_NEAR(affine_state(e.profile(256)).sigma_max(), sigma, 1e-8);
        EXPECT_LT(sigma, prev);
        prev = sigma;
    }
}

TEST(ClosedForm, SimulateMatchesEllipseFamily) {
    const auto tr = simulate(EllipseSpec::make(1.5, 0.8, 0.4).profile(128), params_for(3.0, 0.1), 1000);
    const auto e = ellipse_closed_form(1.5, 0.8, 3.0, 0.1, 0.4);
    EXPECT_LT(max_rel_diff(tr.back().state, e.profile(128)), 1e-6);
}
