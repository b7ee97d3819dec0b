#pragma once

// Checks of the monotone quantities, Harnack inequality and evolution
// identities along completed trajectories. Every check is a pure function
// of its inputs and returns a report instead of throwing on failure.
//
// Discrete tolerances follow one rule: a quantity q may move against its
// claimed direction by at most (1e-8 + 1e2 * err) |q|, where err is the
// integrator's relative local-error estimate over the interval.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "caflow/affine_invariants.hpp"
#include "caflow/ellipse.hpp"
#include "caflow/flow.hpp"
#include "caflow/harnack.hpp"

namespace caflow {

namespace detail {

/// Three-point derivative at the middle of non-uniform samples.
inline double central_difference(double t0, double f0, double t1, double f1, double t2, double f2) {
    const double h1 = t1 - t0, h2 = t2 - t1;
    return -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
}

inline double monotone_tolerance(double err, double magnitude) { return (1e-8 + 1e2 * err) * magnitude; }

inline double relative_spread(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return (*hi - *lo) / std::abs(mean);
}

}  // namespace detail

// --- Harnack -----------------------------------------------------------------

struct HarnackRecordCheck {
    double t = 0.0;
    double R_max = 0.0;
    double R_scale = 0.0;
    /// min_k of the increment of s^{1+3a} r^a t^{p/(2p+2)} since the previous record.
    double increment = 0.0;
    bool pass = true;
};

struct HarnackReport {
    bool pass = true;
    /// max over records of R_max / R_scale (negative when the estimate holds strictly).
    double worst_R_ratio = -std::numeric_limits<double>::infinity();
    /// min over record pairs of the relative increment of the monotone quantity.
    double worst_increment = std::numeric_limits<double>::infinity();
    std::vector<HarnackRecordCheck> records;
};

/// R <= tol_R * scale at every record, and pointwise non-negative increments
/// of the monotone Harnack quantity between consecutive records with t > 0.
inline HarnackReport check_harnack(const Trajectory& traj, const FlowParams& params, double tol_R = 1e-8) {
    HarnackReport rep;
    std::vector<double> prev;
    for (const auto& e : traj.entries) {
        const auto h = harnack_quantities(e.state, params, e.t);
        HarnackRecordCheck rc;
        rc.t = e.t;
        rc.R_max = h.R_max();
        rc.R_scale = h.R_scale(params);
        rc.pass = rc.R_max <= tol_R * rc.R_scale;
        rep.worst_R_ratio = std::max(rep.worst_R_ratio, rc.R_max / rc.R_scale);
        if (e.t > 0.0) {
            const auto q = harnack_monotone_quantity(e.state, params, e.t);
            if (!prev.empty()) {
                double worst = std::numeric_limits<double>::infinity();
                double worst_rel = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const double d = q[k] - prev[k];
                    const double mag = std::max(std::abs(q[k]), std::abs(prev[k]));
                    worst = std::min(worst, d);
                    worst_rel = std::min(worst_rel, d / mag);
                    if (d < -detail::monotone_tolerance(e.err, mag)) rc.pass = false;
                }
                rc.increment = worst;
                rep.worst_increment = std::min(rep.worst_increment, worst_rel);
            }
            prev = q;
        }
        rep.pass = rep.pass && rc.pass;
        rep.records.push_back(rc);
    }
    return rep;
}

// --- Monotone quantities -----------------------------------------------------

/// Right side of the Omega_2 derivative bound:
/// 9p/(4(p+2)) integral sigma^{-3p/(p+2) - 3/2} sigma_s^2 d(affine arclength).
inline double omega2_rate_lower_bound(const SupportProfile& s, double p) {
    const auto st = affine_state(s);
    const double e = -3.0 * p / (p + 2.0) - 1.5;
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = std::pow(st.sigma[k], e) * st.sigma_s[k] * st.sigma_s[k] * st.g[k];
    }
    return 9.0 * p / (4.0 * (p + 2.0)) * spectral::integrate(f);
}

struct MonotoneReport {
    bool pass = true;
    /// Most negative relative change between consecutive records.
    double worst_area_product = 0.0;
    double worst_ratio_p = 0.0;
    double worst_omega_2 = 0.0;
    /// min over interior records of dOmega_2/dt - bound + tolerance; negative means failure.
    double worst_bound_margin = std::numeric_limits<double>::infinity();
    /// (max - min) / mean over the run, per quantity.
    double spread_area_product = 0.0;
    double spread_ratio_p = 0.0;
    double spread_omega_2 = 0.0;
};

inline MonotoneReport check_monotone(const Trajectory& traj, const FlowParams& params) {
    if (traj.size() < 3) throw InvalidArgument("check_monotone: need at least 3 records");
    MonotoneReport rep;
    const auto& E = traj.entries;
    std::vector<double> aa, ratio, om2;
    for (const auto& e : E) {
        aa.push_back(e.record.AAstar);
        ratio.push_back(e.record.ratio_p);
        om2.push_back(e.record.Omega_2);
    }
    const auto pair_check = [&](const std::vector<double>& q, double& worst) {
        for (std::size_t i = 1; i < q.size(); ++i) {
            const double mag = std::max(std::abs(q[i]), std::abs(q[i - 1]));
            const double d = q[i] - q[i - 1];
            worst = std::min(worst, d / mag);
            if (d < -detail::monotone_tolerance(E[i].err, mag)) rep.pass = false;
        }
    };
    pair_check(aa, rep.worst_area_product);
    pair_check(ratio, rep.worst_ratio_p);
    pair_check(om2, rep.worst_omega_2);

    for (std::size_t i = 1; i + 1 < E.size(); ++i) {
        const double lhs = detail::central_difference(E[i - 1].t, om2[i - 1], E[i].t, om2[i], E[i + 1].t, om2[i + 1]);
        const double rhs = omega2_rate_lower_bound(E[i].state, params.p);
        const double span = E[i + 1].t - E[i - 1].t;
        const double err = std::max(E[i].err, E[i + 1].err);
        const double tol = 1e-3 * std::abs(rhs) + detail::monotone_tolerance(err, om2[i]) / span;
        rep.worst_bound_margin = std::min(rep.worst_bound_margin, lhs - rhs + tol);
        if (rep.worst_bound_margin < 0.0) rep.pass = false;
    }
    rep.spread_area_product = detail::relative_spread(aa);
    rep.spread_ratio_p = detail::relative_spread(ratio);
    rep.spread_omega_2 = detail::relative_spread(om2);
    return rep;
}

// --- Omega_l evolution -------------------------------------------------------

/// dOmega_l/dt predicted by the evolution formula:
///   2(l-2)/(l+2) integral sigma^{1-3p/(p+2)-3l/(l+2)} ds
///   + 18 p l / ((l+2)^2 (p+2)) integral sigma^{-3p/(p+2)-3l/(l+2)} sigma_s^2 ds.
inline double omega_l_rate(const SupportProfile& s, double p, double l) {
    require_p(p);
    if (!(l >= 2.0)) throw InvalidArgument("omega_l_rate: l must be >= 2");
    const auto st = affine_state(s);
    const double e = -3.0 * p / (p + 2.0) - 3.0 * l / (l + 2.0);
    std::vector<double> f1(s.size()), f2(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double w = std::pow(st.sigma[k], e) * st.g[k];
        f1[k] = st.sigma[k] * w;
        f2[k] = st.sigma_s[k] * st.sigma_s[k] * w;
    }
    return 2.0 * (l - 2.0) / (l + 2.0) * spectral::integrate(f1) +
           18.0 * p * l / ((l + 2.0) * (l + 2.0) * (p + 2.0)) * spectral::integrate(f2);
}

struct OmegaLReport {
    bool pass = true;
    double l = 2.0;
    double max_relative_residual = 0.0;
    std::size_t records_checked = 0;
};

/// Compares the finite-difference dOmega_l/dt at interior records with
/// omega_l_rate. Residuals are relative to max(|rate|, 1e-6 Omega_l).
inline OmegaLReport check_omega_l_evolution(const Trajectory& traj, const FlowParams& params, double l,
                                            double threshold = 1e-3) {
    if (!(l >= 2.0)) throw InvalidArgument("check_omega_l_evolution: l must be >= 2");
    OmegaLReport rep;
    rep.l = l;
    const auto& E = traj.entries;
    std::vector<double> om(E.size());
    for (std::size_t i = 0; i < E.size(); ++i) om[i] = affine_perimeter(E[i].state, l);
    for (std::size_t i = 1; i + 1 < E.size(); ++i) {
        const double lhs = detail::central_difference(E[i - 1].t, om[i - 1], E[i].t, om[i], E[i + 1].t, om[i + 1]);
        const double rhs = omega_l_rate(E[i].state, params.p, l);
        const double res = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-6 * om[i]);
        rep.max_relative_residual = std::max(rep.max_relative_residual, res);
        ++rep.records_checked;
    }
    rep.pass = rep.max_relative_residual < threshold;
    return rep;
}

// --- Area law and pointwise evolution identities ----------------------------

struct AreaLawReport {
    bool pass = true;
    /// max over interior records of |dA/dt + Omega_p| / Omega_p.
    double max_relative_residual = 0.0;
};

inline AreaLawReport check_area_law(const Trajectory& traj, double threshold = 1e-3) {
    AreaLawReport rep;
    const auto& E = traj.entries;
    for (std::size_t i = 1; i + 1 < E.size(); ++i) {
        const double dA = detail::central_difference(E[i - 1].t, E[i - 1].record.A, E[i].t, E[i].record.A,
                                                     E[i + 1].t, E[i + 1].record.A);
        const double om = E[i].record.Omega_p;
        rep.max_relative_residual = std::max(rep.max_relative_residual, std::abs(dA + om) / om);
    }
    rep.pass = rep.max_relative_residual <= threshold;
    return rep;
}

/// d sigma / dt at fixed normal angle: the affine-parametrized rate
/// sigma^b (-4/3 + (q+1) b sigma_s^2/sigma + q sigma_ss), b = 1-3p/(p+2),
/// q = p/(p+2), minus the tangential transport sigma_s (sigma^b)_s.
inline std::vector<double> sigma_rate(const SupportProfile& s, const FlowParams& params) {
    const auto st = affine_state(s);
    const double b = perimeter_exponent(params.p);
    const double q = params.p / (params.p + 2.0);
    const std::size_t n = s.size();
    std::vector<double> sb(n);
    for (std::size_t k = 0; k < n; ++k) sb[k] = std::pow(st.sigma[k], b);
    auto sb_s = spectral::derivative(sb, 1);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double affine = sb[k] * (-4.0 / 3.0 + (q + 1.0) * b * st.sigma_s[k] * st.sigma_s[k] / st.sigma[k] +
                                       q * st.sigma_ss[k]);
        out[k] = affine - st.sigma_s[k] * sb_s[k] / st.g[k];
    }
    return out;
}

/// d r / dt = -[(s^{1+3a} r^a)_theta_theta + s^{1+3a} r^a].
inline std::vector<double> radius_rate(const SupportProfile& s, const FlowParams& params) {
    auto q = harnack_quantities(s, params, 0.0).Q;
    for (auto& v : q) v = -v;
    return q;
}

struct PointwiseIdentityReport {
    /// max over interior records of max_k |FD - formula| / max_k |formula|.
    double sigma_residual = 0.0;
    double radius_residual = 0.0;
};

inline PointwiseIdentityReport check_pointwise_evolution(const Trajectory& traj, const FlowParams& params) {
    PointwiseIdentityReport rep;
    const auto& E = traj.entries;
    const auto fd_residual = [&](std::size_t i, auto&& field, const std::vector<double>& formula) {
        const auto f0 = field(E[i - 1].state), f1 = field(E[i].state), f2 = field(E[i + 1].state);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < formula.size(); ++k) {
            const double fd = detail::central_difference(E[i - 1].t, f0[k], E[i].t, f1[k], E[i + 1].t, f2[k]);
            num = std::max(num, std::abs(fd - formula[k]));
            den = std::max(den, std::abs(formula[k]));
        }
        return num / den;
    };
    for (std::size_t i = 1; i + 1 < E.size(); ++i) {
        rep.sigma_residual = std::max(
            rep.sigma_residual,
            fd_residual(i, [](const SupportProfile& s) { return affine_support(s); }, sigma_rate(E[i].state, params)));
        rep.radius_residual = std::max(
            rep.radius_residual,
            fd_residual(i, [](const SupportProfile& s) { return radius_of_curvature(s); },
                        radius_rate(E[i].state, params)));
    }
    return rep;
}

// --- Ancient (self-similar) family -------------------------------------------

struct AncientReport {
    bool pass = true;
    /// max over samples of d(s r^{1/3})/dt at fixed normal angle; must be < 0.
    double max_sigma_rate = -std::numeric_limits<double>::infinity();
    /// max over samples of dsigma/dt - (-(3p/(p+2)-1) sigma_s^2 sigma^{-3p/(p+2)}); must be <= 0.
    double max_excess = -std::numeric_limits<double>::infinity();
    /// max |rhs| of the sigma inequality (identically 0 on ellipses).
    double max_abs_rhs = 0.0;
    /// max relative deviation of the FD rate from the closed form -4/3 sigma^{1-3p/(p+2)}.
    double closed_form_deviation = 0.0;
    std::size_t samples = 0;
};

/// Checks d(s r^{1/3})/dt <= 0 and the sigma inequality for ancient
/// solutions on the closed-form ellipse family started at `initial`.
/// `times` must be increasing and below the extinction time.
inline AncientReport check_ancient_inequalities(const EllipseSpec& initial, const FlowParams& params,
                                                std::span<const double> times, std::size_t n = 256) {
    params.validate();
    if (times.size() < 3) throw InvalidArgument("check_ancient_inequalities: need at least 3 times");
    AncientReport rep;
    const double p = params.p;
    const double c = 3.0 * p / (p + 2.0);
    std::vector<std::vector<double>> sig;
    for (double t : times) {
        const auto e = ellipse_closed_form(initial.a, initial.b, p, t, initial.phi);
        sig.push_back(affine_support(e.profile(n)));
    }
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        const auto e = ellipse_closed_form(initial.a, initial.b, p, times[i], initial.phi);
        const auto s = e.profile(n);
        const auto st = affine_state(s);
        const double exact = -4.0 / 3.0 * std::pow(std::pow(e.a * e.b, 2.0 / 3.0), perimeter_exponent(p));
        for (std::size_t k = 0; k < n; ++k) {
            const double rate = detail::central_difference(times[i - 1], sig[i - 1][k], times[i], sig[i][k],
                                                           times[i + 1], sig[i + 1][k]);
            const double rhs = -(c - 1.0) * st.sigma_s[k] * st.sigma_s[k] * std::pow(st.sigma[k], -c);
            rep.max_sigma_rate = std::max(rep.max_sigma_rate, rate);
            rep.max_excess = std::max(rep.max_excess, rate - rhs);
            rep.max_abs_rhs = std::max(rep.max_abs_rhs, std::abs(rhs));
            rep.closed_form_deviation = std::max(rep.closed_form_deviation, std::abs(rate - exact) / std::abs(exact));
            ++rep.samples;
        }
    }
    rep.pass = rep.max_sigma_rate < 0.0 && rep.max_excess <= 0.0;
    return rep;
}

/// Uniform time grid on [0, fraction * extinction time].
inline std::vector<double> ancient_time_grid(const EllipseSpec& initial, double p, std::size_t count = 41,
                                             double fraction = 0.9) {
    const double T = ellipse_extinction_time(initial.a, initial.b, p);
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = fraction * T * static_cast<double>(i) / static_cast<double>(count - 1);
    return t;
}

// --- Diagnostics -------------------------------------------------------------

struct SigmaRatioSeries {
    std::vector<double> t;
    std::vector<double> ratio;
    /// false when the ratio grew over the run (heuristic non-boundedness flag).
    bool bounded = true;

    double initial() const { return ratio.front(); }
    double final() const { return ratio.back(); }
};

inline SigmaRatioSeries sigma_ratio_diagnostic(const Trajectory& traj) {
    SigmaRatioSeries out;
    for (const auto& e : traj.entries) {
        out.t.push_back(e.t);
        out.ratio.push_back(e.record.sigma_max / e.record.sigma_min);
    }
    if (!out.ratio.empty()) out.bounded = out.final() <= out.initial() * (1.0 + 1e-6);
    return out;
}

/// Scale-free deviation of s^3 r from a constant; zero exactly on origin-centred ellipses.
inline double ellipse_residual(const SupportProfile& s) {
    const auto r = radius_of_curvature(s);
    std::vector<double> m(s.size());
    double mean = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        m[k] = s[k] * s[k] * s[k] * r[k];
        mean += m[k];
    }
    mean /= static_cast<double>(s.size());
    double worst = 0.0;
    for (double v : m) worst = std::max(worst, std::abs(v - mean));
    return worst / mean;
}

}  // namespace caflow
