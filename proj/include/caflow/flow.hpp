#pragma once

// Time integration of the p centro-affine normal flow in the Gauss
// parametrization,
//
//   d s / d t = -s^{1+3 alpha} r^alpha,   r = s_theta_theta + s,   alpha = -p/(p+2),
//
// plus the closed-form self-similar solutions (shrinking circles and
// origin-centred ellipses) used as oracles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "caflow/ellipse.hpp"
#include "caflow/errors.hpp"
#include "caflow/geometry.hpp"
#include "caflow/params.hpp"
#include "caflow/record.hpp"

namespace caflow {

/// Inward normal speed s^{1+3 alpha} r^alpha.
inline std::vector<double> speed(const SupportProfile& s, const FlowParams& params) {
    require_positive(s);
    const auto r = radius_of_curvature(s);
    const double a = params.alpha(), e = params.speed_exponent();
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) f[k] = std::pow(s[k], e) * std::pow(r[k], a);
    return f;
}

/// One classical fourth-order Runge-Kutta step of size dt, with no stability
/// control; throws NonConvex if a stage leaves the strictly convex class.
inline SupportProfile rk4_step(const SupportProfile& s, const FlowParams& params, double dt) {
    if (!(dt >= 0.0)) throw InvalidArgument("rk4_step: dt must be non-negative");
    if (dt == 0.0) return s;
    const std::size_t n = s.size();
    const auto stage = [&](const std::vector<double>& k, double w) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = s[i] - w * k[i];
        return SupportProfile(std::move(v));
    };
    const auto k1 = speed(s, params);
    const auto k2 = speed(stage(k1, 0.5 * dt), params);
    const auto k3 = speed(stage(k2, 0.5 * dt), params);
    const auto k4 = speed(stage(k3, dt), params);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = s[i] - dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return symmetrize(SupportProfile(std::move(out)));
}

/// Explicit stability ceiling. Linearizing the flow gives a diffusion
/// coefficient D = -alpha s^{1+3 alpha} r^{alpha-1} in theta; RK4 is stable
/// for dt * D * (n/2)^2 <= 2.78.
inline double stability_ceiling(const SupportProfile& s, const FlowParams& params) {
    const auto r = radius_of_curvature(s);
    const double a = params.alpha(), e = params.speed_exponent();
    double dmax = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        dmax = std::max(dmax, -a * std::pow(s[k], e) * std::pow(r[k], a - 1.0));
    }
    const double kmax = 0.5 * static_cast<double>(s.size());
    return params.dt_safety * 2.78 / (dmax * kmax * kmax);
}

/// Advances by dt with RK4 substeps no longer than the stability ceiling.
inline SupportProfile step(const SupportProfile& s, const FlowParams& params, double dt) {
    if (!(dt >= 0.0)) throw InvalidArgument("step: dt must be non-negative");
    SupportProfile cur = s;
    double left = dt;
    while (left > 0.0) {
        const double h = std::min(left, stability_ceiling(cur, params));
        cur = rk4_step(cur, params, h);
        left = h == left ? 0.0 : left - h;
    }
    return cur;
}

enum class Termination { reached_t_end, area_floor, convexity_loss, step_underflow };

inline std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::reached_t_end: return "reached_t_end";
        case Termination::area_floor: return "area_floor";
        case Termination::convexity_loss: return "convexity_loss";
        case Termination::step_underflow: return "step_underflow";
    }
    return "unknown";
}

struct TrajectoryEntry {
    double t = 0.0;
    SupportProfile state;
    InvariantRecord record;
    /// Last accepted step size before this record (0 for the initial record).
    double dt = 0.0;
    /// Largest relative local-error estimate over the steps since the previous record.
    double err = 0.0;
};

struct Trajectory {
    FlowParams params;
    std::vector<TrajectoryEntry> entries;
    Termination reason = Termination::reached_t_end;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    const TrajectoryEntry& front() const { return entries.front(); }
    const TrajectoryEntry& back() const { return entries.back(); }
    std::size_t size() const { return entries.size(); }
};

/// Adaptive integration with step-doubling error control. Records every
/// `monitor_every` accepted steps and always records the final state.
inline Trajectory simulate(const SupportProfile& s0, const FlowParams& params, std::size_t monitor_every = 1) {
    params.validate();
    require_valid(s0);
    if (monitor_every == 0) throw InvalidArgument("simulate: monitor_every must be >= 1");

    constexpr double dt_min = 1e-14;
    Trajectory traj;
    traj.params = params;
    const double area0 = area(s0);
    const double area_floor = params.stop_area.value_or(1e-3 * area0);
    const double t_end = params.t_end.value_or(std::numeric_limits<double>::infinity());

    SupportProfile s = s0;
    double t = 0.0, dt = params.dt_init, last_dt = 0.0, err_since = 0.0;
    std::size_t since_record = 0;
    traj.entries.push_back({0.0, s, make_record(s, params, 0.0), 0.0, 0.0});

    const auto push_record = [&] {
        TrajectoryEntry e{t, s, make_record(s, params, t), last_dt, err_since};
        flag_monotone(traj.entries.back().record, e.record, err_since);
        traj.entries.push_back(std::move(e));
        err_since = 0.0;
        since_record = 0;
    };

    bool last_failure_convexity = false;
    for (;;) {
        if (t >= t_end * (1.0 - 1e-14)) {
            traj.reason = Termination::reached_t_end;
            break;
        }
        if (area(s) <= area_floor) {
            traj.reason = Termination::area_floor;
            break;
        }
        double h = std::min({dt, stability_ceiling(s, params), t_end - t});
        if (h < dt_min) {
            traj.reason = last_failure_convexity ? Termination::convexity_loss : Termination::step_underflow;
            break;
        }
        try {
            const auto full = rk4_step(s, params, h);
            const auto half = rk4_step(rk4_step(s, params, 0.5 * h), params, 0.5 * h);
            double err = 0.0;
            for (std::size_t k = 0; k < s.size(); ++k) {
                err = std::max(err, std::abs(full[k] - half[k]) / (15.0 * std::abs(half[k])));
            }
            if (!std::isfinite(err)) throw NonConvex("non-finite step", -1, err);
            if (err <= params.tol_step) {
                radius_of_curvature(half);
                s = half;
                t += h;
                last_dt = h;
                err_since = std::max(err_since, err);
                ++traj.accepted_steps;
                ++since_record;
                last_failure_convexity = false;
                const double grow = err > 0.0 ? 0.9 * std::pow(params.tol_step / err, 0.2) : 2.0;
                dt = h * std::clamp(grow, 0.2, 2.0);
                if (since_record >= monitor_every) push_record();
            } else {
                ++traj.rejected_steps;
                dt = h * std::clamp(0.9 * std::pow(params.tol_step / err, 0.2), 0.2, 0.9);
            }
        } catch (const NonConvex&) {
            ++traj.rejected_steps;
            last_failure_convexity = true;
            dt = 0.25 * h;
        }
    }
    if (since_record > 0) push_record();
    return traj;
}

// --- closed-form self-similar solutions -----------------------------------

/// Extinction time of the ellipse with semi-axes (a0, b0):
/// (p+2)/(4p) (a0 b0)^{2p/(p+2)}.
inline double ellipse_extinction_time(double a0, double b0, double p) {
    require_p(p);
    return (p + 2.0) / (4.0 * p) * std::pow(a0 * b0, 2.0 * p / (p + 2.0));
}

/// Dilation factor lambda(t) of the self-similar ellipse solution.
inline double ellipse_scale(double a0, double b0, double p, double t) {
    const double T = ellipse_extinction_time(a0, b0, p);
    if (!(t < T)) throw Extinct("closed-form solution extinct at t = " + std::to_string(T));
    if (t < 0.0) throw InvalidArgument("closed-form solution: negative time");
    return std::pow(1.0 - t / T, (p + 2.0) / (4.0 * p));
}

/// Support value of the shrinking circle: (c0^{4p/(p+2)} - 4p/(p+2) t)^{(p+2)/(4p)}.
inline double circle_closed_form(double c0, double p, double t) {
    if (!(c0 > 0.0)) throw InvalidArgument("circle_closed_form: c0 must be positive");
    return c0 * ellipse_scale(c0, c0, p, t);
}

inline EllipseSpec ellipse_closed_form(double a0, double b0, double p, double t, double phi = 0.0) {
    const double lam = ellipse_scale(a0, b0, p, t);
    return EllipseSpec::make(lam * a0, lam * b0, phi);
}

}  // namespace caflow
