#pragma once

// Area and SL(2) normalization. The John (maximal inscribed) ellipse of an
// origin-symmetric body is centred at the origin, so it is M(unit disk) for
// an SPD matrix M, and containment reads |M u_k| <= s(theta_k) in every
// sampled direction. We maximize log det M over that convex set with a
// log-barrier interior-point method on (m11, m12, m22).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "caflow/ellipse.hpp"
#include "caflow/errors.hpp"
#include "caflow/geometry.hpp"
#include "caflow/spectral.hpp"

namespace caflow {

inline SupportProfile rescale_to_area(const SupportProfile& s, double target) {
    if (!(target > 0.0)) throw InvalidArgument("rescale_to_area: target must be positive");
    return s.scaled(std::sqrt(target / area(s)));
}

struct JohnOptions {
    double barrier_start = 1.0;
    double barrier_shrink = 0.1;
    /// Stop once (constraint count) * barrier weight falls below this.
    double duality_gap = 1e-11;
    double gradient_tol = 1e-10;
    /// Newton iterations allowed per barrier weight.
    int max_newton = 200;
};

namespace detail {

struct JohnProblem {
    std::vector<double> c, s, bound2;  // cos, sin, s^2 per deduplicated direction

    /// Barrier objective -log det M - mu sum log(s_k^2 - |M u_k|^2); +inf if infeasible.
    double value(const Eigen::Vector3d& x, double mu) const {
        const double det = x(0) * x(2) - x(1) * x(1);
        if (!(x(0) > 0.0) || !(det > 0.0)) return std::numeric_limits<double>::infinity();
        double acc = -std::log(det);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double u = x(0) * c[k] + x(1) * s[k], v = x(1) * c[k] + x(2) * s[k];
            const double slack = bound2[k] - u * u - v * v;
            if (!(slack > 0.0)) return std::numeric_limits<double>::infinity();
            acc -= mu * std::log(slack);
        }
        return acc;
    }

    void derivatives(const Eigen::Vector3d& x, double mu, Eigen::Vector3d& grad, Eigen::Matrix3d& hess) const {
        const double det = x(0) * x(2) - x(1) * x(1);
        const Eigen::Vector3d ddet(x(2), -2.0 * x(1), x(0));
        Eigen::Matrix3d hdet;
        hdet << 0, 0, 1, 0, -2, 0, 1, 0, 0;
        grad = -ddet / det;
        hess = ddet * ddet.transpose() / (det * det) - hdet / det;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double u = x(0) * c[k] + x(1) * s[k], v = x(1) * c[k] + x(2) * s[k];
            const double slack = bound2[k] - u * u - v * v;
            const Eigen::Vector3d du(c[k], s[k], 0.0), dv(0.0, c[k], s[k]);
            const Eigen::Vector3d dslack = -2.0 * (u * du + v * dv);
            grad -= mu * dslack / slack;
            hess += mu * (dslack * dslack.transpose() / (slack * slack) +
                          2.0 * (du * du.transpose() + dv * dv.transpose()) / slack);
        }
    }
};

}  // namespace detail

namespace detail {

inline Eigen::Vector3d solve_john(const JohnProblem& prob, double start_radius, const JohnOptions& opt) {
    Eigen::Vector3d x(start_radius, 0.0, start_radius);
    const double count = static_cast<double>(prob.c.size());
    double mu = opt.barrier_start;
    for (;;) {
        int iter = 0;
        for (;; ++iter) {
            if (iter >= opt.max_newton) throw OptimFail("john_matrix: Newton did not converge");
            Eigen::Vector3d g;
            Eigen::Matrix3d H;
            prob.derivatives(x, mu, g, H);
            const Eigen::Vector3d dx = -H.ldlt().solve(g);
            const double decrement = -g.dot(dx);
            if (!std::isfinite(decrement)) throw OptimFail("john_matrix: non-finite Newton step");
            const double f0 = prob.value(x, mu);
            // The decrement approximates twice the suboptimality; near the
            // resolution of f0 no further progress is measurable.
            if (g.norm() < opt.gradient_tol || decrement < 1e-13 * std::max(1.0, std::abs(f0))) break;
            double step = 1.0;
            while (prob.value(x + step * dx, mu) > f0 - 0.25 * step * decrement) {
                step *= 0.5;
                if (step < 1e-12) break;
            }
            if (step < 1e-12) break;
            const Eigen::Vector3d next = x + step * dx;
            if (next == x) break;
            x = next;
        }
        if (mu * count < opt.duality_gap) break;
        mu *= opt.barrier_shrink;
    }
    return x;
}

}  // namespace detail

/// SPD matrix M of the maximal-area origin-centred ellipse M(disk) inside the body.
///
/// Containment is imposed in every grid direction, then in the directions
/// between grid points where the trigonometric interpolant of s is most
/// violated, until no such violation remains. Without the refinement the
/// result depends on where the grid happens to fall, and normalizing twice
/// would not be idempotent.
inline LinearMap2 john_matrix(const SupportProfile& s, const JohnOptions& opt = {}) {
    require_positive(s);
    const std::size_t n = s.size(), half = n / 2;  // antipodal directions give the same constraint
    const auto spec = spectral::half_spectrum(s.values());
    const auto bound = [&](double th) {
        return std::min(spectral::evaluate(spec, n, th), spectral::evaluate(spec, n, th + std::numbers::pi));
    };
    detail::JohnProblem prob;
    const auto add = [&](double th, double h) {
        prob.c.push_back(std::cos(th));
        prob.s.push_back(std::sin(th));
        prob.bound2.push_back(h * h);
    };
    for (std::size_t k = 0; k < half; ++k) add(s.grid().angle(k), std::min(s[k], s[k + half]));

    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    Eigen::Vector3d x;
    for (int round = 0;; ++round) {
        x = detail::solve_john(prob, 0.5 * s.min(), opt);
        const auto slack = [&](double th) {
            const double c = std::cos(th), sn = std::sin(th);
            const double u = x(0) * c + x(1) * sn, v = x(1) * c + x(2) * sn;
            const double b = bound(th);
            return b * b - u * u - v * v;
        };
        std::vector<double> grid_slack(n);
        for (std::size_t k = 0; k < n; ++k) grid_slack[k] = slack(s.grid().angle(k));
        bool added = false;
        for (std::size_t k = 0; k < half; ++k) {
            const double prev = grid_slack[(k + n - 1) % n], next = grid_slack[k + 1];
            if (grid_slack[k] > prev || grid_slack[k] > next) continue;
            // Golden-section search for the slack minimum around this grid minimum.
            const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = s.grid().angle(k) - h, b = s.grid().angle(k) + h;
            double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
            double f1 = slack(x1), f2 = slack(x2);
            while (b - a > 1e-12) {
                if (f1 < f2) {
                    b = x2, x2 = x1, f2 = f1, x1 = b - ratio * (b - a), f1 = slack(x1);
                } else {
                    a = x1, x1 = x2, f1 = f2, x2 = a + ratio * (b - a), f2 = slack(x2);
                }
            }
            const double th = 0.5 * (a + b);
            const double b_th = bound(th);
            if (slack(th) < -1e-13 * b_th * b_th) {
                add(th, b_th);
                added = true;
            }
        }
        if (!added) break;
        if (round >= 20) throw OptimFail("john_matrix: constraint refinement did not settle");
    }
    return {x(0), x(1), x(1), x(2)};
}

/// Semi-axes and orientation from the John matrix.
inline EllipseSpec john_ellipse(const SupportProfile& s, const JohnOptions& opt = {}) {
    const auto M = john_matrix(s, opt);
    Eigen::Matrix2d m;
    m << M.m11, M.m12, M.m21, M.m22;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(m);
    const auto vals = eig.eigenvalues();  // ascending
    const Eigen::Vector2d major = eig.eigenvectors().col(1);
    return EllipseSpec::make(vals(1), vals(0), std::atan2(major(1), major(0)));
}

struct NormalizedState {
    SupportProfile state;
    /// SL(2) member applied after the area rescaling.
    LinearMap2 map;
    /// Dilation factor sqrt(pi / A) applied first.
    double scale = 1.0;
};

inline constexpr double kSandwichEps = 1e-6;

/// Rescales to area pi, maps the John ellipse to a disk with
/// T = M^{-1} sqrt(det M) in SL(2), and restores area pi. The result obeys
/// 1/sqrt(2) <= s <= sqrt(2).
inline NormalizedState john_normalize(const SupportProfile& s, const JohnOptions& opt = {}) {
    const double scale = std::sqrt(std::numbers::pi / area(s));
    const auto s1 = s.scaled(scale);
    const auto M = john_matrix(s1, opt);
    const auto T = M.inverse().scaled(std::sqrt(M.det()));
    const auto s2 = rescale_to_area(apply_linear_map(s1, T), std::numbers::pi);
    const double lo = s2.min(), hi = s2.max();
    if (lo < std::numbers::sqrt2 / 2.0 - kSandwichEps || hi > std::numbers::sqrt2 + kSandwichEps) {
        throw SandwichViolation("john_normalize: support outside [1/sqrt2, sqrt2]: [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    }
    return {s2, T, scale};
}

/// max_k |s'_k - 1| for the John-normalized body.
inline double distance_to_disk(const SupportProfile& s, const JohnOptions& opt = {}) {
    const auto ns = john_normalize(s, opt);
    double d = 0.0;
    for (double v : ns.state.values()) d = std::max(d, std::abs(v - 1.0));
    return d;
}

}  // namespace caflow
