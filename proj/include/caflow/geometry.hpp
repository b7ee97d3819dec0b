#pragma once

// Support-function calculus for origin-symmetric, strictly convex planar
// bodies. A body is represented by its support function sampled on a
// uniform grid of outer-normal angles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "caflow/errors.hpp"
#include "caflow/spectral.hpp"

namespace caflow {

/// Uniform grid theta_k = 2 pi k / n on the unit circle.
class AngularGrid {
public:
    explicit AngularGrid(std::size_t n) : n_(n) {
        if (n < 8 || n % 2 != 0) {
            throw InvalidArgument("AngularGrid: n must be even and >= 8, got " + std::to_string(n));
        }
    }

    std::size_t size() const noexcept { return n_; }
    double step() const noexcept { return 2.0 * std::numbers::pi / static_cast<double>(n_); }
    double angle(std::size_t k) const noexcept { return step() * static_cast<double>(k); }

    std::vector<double> angles() const {
        std::vector<double> out(n_);
        for (std::size_t k = 0; k < n_; ++k) out[k] = angle(k);
        return out;
    }

    friend bool operator==(const AngularGrid&, const AngularGrid&) = default;

private:
    std::size_t n_;
};

/// Sampled support function s(theta_k). The value type carries no validity
/// guarantee beyond its size; operations that need positivity or convexity
/// check it and throw.
class SupportProfile {
public:
    explicit SupportProfile(std::vector<double> values)
        : grid_(values.size()), values_(std::move(values)) {}

    template <class Fn>
    static SupportProfile sample(std::size_t n, Fn&& fn) {
        AngularGrid grid(n);
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = fn(grid.angle(k));
        return SupportProfile(std::move(v));
    }

    static SupportProfile constant(std::size_t n, double c) {
        return SupportProfile(std::vector<double>(n, c));
    }

    const AngularGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }

    double max() const { return *std::max_element(values_.begin(), values_.end()); }
    double min() const { return *std::min_element(values_.begin(), values_.end()); }

    SupportProfile scaled(double factor) const {
        std::vector<double> v(values_);
        for (auto& x : v) x *= factor;
        return SupportProfile(std::move(v));
    }

private:
    AngularGrid grid_;
    std::vector<double> values_;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// [u, v]: determinant of the matrix with rows u and v.
inline double bracket(const Point2& u, const Point2& v) { return u.x * v.y - u.y * v.x; }

/// Boundary points gamma_k = X(nu^{-1}(theta_k)) and tangents d gamma / d theta.
struct CurveEmbedding {
    std::vector<Point2> points;
    std::vector<Point2> tangents;
};

/// 2x2 real matrix acting on the plane (x -> M x).
struct LinearMap2 {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

    static LinearMap2 identity() { return {}; }
    static LinearMap2 diagonal(double a, double b) { return {a, 0.0, 0.0, b}; }
    static LinearMap2 rotation(double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        return {c, -s, s, c};
    }

    double det() const { return m11 * m22 - m12 * m21; }
    LinearMap2 transpose() const { return {m11, m21, m12, m22}; }

    LinearMap2 inverse() const {
        const double d = det();
        if (std::abs(d) < 1e-300) throw Singular("LinearMap2::inverse: singular matrix");
        return {m22 / d, -m12 / d, -m21 / d, m11 / d};
    }

    Point2 apply(const Point2& p) const { return {m11 * p.x + m12 * p.y, m21 * p.x + m22 * p.y}; }

    LinearMap2 scaled(double f) const { return {f * m11, f * m12, f * m21, f * m22}; }

    /// Member of SL(2) within `tol`.
    bool is_special(double tol = 1e-12) const { return std::abs(det() - 1.0) <= tol; }

    friend LinearMap2 operator*(const LinearMap2& a, const LinearMap2& b) {
        return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
                a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
    }
};

// ---------------------------------------------------------------------------

/// Raw s_theta_theta + s without the convexity check.
inline std::vector<double> radius_of_curvature_unchecked(const SupportProfile& s) {
    auto r = spectral::derivative(s.values(), 2);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] += s[k];
    return r;
}

/// Throws NonConvex unless every support value is positive.
inline void require_positive(const SupportProfile& s) {
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s[k] > 0.0)) {
            throw NonConvex("support value not positive at index " + std::to_string(k),
                            static_cast<int>(k), s[k]);
        }
    }
}

/// Radius of curvature r = s_theta_theta + s by trigonometric differentiation.
/// Throws NonConvex if any r_k <= 0.
inline std::vector<double> radius_of_curvature(const SupportProfile& s) {
    auto r = radius_of_curvature_unchecked(s);
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (!(r[k] > 0.0)) {
            throw NonConvex("radius of curvature not positive at index " + std::to_string(k),
                            static_cast<int>(k), r[k]);
        }
    }
    return r;
}

/// Euclidean curvature kappa = 1 / r.
inline std::vector<double> curvature(const SupportProfile& s) {
    auto r = radius_of_curvature(s);
    for (auto& v : r) v = 1.0 / v;
    return r;
}

/// s_k <- (s_k + s_{k+n/2}) / 2.
inline SupportProfile symmetrize(const SupportProfile& s) {
    const std::size_t n = s.size(), h = n / 2;
    std::vector<double> v(n);
    for (std::size_t k = 0; k < h; ++k) {
        const double m = 0.5 * (s[k] + s[k + h]);
        v[k] = m;
        v[k + h] = m;
    }
    return SupportProfile(std::move(v));
}

/// gamma = s u + s_theta u_perp, with tangent gamma_theta = r u_perp.
inline CurveEmbedding embed(const SupportProfile& s) {
    const auto r = radius_of_curvature(s);
    const auto ds = spectral::derivative(s.values(), 1);
    const auto& grid = s.grid();
    CurveEmbedding out;
    out.points.resize(s.size());
    out.tangents.resize(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double c = std::cos(grid.angle(k)), sn = std::sin(grid.angle(k));
        out.points[k] = {s[k] * c - ds[k] * sn, s[k] * sn + ds[k] * c};
        out.tangents[k] = {-r[k] * sn, r[k] * c};
    }
    return out;
}

/// A = 1/2 integral s r d theta.
inline double area(const SupportProfile& s) {
    const auto r = radius_of_curvature(s);
    std::vector<double> integrand(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) integrand[k] = s[k] * r[k];
    return 0.5 * spectral::integrate(integrand);
}

/// Area of the polar body, 1/2 integral s^{-2} d theta.
inline double polar_area(const SupportProfile& s) {
    require_positive(s);
    std::vector<double> integrand(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) integrand[k] = 1.0 / (s[k] * s[k]);
    return 0.5 * spectral::integrate(integrand);
}

/// Trigonometric interpolant of the samples evaluated at arbitrary angles.
inline std::vector<double> trig_eval(const SupportProfile& s, std::span<const double> angles) {
    const auto spec = spectral::half_spectrum(s.values());
    const AngularGrid& grid = s.grid();
    std::vector<double> out(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i) {
        // Exact on grid points; skip the sum there.
        const double q = angles[i] / grid.step();
        const double qr = std::round(q);
        if (std::abs(q - qr) < 1e-13 * std::max(1.0, std::abs(q))) {
            const auto n = static_cast<long long>(grid.size());
            const long long k = ((static_cast<long long>(qr) % n) + n) % n;
            out[i] = s[static_cast<std::size_t>(k)];
        } else {
            out[i] = spectral::evaluate(spec, s.size(), angles[i]);
        }
    }
    return out;
}

inline double trig_eval(const SupportProfile& s, double angle) {
    const double a[1] = {angle};
    return trig_eval(s, std::span<const double>(a, 1))[0];
}

/// Support function of T K: h_{TK}(u) = |T^t u| s(T^t u / |T^t u|), resampled
/// on the input grid and re-symmetrized.
inline SupportProfile apply_linear_map(const SupportProfile& s, const LinearMap2& T) {
    if (std::abs(T.det()) < 1e-12) throw Singular("apply_linear_map: |det T| < 1e-12");
    require_positive(s);
    const auto Tt = T.transpose();
    const AngularGrid& grid = s.grid();
    std::vector<double> angles(s.size()), lengths(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const Point2 w = Tt.apply({std::cos(grid.angle(k)), std::sin(grid.angle(k))});
        lengths[k] = std::hypot(w.x, w.y);
        angles[k] = std::atan2(w.y, w.x);
        if (angles[k] < 0.0) angles[k] += 2.0 * std::numbers::pi;
    }
    auto vals = trig_eval(s, angles);
    for (std::size_t k = 0; k < s.size(); ++k) vals[k] *= lengths[k];
    auto out = symmetrize(SupportProfile(std::move(vals)));
    radius_of_curvature(out);
    return out;
}

struct ValidationReport {
    bool positive = true;
    double min_value = 0.0;
    /// max_k |s_{k+n/2} - s_k|
    double symmetry_defect = 0.0;
    /// min_k r_k
    double convexity_margin = 0.0;
    double symmetry_tolerance = 1e-12;

    bool symmetric() const { return symmetry_defect <= symmetry_tolerance; }
    bool convex() const { return convexity_margin > 0.0; }
    bool ok() const { return positive && symmetric() && convex(); }
};

/// Report-only validity check; never throws on invalid data.
inline ValidationReport validate(const SupportProfile& s, double symmetry_tolerance = 1e-12) {
    ValidationReport rep;
    rep.symmetry_tolerance = symmetry_tolerance;
    rep.min_value = s.min();
    rep.positive = rep.min_value > 0.0;
    const std::size_t h = s.size() / 2;
    for (std::size_t k = 0; k < h; ++k) {
        rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(s[k + h] - s[k]));
    }
    const auto r = radius_of_curvature_unchecked(s);
    rep.convexity_margin = *std::min_element(r.begin(), r.end());
    return rep;
}

/// Throws NonConvex or InvalidArgument when the profile is not a valid state.
inline void require_valid(const SupportProfile& s) {
    const auto rep = validate(s, 1e-9 * std::max(1.0, s.max()));
    if (!rep.positive) require_positive(s);
    if (!rep.symmetric()) {
        throw InvalidArgument("support profile is not origin-symmetric (defect " +
                              std::to_string(rep.symmetry_defect) + ")");
    }
    if (!rep.convex()) radius_of_curvature(s);
}

}  // namespace caflow
