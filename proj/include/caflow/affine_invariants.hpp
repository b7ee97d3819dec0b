#pragma once

// Equi-affine differential invariants of a body given by its support
// function, all evaluated in the Gauss (normal-angle) parametrization:
//
//   sigma = s r^{1/3}                affine support function
//   g     = r^{2/3}                  d(affine arclength)/d theta
//   d/ds  = g^{-1} d/d theta         affine arclength derivative
//   mu    = (1 - sigma_ss) / sigma   affine curvature
//
// Omega_p = integral sigma^{1 - 3p/(p+2)} g d theta.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "caflow/errors.hpp"
#include "caflow/geometry.hpp"
#include "caflow/spectral.hpp"

namespace caflow {

struct AffineState {
    std::vector<double> radius;   // r
    std::vector<double> sigma;    // s r^{1/3}
    std::vector<double> g;        // r^{2/3}
    std::vector<double> sigma_s;  // d sigma / d(affine arclength)
    std::vector<double> sigma_ss;
    std::vector<double> mu;       // affine curvature

    double sigma_max() const { return *std::max_element(sigma.begin(), sigma.end()); }
    double sigma_min() const { return *std::min_element(sigma.begin(), sigma.end()); }
};

/// Exponent 1 - 3p/(p+2) appearing in the p-affine perimeter and the flow speed.
inline double perimeter_exponent(double p) { return 1.0 - 3.0 * p / (p + 2.0); }

inline void require_p(double p) {
    if (!(p >= 1.0)) throw InvalidArgument("p < 1 unsupported");
}

inline AffineState affine_state(const SupportProfile& s) {
    require_positive(s);
    AffineState st;
    st.radius = radius_of_curvature(s);
    const std::size_t n = s.size();
    st.sigma.resize(n);
    st.g.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        st.sigma[k] = s[k] * std::cbrt(st.radius[k]);
        st.g[k] = std::pow(st.radius[k], 2.0 / 3.0);
    }
    // sigma is a nonlinear function of s'' and carries roundoff in its top
    // third of modes; the 2/3 rule keeps that out of sigma_ss, where it is
    // amplified by m^2 / g^3.
    const std::size_t keep = n / 3;
    const auto d1 = spectral::derivative(st.sigma, 1, keep);
    const auto d2 = spectral::derivative(st.sigma, 2, keep);
    const auto g1 = spectral::derivative(st.g, 1, keep);
    st.sigma_s.resize(n);
    st.sigma_ss.resize(n);
    st.mu.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double g = st.g[k];
        st.sigma_s[k] = d1[k] / g;
        st.sigma_ss[k] = (d2[k] * g - d1[k] * g1[k]) / (g * g * g);
        st.mu[k] = (1.0 - st.sigma_ss[k]) / st.sigma[k];
    }
    return st;
}

inline std::vector<double> affine_support(const SupportProfile& s) {
    require_positive(s);
    auto r = radius_of_curvature(s);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = s[k] * std::cbrt(r[k]);
    return r;
}

inline std::vector<double> affine_curvature(const SupportProfile& s) { return affine_state(s).mu; }

inline std::vector<double> sigma_affine_derivative(const SupportProfile& s) {
    return affine_state(s).sigma_s;
}

/// integral sigma^{exponent} * weight d(affine arclength), weight defaulting to 1.
inline double affine_integral(const AffineState& st, double exponent) {
    std::vector<double> f(st.sigma.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::pow(st.sigma[k], exponent) * st.g[k];
    return spectral::integrate(f);
}

inline double affine_perimeter(const AffineState& st, double p) {
    require_p(p);
    return affine_integral(st, perimeter_exponent(p));
}

/// Omega_p. For p = 1 this is the classical affine perimeter integral r^{2/3} d theta.
inline double affine_perimeter(const SupportProfile& s, double p) {
    require_p(p);
    return affine_perimeter(affine_state(s), p);
}

/// Upper bound 2^{p+2} pi^{2p} of the p-affine isoperimetric ratio.
inline double isoperimetric_bound(double p) {
    return std::pow(2.0, p + 2.0) * std::pow(std::numbers::pi, 2.0 * p);
}

/// Omega_p^{p+2} / A^{2-p}; GL(2)-invariant, maximal on origin-centred ellipses.
inline double isoperimetric_ratio(const SupportProfile& s, double p) {
    require_p(p);
    const double omega = affine_perimeter(s, p);
    return std::pow(omega, p + 2.0) / std::pow(area(s), 2.0 - p);
}

struct FrameResiduals {
    /// max |[gamma_s, gamma_ss] - 1|
    double unimodular = 0.0;
    /// max |[gamma, gamma_s] - sigma|
    double support = 0.0;
    /// Affine arclength at each grid angle, starting at 0 for theta = 0.
    std::vector<double> arclength;
    /// Total affine length; equals Omega_1.
    double total_length = 0.0;
};

/// Reparametrizes the embedded curve by affine arclength and measures the
/// frame identities [gamma_s, gamma_ss] = 1 and sigma = [gamma, gamma_s].
inline FrameResiduals frame_identity_residuals(const SupportProfile& s) {
    const auto st = affine_state(s);
    const auto curve = embed(s);
    const std::size_t n = s.size();

    std::vector<double> x(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = curve.points[k].x;
        y[k] = curve.points[k].y;
    }
    auto xs = spectral::derivative(x, 1);
    auto ys = spectral::derivative(y, 1);
    for (std::size_t k = 0; k < n; ++k) {
        xs[k] /= st.g[k];
        ys[k] /= st.g[k];
    }
    auto xss = spectral::derivative(xs, 1);
    auto yss = spectral::derivative(ys, 1);

    FrameResiduals out;
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 gs{xs[k], ys[k]};
        const Point2 gss{xss[k] / st.g[k], yss[k] / st.g[k]};
        out.unimodular = std::max(out.unimodular, std::abs(bracket(gs, gss) - 1.0));
        out.support = std::max(out.support, std::abs(bracket(curve.points[k], gs) - st.sigma[k]));
    }
    out.arclength = spectral::cumulative_integral(st.g);
    out.total_length = spectral::integrate(st.g);
    return out;
}

}  // namespace caflow
