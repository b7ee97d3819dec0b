#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's spectral code: derivatives use a direct O(n^2) DFT, integrals a
// plain trapezoid sum, and the John ellipse a derivative-free search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline std::vector<double> grid(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
    return t;
}

// --- ellipses -----------------------------------------------------------------

inline double ellipse_support(double a, double b, double phi, double theta) {
    const double c = std::cos(theta - phi), s = std::sin(theta - phi);
    return std::sqrt(a * a * c * c + b * b * s * s);
}

/// r = a^2 b^2 / s^3 on an origin-centred ellipse.
inline double ellipse_radius(double a, double b, double phi, double theta) {
    const double h = ellipse_support(a, b, phi, theta);
    return a * a * b * b / (h * h * h);
}

inline std::vector<double> ellipse_samples(double a, double b, double phi, std::size_t n) {
    std::vector<double> v;
    for (double t : grid(n)) v.push_back(ellipse_support(a, b, phi, t));
    return v;
}

// --- direct DFT ---------------------------------------------------------------

/// order-th derivative of the trigonometric interpolant, Nyquist mode dropped for odd orders.
inline std::vector<double> dft_derivative(std::span<const double> f, int order) {
    const std::size_t n = f.size();
    const auto th = grid(n);
    std::vector<std::complex<double>> c(n);
    for (std::size_t m = 0; m < n; ++m) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += f[k] * std::polar(1.0, -th[k] * static_cast<double>(m));
        c[m] = acc / static_cast<double>(n);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        const long long w = m <= n / 2 ? static_cast<long long>(m) : static_cast<long long>(m) - static_cast<long long>(n);
        if (2 * m == n && order % 2 != 0) continue;
        std::complex<double> factor = 1.0;
        for (int o = 0; o < order; ++o) factor *= std::complex<double>(0.0, static_cast<double>(w));
        for (std::size_t k = 0; k < n; ++k) {
            out[k] += std::real(factor * c[m] * std::polar(1.0, th[k] * static_cast<double>(w)));
        }
    }
    return out;
}

inline double trapezoid(std::span<const double> f) {
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc * 2.0 * pi / static_cast<double>(f.size());
}

inline std::vector<double> radius(std::span<const double> s) {
    auto r = dft_derivative(s, 2);
    for (std::size_t k = 0; k < s.size(); ++k) r[k] += s[k];
    return r;
}

inline double area(std::span<const double> s) {
    const auto r = radius(s);
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) f[k] = 0.5 * s[k] * r[k];
    return trapezoid(f);
}

/// Affine perimeter integral sigma^{1-3p/(p+2)} r^{2/3} d theta.
inline double affine_perimeter(std::span<const double> s, double p) {
    const auto r = radius(s);
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double sigma = s[k] * std::cbrt(r[k]);
        f[k] = std::pow(sigma, 1.0 - 3.0 * p / (p + 2.0)) * std::pow(r[k], 2.0 / 3.0);
    }
    return trapezoid(f);
}

/// max - min of s^3 r over mean, the ellipse deviation.
inline double ellipse_residual(std::span<const double> s) {
    const auto r = radius(s);
    std::vector<double> m(s.size());
    double mean = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) mean += (m[k] = s[k] * s[k] * s[k] * r[k]);
    mean /= static_cast<double>(s.size());
    double worst = 0.0;
    for (double v : m) worst = std::max(worst, std::abs(v - mean));
    return worst / mean;
}

// --- finite differences along affine arclength ---------------------------------

/// d sigma / d(affine arclength) by centred differences in the cumulative
/// affine arclength, second order in the grid spacing.
inline std::vector<double> sigma_s_fd(std::span<const double> s) {
    const std::size_t n = s.size();
    const auto r = radius(s);
    std::vector<double> sigma(n), g(n);
    for (std::size_t k = 0; k < n; ++k) {
        sigma[k] = s[k] * std::cbrt(r[k]);
        g[k] = std::pow(r[k], 2.0 / 3.0);
    }
    const double h = 2.0 * pi / static_cast<double>(n);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t km = (k + n - 1) % n, kp = (k + 1) % n;
        const double ds_minus = 0.5 * h * (g[km] + g[k]);
        const double ds_plus = 0.5 * h * (g[k] + g[kp]);
        out[k] = (sigma[kp] - sigma[km]) / (ds_minus + ds_plus);
    }
    return out;
}

// --- circle ODE -----------------------------------------------------------------

/// c' = -c^{1+4 alpha}, alpha = -p/(p+2), by classical RK4 with `steps` steps.
inline double circle_ode(double c0, double p, double t, int steps = 20000) {
    const double e = 1.0 - 4.0 * p / (p + 2.0);
    const auto f = [e](double c) { return -std::pow(c, e); };
    double c = c0;
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(c), k2 = f(c + 0.5 * h * k1), k3 = f(c + 0.5 * h * k2), k4 = f(c + h * k3);
        c += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return c;
}

// --- John ellipse by direct search -----------------------------------------------

struct Ellipse {
    double a, b, phi;
};

/// Largest ellipse (a, b, phi) inside the sampled body: for each
/// orientation and aspect ratio the feasible scale is closed form, and the
/// best (phi, aspect) pair is found by a shrinking-pattern search.
inline Ellipse john_search(const std::vector<double>& s) {
    const auto th = grid(s.size());
    const auto best_scale = [&](double phi, double aspect) {
        double scale = 1e300;
        for (std::size_t k = 0; k < s.size(); ++k) {
            scale = std::min(scale, s[k] / ellipse_support(1.0, aspect, phi, th[k]));
        }
        return scale;
    };
    const auto area_of = [&](double phi, double aspect) {
        const double c = best_scale(phi, aspect);
        return c * c * aspect;
    };
    double phi = 0.0, aspect = 1.0, best = area_of(phi, aspect);
    for (int i = 0; i < 64; ++i) {
        const double cand_phi = pi * i / 64.0;
        for (double cand_aspect = 0.05; cand_aspect <= 1.0; cand_aspect += 0.01) {
            const double v = area_of(cand_phi, cand_aspect);
            if (v > best) best = v, phi = cand_phi, aspect = cand_aspect;
        }
    }
    double dphi = pi / 64.0, dasp = 0.01;
    while (dphi > 1e-12 || dasp > 1e-12) {
        bool moved = false;
        for (auto [sp, sa] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
            const double cp = phi + sp * dphi, ca = std::min(1.0, aspect + sa * dasp);
            const double v = area_of(cp, ca);
            if (v > best) best = v, phi = cp, aspect = ca, moved = true;
        }
        if (!moved) dphi *= 0.5, dasp *= 0.5;
    }
    const double c = best_scale(phi, aspect);
    phi = std::fmod(phi, pi);
    if (phi < 0.0) phi += pi;
    return {c, c * aspect, phi};
}

// --- random bodies ---------------------------------------------------------------

/// s = 1 + sum a_j cos(2 j theta + phi_j) with sum (4 j^2 + 1)|a_j| <= budget.
inline std::vector<double> random_body(std::mt19937_64& rng, std::size_t n, double budget = 0.7, int modes = 3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> amp(modes), ph(modes);
    double total = 0.0;
    for (int j = 0; j < modes; ++j) total += (amp[j] = u(rng));
    for (int j = 0; j < modes; ++j) {
        const double k = 2.0 * (j + 1);
        amp[j] = (u(rng) < 0.5 ? -1.0 : 1.0) * budget * u(rng) * amp[j] / (total * (k * k + 1.0));
        ph[j] = 2.0 * pi * u(rng);
    }
    std::vector<double> s;
    for (double t : grid(n)) {
        double v = 1.0;
        for (int j = 0; j < modes; ++j) v += amp[j] * std::cos(2.0 * (j + 1) * t + ph[j]);
        s.push_back(v);
    }
    return s;
}

}  // namespace oracle
