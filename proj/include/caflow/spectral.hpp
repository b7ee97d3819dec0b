#pragma once

// Trigonometric (Fourier) calculus on uniformly sampled periodic data.
//
// Samples f_k = f(2*pi*k/n), k = 0..n-1, are treated as the band-limited
// interpolant sum_{|m|<=n/2} c_m e^{i m theta}. The Nyquist mode is split
// symmetrically, so it contributes c_{n/2} cos(n theta/2) and has zero
// odd-order derivatives.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "caflow/errors.hpp"

namespace caflow::spectral {

using Complex = std::complex<double>;

namespace detail {

// Eigen::FFT caches twiddle tables per instance; one instance per thread
// keeps calls reentrant.
inline Eigen::FFT<double>& engine() {
    thread_local Eigen::FFT<double> fft = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
        return f;
    }();
    return fft;
}

inline void require_even(std::size_t n) {
    if (n < 2 || n % 2 != 0) {
        throw InvalidArgument("spectral: sample count must be even and >= 2");
    }
}

}  // namespace detail

/// Unscaled half spectrum (n/2 + 1 coefficients) of real samples.
inline std::vector<Complex> half_spectrum(std::span<const double> f) {
    detail::require_even(f.size());
    std::vector<double> in(f.begin(), f.end());
    std::vector<Complex> out;
    detail::engine().fwd(out, in);
    out.resize(f.size() / 2 + 1);
    return out;
}

inline std::vector<double> from_half_spectrum(std::vector<Complex> spec, std::size_t n) {
    std::vector<double> out;
    detail::engine().inv(out, spec, static_cast<Eigen::Index>(n));
    out.resize(n);
    return out;
}

/// d^order f / d theta^order on the same grid. Modes above `max_mode`
/// (default: all) are dropped first.
inline std::vector<double> derivative(std::span<const double> f, int order,
                                      std::size_t max_mode = std::size_t(-1)) {
    if (order < 0) {
        throw InvalidArgument("spectral::derivative: negative order");
    }
    if (order == 0 && max_mode == std::size_t(-1)) {
        return {f.begin(), f.end()};
    }
    const std::size_t n = f.size();
    auto spec = half_spectrum(f);
    const std::size_t nyq = n / 2;
    for (std::size_t m = 0; m <= nyq; ++m) {
        if (m > max_mode) {
            spec[m] = 0.0;
            continue;
        }
        Complex factor = 1.0;
        for (int o = 0; o < order; ++o) factor *= Complex(0.0, static_cast<double>(m));
        spec[m] *= factor;
    }
    if (order % 2 == 1) {
        spec[nyq] = 0.0;
    } else {
        spec[nyq] = Complex(spec[nyq].real(), 0.0);
    }
    spec[0] = Complex(order == 0 ? spec[0].real() : 0.0, 0.0);
    return from_half_spectrum(std::move(spec), n);
}

/// Evaluates the trigonometric interpolant of samples with half spectrum
/// `spec` (as returned by half_spectrum) at an arbitrary angle.
inline double evaluate(std::span<const Complex> spec, std::size_t n, double angle) {
    const std::size_t nyq = n / 2;
    double acc = spec[0].real();
    for (std::size_t m = 1; m < nyq; ++m) {
        const double ph = static_cast<double>(m) * angle;
        acc += 2.0 * (spec[m].real() * std::cos(ph) - spec[m].imag() * std::sin(ph));
    }
    acc += spec[nyq].real() * std::cos(static_cast<double>(nyq) * angle);
    return acc / static_cast<double>(n);
}

/// F(theta_k) = integral_0^{theta_k} f, spectrally accurate for smooth f.
inline std::vector<double> cumulative_integral(std::span<const double> f) {
    const std::size_t n = f.size();
    auto spec = half_spectrum(f);
    const double mean = spec[0].real() / static_cast<double>(n);
    const std::size_t nyq = n / 2;
    spec[0] = 0.0;
    spec[nyq] = 0.0;
    for (std::size_t m = 1; m < nyq; ++m) {
        spec[m] /= Complex(0.0, static_cast<double>(m));
    }
    auto periodic = from_half_spectrum(std::move(spec), n);
    const double p0 = periodic[0];
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        periodic[k] += mean * h * static_cast<double>(k) - p0;
    }
    return periodic;
}

/// Trapezoidal rule for integral_0^{2 pi} f d theta.
inline double integrate(std::span<const double> f) {
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc * 2.0 * std::numbers::pi / static_cast<double>(f.size());
}

}  // namespace caflow::spectral
