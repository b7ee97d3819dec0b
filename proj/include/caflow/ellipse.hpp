#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "caflow/errors.hpp"
#include "caflow/geometry.hpp"

namespace caflow {

/// Origin-centred ellipse with semi-axes a >= b > 0, major axis at angle phi in [0, pi).
struct EllipseSpec {
    double a = 1.0;
    double b = 1.0;
    double phi = 0.0;

    /// Canonical form: swaps axes if needed and reduces phi into [0, pi).
    static EllipseSpec make(double a, double b, double phi = 0.0) {
        if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("EllipseSpec: semi-axes must be positive");
        if (a < b) {
            std::swap(a, b);
            phi += 0.5 * std::numbers::pi;
        }
        phi = std::fmod(phi, std::numbers::pi);
        if (phi < 0.0) phi += std::numbers::pi;
        return {a, b, phi};
    }

    double area() const { return std::numbers::pi * a * b; }

    /// h(theta) = sqrt(a^2 cos^2(theta - phi) + b^2 sin^2(theta - phi)).
    double support(double theta) const {
        const double c = std::cos(theta - phi), s = std::sin(theta - phi);
        return std::sqrt(a * a * c * c + b * b * s * s);
    }

    /// The SPD matrix M with E = M(unit disk).
    LinearMap2 matrix() const {
        const auto R = LinearMap2::rotation(phi);
        return R * LinearMap2::diagonal(a, b) * R.transpose();
    }

    SupportProfile profile(std::size_t n) const {
        return SupportProfile::sample(n, [this](double t) { return support(t); });
    }
};

}  // namespace caflow
