#pragma once

// Harnack quantities of the Gauss-parametrized flow. With f = s^{1+3a} r^a
// (the normal speed, a = alpha):
//
//   Q = f_theta_theta + f
//   P = d^2 s / dt^2 = (1+3a) s^{1+6a} r^{2a} + a s^{1+3a} r^{a-1} Q
//   R = t P - a/(a-1) f
//
// R <= 0 along forward solutions with t measured from the initial time.

#include <algorithm>
#include <cmath>
#include <vector>

#include "caflow/geometry.hpp"
#include "caflow/params.hpp"
#include "caflow/spectral.hpp"

namespace caflow {

struct HarnackState {
    std::vector<double> speed;  // f = s^{1+3 alpha} r^alpha
    std::vector<double> Q;
    std::vector<double> P;
    std::vector<double> R;

    double R_max() const { return *std::max_element(R.begin(), R.end()); }
    /// max_k a/(a-1) f_k, the natural magnitude of R.
    double R_scale(const FlowParams& params) const {
        return params.harnack_exponent() * *std::max_element(speed.begin(), speed.end());
    }
};

inline HarnackState harnack_quantities(const SupportProfile& s, const FlowParams& params, double t_elapsed) {
    if (!(t_elapsed >= 0.0)) throw InvalidArgument("harnack_quantities: t_elapsed must be >= 0");
    require_positive(s);
    const double a = params.alpha();
    const double e = params.speed_exponent();
    const auto r = radius_of_curvature(s);
    const std::size_t n = s.size();

    HarnackState h;
    h.speed.resize(n);
    for (std::size_t k = 0; k < n; ++k) h.speed[k] = std::pow(s[k], e) * std::pow(r[k], a);
    h.Q = spectral::derivative(h.speed, 2);
    h.P.resize(n);
    h.R.resize(n);
    const double c = params.harnack_exponent();
    for (std::size_t k = 0; k < n; ++k) {
        h.Q[k] += h.speed[k];
        h.P[k] = (1.0 + 3.0 * a) * std::pow(s[k], 1.0 + 6.0 * a) * std::pow(r[k], 2.0 * a) +
                 a * h.speed[k] / r[k] * h.Q[k];
        h.R[k] = t_elapsed * h.P[k] - c * h.speed[k];
    }
    return h;
}

/// s^{1-3p/(p+2)} r^{-p/(p+2)} t^{p/(2p+2)} per grid point; non-decreasing in t.
inline std::vector<double> harnack_monotone_quantity(const SupportProfile& s, const FlowParams& params,
                                                     double t_elapsed) {
    const auto r = radius_of_curvature(s);
    const double tw = std::pow(t_elapsed, params.harnack_exponent());
    std::vector<double> out(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        out[k] = std::pow(s[k], params.speed_exponent()) * std::pow(r[k], params.alpha()) * tw;
    }
    return out;
}

}  // namespace caflow
