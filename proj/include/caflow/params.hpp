#pragma once

#include <optional>

#include "caflow/errors.hpp"

namespace caflow {

/// Exponent and integrator controls for the p centro-affine normal flow
/// d s / d t = -s^{1+3 alpha} r^alpha, alpha = -p/(p+2).
struct FlowParams {
    double p = 2.0;
    double dt_init = 1e-4;
    /// Fraction of the explicit stability limit used as a step ceiling.
    double dt_safety = 0.8;
    /// Relative local-error tolerance for step-doubling control.
    double tol_step = 1e-8;
    std::optional<double> t_end;
    /// Area floor; simulate() defaults it to 1e-3 * A(0).
    std::optional<double> stop_area;

    double alpha() const { return -p / (p + 2.0); }
    /// 1 + 3 alpha = 1 - 3p/(p+2).
    double speed_exponent() const { return 1.0 + 3.0 * alpha(); }
    /// alpha / (alpha - 1) = p / (2p + 2), the Harnack time exponent.
    double harnack_exponent() const { return p / (2.0 * p + 2.0); }

    void validate() const {
        if (!(p >= 1.0)) throw InvalidArgument("p < 1 unsupported");
        if (!(dt_init > 0.0)) throw InvalidArgument("dt_init must be positive");
        if (!(dt_safety > 0.0 && dt_safety < 1.0)) throw InvalidArgument("dt_safety must lie in (0, 1)");
        if (!(tol_step > 0.0)) throw InvalidArgument("tol_step must be positive");
        if (t_end && !(*t_end >= 0.0)) {
            throw InvalidArgument("backward time integration is not supported (t_end < 0)");
        }
        if (stop_area && !(*stop_area >= 0.0)) throw InvalidArgument("stop_area must be non-negative");
    }
};

}  // namespace caflow
