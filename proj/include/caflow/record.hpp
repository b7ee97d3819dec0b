#pragma once

#include "caflow/affine_invariants.hpp"
#include "caflow/geometry.hpp"
#include "caflow/harnack.hpp"
#include "caflow/params.hpp"

namespace caflow {

/// Non-decrease of the monotone quantities relative to the previous record.
struct MonotoneFlags {
    bool area_product = true;
    bool ratio_p = true;
    bool omega_2 = true;
};

/// One time slice of the monitored functionals.
struct InvariantRecord {
    double t = 0.0;
    double A = 0.0;
    double A_star = 0.0;
    double AAstar = 0.0;
    double Omega_1 = 0.0;
    double Omega_2 = 0.0;
    double Omega_p = 0.0;
    double ratio_p = 0.0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double harnack_R_max = 0.0;
    double harnack_R_scale = 0.0;
    MonotoneFlags monotone;
};

inline InvariantRecord make_record(const SupportProfile& s, const FlowParams& params, double t) {
    const auto st = affine_state(s);
    InvariantRecord rec;
    rec.t = t;
    rec.A = area(s);
    rec.A_star = polar_area(s);
    rec.AAstar = rec.A * rec.A_star;
    rec.Omega_1 = affine_perimeter(st, 1.0);
    rec.Omega_2 = affine_perimeter(st, 2.0);
    rec.Omega_p = affine_perimeter(st, params.p);
    rec.ratio_p = std::pow(rec.Omega_p, params.p + 2.0) / std::pow(rec.A, 2.0 - params.p);
    rec.sigma_max = st.sigma_max();
    rec.sigma_min = st.sigma_min();
    const auto h = harnack_quantities(s, params, t);
    rec.harnack_R_max = h.R_max();
    rec.harnack_R_scale = h.R_scale(params);
    return rec;
}

/// Flags `cur` against `prev` using tolerance 1e-8 |q| + 1e2 * err_rel * |q|.
inline void flag_monotone(const InvariantRecord& prev, InvariantRecord& cur, double err_rel) {
    const auto ok = [err_rel](double before, double after) {
        const double tol = (1e-8 + 1e2 * err_rel) * std::max(std::abs(before), std::abs(after));
        return after - before >= -tol;
    };
    cur.monotone.area_product = ok(prev.AAstar, cur.AAstar);
    cur.monotone.ratio_p = ok(prev.ratio_p, cur.ratio_p);
    cur.monotone.omega_2 = ok(prev.Omega_2, cur.Omega_2);
}

}  // namespace caflow
