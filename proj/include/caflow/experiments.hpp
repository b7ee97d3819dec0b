#pragma once

// Run configuration, initial-shape descriptors, output writers and the
// command implementations behind the `caflow` tool.
//
// Shape descriptors:
//   disk:r
//   ellipse:a,b[,phi]
//   trig:c0,(k,a_k[,phi_k]),...      s = c0 + sum a_k cos(k theta + phi_k), k even
//   file:path                        JSON {"s": [...]}, a JSON array, or whitespace-separated values

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "caflow/affine_invariants.hpp"
#include "caflow/ellipse.hpp"
#include "caflow/errors.hpp"
#include "caflow/flow.hpp"
#include "caflow/geometry.hpp"
#include "caflow/monitors.hpp"
#include "caflow/normalize.hpp"

namespace caflow::experiments {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kMonitorFailure = 1, kConfigError = 2, kRunAborted = 3, kOptimFailure = 4 };

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

inline double parse_double(const std::string& text, const std::string& what) {
    const auto t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse " + what + ": '" + text + "'");
    }
    if (used != t.size() || !std::isfinite(v)) throw InvalidArgument("cannot parse " + what + ": '" + text + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Comma-separated list of reals; "a-b" ranges are not accepted here.
inline std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    if (detail::trim(text).empty()) return out;
    for (const auto& part : detail::split(text, ',')) out.push_back(detail::parse_double(part, what));
    return out;
}

/// Comma-separated seeds; "a-b" expands to the inclusive range.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    if (detail::trim(text).empty()) return out;
    for (const auto& raw : detail::split(text, ',')) {
        const auto part = detail::trim(raw);
        const auto dash = part.find('-', 1);
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoull(part));
            } else {
                const auto lo = std::stoull(part.substr(0, dash)), hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) throw InvalidArgument("empty seed range '" + part + "'");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw InvalidArgument("cannot parse seed '" + part + "'");
        }
    }
    return out;
}

// --- initial shapes ----------------------------------------------------------

struct TrigMode {
    int k = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct ShapeDescriptor {
    enum class Kind { disk, ellipse, trig, file };
    Kind kind = Kind::disk;
    std::string text = "disk:1";
    double radius = 1.0;
    EllipseSpec ellipse;
    double c0 = 1.0;
    std::vector<TrigMode> modes;
    std::string path;

    static ShapeDescriptor parse(const std::string& text) {
        ShapeDescriptor d;
        d.text = detail::trim(text);
        const auto colon = d.text.find(':');
        if (colon == std::string::npos) throw InvalidArgument("shape descriptor needs 'kind:args': '" + text + "'");
        const auto kind = d.text.substr(0, colon);
        const auto args = d.text.substr(colon + 1);
        if (kind == "disk") {
            d.kind = Kind::disk;
            d.radius = detail::parse_double(args, "disk radius");
            if (!(d.radius > 0.0)) throw InvalidArgument("disk radius must be positive");
        } else if (kind == "ellipse") {
            d.kind = Kind::ellipse;
            const auto v = parse_real_list(args, "ellipse parameters");
            if (v.size() != 2 && v.size() != 3) throw InvalidArgument("ellipse descriptor needs a,b[,phi]");
            d.ellipse = EllipseSpec::make(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
        } else if (kind == "trig") {
            d.kind = Kind::trig;
            parse_trig(args, d);
        } else if (kind == "file") {
            d.kind = Kind::file;
            d.path = detail::trim(args);
            if (d.path.empty()) throw InvalidArgument("file descriptor needs a path");
        } else {
            throw InvalidArgument("unknown shape kind '" + kind + "'");
        }
        return d;
    }

    /// Samples the shape on n points and validates it as a flow state.
    SupportProfile build(std::size_t n) const {
        const AngularGrid grid(n);
        SupportProfile s = [&] {
            switch (kind) {
                case Kind::disk: return SupportProfile::constant(n, radius);
                case Kind::ellipse: return ellipse.profile(n);
                case Kind::trig:
                    return SupportProfile::sample(n, [this](double t) {
                        double v = c0;
                        for (const auto& m : modes) v += m.amplitude * std::cos(m.k * t + m.phase);
                        return v;
                    });
                case Kind::file: return load_file(n);
            }
            throw InvalidArgument("unreachable shape kind");
        }();
        try {
            require_valid(s);
        } catch (const NonConvex& e) {
            throw InvalidArgument(std::string("initial shape is not a valid state: ") + e.what());
        }
        return s;
    }

private:
    static void parse_trig(const std::string& args, ShapeDescriptor& d) {
        const auto paren = args.find('(');
        const auto head = detail::trim(args.substr(0, paren));
        auto c0_text = head;
        if (!c0_text.empty() && c0_text.back() == ',') c0_text.pop_back();
        d.c0 = detail::parse_double(c0_text, "trig constant term");
        std::size_t pos = paren;
        while (pos != std::string::npos && pos < args.size()) {
            const auto close = args.find(')', pos);
            if (close == std::string::npos) throw InvalidArgument("unbalanced parenthesis in trig descriptor");
            const auto v = parse_real_list(args.substr(pos + 1, close - pos - 1), "trig mode");
            if (v.size() != 2 && v.size() != 3) throw InvalidArgument("trig mode needs (k,a_k[,phi_k])");
            if (v[0] != std::round(v[0]) || v[0] < 1.0) throw InvalidArgument("trig mode frequency must be a positive integer");
            TrigMode m{static_cast<int>(v[0]), v[1], v.size() == 3 ? v[2] : 0.0};
            if (m.k % 2 != 0) throw InvalidArgument("trig mode frequency must be even (origin symmetry)");
            d.modes.push_back(m);
            pos = args.find('(', close);
            const auto between = detail::trim(args.substr(close + 1, pos == std::string::npos ? std::string::npos : pos - close - 1));
            if (!between.empty() && between != ",") throw InvalidArgument("unexpected text in trig descriptor: '" + between + "'");
        }
    }

    SupportProfile load_file(std::size_t n) const {
        std::ifstream in(path);
        if (!in) throw InvalidArgument("cannot open shape file '" + path + "'");
        const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::vector<double> v;
        const auto first = content.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && (content[first] == '{' || content[first] == '[')) {
            try {
                const auto j = json::parse(content);
                v = (j.is_object() ? j.at("s") : j).get<std::vector<double>>();
            } catch (const json::exception& e) {
                throw InvalidArgument("bad shape file '" + path + "': " + e.what());
            }
        } else {
            std::istringstream ss(content);
            double x;
            while (ss >> x) v.push_back(x);
            if (!ss.eof()) throw InvalidArgument("bad number in shape file '" + path + "'");
        }
        if (v.size() < 8 || v.size() % 2 != 0) throw InvalidArgument("shape file needs an even number (>= 8) of samples");
        SupportProfile src(std::move(v));
        if (src.size() == n) return src;
        return SupportProfile(trig_eval(src, AngularGrid(n).angles()));
    }
};

/// Deterministic generator on top of mt19937_64 (whose output sequence is
/// fixed by the standard).
class SplitRandom {
public:
    explicit SplitRandom(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 eng_;
};

/// s = 1 + sum_{j=1..modes} a_j cos(2 j theta + phi_j) with
/// sum (4 j^2 + 1) |a_j| < 0.8, so min r > 0.2 and min s > 0.2.
inline ShapeDescriptor random_trig_body(std::uint64_t seed, int modes = 4) {
    SplitRandom rng(seed);
    std::vector<double> w(static_cast<std::size_t>(modes));
    double total = 0.0;
    for (auto& x : w) total += (x = rng.uniform());
    const double budget = rng.uniform(0.1, 0.8);
    ShapeDescriptor d;
    d.kind = ShapeDescriptor::Kind::trig;
    d.c0 = 1.0;
    std::string text = "trig:1";
    for (int j = 1; j <= modes; ++j) {
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double amplitude = sign * budget * w[j - 1] / (total * (4.0 * j * j + 1.0));
        TrigMode m{2 * j, amplitude, rng.uniform(0.0, 2.0 * std::numbers::pi)};
        d.modes.push_back(m);
        text += ",(" + std::to_string(m.k) + "," + detail::format_double(m.amplitude) + "," +
                detail::format_double(m.phase) + ")";
    }
    d.text = text;
    return d;
}

// --- configuration -----------------------------------------------------------

struct MonitorSelection {
    bool harnack = false;
    bool monotone = false;
    bool ancient = false;
    bool residual = false;
    std::vector<double> omega_l;

    static MonitorSelection parse(const std::string& text) {
        MonitorSelection m;
        for (const auto& raw : detail::split(text, ',')) {
            const auto item = detail::trim(raw);
            if (item.empty()) continue;
            if (item == "harnack") m.harnack = true;
            else if (item == "monotone") m.monotone = true;
            else if (item == "ancient") m.ancient = true;
            else if (item == "residual") m.residual = true;
            else if (item.rfind("omega_l:", 0) == 0) {
                const double l = detail::parse_double(item.substr(8), "omega_l order");
                if (!(l >= 2.0)) throw InvalidArgument("omega_l order must be >= 2");
                m.omega_l.push_back(l);
            } else {
                throw InvalidArgument("unknown monitor '" + item + "'");
            }
        }
        return m;
    }

    std::string to_string() const {
        std::string out;
        const auto add = [&out](const std::string& s) { out += (out.empty() ? "" : ",") + s; };
        if (harnack) add("harnack");
        if (monotone) add("monotone");
        for (double l : omega_l) add("omega_l:" + detail::format_double(l));
        if (ancient) add("ancient");
        if (residual) add("residual");
        return out;
    }
};

struct RunConfig {
    double p = 2.0;
    std::size_t n = 256;
    std::string init = "disk:1";
    std::optional<double> t_end;
    std::optional<double> stop_area;
    double tol_step = 1e-8;
    std::size_t monitor_every = 10;
    MonitorSelection monitors = MonitorSelection::parse("harnack,monotone");
    std::string out_dir = ".";
    std::uint64_t seed = 0;

    void validate() const {
        if (!(p >= 1.0)) throw InvalidArgument("p < 1 unsupported");
        if (n < 64 || (n & (n - 1)) != 0) throw InvalidArgument("n must be a power of two >= 64");
        if (monitor_every == 0) throw InvalidArgument("monitor_every must be >= 1");
        flow_params().validate();
        ShapeDescriptor::parse(init).build(n);
    }

    FlowParams flow_params() const {
        FlowParams f;
        f.p = p;
        f.tol_step = tol_step;
        f.t_end = t_end;
        f.stop_area = stop_area;
        return f;
    }

    /// Overrides fields present in `j` (keys mirror the field names).
    void apply_json(const json& j) {
        try {
            if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
            for (const auto& [key, value] : j.items()) {
                if (key == "p") p = value.get<double>();
                else if (key == "n") n = value.get<std::size_t>();
                else if (key == "init") init = value.get<std::string>();
                else if (key == "t_end") t_end = value.is_null() ? std::nullopt : std::optional(value.get<double>());
                else if (key == "stop_area") stop_area = value.is_null() ? std::nullopt : std::optional(value.get<double>());
                else if (key == "tol_step") tol_step = value.get<double>();
                else if (key == "monitor_every") monitor_every = value.get<std::size_t>();
                else if (key == "monitors") monitors = MonitorSelection::parse(value.get<std::string>());
                else if (key == "out_dir") out_dir = value.get<std::string>();
                else if (key == "seed") seed = value.get<std::uint64_t>();
                else throw InvalidArgument("unknown config key '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw InvalidArgument(std::string("bad config value: ") + e.what());
        }
    }

    json to_json() const {
        json j;
        j["p"] = p;
        j["n"] = n;
        j["init"] = init;
        j["t_end"] = t_end ? json(*t_end) : json(nullptr);
        j["stop_area"] = stop_area ? json(*stop_area) : json(nullptr);
        j["tol_step"] = tol_step;
        j["monitor_every"] = monitor_every;
        j["monitors"] = monitors.to_string();
        j["out_dir"] = out_dir;
        j["seed"] = seed;
        return j;
    }
};

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("config file '" + path + "' is not valid JSON: " + e.what());
    }
    base.apply_json(j);
    return base;
}

// --- writers -----------------------------------------------------------------

inline constexpr const char* kTrajectoryColumns =
    "t,A,A_star,AAstar,Omega1,Omega2,Omegap,ratio_p,sigma_max,sigma_min,R_max,dt";

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << kTrajectoryColumns << '\n';
    for (const auto& e : traj.entries) {
        const auto& r = e.record;
        const double row[] = {e.t,       r.A,        r.A_star,    r.AAstar,    r.Omega_1,        r.Omega_2,
                              r.Omega_p, r.ratio_p,  r.sigma_max, r.sigma_min, r.harnack_R_max, e.dt};
        for (std::size_t i = 0; i < std::size(row); ++i) out << (i ? "," : "") << detail::format_double(row[i]);
        out << '\n';
    }
}

/// One JSON object {"t": ..., "s": [...]} per line, for every `every`-th record and the last one.
inline void write_snapshots_jsonl(std::ostream& out, const Trajectory& traj, std::size_t every) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i % every != 0 && i + 1 != traj.size()) continue;
        const auto& e = traj.entries[i];
        json j;
        j["t"] = e.t;
        j["s"] = std::vector<double>(e.state.values().begin(), e.state.values().end());
        out << j.dump() << '\n';
    }
}

// --- monitors ----------------------------------------------------------------

struct MonitorOutcome {
    json report = json::object();
    bool all_pass = true;
    /// Smallest margins, used by the sweep summary: most negative relative
    /// decrease of a monotone quantity, and max R / scale.
    double worst_monotone_margin = 0.0;
    double worst_R_margin = -1.0;
};

inline MonitorOutcome run_monitors(const Trajectory& traj, const FlowParams& params, const MonitorSelection& sel,
                                   const ShapeDescriptor& init) {
    MonitorOutcome out;
    const auto record = [&out](const std::string& name, json j, bool pass) {
        j["pass"] = pass;
        out.report[name] = std::move(j);
        out.all_pass = out.all_pass && pass;
    };
    if (sel.harnack) {
        const auto h = check_harnack(traj, params);
        out.worst_R_margin = h.worst_R_ratio;
        record("harnack", {{"worst_R_ratio", h.worst_R_ratio}, {"worst_increment", h.worst_increment}}, h.pass);
    }
    if (sel.monotone) {
        const auto area_law = check_area_law(traj);
        json j = {{"area_law_residual", area_law.max_relative_residual}};
        bool pass = area_law.pass;
        if (traj.size() >= 3) {
            const auto m = check_monotone(traj, params);
            j["worst_area_product"] = m.worst_area_product;
            j["worst_ratio_p"] = m.worst_ratio_p;
            j["worst_omega_2"] = m.worst_omega_2;
            j["worst_omega_2_bound_margin"] = m.worst_bound_margin;
            j["spread_area_product"] = m.spread_area_product;
            j["spread_ratio_p"] = m.spread_ratio_p;
            j["spread_omega_2"] = m.spread_omega_2;
            out.worst_monotone_margin = std::min({m.worst_area_product, m.worst_ratio_p, m.worst_omega_2});
            pass = pass && m.pass;
        } else {
            j["note"] = "fewer than 3 records";
        }
        record("monotone", j, pass);
    }
    for (double l : sel.omega_l) {
        const auto o = check_omega_l_evolution(traj, params, l);
        record("omega_l:" + detail::format_double(l),
               {{"l", l}, {"max_relative_residual", o.max_relative_residual}, {"records_checked", o.records_checked}},
               o.pass);
    }
    if (sel.ancient) {
        std::optional<EllipseSpec> e;
        if (init.kind == ShapeDescriptor::Kind::disk) e = EllipseSpec::make(init.radius, init.radius);
        if (init.kind == ShapeDescriptor::Kind::ellipse) e = init.ellipse;
        if (e) {
            const auto times = ancient_time_grid(*e, params.p);
            const auto a = check_ancient_inequalities(*e, params, times, traj.front().state.size());
            record("ancient",
                   {{"max_sigma_rate", a.max_sigma_rate}, {"max_excess", a.max_excess}, {"max_abs_rhs", a.max_abs_rhs},
                    {"samples", a.samples}},
                   a.pass);
        } else {
            record("ancient", {{"skipped", "initial shape is not an origin-centred ellipse"}}, true);
        }
    }
    if (sel.residual) {
        const auto ratio = sigma_ratio_diagnostic(traj);
        const double first = ellipse_residual(john_normalize(traj.front().state).state);
        const double last = ellipse_residual(john_normalize(traj.back().state).state);
        const bool pass = ratio.bounded && last <= first * (1.0 + 1e-6) + 1e-9;
        // Omega_1^3 / A is GL(2)-invariant, so the normalized run shares it.
        double floor = std::numeric_limits<double>::infinity();
        for (const auto& e : traj.entries) floor = std::min(floor, std::pow(e.record.Omega_1, 3) / e.record.A);
        record("residual",
               {{"sigma_ratio_initial", ratio.initial()},
                {"sigma_ratio_final", ratio.final()},
                {"ellipse_residual_initial", first},
                {"ellipse_residual_final", last},
                {"omega1_ratio_floor", floor}},
               pass);
    }
    return out;
}

// --- commands ----------------------------------------------------------------

struct SimulateResult {
    int exit_code = kOk;
    json report;
};

/// Runs one simulation and writes trajectory.csv, snapshots.jsonl and report.json to config.out_dir.
inline SimulateResult run_simulation(const RunConfig& config, std::ostream& log) {
    SimulateResult res;
    ShapeDescriptor init;
    SupportProfile s0 = SupportProfile::constant(8, 1.0);
    try {
        config.validate();
        init = ShapeDescriptor::parse(config.init);
        s0 = init.build(config.n);
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        res.exit_code = kConfigError;
        res.report = {{"error", e.what()}};
        return res;
    }
    const auto params = config.flow_params();
    const auto traj = simulate(s0, params, config.monitor_every);

    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "trajectory.csv");
        write_trajectory_csv(csv, traj);
        std::ofstream snaps(dir / "snapshots.jsonl");
        write_snapshots_jsonl(snaps, traj, config.monitor_every);
    }

    const auto mon = run_monitors(traj, params, config.monitors, init);
    const bool aborted = (traj.reason == Termination::convexity_loss || traj.reason == Termination::step_underflow) &&
                         config.t_end.has_value() && traj.back().t < *config.t_end;
    res.report = {{"config", config.to_json()},
                  {"termination", std::string(to_string(traj.reason))},
                  {"final_t", traj.back().t},
                  {"accepted_steps", traj.accepted_steps},
                  {"rejected_steps", traj.rejected_steps},
                  {"records", traj.size()},
                  {"monitors", mon.report},
                  {"all_pass", mon.all_pass},
                  {"worst_monotone_margin", mon.worst_monotone_margin},
                  {"worst_R_margin", mon.worst_R_margin}};
    res.exit_code = aborted ? kRunAborted : (mon.all_pass ? kOk : kMonitorFailure);
    res.report["exit_code"] = res.exit_code;
    std::ofstream(dir / "report.json") << res.report.dump(2) << '\n';
    log << "termination=" << to_string(traj.reason) << " t=" << detail::format_double(traj.back().t)
        << " monitors=" << (mon.all_pass ? "pass" : "FAIL") << '\n';
    return res;
}

inline int cmd_simulate(const RunConfig& config, std::ostream& log) { return run_simulation(config, log).exit_code; }

inline int cmd_invariants(const std::string& descriptor, std::size_t n, const std::vector<double>& ps, std::ostream& out,
                          std::ostream& log) {
    SupportProfile s = SupportProfile::constant(8, 1.0);
    try {
        if (ps.empty()) throw InvalidArgument("empty p list");
        for (double p : ps) require_p(p);
        s = ShapeDescriptor::parse(descriptor).build(n);
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConfigError;
    }
    const auto st = affine_state(s);
    const auto fr = frame_identity_residuals(s);
    json j;
    j["init"] = descriptor;
    j["n"] = n;
    j["A"] = area(s);
    j["A_star"] = polar_area(s);
    j["AAstar"] = area(s) * polar_area(s);
    j["Omega1"] = affine_perimeter(st, 1.0);
    j["Omega2"] = affine_perimeter(st, 2.0);
    json per_p = json::array();
    for (double p : ps) {
        per_p.push_back({{"p", p},
                         {"Omega_p", affine_perimeter(st, p)},
                         {"ratio_p", isoperimetric_ratio(s, p)},
                         {"bound", isoperimetric_bound(p)}});
    }
    j["per_p"] = per_p;
    j["sigma_max"] = st.sigma_max();
    j["sigma_min"] = st.sigma_min();
    j["mu_max"] = *std::max_element(st.mu.begin(), st.mu.end());
    j["mu_min"] = *std::min_element(st.mu.begin(), st.mu.end());
    j["frame_residual_unimodular"] = fr.unimodular;
    j["frame_residual_support"] = fr.support;
    j["ellipse_residual"] = ellipse_residual(s);
    out << j.dump(2) << '\n';
    return kOk;
}

inline int cmd_normalize(const std::string& descriptor, std::size_t n, const std::optional<std::string>& snapshot_path,
                         std::ostream& out, std::ostream& log) {
    SupportProfile s = SupportProfile::constant(8, 1.0);
    try {
        s = ShapeDescriptor::parse(descriptor).build(n);
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConfigError;
    }
    try {
        const auto ell = john_ellipse(s);
        const auto ns = john_normalize(s);
        double dist = 0.0;
        for (double v : ns.state.values()) dist = std::max(dist, std::abs(v - 1.0));
        json j;
        j["init"] = descriptor;
        j["john_ellipse"] = {{"a", ell.a}, {"b", ell.b}, {"phi", ell.phi}};
        j["scale"] = ns.scale;
        j["map"] = {{ns.map.m11, ns.map.m12}, {ns.map.m21, ns.map.m22}};
        j["map_det"] = ns.map.det();
        j["sandwich_lower_margin"] = ns.state.min() - std::numbers::sqrt2 / 2.0;
        j["sandwich_upper_margin"] = std::numbers::sqrt2 - ns.state.max();
        j["distance_to_disk"] = dist;
        out << j.dump(2) << '\n';
        if (snapshot_path) {
            json snap;
            snap["t"] = 0.0;
            snap["s"] = std::vector<double>(ns.state.values().begin(), ns.state.values().end());
            std::ofstream(*snapshot_path) << snap.dump() << '\n';
        }
    } catch (const OptimFail& e) {
        log << "error: " << e.what() << '\n';
        return kOptimFailure;
    } catch (const SandwichViolation& e) {
        log << "error: " << e.what() << '\n';
        return kOptimFailure;
    }
    return kOk;
}

inline constexpr double kSweepDefaultTEnd = 0.1;
inline constexpr const char* kSweepColumns =
    "run,p,seed,init,termination,final_t,exit_code,all_pass,worst_monotone_margin,worst_R_margin";

/// Runs the monitor suite over every (p, seed) pair with a random trig body,
/// one output directory per run plus summary.csv. Runs execute on up to
/// hardware_concurrency() threads; results are ordered by (p, seed).
inline int cmd_sweep(const RunConfig& base, const std::vector<double>& ps, const std::vector<std::uint64_t>& seeds,
                     std::ostream& log) {
    if (ps.empty() || seeds.empty()) {
        log << "error: sweep needs at least one p and one seed\n";
        return kConfigError;
    }
    try {
        for (double p : ps) require_p(p);
        RunConfig probe = base;
        probe.p = ps.front();
        probe.init = "disk:1";
        probe.validate();
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kConfigError;
    }

    struct Job {
        std::string name;
        RunConfig config;
        double p;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (double p : ps) {
        for (auto seed : seeds) {
            Job job{"run_p" + detail::format_double(p) + "_seed" + std::to_string(seed), base, p, seed};
            job.config.p = p;
            job.config.seed = seed;
            job.config.init = random_trig_body(seed).text;
            if (!job.config.t_end) job.config.t_end = kSweepDefaultTEnd;
            job.config.out_dir = (std::filesystem::path(base.out_dir) / job.name).string();
            jobs.push_back(std::move(job));
        }
    }

    std::vector<SimulateResult> results(jobs.size());
    const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < jobs.size(); start += workers) {
        std::vector<std::future<SimulateResult>> batch;
        for (std::size_t i = start; i < std::min(jobs.size(), start + workers); ++i) {
            batch.push_back(std::async(std::launch::async, [&job = jobs[i]] {
                std::ostringstream quiet;
                try {
                    return run_simulation(job.config, quiet);
                } catch (const std::exception& e) {
                    return SimulateResult{kRunAborted, {{"error", e.what()}}};
                }
            }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
    }

    std::filesystem::create_directories(base.out_dir);
    std::ofstream summary(std::filesystem::path(base.out_dir) / "summary.csv");
    summary << kSweepColumns << '\n';
    bool all_pass = true;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& r = results[i].report;
        const bool pass = results[i].exit_code == kOk;
        all_pass = all_pass && pass;
        summary << jobs[i].name << ',' << detail::format_double(jobs[i].p) << ',' << jobs[i].seed << ",\""
                << jobs[i].config.init << "\"," << r.value("termination", std::string("error")) << ','
                << detail::format_double(r.value("final_t", 0.0)) << ',' << results[i].exit_code << ','
                << (pass ? "true" : "false") << ',' << detail::format_double(r.value("worst_monotone_margin", 0.0))
                << ',' << detail::format_double(r.value("worst_R_margin", 0.0)) << '\n';
        log << jobs[i].name << ": " << (pass ? "pass" : "FAIL") << '\n';
    }
    return all_pass ? kOk : kMonitorFailure;
}

}  // namespace caflow::experiments
