// Command-line front end: simulate, invariants, normalize, sweep.
//
// Exit codes: 0 ok, 1 monitor failure, 2 bad configuration,
// 3 run aborted before t_end, 4 normalization failure.

#include <cstdint>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "caflow/experiments.hpp"

namespace ex = caflow::experiments;

namespace {

struct Flags {
    std::string p = "2";
    std::size_t n = 256;
    std::string init = "disk:1";
    std::optional<double> t_end;
    std::optional<double> stop_area;
    double tol_step = 1e-8;
    std::size_t monitor_every = 10;
    std::string monitors = "harnack,monotone";
    std::string out_dir = ".";
    std::string seed = "0";
    std::string config;
    std::string snapshot;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--p", f.p, "flow exponent p >= 1 (comma list for invariants and sweep)");
    cmd->add_option("--n", f.n, "grid size, power of two >= 64");
    cmd->add_option("--init", f.init, "disk:r | ellipse:a,b[,phi] | trig:c0,(k,a_k[,phi_k]),... | file:path");
    cmd->add_option("--t-end", f.t_end, "final flow time");
    cmd->add_option("--stop-area", f.stop_area, "stop once the area falls to this value");
    cmd->add_option("--tol-step", f.tol_step, "relative local-error tolerance");
    cmd->add_option("--monitor-every", f.monitor_every, "accepted steps between records");
    cmd->add_option("--monitors", f.monitors, "harnack,monotone,omega_l:l,ancient,residual");
    cmd->add_option("--out-dir", f.out_dir, "output directory");
    cmd->add_option("--seed", f.seed, "seed (list or a-b range for sweep)");
    cmd->add_option("--config", f.config, "JSON config; its keys override flags");
}

// Flags first, then the config file on top.
ex::RunConfig make_config(const Flags& f, bool single_p) {
    ex::RunConfig c;
    if (single_p) {
        const auto ps = ex::parse_real_list(f.p, "p");
        if (ps.size() != 1) throw caflow::InvalidArgument("--p takes a single value here");
        c.p = ps[0];
        const auto seeds = ex::parse_seed_list(f.seed);
        if (seeds.size() != 1) throw caflow::InvalidArgument("--seed takes a single value here");
        c.seed = seeds[0];
    } else {
        c.p = std::numeric_limits<double>::quiet_NaN();  // set only if the config names one
    }
    c.n = f.n;
    c.init = f.init;
    c.t_end = f.t_end;
    c.stop_area = f.stop_area;
    c.tol_step = f.tol_step;
    c.monitor_every = f.monitor_every;
    c.monitors = ex::MonitorSelection::parse(f.monitors);
    c.out_dir = f.out_dir;
    if (!f.config.empty()) c = ex::load_config_file(f.config, c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p centro-affine normal flow of origin-symmetric convex curves"};
    app.require_subcommand(1);
    Flags f;
    auto* sim = app.add_subcommand("simulate", "integrate the flow and run the monitors");
    auto* inv = app.add_subcommand("invariants", "print the affine invariants of a shape");
    auto* nrm = app.add_subcommand("normalize", "John-normalize a shape");
    auto* swp = app.add_subcommand("sweep", "monitor suite over p values and random bodies");
    for (auto* cmd : {sim, inv, nrm, swp}) add_common(cmd, f);
    nrm->add_option("--snapshot", f.snapshot, "write the normalized support values as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ex::kConfigError;
    }

    try {
        if (sim->parsed()) return ex::cmd_simulate(make_config(f, true), std::cerr);
        if (swp->parsed()) {
            const auto c = make_config(f, false);
            const auto ps = std::isnan(c.p) ? ex::parse_real_list(f.p, "p") : std::vector<double>{c.p};
            return ex::cmd_sweep(c, ps, ex::parse_seed_list(f.seed), std::cerr);
        }
        auto c = make_config(f, false);
        if (inv->parsed()) {
            const auto ps = std::isnan(c.p) ? ex::parse_real_list(f.p, "p") : std::vector<double>{c.p};
            return ex::cmd_invariants(c.init, c.n, ps, std::cout, std::cerr);
        }
        return ex::cmd_normalize(c.init, c.n, f.snapshot.empty() ? std::nullopt : std::optional(f.snapshot), std::cout,
                                 std::cerr);
    } catch (const caflow::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ex::kConfigError;
    }
}
