// Copyright 2026 The QACOA Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// qacoa: command-line front end for instance generation, sweeps and diagnostics.
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qacoa/chaos_maps.hpp"
#include "qacoa/diagnostics.hpp"
#include "qacoa/error.hpp"
#include "qacoa/experiment_runner.hpp"
#include "qacoa/param_schemes.hpp"
#include "qacoa/qaoa_simulator.hpp"
#include "qacoa/rng.hpp"
#include "qacoa/sat_instances.hpp"

namespace fs = std::filesystem;
using namespace qacoa;

namespace {

constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

/// "-" or empty writes to stdout.
class Output {
  public:
    explicit Output(const std::string &path) {
        if (!path.empty() && path != "-") {
            if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
                fs::create_directories(parent);
            }
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw ConfigError("cannot open " + path + " for writing");
            }
        }
    }
    std::ostream &stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

struct InstanceOptions {
    std::string path;
    std::size_t n = 5;
    std::size_t k = 3;
    double alpha = 4.2;
    std::uint64_t seed = 1;

    void add(CLI::App *app) {
        app->add_option("--instance", path, "DIMACS file (otherwise a random instance is generated)");
        app->add_option("--n", n, "Variables of the generated instance")->capture_default_str();
        app->add_option("--k", k, "Clause width of the generated instance")->capture_default_str();
        app->add_option("--alpha", alpha, "Clause density of the generated instance")->capture_default_str();
        app->add_option("--instance-seed", seed, "Generator seed")->capture_default_str();
    }

    [[nodiscard]] sat::SatInstance load() const {
        if (!path.empty()) {
            return sat::read_dimacs(fs::path(path), false);
        }
        return sat::generate_random_instance(n, k, alpha, seed);
    }
};

struct SchemeOptions {
    std::string kind = "pure_chaotic";
    std::uint32_t p = 4;
    std::uint32_t c = 100;
    std::uint32_t p_t = 8;
    std::uint32_t T = 10;

    void add(CLI::App *app) {
        app->add_option("--scheme", kind, "standard, pure_chaotic, delayed_hybrid or iterated_hybrid")
            ->capture_default_str();
        app->add_option("--p", p, "Circuit depth")->capture_default_str();
        app->add_option("--c", c, "Map speed")->capture_default_str();
        app->add_option("--p-t", p_t, "Delayed hybrid truncation depth")->capture_default_str();
        app->add_option("--T", T, "Iterated hybrid block length")->capture_default_str();
    }

    [[nodiscard]] schemes::SchemeSpec spec() const {
        schemes::SchemeSpec s;
        s.kind = schemes::scheme_kind_from_string(kind);
        s.p = p;
        s.c = c;
        s.p_t = p_t;
        s.T = T;
        s.validate();
        return s;
    }
};

nlohmann::json instance_meta(const sat::SatInstance &inst) {
    return {{"instance_id", sat::content_hash(inst)},
            {"n_vars", inst.n_vars},
            {"k", inst.k},
            {"clauses", inst.num_clauses()}};
}

/// theta from the command line, or uniform draws from `seed`.
std::vector<double> theta_or_random(const std::vector<double> &given, std::size_t n,
                                    std::uint64_t seed) {
    if (!given.empty()) {
        if (given.size() != n) {
            throw ShapeError("expected " + std::to_string(n) + " theta values, got " +
                             std::to_string(given.size()));
        }
        return given;
    }
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto &t : out) {
        t = rng.uniform();
    }
    return out;
}

runner::RunConfig config_from(const std::string &config_path, const std::string &preset_name) {
    if (!config_path.empty() && !preset_name.empty()) {
        throw ConfigError("give either --config or --preset, not both");
    }
    if (!config_path.empty()) {
        return runner::load_config(config_path);
    }
    if (!preset_name.empty()) {
        return runner::preset(preset_name);
    }
    throw ConfigError("one of --config or --preset is required");
}

int report_run(const runner::RunSummary &summary, const runner::RunConfig &cfg) {
    std::cerr << "wrote " << summary.records.size() << " records to " << cfg.output_dir.string();
    if (summary.failures > 0) {
        std::cerr << " (" << summary.failures << " failed)\n";
        return kExitPartial;
    }
    std::cerr << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"QAOA with chaotic parameter schedules for MAX K-SAT"};
    app.require_subcommand(1);

    // generate
    auto *gen = app.add_subcommand("generate", "Write random K-SAT instances as DIMACS");
    runner::GenerateSpec gs;
    std::string gen_out;
    gen->add_option("--n", gs.n, "Variables")->capture_default_str();
    gen->add_option("--k", gs.k, "Clause width")->capture_default_str();
    gen->add_option("--alpha", gs.alpha, "Clause density M/N")->capture_default_str();
    gen->add_option("--count", gs.count, "Number of instances")->capture_default_str();
    gen->add_option("--seed", gs.seed, "Generator seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory (stdout for a single instance if omitted)");

    // run / alpha-sweep
    std::string cfg_path;
    std::string preset_name;
    std::string out_dir;
    std::size_t threads = 0;
    auto add_run_options = [&](CLI::App *sub) {
        sub->add_option("--config", cfg_path, "YAML run configuration");
        sub->add_option("--preset", preset_name, "Named preset")
            ->check(CLI::IsMember(runner::preset_names()));
        sub->add_option("--output", out_dir, "Output directory (overrides the config)");
        sub->add_option("--threads", threads, "Worker threads (overrides the config)");
    };
    auto *run = app.add_subcommand("run", "Run a sweep of SPSA optimizations");
    add_run_options(run);
    auto *sweep = app.add_subcommand("alpha-sweep", "Run a sweep once per clause density");
    add_run_options(sweep);

    // aggregate
    auto *agg = app.add_subcommand("aggregate", "Recompute aggregates from records.jsonl");
    std::string records_path;
    std::string agg_out;
    bool by_alpha = false;
    agg->add_option("records", records_path, "records.jsonl")->required()->check(CLI::ExistingFile);
    agg->add_option("--out", agg_out, "CSV output (stdout if omitted)");
    agg->add_flag("--by-alpha", by_alpha, "Key rows by clause density");

    // compare
    auto *cmp = app.add_subcommand("compare", "Mean-AR differences between two schemes");
    std::string baseline;
    std::string other;
    std::string cmp_out;
    cmp->add_option("records", records_path, "records.jsonl")->required()->check(CLI::ExistingFile);
    cmp->add_option("--baseline", baseline, "Baseline scheme label, e.g. standard")->required();
    cmp->add_option("--other", other, "Scheme label, e.g. pure_chaotic(c=100)")->required();
    cmp->add_option("--out", cmp_out, "CSV output (stdout if omitted)");

    // scan-landscape
    auto *scan = app.add_subcommand("scan-landscape", "F over the unit square of a two-parameter scheme");
    InstanceOptions scan_inst;
    SchemeOptions scan_scheme;
    std::size_t grid = 64;
    std::string scan_out;
    scan_inst.add(scan);
    scan_scheme.add(scan);
    scan->add_option("--grid", grid, "Points per axis")->capture_default_str();
    scan->add_option("--out", scan_out, "CSV output (stdout if omitted)");

    // diagnose-lle
    auto *lle = app.add_subcommand("diagnose-lle", "Cost-landscape and phase-space Lyapunov spectra");
    InstanceOptions lle_inst;
    std::uint32_t lle_c = 100;
    std::uint32_t lle_pmax = 10;
    std::vector<double> lle_theta;
    std::uint64_t lle_seed = 1;
    std::string lle_out;
    lle_inst.add(lle);
    lle->add_option("--c", lle_c, "Map speed")->capture_default_str();
    lle->add_option("--p-max", lle_pmax, "Largest depth")->capture_default_str();
    lle->add_option("--theta", lle_theta, "Two parameters (random if omitted)")->expected(2);
    lle->add_option("--seed", lle_seed, "Seed for a random theta")->capture_default_str();
    lle->add_option("--out", lle_out, "CSV output (stdout if omitted)");

    // diagnose-eta
    auto *eta = app.add_subcommand("diagnose-eta", "Linearizability bound against depth");
    std::uint32_t eta_c = 10;
    std::uint32_t eta_pmin = 2;
    std::uint32_t eta_pmax = 8;
    std::size_t eta_n = 10000;
    std::uint64_t eta_seed = 1;
    std::string eta_out;
    eta->add_option("--c", eta_c, "Map speed")->capture_default_str();
    eta->add_option("--p-min", eta_pmin, "Smallest depth")->capture_default_str();
    eta->add_option("--p-max", eta_pmax, "Largest depth")->capture_default_str();
    eta->add_option("--samples", eta_n, "Uniform theta samples")->capture_default_str();
    eta->add_option("--seed", eta_seed, "Sampling seed")->capture_default_str();
    eta->add_option("--out", eta_out, "CSV output (stdout if omitted)");

    // diagnose-noise
    auto *noise = app.add_subcommand("diagnose-noise", "Nonlinear control noise moment against depth");
    std::uint32_t noise_c = 1;
    std::uint32_t noise_pmin = 1;
    std::uint32_t noise_pmax = 12;
    double noise_delta = 1e-18;
    std::size_t noise_n = 1000;
    std::uint64_t noise_seed = 1;
    std::string noise_out;
    noise->add_option("--c", noise_c, "Map speed")->capture_default_str();
    noise->add_option("--p-min", noise_pmin, "Smallest depth")->capture_default_str();
    noise->add_option("--p-max", noise_pmax, "Largest depth")->capture_default_str();
    noise->add_option("--delta", noise_delta, "Perturbation size")->capture_default_str();
    noise->add_option("--samples", noise_n, "Uniform theta samples")->capture_default_str();
    noise->add_option("--seed", noise_seed, "Sampling seed")->capture_default_str();
    noise->add_option("--out", noise_out, "CSV output (stdout if omitted)");

    // orbit
    auto *orb = app.add_subcommand("orbit", "Layer-sampled logistic orbit with derivatives and LLE");
    double orb_theta = 0.3;
    std::uint32_t orb_m = 20;
    std::uint32_t orb_c = 1;
    std::string orb_out;
    orb->add_option("--theta", orb_theta, "Start point in [0, 1]")->capture_default_str();
    orb->add_option("--m-max", orb_m, "Layers")->capture_default_str();
    orb->add_option("--c", orb_c, "Map speed")->capture_default_str();
    orb->add_option("--out", orb_out, "CSV output (stdout if omitted)");

    // schedule
    auto *sch = app.add_subcommand("schedule", "Angle schedule of a scheme at a given theta");
    SchemeOptions sch_scheme;
    std::vector<double> sch_theta;
    std::uint64_t sch_seed = 1;
    std::string sch_out;
    sch_scheme.add(sch);
    sch->add_option("--theta", sch_theta, "Parameters (random if omitted)");
    sch->add_option("--seed", sch_seed, "Seed for a random theta")->capture_default_str();
    sch->add_option("--out", sch_out, "CSV output (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            for (std::size_t i = 0; i < gs.count; ++i) {
                const auto seed = gs.count == 1 ? gs.seed : derive_seed(gs.seed, {i});
                const auto inst = sat::generate_random_instance(gs.n, gs.k, gs.alpha, seed);
                if (gen_out.empty()) {
                    if (gs.count != 1) {
                        throw ConfigError("--out is required when --count > 1");
                    }
                    sat::write_dimacs(inst, std::cout);
                } else {
                    fs::create_directories(gen_out);
                    const auto path = fs::path(gen_out) /
                                      ("instance_" + std::to_string(i) + "_" +
                                       sat::content_hash(inst).substr(0, 12) + ".cnf");
                    sat::write_dimacs(inst, path);
                    std::cout << path.string() << '\n';
                }
            }
        } else if (run->parsed() || sweep->parsed()) {
            auto cfg = config_from(cfg_path, preset_name);
            if (!out_dir.empty()) {
                cfg.output_dir = out_dir;
            }
            if (threads > 0) {
                cfg.threads = threads;
            }
            const auto summary = run->parsed() ? runner::run(cfg) : runner::alpha_sweep(cfg);
            return report_run(summary, cfg);
        } else if (agg->parsed()) {
            const auto rows = runner::aggregate(runner::read_records(records_path), by_alpha);
            Output out(agg_out);
            runner::write_aggregate_csv(rows, out.stream());
        } else if (cmp->parsed()) {
            const auto rows = runner::compare(runner::read_records(records_path), baseline, other);
            Output out(cmp_out);
            runner::write_compare_csv(rows, out.stream());
        } else if (scan->parsed()) {
            const auto inst = scan_inst.load();
            const auto diag = sat::build_cost_diagonal(inst);
            const auto spec = scan_scheme.spec();
            const auto result = sim::landscape_scan(spec, diag, grid);
            auto meta = instance_meta(inst);
            meta["scheme"] = spec;
            meta["grid"] = grid;
            if (diag.c_max > diag.c_min) {
                meta["mixing_metric"] = diag::mixing_metric(result, diag);
            }
            Output out(scan_out);
            diag::write_meta_line(out.stream(), meta);
            diag::write_landscape_csv(result, out.stream());
        } else if (lle->parsed()) {
            const auto inst = lle_inst.load();
            const auto diag = sat::build_cost_diagonal(inst);
            const auto theta = theta_or_random(lle_theta, 2, lle_seed);
            const auto rep = diag::cost_lle_spectrum(schemes::SchemeSpec::pure_chaotic(lle_pmax, lle_c),
                                                     theta, diag, lle_pmax);
            auto meta = instance_meta(inst);
            meta["c"] = lle_c;
            meta["theta"] = theta;
            meta["denominator"] = rep.denominator;
            Output out(lle_out);
            diag::write_meta_line(out.stream(), meta);
            diag::write_lle_csv(rep, out.stream());
        } else if (eta->parsed()) {
            const auto rep = diag::eta_sweep(eta_c, eta_pmin, eta_pmax, eta_n, eta_seed);
            Output out(eta_out);
            diag::write_meta_line(out.stream(), {{"c", eta_c},
                                                 {"samples", eta_n},
                                                 {"seed", eta_seed},
                                                 {"slope", rep.fit.slope},
                                                 {"intercept", rep.fit.intercept},
                                                 {"r_squared", rep.fit.r_squared}});
            diag::write_eta_csv(rep, out.stream());
        } else if (noise->parsed()) {
            const auto rep = diag::control_noise_moment(noise_c, noise_pmin, noise_pmax, noise_delta,
                                                        noise_n, noise_seed);
            Output out(noise_out);
            diag::write_meta_line(out.stream(), {{"c", noise_c},
                                                 {"delta", noise_delta},
                                                 {"samples", noise_n},
                                                 {"seed", noise_seed},
                                                 {"slope", rep.fit.slope},
                                                 {"r_squared", rep.fit.r_squared}});
            diag::write_noise_csv(rep, out.stream());
        } else if (orb->parsed()) {
            const auto rec = chaos::orbit(orb_theta, orb_m, orb_c);
            Output out(orb_out);
            auto &os = out.stream();
            os.precision(17);
            os << "m,iterate,h,lle\n";
            for (std::size_t m = 0; m < rec.iterates.size(); ++m) {
                os << m + 1 << ',' << rec.iterates[m] << ',' << rec.derivatives[m] << ',' << rec.lle[m]
                   << '\n';
            }
        } else if (sch->parsed()) {
            const auto spec = sch_scheme.spec();
            const auto theta = theta_or_random(sch_theta, schemes::n_theta(spec), sch_seed);
            Output out(sch_out);
            schemes::write_schedule_csv(schemes::angles(spec, theta), out.stream());
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
