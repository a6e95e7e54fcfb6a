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
#include "qacoa/experiment_runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <yaml-cpp/yaml.h>

#include "qacoa/diagnostics.hpp"
#include "qacoa/error.hpp"
#include "qacoa/qaoa_simulator.hpp"
#include "qacoa/rng.hpp"
#include "qacoa/stats.hpp"

namespace qacoa::runner {

namespace fs = std::filesystem;
using schemes::SchemeKind;
using schemes::SchemeSpec;

namespace {

std::string seed_policy_name(SeedPolicy p) {
    return p == SeedPolicy::Matched ? "matched" : "independent";
}

SeedPolicy seed_policy_from(const std::string &s) {
    if (s == "matched") {
        return SeedPolicy::Matched;
    }
    if (s == "independent") {
        return SeedPolicy::Independent;
    }
    throw ConfigError("seed_policy must be 'independent' or 'matched', got '" + s + "'");
}

template <typename T>
T scalar(const YAML::Node &node, const std::string &key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception &e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

template <typename T>
std::vector<T> sequence(const YAML::Node &node, const std::string &key) {
    if (!node.IsSequence()) {
        return {scalar<T>(node, key)};
    }
    std::vector<T> out;
    for (const auto &item : node) {
        out.push_back(scalar<T>(item, key));
    }
    return out;
}

void check_keys(const YAML::Node &map, const std::set<std::string> &allowed,
                const std::string &where) {
    if (!map.IsMap()) {
        throw ConfigError(where + " must be a mapping");
    }
    for (const auto &kv : map) {
        const auto key = kv.first.as<std::string>();
        if (allowed.count(key) == 0) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

GenerateSpec parse_generate(const YAML::Node &node) {
    check_keys(node, {"n", "k", "alpha", "count", "seed"}, "instances.generate");
    GenerateSpec g;
    if (node["n"]) g.n = scalar<std::size_t>(node["n"], "n");
    if (node["k"]) g.k = scalar<std::size_t>(node["k"], "k");
    if (node["alpha"]) g.alpha = scalar<double>(node["alpha"], "alpha");
    if (node["count"]) g.count = scalar<std::size_t>(node["count"], "count");
    if (node["seed"]) g.seed = scalar<std::uint64_t>(node["seed"], "seed");
    return g;
}

spsa::SpsaConfig parse_spsa(const YAML::Node &node) {
    check_keys(node,
               {"j_max", "alpha_gain", "gamma_gain", "A", "c0", "delta_theta_min",
                "ergodic_gain_rescale"},
               "spsa");
    spsa::SpsaConfig s;
    if (node["j_max"]) s.j_max = scalar<std::uint32_t>(node["j_max"], "spsa.j_max");
    if (node["alpha_gain"]) s.alpha_gain = scalar<double>(node["alpha_gain"], "spsa.alpha_gain");
    if (node["gamma_gain"]) s.gamma_gain = scalar<double>(node["gamma_gain"], "spsa.gamma_gain");
    if (node["A"]) s.A = scalar<double>(node["A"], "spsa.A");
    if (node["c0"]) s.c0 = scalar<double>(node["c0"], "spsa.c0");
    if (node["delta_theta_min"])
        s.delta_theta_min = scalar<double>(node["delta_theta_min"], "spsa.delta_theta_min");
    if (node["ergodic_gain_rescale"])
        s.ergodic_gain_rescale = scalar<bool>(node["ergodic_gain_rescale"], "spsa.ergodic_gain_rescale");
    return s;
}

RunConfig parse_node(const YAML::Node &root) {
    check_keys(root,
               {"name", "seed", "instances", "schemes", "depths", "speeds", "p_t", "T",
                "restarts", "checkpoints", "seed_policy", "spsa", "lle_at_optimum", "alphas",
                "output_dir", "threads"},
               "config");
    RunConfig cfg;
    cfg.generate.clear();
    if (root["name"]) cfg.name = scalar<std::string>(root["name"], "name");
    if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (const auto inst = root["instances"]) {
        check_keys(inst, {"generate", "dimacs"}, "instances");
        if (const auto gen = inst["generate"]) {
            if (gen.IsSequence()) {
                for (const auto &g : gen) {
                    cfg.generate.push_back(parse_generate(g));
                }
            } else {
                cfg.generate.push_back(parse_generate(gen));
            }
        }
        if (inst["dimacs"]) {
            cfg.dimacs = sequence<std::string>(inst["dimacs"], "instances.dimacs");
        }
    }
    if (root["schemes"]) {
        cfg.schemes.clear();
        for (const auto &s : sequence<std::string>(root["schemes"], "schemes")) {
            try {
                cfg.schemes.push_back(schemes::scheme_kind_from_string(s));
            } catch (const DomainError &e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (root["depths"]) cfg.depths = sequence<std::uint32_t>(root["depths"], "depths");
    if (root["speeds"]) cfg.speeds = sequence<std::uint32_t>(root["speeds"], "speeds");
    if (root["p_t"]) cfg.p_t = scalar<std::uint32_t>(root["p_t"], "p_t");
    if (root["T"]) cfg.T = scalar<std::uint32_t>(root["T"], "T");
    if (root["restarts"]) cfg.restarts = scalar<std::uint32_t>(root["restarts"], "restarts");
    if (root["checkpoints"])
        cfg.checkpoints = sequence<std::uint32_t>(root["checkpoints"], "checkpoints");
    if (root["seed_policy"])
        cfg.seed_policy = seed_policy_from(scalar<std::string>(root["seed_policy"], "seed_policy"));
    if (root["spsa"]) cfg.spsa = parse_spsa(root["spsa"]);
    if (root["lle_at_optimum"])
        cfg.lle_at_optimum = scalar<bool>(root["lle_at_optimum"], "lle_at_optimum");
    if (root["alphas"]) cfg.alphas = sequence<double>(root["alphas"], "alphas");
    if (root["output_dir"]) cfg.output_dir = scalar<std::string>(root["output_dir"], "output_dir");
    if (root["threads"]) cfg.threads = scalar<std::size_t>(root["threads"], "threads");
    cfg.validate();
    return cfg;
}

nlohmann::json canonical_json(const RunConfig &cfg) {
    nlohmann::json j = cfg;
    j.erase("output_dir");
    j.erase("threads");
    return j;
}

void write_double(std::ostream &out, double v) {
    if (std::isnan(v)) {
        out << "nan";
    } else {
        out << v;
    }
}

nlohmann::json num(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double num_or_nan(const nlohmann::json &j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

RunRecord run_cell(const Cell &cell, const LoadedInstance &inst, const sat::CostDiagonal &diag,
                   const RunConfig &cfg, const std::string &hash,
                   const std::vector<std::uint32_t> &checkpoints) {
    RunRecord r;
    r.config_hash = hash;
    r.instance_index = inst.index;
    r.instance_id = inst.id;
    r.n_vars = inst.instance.n_vars;
    r.k = inst.instance.k;
    r.alpha = inst.instance.alpha();
    r.scheme = cell.spec.label();
    r.kind = cell.spec.kind;
    r.p = cell.spec.p;
    r.c = cell.spec.kind == SchemeKind::Standard ? 0 : cell.spec.c;
    r.p_t = cell.spec.kind == SchemeKind::DelayedHybrid ? cell.spec.p_t : 0;
    r.T = cell.spec.kind == SchemeKind::IteratedHybrid ? cell.spec.T : 0;
    r.restart = cell.restart;
    r.seed = cell.seed;
    try {
        auto scfg = cfg.spsa;
        scfg.seed = cell.seed;
        const auto trace = spsa::optimize(cell.spec, diag, scfg);
        r.evaluations = trace.evaluations;
        r.a = trace.a;
        r.c0 = trace.c0;
        r.theta_1 = trace.theta_1;
        const auto &last = trace.iterations.back();
        r.final_theta = last.theta;
        r.final_f = last.f_value;
        r.final_ar = last.ar;
        r.final_misassignment = last.misassignment;
        r.best_theta = trace.best_theta;
        r.best_f = trace.best_f;
        for (const auto j : checkpoints) {
            const auto &it = trace.iterations[j - 1];
            r.checkpoints.push_back({j, it.f_value, it.ar, it.misassignment});
        }
        if (cfg.lle_at_optimum && cell.spec.kind == SchemeKind::PureChaotic && cell.spec.p >= 2) {
            r.lle = nlohmann::json(diag::cost_lle_spectrum(cell.spec, r.best_theta, diag, cell.spec.p));
        }
    } catch (const std::exception &e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

fs::path prepare_output(const RunConfig &cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " +
                          ec.message());
    }
    const fs::path probe = cfg.output_dir / ".write-test";
    {
        std::ofstream out(probe);
        if (!out || !(out << "ok")) {
            throw ConfigError("output directory " + cfg.output_dir.string() + " is not writable");
        }
    }
    fs::remove(probe, ec);
    return cfg.output_dir;
}

std::ofstream open_out(const fs::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    return out;
}

RunSummary run_impl(const RunConfig &cfg, bool by_alpha) {
    cfg.validate();
    const fs::path dir = prepare_output(cfg);
    const auto instances = load_instances(cfg);

    {
        auto out = open_out(dir / "config.json");
        out << nlohmann::json(cfg).dump(2) << '\n';
    }
    fs::create_directories(dir / "instances");
    for (const auto &inst : instances) {
        std::ostringstream name;
        name << "instance_" << inst.index << '_' << inst.id.substr(0, 12) << ".cnf";
        auto out = open_out(dir / "instances" / name.str());
        sat::write_dimacs(inst.instance, out);
    }

    RunSummary summary;
    summary.records = execute(cfg);
    for (const auto &r : summary.records) {
        summary.failures += r.ok ? 0 : 1;
    }
    {
        auto out = open_out(dir / "records.jsonl");
        write_records(summary.records, out);
    }
    summary.aggregate = aggregate(summary.records, by_alpha);
    {
        auto out = open_out(dir / "aggregate.csv");
        write_aggregate_csv(summary.aggregate, out);
    }
    return summary;
}

} // namespace

void RunConfig::validate() const {
    if (generate.empty() && dimacs.empty()) {
        throw ConfigError("config names no instances (instances.generate or instances.dimacs)");
    }
    for (const auto &g : generate) {
        if (g.count < 1 || g.k < 1 || g.n < g.k || !(g.alpha > 0.0)) {
            throw ConfigError("generate block needs count >= 1, n >= k >= 1 and alpha > 0");
        }
    }
    if (schemes.empty()) {
        throw ConfigError("config lists no schemes");
    }
    if (depths.empty() || std::any_of(depths.begin(), depths.end(), [](auto p) { return p < 1; })) {
        throw ConfigError("depths must be a non-empty list of values >= 1");
    }
    const bool chaotic = std::any_of(schemes.begin(), schemes.end(),
                                     [](SchemeKind k) { return k != SchemeKind::Standard; });
    if (chaotic &&
        (speeds.empty() || std::any_of(speeds.begin(), speeds.end(), [](auto c) { return c < 1; }))) {
        throw ConfigError("speeds must be a non-empty list of values >= 1");
    }
    if (p_t < 1 || T < 1) {
        throw ConfigError("p_t and T must be >= 1");
    }
    if (restarts < 1) {
        throw ConfigError("restarts must be >= 1");
    }
    if (std::any_of(alphas.begin(), alphas.end(), [](double a) { return !(a > 0.0); })) {
        throw ConfigError("alphas must be positive");
    }
    try {
        spsa.validate();
    } catch (const DomainError &e) {
        throw ConfigError(std::string("spsa: ") + e.what());
    }
}

std::vector<std::string> preset_names() {
    return {"fig2-small", "fig5-like", "delayed-hybrid", "iterated-hybrid", "alpha-sweep"};
}

RunConfig preset(const std::string &name) {
    RunConfig cfg;
    cfg.name = name;
    cfg.output_dir = "qacoa-out/" + name;
    if (name == "fig2-small") {
        cfg.seed = 2;
        cfg.generate = {{5, 3, 4.2, 1, 42}};
        cfg.schemes = {SchemeKind::Standard, SchemeKind::PureChaotic};
        cfg.depths = {4, 12, 20};
        cfg.speeds = {1, 5, 100};
        cfg.restarts = 20;
        cfg.spsa.j_max = 1000;
    } else if (name == "fig5-like") {
        cfg.seed = 5;
        cfg.generate = {{8, 2, 1.125, 1, 21}, {8, 3, 4.125, 1, 31}};
        cfg.schemes = {SchemeKind::Standard, SchemeKind::PureChaotic};
        cfg.depths = {2, 4, 8, 12, 16, 20};
        cfg.speeds = {100};
        cfg.restarts = 5;
        cfg.spsa.j_max = 1000;
    } else if (name == "delayed-hybrid" || name == "iterated-hybrid") {
        cfg.seed = name == "delayed-hybrid" ? 7 : 10;
        cfg.generate = {{8, 2, 1.125, 1, 21}, {8, 3, 4.125, 1, 31}};
        cfg.schemes = {SchemeKind::Standard, SchemeKind::PureChaotic,
                       name == "delayed-hybrid" ? SchemeKind::DelayedHybrid
                                                : SchemeKind::IteratedHybrid};
        cfg.depths = {4, 8, 12, 16, 20};
        cfg.speeds = {100};
        cfg.p_t = 8;
        cfg.T = 10;
        cfg.restarts = 5;
        cfg.spsa.j_max = 5000;
    } else if (name == "alpha-sweep") {
        cfg.seed = 11;
        cfg.generate = {{5, 3, 1.0, 5, 51}};
        cfg.schemes = {SchemeKind::PureChaotic};
        cfg.depths = {8};
        cfg.speeds = {100};
        cfg.restarts = 1;
        cfg.spsa.j_max = 5000;
        for (int i = 1; i <= 40; ++i) {
            cfg.alphas.push_back(static_cast<double>(i) / 5.0);
        }
    } else {
        std::string known;
        for (const auto &n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return cfg;
}

RunConfig parse_config(const std::string &yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception &e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return parse_node(root);
}

RunConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str());
    for (auto &d : cfg.dimacs) {
        if (fs::path(d).is_relative()) {
            d = (path.parent_path() / d).lexically_normal().string();
        }
    }
    return cfg;
}

std::vector<std::uint32_t> effective_checkpoints(const RunConfig &cfg) {
    std::vector<std::uint32_t> out;
    for (const auto j : cfg.checkpoints) {
        if (j >= 1 && j <= cfg.spsa.j_max) {
            out.push_back(j);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string config_hash(const RunConfig &cfg) { return sat::sha1_hex(canonical_json(cfg).dump()); }

std::size_t resolve_threads(const RunConfig &cfg) {
    if (const char *env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) {
            throw ConfigError(std::string(kThreadsEnv) + " must be a positive integer");
        }
        return v;
    }
    if (cfg.threads > 0) {
        return cfg.threads;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<LoadedInstance> load_instances(const RunConfig &cfg) {
    std::vector<LoadedInstance> out;
    for (std::size_t b = 0; b < cfg.generate.size(); ++b) {
        const auto &g = cfg.generate[b];
        for (std::size_t i = 0; i < g.count; ++i) {
            LoadedInstance li;
            li.index = out.size();
            li.instance = sat::generate_random_instance(g.n, g.k, g.alpha, derive_seed(g.seed, {b, i}));
            li.id = sat::content_hash(li.instance);
            out.push_back(std::move(li));
        }
    }
    for (const auto &path : cfg.dimacs) {
        LoadedInstance li;
        li.index = out.size();
        li.instance = sat::read_dimacs(fs::path(path));
        li.id = sat::content_hash(li.instance);
        out.push_back(std::move(li));
    }
    return out;
}

std::vector<Cell> enumerate_cells(const RunConfig &cfg,
                                  const std::vector<LoadedInstance> &instances) {
    std::vector<Cell> cells;
    std::map<std::uint64_t, std::tuple<std::size_t, std::uint64_t, std::uint32_t, std::uint32_t>>
        seen;
    for (const auto &inst : instances) {
        for (const auto kind : cfg.schemes) {
            for (const auto p : cfg.depths) {
                std::vector<std::uint32_t> speeds = cfg.speeds;
                if (kind == SchemeKind::Standard) {
                    speeds = {1};
                }
                for (const auto c : speeds) {
                    SchemeSpec spec;
                    spec.kind = kind;
                    spec.p = p;
                    spec.c = c;
                    spec.p_t = cfg.p_t;
                    spec.T = cfg.T;
                    spec.validate();
                    const std::uint64_t label_key =
                        cfg.seed_policy == SeedPolicy::Matched ? 0 : fnv1a(spec.label());
                    for (std::uint32_t restart = 0; restart < cfg.restarts; ++restart) {
                        Cell cell;
                        cell.instance_index = inst.index;
                        cell.spec = spec;
                        cell.restart = restart;
                        cell.seed = derive_seed(cfg.seed, {inst.index, fnv1a(inst.id), label_key,
                                                           p, restart});
                        const auto owner = std::make_tuple(inst.index, label_key, p, restart);
                        const auto [it, fresh] = seen.emplace(cell.seed, owner);
                        if (!fresh && it->second != owner) {
                            throw ConfigError("seed collision at instance " +
                                              std::to_string(inst.index) + ", " + spec.label() +
                                              ", p=" + std::to_string(p) +
                                              ", restart=" + std::to_string(restart));
                        }
                        cells.push_back(cell);
                    }
                }
            }
        }
    }
    return cells;
}

std::vector<RunRecord> execute(const RunConfig &cfg) {
    cfg.validate();
    const auto instances = load_instances(cfg);
    std::vector<sat::CostDiagonal> diags;
    diags.reserve(instances.size());
    for (const auto &inst : instances) {
        diags.push_back(sat::build_cost_diagonal(inst.instance));
    }
    const auto cells = enumerate_cells(cfg, instances);
    const auto checkpoints = effective_checkpoints(cfg);
    const std::string hash = config_hash(cfg);

    std::vector<RunRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto &cell = cells[i];
            records[i] = run_cell(cell, instances[cell.instance_index], diags[cell.instance_index],
                                  cfg, hash, checkpoints);
        }
    };
    const std::size_t n_threads = std::min(resolve_threads(cfg), std::max<std::size_t>(cells.size(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    return records;
}

void to_json(nlohmann::json &j, const RunRecord &r) {
    nlohmann::json cps = nlohmann::json::array();
    for (const auto &cp : r.checkpoints) {
        cps.push_back({{"j", cp.j}, {"f", num(cp.f)}, {"ar", num(cp.ar)},
                       {"misassignment", num(cp.misassignment)}});
    }
    j = {{"config_hash", r.config_hash},
         {"instance_index", r.instance_index},
         {"instance_id", r.instance_id},
         {"n_vars", r.n_vars},
         {"k", r.k},
         {"alpha", r.alpha},
         {"scheme", r.scheme},
         {"kind", schemes::to_string(r.kind)},
         {"p", r.p},
         {"c", r.c},
         {"p_t", r.p_t},
         {"T", r.T},
         {"restart", r.restart},
         {"seed", r.seed},
         {"ok", r.ok},
         {"error", r.error},
         {"evaluations", r.evaluations},
         {"a", num(r.a)},
         {"c0", num(r.c0)},
         {"theta_1", r.theta_1},
         {"final", {{"theta", r.final_theta},
                    {"f", num(r.final_f)},
                    {"ar", num(r.final_ar)},
                    {"misassignment", num(r.final_misassignment)}}},
         {"best", {{"theta", r.best_theta}, {"f", num(r.best_f)}}},
         {"checkpoints", cps}};
    if (r.lle) {
        j["lle"] = *r.lle;
    }
}

void from_json(const nlohmann::json &j, RunRecord &r) {
    r.config_hash = j.at("config_hash").get<std::string>();
    r.instance_index = j.at("instance_index").get<std::size_t>();
    r.instance_id = j.at("instance_id").get<std::string>();
    r.n_vars = j.at("n_vars").get<std::size_t>();
    r.k = j.at("k").get<std::size_t>();
    r.alpha = j.at("alpha").get<double>();
    r.scheme = j.at("scheme").get<std::string>();
    r.kind = schemes::scheme_kind_from_string(j.at("kind").get<std::string>());
    r.p = j.at("p").get<std::uint32_t>();
    r.c = j.at("c").get<std::uint32_t>();
    r.p_t = j.at("p_t").get<std::uint32_t>();
    r.T = j.at("T").get<std::uint32_t>();
    r.restart = j.at("restart").get<std::uint32_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.a = num_or_nan(j.at("a"));
    r.c0 = num_or_nan(j.at("c0"));
    r.theta_1 = j.at("theta_1").get<std::vector<double>>();
    const auto &fin = j.at("final");
    r.final_theta = fin.at("theta").get<std::vector<double>>();
    r.final_f = num_or_nan(fin.at("f"));
    r.final_ar = num_or_nan(fin.at("ar"));
    r.final_misassignment = num_or_nan(fin.at("misassignment"));
    const auto &best = j.at("best");
    r.best_theta = best.at("theta").get<std::vector<double>>();
    r.best_f = num_or_nan(best.at("f"));
    r.checkpoints.clear();
    for (const auto &cp : j.at("checkpoints")) {
        r.checkpoints.push_back({cp.at("j").get<std::uint32_t>(), num_or_nan(cp.at("f")),
                                 num_or_nan(cp.at("ar")), num_or_nan(cp.at("misassignment"))});
    }
    if (j.contains("lle")) {
        r.lle = j.at("lle");
    } else {
        r.lle.reset();
    }
}

std::vector<RunRecord> read_records(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read records " + path.string());
    }
    std::vector<RunRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            out.push_back(nlohmann::json::parse(line).get<RunRecord>());
        } catch (const nlohmann::json::exception &e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return out;
}

void write_records(const std::vector<RunRecord> &records, std::ostream &out) {
    for (const auto &r : records) {
        out << nlohmann::json(r).dump() << '\n';
    }
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord> &records, bool by_alpha) {
    using Key = std::tuple<std::string, std::uint32_t, std::uint32_t, double, std::uint32_t>;
    struct Bucket {
        std::vector<double> ar;
        std::vector<double> mis;
    };
    std::map<Key, Bucket> groups;
    for (const auto &r : records) {
        if (!r.ok) {
            continue;
        }
        for (const auto &cp : r.checkpoints) {
            auto &b = groups[{r.scheme, r.p, r.c, by_alpha ? r.alpha : 0.0, cp.j}];
            b.ar.push_back(cp.ar);
            b.mis.push_back(cp.misassignment);
        }
    }
    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto &[key, b] : groups) {
        AggregateRow row;
        row.scheme = std::get<0>(key);
        row.p = std::get<1>(key);
        row.c = std::get<2>(key);
        if (by_alpha) {
            row.alpha = std::get<3>(key);
        }
        row.j = std::get<4>(key);
        row.n = b.ar.size();
        row.median_ar = stats::median(b.ar);
        row.q25_ar = stats::quantile(b.ar, 0.25);
        row.q75_ar = stats::quantile(b.ar, 0.75);
        row.mean_ar = stats::mean(b.ar);
        row.se_ar = stats::standard_error(b.ar);
        row.ci68_lo = row.mean_ar - row.se_ar;
        row.ci68_hi = row.mean_ar + row.se_ar;
        row.mean_misassignment = stats::mean(b.mis);
        rows.push_back(row);
    }
    return rows;
}

void write_aggregate_csv(const std::vector<AggregateRow> &rows, std::ostream &out) {
    const auto old = out.precision(17);
    const bool with_alpha = !rows.empty() && rows.front().alpha.has_value();
    out << "scheme,p,c,";
    if (with_alpha) {
        out << "alpha,";
    }
    out << "j,n,median_ar,q25_ar,q75_ar,mean_ar,se_ar,ci68_lo,ci68_hi,mean_misassignment\n";
    for (const auto &r : rows) {
        out << '"' << r.scheme << "\"," << r.p << ',' << r.c << ',';
        if (with_alpha) {
            out << r.alpha.value_or(0.0) << ',';
        }
        out << r.j << ',' << r.n << ',';
        for (const double v : {r.median_ar, r.q25_ar, r.q75_ar, r.mean_ar, r.se_ar, r.ci68_lo,
                               r.ci68_hi}) {
            write_double(out, v);
            out << ',';
        }
        write_double(out, r.mean_misassignment);
        out << '\n';
    }
    out.precision(old);
}

std::vector<CompareRow> compare(const std::vector<RunRecord> &records,
                                const std::string &baseline, const std::string &other) {
    using Key = std::tuple<std::size_t, std::uint32_t, std::uint32_t>;
    std::map<Key, std::vector<double>> base;
    std::map<Key, std::vector<double>> oth;
    for (const auto &r : records) {
        if (!r.ok) {
            continue;
        }
        for (const auto &cp : r.checkpoints) {
            const Key key{r.instance_index, r.p, cp.j};
            if (r.scheme == baseline) {
                base[key].push_back(cp.ar);
            }
            if (r.scheme == other) {
                oth[key].push_back(cp.ar);
            }
        }
    }
    std::vector<std::string> missing;
    auto describe = [](const Key &k) {
        return "(instance " + std::to_string(std::get<0>(k)) + ", p=" +
               std::to_string(std::get<1>(k)) + ", j=" + std::to_string(std::get<2>(k)) + ")";
    };
    for (const auto &[k, v] : base) {
        if (oth.count(k) == 0) {
            missing.push_back(describe(k) + " missing for " + other);
        }
    }
    for (const auto &[k, v] : oth) {
        if (base.count(k) == 0) {
            missing.push_back(describe(k) + " missing for " + baseline);
        }
    }
    if (base.empty() && oth.empty()) {
        throw AlignmentError("no records for '" + baseline + "' or '" + other + "'");
    }
    if (!missing.empty()) {
        std::string msg = "unmatched cells:";
        for (const auto &m : missing) {
            msg += "\n  " + m;
        }
        throw AlignmentError(msg);
    }
    std::vector<CompareRow> rows;
    for (const auto &[k, b] : base) {
        const auto &o = oth.at(k);
        CompareRow row;
        row.instance_index = std::get<0>(k);
        row.p = std::get<1>(k);
        row.j = std::get<2>(k);
        row.mean_baseline = stats::mean(b);
        row.mean_other = stats::mean(o);
        row.difference = row.mean_other - row.mean_baseline;
        const double sb = stats::standard_error(b);
        const double so = stats::standard_error(o);
        row.se = std::sqrt(sb * sb + so * so);
        rows.push_back(row);
    }
    return rows;
}

void write_compare_csv(const std::vector<CompareRow> &rows, std::ostream &out) {
    const auto old = out.precision(17);
    out << "instance,p,j,mean_baseline,mean_other,difference,se\n";
    for (const auto &r : rows) {
        out << r.instance_index << ',' << r.p << ',' << r.j << ',' << r.mean_baseline << ','
            << r.mean_other << ',' << r.difference << ',' << r.se << '\n';
    }
    out.precision(old);
}

RunSummary run(const RunConfig &cfg) { return run_impl(cfg, false); }

RunSummary alpha_sweep(const RunConfig &cfg) {
    if (cfg.alphas.empty()) {
        return run_impl(cfg, true);
    }
    if (cfg.generate.empty()) {
        throw ConfigError("alpha sweeps need generate blocks");
    }
    RunConfig expanded = cfg;
    expanded.generate.clear();
    expanded.alphas.clear();
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
        for (const auto &g : cfg.generate) {
            auto block = g;
            block.alpha = cfg.alphas[a];
            block.seed = derive_seed(g.seed, {a});
            expanded.generate.push_back(block);
        }
    }
    return run_impl(expanded, true);
}

void to_json(nlohmann::json &j, const RunConfig &cfg) {
    nlohmann::json gen = nlohmann::json::array();
    for (const auto &g : cfg.generate) {
        gen.push_back({{"n", g.n}, {"k", g.k}, {"alpha", g.alpha}, {"count", g.count},
                       {"seed", g.seed}});
    }
    std::vector<std::string> kinds;
    for (const auto k : cfg.schemes) {
        kinds.push_back(schemes::to_string(k));
    }
    j = {{"name", cfg.name},
         {"seed", cfg.seed},
         {"instances", {{"generate", gen}, {"dimacs", cfg.dimacs}}},
         {"schemes", kinds},
         {"depths", cfg.depths},
         {"speeds", cfg.speeds},
         {"p_t", cfg.p_t},
         {"T", cfg.T},
         {"restarts", cfg.restarts},
         {"checkpoints", cfg.checkpoints},
         {"seed_policy", seed_policy_name(cfg.seed_policy)},
         {"spsa", cfg.spsa},
         {"lle_at_optimum", cfg.lle_at_optimum},
         {"alphas", cfg.alphas},
         {"output_dir", cfg.output_dir.string()},
         {"threads", cfg.threads}};
    j["spsa"].erase("seed");
}

} // namespace qacoa::runner
