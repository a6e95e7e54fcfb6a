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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <catch_amalgamated.hpp>

#include "qacoa/error.hpp"
#include "qacoa/experiment_runner.hpp"
#include "qacoa/sat_instances.hpp"

using namespace qacoa;
using namespace qacoa::runner;
using schemes::SchemeKind;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.seed = 3;
    cfg.generate = {{4, 2, 2.0, 2, 9}};
    cfg.schemes = {SchemeKind::Standard, SchemeKind::PureChaotic};
    cfg.depths = {1, 2};
    cfg.speeds = {1, 5};
    cfg.restarts = 2;
    cfg.checkpoints = {5, 20, 1000};
    cfg.spsa.j_max = 20;
    cfg.threads = 1;
    return cfg;
}

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("qacoa_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("runner::cell enumeration", "[runner]") {
    const auto cfg = small_config();
    const auto inst = load_instances(cfg);
    REQUIRE(inst.size() == 2);
    const auto cells = enumerate_cells(cfg, inst);
    // Per instance and depth: Standard once, PureChaotic per speed; times restarts.
    CHECK(cells.size() == 2 * 2 * (1 + 2) * 2);
    std::set<std::uint64_t> seeds;
    for (const auto &c : cells) {
        seeds.insert(c.seed);
    }
    CHECK(seeds.size() == cells.size());
    CHECK(effective_checkpoints(cfg) == std::vector<std::uint32_t>{5, 20});
}

TEST_CASE("runner::matched seeds are shared across schemes", "[runner]") {
    auto cfg = small_config();
    cfg.seed_policy = SeedPolicy::Matched;
    const auto cells = enumerate_cells(cfg, load_instances(cfg));
    std::map<std::tuple<std::size_t, std::uint32_t, std::uint32_t>, std::set<std::uint64_t>> by_key;
    for (const auto &c : cells) {
        by_key[{c.instance_index, c.spec.p, c.restart}].insert(c.seed);
    }
    for (const auto &[key, s] : by_key) {
        CHECK(s.size() == 1);
    }
    CHECK(by_key.size() == 2 * 2 * 2);
}

TEST_CASE("runner::execute is deterministic and thread-count independent", "[runner]") {
    auto cfg = small_config();
    const auto a = execute(cfg);
    cfg.threads = 3;
    const auto b = execute(cfg);
    std::ostringstream sa;
    std::ostringstream sb;
    write_records(a, sa);
    write_records(b, sb);
    CHECK(sa.str() == sb.str());
    for (const auto &r : a) {
        CHECK(r.ok);
        CHECK(r.checkpoints.size() == 2);
        CHECK(r.evaluations == 3 * cfg.spsa.j_max + 2);
        CHECK(r.final_ar >= 0.0);
        CHECK(r.final_ar <= 1.0);
        if (r.kind == SchemeKind::Standard) {
            CHECK(r.c == 0);
        }
    }
}

TEST_CASE("runner::records round-trip through jsonl", "[runner]") {
    auto cfg = small_config();
    cfg.depths = {2};
    const auto recs = execute(cfg);
    const auto dir = scratch("jsonl");
    {
        std::ofstream out(dir / "r.jsonl");
        write_records(recs, out);
    }
    const auto back = read_records(dir / "r.jsonl");
    REQUIRE(back.size() == recs.size());
    std::ostringstream a;
    std::ostringstream b;
    write_records(recs, a);
    write_records(back, b);
    CHECK(a.str() == b.str());

    {
        std::ofstream out(dir / "bad.jsonl");
        out << a.str().substr(0, a.str().find('\n') + 1) << "{not json\n";
    }
    try {
        read_records(dir / "bad.jsonl");
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("runner::aggregate and compare", "[runner]") {
    auto cfg = small_config();
    cfg.speeds = {5};
    cfg.seed_policy = SeedPolicy::Matched;
    const auto recs = execute(cfg);
    const auto rows = aggregate(recs);
    // (scheme, p) pairs times two checkpoints.
    CHECK(rows.size() == 2 * 2 * 2);
    for (const auto &r : rows) {
        CHECK(r.n == 4);
        CHECK(r.q25_ar <= r.median_ar);
        CHECK(r.median_ar <= r.q75_ar);
    }

    const auto self = compare(recs, "standard", "standard");
    for (const auto &r : self) {
        CHECK(r.difference == 0.0);
    }
    // Depth one: the two schemes coincide under matched seeds.
    const auto diff = compare(recs, "standard", "pure_chaotic(c=5)");
    REQUIRE(!diff.empty());
    for (const auto &r : diff) {
        if (r.p == 1) {
            CHECK(r.difference == 0.0);
        }
    }
    CHECK_THROWS_AS(compare(recs, "standard", "pure_chaotic(c=7)"), AlignmentError);

    std::ostringstream os;
    write_aggregate_csv(rows, os);
    CHECK(os.str().find("\"pure_chaotic(c=5)\"") != std::string::npos);
}

TEST_CASE("runner::yaml config", "[runner]") {
    const auto cfg = parse_config(R"(
name: demo
seed: 7
instances:
  generate: {n: 5, k: 3, alpha: 4.2, count: 2, seed: 1}
schemes: [standard, delayed_hybrid]
depths: [4, 12]
speeds: [100]
p_t: 3
restarts: 4
seed_policy: matched
spsa:
  j_max: 300
  c0: 0.2
)");
    CHECK(cfg.name == "demo");
    CHECK(cfg.generate.size() == 1);
    CHECK(cfg.generate[0].count == 2);
    CHECK(cfg.schemes == std::vector<SchemeKind>{SchemeKind::Standard, SchemeKind::DelayedHybrid});
    CHECK(cfg.p_t == 3);
    CHECK(cfg.spsa.j_max == 300);
    CHECK(cfg.spsa.c0 == 0.2);
    CHECK(cfg.spsa.stability() == 3.0);
    CHECK(cfg.seed_policy == SeedPolicy::Matched);

    const auto list = parse_config("instances:\n  generate:\n    - {n: 4}\n    - {n: 6, k: 2}\n");
    CHECK(list.generate.size() == 2);
    CHECK(list.generate[1].k == 2);

    CHECK_THROWS_AS(parse_config("depth: [4]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("schemes: [chaotic]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("restarts: 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("depths: [a, b]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("spsa: {gamma_gain: 0.9}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("{unclosed\n"), ConfigError);
}

TEST_CASE("runner::dimacs paths resolve against the config file", "[runner]") {
    const auto dir = scratch("dimacs");
    const auto inst = sat::generate_random_instance(4, 3, 3.0, 2);
    sat::write_dimacs(inst, dir / "a.cnf");
    {
        std::ofstream out(dir / "cfg.yaml");
        out << "instances:\n  dimacs: [a.cnf, a.cnf]\n";
    }
    const auto cfg = load_config(dir / "cfg.yaml");
    const auto loaded = load_instances(cfg);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].instance == inst);
    CHECK(loaded[0].id == loaded[1].id);
    const auto cells = enumerate_cells(cfg, loaded);
    CHECK(cells[0].seed != cells[cells.size() / 2].seed);
}

TEST_CASE("runner::config hash ignores placement", "[runner]") {
    auto a = small_config();
    auto b = small_config();
    b.output_dir = "/elsewhere";
    b.threads = 7;
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 4;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("runner::thread override", "[runner]") {
    auto cfg = small_config();
    cfg.threads = 2;
    ::unsetenv(kThreadsEnv);
    CHECK(resolve_threads(cfg) == 2);
    ::setenv(kThreadsEnv, "5", 1);
    CHECK(resolve_threads(cfg) == 5);
    ::setenv(kThreadsEnv, "x", 1);
    CHECK_THROWS_AS(resolve_threads(cfg), ConfigError);
    ::unsetenv(kThreadsEnv);
    cfg.threads = 0;
    CHECK(resolve_threads(cfg) >= 1);
}

TEST_CASE("runner::run writes its artifacts", "[runner]") {
    auto cfg = small_config();
    cfg.depths = {2};
    cfg.output_dir = scratch("run") / "out";
    const auto summary = run(cfg);
    CHECK(summary.failures == 0);
    CHECK(fs::exists(cfg.output_dir / "config.json"));
    CHECK(fs::exists(cfg.output_dir / "records.jsonl"));
    CHECK(fs::exists(cfg.output_dir / "aggregate.csv"));
    std::size_t cnf = 0;
    for (const auto &e : fs::directory_iterator(cfg.output_dir / "instances")) {
        cnf += e.path().extension() == ".cnf" ? 1 : 0;
    }
    CHECK(cnf == 2);
    const auto first = read_file(cfg.output_dir / "aggregate.csv");
    run(cfg);
    CHECK(read_file(cfg.output_dir / "aggregate.csv") == first);

    auto blocked = cfg;
    const auto file = scratch("blocked") / "file";
    std::ofstream(file) << "x";
    blocked.output_dir = file / "sub";
    CHECK_THROWS_AS(run(blocked), ConfigError);
}

TEST_CASE("runner::alpha sweep keys aggregates by density", "[runner]") {
    auto cfg = small_config();
    cfg.schemes = {SchemeKind::PureChaotic};
    cfg.depths = {2};
    cfg.speeds = {3};
    cfg.restarts = 1;
    cfg.alphas = {1.0, 2.0, 3.0};
    cfg.output_dir = scratch("alpha") / "out";
    const auto summary = alpha_sweep(cfg);
    std::set<double> alphas;
    for (const auto &r : summary.aggregate) {
        REQUIRE(r.alpha.has_value());
        alphas.insert(*r.alpha);
    }
    CHECK(alphas == std::set<double>{1.0, 2.0, 3.0});
}

TEST_CASE("runner::presets validate", "[runner]") {
    for (const auto &name : preset_names()) {
        CHECK_NOTHROW(preset(name).validate());
    }
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}
