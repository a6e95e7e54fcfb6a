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
/**
 * @file
 * Config-driven sweeps over (instance, scheme, p, c, restart) cells, with
 * line-delimited JSON records and CSV aggregates.
 *
 * A run is a pure function of its configuration: cell seeds are derived
 * from the config seed and the cell key, cells run on a thread pool, and
 * every output is written in cell order.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qacoa/param_schemes.hpp"
#include "qacoa/sat_instances.hpp"
#include "qacoa/spsa_optimizer.hpp"

namespace qacoa::runner {

/// Environment variable overriding the worker count.
inline constexpr const char *kThreadsEnv = "QACOA_THREADS";

struct GenerateSpec {
    std::size_t n = 5;
    std::size_t k = 3;
    double alpha = 4.2;
    std::size_t count = 1;
    std::uint64_t seed = 1;
};

enum class SeedPolicy {
    /// Seeds depend on the whole cell key, scheme and c included.
    Independent,
    /// Seeds ignore scheme and c, so schemes with equal n_theta share theta_1 and signs.
    Matched,
};

struct RunConfig {
    std::string name = "run";
    std::uint64_t seed = 0;
    std::vector<GenerateSpec> generate;
    std::vector<std::string> dimacs;
    std::vector<schemes::SchemeKind> schemes = {schemes::SchemeKind::Standard,
                                                schemes::SchemeKind::PureChaotic};
    std::vector<std::uint32_t> depths = {4};
    /// Map speeds for the chaotic kinds; Standard runs once per depth.
    std::vector<std::uint32_t> speeds = {1};
    std::uint32_t p_t = 8;
    std::uint32_t T = 10;
    std::uint32_t restarts = 5;
    std::vector<std::uint32_t> checkpoints = {50, 150, 400, 1000, 2000, 5000};
    SeedPolicy seed_policy = SeedPolicy::Independent;
    spsa::SpsaConfig spsa;
    /// Evaluate the cost-landscape spectrum at the best theta of pure chaotic cells.
    bool lle_at_optimum = false;
    /// Densities for alpha sweeps; each replaces the alpha of every generate block.
    std::vector<double> alphas;
    std::filesystem::path output_dir = "qacoa-out";
    /// 0 picks the hardware concurrency.
    std::size_t threads = 0;

    /// Throws ConfigError on an empty grid, restarts < 1 or an invalid SPSA block.
    void validate() const;
};

/// Names accepted by preset().
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(const std::string &name);

RunConfig load_config(const std::filesystem::path &path);
RunConfig parse_config(const std::string &yaml_text);

/// Checkpoints inside [1, j_max], sorted and unique.
std::vector<std::uint32_t> effective_checkpoints(const RunConfig &cfg);

/// SHA-1 of the canonical JSON form, excluding output_dir and threads.
std::string config_hash(const RunConfig &cfg);

/// Worker count after the environment override.
std::size_t resolve_threads(const RunConfig &cfg);

struct LoadedInstance {
    std::size_t index = 0;
    std::string id;
    sat::SatInstance instance;
};

std::vector<LoadedInstance> load_instances(const RunConfig &cfg);

struct Cell {
    std::size_t instance_index = 0;
    schemes::SchemeSpec spec;
    std::uint32_t restart = 0;
    std::uint64_t seed = 0;
};

/// Cells in execution / output order. Throws ConfigError on a seed collision.
std::vector<Cell> enumerate_cells(const RunConfig &cfg,
                                  const std::vector<LoadedInstance> &instances);

struct CheckpointValue {
    std::uint32_t j = 0;
    double f = 0.0;
    double ar = 0.0;
    double misassignment = 0.0;
};

struct RunRecord {
    std::string config_hash;
    std::size_t instance_index = 0;
    std::string instance_id;
    std::size_t n_vars = 0;
    std::size_t k = 0;
    double alpha = 0.0;
    std::string scheme;
    schemes::SchemeKind kind = schemes::SchemeKind::Standard;
    std::uint32_t p = 0;
    /// 0 for Standard, where the map speed does not apply.
    std::uint32_t c = 0;
    std::uint32_t p_t = 0;
    std::uint32_t T = 0;
    std::uint32_t restart = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    std::size_t evaluations = 0;
    double a = 0.0;
    double c0 = 0.0;
    std::vector<double> theta_1;
    std::vector<double> final_theta;
    double final_f = 0.0;
    double final_ar = 0.0;
    double final_misassignment = 0.0;
    std::vector<double> best_theta;
    double best_f = 0.0;
    std::vector<CheckpointValue> checkpoints;
    std::optional<nlohmann::json> lle;
};

void to_json(nlohmann::json &j, const RunRecord &r);
void from_json(const nlohmann::json &j, RunRecord &r);

std::vector<RunRecord> read_records(const std::filesystem::path &path);
void write_records(const std::vector<RunRecord> &records, std::ostream &out);

/// Runs every cell in memory; failures are captured per record.
std::vector<RunRecord> execute(const RunConfig &cfg);

struct AggregateRow {
    std::string scheme;
    std::uint32_t p = 0;
    std::uint32_t c = 0;
    std::optional<double> alpha;
    std::uint32_t j = 0;
    std::size_t n = 0;
    double median_ar = 0.0;
    double q25_ar = 0.0;
    double q75_ar = 0.0;
    double mean_ar = 0.0;
    double se_ar = 0.0;
    double ci68_lo = 0.0;
    double ci68_hi = 0.0;
    double mean_misassignment = 0.0;
};

/// Groups successful records by (scheme, p, c[, alpha], j); rows come out sorted.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord> &records, bool by_alpha = false);
void write_aggregate_csv(const std::vector<AggregateRow> &rows, std::ostream &out);

struct CompareRow {
    std::size_t instance_index = 0;
    std::uint32_t p = 0;
    std::uint32_t j = 0;
    double mean_baseline = 0.0;
    double mean_other = 0.0;
    double difference = 0.0;
    double se = 0.0;
};

/**
 * Per (instance, p, j) mean-AR difference other - baseline, with standard
 * errors added in quadrature. Schemes are matched by label. Throws
 * AlignmentError listing the cells present on only one side.
 */
std::vector<CompareRow> compare(const std::vector<RunRecord> &records,
                                const std::string &baseline, const std::string &other);
void write_compare_csv(const std::vector<CompareRow> &rows, std::ostream &out);

struct RunSummary {
    std::vector<RunRecord> records;
    std::vector<AggregateRow> aggregate;
    std::size_t failures = 0;
};

/**
 * execute() plus persistence: config.json, one DIMACS file per instance, records.jsonl and
 * aggregate.csv under cfg.output_dir. The directory is checked before any
 * cell runs; an unusable one raises ConfigError.
 */
RunSummary run(const RunConfig &cfg);

/// run() over cfg.alphas with aggregates keyed by alpha.
RunSummary alpha_sweep(const RunConfig &cfg);

void to_json(nlohmann::json &j, const RunConfig &cfg);

} // namespace qacoa::runner
