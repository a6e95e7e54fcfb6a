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
 * MAX K-SAT instances and their diagonal cost Hamiltonian.
 *
 * Conventions used throughout the library:
 *  - Bit i of a basis-state index is variable i (little endian).
 *  - A bit value of 1 means the variable is TRUE.
 *  - The cost of an assignment is the number of violated clauses, so
 *    the optimum is the minimum. The approximation ratio is computed as
 *    (c_max - F) / (c_max - c_min), which is the same quantity one gets
 *    from maximizing -H_C.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qacoa::sat {

/// Largest variable count accepted by build_cost_diagonal by default.
inline constexpr std::size_t kDefaultMaxVars = 24;

/// A disjunction of K literals. `signs[l]` is +1 for x and -1 for NOT x.
struct Clause {
    std::vector<std::uint32_t> vars;
    std::vector<int> signs;

    bool operator==(const Clause &) const = default;
};

struct SatInstance {
    std::size_t n_vars = 0;
    std::size_t k = 0;
    std::vector<Clause> clauses;

    [[nodiscard]] std::size_t num_clauses() const noexcept { return clauses.size(); }
    /// Clause density M/N.
    [[nodiscard]] double alpha() const noexcept {
        return static_cast<double>(clauses.size()) / static_cast<double>(n_vars);
    }

    /// Throws DomainError unless every clause has K distinct in-range vars.
    void validate() const;

    bool operator==(const SatInstance &) const = default;
};

/// Eigenvalues of H_C, indexed by basis state.
struct CostDiagonal {
    std::size_t n_vars = 0;
    std::vector<std::uint32_t> energies;
    std::uint32_t c_min = 0;
    std::uint32_t c_max = 0;
    /// Basis states attaining c_min, ascending.
    std::vector<std::uint64_t> solutions;
    /// Minimum Hamming distance from each basis state to `solutions`.
    std::vector<std::uint8_t> solution_distance;

    [[nodiscard]] std::size_t dimension() const noexcept { return energies.size(); }
};

/// Number of clauses for a requested density: round(alpha * n), halves away from zero.
std::size_t clause_count(std::size_t n_vars, double alpha);

/**
 * Random K-SAT: each clause draws K distinct variables uniformly and an
 * independent fair sign per literal. Duplicate clauses are allowed.
 */
SatInstance generate_random_instance(std::size_t n_vars, std::size_t k, double alpha,
                                     std::uint64_t seed);

/// True iff every literal of `clause` is false under `assignment`.
bool clause_violated(const Clause &clause, std::uint64_t assignment) noexcept;

/// Exhaustive diagonal. Throws ResourceError when n_vars > max_vars.
CostDiagonal build_cost_diagonal(const SatInstance &inst,
                                 std::size_t max_vars = kDefaultMaxVars);

/// Multi-source BFS over the hypercube from `sources`.
std::vector<std::uint8_t> hamming_distance_field(std::size_t n_vars,
                                                 const std::vector<std::uint64_t> &sources);

/// Parse DIMACS CNF. With `strict_k`, all clauses must share one width.
SatInstance read_dimacs(std::istream &in, bool strict_k = true);
SatInstance read_dimacs(const std::filesystem::path &path, bool strict_k = true);

void write_dimacs(const SatInstance &inst, std::ostream &out);
void write_dimacs(const SatInstance &inst, const std::filesystem::path &path);
std::string to_dimacs(const SatInstance &inst);

/// Lowercase hex SHA-1 of raw bytes.
std::string sha1_hex(std::string_view data);

/// Git blob SHA-1 of the DIMACS text; stable instance identifier.
std::string content_hash(const SatInstance &inst);

void to_json(nlohmann::json &j, const Clause &c);
void from_json(const nlohmann::json &j, Clause &c);
void to_json(nlohmann::json &j, const SatInstance &inst);
void from_json(const nlohmann::json &j, SatInstance &inst);

} // namespace qacoa::sat
