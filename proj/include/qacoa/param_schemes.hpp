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
 * Parameter schemes: maps from a free vector theta in [0,1]^{n_theta} to
 * the p normalized angle pairs (f_m, g_m) of a QAOA circuit.
 *
 * Every scheme here has the same shape. Layer m reads one theta component
 * for f_m and one for g_m and applies the logistic map some number of
 * times to each. The AngleSource list makes that explicit, and angles()
 * and angle_jacobian() are both driven by it.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qacoa/chaos_maps.hpp"

namespace qacoa::schemes {

enum class SchemeKind { Standard, PureChaotic, DelayedHybrid, IteratedHybrid };

std::string to_string(SchemeKind kind);
/// Accepts the names produced by to_string. Throws DomainError otherwise.
SchemeKind scheme_kind_from_string(const std::string &name);

struct SchemeSpec {
    SchemeKind kind = SchemeKind::Standard;
    std::uint32_t p = 1;
    /// Map speed; ignored by Standard.
    std::uint32_t c = 1;
    /// Truncation depth of DelayedHybrid.
    std::uint32_t p_t = 1;
    /// Block length of IteratedHybrid.
    std::uint32_t T = 1;
    double r = chaos::kDefaultR;

    static SchemeSpec standard(std::uint32_t p);
    static SchemeSpec pure_chaotic(std::uint32_t p, std::uint32_t c);
    static SchemeSpec delayed_hybrid(std::uint32_t p, std::uint32_t c, std::uint32_t p_t);
    static SchemeSpec iterated_hybrid(std::uint32_t p, std::uint32_t c, std::uint32_t T);

    /// Throws DomainError on p, c, p_t or T below 1, or r outside (0, 4].
    void validate() const;

    /// Short label, e.g. "pure_chaotic(c=100)".
    [[nodiscard]] std::string label() const;

    bool operator==(const SchemeSpec &) const = default;
};

/// Normalized angles of one layer: cost phase 2 pi f, mixer phase pi g.
struct AnglePair {
    double f = 0.0;
    double g = 0.0;

    bool operator==(const AnglePair &) const = default;
};

using AngleSchedule = std::vector<AnglePair>;

/// Layer m takes f_m = l^{steps}(theta[f_index]) and g_m = l^{steps}(theta[g_index]).
struct AngleSource {
    std::size_t f_index = 0;
    std::size_t g_index = 0;
    std::uint64_t steps = 0;
};

/// Number of free parameters.
std::size_t n_theta(const SchemeSpec &spec);

/// One entry per layer, m = 1..p.
std::vector<AngleSource> angle_sources(const SchemeSpec &spec);

/// Largest number of map applications any layer sees.
std::uint64_t max_map_steps(const SchemeSpec &spec);

/**
 * The angle schedule. Throws ShapeError on a length mismatch and
 * DomainError for entries outside [0, 1].
 */
AngleSchedule angles(const SchemeSpec &spec, std::span<const double> theta);

/// Row-major (2p) x n_theta matrix; row 2(m-1) is f_m, row 2(m-1)+1 is g_m.
struct AngleJacobian {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return data[i * cols + j];
    }
    double &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

/// Exact derivatives of angles(); entries overflow to +-inf for long chaotic tails.
AngleJacobian angle_jacobian(const SchemeSpec &spec, std::span<const double> theta);

/// CSV with header "m,f,g".
void write_schedule_csv(const AngleSchedule &schedule, std::ostream &out);

void to_json(nlohmann::json &j, const SchemeSpec &spec);
void from_json(const nlohmann::json &j, SchemeSpec &spec);

} // namespace qacoa::schemes
