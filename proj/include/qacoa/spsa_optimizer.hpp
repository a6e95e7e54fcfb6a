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
 * Box-constrained SPSA with gain calibration from an initial gradient
 * probe.
 *
 * Iterations are numbered j = 1..j_max and use the gains
 *
 *     a_j = a / (A + j)^alpha,    c_j = c0 / j^gamma,
 *
 * i.e. the zero-based form a/(A + k + 1)^alpha with k = j - 1. Every
 * iteration costs two probe evaluations plus one clean evaluation at the
 * updated point; the calibration probe adds two more, once.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "qacoa/error.hpp"
#include "qacoa/param_schemes.hpp"
#include "qacoa/qaoa_simulator.hpp"
#include "qacoa/rng.hpp"
#include "qacoa/sat_instances.hpp"

namespace qacoa::spsa {

struct SpsaConfig {
    std::uint32_t j_max = 1000;
    double alpha_gain = 0.602;
    double gamma_gain = 0.101;
    /// Stability constant; j_max / 100 when unset.
    std::optional<double> A;
    double c0 = 0.1;
    double delta_theta_min = 0.01;
    std::uint64_t seed = 0;
    /// Scale c0 by exp(-ln 2 * steps), steps = the scheme's longest map chain.
    bool ergodic_gain_rescale = false;

    [[nodiscard]] double stability() const {
        return A.has_value() ? *A : static_cast<double>(j_max) / 100.0;
    }

    /// Throws DomainError unless j_max >= 1, 0 < gamma < alpha <= 1, c0 > 0,
    /// delta_theta_min > 0 and A >= 0.
    void validate() const;
};

/// Lower bound on the rescaled perturbation size.
inline constexpr double kMinPerturbation = 1e-12;

/// a / (A + j)^alpha for j >= 1.
double gain_a(double a, const SpsaConfig &cfg, std::uint32_t j);
/// c0 / j^gamma for j >= 1.
double gain_c(double c0, const SpsaConfig &cfg, std::uint32_t j);

/// c0 after the optional depth rescaling for the given scheme.
double effective_c0(const SpsaConfig &cfg, const schemes::SchemeSpec &spec);

using Objective = std::function<double(std::span<const double>)>;
/// Clean evaluation used for recording; must agree with Objective on f_value.
using Recorder = std::function<sim::EvalResult(std::span<const double>)>;

/// Thrown when an objective call fails; the original exception is nested.
class IterationError : public Error {
  public:
    IterationError(const std::string &msg, std::uint32_t iteration)
        : Error(msg), iteration_(iteration) {}
    /// 0 for the calibration probe.
    [[nodiscard]] std::uint32_t iteration() const noexcept { return iteration_; }

  private:
    std::uint32_t iteration_;
};

struct Calibration {
    double a = 0.0;
    /// Geometric mean of the nonzero gradient magnitudes.
    double g_tilde = 0.0;
    std::vector<double> gradient;
};

/**
 * delta_theta_min (A + 1)^alpha / g_tilde for a given gradient estimate.
 * Zero components are dropped; throws CalibrationError if none remain.
 */
Calibration calibrate_from_gradient(std::span<const double> gradient, const SpsaConfig &cfg);

/// One two-point probe at theta_1 with perturbation size c0, then calibrate_from_gradient.
Calibration calibrate_a(const Objective &objective, std::span<const double> theta_1,
                        const SpsaConfig &cfg, double c0, Rng &rng);

struct StepResult {
    std::vector<double> theta;
    std::vector<int> signs;
    std::vector<double> gradient;
    double f_plus = 0.0;
    double f_minus = 0.0;
};

/// theta_{j+1} from theta_j, clipped to the unit box.
StepResult spsa_step(const Objective &objective, std::span<const double> theta_j,
                     std::uint32_t j, double a, double c0, const SpsaConfig &cfg, Rng &rng);

struct SpsaIteration {
    std::uint32_t j = 0;
    /// Parameters after update j.
    std::vector<double> theta;
    double f_value = 0.0;
    double ar = 0.0;
    double misassignment = 0.0;
    double a_j = 0.0;
    double c_j = 0.0;
    std::vector<int> signs;
};

struct SpsaTrace {
    std::vector<double> theta_1;
    double a = 0.0;
    double c0 = 0.0;
    double g_tilde = 0.0;
    std::vector<SpsaIteration> iterations;
    std::vector<double> best_theta;
    double best_f = 0.0;
    std::size_t evaluations = 0;
};

/**
 * Full run from theta_1. When the recorder is empty the clean evaluation
 * goes through the objective and ar / misassignment are NaN.
 */
SpsaTrace minimize(const Objective &objective, const Recorder &recorder,
                   std::vector<double> theta_1, const SpsaConfig &cfg, double c0, Rng &rng);

/// Draws theta_1 uniformly with cfg.seed, then runs minimize on F.
SpsaTrace optimize(const schemes::SchemeSpec &spec, const sat::CostDiagonal &diag,
                   const SpsaConfig &cfg);

void to_json(nlohmann::json &j, const SpsaConfig &cfg);
void from_json(const nlohmann::json &j, SpsaConfig &cfg);
void to_json(nlohmann::json &j, const SpsaTrace &trace);

/// Header "j,f,ar,misassignment,a_j,c_j,theta_0,...".
void write_trace_csv(const SpsaTrace &trace, std::ostream &out);

} // namespace qacoa::spsa
