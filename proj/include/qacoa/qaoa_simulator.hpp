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
 * Dense statevector simulation of the alternating cost / mixer ansatz.
 *
 * Layer m applies exp(-i 2 pi f_m H_C) and then exp(-i pi g_m H_M) with
 * H_M = sum_q X_q, starting from the uniform superposition. Expectations
 * are exact; there is no shot sampling.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "qacoa/param_schemes.hpp"
#include "qacoa/sat_instances.hpp"

namespace qacoa::sim {

using complex_t = std::complex<double>;

/// Largest qubit count the simulator accepts.
inline constexpr std::size_t kMaxQubits = 24;

class StateVector {
  public:
    StateVector() = default;
    StateVector(std::size_t n_qubits, std::vector<complex_t> amplitudes);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const complex_t> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] std::span<complex_t> amplitudes() noexcept { return amplitudes_; }
    complex_t &operator[](std::size_t i) { return amplitudes_[i]; }
    const complex_t &operator[](std::size_t i) const { return amplitudes_[i]; }

    [[nodiscard]] double norm_squared() const noexcept;
    /// |a_x|^2 for every basis state.
    [[nodiscard]] std::vector<double> probabilities() const;

  private:
    std::size_t n_qubits_ = 0;
    std::vector<complex_t> amplitudes_;
};

/// |+>^N. Throws ResourceError for N = 0 or N > kMaxQubits.
StateVector initial_state(std::size_t n_qubits);

/// a_x <- a_x exp(-i 2 pi f E_x). Throws ShapeError on a dimension mismatch.
void apply_cost(StateVector &state, const sat::CostDiagonal &diag, double f);

/// exp(-i pi g X) on every qubit.
void apply_mixer(StateVector &state, double g);

/// <psi|H_C|psi>.
double expectation(const StateVector &state, const sat::CostDiagonal &diag);

/// (c_max - F) / (c_max - c_min); 1 when the spectrum is flat.
double approximation_ratio(double f_value, const sat::CostDiagonal &diag) noexcept;

/// Expected distance to the nearest optimum over N, from the precomputed distance field.
double misassignment_rate(const StateVector &state, const sat::CostDiagonal &diag);

/**
 * The same quantity assembled shell by shell: sum_d d P(U_d) / N, where
 * U_d is found by comparing every basis state against every optimum.
 */
double misassignment_rate_partition(const StateVector &state, const sat::CostDiagonal &diag);

struct EvalResult {
    double f_value = 0.0;
    double ar = 0.0;
    double misassignment = 0.0;
    std::optional<StateVector> state;
};

/// Final state of the circuit for an explicit schedule.
StateVector run_circuit(const schemes::AngleSchedule &schedule, const sat::CostDiagonal &diag);

EvalResult evaluate_schedule(const schemes::AngleSchedule &schedule,
                             const sat::CostDiagonal &diag, bool keep_state = false);

EvalResult evaluate(const schemes::SchemeSpec &spec, std::span<const double> theta,
                    const sat::CostDiagonal &diag, bool keep_state = false);

/// (dF/df_m, dF/dg_m) per layer, by a reverse sweep over the circuit.
std::vector<schemes::AnglePair> schedule_gradient(const schemes::AngleSchedule &schedule,
                                                  const sat::CostDiagonal &diag);

std::vector<schemes::AnglePair> layer_angle_gradient(const schemes::SchemeSpec &spec,
                                                     std::span<const double> theta,
                                                     const sat::CostDiagonal &diag);

/// dF/dtheta through the angle Jacobian.
std::vector<double> theta_gradient(const schemes::SchemeSpec &spec,
                                   std::span<const double> theta,
                                   const sat::CostDiagonal &diag);

/// F on a uniform grid x grid lattice over [0,1]^2 for a two-parameter scheme.
struct LandscapeScan {
    std::size_t grid = 0;
    /// Lattice coordinates i / (grid - 1).
    std::vector<double> axis;
    /// values[i * grid + j] = F(theta_1 = axis[i], theta_2 = axis[j]).
    std::vector<double> values;

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * grid + j]; }
};

/// Throws DomainError for grid < 2 and ShapeError unless n_theta(spec) == 2.
LandscapeScan landscape_scan(const schemes::SchemeSpec &spec, const sat::CostDiagonal &diag,
                             std::size_t grid);

void to_json(nlohmann::json &j, const EvalResult &r);

} // namespace qacoa::sim
