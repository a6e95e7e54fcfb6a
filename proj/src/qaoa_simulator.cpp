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
#include "qacoa/qaoa_simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "qacoa/error.hpp"

namespace qacoa::sim {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dimension(const StateVector &state, const sat::CostDiagonal &diag) {
    if (state.dimension() != diag.dimension()) {
        throw ShapeError("state dimension " + std::to_string(state.dimension()) +
                         " does not match cost diagonal dimension " +
                         std::to_string(diag.dimension()));
    }
}

/// exp(-i 2 pi f e) for e = 0..c_max, with f reduced to [0, 1).
std::vector<complex_t> cost_phases(const sat::CostDiagonal &diag, double f) {
    const double fr = f - std::floor(f);
    std::vector<complex_t> table(static_cast<std::size_t>(diag.c_max) + 1U);
    for (std::size_t e = 0; e < table.size(); ++e) {
        const double turns = fr * static_cast<double>(e);
        table[e] = std::polar(1.0, -2.0 * kPi * (turns - std::floor(turns)));
    }
    return table;
}

/// <a| H_M |b> with H_M = sum_q X_q.
complex_t mixer_inner(std::span<const complex_t> a, std::span<const complex_t> b,
                      std::size_t n_qubits) {
    complex_t acc{0.0, 0.0};
    for (std::size_t x = 0; x < a.size(); ++x) {
        complex_t hb{0.0, 0.0};
        for (std::size_t q = 0; q < n_qubits; ++q) {
            hb += b[x ^ (std::size_t{1} << q)];
        }
        acc += std::conj(a[x]) * hb;
    }
    return acc;
}

/// <a| H_C |b>.
complex_t cost_inner(std::span<const complex_t> a, std::span<const complex_t> b,
                     const sat::CostDiagonal &diag) {
    complex_t acc{0.0, 0.0};
    for (std::size_t x = 0; x < a.size(); ++x) {
        acc += std::conj(a[x]) * b[x] * static_cast<double>(diag.energies[x]);
    }
    return acc;
}

} // namespace

StateVector::StateVector(std::size_t n_qubits, std::vector<complex_t> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (n_qubits_ > kMaxQubits || n_qubits_ >= 63) {
        throw ResourceError("at most " + std::to_string(kMaxQubits) + " qubits supported");
    }
    if (amplitudes_.size() != (std::size_t{1} << n_qubits_)) {
        throw ShapeError("expected " + std::to_string(std::size_t{1} << n_qubits_) +
                         " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto &a : amplitudes_) {
        s += std::norm(a);
    }
    return s;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(),
                   [](const complex_t &a) { return std::norm(a); });
    return p;
}

StateVector initial_state(std::size_t n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw ResourceError("qubit count must lie in [1, " + std::to_string(kMaxQubits) +
                            "], got " + std::to_string(n_qubits));
    }
    const std::size_t dim = std::size_t{1} << n_qubits;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    return {n_qubits, std::vector<complex_t>(dim, complex_t{amp, 0.0})};
}

void apply_cost(StateVector &state, const sat::CostDiagonal &diag, double f) {
    check_dimension(state, diag);
    const auto table = cost_phases(diag, f);
    auto amps = state.amplitudes();
    for (std::size_t x = 0; x < amps.size(); ++x) {
        amps[x] *= table[diag.energies[x]];
    }
}

void apply_mixer(StateVector &state, double g) {
    const double gr = std::fmod(g, 2.0);
    const double c = std::cos(kPi * gr);
    const complex_t ms{0.0, -std::sin(kPi * gr)};
    auto amps = state.amplitudes();
    const std::size_t dim = amps.size();
    for (std::size_t q = 0; q < state.n_qubits(); ++q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const complex_t a0 = amps[i];
                const complex_t a1 = amps[i + stride];
                amps[i] = c * a0 + ms * a1;
                amps[i + stride] = ms * a0 + c * a1;
            }
        }
    }
}

double expectation(const StateVector &state, const sat::CostDiagonal &diag) {
    check_dimension(state, diag);
    double f = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t x = 0; x < amps.size(); ++x) {
        f += std::norm(amps[x]) * static_cast<double>(diag.energies[x]);
    }
    return f;
}

double approximation_ratio(double f_value, const sat::CostDiagonal &diag) noexcept {
    if (diag.c_max == diag.c_min) {
        return 1.0;
    }
    return (static_cast<double>(diag.c_max) - f_value) /
           static_cast<double>(diag.c_max - diag.c_min);
}

double misassignment_rate(const StateVector &state, const sat::CostDiagonal &diag) {
    check_dimension(state, diag);
    if (diag.solutions.empty() || diag.solution_distance.size() != diag.dimension()) {
        throw Error("cost diagonal carries no solution distance field");
    }
    double h = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t x = 0; x < amps.size(); ++x) {
        h += std::norm(amps[x]) * static_cast<double>(diag.solution_distance[x]);
    }
    return h / static_cast<double>(diag.n_vars);
}

double misassignment_rate_partition(const StateVector &state, const sat::CostDiagonal &diag) {
    check_dimension(state, diag);
    if (diag.solutions.empty()) {
        throw Error("cost diagonal has an empty solution set");
    }
    std::vector<double> shell(diag.n_vars + 1, 0.0);
    const auto amps = state.amplitudes();
    for (std::size_t u = 0; u < amps.size(); ++u) {
        int d = std::numeric_limits<int>::max();
        for (const auto s : diag.solutions) {
            d = std::min(d, std::popcount(static_cast<std::uint64_t>(u) ^ s));
        }
        shell[static_cast<std::size_t>(d)] += std::norm(amps[u]);
    }
    double h = 0.0;
    for (std::size_t d = 1; d < shell.size(); ++d) {
        h += static_cast<double>(d) * shell[d];
    }
    return h / static_cast<double>(diag.n_vars);
}

StateVector run_circuit(const schemes::AngleSchedule &schedule, const sat::CostDiagonal &diag) {
    auto state = initial_state(diag.n_vars);
    for (const auto &layer : schedule) {
        apply_cost(state, diag, layer.f);
        apply_mixer(state, layer.g);
    }
    return state;
}

EvalResult evaluate_schedule(const schemes::AngleSchedule &schedule,
                             const sat::CostDiagonal &diag, bool keep_state) {
    auto state = run_circuit(schedule, diag);
    EvalResult r;
    r.f_value = expectation(state, diag);
    r.ar = approximation_ratio(r.f_value, diag);
    r.misassignment = misassignment_rate(state, diag);
    if (keep_state) {
        r.state = std::move(state);
    }
    return r;
}

EvalResult evaluate(const schemes::SchemeSpec &spec, std::span<const double> theta,
                    const sat::CostDiagonal &diag, bool keep_state) {
    return evaluate_schedule(schemes::angles(spec, theta), diag, keep_state);
}

std::vector<schemes::AnglePair> schedule_gradient(const schemes::AngleSchedule &schedule,
                                                  const sat::CostDiagonal &diag) {
    auto psi = run_circuit(schedule, diag);
    StateVector lambda = psi;
    {
        auto l = lambda.amplitudes();
        for (std::size_t x = 0; x < l.size(); ++x) {
            l[x] *= static_cast<double>(diag.energies[x]);
        }
    }
    std::vector<schemes::AnglePair> grad(schedule.size());
    for (std::size_t m = schedule.size(); m-- > 0;) {
        const auto &layer = schedule[m];
        grad[m].g =
            2.0 * kPi * mixer_inner(lambda.amplitudes(), psi.amplitudes(), psi.n_qubits()).imag();
        apply_mixer(psi, -layer.g);
        apply_mixer(lambda, -layer.g);
        grad[m].f = 4.0 * kPi * cost_inner(lambda.amplitudes(), psi.amplitudes(), diag).imag();
        apply_cost(psi, diag, -layer.f);
        apply_cost(lambda, diag, -layer.f);
    }
    return grad;
}

std::vector<schemes::AnglePair> layer_angle_gradient(const schemes::SchemeSpec &spec,
                                                     std::span<const double> theta,
                                                     const sat::CostDiagonal &diag) {
    return schedule_gradient(schemes::angles(spec, theta), diag);
}

std::vector<double> theta_gradient(const schemes::SchemeSpec &spec,
                                   std::span<const double> theta,
                                   const sat::CostDiagonal &diag) {
    const auto layer = layer_angle_gradient(spec, theta, diag);
    const auto jac = schemes::angle_jacobian(spec, theta);
    std::vector<double> out(jac.cols, 0.0);
    for (std::size_t m = 0; m < layer.size(); ++m) {
        for (std::size_t j = 0; j < jac.cols; ++j) {
            const double jf = jac(2 * m, j);
            const double jg = jac(2 * m + 1, j);
            if (jf != 0.0) {
                out[j] += jf * layer[m].f;
            }
            if (jg != 0.0) {
                out[j] += jg * layer[m].g;
            }
        }
    }
    return out;
}

LandscapeScan landscape_scan(const schemes::SchemeSpec &spec, const sat::CostDiagonal &diag,
                             std::size_t grid) {
    if (grid < 2) {
        throw DomainError("landscape grid must be >= 2");
    }
    if (schemes::n_theta(spec) != 2) {
        throw ShapeError("landscape scans need a two-parameter scheme, " + spec.label() +
                         " has " + std::to_string(schemes::n_theta(spec)));
    }
    LandscapeScan scan;
    scan.grid = grid;
    scan.axis.resize(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        scan.axis[i] = static_cast<double>(i) / static_cast<double>(grid - 1);
    }
    scan.values.resize(grid * grid);
    for (std::size_t i = 0; i < grid; ++i) {
        for (std::size_t j = 0; j < grid; ++j) {
            const double theta[2] = {scan.axis[i], scan.axis[j]};
            scan.values[i * grid + j] = expectation(run_circuit(schemes::angles(spec, theta), diag), diag);
        }
    }
    return scan;
}

void to_json(nlohmann::json &j, const EvalResult &r) {
    j = nlohmann::json{{"f_value", r.f_value}, {"ar", r.ar}, {"misassignment", r.misassignment}};
}

} // namespace qacoa::sim
