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
 * Trainability diagnostics for chaotic schedules: the cost-landscape
 * Lyapunov spectrum, the linearizability bound eta, the nonlinear control
 * noise moment zeta, the empirical differential CDF and a landscape
 * mixing metric.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "qacoa/param_schemes.hpp"
#include "qacoa/qaoa_simulator.hpp"
#include "qacoa/sat_instances.hpp"
#include "qacoa/stats.hpp"

namespace qacoa::diag {

/// Denominators below this are treated as a vanishing first-layer gradient.
inline constexpr double kDenominatorFloor = 1e-300;

struct LleRow {
    std::uint32_t p = 0;
    /// Cost-landscape exponents for theta_1 (cost) and theta_2 (mixer); NaN when flagged.
    std::array<double, 2> cost{};
    /// True when the first-layer gradient of that component vanishes.
    std::array<bool, 2> degenerate{};
    /// Phase-space exponents at the same depth.
    std::array<double, 2> phase{};
};

struct LleReport {
    std::array<double, 2> theta{};
    std::uint32_t c = 1;
    /// c ln 2.
    double gle_target = 0.0;
    /// |dF/df_1| and |dF/dg_1| of the depth-1 circuit.
    std::array<double, 2> denominator{};
    /// p = 2..p_max.
    std::vector<LleRow> rows;
};

/**
 * Exponents
 *
 *     (1/(p-1)) ln |sum_m h_{m,c}(theta_i) dF^{(p)}/d angle_m|
 *                / |dF^{(1)}/d angle_1|
 *
 * with angle = f for i = 1 and g for i = 2, evaluated in log space so that
 * h_{m,c} may exceed the double range. Requires a PureChaotic scheme and
 * p_max >= 2; spec.p is ignored.
 */
LleReport cost_lle_spectrum(const schemes::SchemeSpec &spec, std::span<const double> theta,
                            const sat::CostDiagonal &diag, std::uint32_t p_max);

struct EtaRow {
    std::uint32_t p = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double log_median = 0.0;
    /// Samples with an infinite or zero eta, left out of the quantiles.
    std::size_t excluded = 0;
};

struct EtaSweep {
    std::uint32_t c = 1;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<EtaRow> rows;
    /// ln(median eta) against p.
    stats::LinearFit fit;
};

/// eta_{p,c} over n_samples uniform theta (the same draws at every depth). p = 1 is skipped.
EtaSweep eta_sweep(std::uint32_t c, std::uint32_t p_min, std::uint32_t p_max,
                   std::size_t n_samples, std::uint64_t seed);

/**
 * Nonlinear remainder l^n(theta + d) - l^n(theta) - d h, n = c(p-1), computed
 * in extended precision so that theta + d is exact.
 */
double control_noise_remainder(double theta, std::uint32_t p, std::uint32_t c, double d);

/// zeta_{p,p}(theta)_{ii} / delta^2: the exact average over d = +delta and d = -delta.
double control_noise_sample(double theta, std::uint32_t p, std::uint32_t c, double delta);

/**
 * Full 2x2 zeta_{m1,m2}(theta) / delta^2 by enumerating the four sign
 * patterns of a two-component perturbation.
 */
std::array<std::array<double, 2>, 2> control_noise_correlation(std::span<const double> theta,
                                                               std::uint32_t m1,
                                                               std::uint32_t m2,
                                                               std::uint32_t c, double delta);

struct NoiseRow {
    std::uint32_t p = 0;
    /// Mean over theta samples of zeta_{p,p} / delta^2.
    double mean = 0.0;
    double stddev = 0.0;
    double standard_error = 0.0;
    double log_mean = 0.0;
    /// Every remainder at this depth rounded to zero in double.
    bool underflow = false;
};

struct NoiseMomentReport {
    std::uint32_t c = 1;
    double delta = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<NoiseRow> rows;
    /// ln(mean) against p over rows with a positive mean.
    stats::LinearFit fit;
};

NoiseMomentReport control_noise_moment(std::uint32_t c, std::uint32_t p_min,
                                       std::uint32_t p_max, double delta,
                                       std::size_t n_samples, std::uint64_t seed);

struct DifferentialCdf {
    std::vector<double> deltas;
    /// Fraction of samples with |dF| < Delta, one entry per deltas[k].
    std::vector<double> phi;
    /// Sorted |F(theta + dtheta) - F(theta)|.
    std::vector<double> samples;
};

/**
 * Empirical CDF of |F(theta + dtheta) - F(theta)| with dtheta_i = +-scale
 * (random signs, clipped into the box).
 */
DifferentialCdf differential_cdf(const schemes::SchemeSpec &spec, std::span<const double> theta,
                                 const sat::CostDiagonal &diag, std::span<const double> delta_grid,
                                 std::size_t n_perturbations, double scale, std::uint64_t seed);

/**
 * Mean |F(i, j+1) - F(i, j)| over the scan, divided by c_max - c_min.
 * Throws DomainError when c_max == c_min.
 */
double mixing_metric(const sim::LandscapeScan &scan, double c_min, double c_max);
double mixing_metric(const sim::LandscapeScan &scan, const sat::CostDiagonal &diag);

/// Writes "# meta: <json>" followed by a newline.
void write_meta_line(std::ostream &out, const nlohmann::json &meta);

void write_lle_csv(const LleReport &report, std::ostream &out);
void write_eta_csv(const EtaSweep &sweep, std::ostream &out);
void write_noise_csv(const NoiseMomentReport &report, std::ostream &out);
void write_landscape_csv(const sim::LandscapeScan &scan, std::ostream &out);

void to_json(nlohmann::json &j, const LleReport &r);
void to_json(nlohmann::json &j, const EtaSweep &s);
void to_json(nlohmann::json &j, const NoiseMomentReport &r);

} // namespace qacoa::diag
