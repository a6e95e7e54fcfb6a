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
 * The logistic map l(x) = r x (1 - x), its iterates and derivatives, and
 * the Lyapunov / linearizability quantities built from them.
 *
 * Notation: with map speed c, layer m of a chaotic schedule sees
 * l^{c(m-1)}(theta). Its derivative is
 *
 *     h_{m,c}(theta) = prod_{i=1}^{c(m-1)} r (1 - 2 l^{i-1}(theta)),
 *
 * which grows like 2^{c(m-1)} for r = 4. Every quantity that can leave
 * the double range has a log-magnitude variant. Orbits are computed in
 * IEEE double; past a few dozen iterations they are pseudo-random
 * shadows of the true orbit, which is all the statistics below need.
 *
 * Measure-zero singular points (a factor exactly zero) produce signed
 * infinities rather than exceptions so that sweeps never abort.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qacoa::chaos {

inline constexpr double kDefaultR = 4.0;
/// Orbit points with |1 - 2x| below this are counted as near-critical.
inline constexpr double kCriticalTolerance = 1e-12;

struct LogisticParams {
    double r = kDefaultR;
    /// Map speed: logistic applications between consecutive layers.
    std::uint32_t c = 1;

    /// Throws DomainError unless 0 < r <= 4 and c >= 1.
    void validate() const;
};

/// Signed magnitude in log form. sign == 0 encodes an exact zero.
struct LogAbs {
    double log_abs;
    int sign;
};

/// r x (1 - x). Throws DomainError for x outside [0, 1].
double logistic(double x, double r = kDefaultR);

/// n-fold composition; n = 0 is the identity.
double iterate(double x, std::uint64_t n, double r = kDefaultR);

/// d/dx of l^n at x. Overflows to +-inf for large n.
double iterate_derivative(double x, std::uint64_t n, double r = kDefaultR);
LogAbs log_iterate_derivative(double x, std::uint64_t n, double r = kDefaultR);

/// h_{m,c}(theta); equal to 1 for m = 1.
double h_derivative(double theta, std::uint32_t m, std::uint32_t c, double r = kDefaultR);
LogAbs log_h_derivative(double theta, std::uint32_t m, std::uint32_t c,
                        double r = kDefaultR);

/**
 * d/dtheta h_{m,c}(theta), accumulated alongside h by the product rule:
 *
 *     h_k  = h_{k-1} a_k,          a_k = r (1 - 2 x_{k-1})
 *     h'_k = h'_{k-1} a_k - 2 r h_{k-1}^2
 *
 * so no division by (x - 1/2) ever happens.
 */
double h_second(double theta, std::uint32_t m, std::uint32_t c, double r = kDefaultR);
LogAbs log_h_second(double theta, std::uint32_t m, std::uint32_t c, double r = kDefaultR);

/**
 * The same derivative through h * sum_i h_{i-1} / (x_{i-1} - 1/2). Only
 * valid when no orbit point sits within kCriticalTolerance of 1/2; kept
 * for cross-checking the accumulated form.
 */
double h_second_division_form(double theta, std::uint32_t m, std::uint32_t c,
                              double r = kDefaultR);

struct LleDetail {
    /// (1/(p-1)) sum of ln|r(1 - 2 x)| over c(p-1) orbit points; -inf on a zero factor.
    double value = 0.0;
    bool zero_factor = false;
    /// Factors with |1 - 2x| < kCriticalTolerance.
    std::size_t near_critical = 0;
};

/// Phase-space local Lyapunov exponent. Requires p >= 2.
double phase_space_lle(double theta, std::uint32_t p, std::uint32_t c, double r = kDefaultR);
LleDetail phase_space_lle_detail(double theta, std::uint32_t p, std::uint32_t c,
                                 double r = kDefaultR);

/// Ergodic limit c ln 2 of the phase-space exponent for r = 4.
double global_lyapunov_exponent(std::uint32_t c) noexcept;

/**
 * Linearizability bound |2 h_{p,c} / d_theta h_{p,c}|. Returns +inf when
 * the derivative vanishes (always the case at p = 1).
 */
double eta_bound(double theta, std::uint32_t p, std::uint32_t c, double r = kDefaultR);
/// ln eta without leaving the double range; +inf / -inf at the singular cases.
double log_eta_bound(double theta, std::uint32_t p, std::uint32_t c, double r = kDefaultR);

/// Layer-sampled orbit l^{c(m-1)}(theta0), m = 1..m_max.
struct OrbitRecord {
    double theta0 = 0.0;
    std::uint32_t c = 1;
    std::vector<double> iterates;
    /// h_{m,c}(theta0); derivatives[0] == 1.
    std::vector<double> derivatives;
    /// phase_space_lle at p = m; entry 0 (m = 1) is NaN (undefined).
    std::vector<double> lle;
};

OrbitRecord orbit(double theta0, std::uint32_t m_max, std::uint32_t c, double r = kDefaultR);

/// Invariant density of the r = 4 map, 1 / (pi sqrt(z (1 - z))).
double arcsine_density(double z);
/// Its CDF, (2/pi) asin(sqrt z).
double arcsine_cdf(double z);

/**
 * Kolmogorov-Smirnov distance between the empirical distribution of
 * n_samples orbit points (after burn_in iterations from x0) and the
 * arcsine CDF. Throws DegenerateOrbitError if the orbit lands on a fixed
 * point or a 2-cycle.
 */
double orbit_ks_statistic(double x0, std::size_t n_samples, std::size_t burn_in);

/// orbit_ks_statistic from a start point drawn uniformly with `seed`.
double invariant_density_ks(std::size_t n_samples, std::size_t burn_in, std::uint64_t seed);

/// Normalized density histogram of an orbit over `bins` equal cells of [0, 1].
std::vector<double> orbit_histogram(double x0, std::size_t n_samples, std::size_t burn_in,
                                    std::size_t bins);

} // namespace qacoa::chaos
