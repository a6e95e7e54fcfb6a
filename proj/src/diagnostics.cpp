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
#include "qacoa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qacoa/chaos_maps.hpp"
#include "qacoa/error.hpp"
#include "qacoa/rng.hpp"

namespace qacoa::diag {

namespace {

namespace mp = boost::multiprecision;

template <unsigned Bits>
using Real = mp::number<mp::cpp_bin_float<Bits, mp::digit_base_2>, mp::et_off>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// l^n(theta + d) - l^n(theta) - d h_n(theta) at the requested precision.
template <unsigned Bits>
Real<Bits> remainder_mp(double theta, std::uint64_t n, double d) {
    using R = Real<Bits>;
    const R four(4);
    R x(theta);
    R y = R(theta) + R(d);
    R h(1);
    for (std::uint64_t i = 0; i < n; ++i) {
        h *= four * (1 - 2 * x);
        x = four * x * (1 - x);
        y = four * y * (1 - y);
    }
    return y - x - R(d) * h;
}

template <unsigned Bits>
double noise_sample_mp(double theta, std::uint64_t n, double delta) {
    using R = Real<Bits>;
    const R plus = remainder_mp<Bits>(theta, n, delta);
    const R minus = remainder_mp<Bits>(theta, n, -delta);
    const R d(delta);
    return static_cast<double>((plus * plus + minus * minus) / (2 * d * d));
}

/// Working precision from the perturbation size: theta + d must be exact and
/// the O(d^2) remainder must sit well above the rounding floor.
unsigned precision_tier(double delta) {
    const double need = 2.0 * -std::log2(std::abs(delta)) + 96.0;
    if (need <= 256.0) {
        return 256;
    }
    if (need <= 1024.0) {
        return 1024;
    }
    return 4096;
}

void check_noise_args(double theta, std::uint32_t p, std::uint32_t c, double delta) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw DomainError("theta must lie in [0, 1]");
    }
    if (p < 1 || c < 1) {
        throw DomainError("p and c must be >= 1");
    }
    if (!(delta != 0.0 && std::isfinite(delta))) {
        throw DomainError("perturbation must be finite and nonzero");
    }
}

/// log |sum_k s_k exp(l_k)|, or -inf for an empty or cancelling sum.
double signed_log_sum(const std::vector<double> &logs, const std::vector<int> &signs) {
    double top = -std::numeric_limits<double>::infinity();
    for (const double l : logs) {
        top = std::max(top, l);
    }
    if (!std::isfinite(top)) {
        return -std::numeric_limits<double>::infinity();
    }
    double s = 0.0;
    for (std::size_t k = 0; k < logs.size(); ++k) {
        s += signs[k] * std::exp(logs[k] - top);
    }
    if (s == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return top + std::log(std::abs(s));
}

void write_double(std::ostream &out, double v) {
    if (std::isnan(v)) {
        out << "nan";
    } else if (std::isinf(v)) {
        out << (v > 0 ? "inf" : "-inf");
    } else {
        out << v;
    }
}

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json fit_json(const stats::LinearFit &f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
            {"n", f.n}};
}

} // namespace

LleReport cost_lle_spectrum(const schemes::SchemeSpec &spec, std::span<const double> theta,
                            const sat::CostDiagonal &diag, std::uint32_t p_max) {
    if (spec.kind != schemes::SchemeKind::PureChaotic) {
        throw DomainError("cost_lle_spectrum needs a pure_chaotic scheme");
    }
    if (p_max < 2) {
        throw DomainError("cost_lle_spectrum needs p_max >= 2");
    }
    if (theta.size() != 2) {
        throw ShapeError("cost_lle_spectrum needs two parameters");
    }
    LleReport rep;
    rep.theta = {theta[0], theta[1]};
    rep.c = spec.c;
    rep.gle_target = chaos::global_lyapunov_exponent(spec.c);

    const auto g1 = sim::layer_angle_gradient(schemes::SchemeSpec::pure_chaotic(1, spec.c),
                                              theta, diag);
    rep.denominator = {std::abs(g1[0].f), std::abs(g1[0].g)};

    std::array<std::vector<chaos::LogAbs>, 2> log_h;
    for (std::size_t i = 0; i < 2; ++i) {
        log_h[i].reserve(p_max);
        for (std::uint32_t m = 1; m <= p_max; ++m) {
            log_h[i].push_back(chaos::log_h_derivative(theta[i], m, spec.c, spec.r));
        }
    }

    for (std::uint32_t p = 2; p <= p_max; ++p) {
        auto sp = spec;
        sp.p = p;
        const auto grad = sim::layer_angle_gradient(sp, theta, diag);
        LleRow row;
        row.p = p;
        for (std::size_t i = 0; i < 2; ++i) {
            row.phase[i] = chaos::phase_space_lle(theta[i], p, spec.c, spec.r);
            if (rep.denominator[i] < kDenominatorFloor) {
                row.degenerate[i] = true;
                row.cost[i] = kNaN;
                continue;
            }
            std::vector<double> logs;
            std::vector<int> signs;
            for (std::uint32_t m = 0; m < p; ++m) {
                const double g = i == 0 ? grad[m].f : grad[m].g;
                const auto &lh = log_h[i][m];
                if (g == 0.0 || lh.sign == 0) {
                    continue;
                }
                logs.push_back(lh.log_abs + std::log(std::abs(g)));
                signs.push_back(lh.sign * (g > 0.0 ? 1 : -1));
            }
            const double num = signed_log_sum(logs, signs);
            row.cost[i] = (num - std::log(rep.denominator[i])) / static_cast<double>(p - 1);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

EtaSweep eta_sweep(std::uint32_t c, std::uint32_t p_min, std::uint32_t p_max,
                   std::size_t n_samples, std::uint64_t seed) {
    if (c < 1) {
        throw DomainError("map speed c must be >= 1");
    }
    if (p_max < std::max<std::uint32_t>(p_min, 2)) {
        throw DomainError("eta_sweep needs p_max >= max(p_min, 2)");
    }
    if (n_samples == 0) {
        throw DomainError("eta_sweep needs samples");
    }
    EtaSweep sweep;
    sweep.c = c;
    sweep.n_samples = n_samples;
    sweep.seed = seed;
    Rng rng(seed);
    std::vector<double> thetas(n_samples);
    for (auto &t : thetas) {
        t = rng.uniform();
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::uint32_t p = std::max<std::uint32_t>(p_min, 2); p <= p_max; ++p) {
        EtaRow row;
        row.p = p;
        std::vector<double> logs;
        logs.reserve(n_samples);
        for (const double t : thetas) {
            const double le = chaos::log_eta_bound(t, p, c);
            if (std::isfinite(le)) {
                logs.push_back(le);
            } else {
                ++row.excluded;
            }
        }
        if (logs.empty()) {
            row.median = row.q25 = row.q75 = row.log_median = kNaN;
        } else {
            row.log_median = stats::median(logs);
            row.median = std::exp(row.log_median);
            row.q25 = std::exp(stats::quantile(logs, 0.25));
            row.q75 = std::exp(stats::quantile(logs, 0.75));
            xs.push_back(p);
            ys.push_back(row.log_median);
        }
        sweep.rows.push_back(row);
    }
    if (xs.size() >= 2) {
        sweep.fit = stats::linear_fit(xs, ys);
    }
    return sweep;
}

double control_noise_remainder(double theta, std::uint32_t p, std::uint32_t c, double d) {
    check_noise_args(theta, p, c, d);
    const std::uint64_t n = static_cast<std::uint64_t>(c) * (p - 1U);
    switch (precision_tier(d)) {
    case 256:
        return static_cast<double>(remainder_mp<256>(theta, n, d));
    case 1024:
        return static_cast<double>(remainder_mp<1024>(theta, n, d));
    default:
        return static_cast<double>(remainder_mp<4096>(theta, n, d));
    }
}

double control_noise_sample(double theta, std::uint32_t p, std::uint32_t c, double delta) {
    check_noise_args(theta, p, c, delta);
    const std::uint64_t n = static_cast<std::uint64_t>(c) * (p - 1U);
    switch (precision_tier(delta)) {
    case 256:
        return noise_sample_mp<256>(theta, n, delta);
    case 1024:
        return noise_sample_mp<1024>(theta, n, delta);
    default:
        return noise_sample_mp<4096>(theta, n, delta);
    }
}

std::array<std::array<double, 2>, 2> control_noise_correlation(std::span<const double> theta,
                                                               std::uint32_t m1,
                                                               std::uint32_t m2,
                                                               std::uint32_t c, double delta) {
    if (theta.size() != 2) {
        throw ShapeError("control_noise_correlation needs two parameters");
    }
    // xi[m][i][s]: remainder of component i at depth m for sign s.
    std::array<std::array<std::array<double, 2>, 2>, 2> xi{};
    const std::array<std::uint32_t, 2> depth = {m1, m2};
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < 2; ++i) {
            xi[a][i][0] = control_noise_remainder(theta[i], depth[a], c, delta) / delta;
            xi[a][i][1] = control_noise_remainder(theta[i], depth[a], c, -delta) / delta;
        }
    }
    std::array<std::array<double, 2>, 2> zeta{};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            double acc = 0.0;
            for (std::size_t s1 = 0; s1 < 2; ++s1) {
                for (std::size_t s2 = 0; s2 < 2; ++s2) {
                    const std::size_t si = i == 0 ? s1 : s2;
                    const std::size_t sj = j == 0 ? s1 : s2;
                    acc += xi[0][i][si] * xi[1][j][sj];
                }
            }
            zeta[i][j] = acc / 4.0;
        }
    }
    return zeta;
}

NoiseMomentReport control_noise_moment(std::uint32_t c, std::uint32_t p_min,
                                       std::uint32_t p_max, double delta,
                                       std::size_t n_samples, std::uint64_t seed) {
    if (p_min < 1 || p_max < p_min) {
        throw DomainError("control_noise_moment needs 1 <= p_min <= p_max");
    }
    if (!(delta > 0.0) || n_samples == 0) {
        throw DomainError("control_noise_moment needs delta > 0 and samples");
    }
    NoiseMomentReport rep;
    rep.c = c;
    rep.delta = delta;
    rep.n_samples = n_samples;
    rep.seed = seed;
    Rng rng(seed);
    std::vector<double> thetas(n_samples);
    for (auto &t : thetas) {
        t = rng.uniform();
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::uint32_t p = p_min; p <= p_max; ++p) {
        NoiseRow row;
        row.p = p;
        std::vector<double> z(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k) {
            z[k] = control_noise_sample(thetas[k], p, c, delta);
        }
        row.mean = stats::mean(z);
        row.stddev = stats::stddev(z);
        row.standard_error = stats::standard_error(z);
        row.underflow = p > 1 && std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; });
        row.log_mean = row.mean > 0.0 ? std::log(row.mean) : -std::numeric_limits<double>::infinity();
        if (row.mean > 0.0) {
            xs.push_back(p);
            ys.push_back(row.log_mean);
        }
        rep.rows.push_back(row);
    }
    if (xs.size() >= 2) {
        rep.fit = stats::linear_fit(xs, ys);
    }
    return rep;
}

DifferentialCdf differential_cdf(const schemes::SchemeSpec &spec, std::span<const double> theta,
                                 const sat::CostDiagonal &diag, std::span<const double> delta_grid,
                                 std::size_t n_perturbations, double scale, std::uint64_t seed) {
    if (n_perturbations == 0 || !(scale > 0.0)) {
        throw DomainError("differential_cdf needs perturbations and a positive scale");
    }
    const double f0 = sim::evaluate(spec, theta, diag).f_value;
    Rng rng(seed);
    DifferentialCdf out;
    out.samples.reserve(n_perturbations);
    std::vector<double> moved(theta.size());
    for (std::size_t k = 0; k < n_perturbations; ++k) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            moved[i] = std::clamp(theta[i] + scale * rng.sign(), 0.0, 1.0);
        }
        out.samples.push_back(std::abs(sim::evaluate(spec, moved, diag).f_value - f0));
    }
    std::sort(out.samples.begin(), out.samples.end());
    out.deltas.assign(delta_grid.begin(), delta_grid.end());
    for (const double d : out.deltas) {
        const auto below = std::lower_bound(out.samples.begin(), out.samples.end(), d);
        out.phi.push_back(static_cast<double>(below - out.samples.begin()) /
                          static_cast<double>(out.samples.size()));
    }
    return out;
}

double mixing_metric(const sim::LandscapeScan &scan, double c_min, double c_max) {
    if (!(c_max > c_min)) {
        throw DomainError("mixing metric undefined for a flat spectrum");
    }
    if (scan.grid < 2 || scan.values.size() != scan.grid * scan.grid) {
        throw ShapeError("landscape scan is not a square grid of side >= 2");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < scan.grid; ++i) {
        for (std::size_t j = 0; j + 1 < scan.grid; ++j) {
            sum += std::abs(scan.at(i, j + 1) - scan.at(i, j));
        }
    }
    const auto pairs = static_cast<double>(scan.grid * (scan.grid - 1));
    return sum / pairs / (c_max - c_min);
}

double mixing_metric(const sim::LandscapeScan &scan, const sat::CostDiagonal &diag) {
    return mixing_metric(scan, diag.c_min, diag.c_max);
}

void write_meta_line(std::ostream &out, const nlohmann::json &meta) {
    out << "# meta: " << meta.dump() << '\n';
}

void write_lle_csv(const LleReport &report, std::ostream &out) {
    const auto old = out.precision(17);
    out << "p,lambda_1,lambda_2,degenerate_1,degenerate_2,phase_1,phase_2,gle\n";
    for (const auto &r : report.rows) {
        out << r.p << ',';
        write_double(out, r.cost[0]);
        out << ',';
        write_double(out, r.cost[1]);
        out << ',' << int(r.degenerate[0]) << ',' << int(r.degenerate[1]) << ',';
        write_double(out, r.phase[0]);
        out << ',';
        write_double(out, r.phase[1]);
        out << ',' << report.gle_target << '\n';
    }
    out.precision(old);
}

void write_eta_csv(const EtaSweep &sweep, std::ostream &out) {
    const auto old = out.precision(17);
    out << "p,median,q25,q75,log_median,excluded\n";
    for (const auto &r : sweep.rows) {
        out << r.p << ',';
        write_double(out, r.median);
        out << ',';
        write_double(out, r.q25);
        out << ',';
        write_double(out, r.q75);
        out << ',';
        write_double(out, r.log_median);
        out << ',' << r.excluded << '\n';
    }
    out.precision(old);
}

void write_noise_csv(const NoiseMomentReport &report, std::ostream &out) {
    const auto old = out.precision(17);
    out << "p,mean,stddev,standard_error,log_mean,underflow\n";
    for (const auto &r : report.rows) {
        out << r.p << ',';
        write_double(out, r.mean);
        out << ',';
        write_double(out, r.stddev);
        out << ',';
        write_double(out, r.standard_error);
        out << ',';
        write_double(out, r.log_mean);
        out << ',' << int(r.underflow) << '\n';
    }
    out.precision(old);
}

void write_landscape_csv(const sim::LandscapeScan &scan, std::ostream &out) {
    const auto old = out.precision(17);
    out << "i,j,theta_1,theta_2,F\n";
    for (std::size_t i = 0; i < scan.grid; ++i) {
        for (std::size_t j = 0; j < scan.grid; ++j) {
            out << i << ',' << j << ',' << scan.axis[i] << ',' << scan.axis[j] << ','
                << scan.at(i, j) << '\n';
        }
    }
    out.precision(old);
}

void to_json(nlohmann::json &j, const LleReport &r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : r.rows) {
        rows.push_back({{"p", row.p},
                        {"lambda", {finite_or_null(row.cost[0]), finite_or_null(row.cost[1])}},
                        {"degenerate", {row.degenerate[0], row.degenerate[1]}},
                        {"phase", {finite_or_null(row.phase[0]), finite_or_null(row.phase[1])}}});
    }
    j = {{"theta", r.theta},
         {"c", r.c},
         {"gle_target", r.gle_target},
         {"denominator", r.denominator},
         {"rows", rows}};
}

void to_json(nlohmann::json &j, const EtaSweep &s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : s.rows) {
        rows.push_back({{"p", row.p},
                        {"median", finite_or_null(row.median)},
                        {"q25", finite_or_null(row.q25)},
                        {"q75", finite_or_null(row.q75)},
                        {"log_median", finite_or_null(row.log_median)},
                        {"excluded", row.excluded}});
    }
    j = {{"c", s.c}, {"n_samples", s.n_samples}, {"seed", s.seed}, {"fit", fit_json(s.fit)},
         {"rows", rows}};
}

void to_json(nlohmann::json &j, const NoiseMomentReport &r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : r.rows) {
        rows.push_back({{"p", row.p},
                        {"mean", row.mean},
                        {"stddev", row.stddev},
                        {"standard_error", row.standard_error},
                        {"log_mean", finite_or_null(row.log_mean)},
                        {"underflow", row.underflow}});
    }
    j = {{"c", r.c},       {"delta", r.delta},         {"n_samples", r.n_samples},
         {"seed", r.seed}, {"fit", fit_json(r.fit)}, {"rows", rows}};
}

} // namespace qacoa::diag
