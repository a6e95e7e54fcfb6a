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
#include "qacoa/chaos_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qacoa/error.hpp"
#include "qacoa/rng.hpp"

namespace qacoa::chaos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_r(double r) {
    if (!(r > 0.0 && r <= 4.0)) {
        throw DomainError("logistic parameter r must lie in (0, 4], got " + std::to_string(r));
    }
}

void check_unit(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("logistic map argument must lie in [0, 1], got " + std::to_string(x));
    }
}

std::uint64_t layer_steps(std::uint32_t m, std::uint32_t c) {
    if (m == 0) {
        throw DomainError("layer index m must be >= 1");
    }
    return static_cast<std::uint64_t>(c) * (m - 1U);
}

/// Running (x, h, h') with h = H 2^e and h' = D 2^{2e}.
class DerivativeAccumulator {
  public:
    DerivativeAccumulator(double x, double r) : x_(x), r_(r) {}

    void step() {
        const double a = r_ * (1.0 - 2.0 * x_);
        d_ = d_ * a - 2.0 * r_ * h_ * h_;
        h_ *= a;
        x_ = r_ * x_ * (1.0 - x_);
        renormalize();
    }

    void run(std::uint64_t n) {
        for (std::uint64_t i = 0; i < n; ++i) {
            step();
        }
    }

    [[nodiscard]] double h() const { return std::ldexp(h_, exponent_); }
    [[nodiscard]] double dh() const { return std::ldexp(d_, 2 * exponent_); }

    [[nodiscard]] LogAbs log_h() const { return to_log(h_, exponent_); }
    [[nodiscard]] LogAbs log_dh() const { return to_log(d_, 2 * exponent_); }

  private:
    static LogAbs to_log(double mantissa, long exp2) {
        if (mantissa == 0.0) {
            return {-kInf, 0};
        }
        return {std::log(std::abs(mantissa)) + static_cast<double>(exp2) * std::numbers::ln2,
                mantissa > 0.0 ? 1 : -1};
    }

    void renormalize() {
        constexpr int kWindow = 200;
        int scale = std::numeric_limits<int>::min();
        if (h_ != 0.0) {
            scale = std::ilogb(h_);
        }
        if (d_ != 0.0) {
            scale = std::max(scale, std::ilogb(d_) / 2);
        }
        if (scale == std::numeric_limits<int>::min() || std::abs(scale) < kWindow) {
            return;
        }
        h_ = std::ldexp(h_, -scale);
        d_ = std::ldexp(d_, -2 * scale);
        exponent_ += scale;
    }

    double x_;
    double r_;
    double h_ = 1.0;
    double d_ = 0.0;
    long exponent_ = 0;
};

} // namespace

void LogisticParams::validate() const {
    check_r(r);
    if (c < 1) {
        throw DomainError("map speed c must be >= 1");
    }
}

double logistic(double x, double r) {
    check_r(r);
    check_unit(x);
    return r * x * (1.0 - x);
}

double iterate(double x, std::uint64_t n, double r) {
    check_r(r);
    check_unit(x);
    for (std::uint64_t i = 0; i < n; ++i) {
        x = r * x * (1.0 - x);
    }
    return x;
}

double iterate_derivative(double x, std::uint64_t n, double r) {
    check_r(r);
    check_unit(x);
    DerivativeAccumulator acc(x, r);
    acc.run(n);
    return acc.h();
}

LogAbs log_iterate_derivative(double x, std::uint64_t n, double r) {
    check_r(r);
    check_unit(x);
    DerivativeAccumulator acc(x, r);
    acc.run(n);
    return acc.log_h();
}

double h_derivative(double theta, std::uint32_t m, std::uint32_t c, double r) {
    return iterate_derivative(theta, layer_steps(m, c), r);
}

LogAbs log_h_derivative(double theta, std::uint32_t m, std::uint32_t c, double r) {
    return log_iterate_derivative(theta, layer_steps(m, c), r);
}

double h_second(double theta, std::uint32_t m, std::uint32_t c, double r) {
    check_r(r);
    check_unit(theta);
    DerivativeAccumulator acc(theta, r);
    acc.run(layer_steps(m, c));
    return acc.dh();
}

LogAbs log_h_second(double theta, std::uint32_t m, std::uint32_t c, double r) {
    check_r(r);
    check_unit(theta);
    DerivativeAccumulator acc(theta, r);
    acc.run(layer_steps(m, c));
    return acc.log_dh();
}

double h_second_division_form(double theta, std::uint32_t m, std::uint32_t c, double r) {
    check_r(r);
    check_unit(theta);
    const std::uint64_t n = layer_steps(m, c);
    double x = theta;
    double running = 1.0; // derivative of l^{i-1}
    double sum = 0.0;
    for (std::uint64_t i = 1; i <= n; ++i) {
        sum += running / (x - 0.5);
        running *= r * (1.0 - 2.0 * x);
        x = r * x * (1.0 - x);
    }
    return running * sum;
}

LleDetail phase_space_lle_detail(double theta, std::uint32_t p, std::uint32_t c, double r) {
    check_r(r);
    check_unit(theta);
    if (p < 2) {
        throw DomainError("phase-space exponent needs p >= 2");
    }
    const std::uint64_t n = layer_steps(p, c);
    LleDetail out;
    double x = theta;
    double sum = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double gap = 1.0 - 2.0 * x;
        if (std::abs(gap) < kCriticalTolerance) {
            ++out.near_critical;
        }
        if (gap == 0.0) {
            out.zero_factor = true;
        } else {
            sum += std::log(std::abs(r * gap));
        }
        x = r * x * (1.0 - x);
    }
    out.value = out.zero_factor ? -kInf : sum / static_cast<double>(p - 1U);
    return out;
}

double phase_space_lle(double theta, std::uint32_t p, std::uint32_t c, double r) {
    return phase_space_lle_detail(theta, p, c, r).value;
}

double global_lyapunov_exponent(std::uint32_t c) noexcept {
    return static_cast<double>(c) * std::numbers::ln2;
}

double log_eta_bound(double theta, std::uint32_t p, std::uint32_t c, double r) {
    check_r(r);
    check_unit(theta);
    DerivativeAccumulator acc(theta, r);
    acc.run(layer_steps(p, c));
    const LogAbs h = acc.log_h();
    const LogAbs dh = acc.log_dh();
    if (dh.sign == 0) {
        return kInf;
    }
    if (h.sign == 0) {
        return -kInf;
    }
    return std::numbers::ln2 + h.log_abs - dh.log_abs;
}

double eta_bound(double theta, std::uint32_t p, std::uint32_t c, double r) {
    return std::exp(log_eta_bound(theta, p, c, r));
}

OrbitRecord orbit(double theta0, std::uint32_t m_max, std::uint32_t c, double r) {
    check_r(r);
    check_unit(theta0);
    if (m_max < 1 || c < 1) {
        throw DomainError("orbit needs m_max >= 1 and c >= 1");
    }
    OrbitRecord rec;
    rec.theta0 = theta0;
    rec.c = c;
    rec.iterates.reserve(m_max);
    rec.derivatives.reserve(m_max);
    rec.lle.reserve(m_max);

    DerivativeAccumulator acc(theta0, r);
    double x = theta0;
    double log_sum = 0.0;
    bool zero = false;
    for (std::uint32_t m = 1; m <= m_max; ++m) {
        if (m > 1) {
            for (std::uint32_t s = 0; s < c; ++s) {
                const double gap = 1.0 - 2.0 * x;
                if (gap == 0.0) {
                    zero = true;
                } else {
                    log_sum += std::log(std::abs(r * gap));
                }
                x = r * x * (1.0 - x);
            }
            acc.run(c);
        }
        rec.iterates.push_back(x);
        rec.derivatives.push_back(acc.h());
        rec.lle.push_back(m == 1 ? std::numeric_limits<double>::quiet_NaN()
                                 : (zero ? -kInf : log_sum / static_cast<double>(m - 1U)));
    }
    return rec;
}

double arcsine_density(double z) {
    if (!(z > 0.0 && z < 1.0)) {
        return z == 0.0 || z == 1.0 ? kInf : 0.0;
    }
    return 1.0 / (std::numbers::pi * std::sqrt(z * (1.0 - z)));
}

double arcsine_cdf(double z) {
    if (z <= 0.0) {
        return 0.0;
    }
    if (z >= 1.0) {
        return 1.0;
    }
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(z));
}

namespace {

std::vector<double> collect_orbit(double x0, std::size_t n_samples, std::size_t burn_in) {
    check_unit(x0);
    auto degenerate = [&](double prev2, double prev, double next) {
        return next == prev || next == prev2 || next == 0.0 || next == 0.75;
    };
    double prev2 = -1.0;
    double prev = x0;
    if (x0 == 0.0 || x0 == 0.75 || x0 == 1.0) {
        throw DegenerateOrbitError("start point " + std::to_string(x0) +
                                   " is (eventually) fixed under the r = 4 map");
    }
    std::vector<double> samples;
    samples.reserve(n_samples);
    for (std::size_t i = 0; i < burn_in + n_samples; ++i) {
        const double next = 4.0 * prev * (1.0 - prev);
        if (degenerate(prev2, prev, next)) {
            throw DegenerateOrbitError("orbit collapsed onto a fixed point or 2-cycle after " +
                                       std::to_string(i + 1) + " iterations");
        }
        prev2 = prev;
        prev = next;
        if (i >= burn_in) {
            samples.push_back(next);
        }
    }
    return samples;
}

} // namespace

double orbit_ks_statistic(double x0, std::size_t n_samples, std::size_t burn_in) {
    if (n_samples == 0) {
        throw DomainError("n_samples must be positive");
    }
    auto samples = collect_orbit(x0, n_samples, burn_in);
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = arcsine_cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::abs(f - lo), std::abs(hi - f)});
    }
    return ks;
}

double invariant_density_ks(std::size_t n_samples, std::size_t burn_in, std::uint64_t seed) {
    Rng rng(seed);
    double x0 = 0.0;
    // Dyadic rationals (and the fixed points) collapse in floating point.
    while (x0 <= 0.0 || x0 >= 1.0 || x0 == 0.5 || x0 == 0.75 || x0 == 0.25) {
        x0 = rng.uniform();
    }
    return orbit_ks_statistic(x0, n_samples, burn_in);
}

std::vector<double> orbit_histogram(double x0, std::size_t n_samples, std::size_t burn_in,
                                    std::size_t bins) {
    if (bins == 0 || n_samples == 0) {
        throw DomainError("histogram needs bins > 0 and n_samples > 0");
    }
    const auto samples = collect_orbit(x0, n_samples, burn_in);
    std::vector<double> hist(bins, 0.0);
    for (const double x : samples) {
        auto b = static_cast<std::size_t>(x * static_cast<double>(bins));
        hist[std::min(b, bins - 1)] += 1.0;
    }
    const double norm = static_cast<double>(bins) / static_cast<double>(samples.size());
    for (auto &v : hist) {
        v *= norm;
    }
    return hist;
}

} // namespace qacoa::chaos
