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
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <catch_amalgamated.hpp>

#include "qacoa/chaos_maps.hpp"
#include "qacoa/error.hpp"
#include "qacoa/rng.hpp"

using namespace qacoa;
using namespace qacoa::chaos;
using Catch::Approx;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double fd_iterate(double x, std::uint64_t n, double step) {
    return (iterate(x + step, n) - iterate(x - step, n)) / (2.0 * step);
}

} // namespace

TEST_CASE("chaos::logistic values and domain", "[chaos]") {
    CHECK(logistic(0.5) == 1.0);
    CHECK(logistic(0.0) == 0.0);
    CHECK(logistic(0.25) == 0.75);
    CHECK(logistic(0.3, 2.0) == Approx(0.42));
    CHECK_THROWS_AS(logistic(-0.1), DomainError);
    CHECK_THROWS_AS(logistic(1.5), DomainError);
    CHECK_THROWS_AS(logistic(std::nan("")), DomainError);
    CHECK_THROWS_AS(logistic(0.3, 4.5), DomainError);
    CHECK_THROWS_AS((LogisticParams{4.0, 0}.validate()), DomainError);
}

TEST_CASE("chaos::iterate small cases", "[chaos]") {
    CHECK(iterate(0.5, 2) == 0.0);
    CHECK(iterate(0.37, 0) == 0.37);
    CHECK(iterate(0.75, 100) == 0.75);
}

TEST_CASE("chaos::iterate agrees with the sine-squared conjugacy", "[chaos]") {
    // With x = sin^2(pi u), l(x) = sin^2(2 pi u), so l^n(x) = sin^2(2^n pi u).
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        const long double u = rng.uniform();
        const auto x0 = static_cast<double>(std::pow(std::sin(std::numbers::pi_v<long double> * u), 2));
        for (std::uint64_t n = 0; n <= 10; ++n) {
            const long double expect =
                std::pow(std::sin(std::ldexp(std::numbers::pi_v<long double> * u, static_cast<int>(n))), 2);
            CHECK(std::abs(iterate(x0, n) - static_cast<double>(expect)) < 1e-13 * std::ldexp(1.0, static_cast<int>(n)) + 1e-15);
        }
    }
}

TEST_CASE("chaos::iterate keeps orbits in the unit interval", "[chaos]") {
    Rng rng(5);
    for (int t = 0; t < 100000; ++t) {
        const double x = rng.uniform();
        const auto n = rng.below(10001);
        const double y = iterate(x, n);
        REQUIRE(y >= 0.0);
        REQUIRE(y <= 1.0);
    }
}

TEST_CASE("chaos::h_derivative basics", "[chaos]") {
    for (const double th : {0.0, 0.2, 0.5, 0.9}) {
        for (const std::uint32_t c : {1U, 7U, 100U}) {
            CHECK(h_derivative(th, 1, c) == 1.0);
            CHECK(h_second(th, 1, c) == 0.0);
        }
    }
    CHECK(h_derivative(0.5, 2, 1) == 0.0);
    CHECK(h_derivative(0.3, 2, 1) == Approx(4.0 * (1.0 - 0.6)));
    CHECK(h_second(0.3, 2, 1) == -8.0);
    CHECK_THROWS_AS(h_derivative(0.3, 0, 1), DomainError);
}

TEST_CASE("chaos::h_derivative matches finite differences of iterate", "[chaos]") {
    Rng rng(6);
    int checked = 0;
    for (int t = 0; t < 400; ++t) {
        const double th = rng.uniform(0.01, 0.99);
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(3));
        const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(6));
        const double h = h_derivative(th, m, c);
        if (std::abs(h) >= 1e6 || std::abs(h) < 1e-3) {
            continue;
        }
        const double fd = fd_iterate(th, static_cast<std::uint64_t>(c) * (m - 1), 1e-7);
        CHECK(rel_err(h, fd) <= 1e-4);
        ++checked;
    }
    CHECK(checked > 200);
}

TEST_CASE("chaos::h_second matches finite differences of h_derivative", "[chaos]") {
    Rng rng(7);
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        const double th = rng.uniform(0.01, 0.99);
        const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.below(4));
        const double d2 = h_second(th, m, 1);
        if (std::abs(d2) < 1e-2) {
            continue;
        }
        const double step = 1e-6;
        const double fd = (h_derivative(th + step, m, 1) - h_derivative(th - step, m, 1)) / (2 * step);
        CHECK(rel_err(d2, fd) <= 1e-3);
        ++checked;
    }
    CHECK(checked > 200);
}

TEST_CASE("chaos::h_second division form agrees away from the critical point", "[chaos]") {
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        const double th = rng.uniform(0.01, 0.99);
        const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.below(5));
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(3));
        const double a = h_second(th, m, c);
        const double b = h_second_division_form(th, m, c);
        CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("chaos::h_derivative incremental consistency", "[chaos]") {
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
        const double th = rng.uniform();
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(4));
        const std::uint32_t m = 1 + static_cast<std::uint32_t>(rng.below(6));
        double x = iterate(th, static_cast<std::uint64_t>(c) * (m - 1));
        double factor = 1.0;
        for (std::uint32_t i = 0; i < c; ++i) {
            factor *= 4.0 * (1.0 - 2.0 * x);
            x = logistic(x);
        }
        CHECK(h_derivative(th, m + 1, c) == Approx(h_derivative(th, m, c) * factor).epsilon(1e-12));
    }
}

TEST_CASE("chaos::log forms survive overflow", "[chaos]") {
    const double th = 0.3141;
    const auto lh = log_h_derivative(th, 50, 100);
    CHECK(std::isinf(h_derivative(th, 50, 100)));
    CHECK(lh.sign != 0);
    CHECK(lh.log_abs / 49.0 == Approx(phase_space_lle(th, 50, 100)).epsilon(1e-9));
    const auto small = log_h_derivative(th, 4, 2);
    CHECK(small.log_abs == Approx(std::log(std::abs(h_derivative(th, 4, 2)))).epsilon(1e-12));
    const auto ls = log_h_second(th, 4, 2);
    CHECK(ls.log_abs == Approx(std::log(std::abs(h_second(th, 4, 2)))).epsilon(1e-12));
}

TEST_CASE("chaos::phase_space_lle sentinels and identities", "[chaos]") {
    CHECK(phase_space_lle(0.5, 2, 1) == -std::numeric_limits<double>::infinity());
    CHECK(phase_space_lle_detail(0.5, 2, 1).zero_factor);
    CHECK(phase_space_lle_detail(0.5 + 1e-14, 2, 1).near_critical == 1);
    CHECK_THROWS_AS(phase_space_lle(0.3, 1, 1), DomainError);
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const double th = rng.uniform();
        const std::uint32_t p = 2 + static_cast<std::uint32_t>(rng.below(6));
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(3));
        const double expect = std::log(std::abs(h_derivative(th, p, c))) / (p - 1);
        CHECK(rel_err(phase_space_lle(th, p, c), expect) <= 1e-9);
    }
    CHECK(global_lyapunov_exponent(100) == Approx(69.31471805599453));
}

TEST_CASE("chaos::phase_space_lle changes sign near one half", "[chaos]") {
    const double th = 0.5 - 1e-3;
    CHECK(phase_space_lle(th, 2, 2) < 0.0);
    CHECK(phase_space_lle(th, 30, 2) > 0.0);
}

TEST_CASE("chaos::phase_space_lle approaches c ln 2", "[chaos]") {
    Rng rng(11);
    int close = 0;
    for (int t = 0; t < 100; ++t) {
        const double v = phase_space_lle(rng.uniform(), 50, 100);
        close += std::abs(v - 100 * std::numbers::ln2) <= 0.05 * 100 * std::numbers::ln2 ? 1 : 0;
    }
    CHECK(close >= 95);
}

TEST_CASE("chaos::eta_bound closed forms", "[chaos]") {
    CHECK(std::isinf(eta_bound(0.3, 1, 5)));
    Rng rng(12);
    for (int t = 0; t < 100; ++t) {
        const double th = rng.uniform();
        CHECK(eta_bound(th, 2, 1) == Approx(std::abs(1.0 - 2.0 * th)).margin(1e-15));
    }
    const double th = 0.2718;
    CHECK(eta_bound(th, 4, 2) ==
          Approx(std::abs(2 * h_derivative(th, 4, 2) / h_second(th, 4, 2))).epsilon(1e-12));
}

TEST_CASE("chaos::orbit record", "[chaos]") {
    const auto rec = orbit(0.123, 6, 3);
    REQUIRE(rec.iterates.size() == 6);
    CHECK(rec.derivatives[0] == 1.0);
    CHECK(std::isnan(rec.lle[0]));
    for (std::uint32_t m = 1; m <= 6; ++m) {
        CHECK(rec.iterates[m - 1] == iterate(0.123, 3ULL * (m - 1)));
        CHECK(rec.derivatives[m - 1] == Approx(h_derivative(0.123, m, 3)).epsilon(1e-12));
        if (m > 1) {
            CHECK(rec.lle[m - 1] == Approx(phase_space_lle(0.123, m, 3)).epsilon(1e-12));
        }
    }
}

TEST_CASE("chaos::invariant density", "[chaos]") {
    CHECK(arcsine_density(0.5) == Approx(2.0 / std::numbers::pi));
    CHECK(arcsine_cdf(0.5) == Approx(0.5));
    CHECK(arcsine_cdf(0.0) == 0.0);
    CHECK(arcsine_cdf(1.0) == 1.0);
    CHECK(invariant_density_ks(1000000, 1000, 3) < 0.01);

    const auto hist = orbit_histogram(0.3141592, 1000000, 1000, 100);
    CHECK(hist[50] == Approx(2.0 / std::numbers::pi).epsilon(0.05));

    CHECK_THROWS_AS(orbit_ks_statistic(0.0, 10000, 0), DegenerateOrbitError);
    CHECK_THROWS_AS(orbit_ks_statistic(0.75, 10000, 0), DegenerateOrbitError);
    CHECK_THROWS_AS(orbit_ks_statistic(0.5, 10000, 0), DegenerateOrbitError);
}

TEST_CASE("chaos::ergodic average of the log factor is ln 2", "[chaos]") {
    Rng rng(13);
    const int n = 1000000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = std::pow(std::sin(std::numbers::pi * rng.uniform() / 2.0), 2);
        const double v = std::log(std::abs(4.0 * (1.0 - 2.0 * x)));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - std::numbers::ln2) <= 3.0 * se);
}
