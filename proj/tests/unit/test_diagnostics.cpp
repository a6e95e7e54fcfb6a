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
#include <numbers>
#include <sstream>
#include <vector>

#include <catch_amalgamated.hpp>

#include "qacoa/chaos_maps.hpp"
#include "qacoa/diagnostics.hpp"
#include "qacoa/error.hpp"
#include "qacoa/qaoa_simulator.hpp"
#include "qacoa/rng.hpp"
#include "qacoa/sat_instances.hpp"
#include "qacoa/stats.hpp"

using namespace qacoa;
using namespace qacoa::diag;
using schemes::SchemeSpec;
using Catch::Approx;

namespace {

double fd_theta(const SchemeSpec &spec, std::vector<double> th, std::size_t i,
                const sat::CostDiagonal &d, double step) {
    auto lo = th;
    th[i] += step;
    lo[i] -= step;
    return (sim::evaluate(spec, th, d).f_value - sim::evaluate(spec, lo, d).f_value) / (2 * step);
}

} // namespace

TEST_CASE("diag::cost LLE against finite differences", "[diag]") {
    Rng rng(1);
    const auto d = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 3));
    int checked = 0;
    for (int t = 0; t < 12; ++t) {
        const std::vector<double> th{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
        const std::uint32_t c = 1 + static_cast<std::uint32_t>(rng.below(2));
        const auto rep = cost_lle_spectrum(SchemeSpec::pure_chaotic(1, c), th, d, 4);
        REQUIRE(rep.rows.size() == 3);
        CHECK(rep.gle_target == c * std::numbers::ln2);
        for (std::size_t i = 0; i < 2; ++i) {
            const double den = std::abs(fd_theta(SchemeSpec::standard(1), th, i, d, 1e-6));
            CHECK(rep.denominator[i] == Approx(den).epsilon(1e-6));
            for (const auto &row : rep.rows) {
                const double num = std::abs(fd_theta(SchemeSpec::pure_chaotic(row.p, c), th, i, d, 1e-7));
                if (num < 1e-6 || den < 1e-6) {
                    continue;
                }
                const double expect = std::log(num / den) / (row.p - 1);
                CHECK(row.cost[i] == Approx(expect).margin(1e-4));
                CHECK(row.phase[i] == Approx(chaos::phase_space_lle(th[i], row.p, c)).epsilon(1e-14));
                ++checked;
            }
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("diag::cost LLE flags a vanishing first-layer gradient", "[diag]") {
    const auto d = sat::build_cost_diagonal(sat::generate_random_instance(4, 2, 2.0, 4));
    const std::vector<double> th{0.0, 0.0};
    const auto rep = cost_lle_spectrum(SchemeSpec::pure_chaotic(1, 3), th, d, 3);
    for (const auto &row : rep.rows) {
        CHECK(row.degenerate[0]);
        CHECK(row.degenerate[1]);
        CHECK(std::isnan(row.cost[0]));
        CHECK(std::isnan(row.cost[1]));
    }
    CHECK_THROWS_AS(cost_lle_spectrum(SchemeSpec::standard(2), th, d, 3), DomainError);
    CHECK_THROWS_AS(cost_lle_spectrum(SchemeSpec::pure_chaotic(2, 3), th, d, 1), DomainError);
}

TEST_CASE("diag::cost LLE stays finite past the double range", "[diag]") {
    const auto d = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 5));
    const std::vector<double> th{0.3141, 0.2718};
    const auto rep = cost_lle_spectrum(SchemeSpec::pure_chaotic(1, 100), th, d, 20);
    for (const auto &row : rep.rows) {
        CHECK(std::isfinite(row.cost[0]));
        CHECK(std::isfinite(row.cost[1]));
    }
    CHECK(rep.rows.back().cost[0] == Approx(rep.gle_target).epsilon(0.1));
}

TEST_CASE("diag::noise remainder closed forms", "[diag]") {
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const double th = rng.uniform();
        CHECK(control_noise_remainder(th, 1, 7, 1e-5) == 0.0);
        CHECK(control_noise_sample(th, 1, 7, 1e-5) == 0.0);
        // l(x + d) - l(x) - 4 (1 - 2x) d = -4 d^2.
        const double delta = 1e-3;
        CHECK(control_noise_remainder(th, 2, 1, delta) == Approx(-4 * delta * delta).epsilon(1e-12));
        CHECK(control_noise_sample(th, 2, 1, delta) == Approx(16 * delta * delta).epsilon(1e-12));
    }
    // Leading order: xi ~ h' d^2 / 2.
    for (int t = 0; t < 50; ++t) {
        const double th = rng.uniform(0.05, 0.95);
        const double delta = 1e-9;
        const double h2 = chaos::h_second(th, 3, 2);
        if (std::abs(h2) < 1.0) {
            continue;
        }
        CHECK(control_noise_sample(th, 3, 2, delta) ==
              Approx(0.25 * h2 * h2 * delta * delta).epsilon(1e-4));
    }
}

TEST_CASE("diag::noise correlation enumeration equals sign sampling", "[diag]") {
    Rng rng(3);
    const std::vector<double> th{0.37, 0.81};
    const double delta = 1e-4;
    const auto z = control_noise_correlation(th, 3, 4, 1, delta);
    CHECK(z[0][0] == Approx(control_noise_sample(0.37, 3, 1, delta) *
                            control_noise_remainder(0.37, 4, 1, delta) /
                            control_noise_remainder(0.37, 3, 1, delta)).epsilon(0.5));
    const auto diag_only = control_noise_correlation(th, 3, 3, 1, delta);
    CHECK(diag_only[0][0] == Approx(control_noise_sample(0.37, 3, 1, delta)).epsilon(1e-12));
    CHECK(diag_only[1][1] == Approx(control_noise_sample(0.81, 3, 1, delta)).epsilon(1e-12));

    const int n = 40000;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            std::vector<double> v(n);
            for (auto &x : v) {
                const std::array<double, 2> s{static_cast<double>(rng.sign()), static_cast<double>(rng.sign())};
                x = control_noise_remainder(th[i], 3, 1, s[i] * delta) *
                    control_noise_remainder(th[j], 4, 1, s[j] * delta) / (delta * delta);
            }
            const double se = std::max(stats::standard_error(v), 1e-300);
            CHECK(std::abs(stats::mean(v) - z[i][j]) <= 4 * se + 1e-15 * std::abs(z[i][j]));
        }
    }
}

TEST_CASE("diag::noise moment report", "[diag]") {
    const auto rep = control_noise_moment(1, 1, 8, 1e-6, 400, 7);
    REQUIRE(rep.rows.size() == 8);
    CHECK(rep.rows[0].mean == 0.0);
    CHECK(rep.rows[0].stddev == 0.0);
    CHECK_FALSE(rep.rows[0].underflow);
    for (std::size_t k = 1; k < rep.rows.size(); ++k) {
        CHECK(rep.rows[k].mean > rep.rows[k - 1].mean);
        CHECK_FALSE(rep.rows[k].underflow);
    }
    CHECK(rep.fit.slope > 0.0);
    CHECK(rep.fit.r_squared >= 0.95);

    const auto tiny = control_noise_moment(1, 1, 3, 1e-18, 50, 8);
    for (const auto &row : tiny.rows) {
        CHECK(row.mean >= 0.0);
    }
    CHECK(tiny.rows[1].mean > 0.0);
    CHECK_THROWS_AS(control_noise_moment(1, 1, 3, 0.0, 10, 1), DomainError);
}

TEST_CASE("diag::noise samples are symmetric between controls", "[diag]") {
    Rng rng(9);
    std::vector<double> a(2000);
    std::vector<double> b(2000);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const std::vector<double> th{rng.uniform(), rng.uniform()};
        const auto z = control_noise_correlation(th, 4, 4, 1, 1e-6);
        a[k] = z[0][0];
        b[k] = z[1][1];
        REQUIRE(a[k] >= 0.0);
        REQUIRE(b[k] >= 0.0);
    }
    CHECK(stats::ks_two_sample(a, b).p_value > 0.05);
}

TEST_CASE("diag::eta sweep", "[diag]") {
    const auto sw = eta_sweep(3, 1, 6, 2000, 11);
    REQUIRE(sw.rows.size() == 5);
    CHECK(sw.rows.front().p == 2);
    for (const auto &row : sw.rows) {
        CHECK(row.q25 <= row.median);
        CHECK(row.median <= row.q75);
    }
    CHECK(sw.fit.slope == Approx(-3 * std::numbers::ln2).epsilon(0.1));
    // p = 2, c = 1 is |1 - 2 theta| for uniform theta: median 1/2.
    const auto one = eta_sweep(1, 2, 3, 20001, 12);
    CHECK(one.rows[0].median == Approx(0.5).margin(0.02));
}

TEST_CASE("diag::differential cdf", "[diag]") {
    const auto d = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 13));
    const std::vector<double> th{0.4, 0.6};
    const std::vector<double> grid{0.0, 1e-6, 1e-3, 1e-1, 1.0, 1e9};
    const auto cdf = differential_cdf(SchemeSpec::pure_chaotic(3, 2), th, d, grid, 200, 1e-3, 14);
    REQUIRE(cdf.phi.size() == grid.size());
    CHECK(cdf.phi.front() == 0.0);
    CHECK(cdf.phi.back() == 1.0);
    for (std::size_t k = 1; k < cdf.phi.size(); ++k) {
        CHECK(cdf.phi[k] >= cdf.phi[k - 1]);
    }
    CHECK(std::is_sorted(cdf.samples.begin(), cdf.samples.end()));
    CHECK(cdf.samples.size() == 200);
}

TEST_CASE("diag::differential cdf decays with depth", "[diag]") {
    const auto d = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 13));
    const std::vector<double> grid{1e-2};
    Rng rng(99);
    std::vector<double> depth;
    std::vector<double> chaotic;
    std::vector<double> standard;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::vector<double> th{rng.uniform(), rng.uniform()};
        for (std::uint32_t p = 2; p <= 8; ++p) {
            std::vector<double> ts(2 * p);
            for (auto &x : ts) {
                x = rng.uniform();
            }
            depth.push_back(p);
            chaotic.push_back(
                differential_cdf(SchemeSpec::pure_chaotic(p, 3), th, d, grid, 64, 1e-4, 7 + s).phi[0]);
            standard.push_back(
                differential_cdf(SchemeSpec::standard(p), ts, d, grid, 64, 1e-4, 7 + s).phi[0]);
        }
    }
    const auto trend = stats::spearman(depth, chaotic);
    CHECK(trend.rho < 0.0);
    CHECK(trend.p_value < 0.05);
    const auto control = stats::spearman(depth, standard);
    CHECK_FALSE((control.rho < 0.0 && control.p_value < 0.05));
}

TEST_CASE("diag::mixing metric", "[diag]") {
    sim::LandscapeScan flat{3, {0, 0.5, 1}, std::vector<double>(9, 2.0)};
    CHECK(mixing_metric(flat, 0.0, 4.0) == 0.0);
    sim::LandscapeScan board{4, {0, 1.0 / 3, 2.0 / 3, 1}, std::vector<double>(16)};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            board.values[i * 4 + j] = (i + j) % 2 == 0 ? 1.0 : 5.0;
        }
    }
    CHECK(mixing_metric(board, 1.0, 5.0) == 1.0);
    CHECK_THROWS_AS(mixing_metric(board, 2.0, 2.0), DomainError);
}

TEST_CASE("diag::csv writers carry headers", "[diag]") {
    std::ostringstream os;
    write_meta_line(os, {{"c", 3}});
    CHECK(os.str() == "# meta: {\"c\":3}\n");
    std::ostringstream es;
    write_eta_csv(eta_sweep(2, 2, 3, 100, 1), es);
    CHECK(es.str().find('\n') != std::string::npos);
    std::ostringstream ls;
    const auto d = sat::build_cost_diagonal(sat::generate_random_instance(3, 2, 2.0, 1));
    write_landscape_csv(sim::landscape_scan(SchemeSpec::pure_chaotic(1, 1), d, 2), ls);
    CHECK(ls.str().rfind("i,j,theta_1,theta_2,F\n", 0) == 0);
}
