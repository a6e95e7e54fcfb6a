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
#include <sstream>
#include <stdexcept>
#include <vector>

#include <catch_amalgamated.hpp>

#include "qacoa/error.hpp"
#include "qacoa/param_schemes.hpp"
#include "qacoa/qaoa_simulator.hpp"
#include "qacoa/rng.hpp"
#include "qacoa/sat_instances.hpp"
#include "qacoa/spsa_optimizer.hpp"

using namespace qacoa;
using namespace qacoa::spsa;
using schemes::SchemeSpec;
using Catch::Approx;

namespace {

double bowl(std::span<const double> t) {
    double s = 0.0;
    for (const double x : t) {
        s += (x - 0.5) * (x - 0.5);
    }
    return s;
}

std::vector<double> uniform_start(Rng &rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto &x : v) {
        x = rng.uniform();
    }
    return v;
}

} // namespace

TEST_CASE("spsa::config validation", "[spsa]") {
    SpsaConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.stability() == 10.0);
    cfg.A = 3.0;
    CHECK(cfg.stability() == 3.0);
    auto bad = SpsaConfig{};
    bad.j_max = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = SpsaConfig{};
    bad.gamma_gain = 0.7;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = SpsaConfig{};
    bad.c0 = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);

    nlohmann::json j = cfg;
    const auto back = j.get<SpsaConfig>();
    CHECK(back.stability() == cfg.stability());
    CHECK(back.j_max == cfg.j_max);
}

TEST_CASE("spsa::calibration arithmetic", "[spsa]") {
    SpsaConfig cfg;
    const double scale = cfg.delta_theta_min * std::pow(cfg.stability() + 1.0, cfg.alpha_gain);
    const std::vector<double> one{-4.0};
    CHECK(calibrate_from_gradient(one, cfg).a == Approx(scale / 4.0));
    const std::vector<double> two{10.0, 0.1};
    const auto cal = calibrate_from_gradient(two, cfg);
    CHECK(cal.g_tilde == Approx(1.0).epsilon(1e-14));
    CHECK(cal.a == Approx(scale).epsilon(1e-14));
    const std::vector<double> with_zero{0.0, 2.0, -8.0};
    CHECK(calibrate_from_gradient(with_zero, cfg).g_tilde == Approx(4.0));
    const std::vector<double> zeros{0.0, 0.0};
    CHECK_THROWS_AS(calibrate_from_gradient(zeros, cfg), CalibrationError);
}

TEST_CASE("spsa::gain sequences", "[spsa]") {
    SpsaConfig cfg;
    double sum_a = 0.0;
    double sum_ratio = 0.0;
    double prev_a = INFINITY;
    double prev_c = INFINITY;
    for (std::uint32_t j = 1; j <= 1000000; ++j) {
        const double a = gain_a(1.0, cfg, j);
        const double c = gain_c(1.0, cfg, j);
        REQUIRE(a < prev_a);
        REQUIRE(c < prev_c);
        prev_a = a;
        prev_c = c;
        sum_a += a;
        sum_ratio += (a / c) * (a / c);
    }
    // Sum a_j diverges; (a_j / c_j)^2 decays faster than 1 / j.
    CHECK(sum_a > 100.0);
    const auto ratio = [&](std::uint32_t j) {
        return std::pow(gain_a(1.0, cfg, j) / gain_c(1.0, cfg, j), 2);
    };
    CHECK(std::log(ratio(1000000) / ratio(1000)) / std::log(1000.0) < -1.0);
    CHECK(std::isfinite(sum_ratio));
    CHECK(2 * (cfg.alpha_gain - cfg.gamma_gain) > 1.0);
    CHECK(gain_a(2.0, cfg, 1) == Approx(2.0 / std::pow(11.0, 0.602)));
    CHECK(gain_c(0.1, cfg, 1) == 0.1);
}

TEST_CASE("spsa::quadratic bowl converges", "[spsa]") {
    SpsaConfig cfg;
    cfg.j_max = 500;
    // Fixed gain with a_1 = 0.1.
    const double a = 0.1 * std::pow(cfg.stability() + 1.0, cfg.alpha_gain);
    for (const std::size_t n : {2U, 4U, 8U}) {
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            Rng rng(seed);
            auto theta = uniform_start(rng, n);
            for (std::uint32_t j = 1; j <= cfg.j_max; ++j) {
                theta = spsa_step(bowl, theta, j, a, cfg.c0, cfg, rng).theta;
            }
            double dist = 0.0;
            for (const double x : theta) {
                dist = std::max(dist, std::abs(x - 0.5));
            }
            CHECK(dist < 1e-2);
        }
    }
}

TEST_CASE("spsa::constant objective leaves theta unchanged", "[spsa]") {
    const Objective flat = [](std::span<const double>) { return 3.0; };
    SpsaConfig cfg;
    Rng rng(3);
    const std::vector<double> theta{0.2, 0.9, 0.0};
    for (std::uint32_t j = 1; j <= 50; ++j) {
        const auto step = spsa_step(flat, theta, j, 0.5, cfg.c0, cfg, rng);
        CHECK(step.theta == theta);
    }
    CHECK_THROWS_AS(calibrate_a(flat, theta, cfg, cfg.c0, rng), CalibrationError);
}

TEST_CASE("spsa::every probe stays in the box and the budget is exact", "[spsa]") {
    SpsaConfig cfg;
    cfg.j_max = 73;
    std::size_t calls = 0;
    bool inside = true;
    const Objective obj = [&](std::span<const double> t) {
        ++calls;
        for (const double x : t) {
            inside = inside && x >= 0.0 && x <= 1.0;
        }
        return bowl(t) + 0.3 * t[0];
    };
    Rng rng(4);
    const auto trace = minimize(obj, {}, {0.0, 1.0, 0.5}, cfg, 0.4, rng);
    CHECK(inside);
    CHECK(calls == 3 * cfg.j_max + 2);
    CHECK(trace.evaluations == calls);
    CHECK(trace.iterations.size() == cfg.j_max);

    const auto diag = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 5));
    cfg.seed = 9;
    const auto t2 = optimize(SchemeSpec::pure_chaotic(3, 5), diag, cfg);
    CHECK(t2.evaluations == 3 * cfg.j_max + 2);
}

TEST_CASE("spsa::best tracks the clean evaluations", "[spsa]") {
    const auto diag = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 6));
    SpsaConfig cfg;
    cfg.j_max = 120;
    cfg.seed = 2;
    const auto spec = SchemeSpec::standard(2);
    const auto trace = optimize(spec, diag, cfg);
    double best = INFINITY;
    for (const auto &it : trace.iterations) {
        const auto ev = sim::evaluate(spec, it.theta, diag);
        CHECK(it.f_value == ev.f_value);
        CHECK(it.ar == ev.ar);
        CHECK(it.misassignment == ev.misassignment);
        best = std::min(best, it.f_value);
    }
    CHECK(trace.best_f == best);
    CHECK(sim::evaluate(spec, trace.best_theta, diag).f_value == best);
}

TEST_CASE("spsa::fixed seed gives identical traces", "[spsa]") {
    const auto diag = sat::build_cost_diagonal(sat::generate_random_instance(5, 3, 4.2, 7));
    SpsaConfig cfg;
    cfg.j_max = 200;
    cfg.seed = 42;
    const auto spec = SchemeSpec::pure_chaotic(4, 100);
    nlohmann::json a = optimize(spec, diag, cfg);
    nlohmann::json b = optimize(spec, diag, cfg);
    CHECK(a.dump() == b.dump());
    cfg.seed = 43;
    nlohmann::json c = optimize(spec, diag, cfg);
    CHECK(a.dump() != c.dump());
}

TEST_CASE("spsa::standard and pure coincide at depth one", "[spsa]") {
    const auto diag = sat::build_cost_diagonal(sat::generate_random_instance(6, 3, 4.2, 8));
    SpsaConfig cfg;
    cfg.j_max = 150;
    cfg.seed = 11;
    nlohmann::json a = optimize(SchemeSpec::standard(1), diag, cfg);
    nlohmann::json b = optimize(SchemeSpec::pure_chaotic(1, 100), diag, cfg);
    CHECK(a.dump() == b.dump());
}

TEST_CASE("spsa::single iteration", "[spsa]") {
    const auto diag = sat::build_cost_diagonal(sat::generate_random_instance(4, 2, 2.0, 1));
    SpsaConfig cfg;
    cfg.j_max = 1;
    cfg.seed = 5;
    const auto spec = SchemeSpec::standard(2);
    const auto trace = optimize(spec, diag, cfg);
    REQUIRE(trace.iterations.size() == 1);
    CHECK(trace.iterations[0].j == 1);

    // Replay the same stream by hand.
    Rng rng(cfg.seed);
    std::vector<double> th(4);
    for (auto &x : th) {
        x = rng.uniform();
    }
    CHECK(th == trace.theta_1);
    const Objective obj = [&](std::span<const double> t) { return sim::evaluate(spec, t, diag).f_value; };
    const auto cal = calibrate_a(obj, th, cfg, cfg.c0, rng);
    const auto step = spsa_step(obj, th, 1, cal.a, cfg.c0, cfg, rng);
    CHECK(step.theta == trace.iterations[0].theta);
    CHECK(step.signs == trace.iterations[0].signs);
}

TEST_CASE("spsa::tiny satisfiable instance", "[spsa]") {
    sat::SatInstance inst;
    inst.n_vars = 2;
    inst.k = 2;
    inst.clauses = {{{0, 1}, {1, -1}}};
    const auto diag = sat::build_cost_diagonal(inst);
    REQUIRE(diag.c_min == 0);
    SpsaConfig cfg;
    cfg.j_max = 200;
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.seed = seed;
        const auto trace = optimize(SchemeSpec::pure_chaotic(1, 100), diag, cfg);
        good += trace.iterations.back().ar >= 0.9 ? 1 : 0;
    }
    CHECK(good == 5);
}

TEST_CASE("spsa::ergodic rescale", "[spsa]") {
    SpsaConfig cfg;
    CHECK(effective_c0(cfg, SchemeSpec::pure_chaotic(5, 2)) == cfg.c0);
    cfg.ergodic_gain_rescale = true;
    CHECK(effective_c0(cfg, SchemeSpec::pure_chaotic(3, 2)) == Approx(cfg.c0 / 16.0));
    CHECK(effective_c0(cfg, SchemeSpec::pure_chaotic(20, 100)) == Approx(cfg.c0 * kMinPerturbation));
    CHECK(effective_c0(cfg, SchemeSpec::standard(20)) == cfg.c0);
}

TEST_CASE("spsa::objective failures carry the iteration", "[spsa]") {
    int calls = 0;
    const Objective obj = [&](std::span<const double> t) {
        if (++calls > 8) {
            throw std::runtime_error("boom");
        }
        return bowl(t) + t[0];
    };
    SpsaConfig cfg;
    cfg.j_max = 10;
    Rng rng(1);
    try {
        minimize(obj, {}, {0.3, 0.6}, cfg, cfg.c0, rng);
        FAIL("expected IterationError");
    } catch (const IterationError &e) {
        CHECK(e.iteration() == 3);
        CHECK_THROWS_AS(std::rethrow_if_nested(e), std::runtime_error);
    }
}

TEST_CASE("spsa::trace csv header", "[spsa]") {
    SpsaTrace t;
    t.theta_1 = {0.1, 0.2};
    t.iterations.push_back({1, {0.25, 0.5}, 1.5, 0.5, 0.25, 0.1, 0.01, {1, -1}});
    std::ostringstream os;
    write_trace_csv(t, os);
    CHECK(os.str().rfind("j,f,ar,misassignment,a_j,c_j,theta_0,theta_1\n", 0) == 0);
}
