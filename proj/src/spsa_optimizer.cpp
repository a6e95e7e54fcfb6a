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
#include "qacoa/spsa_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

namespace qacoa::spsa {

namespace {

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

template <typename F>
auto guarded(std::uint32_t iteration, F &&fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (...) {
        std::throw_with_nested(IterationError(
            iteration == 0 ? std::string("objective failed during calibration")
                           : "objective failed at iteration " + std::to_string(iteration),
            iteration));
    }
}

/// Two probes at theta +- c s (clipped) and the resulting gradient estimate.
StepResult probe(const Objective &objective, std::span<const double> theta, double c,
                 Rng &rng) {
    StepResult r;
    const std::size_t n = theta.size();
    r.signs.resize(n);
    for (auto &s : r.signs) {
        s = rng.sign();
    }
    std::vector<double> plus(n);
    std::vector<double> minus(n);
    for (std::size_t i = 0; i < n; ++i) {
        plus[i] = clip01(theta[i] + c * r.signs[i]);
        minus[i] = clip01(theta[i] - c * r.signs[i]);
    }
    r.f_plus = objective(plus);
    r.f_minus = objective(minus);
    r.gradient.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.gradient[i] = (r.f_plus - r.f_minus) / (2.0 * c * r.signs[i]);
    }
    return r;
}

void check_box(std::span<const double> theta) {
    for (const double t : theta) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw DomainError("SPSA start point must lie in [0, 1]^n");
        }
    }
}

} // namespace

void SpsaConfig::validate() const {
    if (j_max < 1) {
        throw DomainError("j_max must be >= 1");
    }
    if (!(gamma_gain > 0.0 && gamma_gain < alpha_gain && alpha_gain <= 1.0)) {
        throw DomainError("SPSA exponents need 0 < gamma < alpha <= 1");
    }
    if (!(c0 > 0.0)) {
        throw DomainError("c0 must be positive");
    }
    if (!(delta_theta_min > 0.0)) {
        throw DomainError("delta_theta_min must be positive");
    }
    if (!(stability() >= 0.0)) {
        throw DomainError("stability constant A must be non-negative");
    }
}

double gain_a(double a, const SpsaConfig &cfg, std::uint32_t j) {
    return a / std::pow(cfg.stability() + static_cast<double>(j), cfg.alpha_gain);
}

double gain_c(double c0, const SpsaConfig &cfg, std::uint32_t j) {
    return c0 / std::pow(static_cast<double>(j), cfg.gamma_gain);
}

double effective_c0(const SpsaConfig &cfg, const schemes::SchemeSpec &spec) {
    if (!cfg.ergodic_gain_rescale) {
        return cfg.c0;
    }
    const double steps = static_cast<double>(schemes::max_map_steps(spec));
    return cfg.c0 * std::max(std::exp(-std::numbers::ln2 * steps), kMinPerturbation);
}

Calibration calibrate_from_gradient(std::span<const double> gradient, const SpsaConfig &cfg) {
    double log_sum = 0.0;
    std::size_t count = 0;
    for (const double g : gradient) {
        if (g != 0.0 && std::isfinite(g)) {
            log_sum += std::log(std::abs(g));
            ++count;
        }
    }
    if (count == 0) {
        throw CalibrationError("initial gradient estimate has no nonzero component");
    }
    Calibration cal;
    cal.g_tilde = std::exp(log_sum / static_cast<double>(count));
    cal.a = cfg.delta_theta_min * std::pow(cfg.stability() + 1.0, cfg.alpha_gain) / cal.g_tilde;
    cal.gradient.assign(gradient.begin(), gradient.end());
    return cal;
}

Calibration calibrate_a(const Objective &objective, std::span<const double> theta_1,
                        const SpsaConfig &cfg, double c0, Rng &rng) {
    check_box(theta_1);
    const auto r = guarded(0, [&] { return probe(objective, theta_1, c0, rng); });
    return calibrate_from_gradient(r.gradient, cfg);
}

StepResult spsa_step(const Objective &objective, std::span<const double> theta_j,
                     std::uint32_t j, double a, double c0, const SpsaConfig &cfg, Rng &rng) {
    if (j < 1) {
        throw DomainError("SPSA iterations are numbered from 1");
    }
    auto r = probe(objective, theta_j, gain_c(c0, cfg, j), rng);
    const double aj = gain_a(a, cfg, j);
    r.theta.resize(theta_j.size());
    for (std::size_t i = 0; i < theta_j.size(); ++i) {
        r.theta[i] = clip01(theta_j[i] - aj * r.gradient[i]);
    }
    return r;
}

SpsaTrace minimize(const Objective &objective, const Recorder &recorder,
                   std::vector<double> theta_1, const SpsaConfig &cfg, double c0, Rng &rng) {
    cfg.validate();
    check_box(theta_1);
    std::size_t calls = 0;
    const Objective counted = [&](std::span<const double> t) {
        ++calls;
        return objective(t);
    };

    SpsaTrace trace;
    trace.theta_1 = theta_1;
    trace.c0 = c0;
    const auto cal = calibrate_a(counted, theta_1, cfg, c0, rng);
    trace.a = cal.a;
    trace.g_tilde = cal.g_tilde;

    trace.iterations.reserve(cfg.j_max);
    trace.best_f = std::numeric_limits<double>::infinity();
    std::vector<double> theta = std::move(theta_1);
    for (std::uint32_t j = 1; j <= cfg.j_max; ++j) {
        auto step = guarded(j, [&] { return spsa_step(counted, theta, j, cal.a, c0, cfg, rng); });
        theta = std::move(step.theta);

        SpsaIteration it;
        it.j = j;
        it.theta = theta;
        it.a_j = gain_a(cal.a, cfg, j);
        it.c_j = gain_c(c0, cfg, j);
        it.signs = std::move(step.signs);
        if (recorder) {
            const auto ev = guarded(j, [&] { return recorder(theta); });
            ++calls;
            it.f_value = ev.f_value;
            it.ar = ev.ar;
            it.misassignment = ev.misassignment;
        } else {
            it.f_value = guarded(j, [&] { return counted(theta); });
            it.ar = std::numeric_limits<double>::quiet_NaN();
            it.misassignment = std::numeric_limits<double>::quiet_NaN();
        }
        if (it.f_value < trace.best_f) {
            trace.best_f = it.f_value;
            trace.best_theta = theta;
        }
        trace.iterations.push_back(std::move(it));
    }
    trace.evaluations = calls;
    return trace;
}

SpsaTrace optimize(const schemes::SchemeSpec &spec, const sat::CostDiagonal &diag,
                   const SpsaConfig &cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    std::vector<double> theta_1(schemes::n_theta(spec));
    for (auto &t : theta_1) {
        t = rng.uniform();
    }
    const Objective objective = [&](std::span<const double> t) {
        return sim::expectation(sim::run_circuit(schemes::angles(spec, t), diag), diag);
    };
    const Recorder recorder = [&](std::span<const double> t) {
        return sim::evaluate(spec, t, diag);
    };
    return minimize(objective, recorder, std::move(theta_1), cfg, effective_c0(cfg, spec), rng);
}

void to_json(nlohmann::json &j, const SpsaConfig &cfg) {
    j = nlohmann::json{{"j_max", cfg.j_max},
                       {"alpha_gain", cfg.alpha_gain},
                       {"gamma_gain", cfg.gamma_gain},
                       {"A", cfg.stability()},
                       {"c0", cfg.c0},
                       {"delta_theta_min", cfg.delta_theta_min},
                       {"seed", cfg.seed},
                       {"ergodic_gain_rescale", cfg.ergodic_gain_rescale}};
}

void from_json(const nlohmann::json &j, SpsaConfig &cfg) {
    SpsaConfig c;
    c.j_max = j.value("j_max", c.j_max);
    c.alpha_gain = j.value("alpha_gain", c.alpha_gain);
    c.gamma_gain = j.value("gamma_gain", c.gamma_gain);
    if (j.contains("A") && !j.at("A").is_null()) {
        c.A = j.at("A").get<double>();
    }
    c.c0 = j.value("c0", c.c0);
    c.delta_theta_min = j.value("delta_theta_min", c.delta_theta_min);
    c.seed = j.value("seed", c.seed);
    c.ergodic_gain_rescale = j.value("ergodic_gain_rescale", c.ergodic_gain_rescale);
    c.validate();
    cfg = c;
}

void to_json(nlohmann::json &j, const SpsaTrace &trace) {
    nlohmann::json its = nlohmann::json::array();
    for (const auto &it : trace.iterations) {
        its.push_back({{"j", it.j},
                       {"theta", it.theta},
                       {"f", it.f_value},
                       {"ar", it.ar},
                       {"misassignment", it.misassignment},
                       {"a_j", it.a_j},
                       {"c_j", it.c_j},
                       {"signs", it.signs}});
    }
    j = nlohmann::json{{"theta_1", trace.theta_1},       {"a", trace.a},
                       {"c0", trace.c0},                 {"g_tilde", trace.g_tilde},
                       {"best_theta", trace.best_theta}, {"best_f", trace.best_f},
                       {"evaluations", trace.evaluations}, {"iterations", std::move(its)}};
}

void write_trace_csv(const SpsaTrace &trace, std::ostream &out) {
    const auto old = out.precision(17);
    out << "j,f,ar,misassignment,a_j,c_j";
    const std::size_t n = trace.theta_1.size();
    for (std::size_t i = 0; i < n; ++i) {
        out << ",theta_" << i;
    }
    out << '\n';
    for (const auto &it : trace.iterations) {
        out << it.j << ',' << it.f_value << ',' << it.ar << ',' << it.misassignment << ','
            << it.a_j << ',' << it.c_j;
        for (const double t : it.theta) {
            out << ',' << t;
        }
        out << '\n';
    }
    out.precision(old);
}

} // namespace qacoa::spsa
