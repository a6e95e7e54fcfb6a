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
#include "qacoa/param_schemes.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "qacoa/error.hpp"

namespace qacoa::schemes {

namespace {

struct Names {
    SchemeKind kind;
    const char *name;
};

constexpr Names kNames[] = {
    {SchemeKind::Standard, "standard"},
    {SchemeKind::PureChaotic, "pure_chaotic"},
    {SchemeKind::DelayedHybrid, "delayed_hybrid"},
    {SchemeKind::IteratedHybrid, "iterated_hybrid"},
};

void check_theta(const SchemeSpec &spec, std::span<const double> theta) {
    const std::size_t want = n_theta(spec);
    if (theta.size() != want) {
        throw ShapeError("scheme " + spec.label() + " expects " + std::to_string(want) +
                         " parameters, got " + std::to_string(theta.size()));
    }
    for (std::size_t j = 0; j < theta.size(); ++j) {
        if (!(theta[j] >= 0.0 && theta[j] <= 1.0)) {
            throw DomainError("theta[" + std::to_string(j) + "] = " + std::to_string(theta[j]) +
                              " lies outside [0, 1]");
        }
    }
}

/// Orbit of one theta component, advanced lazily to the step counts requested.
struct ComponentOrbit {
    double x = 0.0;
    double derivative = 1.0;
    std::uint64_t done = 0;
    double theta = 0.0;

    void advance_to(std::uint64_t steps, double r, bool with_derivative) {
        if (steps < done) {
            x = theta;
            derivative = 1.0;
            done = 0;
        }
        for (; done < steps; ++done) {
            if (with_derivative) {
                derivative *= r * (1.0 - 2.0 * x);
            }
            x = r * x * (1.0 - x);
        }
    }
};

std::vector<ComponentOrbit> start_orbits(std::span<const double> theta) {
    std::vector<ComponentOrbit> orbits(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        orbits[j].x = theta[j];
        orbits[j].theta = theta[j];
    }
    return orbits;
}

} // namespace

std::string to_string(SchemeKind kind) {
    for (const auto &n : kNames) {
        if (n.kind == kind) {
            return n.name;
        }
    }
    throw DomainError("unknown scheme kind");
}

SchemeKind scheme_kind_from_string(const std::string &name) {
    for (const auto &n : kNames) {
        if (name == n.name) {
            return n.kind;
        }
    }
    throw DomainError("unknown scheme '" + name +
                      "' (expected standard, pure_chaotic, delayed_hybrid or iterated_hybrid)");
}

SchemeSpec SchemeSpec::standard(std::uint32_t p) {
    SchemeSpec s;
    s.kind = SchemeKind::Standard;
    s.p = p;
    return s;
}

SchemeSpec SchemeSpec::pure_chaotic(std::uint32_t p, std::uint32_t c) {
    SchemeSpec s;
    s.kind = SchemeKind::PureChaotic;
    s.p = p;
    s.c = c;
    return s;
}

SchemeSpec SchemeSpec::delayed_hybrid(std::uint32_t p, std::uint32_t c, std::uint32_t p_t) {
    SchemeSpec s;
    s.kind = SchemeKind::DelayedHybrid;
    s.p = p;
    s.c = c;
    s.p_t = p_t;
    return s;
}

SchemeSpec SchemeSpec::iterated_hybrid(std::uint32_t p, std::uint32_t c, std::uint32_t T) {
    SchemeSpec s;
    s.kind = SchemeKind::IteratedHybrid;
    s.p = p;
    s.c = c;
    s.T = T;
    return s;
}

void SchemeSpec::validate() const {
    if (p < 1) {
        throw DomainError("circuit depth p must be >= 1");
    }
    if (c < 1) {
        throw DomainError("map speed c must be >= 1");
    }
    if (p_t < 1) {
        throw DomainError("truncation depth p_t must be >= 1");
    }
    if (T < 1) {
        throw DomainError("block length T must be >= 1");
    }
    if (!(r > 0.0 && r <= 4.0)) {
        throw DomainError("logistic parameter r must lie in (0, 4]");
    }
}

std::string SchemeSpec::label() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
    case SchemeKind::Standard:
        break;
    case SchemeKind::PureChaotic:
        os << "(c=" << c << ")";
        break;
    case SchemeKind::DelayedHybrid:
        os << "(c=" << c << ",p_t=" << p_t << ")";
        break;
    case SchemeKind::IteratedHybrid:
        os << "(c=" << c << ",T=" << T << ")";
        break;
    }
    return os.str();
}

std::size_t n_theta(const SchemeSpec &spec) {
    spec.validate();
    switch (spec.kind) {
    case SchemeKind::Standard:
        return 2U * spec.p;
    case SchemeKind::PureChaotic:
        return 2;
    case SchemeKind::DelayedHybrid:
        return 2U * std::min(spec.p_t, spec.p);
    case SchemeKind::IteratedHybrid:
        return 2U * ((spec.p - 1U) / spec.T + 1U);
    }
    return 0;
}

std::vector<AngleSource> angle_sources(const SchemeSpec &spec) {
    spec.validate();
    std::vector<AngleSource> out;
    out.reserve(spec.p);
    const std::uint64_t c = spec.c;
    for (std::uint32_t m = 1; m <= spec.p; ++m) {
        AngleSource s;
        switch (spec.kind) {
        case SchemeKind::Standard:
            s.f_index = 2U * (m - 1U);
            s.steps = 0;
            break;
        case SchemeKind::PureChaotic:
            s.f_index = 0;
            s.steps = c * (m - 1U);
            break;
        case SchemeKind::DelayedHybrid: {
            const std::uint32_t q = std::min(m, spec.p_t);
            s.f_index = 2U * (q - 1U);
            s.steps = c * (std::max(m, spec.p_t) - spec.p_t);
            break;
        }
        case SchemeKind::IteratedHybrid:
            s.f_index = 2U * ((m - 1U) / spec.T);
            s.steps = c * ((m - 1U) % spec.T);
            break;
        }
        s.g_index = s.f_index + 1;
        out.push_back(s);
    }
    return out;
}

std::uint64_t max_map_steps(const SchemeSpec &spec) {
    std::uint64_t best = 0;
    for (const auto &s : angle_sources(spec)) {
        best = std::max(best, s.steps);
    }
    return best;
}

AngleSchedule angles(const SchemeSpec &spec, std::span<const double> theta) {
    check_theta(spec, theta);
    auto orbits = start_orbits(theta);
    AngleSchedule out;
    out.reserve(spec.p);
    for (const auto &s : angle_sources(spec)) {
        auto &of = orbits[s.f_index];
        auto &og = orbits[s.g_index];
        of.advance_to(s.steps, spec.r, false);
        og.advance_to(s.steps, spec.r, false);
        out.push_back({of.x, og.x});
    }
    return out;
}

AngleJacobian angle_jacobian(const SchemeSpec &spec, std::span<const double> theta) {
    check_theta(spec, theta);
    auto orbits = start_orbits(theta);
    AngleJacobian jac;
    jac.rows = 2U * spec.p;
    jac.cols = theta.size();
    jac.data.assign(jac.rows * jac.cols, 0.0);
    std::size_t m = 0;
    for (const auto &s : angle_sources(spec)) {
        auto &of = orbits[s.f_index];
        auto &og = orbits[s.g_index];
        of.advance_to(s.steps, spec.r, true);
        og.advance_to(s.steps, spec.r, true);
        jac(2 * m, s.f_index) = of.derivative;
        jac(2 * m + 1, s.g_index) = og.derivative;
        ++m;
    }
    return jac;
}

void write_schedule_csv(const AngleSchedule &schedule, std::ostream &out) {
    const auto old = out.precision(17);
    out << "m,f,g\n";
    for (std::size_t m = 0; m < schedule.size(); ++m) {
        out << (m + 1) << ',' << schedule[m].f << ',' << schedule[m].g << '\n';
    }
    out.precision(old);
}

void to_json(nlohmann::json &j, const SchemeSpec &spec) {
    j = nlohmann::json{{"kind", to_string(spec.kind)}, {"p", spec.p}, {"c", spec.c},
                       {"p_t", spec.p_t},             {"T", spec.T}, {"r", spec.r}};
}

void from_json(const nlohmann::json &j, SchemeSpec &spec) {
    SchemeSpec s;
    s.kind = scheme_kind_from_string(j.at("kind").get<std::string>());
    s.p = j.value("p", 1U);
    s.c = j.value("c", 1U);
    s.p_t = j.value("p_t", 1U);
    s.T = j.value("T", 1U);
    s.r = j.value("r", chaos::kDefaultR);
    s.validate();
    spec = s;
}

} // namespace qacoa::schemes
