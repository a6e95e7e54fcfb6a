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
#include "qacoa/sat_instances.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <openssl/evp.h>

#include "qacoa/error.hpp"
#include "qacoa/rng.hpp"

namespace qacoa::sat {

void SatInstance::validate() const {
    if (n_vars == 0) {
        throw DomainError("instance has no variables");
    }
    if (clauses.empty()) {
        throw DomainError("instance has no clauses");
    }
    for (std::size_t j = 0; j < clauses.size(); ++j) {
        const auto &cl = clauses[j];
        if (cl.vars.size() != cl.signs.size() || cl.vars.empty()) {
            throw DomainError("clause " + std::to_string(j) + " is malformed");
        }
        if (k != 0 && cl.vars.size() != k) {
            throw DomainError("clause " + std::to_string(j) + " has width " +
                              std::to_string(cl.vars.size()) + ", expected " +
                              std::to_string(k));
        }
        for (std::size_t l = 0; l < cl.vars.size(); ++l) {
            if (cl.vars[l] >= n_vars) {
                throw DomainError("clause " + std::to_string(j) + " references variable " +
                                  std::to_string(cl.vars[l]) + " >= N");
            }
            if (cl.signs[l] != 1 && cl.signs[l] != -1) {
                throw DomainError("clause " + std::to_string(j) + " has a sign not in {+1,-1}");
            }
            for (std::size_t m = l + 1; m < cl.vars.size(); ++m) {
                if (cl.vars[l] == cl.vars[m]) {
                    throw DomainError("clause " + std::to_string(j) + " repeats variable " +
                                      std::to_string(cl.vars[l]));
                }
            }
        }
    }
}

std::size_t clause_count(std::size_t n_vars, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("clause density must be positive");
    }
    // std::round rounds halves away from zero.
    const double m = std::round(alpha * static_cast<double>(n_vars));
    if (m < 1.0) {
        throw DomainError("round(alpha * N) must be at least 1");
    }
    return static_cast<std::size_t>(m);
}

SatInstance generate_random_instance(std::size_t n_vars, std::size_t k, double alpha,
                                     std::uint64_t seed) {
    if (k == 0) {
        throw DomainError("clause width must be at least 1");
    }
    if (k > n_vars) {
        throw ShapeError("clause width " + std::to_string(k) + " exceeds variable count " +
                          std::to_string(n_vars));
    }
    const std::size_t m = clause_count(n_vars, alpha);

    Rng rng(seed);
    SatInstance inst;
    inst.n_vars = n_vars;
    inst.k = k;
    inst.clauses.reserve(m);

    std::vector<std::uint32_t> pool(n_vars);
    for (std::size_t j = 0; j < m; ++j) {
        std::iota(pool.begin(), pool.end(), 0U);
        Clause cl;
        cl.vars.reserve(k);
        cl.signs.reserve(k);
        // Partial Fisher-Yates: the first k slots become a uniform k-subset.
        for (std::size_t l = 0; l < k; ++l) {
            const auto pick = l + static_cast<std::size_t>(rng.below(n_vars - l));
            std::swap(pool[l], pool[pick]);
            cl.vars.push_back(pool[l]);
        }
        for (std::size_t l = 0; l < k; ++l) {
            cl.signs.push_back(rng.sign());
        }
        inst.clauses.push_back(std::move(cl));
    }
    return inst;
}

bool clause_violated(const Clause &clause, std::uint64_t assignment) noexcept {
    for (std::size_t l = 0; l < clause.vars.size(); ++l) {
        const bool bit = ((assignment >> clause.vars[l]) & 1U) != 0U;
        const bool literal = clause.signs[l] > 0 ? bit : !bit;
        if (literal) {
            return false;
        }
    }
    return true;
}

std::vector<std::uint8_t> hamming_distance_field(std::size_t n_vars,
                                                 const std::vector<std::uint64_t> &sources) {
    const std::size_t dim = std::size_t{1} << n_vars;
    constexpr auto unvisited = std::numeric_limits<std::uint8_t>::max();
    std::vector<std::uint8_t> dist(dim, unvisited);
    std::vector<std::uint64_t> frontier;
    frontier.reserve(sources.size());
    for (const auto s : sources) {
        if (dist[s] == unvisited) {
            dist[s] = 0;
            frontier.push_back(s);
        }
    }
    std::vector<std::uint64_t> next;
    std::uint8_t d = 0;
    while (!frontier.empty()) {
        ++d;
        next.clear();
        for (const auto u : frontier) {
            for (std::size_t b = 0; b < n_vars; ++b) {
                const auto v = u ^ (std::uint64_t{1} << b);
                if (dist[v] == unvisited) {
                    dist[v] = d;
                    next.push_back(v);
                }
            }
        }
        frontier.swap(next);
    }
    return dist;
}

CostDiagonal build_cost_diagonal(const SatInstance &inst, std::size_t max_vars) {
    inst.validate();
    if (inst.n_vars > max_vars || inst.n_vars > 62) {
        throw ResourceError("N = " + std::to_string(inst.n_vars) +
                            " exceeds the dense diagonal limit of " + std::to_string(max_vars));
    }
    const std::size_t dim = std::size_t{1} << inst.n_vars;

    CostDiagonal diag;
    diag.n_vars = inst.n_vars;
    diag.energies.assign(dim, 0U);

    // A clause is violated exactly when its variables take the pattern that
    // falsifies every literal: 0 for plain literals, 1 for negated ones.
    for (const auto &cl : inst.clauses) {
        std::uint64_t mask = 0;
        std::uint64_t pattern = 0;
        for (std::size_t l = 0; l < cl.vars.size(); ++l) {
            const std::uint64_t bit = std::uint64_t{1} << cl.vars[l];
            mask |= bit;
            if (cl.signs[l] < 0) {
                pattern |= bit;
            }
        }
        for (std::uint64_t x = 0; x < dim; ++x) {
            diag.energies[x] += static_cast<std::uint32_t>((x & mask) == pattern);
        }
    }

    const auto [lo, hi] = std::minmax_element(diag.energies.begin(), diag.energies.end());
    diag.c_min = *lo;
    diag.c_max = *hi;
    for (std::uint64_t x = 0; x < dim; ++x) {
        if (diag.energies[x] == diag.c_min) {
            diag.solutions.push_back(x);
        }
    }
    diag.solution_distance = hamming_distance_field(inst.n_vars, diag.solutions);
    return diag;
}

namespace {

bool is_blank(const std::string &line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char ch) { return std::isspace(ch) != 0; });
}

} // namespace

SatInstance read_dimacs(std::istream &in, bool strict_k) {
    SatInstance inst;
    bool have_header = false;
    std::size_t declared_clauses = 0;
    std::size_t width = 0;
    bool mixed = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (is_blank(line)) {
            continue;
        }
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (first == "c") {
            continue;
        }
        if (first == "%") {
            break; // SATLIB trailer
        }
        if (first == "p") {
            if (have_header) {
                throw ParseError("duplicate problem line", lineno);
            }
            std::string fmt;
            long long n = -1;
            long long m = -1;
            if (!(ls >> fmt >> n >> m) || fmt != "cnf" || n <= 0 || m <= 0) {
                throw ParseError("expected 'p cnf <vars> <clauses>'", lineno);
            }
            std::string extra;
            if (ls >> extra) {
                throw ParseError("trailing tokens after problem line", lineno);
            }
            inst.n_vars = static_cast<std::size_t>(n);
            declared_clauses = static_cast<std::size_t>(m);
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw ParseError("clause before problem line", lineno);
        }

        Clause cl;
        bool terminated = false;
        ls.clear();
        ls.seekg(0);
        std::string tok;
        while (ls >> tok) {
            if (terminated) {
                throw ParseError("tokens after clause terminator 0", lineno);
            }
            long long lit = 0;
            std::size_t used = 0;
            try {
                lit = std::stoll(tok, &used);
            } catch (const std::exception &) {
                throw ParseError("invalid literal '" + tok + "'", lineno);
            }
            if (used != tok.size()) {
                throw ParseError("invalid literal '" + tok + "'", lineno);
            }
            if (lit == 0) {
                terminated = true;
                continue;
            }
            const auto var = static_cast<std::size_t>(std::llabs(lit));
            if (var > inst.n_vars) {
                throw ParseError("variable " + std::to_string(var) + " exceeds declared count",
                                 lineno);
            }
            const auto idx = static_cast<std::uint32_t>(var - 1);
            if (std::find(cl.vars.begin(), cl.vars.end(), idx) != cl.vars.end()) {
                throw ParseError("variable " + std::to_string(var) + " repeated in clause",
                                 lineno);
            }
            cl.vars.push_back(idx);
            cl.signs.push_back(lit > 0 ? 1 : -1);
        }
        if (!terminated) {
            throw ParseError("clause not terminated by 0", lineno);
        }
        if (cl.vars.empty()) {
            throw ParseError("empty clause", lineno);
        }
        if (width == 0) {
            width = cl.vars.size();
        } else if (cl.vars.size() != width) {
            if (strict_k) {
                throw ParseError("clause width " + std::to_string(cl.vars.size()) +
                                     " differs from " + std::to_string(width),
                                 lineno);
            }
            mixed = true;
        }
        inst.clauses.push_back(std::move(cl));
    }

    if (!have_header) {
        throw ParseError("missing problem line", lineno);
    }
    if (inst.clauses.size() != declared_clauses) {
        throw ParseError("header declares " + std::to_string(declared_clauses) +
                             " clauses, found " + std::to_string(inst.clauses.size()),
                         lineno);
    }
    inst.k = mixed ? 0 : width;
    return inst;
}

SatInstance read_dimacs(const std::filesystem::path &path, bool strict_k) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return read_dimacs(in, strict_k);
}

void write_dimacs(const SatInstance &inst, std::ostream &out) {
    out << "p cnf " << inst.n_vars << ' ' << inst.clauses.size() << '\n';
    for (const auto &cl : inst.clauses) {
        for (std::size_t l = 0; l < cl.vars.size(); ++l) {
            out << (cl.signs[l] > 0 ? "" : "-") << (cl.vars[l] + 1) << ' ';
        }
        out << "0\n";
    }
}

void write_dimacs(const SatInstance &inst, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_dimacs(inst, out);
}

std::string to_dimacs(const SatInstance &inst) {
    std::ostringstream os;
    write_dimacs(inst, os);
    return os.str();
}

std::string sha1_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha1(), nullptr) != 1) {
        throw Error("SHA-1 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4U]);
        out.push_back(hex[md[i] & 0xfU]);
    }
    return out;
}

std::string content_hash(const SatInstance &inst) {
    const std::string body = to_dimacs(inst);
    return sha1_hex("blob " + std::to_string(body.size()) + '\0' + body);
}

void to_json(nlohmann::json &j, const Clause &c) {
    j = nlohmann::json{{"vars", c.vars}, {"signs", c.signs}};
}

void from_json(const nlohmann::json &j, Clause &c) {
    j.at("vars").get_to(c.vars);
    j.at("signs").get_to(c.signs);
}

void to_json(nlohmann::json &j, const SatInstance &inst) {
    j = nlohmann::json{{"n_vars", inst.n_vars},
                       {"k", inst.k},
                       {"m", inst.clauses.size()},
                       {"alpha", inst.alpha()},
                       {"clauses", inst.clauses}};
}

void from_json(const nlohmann::json &j, SatInstance &inst) {
    j.at("n_vars").get_to(inst.n_vars);
    j.at("k").get_to(inst.k);
    j.at("clauses").get_to(inst.clauses);
    inst.validate();
}

} // namespace qacoa::sat
