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
#include "qacoa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "qacoa/error.hpp"

namespace qacoa::stats {

double mean(std::span<const double> x) {
    if (x.empty()) {
        throw DomainError("mean of an empty sample");
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (const double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double standard_error(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    return stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

double quantile(std::span<const double> x, double q) {
    if (x.empty()) {
        throw DomainError("quantile of an empty sample");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("quantile level must lie in [0, 1]");
    }
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double h = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ShapeError("linear_fit needs equally long x and y");
    }
    if (x.size() < 2) {
        throw DomainError("linear_fit needs at least two points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw DomainError("linear_fit needs at least two distinct x values");
    }
    LinearFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

std::vector<double> ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    return r;
}

CorrelationTest spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ShapeError("spearman needs equally long x and y");
    }
    if (x.size() < 3) {
        throw DomainError("spearman needs at least three pairs");
    }
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double mx = mean(rx);
    const double my = mean(ry);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    CorrelationTest t;
    t.n = x.size();
    if (sxx == 0.0 || syy == 0.0) {
        return t;
    }
    t.rho = sxy / std::sqrt(sxx * syy);
    const double df = static_cast<double>(t.n) - 2.0;
    if (std::abs(t.rho) >= 1.0) {
        t.p_value = 0.0;
        return t;
    }
    const double stat = t.rho * std::sqrt(df / (1.0 - t.rho * t.rho));
    const boost::math::students_t dist(df);
    t.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(stat)));
    return t;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) {
        return 1.0;
    }
    if (lambda < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) {
            break;
        }
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsTest ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw DomainError("ks_two_sample needs non-empty samples");
    }
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const auto na = static_cast<double>(sa.size());
    const auto nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) {
            ++i;
        }
        while (j < sb.size() && sb[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsTest t;
    t.statistic = d;
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    t.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return t;
}

} // namespace qacoa::stats
