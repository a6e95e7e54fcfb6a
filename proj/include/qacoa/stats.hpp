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
 * Small descriptive statistics used by the diagnostics and aggregation code.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qacoa::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double stddev(std::span<const double> x);
/// stddev / sqrt(n); 0 for n < 2.
double standard_error(std::span<const double> x);

/// Hyndman-Fan type 7 quantile (linear interpolation between order statistics).
double quantile(std::span<const double> x, double q);
double median(std::span<const double> x);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares y = slope x + intercept. Needs n >= 2 distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Average ranks (ties share the mean rank), 1-based.
std::vector<double> ranks(std::span<const double> x);

struct CorrelationTest {
    double rho = 0.0;
    /// Two-sided p-value from the t approximation with n - 2 degrees of freedom.
    double p_value = 1.0;
    std::size_t n = 0;
};

CorrelationTest spearman(std::span<const double> x, std::span<const double> y);

struct KsTest {
    double statistic = 0.0;
    /// Asymptotic Kolmogorov p-value.
    double p_value = 1.0;
};

KsTest ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Survival function of the Kolmogorov distribution.
double kolmogorov_q(double lambda);

} // namespace qacoa::stats
