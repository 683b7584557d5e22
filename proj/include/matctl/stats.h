// Copyright 2026 The matctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MATCTL_STATS_H_
#define MATCTL_STATS_H_

#include <cstddef>
#include <span>

namespace matctl::stats {

// Regularized incomplete beta function I_x(a, b).
double RegularizedIncompleteBeta(double a, double b, double x);

// CDF of Student's t distribution with df degrees of freedom.
double StudentTCdf(double t, double df);

// Inverse CDF: the t with StudentTCdf(t, df) == p, for 0 < p < 1 and df > 0.
// Accurate to about 1e-10.
double StudentTQuantile(double p, double df);

double Mean(std::span<const double> samples);
// Sample standard deviation (n - 1 denominator).
double StdDev(std::span<const double> samples);

struct ConfidenceInterval {
  double mean = 0;
  double halfwidth = 0;
};

// Two-sided interval mean +- t_{1 - alpha/2, n-1} * s / sqrt(n). Throws
// Error(kInsufficientSamples) for fewer than two samples and
// Error(kInvalidArgument) unless 0 < per_test_alpha < 1.
ConfidenceInterval ComputeConfidenceInterval(std::span<const double> samples,
                                             double per_test_alpha);

// Per-test significance that keeps the family-wise level at overall_alpha
// across `tests` intervals.
double BonferroniAlpha(double overall_alpha, std::size_t tests);

}  // namespace matctl::stats

#endif  // MATCTL_STATS_H_
