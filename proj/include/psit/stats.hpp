#pragma once

#include <cstddef>
#include <vector>

namespace psit {

// Pairwise (cascade) summation. Deterministic for a fixed input order, which
// is what makes Monte Carlo aggregates byte-stable across thread counts.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& data);

struct MeanStdError {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    std::size_t n = 0;
};

// Two-pass mean / standard error, both passes pairwise-summed.
MeanStdError mean_std_error(const std::vector<double>& data);

// Least-squares slope of log(y) against log(x). Used by convergence-rate
// checks; x and y must be positive and of equal nonzero length.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace psit
