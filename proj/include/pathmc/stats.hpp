#pragma once

#include <cstddef>
#include <vector>

namespace pathmc {

// Pairwise (cascade) summation; the result depends only on the element
// order, not on how work was split across workers.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& v);

// Ordinary least squares y = a + b x with the usual slope standard error.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    int n = 0;
    bool valid = false; // false when fewer than two points
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace pathmc
