#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace reclab
{
//! Ordinary least squares y = intercept + slope * x.
struct LinearFit
{
    double slope = 0;
    double intercept = 0;
    double slope_se = 0;  //!< standard error of the slope (0 when n <= 2)
    std::size_t count = 0;
};

LinearFit least_squares(std::span<double const> x, std::span<double const> y);

//! Linear-interpolated quantile of unsorted data, q in [0,1].
double quantile(std::vector<double> values, double q);

double mean(std::span<double const> values);
//! Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<double const> values);

}  // namespace reclab
