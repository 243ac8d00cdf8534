#include "reclab/fit.hpp"

#include <algorithm>
#include <cmath>

#include "reclab/error.hpp"

namespace reclab
{
LinearFit least_squares(std::span<double const> x, std::span<double const> y)
{
    require(x.size() == y.size(), "least_squares: size mismatch");
    require(x.size() >= 2, "least_squares: need at least two points");
    std::size_t const n = x.size();
    double const mx = mean(x);
    double const my = mean(y);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0)
        fail(ErrorKind::degenerate, "least_squares: abscissae are all equal");

    LinearFit fit;
    fit.count = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n > 2)
    {
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            double const r = y[i] - fit.intercept - fit.slope * x[i];
            ss += r * r;
        }
        fit.slope_se = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

double quantile(std::vector<double> values, double q)
{
    require(!values.empty(), "quantile of an empty sample");
    require(q >= 0 && q <= 1, "quantile level must be in [0,1]");
    std::sort(values.begin(), values.end());
    double const pos = q * static_cast<double>(values.size() - 1);
    auto const lo = static_cast<std::size_t>(std::floor(pos));
    auto const hi = std::min(lo + 1, values.size() - 1);
    double const t = pos - static_cast<double>(lo);
    return values[lo] + t * (values[hi] - values[lo]);
}

double mean(std::span<double const> values)
{
    if (values.empty())
        return 0;
    double s = 0;
    for (double v : values)
        s += v;
    return s / static_cast<double>(values.size());
}

double stddev(std::span<double const> values)
{
    if (values.size() < 2)
        return 0;
    double const m = mean(values);
    double s = 0;
    for (double v : values)
        s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size() - 1));
}

}  // namespace reclab
