#include "reclab/phase.hpp"

#include <cmath>
#include <numbers>

#include "reclab/error.hpp"

namespace reclab
{
std::string_view to_string(Metric m)
{
    return m == Metric::chebyshev ? "chebyshev" : "euclidean";
}

Metric metric_from_string(std::string_view name)
{
    if (name == "chebyshev")
        return Metric::chebyshev;
    if (name == "euclidean")
        return Metric::euclidean;
    fail(ErrorKind::invalid_input,
         "unknown metric '" + std::string(name) + "'");
}

SpaceSpec::SpaceSpec(int dimension, Metric metric)
    : dimension_(dimension), metric_(metric)
{
    require(dimension >= 1 && dimension <= max_dimension,
            "space dimension must be in [1, " + std::to_string(max_dimension)
                + "]");
    diameter_ = metric == Metric::chebyshev
                    ? 0.5
                    : 0.5 * std::sqrt(static_cast<double>(dimension));
}

Point::Point(int dimension) : dimension_(dimension)
{
    require(dimension >= 1 && dimension <= max_dimension,
            "point dimension out of range");
}

Point::Point(int dimension, std::span<std::uint64_t const> raw)
    : Point(dimension)
{
    require(raw.size() == static_cast<std::size_t>(dimension),
            "point coordinate count does not match dimension");
    for (int i = 0; i < dimension; ++i)
        raw_[i] = raw[i];
}

std::uint64_t to_fixed(double value)
{
    require(std::isfinite(value), "point coordinates must be finite");
    double frac = value - std::floor(value);
    // frac may round up to exactly 1.0 for tiny negative inputs
    if (frac >= 1.0)
        frac = 0.0;
    long double const scaled = std::ldexp(static_cast<long double>(frac), 64);
    long double const rounded = std::nearbyint(scaled);
    if (rounded >= 0x1.0p64L)
        return 0;
    return static_cast<std::uint64_t>(rounded);
}

Point Point::from_reals(std::span<double const> coords)
{
    Point p(static_cast<int>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i)
        p.raw_[i] = to_fixed(coords[i]);
    return p;
}

double distance(SpaceSpec const& space, Point const& x, Point const& y)
{
    if (x.dimension() != space.dimension()
        || y.dimension() != space.dimension())
    {
        fail(ErrorKind::invalid_input,
             "dimension mismatch between points and space");
    }
    return distance_unchecked(space, x, y);
}

namespace
{
double unit_ball_volume(int n)
{
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}
}  // namespace

double ball_volume(SpaceSpec const& space, double r)
{
    require(r >= 0 && !std::isnan(r), "ball radius must be nonnegative");
    if (r >= space.diameter())
        return 1.0;
    int const n = space.dimension();
    if (space.metric() == Metric::chebyshev || n == 1)
    {
        double const side = std::min(2.0 * r, 1.0);
        return std::pow(side, n);
    }
    if (r > 0.5)
    {
        fail(ErrorKind::inexact_regime,
             "euclidean ball volume is only maintained for r <= 1/2");
    }
    return unit_ball_volume(n) * std::pow(r, n);
}

Point sample_uniform(SpaceSpec const& space, RngStream& rng)
{
    Point p(space.dimension());
    for (int i = 0; i < space.dimension(); ++i)
        p.raw(i) = rng.next_u64();
    return p;
}

}  // namespace reclab
