#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

#include "rng.hpp"

namespace reclab
{
inline constexpr int max_dimension = 4;

enum class Metric
{
    chebyshev,  //!< max of per-axis wrapped distances
    euclidean,  //!< root sum of squared wrapped distances
};

std::string_view to_string(Metric m);
Metric metric_from_string(std::string_view name);

//---------------------------------------------------------------------------//
/*!
 * Compact quotient-metric phase space: the unit N-torus (circle when N = 1).
 */
class SpaceSpec
{
  public:
    SpaceSpec(int dimension, Metric metric);

    static SpaceSpec circle() { return {1, Metric::chebyshev}; }
    static SpaceSpec torus(int dimension, Metric metric = Metric::chebyshev)
    {
        return {dimension, metric};
    }

    int dimension() const noexcept { return dimension_; }
    Metric metric() const noexcept { return metric_; }
    double diameter() const noexcept { return diameter_; }

    friend bool operator==(SpaceSpec const&, SpaceSpec const&) = default;

  private:
    int dimension_;
    Metric metric_;
    double diameter_;
};

//---------------------------------------------------------------------------//
/*!
 * A point of the torus stored as 64-bit fixed-point fractions per axis.
 *
 * Coordinate value = raw / 2^64, so every representable point lies in [0,1).
 */
class Point
{
  public:
    using Raw = std::array<std::uint64_t, max_dimension>;

    Point() = default;
    explicit Point(int dimension);
    Point(int dimension, std::span<std::uint64_t const> raw);

    //! Reduce reals mod 1 and round to the fixed-point grid.
    static Point from_reals(std::span<double const> coords);
    static Point from_reals(std::initializer_list<double> coords)
    {
        return from_reals(std::span<double const>(coords.begin(), coords.size()));
    }

    int dimension() const noexcept { return dimension_; }
    std::uint64_t raw(int axis) const noexcept { return raw_[axis]; }
    std::uint64_t& raw(int axis) noexcept { return raw_[axis]; }

    //! Float view, truncated to 53 bits so the value stays in [0,1).
    double real(int axis) const noexcept
    {
        return static_cast<double>(raw_[axis] >> 11) * 0x1.0p-53;
    }

    friend bool operator==(Point const& a, Point const& b) noexcept
    {
        if (a.dimension_ != b.dimension_)
            return false;
        for (int i = 0; i < a.dimension_; ++i)
        {
            if (a.raw_[i] != b.raw_[i])
                return false;
        }
        return true;
    }

  private:
    int dimension_ = 0;
    Raw raw_{};
};

std::uint64_t to_fixed(double value);

//! Distance on the circle between fixed-point fractions, in [0, 1/2].
inline double wrapped_axis_distance(std::uint64_t a, std::uint64_t b) noexcept
{
    std::uint64_t const up = a - b;
    std::uint64_t const down = b - a;
    return static_cast<double>(up < down ? up : down) * 0x1.0p-64;
}

//! Wrapped signed offset b - a in [-1/2, 1/2).
inline double wrapped_offset(double a, double b) noexcept
{
    double d = b - a;
    d -= static_cast<double>(static_cast<long long>(d));
    if (d >= 0.5)
        d -= 1.0;
    else if (d < -0.5)
        d += 1.0;
    return d;
}

double distance(SpaceSpec const& space, Point const& x, Point const& y);

//! Unchecked distance for hot loops; dimensions must already agree.
inline double distance_unchecked(SpaceSpec const& space,
                                 Point const& x,
                                 Point const& y) noexcept
{
    int const n = space.dimension();
    if (space.metric() == Metric::chebyshev)
    {
        double d = 0;
        for (int i = 0; i < n; ++i)
        {
            double const a = wrapped_axis_distance(x.raw(i), y.raw(i));
            d = a > d ? a : d;
        }
        return d;
    }
    double sum = 0;
    for (int i = 0; i < n; ++i)
    {
        double const a = wrapped_axis_distance(x.raw(i), y.raw(i));
        sum += a * a;
    }
    return std::sqrt(sum);
}

double ball_volume(SpaceSpec const& space, double r);

Point sample_uniform(SpaceSpec const& space, RngStream& rng);

}  // namespace reclab
