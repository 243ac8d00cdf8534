#include "reclab/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reclab/error.hpp"

namespace reclab
{
std::string_view to_string(TargetKind k)
{
    switch (k)
    {
        case TargetKind::power:
            return "power";
        case TargetKind::log_power:
            return "log_power";
        case TargetKind::explicit_list:
            return "explicit";
    }
    return "?";
}

std::string_view to_string(Verdict v)
{
    switch (v)
    {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        case Verdict::inconclusive:
            return "inconclusive";
    }
    return "?";
}

TargetSequence TargetSequence::power(double c, double gamma, std::int64_t horizon)
{
    require(c > 0 && std::isfinite(c), "power sequence needs c > 0");
    require(gamma > 0 && gamma <= 1, "gamma must be in (0,1]");
    require(horizon >= 1, "sequence horizon must be positive");
    TargetSequence s;
    s.kind_ = TargetKind::power;
    s.c_ = c;
    s.exponent_ = gamma;
    s.horizon_ = horizon;
    s.count_clamped();
    return s;
}

TargetSequence
TargetSequence::log_power(double c, double beta, std::int64_t horizon)
{
    require(c > 0 && std::isfinite(c), "log_power sequence needs c > 0");
    require(std::isfinite(beta) && beta >= 0, "beta must be nonnegative");
    require(horizon >= 1, "sequence horizon must be positive");
    TargetSequence s;
    s.kind_ = TargetKind::log_power;
    s.c_ = c;
    s.exponent_ = beta;
    s.horizon_ = horizon;
    s.count_clamped();
    return s;
}

TargetSequence TargetSequence::explicit_values(std::vector<double> values)
{
    require(!values.empty(), "explicit sequence must not be empty");
    for (double v : values)
        require(std::isfinite(v), "explicit sequence values must be finite");
    TargetSequence s;
    s.kind_ = TargetKind::explicit_list;
    s.horizon_ = static_cast<std::int64_t>(values.size());
    s.values_ = std::move(values);
    s.count_clamped();
    return s;
}

void TargetSequence::count_clamped()
{
    clamped_count_ = 0;
    // Power and log_power values decrease past small n; scan until they
    // settle inside [0,1] for good.
    for (std::int64_t n = 1; n <= horizon_; ++n)
    {
        if (clamped(n))
        {
            ++clamped_count_;
        }
        else if (kind_ == TargetKind::power
                 || (kind_ == TargetKind::log_power
                     && std::log(static_cast<double>(n) + 1.0) > exponent_))
        {
            break;
        }
    }
}

double TargetSequence::raw_value(std::int64_t n) const
{
    if (n < 1 || n > horizon_)
    {
        fail(ErrorKind::invalid_input,
             "sequence index " + std::to_string(n) + " outside [1, "
                 + std::to_string(horizon_) + "]");
    }
    auto const x = static_cast<double>(n);
    switch (kind_)
    {
        case TargetKind::power:
            return c_ * std::pow(x, -exponent_);
        case TargetKind::log_power:
            return c_ * std::pow(std::log(x + 1.0), exponent_) / (x + 1.0);
        case TargetKind::explicit_list:
            return values_[static_cast<std::size_t>(n - 1)];
    }
    return 0;
}

double TargetSequence::value(std::int64_t n) const
{
    return std::clamp(raw_value(n), 0.0, 1.0);
}

bool TargetSequence::clamped(std::int64_t n) const
{
    double const v = raw_value(n);
    return v < 0 || v > 1;
}

double target_value(TargetSequence const& seq, std::int64_t n)
{
    return seq.value(n);
}

//---------------------------------------------------------------------------//
SeqValidation validate_target_sequence(TargetSequence const& seq,
                                       std::int64_t n_min,
                                       std::span<double const> alpha_grid,
                                       double epsilon)
{
    require(!alpha_grid.empty(), "alpha grid must not be empty");
    require(n_min >= 3, "n_min must be at least 3");
    require(epsilon > 0 && std::isfinite(epsilon), "epsilon must be positive");
    for (double a : alpha_grid)
        require(a > 1 && std::isfinite(a), "alpha grid values must exceed 1");

    SeqValidation out;
    out.epsilon = epsilon;
    out.n_min = n_min;
    out.n_max = seq.horizon();

    for (std::int64_t n = n_min; n <= seq.horizon(); ++n)
    {
        auto const x = static_cast<double>(n);
        double const bound = std::pow(std::log(x), 4.0 + epsilon) / x;
        if (seq.value(n) < bound)
        {
            if (out.bound_violations.size() < SeqValidation::violation_cap)
                out.bound_violations.push_back(n);
            ++out.violation_count;
        }
    }

    for (double alpha : alpha_grid)
    {
        double sup = 0;
        bool any = false;
        for (std::int64_t n = n_min; n <= seq.horizon(); ++n)
        {
            auto const m = static_cast<std::int64_t>(
                std::floor(alpha * static_cast<double>(n)));
            if (m > seq.horizon())
                break;
            double const num = seq.value(n);
            double const den = seq.value(m);
            if (den == 0)
            {
                if (num > 0)
                {
                    sup = std::numeric_limits<double>::infinity();
                    any = true;
                }
                continue;
            }
            sup = std::max(sup, num / den);
            any = true;
        }
        if (any)
            out.ratio_table[alpha] = sup;
    }

    // Monotone as alpha decreases, and the excess over 1 extrapolates to 0
    // at alpha = 1.
    out.ratio_monotone = !out.ratio_table.empty();
    double prev = -std::numeric_limits<double>::infinity();
    for (auto const& [alpha, ratio] : out.ratio_table)
    {
        if (ratio + 1e-12 < prev)
            out.ratio_monotone = false;
        prev = ratio;
    }
    if (out.ratio_table.size() >= 2)
    {
        auto it = out.ratio_table.begin();
        auto const [a1, r1] = *it++;
        auto const [a2, r2] = *it;
        double const e1 = r1 - 1, e2 = r2 - 1;
        double const at_one = e1 - (a1 - 1) * (e2 - e1) / (a2 - a1);
        out.ratio_converging = std::isfinite(at_one) && at_one <= 0.01;
    }
    else if (out.ratio_table.size() == 1)
    {
        auto const [a1, r1] = *out.ratio_table.begin();
        out.ratio_converging = std::isfinite(r1) && r1 - 1 <= 10 * (a1 - 1);
    }

    if (seq.horizon() < 10 * n_min)
        out.verdict = Verdict::inconclusive;
    else if (out.violation_count == 0 && out.ratio_monotone
             && out.ratio_converging)
        out.verdict = Verdict::pass;
    else
        out.verdict = Verdict::fail;
    return out;
}

//---------------------------------------------------------------------------//
namespace
{
double unit_ball_volume(int n)
{
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double closed_form_radius(SpaceSpec const& space, double mass)
{
    int const n = space.dimension();
    if (space.metric() == Metric::chebyshev || n == 1)
        return 0.5 * std::pow(mass, 1.0 / n);
    double const r = std::pow(mass / unit_ball_volume(n), 1.0 / n);
    if (r > 0.5)
    {
        fail(ErrorKind::inexact_regime,
             "euclidean radius inversion is only maintained for r <= 1/2");
    }
    return r;
}

double bisect_radius(MeasureSpec const& measure,
                     SpaceSpec const& space,
                     Point const& x,
                     double mass,
                     double tol,
                     double hi)
{
    double lo = 0;
    int iter = 0;
    for (; iter < 200; ++iter)
    {
        double const mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (ball_measure(measure, space, x, mid) >= mass)
            hi = mid;
        else
            lo = mid;
    }
    double const residual = std::abs(ball_measure(measure, space, x, hi) - mass);
    if (iter == 200 || residual > tol)
    {
        fail(ErrorKind::numerical_failure,
             "radius bisection did not reach tolerance (residual "
                 + std::to_string(residual) + ")");
    }
    return hi;
}
}  // namespace

bool has_closed_form_radius(MeasureSpec const& measure, SpaceSpec const& space)
{
    (void)space;
    return measure.is_lebesgue();
}

double invert_radius(MeasureSpec const& measure,
                     SpaceSpec const& space,
                     Point const& x,
                     double mass,
                     double tol)
{
    require(mass >= 0 && mass <= 1, "target mass must lie in [0,1]");
    require(tol > 0, "radius tolerance must be positive");
    if (mass == 0)
        return 0;
    if (measure.is_lebesgue())
        return closed_form_radius(space, mass);
    measure.check_space(space);
    return bisect_radius(measure, space, x, mass, tol, space.diameter());
}

RadiusCursor::RadiusCursor(MeasureSpec const& measure,
                           SpaceSpec const& space,
                           Point const& x,
                           double tol)
    : measure_(measure)
    , space_(space)
    , x_(x)
    , tol_(tol)
    , closed_form_(has_closed_form_radius(measure, space))
{
    require(tol > 0, "radius tolerance must be positive");
    measure.check_space(space);
}

double RadiusCursor::operator()(double mass)
{
    require(mass >= 0 && mass <= 1, "target mass must lie in [0,1]");
    if (closed_form_ || mass == 0)
        return invert_radius(measure_, space_, x_, mass, tol_);
    if (last_mass_ && *last_mass_ == mass)
        return last_radius_;
    double hi = space_.diameter();
    if (last_mass_ && mass < *last_mass_)
        hi = last_radius_;
    double const r = bisect_radius(measure_, space_, x_, mass, tol_, hi);
    last_mass_ = mass;
    last_radius_ = r;
    return r;
}

RadiusProfile radius_profile(MeasureSpec const& measure,
                             SpaceSpec const& space,
                             Point const& x,
                             TargetSequence const& seq,
                             std::span<std::int64_t const> n_list,
                             double tol)
{
    RadiusProfile out;
    out.center = x;
    out.tolerance = tol;
    RadiusCursor cursor(measure, space, x, tol);
    for (std::int64_t n : n_list)
        out.radii[n] = cursor(seq.value(n));
    return out;
}

}  // namespace reclab
