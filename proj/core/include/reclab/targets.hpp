#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "measures.hpp"
#include "phase.hpp"

namespace reclab
{
enum class TargetKind
{
    power,      //!< M_n = c n^-gamma
    log_power,  //!< M_n = c (log(n+1))^beta / (n+1)
    explicit_list,
};

std::string_view to_string(TargetKind k);

//---------------------------------------------------------------------------//
/*!
 * The sequence of target masses M_1, ..., M_horizon.
 *
 * Generator values outside [0,1] are clamped; clamped_count() reports how
 * many indices in the horizon were affected.
 */
class TargetSequence
{
  public:
    static TargetSequence power(double c, double gamma, std::int64_t horizon);
    static TargetSequence log_power(double c, double beta, std::int64_t horizon);
    static TargetSequence explicit_values(std::vector<double> values);

    TargetKind kind() const noexcept { return kind_; }
    std::int64_t horizon() const noexcept { return horizon_; }
    double c() const noexcept { return c_; }
    double exponent() const noexcept { return exponent_; }
    std::span<double const> listed() const noexcept { return values_; }

    //! Raw generator value before clamping.
    double raw_value(std::int64_t n) const;
    //! Clamped to [0,1]; n must lie in [1, horizon].
    double value(std::int64_t n) const;
    bool clamped(std::int64_t n) const;
    std::int64_t clamped_count() const noexcept { return clamped_count_; }

  private:
    TargetSequence() = default;
    void count_clamped();

    TargetKind kind_ = TargetKind::power;
    double c_ = 1;
    double exponent_ = 1;
    std::int64_t horizon_ = 0;
    std::vector<double> values_;
    std::int64_t clamped_count_ = 0;
};

double target_value(TargetSequence const& seq, std::int64_t n);

enum class Verdict
{
    pass,
    fail,
    inconclusive,
};

std::string_view to_string(Verdict v);

//! Finite-range check of the sequence growth condition: M_n >= (log n)^{4+eps}/n
//! on [n_min, horizon] and sup_n M_n / M_{floor(alpha n)} per alpha.
struct SeqValidation
{
    double epsilon = 0;
    std::int64_t n_min = 0;
    std::int64_t n_max = 0;
    std::vector<std::int64_t> bound_violations;  //!< capped at violation_cap
    std::int64_t violation_count = 0;
    std::map<double, double> ratio_table;
    bool ratio_monotone = false;
    bool ratio_converging = false;
    Verdict verdict = Verdict::inconclusive;

    static constexpr std::size_t violation_cap = 1000;
};

SeqValidation validate_target_sequence(TargetSequence const& seq,
                                       std::int64_t n_min,
                                       std::span<double const> alpha_grid,
                                       double epsilon);

//! Alpha grid used when no other is configured.
inline constexpr std::array<double, 4> default_alpha_grid{1.01, 1.02, 1.05, 1.1};

inline constexpr double closed_form_tolerance = 1e-10;
inline constexpr double bisection_tolerance = 1e-8;

//! r(x) = inf{ r >= 0 : mu(B(x,r)) >= M }.
double invert_radius(MeasureSpec const& measure,
                     SpaceSpec const& space,
                     Point const& x,
                     double mass,
                     double tol);

//! Whether invert_radius uses a closed form for this pairing.
bool has_closed_form_radius(MeasureSpec const& measure, SpaceSpec const& space);

struct RadiusProfile
{
    Point center;
    std::map<std::int64_t, double> radii;
    double tolerance = 0;
};

RadiusProfile radius_profile(MeasureSpec const& measure,
                             SpaceSpec const& space,
                             Point const& x,
                             TargetSequence const& seq,
                             std::span<std::int64_t const> n_list,
                             double tol);

//---------------------------------------------------------------------------//
/*!
 * Incremental radius evaluation for one center along a sequence.
 *
 * Reuses the previous radius as a bisection bracket whenever the target mass
 * decreases, which is the common case when walking n upwards.
 */
class RadiusCursor
{
  public:
    RadiusCursor(MeasureSpec const& measure,
                 SpaceSpec const& space,
                 Point const& x,
                 double tol);

    double operator()(double mass);

  private:
    MeasureSpec const& measure_;
    SpaceSpec const& space_;
    Point x_;
    double tol_;
    bool closed_form_;
    std::optional<double> last_mass_;
    double last_radius_ = 0;
};

}  // namespace reclab
