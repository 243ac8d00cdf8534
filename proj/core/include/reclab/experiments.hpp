#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "measures.hpp"
#include "phase.hpp"
#include "rng.hpp"
#include "systems.hpp"
#include "targets.hpp"

namespace reclab
{
//! Settings shared by every seed-parallel estimator. Sample i always draws
//! its start point (and digit tail) from make_stream(master_seed,
//! seed_points, i), so estimators run on the same seed agree point by point.
struct RunOptions
{
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
    double tolerance = bisection_tolerance;  //!< radius inversion residual
    //! Skip the sequence growth check (the run is still labelled).
    bool override_assumption1 = false;
    double assumption1_epsilon = 0.5;
    std::int64_t assumption1_n_min = 3;
    std::vector<double> alpha_grid{default_alpha_grid.begin(),
                                   default_alpha_grid.end()};
};

//! Thrown when a target sequence fails validation and no override was given.
class AssumptionRefused : public Error
{
  public:
    explicit AssumptionRefused(SeqValidation report);
    SeqValidation const& report() const noexcept { return report_; }

  private:
    SeqValidation report_;
};

//! Runs the sequence check unless overridden; returns the report (if run).
std::optional<SeqValidation>
check_assumption1(TargetSequence const& seq, RunOptions const& options);

//---------------------------------------------------------------------------//
struct SbcOptions : RunOptions
{
    std::vector<std::int64_t> checkpoints;  //!< n_max is always appended
    //! Shrinking-target comparison: balls centred here instead of at x.
    std::optional<Point> fixed_center;
};

struct SbcResult
{
    std::vector<std::int64_t> checkpoints;
    std::vector<double> cum_mass;  //!< sum of M_k for k <= checkpoint
    //! hits[seed][j] = S_n at checkpoints[j]
    std::vector<std::vector<std::int64_t>> hits;
    std::vector<double> final_ratio;
    double mean_ratio = 0;
    double sd_ratio = 0;
    std::map<double, double> quantiles;  //!< q -> ratio quantile
    bool non_mixing = false;
    bool fixed_center = false;
    bool assumption1_overridden = false;
    std::optional<SeqValidation> validation;

    //! S_n / cum_mass at checkpoint j (NaN when the mass sum is 0).
    double ratio(std::size_t seed, std::size_t j) const;
};

SbcResult run_sbc(SystemSpec const& system,
                  MeasureSpec const& measure,
                  SpaceSpec const& space,
                  TargetSequence const& seq,
                  std::int64_t n_max,
                  std::size_t n_seeds,
                  SbcOptions const& options);

//---------------------------------------------------------------------------//
struct EnEstimate
{
    std::int64_t n = 0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    double mu_hat = 0;
    double std_error = 0;
    double target = 0;  //!< M_n
    double deviation = 0;
};

EnEstimate estimate_E_measure(SystemSpec const& system,
                              MeasureSpec const& measure,
                              SpaceSpec const& space,
                              TargetSequence const& seq,
                              std::int64_t n,
                              std::size_t n_samples,
                              RunOptions const& options);

//! Joint frequency of E_n and E_{n+m}. Slack is reported against the
//! estimated marginals and against the target products M_{n+m} M_n and
//! M_n M_m.
struct PairEstimate
{
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::size_t samples = 0;
    double joint = 0;
    double marginal_n = 0;
    double marginal_nm = 0;  //!< frequency of E_{n+m}
    double product = 0;      //!< marginal_nm * marginal_n
    double slack = 0;        //!< joint - product
    double se_joint = 0;
    double se_product = 0;   //!< delta-method standard error
    double target_product = 0;        //!< M_{n+m} M_n
    double target_slack = 0;
    double target_product_nm = 0;     //!< M_n M_m
    double target_slack_nm = 0;
};

PairEstimate estimate_E_pair(SystemSpec const& system,
                             MeasureSpec const& measure,
                             SpaceSpec const& space,
                             TargetSequence const& seq,
                             std::int64_t n,
                             std::int64_t m,
                             std::size_t n_samples,
                             RunOptions const& options);

//---------------------------------------------------------------------------//
enum class ObservableKind
{
    cosine,    //!< cos(2 pi k x_0)
    sine,      //!< sin(2 pi k x_0)
    distance,  //!< d(x, p)
    constant,
};

/*!
 * Bounded observable with known Holder data.
 *
 * Textual form: "cos:k", "sin:k", "dist:p0[:p1...]" or "const:c".
 */
struct Observable
{
    ObservableKind kind = ObservableKind::constant;
    int frequency = 1;
    Point anchor;
    double value = 0;

    static Observable parse(std::string_view text, SpaceSpec const& space);
    std::string to_string() const;

    double operator()(SpaceSpec const& space, Point const& x) const;
    //! Holder exponent theta.
    double holder_exponent() const noexcept { return 1.0; }
    //! Sup norm plus theta-Holder constant.
    double holder_norm(SpaceSpec const& space) const;
};

enum class DecayStatus
{
    fitted,
    no_decay,     //!< fit rejected: magnitudes do not decrease significantly
    below_floor,  //!< fewer than 3 gaps above the noise floor
};

std::string_view to_string(DecayStatus s);

struct DecayEstimate
{
    std::vector<Observable> observables;
    std::vector<double> holder_norms;
    std::vector<std::int64_t> gaps;
    std::vector<double> correlation;
    std::vector<bool> used_in_fit;
    std::size_t samples = 0;
    double noise_floor = 0;
    DecayStatus status = DecayStatus::below_floor;
    std::optional<double> tau_hat;
    std::optional<double> c_hat;
    double slope = 0;
    double slope_se = 0;
};

/*!
 * Monte Carlo r-fold correlations. Two observables use times (0, g); three
 * use (0, g, 2g). Magnitudes above 4/sqrt(n_samples) are fitted to c e^{-tau g}.
 */
DecayEstimate estimate_correlation_decay(SystemSpec const& system,
                                         MeasureSpec const& measure,
                                         SpaceSpec const& space,
                                         std::vector<Observable> observables,
                                         std::span<std::int64_t const> gaps,
                                         std::size_t n_samples,
                                         RunOptions const& options);

//---------------------------------------------------------------------------//
inline constexpr std::int64_t default_return_cap = 100'000'000;

struct ReturnTime
{
    std::int64_t steps = 0;  //!< first return, or cap when censored
    bool censored = false;
};

ReturnTime return_time(SystemSpec const& system,
                       SpaceSpec const& space,
                       Point const& x,
                       double r,
                       std::int64_t cap,
                       RngStream stream,
                       DigitTail tail = DigitTail::random);

struct LocalStats
{
    Point center;
    std::vector<double> radii;       //!< descending
    std::vector<double> mu_ball;
    std::vector<std::int64_t> tau;   //!< cap where censored
    std::vector<bool> censored;
    //! log tau / -log mu(B) per radius; NaN where undefined
    std::vector<double> recurrence_ratio;

    // Min / max of consecutive-radius slopes
    std::optional<double> d_lower, d_upper;
    std::optional<double> r_lower, r_upper;
    // Least-squares slopes over the whole grid
    std::optional<double> d_slope, r_slope;
    bool usable = false;  //!< at least one uncensored return
};

LocalStats local_stats(SystemSpec const& system,
                       MeasureSpec const& measure,
                       SpaceSpec const& space,
                       Point const& x,
                       std::span<double const> r_grid,
                       std::int64_t cap,
                       RngStream stream,
                       DigitTail tail = DigitTail::random);

//! local_stats at x_i ~ mu for seeds i = 0..n_seeds-1.
std::vector<LocalStats> local_stats_seeds(SystemSpec const& system,
                                          MeasureSpec const& measure,
                                          SpaceSpec const& space,
                                          std::span<double const> r_grid,
                                          std::int64_t cap,
                                          std::size_t n_seeds,
                                          RunOptions const& options);

//---------------------------------------------------------------------------//
struct BoshStat
{
    double alpha = 0;
    std::vector<std::int64_t> checkpoints;  //!< powers of two, then n_max
    std::vector<double> running_min;        //!< min_{k<=n} k^{1/alpha} d(T^k x, x)
    double final_value = 0;
};

BoshStat boshernitzan_stat(SystemSpec const& system,
                           SpaceSpec const& space,
                           Point const& x,
                           double alpha,
                           std::int64_t n_max,
                           RngStream stream,
                           DigitTail tail = DigitTail::random);

std::vector<BoshStat> boshernitzan_seeds(SystemSpec const& system,
                                         MeasureSpec const& measure,
                                         SpaceSpec const& space,
                                         double alpha,
                                         std::int64_t n_max,
                                         std::size_t n_seeds,
                                         RunOptions const& options);

}  // namespace reclab
