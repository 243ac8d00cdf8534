#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "reclab/error.hpp"
#include "reclab/experiments.hpp"
#include "reclab/fit.hpp"

using namespace reclab;

namespace
{
RunOptions overridden(std::uint64_t seed = 1, unsigned workers = 1)
{
    RunOptions o;
    o.master_seed = seed;
    o.workers = workers;
    o.override_assumption1 = true;
    return o;
}

SbcOptions sbc_overridden(std::uint64_t seed = 1, unsigned workers = 1)
{
    SbcOptions o;
    static_cast<RunOptions&>(o) = overridden(seed, workers);
    return o;
}

double golden()
{
    return (std::sqrt(5.0) - 1) / 2;
}

double circle_norm(long double v)
{
    v -= std::floor(v);
    return static_cast<double>(std::min(v, 1 - v));
}
}  // namespace

TEST(Sbc, IdentityHitsEveryStep)
{
    auto seq = TargetSequence::power(1, 0.5, 1000);
    auto opts = sbc_overridden();
    opts.checkpoints = {10, 100};
    auto res = run_sbc(SystemSpec::identity(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq,
                       1000, 5, opts);
    EXPECT_TRUE(res.non_mixing);
    EXPECT_EQ(res.checkpoints, (std::vector<std::int64_t>{10, 100, 1000}));
    double cum = 0;
    for (int k = 1; k <= 1000; ++k)
        cum += std::pow(k, -0.5);
    for (std::size_t i = 0; i < 5; ++i)
    {
        EXPECT_EQ(res.hits[i], (std::vector<std::int64_t>{10, 100, 1000}));
        EXPECT_NEAR(res.final_ratio[i], 1000 / cum, 1e-9);
    }
    EXPECT_NEAR(res.cum_mass.back(), cum, 1e-9);
}

TEST(Sbc, ZeroMassIsDegenerate)
{
    auto seq = TargetSequence::explicit_values(std::vector<double>(50, 0.0));
    try
    {
        run_sbc(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq, 50, 3,
                sbc_overridden());
        FAIL();
    }
    catch (Error const& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate);
        EXPECT_NE(std::string(e.what()).find("degenerate mass"), std::string::npos);
    }
}

TEST(Sbc, ZeroEarlyMassGivesNanRatio)
{
    std::vector<double> v(20, 0.0);
    v[15] = 0.5;
    auto seq = TargetSequence::explicit_values(v);
    auto opts = sbc_overridden();
    opts.checkpoints = {5};
    auto res = run_sbc(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq,
                       20, 2, opts);
    EXPECT_TRUE(std::isnan(res.ratio(0, 0)));
    EXPECT_FALSE(std::isnan(res.ratio(0, 1)));
}

TEST(Sbc, FailingSequenceRefusedUnlessOverridden)
{
    auto seq = TargetSequence::power(1, 1, 1000);
    SbcOptions opts;
    try
    {
        run_sbc(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq, 1000,
                2, opts);
        FAIL();
    }
    catch (AssumptionRefused const& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
        EXPECT_EQ(e.report().verdict, Verdict::fail);
        EXPECT_FALSE(e.report().bound_violations.empty());
    }
    opts.override_assumption1 = true;
    auto res = run_sbc(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq,
                       1000, 2, opts);
    EXPECT_TRUE(res.assumption1_overridden);
    EXPECT_FALSE(res.validation.has_value());
}

TEST(Sbc, InconclusiveSequenceRuns)
{
    auto seq = TargetSequence::log_power(1, 5, 20);
    auto res = run_sbc(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq,
                       20, 2, SbcOptions{});
    ASSERT_TRUE(res.validation.has_value());
    EXPECT_EQ(res.validation->verdict, Verdict::inconclusive);
}

TEST(Sbc, SeriesNondecreasingAndBounded)
{
    auto seq = TargetSequence::power(1, 0.5, 5000);
    auto opts = sbc_overridden(3);
    opts.checkpoints = {1, 2, 5, 10, 50, 100, 500, 1000};
    auto res = run_sbc(SystemSpec::cat_map(), MeasureSpec::lebesgue(), SpaceSpec::torus(2), seq,
                       5000, 20, opts);
    for (auto const& series : res.hits)
    {
        for (std::size_t j = 0; j < series.size(); ++j)
        {
            EXPECT_LE(series[j], res.checkpoints[j]);
            if (j > 0)
                EXPECT_GE(series[j], series[j - 1]);
        }
    }
    EXPECT_NEAR(res.quantiles.at(0.5), quantile(res.final_ratio, 0.5), 0);
    EXPECT_NEAR(res.mean_ratio, mean(res.final_ratio), 1e-15);
}

TEST(Sbc, WorkerCountDoesNotMatter)
{
    auto seq = TargetSequence::power(1, 0.7, 3000);
    auto m = MeasureSpec::grid_density(1, 4, {1.5, 0.5, 1, 1});
    auto o1 = sbc_overridden(9, 1);
    auto o8 = sbc_overridden(9, 8);
    o1.checkpoints = o8.checkpoints = {100, 1000};
    auto a = run_sbc(SystemSpec::shift_map(), m, SpaceSpec::circle(), seq, 3000, 37, o1);
    auto b = run_sbc(SystemSpec::shift_map(), m, SpaceSpec::circle(), seq, 3000, 37, o8);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.mean_ratio, b.mean_ratio);
}

TEST(Sbc, FixedCenterAgainstDirectCount)
{
    // identity keeps x, so the shrinking-target count is a function of d(x, c)
    auto seq = TargetSequence::power(1, 0.5, 400);
    auto opts = sbc_overridden(4);
    Point const c = Point::from_reals({0.5});
    opts.fixed_center = c;
    auto res = run_sbc(SystemSpec::identity(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq,
                       400, 50, opts);
    EXPECT_TRUE(res.fixed_center);
    for (std::size_t i = 0; i < 50; ++i)
    {
        RngStream s = make_stream(4, StreamRole::seed_points, i);
        Point x = sample_measure(MeasureSpec::lebesgue(), SpaceSpec::circle(), s);
        double const d = distance(SpaceSpec::circle(), x, c);
        std::int64_t expected = 0;
        for (int k = 1; k <= 400; ++k)
            expected += d < seq.value(k) / 2;
        EXPECT_EQ(res.hits[i].back(), expected) << i;
    }
}

TEST(EnMeasure, IdentityControl)
{
    auto seq = TargetSequence::explicit_values(std::vector<double>(5, 0.1));
    auto est = estimate_E_measure(SystemSpec::identity(), MeasureSpec::lebesgue(),
                                  SpaceSpec::circle(), seq, 3, 2000, overridden());
    EXPECT_EQ(est.mu_hat, 1.0);
    EXPECT_NEAR(est.deviation, 0.9, 1e-15);
    EXPECT_EQ(est.std_error, 0.0);
}

TEST(EnMeasure, ShiftFirstStepOracle)
{
    // d(2x, x) = ||x||, so E_1 = {||x|| < 1/4} has Lebesgue measure 1/2
    auto seq = TargetSequence::explicit_values({0.5, 0.5});
    auto est = estimate_E_measure(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                  SpaceSpec::circle(), seq, 1, 200000, overridden(5));
    EXPECT_EQ(est.mu_hat, static_cast<double>(est.hits) / est.samples);
    EXPECT_NEAR(est.std_error, std::sqrt(est.mu_hat * (1 - est.mu_hat) / est.samples), 1e-15);
    EXPECT_NEAR(est.mu_hat, 0.5, 4 * est.std_error);
}

TEST(EnMeasure, ShiftSecondStepOracle)
{
    // d(4x, x) = ||3x||; {||3x|| < 0.1} has measure 0.2
    auto seq = TargetSequence::explicit_values({0.2, 0.2});
    auto est = estimate_E_measure(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                  SpaceSpec::circle(), seq, 2, 200000, overridden(6));
    EXPECT_NEAR(est.mu_hat, 0.2, 4 * est.std_error);
}

TEST(EnMeasure, MatchesSbcIncrements)
{
    auto seq = TargetSequence::power(1, 0.5, 100);
    std::int64_t const n = 7;
    std::size_t const seeds = 1000;
    auto opts = sbc_overridden(11, 4);
    opts.checkpoints = {n - 1, n};
    auto res = run_sbc(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(), seq,
                       n, seeds, opts);
    std::size_t hits = 0;
    for (auto const& s : res.hits)
        hits += static_cast<std::size_t>(s[1] - s[0]);
    auto est = estimate_E_measure(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                  SpaceSpec::circle(), seq, n, seeds, overridden(11, 3));
    EXPECT_EQ(est.hits, hits);
}

TEST(EnMeasure, Rejections)
{
    auto seq = TargetSequence::power(1, 0.5, 100);
    EXPECT_THROW(estimate_E_measure(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                    SpaceSpec::circle(), seq, 5, 999, overridden()),
                 Error);
    EXPECT_THROW(estimate_E_measure(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                    SpaceSpec::circle(), seq, 101, 1000, overridden()),
                 Error);
    EXPECT_THROW(estimate_E_measure(SystemSpec::cat_map(), MeasureSpec::lebesgue(),
                                    SpaceSpec::circle(), seq, 5, 1000, overridden()),
                 Error);
}

TEST(Pair, IdentityControl)
{
    auto seq = TargetSequence::explicit_values(std::vector<double>(10, 0.3));
    auto p = estimate_E_pair(SystemSpec::identity(), MeasureSpec::lebesgue(), SpaceSpec::circle(),
                             seq, 2, 3, 1000, overridden());
    EXPECT_EQ(p.joint, 1.0);
    EXPECT_EQ(p.product, 1.0);
    EXPECT_EQ(p.slack, 0.0);
    EXPECT_NEAR(p.target_product, 0.09, 1e-15);
    EXPECT_NEAR(p.target_product_nm, 0.09, 1e-15);
}

TEST(Pair, ZeroMassEvents)
{
    std::vector<double> v(10, 0.0);
    v[0] = 0.5;
    auto seq = TargetSequence::explicit_values(v);
    auto p = estimate_E_pair(SystemSpec::shift_map(), MeasureSpec::lebesgue(), SpaceSpec::circle(),
                             seq, 2, 3, 1000, overridden());
    EXPECT_EQ(p.joint, 0.0);
    EXPECT_EQ(p.product, 0.0);
}

TEST(Pair, JointNeverExceedsMarginals)
{
    auto seq = TargetSequence::explicit_values(std::vector<double>(40, 0.2));
    for (std::int64_t n : {1, 3, 10})
    {
        auto p = estimate_E_pair(SystemSpec::cat_map(), MeasureSpec::lebesgue(),
                                 SpaceSpec::torus(2), seq, n, n, 20000, overridden(n));
        EXPECT_LE(p.joint, std::min(p.marginal_n, p.marginal_nm));
        EXPECT_NEAR(p.product, p.marginal_n * p.marginal_nm, 1e-15);
        EXPECT_NEAR(p.slack, p.joint - p.product, 1e-15);
    }
    EXPECT_THROW(estimate_E_pair(SystemSpec::cat_map(), MeasureSpec::lebesgue(),
                                 SpaceSpec::torus(2), seq, 30, 20, 1000, overridden()),
                 Error);
}

TEST(Observable, ParseAndPrint)
{
    auto s = SpaceSpec::torus(2);
    for (std::string text : {"cos:3", "sin:1", "dist:0.25:0.5", "const:1.5"})
        EXPECT_EQ(Observable::parse(text, s).to_string(), text);
    EXPECT_THROW(Observable::parse("tan:1", s), Error);
    EXPECT_THROW(Observable::parse("cos:0", s), Error);
    EXPECT_THROW(Observable::parse("cos:1.5", s), Error);
    EXPECT_THROW(Observable::parse("dist:0.5", s), Error);
    EXPECT_THROW(Observable::parse("const:abc", s), Error);
}

TEST(Observable, ValuesAndNorms)
{
    auto s = SpaceSpec::circle();
    Point x = Point::from_reals({0.125});
    auto c = Observable::parse("cos:2", s);
    EXPECT_NEAR(c(s, x), std::cos(2 * std::numbers::pi * 2 * 0.125), 1e-15);
    EXPECT_NEAR(c.holder_norm(s), 1 + 4 * std::numbers::pi, 1e-12);
    auto d = Observable::parse("dist:0.5", s);
    EXPECT_NEAR(d(s, x), 0.375, 1e-15);
    EXPECT_NEAR(d.holder_norm(s), 1.5, 1e-15);
    EXPECT_EQ(Observable::parse("const:-2", s).holder_norm(s), 2.0);
    EXPECT_EQ(c.holder_exponent(), 1.0);
}

TEST(Decay, ShiftCosineBelowFloor)
{
    auto s = SpaceSpec::circle();
    std::vector<Observable> obs{Observable::parse("cos:1", s), Observable::parse("cos:1", s)};
    std::vector<std::int64_t> gaps{1, 2, 3, 4, 6, 8};
    auto est = estimate_correlation_decay(SystemSpec::shift_map(), MeasureSpec::lebesgue(), s, obs,
                                          gaps, 200000, overridden(12));
    EXPECT_NEAR(est.noise_floor, 4 / std::sqrt(200000.0), 1e-15);
    for (double c : est.correlation)
        EXPECT_LT(std::abs(c), est.noise_floor);
    EXPECT_EQ(est.status, DecayStatus::below_floor);
    EXPECT_FALSE(est.tau_hat.has_value());
}

TEST(Decay, ShiftThreeFoldBelowFloor)
{
    // frequencies 1, 2^g, 4^g never cancel, so the triple integral is 0
    auto s = SpaceSpec::circle();
    std::vector<Observable> obs(3, Observable::parse("cos:1", s));
    std::vector<std::int64_t> gaps{1, 2, 3, 5};
    auto est = estimate_correlation_decay(SystemSpec::shift_map(), MeasureSpec::lebesgue(), s, obs,
                                          gaps, 200000, overridden(13));
    for (double c : est.correlation)
        EXPECT_LT(std::abs(c), est.noise_floor);
    EXPECT_EQ(est.status, DecayStatus::below_floor);
}

TEST(Decay, RotationDoesNotDecay)
{
    auto s = SpaceSpec::circle();
    std::vector<Observable> obs{Observable::parse("cos:1", s), Observable::parse("cos:1", s)};
    std::vector<std::int64_t> gaps{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    auto est = estimate_correlation_decay(SystemSpec::rotation(golden()), MeasureSpec::lebesgue(),
                                          s, obs, gaps, 100000, overridden(14, 4));
    for (std::size_t i = 0; i < gaps.size(); ++i)
    {
        double const exact = std::cos(2 * std::numbers::pi * gaps[i] * golden()) / 2;
        EXPECT_NEAR(est.correlation[i], exact, est.noise_floor) << gaps[i];
    }
    EXPECT_EQ(est.status, DecayStatus::no_decay);
    ASSERT_TRUE(est.tau_hat.has_value());
    EXPECT_LT(*est.tau_hat, 0.05);
}

TEST(Decay, ConstantIsExactlyZero)
{
    auto s = SpaceSpec::torus(2);
    std::vector<Observable> obs{Observable::parse("const:2.5", s), Observable::parse("cos:1", s)};
    std::vector<std::int64_t> gaps{1, 2, 3};
    auto est = estimate_correlation_decay(SystemSpec::cat_map(), MeasureSpec::lebesgue(), s, obs,
                                          gaps, 5000, overridden(15));
    for (double c : est.correlation)
        EXPECT_EQ(c, 0.0);
}

TEST(Decay, FitRequiresThreeGaps)
{
    auto s = SpaceSpec::circle();
    std::vector<Observable> obs{Observable::parse("cos:1", s), Observable::parse("cos:1", s)};
    std::vector<std::int64_t> gaps{1, 2};
    auto est = estimate_correlation_decay(SystemSpec::identity(), MeasureSpec::lebesgue(), s, obs,
                                          gaps, 5000, overridden(16));
    // both gaps sit at 1/2, well above the floor, but two gaps are not a fit
    EXPECT_EQ(est.status, DecayStatus::below_floor);
    EXPECT_FALSE(est.tau_hat.has_value());
    std::vector<std::int64_t> bad{2, 1};
    EXPECT_THROW(estimate_correlation_decay(SystemSpec::identity(), MeasureSpec::lebesgue(), s,
                                            obs, bad, 5000, overridden()),
                 Error);
}

TEST(Decay, WorkerCountDoesNotMatter)
{
    auto s = SpaceSpec::torus(2);
    std::vector<Observable> obs{Observable::parse("dist:0.1:0.2", s),
                                Observable::parse("sin:2", s)};
    std::vector<std::int64_t> gaps{1, 2, 4};
    auto a = estimate_correlation_decay(SystemSpec::cat_map(), MeasureSpec::lebesgue(), s, obs,
                                        gaps, 10000, overridden(17, 1));
    auto b = estimate_correlation_decay(SystemSpec::cat_map(), MeasureSpec::lebesgue(), s, obs,
                                        gaps, 10000, overridden(17, 8));
    EXPECT_EQ(a.correlation, b.correlation);
}

TEST(ReturnTime, Examples)
{
    auto origin = return_time(SystemSpec::cat_map(), SpaceSpec::torus(2),
                              Point::from_reals({0, 0}), 1e-9, 10, RngStream(0, 0));
    EXPECT_EQ(origin.steps, 1);
    EXPECT_FALSE(origin.censored);
    std::uint64_t const third[1] = {0x5555555555555555ull};
    auto shift = return_time(SystemSpec::shift_map(), SpaceSpec::circle(), Point(1, third), 0.1,
                             10, RngStream(0, 0), DigitTail::periodic);
    EXPECT_EQ(shift.steps, 2);
    auto rot = return_time(SystemSpec::rotation(0.25), SpaceSpec::circle(),
                           Point::from_reals({0.37}), 0.1, 10, RngStream(0, 0));
    EXPECT_EQ(rot.steps, 4);
    auto cens = return_time(SystemSpec::rotation(0.25), SpaceSpec::circle(),
                            Point::from_reals({0.37}), 0.1, 3, RngStream(0, 0));
    EXPECT_TRUE(cens.censored);
    EXPECT_EQ(cens.steps, 3);
}

TEST(ReturnTime, RotationMatchesBruteForce)
{
    double const a = golden();
    for (double r : {0.1, 0.03, 0.01, 0.003, 0.001})
    {
        std::int64_t k = 1;
        while (circle_norm(static_cast<long double>(k) * a) >= r)
            ++k;
        auto t = return_time(SystemSpec::rotation(a), SpaceSpec::circle(),
                             Point::from_reals({0.2}), r, 100000, RngStream(0, 0));
        EXPECT_EQ(t.steps, k) << r;
    }
}

TEST(LocalStats, RotationOnCircle)
{
    std::vector<double> radii{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
    auto st = local_stats(SystemSpec::rotation(golden()), MeasureSpec::lebesgue(),
                          SpaceSpec::circle(), Point::from_reals({0.3}), radii, 10000000,
                          RngStream(0, 0));
    ASSERT_TRUE(st.usable);
    ASSERT_TRUE(st.d_lower && st.d_upper && st.d_slope);
    EXPECT_NEAR(*st.d_lower, 1, 1e-6);
    EXPECT_NEAR(*st.d_upper, 1, 1e-6);
    EXPECT_NEAR(*st.d_slope, 1, 1e-6);
    // golden rotation returns at Fibonacci times, tau(r) ~ 1/(sqrt5 r)
    ASSERT_TRUE(st.r_slope.has_value());
    EXPECT_NEAR(*st.r_slope, 1, 0.1);
    for (std::size_t i = 0; i < radii.size(); ++i)
    {
        std::int64_t k = 1;
        while (circle_norm(static_cast<long double>(k) * golden()) >= radii[i])
            ++k;
        EXPECT_EQ(st.tau[i], k);
        EXPECT_NEAR(st.mu_ball[i], 2 * radii[i], 1e-15);
        EXPECT_NEAR(st.recurrence_ratio[i], std::log(double(k)) / -std::log(2 * radii[i]),
                    1e-12);
    }
}

TEST(LocalStats, CensoringAndGridChecks)
{
    std::vector<double> radii{0.1, 1e-9};
    auto st = local_stats(SystemSpec::rotation(golden()), MeasureSpec::lebesgue(),
                          SpaceSpec::circle(), Point::from_reals({0.3}), radii, 1000,
                          RngStream(0, 0));
    EXPECT_FALSE(st.censored[0]);
    EXPECT_TRUE(st.censored[1]);
    EXPECT_EQ(st.tau[1], 1000);
    EXPECT_TRUE(std::isnan(st.recurrence_ratio[1]));
    EXPECT_FALSE(st.r_lower.has_value());
    std::vector<double> tiny{1e-12};
    auto none = local_stats(SystemSpec::rotation(golden()), MeasureSpec::lebesgue(),
                            SpaceSpec::circle(), Point::from_reals({0.3}), tiny, 100,
                            RngStream(0, 0));
    EXPECT_FALSE(none.usable);
    std::vector<double> ascending{1e-3, 1e-2};
    EXPECT_THROW(local_stats(SystemSpec::rotation(golden()), MeasureSpec::lebesgue(),
                             SpaceSpec::circle(), Point::from_reals({0.3}), ascending, 100,
                             RngStream(0, 0)),
                 Error);
}

TEST(LocalStats, SeedsAreWorkerIndependent)
{
    std::vector<double> radii{0.05, 0.02, 0.01};
    auto a = local_stats_seeds(SystemSpec::cat_map(), MeasureSpec::lebesgue(), SpaceSpec::torus(2),
                               radii, 100000, 12, overridden(18, 1));
    auto b = local_stats_seeds(SystemSpec::cat_map(), MeasureSpec::lebesgue(), SpaceSpec::torus(2),
                               radii, 100000, 12, overridden(18, 8));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].center, b[i].center);
        EXPECT_EQ(a[i].tau, b[i].tau);
        // cat-map cells are squares of area (2r)^2
        EXPECT_NEAR(*a[i].d_slope, 2, 1e-9);
    }
}

TEST(Boshernitzan, FixedPointIsZero)
{
    auto b = boshernitzan_stat(SystemSpec::cat_map(), SpaceSpec::torus(2), Point::from_reals({0, 0}),
                               2, 100, RngStream(0, 0));
    EXPECT_EQ(b.checkpoints, (std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64, 100}));
    for (double v : b.running_min)
        EXPECT_EQ(v, 0.0);
    EXPECT_EQ(b.final_value, 0.0);
}

TEST(Boshernitzan, RotationAgainstBruteForce)
{
    double const a = golden();
    Point x = Point::from_reals({0.61});
    auto b = boshernitzan_stat(SystemSpec::rotation(a), SpaceSpec::circle(), x, 1, 5000,
                               RngStream(0, 0));
    double run = std::numeric_limits<double>::infinity();
    std::size_t j = 0;
    for (std::int64_t k = 1; k <= 5000; ++k)
    {
        run = std::min(run, static_cast<double>(k) * circle_norm(static_cast<long double>(k) * a));
        if (j < b.checkpoints.size() && k == b.checkpoints[j])
        {
            EXPECT_NEAR(b.running_min[j], run, 1e-9) << k;
            if (j > 0)
                EXPECT_LE(b.running_min[j], b.running_min[j - 1]);
            ++j;
        }
    }
    EXPECT_EQ(j, b.checkpoints.size());
    // three-distance behaviour keeps k ||k a|| near 1/sqrt5
    EXPECT_LT(b.final_value, 1.0);
    EXPECT_GT(b.final_value, 0.3);
}

TEST(Boshernitzan, SeedsAreWorkerIndependent)
{
    auto a = boshernitzan_seeds(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                SpaceSpec::circle(), 1, 10000, 10, overridden(19, 1));
    auto b = boshernitzan_seeds(SystemSpec::shift_map(), MeasureSpec::lebesgue(),
                                SpaceSpec::circle(), 1, 10000, 10, overridden(19, 5));
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].running_min, b[i].running_min);
        EXPECT_TRUE(std::isfinite(a[i].final_value));
    }
    EXPECT_THROW(boshernitzan_stat(SystemSpec::shift_map(), SpaceSpec::circle(),
                                   Point::from_reals({0.1}), 0, 10, RngStream(0, 0)),
                 Error);
}

TEST(Assumption1, CheckHonoursOverride)
{
    auto seq = TargetSequence::power(1, 1, 1000);
    RunOptions o;
    EXPECT_THROW(check_assumption1(seq, o), AssumptionRefused);
    o.override_assumption1 = true;
    EXPECT_FALSE(check_assumption1(seq, o).has_value());
}
