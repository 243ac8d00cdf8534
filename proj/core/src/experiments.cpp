#include "reclab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reclab/fit.hpp"
#include "reclab/parallel.hpp"

namespace reclab
{
namespace
{
constexpr std::size_t chunk_size = 4096;

struct Start
{
    Point x;
    RngStream stream;
};

Start draw_start(MeasureSpec const& measure,
                 SpaceSpec const& space,
                 std::uint64_t master_seed,
                 std::size_t index)
{
    RngStream stream = make_stream(master_seed, StreamRole::seed_points, index);
    Point x = sample_measure(measure, space, stream);
    return {x, stream};
}

void check_inputs(SystemSpec const& system,
                  MeasureSpec const& measure,
                  SpaceSpec const& space)
{
    system.check_space(space);
    measure.check_space(space);
}

// Exact when every value is equal, plain index-order sum otherwise.
double stable_mean(std::span<double const> v)
{
    if (v.empty())
        return 0;
    if (std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; }))
        return v[0];
    double sum = 0;
    for (double a : v)
        sum += a;
    return sum / static_cast<double>(v.size());
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what)
{
    double v = 0;
    auto const* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        fail(ErrorKind::invalid_input, "bad number '" + std::string(text) + "' in " + std::string(what));
    return v;
}

// Radius r_n(x) for a fixed mass; Lebesgue radii do not depend on x.
double radius_for(MeasureSpec const& measure,
                  SpaceSpec const& space,
                  Point const& x,
                  double mass,
                  double tol)
{
    if (measure.is_lebesgue())
        return invert_radius(measure, space, x, mass, closed_form_tolerance);
    return invert_radius(measure, space, x, mass, tol);
}

void require_in_horizon(TargetSequence const& seq, std::int64_t n)
{
    require(n >= 1 && n <= seq.horizon(),
            "index " + std::to_string(n) + " outside the sequence horizon "
                + std::to_string(seq.horizon()));
}
}  // namespace

//---------------------------------------------------------------------------//
AssumptionRefused::AssumptionRefused(SeqValidation report)
    : Error(ErrorKind::invalid_input,
            "target sequence fails the growth condition ("
                + std::to_string(report.violation_count)
                + " bound violations); pass the override flag to run anyway")
    , report_(std::move(report))
{
}

std::optional<SeqValidation>
check_assumption1(TargetSequence const& seq, RunOptions const& options)
{
    if (options.override_assumption1)
        return std::nullopt;
    SeqValidation report = validate_target_sequence(seq,
                                                    options.assumption1_n_min,
                                                    options.alpha_grid,
                                                    options.assumption1_epsilon);
    if (report.verdict == Verdict::fail)
        throw AssumptionRefused(std::move(report));
    return report;
}

//---------------------------------------------------------------------------//
double SbcResult::ratio(std::size_t seed, std::size_t j) const
{
    if (cum_mass[j] <= 0)
        return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(hits[seed][j]) / cum_mass[j];
}

SbcResult run_sbc(SystemSpec const& system,
                  MeasureSpec const& measure,
                  SpaceSpec const& space,
                  TargetSequence const& seq,
                  std::int64_t n_max,
                  std::size_t n_seeds,
                  SbcOptions const& options)
{
    check_inputs(system, measure, space);
    require_in_horizon(seq, n_max);
    require(n_seeds >= 1, "run_sbc needs at least one seed");
    if (options.fixed_center)
    {
        require(options.fixed_center->dimension() == space.dimension(),
                "fixed center dimension does not match the space");
    }

    SbcResult out;
    out.non_mixing = !system.is_mixing();
    out.fixed_center = options.fixed_center.has_value();
    out.assumption1_overridden = options.override_assumption1;

    for (auto c : options.checkpoints)
    {
        if (c >= 1 && c < n_max)
            out.checkpoints.push_back(c);
    }
    out.checkpoints.push_back(n_max);
    std::sort(out.checkpoints.begin(), out.checkpoints.end());
    out.checkpoints.erase(std::unique(out.checkpoints.begin(), out.checkpoints.end()),
                          out.checkpoints.end());

    std::vector<double> masses(static_cast<std::size_t>(n_max) + 1, 0.0);
    double running = 0;
    std::size_t next = 0;
    for (std::int64_t k = 1; k <= n_max; ++k)
    {
        masses[k] = seq.value(k);
        running += masses[k];
        if (k == out.checkpoints[next])
        {
            out.cum_mass.push_back(running);
            ++next;
        }
    }
    if (running <= 0)
        fail(ErrorKind::degenerate, "degenerate mass: target masses sum to 0");

    out.validation = check_assumption1(seq, options);

    // Lebesgue radii are shared by every seed.
    std::vector<double> shared_radii;
    if (measure.is_lebesgue())
    {
        Point const any(space.dimension());
        shared_radii.resize(masses.size(), 0.0);
        for (std::int64_t k = 1; k <= n_max; ++k)
        {
            shared_radii[k] = invert_radius(measure, space, any, masses[k],
                                            closed_form_tolerance);
        }
    }

    out.hits.assign(n_seeds, {});
    parallel_for(n_seeds, options.workers, [&](std::size_t i) {
        Start s = draw_start(measure, space, options.master_seed, i);
        Point const center = options.fixed_center ? *options.fixed_center : s.x;
        std::optional<RadiusCursor> cursor;
        if (shared_radii.empty())
            cursor.emplace(measure, space, center, options.tolerance);

        OrbitState state(system, s.x, s.stream);
        std::vector<std::int64_t> series;
        series.reserve(out.checkpoints.size());
        std::int64_t hits = 0;
        std::size_t cp = 0;
        for (std::int64_t k = 1; k <= n_max; ++k)
        {
            step(system, state);
            double const r = cursor ? (*cursor)(masses[k]) : shared_radii[k];
            if (distance_unchecked(space, state.current(), center) < r)
                ++hits;
            if (k == out.checkpoints[cp])
            {
                series.push_back(hits);
                ++cp;
            }
        }
        out.hits[i] = std::move(series);
    });

    std::size_t const last = out.checkpoints.size() - 1;
    for (std::size_t i = 0; i < n_seeds; ++i)
        out.final_ratio.push_back(out.ratio(i, last));
    out.mean_ratio = mean(out.final_ratio);
    out.sd_ratio = stddev(out.final_ratio);
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95})
        out.quantiles[q] = quantile(out.final_ratio, q);
    return out;
}

//---------------------------------------------------------------------------//
EnEstimate estimate_E_measure(SystemSpec const& system,
                              MeasureSpec const& measure,
                              SpaceSpec const& space,
                              TargetSequence const& seq,
                              std::int64_t n,
                              std::size_t n_samples,
                              RunOptions const& options)
{
    check_inputs(system, measure, space);
    require_in_horizon(seq, n);
    require(n_samples >= 1000, "estimate_E_measure needs at least 1000 samples");
    check_assumption1(seq, options);

    double const mass = seq.value(n);
    std::size_t const chunks = (n_samples + chunk_size - 1) / chunk_size;
    std::vector<std::size_t> chunk_hits(chunks, 0);
    parallel_for(chunks, options.workers, [&](std::size_t c) {
        std::size_t const end = std::min(n_samples, (c + 1) * chunk_size);
        std::size_t hits = 0;
        for (std::size_t i = c * chunk_size; i < end; ++i)
        {
            Start s = draw_start(measure, space, options.master_seed, i);
            double const r = radius_for(measure, space, s.x, mass, options.tolerance);
            OrbitState state(system, s.x, s.stream);
            for (std::int64_t k = 0; k < n; ++k)
                step(system, state);
            if (distance_unchecked(space, state.current(), s.x) < r)
                ++hits;
        }
        chunk_hits[c] = hits;
    });

    EnEstimate out;
    out.n = n;
    out.samples = n_samples;
    for (auto h : chunk_hits)
        out.hits += h;
    auto const total = static_cast<double>(n_samples);
    out.mu_hat = static_cast<double>(out.hits) / total;
    out.std_error = std::sqrt(out.mu_hat * (1 - out.mu_hat) / total);
    out.target = mass;
    out.deviation = out.mu_hat - mass;
    return out;
}

PairEstimate estimate_E_pair(SystemSpec const& system,
                             MeasureSpec const& measure,
                             SpaceSpec const& space,
                             TargetSequence const& seq,
                             std::int64_t n,
                             std::int64_t m,
                             std::size_t n_samples,
                             RunOptions const& options)
{
    check_inputs(system, measure, space);
    require(n >= 1 && m >= 1, "estimate_E_pair needs n, m >= 1");
    require_in_horizon(seq, n + m);
    require(n_samples >= 1000, "estimate_E_pair needs at least 1000 samples");
    check_assumption1(seq, options);

    double const mass_n = seq.value(n);
    double const mass_nm = seq.value(n + m);
    struct Counts
    {
        std::size_t a = 0, b = 0, ab = 0;
    };
    std::size_t const chunks = (n_samples + chunk_size - 1) / chunk_size;
    std::vector<Counts> counts(chunks);
    parallel_for(chunks, options.workers, [&](std::size_t c) {
        std::size_t const end = std::min(n_samples, (c + 1) * chunk_size);
        Counts local;
        for (std::size_t i = c * chunk_size; i < end; ++i)
        {
            Start s = draw_start(measure, space, options.master_seed, i);
            double const rn = radius_for(measure, space, s.x, mass_n, options.tolerance);
            double const rnm
                = radius_for(measure, space, s.x, mass_nm, options.tolerance);
            OrbitState state(system, s.x, s.stream);
            for (std::int64_t k = 0; k < n; ++k)
                step(system, state);
            bool const a = distance_unchecked(space, state.current(), s.x) < rn;
            for (std::int64_t k = 0; k < m; ++k)
                step(system, state);
            bool const b = distance_unchecked(space, state.current(), s.x) < rnm;
            local.a += a;
            local.b += b;
            local.ab += a && b;
        }
        counts[c] = local;
    });

    Counts total;
    for (auto const& c : counts)
    {
        total.a += c.a;
        total.b += c.b;
        total.ab += c.ab;
    }
    auto const ns = static_cast<double>(n_samples);
    PairEstimate out;
    out.n = n;
    out.m = m;
    out.samples = n_samples;
    out.joint = static_cast<double>(total.ab) / ns;
    out.marginal_n = static_cast<double>(total.a) / ns;
    out.marginal_nm = static_cast<double>(total.b) / ns;
    out.product = out.marginal_n * out.marginal_nm;
    out.slack = out.joint - out.product;
    out.se_joint = std::sqrt(out.joint * (1 - out.joint) / ns);
    double const var_n = out.marginal_n * (1 - out.marginal_n) / ns;
    double const var_nm = out.marginal_nm * (1 - out.marginal_nm) / ns;
    out.se_product = std::sqrt(out.marginal_nm * out.marginal_nm * var_n
                               + out.marginal_n * out.marginal_n * var_nm);
    out.target_product = mass_nm * mass_n;
    out.target_slack = out.joint - out.target_product;
    if (m <= seq.horizon())
    {
        out.target_product_nm = mass_n * seq.value(m);
        out.target_slack_nm = out.joint - out.target_product_nm;
    }
    return out;
}

//---------------------------------------------------------------------------//
Observable Observable::parse(std::string_view text, SpaceSpec const& space)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true)
    {
        auto const colon = text.find(':', pos);
        parts.push_back(text.substr(pos, colon - pos));
        if (colon == std::string_view::npos)
            break;
        pos = colon + 1;
    }
    Observable o;
    auto const& head = parts[0];
    if (head == "cos" || head == "sin")
    {
        require(parts.size() == 2, "observable '" + std::string(text) + "' needs one frequency");
        double const k = parse_double(parts[1], "observable frequency");
        require(k >= 1 && k == std::floor(k) && k < 1e6,
                "observable frequency must be a positive integer");
        o.kind = head == "cos" ? ObservableKind::cosine : ObservableKind::sine;
        o.frequency = static_cast<int>(k);
    }
    else if (head == "dist")
    {
        require(static_cast<int>(parts.size()) == space.dimension() + 1,
                "observable '" + std::string(text) + "' needs one coordinate per axis");
        std::vector<double> coords;
        for (std::size_t i = 1; i < parts.size(); ++i)
            coords.push_back(parse_double(parts[i], "observable anchor"));
        o.kind = ObservableKind::distance;
        o.anchor = Point::from_reals(coords);
    }
    else if (head == "const")
    {
        require(parts.size() == 2, "observable '" + std::string(text) + "' needs one value");
        o.kind = ObservableKind::constant;
        o.value = parse_double(parts[1], "observable constant");
        require(std::isfinite(o.value), "observable constant must be finite");
    }
    else
    {
        fail(ErrorKind::invalid_input, "unknown observable '" + std::string(text) + "'");
    }
    return o;
}

std::string Observable::to_string() const
{
    switch (kind)
    {
        case ObservableKind::cosine:
            return "cos:" + std::to_string(frequency);
        case ObservableKind::sine:
            return "sin:" + std::to_string(frequency);
        case ObservableKind::distance: {
            std::string s = "dist";
            for (int a = 0; a < anchor.dimension(); ++a)
                s += ":" + format_double(anchor.real(a));
            return s;
        }
        case ObservableKind::constant:
            return "const:" + format_double(value);
    }
    return "?";
}

double Observable::operator()(SpaceSpec const& space, Point const& x) const
{
    constexpr double two_pi = 2 * std::numbers::pi;
    switch (kind)
    {
        case ObservableKind::cosine:
            return std::cos(two_pi * frequency * x.real(0));
        case ObservableKind::sine:
            return std::sin(two_pi * frequency * x.real(0));
        case ObservableKind::distance:
            return distance_unchecked(space, x, anchor);
        case ObservableKind::constant:
            return value;
    }
    return 0;
}

double Observable::holder_norm(SpaceSpec const& space) const
{
    switch (kind)
    {
        case ObservableKind::cosine:
        case ObservableKind::sine:
            return 1 + 2 * std::numbers::pi * frequency;
        case ObservableKind::distance:
            return space.diameter() + 1;
        case ObservableKind::constant:
            return std::abs(value);
    }
    return 0;
}

std::string_view to_string(DecayStatus s)
{
    switch (s)
    {
        case DecayStatus::fitted:
            return "fitted";
        case DecayStatus::no_decay:
            return "no_decay";
        case DecayStatus::below_floor:
            return "below_floor";
    }
    return "?";
}

DecayEstimate estimate_correlation_decay(SystemSpec const& system,
                                         MeasureSpec const& measure,
                                         SpaceSpec const& space,
                                         std::vector<Observable> observables,
                                         std::span<std::int64_t const> gaps,
                                         std::size_t n_samples,
                                         RunOptions const& options)
{
    check_inputs(system, measure, space);
    require(observables.size() == 2 || observables.size() == 3,
            "correlation decay needs 2 or 3 observables");
    require(!gaps.empty(), "correlation decay needs at least one gap");
    require(gaps.front() >= 1, "gaps must be positive");
    for (std::size_t i = 1; i < gaps.size(); ++i)
        require(gaps[i] > gaps[i - 1], "gaps must be strictly increasing");
    require(n_samples >= 2, "correlation decay needs at least 2 samples");
    for (auto const& o : observables)
    {
        if (o.kind == ObservableKind::distance)
        {
            require(o.anchor.dimension() == space.dimension(),
                    "observable anchor dimension does not match the space");
        }
    }

    bool const triple = observables.size() == 3;
    std::size_t const g = gaps.size();
    std::vector<std::int64_t> times(gaps.begin(), gaps.end());
    if (triple)
    {
        for (auto gap : gaps)
            times.push_back(2 * gap);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
    }
    auto time_index = [&](std::int64_t t) {
        return static_cast<std::size_t>(
            std::lower_bound(times.begin(), times.end(), t) - times.begin());
    };

    // values[0][i] = phi(x_i); second[j][i] = psi(T^{g_j} x_i); third likewise
    std::vector<double> first(n_samples);
    std::vector<std::vector<double>> second(g, std::vector<double>(n_samples));
    std::vector<std::vector<double>> third(triple ? g : 0,
                                           std::vector<double>(n_samples));
    std::size_t const chunks = (n_samples + chunk_size - 1) / chunk_size;
    parallel_for(chunks, options.workers, [&](std::size_t c) {
        std::size_t const end = std::min(n_samples, (c + 1) * chunk_size);
        std::vector<double> psi(times.size()), chi(times.size());
        for (std::size_t i = c * chunk_size; i < end; ++i)
        {
            Start s = draw_start(measure, space, options.master_seed, i);
            first[i] = observables[0](space, s.x);
            OrbitState state(system, s.x, s.stream);
            std::int64_t k = 0;
            for (std::size_t t = 0; t < times.size(); ++t)
            {
                for (; k < times[t]; ++k)
                    step(system, state);
                psi[t] = observables[1](space, state.current());
                if (triple)
                    chi[t] = observables[2](space, state.current());
            }
            for (std::size_t j = 0; j < g; ++j)
            {
                second[j][i] = psi[time_index(gaps[j])];
                if (triple)
                    third[j][i] = chi[time_index(2 * gaps[j])];
            }
        }
    });

    DecayEstimate out;
    out.observables = std::move(observables);
    for (auto const& o : out.observables)
        out.holder_norms.push_back(o.holder_norm(space));
    out.gaps.assign(gaps.begin(), gaps.end());
    out.samples = n_samples;
    auto const ns = static_cast<double>(n_samples);
    out.noise_floor = 4 / std::sqrt(ns);

    double const mean_first = stable_mean(first);
    std::vector<double> prod(n_samples);
    for (std::size_t j = 0; j < g; ++j)
    {
        double const mean_second = stable_mean(second[j]);
        double corr = 0;
        if (!triple)
        {
            for (std::size_t i = 0; i < n_samples; ++i)
                prod[i] = (first[i] - mean_first) * (second[j][i] - mean_second);
            corr = stable_mean(prod);
        }
        else
        {
            double const mean_third = stable_mean(third[j]);
            for (std::size_t i = 0; i < n_samples; ++i)
                prod[i] = first[i] * second[j][i] * third[j][i];
            corr = stable_mean(prod) - mean_first * mean_second * mean_third;
        }
        out.correlation.push_back(corr);
        out.used_in_fit.push_back(std::abs(corr) > out.noise_floor);
    }

    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < g; ++j)
    {
        if (out.used_in_fit[j])
        {
            xs.push_back(static_cast<double>(out.gaps[j]));
            ys.push_back(std::log(std::abs(out.correlation[j])));
        }
    }
    if (xs.size() < 3)
    {
        out.status = DecayStatus::below_floor;
        return out;
    }
    LinearFit const fit = least_squares(xs, ys);
    out.slope = fit.slope;
    out.slope_se = fit.slope_se;
    if (fit.slope >= -2 * fit.slope_se)
    {
        out.status = DecayStatus::no_decay;
        out.tau_hat = std::max(0.0, -fit.slope);
        return out;
    }
    out.status = DecayStatus::fitted;
    out.tau_hat = -fit.slope;
    double log_c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
        log_c = std::max(log_c, ys[i] + *out.tau_hat * xs[i]);
    out.c_hat = std::exp(log_c);
    return out;
}

//---------------------------------------------------------------------------//
ReturnTime return_time(SystemSpec const& system,
                       SpaceSpec const& space,
                       Point const& x,
                       double r,
                       std::int64_t cap,
                       RngStream stream,
                       DigitTail tail)
{
    require(r > 0, "return radius must be positive");
    require(cap >= 1, "return cap must be at least 1");
    system.check_space(space);
    require(x.dimension() == space.dimension(), "point dimension does not match the space");
    OrbitState state(system, x, stream, tail);
    for (std::int64_t k = 1; k <= cap; ++k)
    {
        step(system, state);
        if (distance_unchecked(space, state.current(), x) < r)
            return {k, false};
    }
    return {cap, true};
}

LocalStats local_stats(SystemSpec const& system,
                       MeasureSpec const& measure,
                       SpaceSpec const& space,
                       Point const& x,
                       std::span<double const> r_grid,
                       std::int64_t cap,
                       RngStream stream,
                       DigitTail tail)
{
    check_inputs(system, measure, space);
    require(!r_grid.empty(), "radius grid must not be empty");
    require(cap >= 1, "return cap must be at least 1");
    for (std::size_t i = 0; i < r_grid.size(); ++i)
    {
        require(r_grid[i] > 0, "radii must be positive");
        if (i > 0)
            require(r_grid[i] < r_grid[i - 1], "radius grid must be descending");
    }

    LocalStats out;
    out.center = x;
    out.radii.assign(r_grid.begin(), r_grid.end());
    std::size_t const n = r_grid.size();
    for (double r : r_grid)
        out.mu_ball.push_back(ball_measure(measure, space, x, r));
    out.tau.assign(n, cap);
    out.censored.assign(n, true);

    // Return times grow as r shrinks, so one orbit resolves radii in order.
    OrbitState state(system, x, stream, tail);
    std::size_t resolved = 0;
    for (std::int64_t k = 1; k <= cap && resolved < n; ++k)
    {
        step(system, state);
        double const d = distance_unchecked(space, state.current(), x);
        while (resolved < n && d < r_grid[resolved])
        {
            out.tau[resolved] = k;
            out.censored[resolved] = false;
            ++resolved;
        }
    }

    std::vector<double> lr, lmu, lr_tau, ltau;
    for (std::size_t i = 0; i < n; ++i)
    {
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (out.mu_ball[i] > 0)
        {
            lr.push_back(std::log(r_grid[i]));
            lmu.push_back(std::log(out.mu_ball[i]));
        }
        if (!out.censored[i])
        {
            out.usable = true;
            lr_tau.push_back(-std::log(r_grid[i]));
            ltau.push_back(std::log(static_cast<double>(out.tau[i])));
            if (out.mu_ball[i] > 0 && out.mu_ball[i] < 1)
                ratio = ltau.back() / -std::log(out.mu_ball[i]);
        }
        out.recurrence_ratio.push_back(ratio);
    }

    auto pair_range = [](std::vector<double> const& xs,
                         std::vector<double> const& ys,
                         std::optional<double>& lo,
                         std::optional<double>& hi) {
        for (std::size_t i = 1; i < xs.size(); ++i)
        {
            double const s = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            lo = lo ? std::min(*lo, s) : s;
            hi = hi ? std::max(*hi, s) : s;
        }
    };
    pair_range(lr, lmu, out.d_lower, out.d_upper);
    pair_range(lr_tau, ltau, out.r_lower, out.r_upper);
    if (lr.size() >= 2)
        out.d_slope = least_squares(lr, lmu).slope;
    if (lr_tau.size() >= 2)
        out.r_slope = least_squares(lr_tau, ltau).slope;
    return out;
}

std::vector<LocalStats> local_stats_seeds(SystemSpec const& system,
                                          MeasureSpec const& measure,
                                          SpaceSpec const& space,
                                          std::span<double const> r_grid,
                                          std::int64_t cap,
                                          std::size_t n_seeds,
                                          RunOptions const& options)
{
    check_inputs(system, measure, space);
    require(n_seeds >= 1, "local statistics need at least one seed");
    std::vector<LocalStats> out(n_seeds);
    parallel_for(n_seeds, options.workers, [&](std::size_t i) {
        Start s = draw_start(measure, space, options.master_seed, i);
        out[i] = local_stats(system, measure, space, s.x, r_grid, cap, s.stream);
    });
    return out;
}

//---------------------------------------------------------------------------//
BoshStat boshernitzan_stat(SystemSpec const& system,
                           SpaceSpec const& space,
                           Point const& x,
                           double alpha,
                           std::int64_t n_max,
                           RngStream stream,
                           DigitTail tail)
{
    require(alpha > 0 && std::isfinite(alpha), "alpha must be positive");
    require(n_max >= 1, "n_max must be at least 1");
    system.check_space(space);
    require(x.dimension() == space.dimension(), "point dimension does not match the space");

    BoshStat out;
    out.alpha = alpha;
    double const power = 1 / alpha;
    OrbitState state(system, x, stream, tail);
    double running = std::numeric_limits<double>::infinity();
    std::int64_t next_checkpoint = 1;
    for (std::int64_t k = 1; k <= n_max; ++k)
    {
        step(system, state);
        double const d = distance_unchecked(space, state.current(), x);
        if (d < running)
        {
            auto const kk = static_cast<double>(k);
            double const scale = power == 1 ? kk : std::pow(kk, power);
            running = std::min(running, scale * d);
        }
        if (k == next_checkpoint || k == n_max)
        {
            out.checkpoints.push_back(k);
            out.running_min.push_back(running);
            if (k == next_checkpoint)
                next_checkpoint *= 2;
        }
    }
    out.final_value = running;
    return out;
}

std::vector<BoshStat> boshernitzan_seeds(SystemSpec const& system,
                                         MeasureSpec const& measure,
                                         SpaceSpec const& space,
                                         double alpha,
                                         std::int64_t n_max,
                                         std::size_t n_seeds,
                                         RunOptions const& options)
{
    check_inputs(system, measure, space);
    require(n_seeds >= 1, "boshernitzan statistics need at least one seed");
    std::vector<BoshStat> out(n_seeds);
    parallel_for(n_seeds, options.workers, [&](std::size_t i) {
        Start s = draw_start(measure, space, options.master_seed, i);
        out[i] = boshernitzan_stat(system, space, s.x, alpha, n_max, s.stream);
    });
    return out;
}

}  // namespace reclab
