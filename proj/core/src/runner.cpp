#include "reclab/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "reclab/experiments.hpp"
#include "reclab/fit.hpp"
#include "reclab/geometry.hpp"

#ifndef RECLAB_VERSION
#    define RECLAB_VERSION "0.0.0"
#endif

namespace reclab
{
namespace
{
using json = nlohmann::ordered_json;

std::string num(double v)
{
    if (!std::isfinite(v))
        return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json jnum(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

template<class T>
json jopt(std::optional<T> const& v)
{
    if (v)
        return jnum(static_cast<double>(*v));
    return nullptr;
}

//! In-memory CSV built row by row.
class Csv
{
  public:
    explicit Csv(std::initializer_list<std::string_view> header)
    {
        row_begin();
        for (auto h : header)
            cell(std::string(h));
    }

    Csv& row_begin()
    {
        if (!text_.empty())
            text_ += "\r\n";
        first_ = true;
        return *this;
    }

    Csv& cell(std::string const& s)
    {
        if (!first_)
            text_ += ',';
        first_ = false;
        if (s.find_first_of(",\"\r\n") != std::string::npos)
        {
            text_ += '"';
            for (char c : s)
            {
                if (c == '"')
                    text_ += '"';
                text_ += c;
            }
            text_ += '"';
        }
        else
        {
            text_ += s;
        }
        return *this;
    }

    Csv& cell(double v) { return cell(num(v)); }
    Csv& cell(std::int64_t v) { return cell(std::to_string(v)); }
    Csv& cell(std::size_t v) { return cell(std::to_string(v)); }
    Csv& cell(bool v) { return cell(std::string(v ? "true" : "false")); }

    std::string text() const { return text_ + "\r\n"; }

  private:
    std::string text_;
    bool first_ = true;
};

struct Output
{
    std::vector<std::pair<std::string, std::string>> files;  // name, content
    json results = json::object();
};

double median_of(std::vector<double> v)
{
    std::erase_if(v, [](double x) { return !std::isfinite(x); });
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    return quantile(std::move(v), 0.5);
}

json validation_json(SeqValidation const& v)
{
    json table = json::array();
    for (auto const& [alpha, ratio] : v.ratio_table)
        table.push_back({{"alpha", alpha}, {"sup_ratio", jnum(ratio)}});
    json first = json::array();
    for (std::size_t i = 0; i < v.bound_violations.size() && i < 20; ++i)
        first.push_back(v.bound_violations[i]);
    return {{"verdict", std::string(to_string(v.verdict))},
            {"epsilon", v.epsilon},
            {"n_min", v.n_min},
            {"n_max", v.n_max},
            {"violation_count", v.violation_count},
            {"first_violations", first},
            {"ratio_table", table},
            {"ratio_monotone", v.ratio_monotone},
            {"ratio_converging", v.ratio_converging}};
}

RunOptions run_options(ExperimentConfig const& c, unsigned workers)
{
    RunOptions o;
    o.master_seed = c.master_seed;
    o.workers = workers;
    o.override_assumption1 = c.override_assumption1;
    o.assumption1_epsilon = c.assumption1_epsilon;
    o.assumption1_n_min = c.n_min;
    o.alpha_grid = c.alpha_grid;
    return o;
}

//---------------------------------------------------------------------------//
void run_sbc_kind(ExperimentConfig const& c, unsigned workers, Output& out)
{
    SbcOptions opts;
    static_cast<RunOptions&>(opts) = run_options(c, workers);
    std::int64_t const n_max = *c.n_max;
    opts.checkpoints = c.checkpoints;
    if (opts.checkpoints.empty())
    {
        for (std::int64_t p = 10; p < n_max; p *= 10)
            opts.checkpoints.push_back(p);
    }
    if (!c.fixed_center.empty())
        opts.fixed_center = Point::from_reals(c.fixed_center);

    SbcResult const r = run_sbc(c.system(), c.measure(), c.space(), c.targets(),
                                n_max, static_cast<std::size_t>(c.seeds), opts);

    Csv csv{"seed", "n", "S_n", "cum_mass", "ratio"};
    for (std::size_t s = 0; s < r.hits.size(); ++s)
    {
        for (std::size_t j = 0; j < r.checkpoints.size(); ++j)
        {
            csv.row_begin()
                .cell(s)
                .cell(r.checkpoints[j])
                .cell(r.hits[s][j])
                .cell(r.cum_mass[j])
                .cell(r.ratio(s, j));
        }
    }
    out.files.emplace_back("sbc_ratio.csv", csv.text());

    json q = json::object();
    for (auto const& [p, v] : r.quantiles)
        q[num(p)] = jnum(v);
    out.results = {{"n_max", n_max},
                   {"seeds", c.seeds},
                   {"final_cum_mass", r.cum_mass.back()},
                   {"mean_ratio", jnum(r.mean_ratio)},
                   {"sd_ratio", jnum(r.sd_ratio)},
                   {"quantiles", q},
                   {"non_mixing_control", r.non_mixing},
                   {"fixed_center", r.fixed_center},
                   {"assumption1_overridden", r.assumption1_overridden},
                   {"assumption1", r.validation ? validation_json(*r.validation)
                                                : json(nullptr)}};
}

void run_en_kind(ExperimentConfig const& c, unsigned workers, Output& out)
{
    RunOptions const opts = run_options(c, workers);
    auto const seq = c.targets();
    Csv csv{"n", "mu_hat", "se", "M_n", "deviation"};
    json rows = json::array();
    for (auto n : c.n_list)
    {
        EnEstimate const e = estimate_E_measure(c.system(), c.measure(), c.space(), seq,
                                                n, static_cast<std::size_t>(c.samples),
                                                opts);
        csv.row_begin().cell(e.n).cell(e.mu_hat).cell(e.std_error).cell(e.target).cell(
            e.deviation);
        rows.push_back({{"n", e.n},
                        {"hits", e.hits},
                        {"mu_hat", e.mu_hat},
                        {"se", e.std_error},
                        {"M_n", e.target},
                        {"deviation", e.deviation}});
    }
    out.files.emplace_back("en_measure.csv", csv.text());
    out.results = {{"samples", c.samples},
                   {"assumption1_overridden", c.override_assumption1},
                   {"estimates", rows}};
}

void run_pair_kind(ExperimentConfig const& c, unsigned workers, Output& out)
{
    RunOptions const opts = run_options(c, workers);
    auto const seq = c.targets();
    Csv csv{"n", "m", "joint", "product", "slack", "se_joint", "se_product",
            "target_product", "target_slack", "target_product_nm", "target_slack_nm"};
    json rows = json::array();
    for (auto n : c.n_list)
    {
        for (auto m : c.m_list)
        {
            PairEstimate const p = estimate_E_pair(
                c.system(), c.measure(), c.space(), seq, n, m,
                static_cast<std::size_t>(c.samples), opts);
            csv.row_begin()
                .cell(p.n)
                .cell(p.m)
                .cell(p.joint)
                .cell(p.product)
                .cell(p.slack)
                .cell(p.se_joint)
                .cell(p.se_product)
                .cell(p.target_product)
                .cell(p.target_slack)
                .cell(p.target_product_nm)
                .cell(p.target_slack_nm);
            rows.push_back({{"n", p.n},
                            {"m", p.m},
                            {"joint", p.joint},
                            {"marginal_n", p.marginal_n},
                            {"marginal_n_plus_m", p.marginal_nm},
                            {"product", p.product},
                            {"slack", p.slack},
                            {"se_joint", p.se_joint},
                            {"se_product", p.se_product}});
        }
    }
    out.files.emplace_back("pairs.csv", csv.text());
    out.results = {{"samples", c.samples},
                   {"assumption1_overridden", c.override_assumption1},
                   {"pairs", rows}};
}

void run_decay_kind(ExperimentConfig const& c, unsigned workers, Output& out)
{
    RunOptions const opts = run_options(c, workers);
    SpaceSpec const space = c.space();
    std::vector<Observable> obs;
    for (auto const& o : c.observables)
        obs.push_back(Observable::parse(o, space));
    DecayEstimate const d = estimate_correlation_decay(
        c.system(), c.measure(), space, obs, c.gaps,
        static_cast<std::size_t>(c.samples), opts);

    Csv csv{"gap", "corr", "abs_corr", "used_in_fit"};
    for (std::size_t j = 0; j < d.gaps.size(); ++j)
    {
        csv.row_begin()
            .cell(d.gaps[j])
            .cell(d.correlation[j])
            .cell(std::abs(d.correlation[j]))
            .cell(static_cast<bool>(d.used_in_fit[j]));
    }
    out.files.emplace_back("decay.csv", csv.text());

    json observables = json::array();
    for (std::size_t i = 0; i < d.observables.size(); ++i)
    {
        observables.push_back({{"spec", d.observables[i].to_string()},
                               {"holder_exponent", d.observables[i].holder_exponent()},
                               {"holder_norm", d.holder_norms[i]}});
    }
    out.results = {{"samples", d.samples},
                   {"observables", observables},
                   {"noise_floor", d.noise_floor},
                   {"status", std::string(to_string(d.status))},
                   {"tau_hat", jopt(d.tau_hat)},
                   {"c_hat", jopt(d.c_hat)},
                   {"slope", d.slope},
                   {"slope_se", d.slope_se}};
}

void run_local_kind(ExperimentConfig const& c, unsigned workers, Output& out)
{
    RunOptions const opts = run_options(c, workers);
    auto const stats = local_stats_seeds(c.system(), c.measure(), c.space(), c.radii,
                                         c.cap, static_cast<std::size_t>(c.seeds), opts);
    Csv csv{"seed", "r", "mu_ball", "tau", "censored"};
    for (std::size_t s = 0; s < stats.size(); ++s)
    {
        for (std::size_t j = 0; j < c.radii.size(); ++j)
        {
            csv.row_begin()
                .cell(s)
                .cell(stats[s].radii[j])
                .cell(stats[s].mu_ball[j])
                .cell(stats[s].tau[j])
                .cell(static_cast<bool>(stats[s].censored[j]));
        }
    }
    out.files.emplace_back("local.csv", csv.text());

    json per_radius = json::array();
    for (std::size_t j = 0; j < c.radii.size(); ++j)
    {
        std::vector<double> ratios;
        std::size_t censored = 0;
        for (auto const& s : stats)
        {
            ratios.push_back(s.recurrence_ratio[j]);
            censored += s.censored[j];
        }
        per_radius.push_back(
            {{"r", c.radii[j]},
             {"median_recurrence_ratio", jnum(median_of(ratios))},
             {"censored_fraction",
              static_cast<double>(censored) / static_cast<double>(stats.size())}});
    }
    auto collect = [&](auto member) {
        std::vector<double> v;
        for (auto const& s : stats)
        {
            if ((s.*member).has_value())
                v.push_back(*(s.*member));
        }
        return jnum(median_of(v));
    };
    std::size_t usable = 0;
    for (auto const& s : stats)
        usable += s.usable;
    out.results = {{"seeds", c.seeds},
                   {"cap", c.cap},
                   {"usable_seeds", usable},
                   {"per_radius", per_radius},
                   {"median_d_lower", collect(&LocalStats::d_lower)},
                   {"median_d_upper", collect(&LocalStats::d_upper)},
                   {"median_r_lower", collect(&LocalStats::r_lower)},
                   {"median_r_upper", collect(&LocalStats::r_upper)}};
}

void run_bosh_kind(ExperimentConfig const& c, unsigned workers, Output& out)
{
    RunOptions const opts = run_options(c, workers);
    auto const stats = boshernitzan_seeds(c.system(), c.measure(), c.space(), c.alpha,
                                          *c.n_max, static_cast<std::size_t>(c.seeds),
                                          opts);
    Csv csv{"seed", "n", "running_min"};
    std::vector<double> finals;
    for (std::size_t s = 0; s < stats.size(); ++s)
    {
        for (std::size_t j = 0; j < stats[s].checkpoints.size(); ++j)
            csv.row_begin().cell(s).cell(stats[s].checkpoints[j]).cell(
                stats[s].running_min[j]);
        finals.push_back(stats[s].final_value);
    }
    out.files.emplace_back("bosh.csv", csv.text());
    out.results = {{"alpha", c.alpha},
                   {"n_max", *c.n_max},
                   {"seeds", c.seeds},
                   {"median_final", jnum(median_of(finals))},
                   {"max_final", jnum(*std::max_element(finals.begin(), finals.end()))}};
}

void run_validate_kind(ExperimentConfig const& c, Output& out)
{
    auto const seq = c.targets();
    SeqValidation const v
        = validate_target_sequence(seq, c.n_min, c.alpha_grid, c.assumption1_epsilon);
    Csv csv{"alpha", "sup_ratio"};
    for (auto const& [alpha, ratio] : v.ratio_table)
        csv.row_begin().cell(alpha).cell(ratio);
    out.files.emplace_back("validation.csv", csv.text());
    out.results = validation_json(v);
    out.results["clamped_count"] = seq.clamped_count();
}

void run_packing_kind(ExperimentConfig const& c, Output& out)
{
    SpaceSpec const space = c.space();
    auto const budget = static_cast<std::size_t>(c.probe_budget);
    if (!c.eps_grid.empty())
    {
        RngStream rng = make_stream(c.master_seed, StreamRole::packing, 1);
        PackingExponent const e = packing_exponent(space, c.eps_grid, budget, rng);
        Csv csv{"epsilon", "count"};
        for (auto const& [eps, count] : e.counts)
            csv.row_begin().cell(eps).cell(count);
        out.files.emplace_back("packing_counts.csv", csv.text());
        out.results["k_hat"] = e.k_hat;
        out.results["c_hat"] = e.c_hat;
        out.results["eps0"] = e.eps0;
    }
    if (!c.epsilon)
        return;

    RngStream rng = make_stream(c.master_seed, StreamRole::packing, 0);
    Packing packing = maximal_packing(space, *c.epsilon, budget, rng);
    Csv csv{};
    for (int a = 0; a < space.dimension(); ++a)
        csv.cell("x" + std::to_string(a));
    for (auto const& p : packing.centers)
    {
        csv.row_begin();
        for (int a = 0; a < space.dimension(); ++a)
            csv.cell(p.real(a));
    }
    out.files.emplace_back("packing.csv", csv.text());
    out.results["epsilon"] = *c.epsilon;
    out.results["count"] = packing.count();
    out.results["probes"] = packing.probes;
    out.results["coarse_warning"] = packing.coarse_warning;

    if (c.delta)
    {
        Partition const partition(space, std::move(packing));
        MollifierSet const mollifiers(partition, *c.delta);
        RngStream nrng = make_stream(c.master_seed, StreamRole::neighbourhood, 0);
        NeighbourhoodExcess const ex = neighbourhood_excess(
            c.measure(), mollifiers, static_cast<std::size_t>(c.geometry_samples), nrng);
        out.results["delta"] = *c.delta;
        out.results["mollifier_exact"] = mollifiers.exact();
        out.results["mollifier_tolerance"] = mollifiers.tolerance();
        out.results["max_excess"] = ex.max_excess;
        out.results["argmax_cell"] = ex.argmax;
        out.results["mean_excess"] = mean(ex.excess);
    }
}

//---------------------------------------------------------------------------//
void write_file(std::filesystem::path const& path, std::string const& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f)
        throw std::runtime_error("failed writing " + path.string());
}
}  // namespace

//---------------------------------------------------------------------------//
std::string_view library_version()
{
    return RECLAB_VERSION;
}

std::optional<unsigned> workers_from_env()
{
    char const* raw = std::getenv("RECLAB_WORKERS");
    if (!raw || !*raw)
        return std::nullopt;
    std::string_view const s(raw);
    unsigned v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v == 0)
        fail(ErrorKind::invalid_input, "RECLAB_WORKERS must be a positive integer");
    return v;
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i)
    {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(std::filesystem::path const& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot read " + path.string());
    std::stringstream buf;
    buf << f.rdbuf();
    return sha256_hex(buf.str());
}

int exit_code_for(ErrorKind kind)
{
    return kind == ErrorKind::numerical_failure ? 3 : 2;
}

RunManifest run_experiment(ExperimentConfig config, RunRequest const& request)
{
    auto const t0 = std::chrono::steady_clock::now();
    if (request.output_dir)
        config.output_dir = request.output_dir->string();
    if (request.master_seed)
        config.master_seed = *request.master_seed;
    if (request.override_assumption1)
        config.override_assumption1 = true;

    RunManifest manifest;
    manifest.version = std::string(library_version());
    manifest.output_dir = config.output_dir;
    if (request.env_workers)
    {
        manifest.workers = *request.env_workers;
        manifest.workers_source = "env";
    }
    else
    {
        manifest.workers = static_cast<unsigned>(config.workers);
        manifest.workers_source = "config";
    }

    Output out;
    switch (config.kind)
    {
        case ExperimentKind::sbc:
            run_sbc_kind(config, manifest.workers, out);
            break;
        case ExperimentKind::en:
            run_en_kind(config, manifest.workers, out);
            break;
        case ExperimentKind::pair:
            run_pair_kind(config, manifest.workers, out);
            break;
        case ExperimentKind::decay:
            run_decay_kind(config, manifest.workers, out);
            break;
        case ExperimentKind::local:
            run_local_kind(config, manifest.workers, out);
            break;
        case ExperimentKind::bosh:
            run_bosh_kind(config, manifest.workers, out);
            break;
        case ExperimentKind::validate:
            run_validate_kind(config, out);
            break;
        case ExperimentKind::packing:
            run_packing_kind(config, out);
            break;
    }

    // Summary echoes everything that determines the results.
    json echo = json::object();
    for (auto const& [k, v] : config.entries())
    {
        if (k != "run.workers" && k != "run.output_dir")
            echo[k] = v;
    }
    json summary = {{"experiment", std::string(to_string(config.kind))},
                    {"version", manifest.version},
                    {"master_seed", config.master_seed},
                    {"config", echo},
                    {"results", out.results}};
    out.files.emplace(out.files.begin(), "summary.json", summary.dump(2) + "\n");

    std::filesystem::path const dir = config.output_dir;
    std::vector<std::filesystem::path> written;
    try
    {
        std::filesystem::create_directories(dir);
        for (auto const& [name, content] : out.files)
        {
            auto const path = dir / name;
            write_file(path, content);
            written.push_back(path);
            Artifact a{name, sha256_hex(content), content.size()};
            if (sha256_file(path) != a.sha256)
                throw std::runtime_error("digest mismatch after writing " + name);
            manifest.artifacts.push_back(std::move(a));
        }

        manifest.wall_clock_seconds = std::chrono::duration<double>(
                                          std::chrono::steady_clock::now() - t0)
                                          .count();
        json full = json::object();
        for (auto const& [k, v] : config.entries())
            full[k] = v;
        json files = json::array();
        for (auto const& a : manifest.artifacts)
            files.push_back({{"name", a.name}, {"sha256", a.sha256}, {"bytes", a.bytes}});
        json m = {{"version", manifest.version},
                  {"config", full},
                  {"artifacts", files},
                  {"wall_clock_seconds", manifest.wall_clock_seconds},
                  {"workers", manifest.workers},
                  {"workers_source", manifest.workers_source}};
        auto const mpath = dir / "manifest.json";
        write_file(mpath, m.dump(2) + "\n");
        written.push_back(mpath);
    }
    catch (...)
    {
        std::error_code ec;
        for (auto const& p : written)
            std::filesystem::remove(p, ec);
        throw;
    }
    return manifest;
}

}  // namespace reclab
