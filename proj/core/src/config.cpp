#include "reclab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "reclab/experiments.hpp"

namespace reclab
{
namespace
{
constexpr std::array known_keys{
    "experiment.kind",      "space.dimension",       "space.metric",
    "system.kind",          "system.matrix",         "system.base",
    "system.angle",         "system.arithmetic",     "measure.kind",
    "measure.file",         "measure.resolution",    "targets.kind",
    "targets.c",            "targets.gamma",         "targets.beta",
    "targets.values",       "targets.horizon",       "targets.epsilon",
    "targets.alpha_grid",   "targets.n_min",         "geometry.epsilon",
    "geometry.delta",       "geometry.probe_budget", "geometry.eps_grid",
    "geometry.samples",     "experiment.n_max",      "experiment.seeds",
    "experiment.samples",   "experiment.checkpoints", "experiment.n",
    "experiment.m",         "experiment.observables", "experiment.gaps",
    "experiment.radii",     "experiment.cap",        "experiment.alpha",
    "experiment.fixed_center", "experiment.override_assumption1",
    "run.master_seed",      "run.workers",           "run.output_dir",
};

std::string trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    if (trim(s).empty())
        return out;
    std::size_t pos = 0;
    while (true)
    {
        auto const comma = s.find(',', pos);
        out.push_back(trim(s.substr(pos, comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

template<class T>
T parse_number(std::string const& s)
{
    T v{};
    auto const* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || s.empty())
        fail(ErrorKind::invalid_input, "'" + s + "' is not a valid number");
    if constexpr (std::is_floating_point_v<T>)
    {
        if (!std::isfinite(v))
            fail(ErrorKind::invalid_input, "'" + s + "' is not finite");
    }
    return v;
}

bool parse_bool(std::string const& s)
{
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    fail(ErrorKind::invalid_input, "'" + s + "' is not true or false");
}

template<class T>
std::vector<T> parse_list(std::string const& s)
{
    std::vector<T> out;
    for (auto const& item : split_list(s))
        out.push_back(parse_number<T>(item));
    return out;
}

std::string fmt(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

template<class T>
std::string fmt_list(std::vector<T> const& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += fmt(v[i]);
        else if constexpr (std::is_same_v<T, std::string>)
            out += v[i];
        else
            out += std::to_string(v[i]);
    }
    return out;
}

MeasureKind measure_kind_from_string(std::string_view name)
{
    if (name == "lebesgue")
        return MeasureKind::lebesgue;
    if (name == "grid_density")
        return MeasureKind::grid_density;
    fail(ErrorKind::invalid_input, "unknown measure kind '" + std::string(name) + "'");
}

TargetKind target_kind_from_string(std::string_view name)
{
    for (auto k : {TargetKind::power, TargetKind::log_power, TargetKind::explicit_list})
    {
        if (to_string(k) == name)
            return k;
    }
    fail(ErrorKind::invalid_input, "unknown target kind '" + std::string(name) + "'");
}

bool needs_system(ExperimentKind k)
{
    return k != ExperimentKind::validate && k != ExperimentKind::packing;
}

bool needs_targets(ExperimentKind k)
{
    return k == ExperimentKind::sbc || k == ExperimentKind::en
           || k == ExperimentKind::pair || k == ExperimentKind::validate;
}

// Collects conversion errors against the raw key/value map.
class Reader
{
  public:
    Reader(std::map<std::string, std::string> raw, std::vector<std::string>& errors)
        : raw_(std::move(raw)), errors_(errors)
    {
    }

    bool has(std::string const& key) const { return raw_.count(key) != 0; }

    template<class T, class F>
    void read(std::string const& key, T& field, F&& convert)
    {
        auto it = raw_.find(key);
        if (it == raw_.end())
            return;
        try
        {
            field = convert(it->second);
        }
        catch (Error const& e)
        {
            errors_.push_back(key + ": " + e.what());
        }
    }

  private:
    std::map<std::string, std::string> raw_;
    std::vector<std::string>& errors_;
};

void check(bool ok, std::string msg, std::vector<std::string>& errors)
{
    if (!ok)
        errors.push_back(std::move(msg));
}

template<class F>
void attempt(F&& f, std::vector<std::string>& errors)
{
    try
    {
        f();
    }
    catch (Error const& e)
    {
        errors.push_back(e.what());
    }
}
}  // namespace

//---------------------------------------------------------------------------//
std::string_view to_string(ExperimentKind k)
{
    switch (k)
    {
        case ExperimentKind::sbc:
            return "sbc";
        case ExperimentKind::en:
            return "en";
        case ExperimentKind::pair:
            return "pair";
        case ExperimentKind::decay:
            return "decay";
        case ExperimentKind::local:
            return "local";
        case ExperimentKind::bosh:
            return "bosh";
        case ExperimentKind::validate:
            return "validate";
        case ExperimentKind::packing:
            return "packing";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(std::string_view name)
{
    for (auto k : {ExperimentKind::sbc,
                   ExperimentKind::en,
                   ExperimentKind::pair,
                   ExperimentKind::decay,
                   ExperimentKind::local,
                   ExperimentKind::bosh,
                   ExperimentKind::validate,
                   ExperimentKind::packing})
    {
        if (to_string(k) == name)
            return k;
    }
    fail(ErrorKind::invalid_input, "unknown experiment kind '" + std::string(name) + "'");
}

namespace
{
std::string join_problems(std::vector<std::string> const& problems)
{
    std::string out = "invalid config:";
    for (auto const& p : problems)
        out += "\n  " + p;
    return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(ErrorKind::invalid_input, join_problems(problems))
    , problems_(std::move(problems))
{
}

//---------------------------------------------------------------------------//
ExperimentConfig ExperimentConfig::parse(std::string_view text,
                                         std::filesystem::path const& base_dir)
{
    std::vector<std::string> errors;
    std::map<std::string, std::string> raw;

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::string const body = trim(line);
        if (body.empty())
            continue;
        auto const eq = body.find('=');
        if (eq == std::string::npos)
        {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        std::string const key = trim(std::string_view(body).substr(0, eq));
        std::string const value = trim(std::string_view(body).substr(eq + 1));
        if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end())
        {
            errors.push_back("unknown key '" + key + "'");
            continue;
        }
        if (!raw.emplace(key, value).second)
            errors.push_back("duplicate key '" + key + "'");
    }

    ExperimentConfig c;
    bool const have_kind = raw.count("experiment.kind") != 0;
    Reader r(std::move(raw), errors);
    if (!have_kind)
        errors.push_back("missing required key 'experiment.kind'");

    auto as_int = [](std::string const& s) { return parse_number<int>(s); };
    auto as_i64 = [](std::string const& s) { return parse_number<std::int64_t>(s); };
    auto as_u64 = [](std::string const& s) { return parse_number<std::uint64_t>(s); };
    auto as_dbl = [](std::string const& s) { return parse_number<double>(s); };
    auto as_str = [](std::string const& s) { return s; };

    bool kind_ok = have_kind;
    r.read("experiment.kind", c.kind, [&](std::string const& s) {
        kind_ok = false;
        auto k = experiment_kind_from_string(s);
        kind_ok = true;
        return k;
    });
    r.read("space.dimension", c.dimension, as_int);
    r.read("space.metric", c.metric, [](std::string const& s) { return metric_from_string(s); });
    r.read("system.kind", c.system_kind, [](std::string const& s) {
        return std::optional(system_kind_from_string(s));
    });
    r.read("system.matrix", c.matrix, parse_list<std::int64_t>);
    r.read("system.base", c.base, as_int);
    r.read("system.angle", c.angle, as_dbl);
    r.read("system.arithmetic", c.arithmetic, [](std::string const& s) {
        return std::optional(arithmetic_from_string(s));
    });
    r.read("measure.kind", c.measure_kind, [](std::string const& s) {
        return measure_kind_from_string(s);
    });
    r.read("measure.file", c.measure_file, [&](std::string const& s) {
        std::filesystem::path p(s);
        if (p.is_relative() && !base_dir.empty())
            p = base_dir / p;
        return p.lexically_normal().string();
    });
    r.read("measure.resolution", c.measure_resolution, as_int);
    r.read("targets.kind", c.target_kind, [](std::string const& s) {
        return target_kind_from_string(s);
    });
    r.read("targets.c", c.target_c, as_dbl);
    r.read("targets.gamma", c.gamma, [&](std::string const& s) { return std::optional(as_dbl(s)); });
    r.read("targets.beta", c.beta, [&](std::string const& s) { return std::optional(as_dbl(s)); });
    r.read("targets.values", c.target_values, parse_list<double>);
    r.read("targets.horizon", c.horizon, [&](std::string const& s) { return std::optional(as_i64(s)); });
    r.read("targets.epsilon", c.assumption1_epsilon, as_dbl);
    r.read("targets.alpha_grid", c.alpha_grid, parse_list<double>);
    r.read("targets.n_min", c.n_min, as_i64);
    r.read("geometry.epsilon", c.epsilon, [&](std::string const& s) { return std::optional(as_dbl(s)); });
    r.read("geometry.delta", c.delta, [&](std::string const& s) { return std::optional(as_dbl(s)); });
    r.read("geometry.probe_budget", c.probe_budget, as_i64);
    r.read("geometry.eps_grid", c.eps_grid, parse_list<double>);
    r.read("geometry.samples", c.geometry_samples, as_i64);
    r.read("experiment.n_max", c.n_max, [&](std::string const& s) { return std::optional(as_i64(s)); });
    r.read("experiment.seeds", c.seeds, as_i64);
    r.read("experiment.samples", c.samples, as_i64);
    r.read("experiment.checkpoints", c.checkpoints, parse_list<std::int64_t>);
    r.read("experiment.n", c.n_list, parse_list<std::int64_t>);
    r.read("experiment.m", c.m_list, parse_list<std::int64_t>);
    r.read("experiment.observables", c.observables, split_list);
    r.read("experiment.gaps", c.gaps, parse_list<std::int64_t>);
    r.read("experiment.radii", c.radii, parse_list<double>);
    r.read("experiment.cap", c.cap, as_i64);
    r.read("experiment.alpha", c.alpha, as_dbl);
    r.read("experiment.fixed_center", c.fixed_center, parse_list<double>);
    r.read("experiment.override_assumption1", c.override_assumption1, parse_bool);
    r.read("run.master_seed", c.master_seed, as_u64);
    r.read("run.workers", c.workers, as_i64);
    r.read("run.output_dir", c.output_dir, as_str);

    // Defaults that depend on other keys
    if (c.system_kind && !c.arithmetic)
    {
        switch (*c.system_kind)
        {
            case SystemKind::toral_automorphism:
                c.arithmetic = Arithmetic::exact_grid;
                break;
            case SystemKind::shift_map:
                c.arithmetic = Arithmetic::bit_stream;
                break;
            default:
                c.arithmetic = Arithmetic::floating;
        }
    }
    if (c.kind == ExperimentKind::sbc && !c.n_max)
    {
        if (c.target_kind == TargetKind::explicit_list && !c.target_values.empty())
            c.n_max = static_cast<std::int64_t>(c.target_values.size());
        else if (c.horizon)
            c.n_max = c.horizon;
    }

    // Semantic checks
    check(c.seeds >= 1, "experiment.seeds must be positive", errors);
    check(c.samples >= 1, "experiment.samples must be positive", errors);
    check(c.cap >= 1, "experiment.cap must be positive", errors);
    check(c.workers >= 1, "run.workers must be positive", errors);
    check(c.probe_budget >= 1, "geometry.probe_budget must be positive", errors);
    check(c.geometry_samples >= 1, "geometry.samples must be positive", errors);
    check(!c.output_dir.empty(), "run.output_dir must not be empty", errors);
    check(c.alpha > 0, "experiment.alpha must be positive", errors);

    std::optional<SpaceSpec> space;
    attempt([&] { space = c.space(); }, errors);

    if (kind_ok && needs_system(c.kind))
    {
        if (!c.system_kind)
            errors.push_back("missing required key 'system.kind'");
        else
            attempt([&] {
                SystemSpec const sys = c.system();
                if (space)
                    sys.check_space(*space);
            }, errors);
    }

    if (c.measure_kind == MeasureKind::grid_density)
    {
        if (c.measure_file.empty())
            errors.push_back("missing required key 'measure.file'");
        else if (!std::filesystem::exists(c.measure_file))
            errors.push_back("measure.file: '" + c.measure_file + "' does not exist");
        else
            attempt([&] {
                MeasureSpec const m = c.measure();
                if (space)
                    m.check_space(*space);
            }, errors);
    }

    if (kind_ok && needs_targets(c.kind))
    {
        bool ready = true;
        if (c.target_kind == TargetKind::explicit_list)
        {
            if (c.target_values.empty())
            {
                errors.push_back("missing required key 'targets.values'");
                ready = false;
            }
        }
        else
        {
            if (!c.horizon)
            {
                errors.push_back("missing required key 'targets.horizon'");
                ready = false;
            }
            if (c.target_kind == TargetKind::power && !c.gamma)
            {
                errors.push_back("missing required key 'targets.gamma'");
                ready = false;
            }
            if (c.target_kind == TargetKind::log_power && !c.beta)
            {
                errors.push_back("missing required key 'targets.beta'");
                ready = false;
            }
        }
        if (ready)
            attempt([&] { (void)c.targets(); }, errors);
        check(!c.alpha_grid.empty(), "targets.alpha_grid must not be empty", errors);
        for (double a : c.alpha_grid)
            check(a > 1, "targets.alpha_grid values must exceed 1", errors);
        check(c.n_min >= 3, "targets.n_min must be at least 3", errors);
        check(c.assumption1_epsilon > 0, "targets.epsilon must be positive", errors);
    }

    if (kind_ok)
    {
        switch (c.kind)
        {
            case ExperimentKind::sbc:
                check(c.n_max.has_value(), "missing required key 'experiment.n_max'", errors);
                if (c.fixed_center.size())
                {
                    check(static_cast<int>(c.fixed_center.size()) == c.dimension,
                          "experiment.fixed_center needs one coordinate per axis", errors);
                }
                break;
            case ExperimentKind::en:
                check(!c.n_list.empty(), "missing required key 'experiment.n'", errors);
                check(c.samples >= 1000, "experiment.samples must be at least 1000", errors);
                break;
            case ExperimentKind::pair:
                check(!c.n_list.empty(), "missing required key 'experiment.n'", errors);
                check(!c.m_list.empty(), "missing required key 'experiment.m'", errors);
                check(c.samples >= 1000, "experiment.samples must be at least 1000", errors);
                break;
            case ExperimentKind::decay:
                check(c.observables.size() == 2 || c.observables.size() == 3,
                      "experiment.observables needs 2 or 3 entries", errors);
                check(!c.gaps.empty(), "missing required key 'experiment.gaps'", errors);
                if (space)
                {
                    for (auto const& o : c.observables)
                        attempt([&] { (void)Observable::parse(o, *space); }, errors);
                }
                break;
            case ExperimentKind::local:
                check(!c.radii.empty(), "missing required key 'experiment.radii'", errors);
                break;
            case ExperimentKind::bosh:
                check(c.n_max.has_value(), "missing required key 'experiment.n_max'", errors);
                break;
            case ExperimentKind::packing:
                check(c.epsilon.has_value() || !c.eps_grid.empty(),
                      "missing required key 'geometry.epsilon'", errors);
                break;
            case ExperimentKind::validate:
                break;
        }
    }

    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return c;
}

ExperimentConfig ExperimentConfig::load(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"cannot read config file '" + path.string() + "'"});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.parent_path());
}

//---------------------------------------------------------------------------//
std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const
{
    std::vector<std::pair<std::string, std::string>> out;
    auto put = [&](char const* key, std::string value) { out.emplace_back(key, std::move(value)); };

    put("experiment.kind", std::string(to_string(kind)));
    put("space.dimension", std::to_string(dimension));
    put("space.metric", std::string(to_string(metric)));
    if (system_kind)
        put("system.kind", std::string(to_string(*system_kind)));
    if (!matrix.empty())
        put("system.matrix", fmt_list(matrix));
    put("system.base", std::to_string(base));
    put("system.angle", fmt(angle));
    if (arithmetic)
        put("system.arithmetic", std::string(to_string(*arithmetic)));
    put("measure.kind", std::string(to_string(measure_kind)));
    if (!measure_file.empty())
        put("measure.file", measure_file);
    put("measure.resolution", std::to_string(measure_resolution));
    put("targets.kind", std::string(to_string(target_kind)));
    put("targets.c", fmt(target_c));
    if (gamma)
        put("targets.gamma", fmt(*gamma));
    if (beta)
        put("targets.beta", fmt(*beta));
    if (!target_values.empty())
        put("targets.values", fmt_list(target_values));
    if (horizon)
        put("targets.horizon", std::to_string(*horizon));
    put("targets.epsilon", fmt(assumption1_epsilon));
    put("targets.alpha_grid", fmt_list(alpha_grid));
    put("targets.n_min", std::to_string(n_min));
    if (epsilon)
        put("geometry.epsilon", fmt(*epsilon));
    if (delta)
        put("geometry.delta", fmt(*delta));
    put("geometry.probe_budget", std::to_string(probe_budget));
    if (!eps_grid.empty())
        put("geometry.eps_grid", fmt_list(eps_grid));
    put("geometry.samples", std::to_string(geometry_samples));
    if (n_max)
        put("experiment.n_max", std::to_string(*n_max));
    put("experiment.seeds", std::to_string(seeds));
    put("experiment.samples", std::to_string(samples));
    if (!checkpoints.empty())
        put("experiment.checkpoints", fmt_list(checkpoints));
    if (!n_list.empty())
        put("experiment.n", fmt_list(n_list));
    if (!m_list.empty())
        put("experiment.m", fmt_list(m_list));
    if (!observables.empty())
        put("experiment.observables", fmt_list(observables));
    if (!gaps.empty())
        put("experiment.gaps", fmt_list(gaps));
    if (!radii.empty())
        put("experiment.radii", fmt_list(radii));
    put("experiment.cap", std::to_string(cap));
    put("experiment.alpha", fmt(alpha));
    if (!fixed_center.empty())
        put("experiment.fixed_center", fmt_list(fixed_center));
    put("experiment.override_assumption1", override_assumption1 ? "true" : "false");
    put("run.master_seed", std::to_string(master_seed));
    put("run.workers", std::to_string(workers));
    put("run.output_dir", output_dir);
    return out;
}

std::string ExperimentConfig::to_text() const
{
    std::string out;
    for (auto const& [k, v] : entries())
        out += k + " = " + v + "\n";
    return out;
}

SpaceSpec ExperimentConfig::space() const
{
    return SpaceSpec(dimension, metric);
}

SystemSpec ExperimentConfig::system() const
{
    if (!system_kind)
        fail(ErrorKind::invalid_input, "no system configured");
    Arithmetic const arith = arithmetic.value_or(Arithmetic::floating);
    switch (*system_kind)
    {
        case SystemKind::toral_automorphism:
            if (matrix.empty() && dimension == 2)
                return SystemSpec::cat_map(arith);
            return SystemSpec::toral_automorphism(dimension, matrix, arith);
        case SystemKind::shift_map:
            return SystemSpec::shift_map(base, arith);
        case SystemKind::rotation:
            require(arith == Arithmetic::floating,
                    "rotation only supports the float arithmetic label");
            return SystemSpec::rotation(angle);
        case SystemKind::identity:
            require(arith == Arithmetic::floating,
                    "identity only supports the float arithmetic label");
            return SystemSpec::identity(dimension);
    }
    fail(ErrorKind::invalid_input, "no system configured");
}

MeasureSpec ExperimentConfig::measure() const
{
    if (measure_kind == MeasureKind::lebesgue)
        return MeasureSpec::lebesgue();
    return MeasureSpec::grid_density_csv(measure_file, dimension, measure_resolution);
}

TargetSequence ExperimentConfig::targets() const
{
    switch (target_kind)
    {
        case TargetKind::power:
            require(gamma.has_value(), "missing required key 'targets.gamma'");
            require(horizon.has_value(), "missing required key 'targets.horizon'");
            return TargetSequence::power(target_c, *gamma, *horizon);
        case TargetKind::log_power:
            require(beta.has_value(), "missing required key 'targets.beta'");
            require(horizon.has_value(), "missing required key 'targets.horizon'");
            return TargetSequence::log_power(target_c, *beta, *horizon);
        case TargetKind::explicit_list:
            return TargetSequence::explicit_values(target_values);
    }
    fail(ErrorKind::invalid_input, "no target sequence configured");
}

}  // namespace reclab
