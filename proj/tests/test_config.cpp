#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "reclab/config.hpp"
#include "reclab/experiments.hpp"
#include "reclab/runner.hpp"

using namespace reclab;
namespace fs = std::filesystem;

namespace
{
std::string const minimal_sbc = R"(# shift map check
experiment.kind = sbc
system.kind = shift_map
targets.kind = power
targets.gamma = 0.9
targets.horizon = 2000
experiment.seeds = 8
)";

fs::path scratch(std::string const& name)
{
    auto p = fs::temp_directory_path() / ("reclab_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> problems_of(std::string const& text)
{
    try
    {
        ExperimentConfig::parse(text);
    }
    catch (ConfigError const& e)
    {
        return e.problems();
    }
    return {};
}

bool mentions(std::vector<std::string> const& problems, std::string const& needle)
{
    for (auto const& p : problems)
        if (p.find(needle) != std::string::npos)
            return true;
    return false;
}
}  // namespace

TEST(Config, MinimalDefaults)
{
    auto c = ExperimentConfig::parse(minimal_sbc);
    EXPECT_EQ(c.kind, ExperimentKind::sbc);
    EXPECT_EQ(c.dimension, 1);
    EXPECT_EQ(c.arithmetic, Arithmetic::bit_stream);
    EXPECT_EQ(c.n_max, 2000);
    EXPECT_EQ(c.workers, 1);
    EXPECT_EQ(c.output_dir, "out");
    EXPECT_EQ(c.system().kind(), SystemKind::shift_map);
    EXPECT_EQ(c.targets().horizon(), 2000);
}

TEST(Config, RoundTrip)
{
    auto c = ExperimentConfig::parse(minimal_sbc);
    auto again = ExperimentConfig::parse(c.to_text());
    EXPECT_EQ(c, again);
    EXPECT_EQ(c.to_text(), again.to_text());

    std::string const decay = R"(
experiment.kind = decay
space.dimension = 2
space.metric = euclidean
system.kind = toral_automorphism
system.matrix = 2, 1, 1, 1
experiment.observables = cos:1, dist:0.1:0.25
experiment.gaps = 1, 2, 4
experiment.samples = 5000
run.master_seed = 18446744073709551615
)";
    auto d = ExperimentConfig::parse(decay);
    EXPECT_EQ(d.master_seed, 18446744073709551615ull);
    EXPECT_EQ(d, ExperimentConfig::parse(d.to_text()));
}

TEST(Config, GammaRange)
{
    std::string text = minimal_sbc;
    text.replace(text.find("targets.gamma = 0.9"), 19, "targets.gamma = -1");
    auto p = problems_of(text);
    EXPECT_TRUE(mentions(p, "gamma must be in (0,1]"));
}

TEST(Config, UnknownKeyNamed)
{
    auto p = problems_of(minimal_sbc + "systm.kind = shift_map\n");
    EXPECT_TRUE(mentions(p, "systm.kind"));
}

TEST(Config, EveryProblemReported)
{
    auto p = problems_of("experiment.kind = sbc\nfoo.bar = 1\nexperiment.seeds = many\n"
                         "targets.kind = power\n");
    EXPECT_TRUE(mentions(p, "foo.bar"));
    EXPECT_TRUE(mentions(p, "experiment.seeds"));
    EXPECT_TRUE(mentions(p, "system.kind"));
    EXPECT_TRUE(mentions(p, "targets.gamma"));
    EXPECT_GE(p.size(), 4u);
}

TEST(Config, DuplicatesAndSyntax)
{
    EXPECT_TRUE(mentions(problems_of(minimal_sbc + "experiment.seeds = 9\n"), "experiment.seeds"));
    EXPECT_FALSE(problems_of(minimal_sbc + "this line has no equals sign\n").empty());
    EXPECT_TRUE(mentions(problems_of("system.kind = shift_map\n"), "experiment.kind"));
}

TEST(Config, MeasureFileResolvedAndChecked)
{
    auto dir = scratch("measure");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "h.csv") << "1.5\n0.5\n";
    }
    std::string text = minimal_sbc + "measure.kind = grid_density\nmeasure.file = h.csv\n"
                       + "measure.resolution = 2\n";
    auto c = ExperimentConfig::parse(text, dir);
    EXPECT_EQ(c.measure().values().size(), 2u);
    std::string bad = minimal_sbc + "measure.kind = grid_density\nmeasure.file = h.csv\n"
                      + "measure.resolution = 3\n";
    EXPECT_THROW(ExperimentConfig::parse(bad, dir), ConfigError);
    std::string missing = minimal_sbc + "measure.kind = grid_density\nmeasure.file = nope.csv\n"
                          + "measure.resolution = 2\n";
    EXPECT_THROW(ExperimentConfig::parse(missing, dir), ConfigError);
    fs::remove_all(dir);
}

TEST(Config, LoadFromFile)
{
    auto dir = scratch("load");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "c.cfg") << minimal_sbc;
    }
    EXPECT_EQ(ExperimentConfig::load(dir / "c.cfg"), ExperimentConfig::parse(minimal_sbc));
    EXPECT_THROW(ExperimentConfig::load(dir / "absent.cfg"), Error);
    fs::remove_all(dir);
}

TEST(Runner, Sha256KnownAnswer)
{
    EXPECT_EQ(sha256_hex("abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Runner, ExitCodes)
{
    EXPECT_EQ(exit_code_for(ErrorKind::invalid_input), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::degenerate), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::numerical_failure), 3);
}

TEST(Runner, DeterministicAcrossRunsAndWorkers)
{
    auto config = ExperimentConfig::parse(minimal_sbc);
    auto a = scratch("det_a"), b = scratch("det_b");
    RunRequest ra;
    ra.output_dir = a;
    ra.override_assumption1 = true;
    ra.env_workers = 1;
    RunRequest rb = ra;
    rb.output_dir = b;
    rb.env_workers = 8;
    auto ma = run_experiment(config, ra);
    auto mb = run_experiment(config, rb);
    EXPECT_EQ(mb.workers_source, "env");
    ASSERT_EQ(ma.artifacts.size(), mb.artifacts.size());
    for (std::size_t i = 0; i < ma.artifacts.size(); ++i)
    {
        EXPECT_EQ(ma.artifacts[i].name, mb.artifacts[i].name);
        EXPECT_EQ(ma.artifacts[i].sha256, mb.artifacts[i].sha256);
        EXPECT_EQ(slurp(a / ma.artifacts[i].name), slurp(b / mb.artifacts[i].name));
    }
    auto again = run_experiment(config, ra);
    for (std::size_t i = 0; i < ma.artifacts.size(); ++i)
        EXPECT_EQ(ma.artifacts[i].sha256, again.artifacts[i].sha256);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Runner, ManifestDigestsVerify)
{
    auto config = ExperimentConfig::parse(minimal_sbc);
    auto dir = scratch("manifest");
    RunRequest r;
    r.output_dir = dir;
    r.override_assumption1 = true;
    auto m = run_experiment(config, r);
    auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    ASSERT_EQ(manifest["artifacts"].size(), m.artifacts.size());
    for (auto const& a : manifest["artifacts"])
    {
        auto const name = a["name"].get<std::string>();
        EXPECT_EQ(sha256_hex(slurp(dir / name)), a["sha256"].get<std::string>());
        EXPECT_EQ(fs::file_size(dir / name), a["bytes"].get<std::uintmax_t>());
    }
    auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["experiment"], "sbc");
    EXPECT_FALSE(summary["config"].contains("run.workers"));
    auto csv = slurp(dir / "sbc_ratio.csv");
    EXPECT_EQ(csv.rfind("seed,n,S_n,cum_mass,ratio\r\n", 0), 0u);
    fs::remove_all(dir);
}

TEST(Runner, RefusalLeavesNothingBehind)
{
    std::string text = minimal_sbc;
    text.replace(text.find("targets.gamma = 0.9"), 19, "targets.gamma = 1");
    auto config = ExperimentConfig::parse(text);
    auto dir = scratch("refused");
    RunRequest r;
    r.output_dir = dir;
    EXPECT_THROW(run_experiment(config, r), AssumptionRefused);
    EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
}

TEST(Runner, OtherExperimentKindsRun)
{
    std::vector<std::string> configs = {
        "experiment.kind = en\nsystem.kind = toral_automorphism\nspace.dimension = 2\n"
        "targets.kind = explicit\ntargets.values = 0.1, 0.1, 0.1\n"
        "experiment.n = 1, 3\nexperiment.samples = 2000\n",
        "experiment.kind = pair\nsystem.kind = toral_automorphism\nspace.dimension = 2\n"
        "targets.kind = explicit\ntargets.values = 0.1, 0.1, 0.1, 0.1\n"
        "experiment.n = 1\nexperiment.m = 1, 2\nexperiment.samples = 2000\n",
        "experiment.kind = decay\nsystem.kind = shift_map\n"
        "experiment.observables = cos:1, cos:1\nexperiment.gaps = 1, 2, 3\n"
        "experiment.samples = 2000\n",
        "experiment.kind = local\nsystem.kind = rotation\nsystem.angle = 0.618\n"
        "experiment.radii = 0.1, 0.01\nexperiment.seeds = 3\n",
        "experiment.kind = bosh\nsystem.kind = shift_map\nexperiment.n_max = 1000\n"
        "experiment.seeds = 3\n",
        "experiment.kind = validate\ntargets.kind = log_power\ntargets.beta = 5\n"
        "targets.horizon = 1000\n",
        "experiment.kind = packing\nspace.dimension = 2\ngeometry.epsilon = 0.1\n"
        "geometry.eps_grid = 0.2, 0.1, 0.05\ngeometry.delta = 0.01\ngeometry.samples = 2000\n",
    };
    for (auto const& text : configs)
    {
        auto config = ExperimentConfig::parse(text);
        auto dir = scratch("kind");
        RunRequest r;
        r.output_dir = dir;
        r.override_assumption1 = true;
        auto m = run_experiment(config, r);
        EXPECT_GE(m.artifacts.size(), 2u) << text;
        EXPECT_TRUE(fs::exists(dir / "manifest.json"));
        fs::remove_all(dir);
    }
}

TEST(Runner, WorkersFromEnvironment)
{
    ::unsetenv("RECLAB_WORKERS");
    EXPECT_FALSE(workers_from_env().has_value());
    ::setenv("RECLAB_WORKERS", "6", 1);
    EXPECT_EQ(workers_from_env(), 6u);
    ::setenv("RECLAB_WORKERS", "six", 1);
    EXPECT_THROW(workers_from_env(), Error);
    ::unsetenv("RECLAB_WORKERS");
}

#ifdef RECLAB_CLI
namespace
{
int run_cli(std::string const& args)
{
    std::string const cmd = std::string(RECLAB_CLI) + " " + args + " > /dev/null 2>&1";
    int const status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}
}  // namespace

TEST(Cli, ExitCodes)
{
    auto dir = scratch("cli");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "ok.cfg") << minimal_sbc;
        std::string failing = minimal_sbc;
        failing.replace(failing.find("targets.gamma = 0.9"), 19, "targets.gamma = 1");
        std::ofstream(dir / "refused.cfg") << failing;
        std::ofstream(dir / "bad.cfg") << minimal_sbc << "systm.kind = x\n";
        std::ofstream(dir / "zero.cfg")
            << "experiment.kind = sbc\nsystem.kind = shift_map\ntargets.kind = explicit\n"
               "targets.values = 0, 0, 0\n";
    }
    EXPECT_EQ(run_cli("validate " + (dir / "ok.cfg").string()), 0);
    EXPECT_EQ(run_cli("validate " + (dir / "bad.cfg").string()), 2);
    EXPECT_EQ(run_cli("run " + (dir / "refused.cfg").string() + " --out "
                      + (dir / "out_refused").string()),
              2);
    EXPECT_FALSE(fs::exists(dir / "out_refused" / "manifest.json"));
    EXPECT_EQ(run_cli("run " + (dir / "zero.cfg").string() + " --override-assumption1 --out "
                      + (dir / "out_zero").string()),
              2);
    EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " --override-assumption1 --seed 5 --out "
                      + (dir / "out_ok").string()),
              0);
    auto summary = nlohmann::json::parse(slurp(dir / "out_ok" / "summary.json"));
    EXPECT_EQ(summary["master_seed"], 5);
    EXPECT_EQ(run_cli("--version"), 0);
    fs::remove_all(dir);
}
#endif
