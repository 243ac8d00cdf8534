#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "reclab/config.hpp"
#include "reclab/experiments.hpp"
#include "reclab/runner.hpp"

namespace
{
void print_report(reclab::SeqValidation const& v)
{
    std::cerr << "target sequence check: " << reclab::to_string(v.verdict) << " on ["
              << v.n_min << ", " << v.n_max << "] with epsilon " << v.epsilon << "\n"
              << "  bound violations: " << v.violation_count;
    if (!v.bound_violations.empty())
    {
        std::cerr << " (first at n = " << v.bound_violations.front() << ")";
    }
    std::cerr << "\n";
    for (auto const& [alpha, ratio] : v.ratio_table)
        std::cerr << "  sup M_n / M_floor(" << alpha << " n) = " << ratio << "\n";
    std::cerr << "  ratio monotone: " << (v.ratio_monotone ? "yes" : "no")
              << ", converging: " << (v.ratio_converging ? "yes" : "no") << "\n";
}

int fail_with(reclab::Error const& e)
{
    std::cerr << "reclab: " << e.what() << "\n";
    return reclab::exit_code_for(e.kind());
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Recurrence and shrinking-target experiments on the torus"};
    app.set_version_flag("--version", std::string(reclab::library_version()));
    app.require_subcommand(1);

    std::string config_path;
    auto* validate = app.add_subcommand("validate", "Check a config and print it resolved");
    validate->add_option("config", config_path, "Config file")->required();

    std::string out_dir;
    std::uint64_t seed = 0;
    bool override_flag = false;
    auto* run = app.add_subcommand("run", "Run the configured experiment");
    run->add_option("config", config_path, "Config file")->required();
    auto* out_opt = run->add_option("--out", out_dir, "Output directory");
    auto* seed_opt = run->add_option("--seed", seed, "Master seed");
    run->add_flag("--override-assumption1", override_flag,
                  "Run even if the target sequence fails its growth check");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        auto const config = reclab::ExperimentConfig::load(config_path);
        if (*validate)
        {
            std::cout << config.to_text();
            return 0;
        }

        reclab::RunRequest request;
        if (*out_opt)
            request.output_dir = out_dir;
        if (*seed_opt)
            request.master_seed = seed;
        request.override_assumption1 = override_flag;
        request.env_workers = reclab::workers_from_env();

        auto const manifest = reclab::run_experiment(config, request);
        std::cout << "wrote " << manifest.artifacts.size() + 1 << " files to "
                  << manifest.output_dir.string() << " (" << manifest.workers
                  << " workers from " << manifest.workers_source << ", "
                  << manifest.wall_clock_seconds << " s)\n";
        for (auto const& a : manifest.artifacts)
            std::cout << "  " << a.sha256 << "  " << a.name << "\n";
        return 0;
    }
    catch (reclab::ConfigError const& e)
    {
        std::cerr << "reclab: invalid config " << config_path << "\n";
        for (auto const& p : e.problems())
            std::cerr << "  " << p << "\n";
        return 2;
    }
    catch (reclab::AssumptionRefused const& e)
    {
        std::cerr << "reclab: " << e.what() << "\n";
        print_report(e.report());
        return 2;
    }
    catch (reclab::Error const& e)
    {
        return fail_with(e);
    }
    catch (std::exception const& e)
    {
        std::cerr << "reclab: " << e.what() << "\n";
        return 1;
    }
}
