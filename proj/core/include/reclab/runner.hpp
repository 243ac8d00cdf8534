#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "error.hpp"

namespace reclab
{
std::string_view library_version();

//! Command-line overrides applied on top of a validated config.
struct RunRequest
{
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::uint64_t> master_seed;
    bool override_assumption1 = false;
    //! Worker count from the environment; beats run.workers when set.
    std::optional<unsigned> env_workers;
};

struct Artifact
{
    std::string name;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest
{
    std::filesystem::path output_dir;
    std::vector<Artifact> artifacts;  //!< summary.json and CSVs, not the manifest
    double wall_clock_seconds = 0;
    std::string version;
    unsigned workers = 1;
    std::string workers_source;  //!< "config" or "env"
};

//! Parse RECLAB_WORKERS; empty when unset, throws when malformed.
std::optional<unsigned> workers_from_env();

/*!
 * Run the configured experiment and write its artifacts plus manifest.json.
 *
 * Everything except manifest.json is a pure function of the config and the
 * master seed. Files written by a failed run are removed again.
 */
RunManifest run_experiment(ExperimentConfig config, RunRequest const& request);

std::string sha256_hex(std::string_view data);
std::string sha256_file(std::filesystem::path const& path);

//! Process exit code for an error category (2 input/degenerate, 3 numerical).
int exit_code_for(ErrorKind kind);

}  // namespace reclab
