#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "measures.hpp"
#include "phase.hpp"
#include "systems.hpp"
#include "targets.hpp"

namespace reclab
{
enum class ExperimentKind
{
    sbc,
    en,
    pair,
    decay,
    local,
    bosh,
    validate,
    packing,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(std::string_view name);

//! Every violation found in a config file, not just the first.
class ConfigError : public Error
{
  public:
    explicit ConfigError(std::vector<std::string> problems);
    std::vector<std::string> const& problems() const noexcept { return problems_; }

  private:
    std::vector<std::string> problems_;
};

//---------------------------------------------------------------------------//
/*!
 * Fully resolved experiment description.
 *
 * The text form is flat "section.key = value" lines; '#' starts a comment and
 * lists are comma separated. Unknown keys are rejected. to_text() writes every
 * resolved key in a fixed order and parses back to an equal config.
 */
struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::sbc;

    int dimension = 1;
    Metric metric = Metric::chebyshev;

    std::optional<SystemKind> system_kind;
    std::vector<std::int64_t> matrix;
    int base = 2;
    double angle = 0;
    std::optional<Arithmetic> arithmetic;

    MeasureKind measure_kind = MeasureKind::lebesgue;
    std::string measure_file;
    int measure_resolution = 0;

    TargetKind target_kind = TargetKind::power;
    double target_c = 1;
    std::optional<double> gamma;
    std::optional<double> beta;
    std::vector<double> target_values;
    std::optional<std::int64_t> horizon;
    double assumption1_epsilon = 0.5;
    std::vector<double> alpha_grid{default_alpha_grid.begin(), default_alpha_grid.end()};
    std::int64_t n_min = 3;

    std::optional<double> epsilon;
    std::optional<double> delta;
    std::int64_t probe_budget = 1000;
    std::vector<double> eps_grid;
    std::int64_t geometry_samples = 100000;

    std::optional<std::int64_t> n_max;
    std::int64_t seeds = 100;
    std::int64_t samples = 100000;
    std::vector<std::int64_t> checkpoints;
    std::vector<std::int64_t> n_list;
    std::vector<std::int64_t> m_list;
    std::vector<std::string> observables;
    std::vector<std::int64_t> gaps;
    std::vector<double> radii;
    std::int64_t cap = 100'000'000;
    double alpha = 1;
    std::vector<double> fixed_center;
    bool override_assumption1 = false;

    std::uint64_t master_seed = 0;
    std::int64_t workers = 1;
    std::string output_dir = "out";

    //! Parse and validate; relative file paths resolve against base_dir.
    static ExperimentConfig parse(std::string_view text,
                                  std::filesystem::path const& base_dir = {});
    static ExperimentConfig load(std::filesystem::path const& path);

    //! Canonical (key, value) pairs in output order.
    std::vector<std::pair<std::string, std::string>> entries() const;
    std::string to_text() const;

    // Domain objects; these throw if the config does not describe one.
    SpaceSpec space() const;
    SystemSpec system() const;
    MeasureSpec measure() const;
    TargetSequence targets() const;

    friend bool operator==(ExperimentConfig const&, ExperimentConfig const&) = default;
};

}  // namespace reclab
