#pragma once

#include "halfinv/core.hpp"
#include "halfinv/forward.hpp"
#include "halfinv/transform.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace halfinv {

/// A malformed or inconsistent job description.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Forward, Phi0, Check, Reconstruct, Roundtrip, Example };

struct JobConfig {
    Command command = Command::Forward;
    Primitive sigma = Primitive::zero();  // sigma on [0,1] (forward) or sigma0 on [0,1/2]
    std::optional<SpectralSequence> spectrum;
    BoundaryParam boundary = Robin{0.0};
    std::size_t count = 10;
    std::size_t grid = 257;  // nodes on [0, 1]
    std::optional<std::size_t> truncation;
    KernelMethod kernel = KernelMethod::Collocation;
    double gamma = 0.5;  // example command
    std::filesystem::path output = ".";
};

/// Exit codes of run_job.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitUnsolvable = 2;
inline constexpr int kExitNumerical = 3;

/// Builds a job from its JSON description. Sample-file paths are resolved against
/// `base_dir`. Throws ConfigError.
[[nodiscard]] JobConfig parse_config(const nlohmann::json& json, const std::filesystem::path& base_dir);

/// Reads a two-column CSV (x, value) with strictly increasing x and resamples it onto
/// `grid` by linear interpolation. An optional non-numeric header line is skipped.
[[nodiscard]] SampledFunction load_samples(const std::filesystem::path& path, const GridSpec& grid);

/// Decimal notation with 12 significant digits and no trailing zeros.
[[nodiscard]] std::string format_number(double value);

/// Runs the job, writing its files under config.output and a one-line summary to `log`.
/// Library failures are mapped to exit codes; the caller handles ConfigError.
[[nodiscard]] int run_job(const JobConfig& config, std::ostream& log);

/// parse + run with every failure mapped to an exit code; messages go to `err`.
[[nodiscard]] int run_job(const nlohmann::json& json, const std::filesystem::path& base_dir,
                          std::ostream& log, std::ostream& err);

}  // namespace halfinv
