#pragma once

#include "config.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spillover::cli {

enum class Stage { ingest, stationarity, bekk, dcc, diagnostics };

int exit_code(Stage stage);
std::string to_string(Stage stage);

constexpr int kExitConfig = 64;

class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& what) : std::runtime_error(what), stage_(stage) {}
    [[nodiscard]] Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct StageSelection {
    bool returns = true;  ///< false stops after writing the aligned prices
    bool stationarity = true;
    bool bekk = true;
    bool dcc = true;
    bool compare = true;
};

struct RunOptions {
    StageSelection stages;
    std::optional<std::filesystem::path> returns_input;  ///< skips price ingestion
    bool quiet = false;
};

/// Runs the selected stages, writes artifacts plus manifest.json into the
/// configured output directory and returns the process exit code.
int run_pipeline(const RunConfig& config, const RunOptions& options);

}  // namespace spillover::cli
