#pragma once

#include "spillover/market_data.hpp"
#include "spillover/optimizer.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spillover::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MarketFile {
    std::string name;
    std::filesystem::path file;
};

struct MarketPair {
    std::string foreign;  ///< BEKK variable 1
    std::string home;     ///< BEKK variable 2
};

struct RunConfig {
    std::vector<MarketFile> markets;
    std::string home_market = "IND";
    std::vector<PeriodSpec> periods;
    std::vector<MarketPair> pairs;  ///< empty means every market against home_market
    std::vector<std::string> models{"bekk", "dcc", "tdcc"};
    bool pairwise = false;
    int lags = 10;
    MleSettings optimizer;
    std::filesystem::path output_dir = "output";
    int jobs = 1;

    [[nodiscard]] std::vector<MarketPair> effective_pairs() const;
    [[nodiscard]] bool has_model(const std::string& model) const;
    void validate() const;
};

/// Reads a YAML config; relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// Parsers shared by the config file and command-line overrides.
MarketFile parse_market(const std::string& text);  ///< NAME=FILE
MarketPair parse_pair(const std::string& text);    ///< FOREIGN-HOME

/// Canonical text of every setting that can change a result.
std::string canonical_text(const RunConfig& config);
/// Hex SHA-256 of canonical_text().
std::string config_hash(const RunConfig& config);

}  // namespace spillover::cli
