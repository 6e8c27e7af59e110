#include "config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace spillover::cli {

namespace {

const std::set<std::string> kKnownKeys{"markets", "home_market", "periods",  "pairs",     "models",
                                       "pairwise", "lags",       "tolerance", "max_iterations",
                                       "restarts", "seed",       "output_dir", "jobs"};
const std::set<std::string> kKnownModels{"bekk", "dcc", "tdcc"};

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("config key '" + key + "' has an invalid value");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

MarketFile parse_market(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw ConfigError("market must be NAME=FILE, got '" + text + "'");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

MarketPair parse_pair(const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == text.size()) {
        throw ConfigError("pair must be FOREIGN-HOME, got '" + text + "'");
    }
    return {text.substr(0, dash), text.substr(dash + 1)};
}

std::vector<MarketPair> RunConfig::effective_pairs() const {
    if (!pairs.empty()) return pairs;
    std::vector<MarketPair> out;
    for (const auto& m : markets) {
        if (m.name != home_market) out.push_back({m.name, home_market});
    }
    return out;
}

bool RunConfig::has_model(const std::string& model) const {
    return std::find(models.begin(), models.end(), model) != models.end();
}

void RunConfig::validate() const {
    if (markets.empty()) throw ConfigError("no markets configured");
    std::set<std::string> names;
    for (const auto& m : markets) {
        if (m.name.empty() || m.name.find_first_of(",-= ") != std::string::npos) {
            throw ConfigError("invalid market name '" + m.name + "'");
        }
        if (!names.insert(m.name).second) throw ConfigError("duplicate market '" + m.name + "'");
    }
    for (const auto& p : effective_pairs()) {
        if (!names.count(p.foreign) || !names.count(p.home)) {
            throw ConfigError("pair " + p.foreign + "-" + p.home + " names an unconfigured market");
        }
        if (p.foreign == p.home) throw ConfigError("pair needs two distinct markets");
    }
    if ((has_model("bekk") || has_model("dcc") || has_model("tdcc")) && effective_pairs().empty()) {
        throw ConfigError("no market pairs: configure pairs or a home_market with at least one other market");
    }
    for (const auto& m : models) {
        if (!kKnownModels.count(m)) throw ConfigError("unknown model '" + m + "'");
    }
    if (periods.empty()) throw ConfigError("no periods configured");
    try {
        validate_periods(periods);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (lags < 1) throw ConfigError("lags must be at least 1");
    if (!(optimizer.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (optimizer.max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (optimizer.restarts < 0) throw ConfigError("restarts must be non-negative");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

RunConfig load_config(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::BadFile&) {
        throw ConfigError("cannot read config file " + path.string());
    } catch (const YAML::Exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config root must be a mapping");
    const std::filesystem::path base = std::filesystem::absolute(path).parent_path();

    RunConfig c;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    if (const auto n = root["markets"]) {
        if (!n.IsSequence()) throw ConfigError("'markets' must be a list");
        for (const auto& m : n) {
            MarketFile mf;
            if (m.IsScalar()) {
                mf = parse_market(m.as<std::string>());
            } else if (m.IsMap() && m["name"] && m["file"]) {
                mf = {scalar<std::string>(m["name"], "markets.name"), scalar<std::string>(m["file"], "markets.file")};
            } else {
                throw ConfigError("each market needs 'name' and 'file'");
            }
            mf.file = resolve(base, mf.file);
            c.markets.push_back(std::move(mf));
        }
    }
    if (const auto n = root["home_market"]) c.home_market = scalar<std::string>(n, "home_market");
    if (const auto n = root["periods"]) {
        if (!n.IsSequence()) throw ConfigError("'periods' must be a list");
        for (const auto& p : n) {
            try {
                if (p.IsScalar()) {
                    c.periods.push_back(parse_period(p.as<std::string>()));
                } else {
                    c.periods.push_back({scalar<std::string>(p["name"], "periods.name"),
                                         parse_date(scalar<std::string>(p["start"], "periods.start")),
                                         parse_date(scalar<std::string>(p["end"], "periods.end"))});
                }
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError(std::string("bad period: ") + e.what());
            }
        }
    }
    if (const auto n = root["pairs"]) {
        for (const auto& p : n) {
            if (p.IsSequence() && p.size() == 2) {
                c.pairs.push_back({scalar<std::string>(p[0], "pairs"), scalar<std::string>(p[1], "pairs")});
            } else {
                c.pairs.push_back(parse_pair(scalar<std::string>(p, "pairs")));
            }
        }
    }
    if (const auto n = root["models"]) c.models = scalar<std::vector<std::string>>(n, "models");
    if (const auto n = root["pairwise"]) c.pairwise = scalar<bool>(n, "pairwise");
    if (const auto n = root["lags"]) c.lags = scalar<int>(n, "lags");
    if (const auto n = root["tolerance"]) c.optimizer.tolerance = scalar<double>(n, "tolerance");
    if (const auto n = root["max_iterations"]) c.optimizer.max_iterations = scalar<int>(n, "max_iterations");
    if (const auto n = root["restarts"]) c.optimizer.restarts = scalar<int>(n, "restarts");
    if (const auto n = root["seed"]) c.optimizer.seed = scalar<std::uint64_t>(n, "seed");
    if (const auto n = root["output_dir"]) c.output_dir = resolve(base, scalar<std::string>(n, "output_dir"));
    if (const auto n = root["jobs"]) c.jobs = scalar<int>(n, "jobs");
    return c;
}

std::string canonical_text(const RunConfig& c) {
    std::ostringstream os;
    char buf[64];
    for (const auto& m : c.markets) os << "market " << m.name << ' ' << m.file.string() << '\n';
    os << "home_market " << c.home_market << '\n';
    for (const auto& p : c.periods) os << "period " << p.name << ' ' << format_date(p.start) << ' ' << format_date(p.end) << '\n';
    for (const auto& p : c.effective_pairs()) os << "pair " << p.foreign << '-' << p.home << '\n';
    for (const auto& m : c.models) os << "model " << m << '\n';
    os << "pairwise " << c.pairwise << '\n' << "lags " << c.lags << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", c.optimizer.tolerance);
    os << "tolerance " << buf << '\n'
       << "max_iterations " << c.optimizer.max_iterations << '\n'
       << "restarts " << c.optimizer.restarts << '\n'
       << "seed " << c.optimizer.seed << '\n';
    return os.str();
}

std::string config_hash(const RunConfig& config) {
    const std::string text = canonical_text(config);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", digest[i]);
        hex += byte;
    }
    return hex;
}

}  // namespace spillover::cli
