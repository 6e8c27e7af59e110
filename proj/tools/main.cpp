#include "config.hpp"
#include "pipeline.hpp"

#include "spillover/simulate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace spillover;
using namespace spillover::cli;

namespace {

// Command-line values that override the config file, one per config key.
struct Overrides {
    std::string config;
    std::vector<std::string> markets;
    std::optional<std::string> home_market;
    std::vector<std::string> periods;
    std::vector<std::string> pairs;
    std::vector<std::string> models;
    std::optional<bool> pairwise;
    std::optional<int> lags;
    std::optional<double> tolerance;
    std::optional<int> max_iterations;
    std::optional<int> restarts;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<int> jobs;
    std::optional<std::string> returns;
    bool quiet = false;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "YAML run configuration (default: $SPILLOVER_CONFIG)");
    cmd->add_option("--markets", o.markets, "NAME=FILE price files, replacing the configured list");
    cmd->add_option("--home_market,--home-market", o.home_market, "Market paired with every other market");
    cmd->add_option("--periods", o.periods, "NAME=YYYY-MM-DD:YYYY-MM-DD analysis periods");
    cmd->add_option("--pairs", o.pairs, "FOREIGN-HOME market pairs");
    cmd->add_option("--models", o.models, "Any of bekk, dcc, tdcc");
    cmd->add_option("--pairwise", o.pairwise, "Fit bivariate DCC models per pair instead of one joint model");
    cmd->add_option("--lags", o.lags, "Portmanteau lag horizon");
    cmd->add_option("--tolerance", o.tolerance, "Optimizer gradient tolerance");
    cmd->add_option("--max_iterations,--max-iterations", o.max_iterations, "Optimizer iteration cap");
    cmd->add_option("--restarts", o.restarts, "Optimizer restarts");
    cmd->add_option("--seed", o.seed, "Seed for restart jitter");
    cmd->add_option("--output_dir,--output-dir", o.output_dir, "Directory receiving the artifacts");
    cmd->add_option("--jobs", o.jobs, "Concurrent model fits")->check(CLI::PositiveNumber);
    cmd->add_option("--returns", o.returns, "Read a returns CSV instead of price files");
    cmd->add_flag("--quiet", o.quiet, "Suppress progress messages");
}

RunConfig resolve_config(const Overrides& o) {
    std::string path = o.config;
    if (path.empty()) {
        if (const char* env = std::getenv("SPILLOVER_CONFIG")) path = env;
    }
    RunConfig c = path.empty() ? RunConfig{} : load_config(path);
    if (!o.markets.empty()) {
        c.markets.clear();
        for (const auto& m : o.markets) c.markets.push_back(parse_market(m));
    }
    if (o.home_market) c.home_market = *o.home_market;
    if (!o.periods.empty()) {
        c.periods.clear();
        for (const auto& p : o.periods) {
            try {
                c.periods.push_back(parse_period(p));
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (!o.pairs.empty()) {
        c.pairs.clear();
        for (const auto& p : o.pairs) c.pairs.push_back(parse_pair(p));
    }
    if (!o.models.empty()) c.models = o.models;
    if (o.pairwise) c.pairwise = *o.pairwise;
    if (o.lags) c.lags = *o.lags;
    if (o.tolerance) c.optimizer.tolerance = *o.tolerance;
    if (o.max_iterations) c.optimizer.max_iterations = *o.max_iterations;
    if (o.restarts) c.optimizer.restarts = *o.restarts;
    if (o.seed) c.optimizer.seed = *o.seed;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.returns && c.markets.empty()) {
        // Market names then come from the returns file header.
        std::ifstream in(*o.returns);
        std::string header;
        if (in && std::getline(in, header)) {
            if (!header.empty() && header.back() == '\r') header.pop_back();
            std::stringstream fields(header);
            std::string name;
            std::getline(fields, name, ',');
            while (std::getline(fields, name, ',')) c.markets.push_back({name, *o.returns});
        }
    }
    c.validate();
    return c;
}

struct SimOptions {
    std::string model = "garch11";
    std::string params;
    std::size_t T = 1000;
    std::size_t K = 1;
    std::uint64_t seed = 1;
    std::size_t burn_in = 500;
    std::string start = "2000-01-01";
    std::vector<std::string> names;
    std::string out;
    std::string prices_dir;
};

int run_simulate(const SimOptions& o) {
    SimSpec spec;
    try {
        spec.model = parse_sim_model(o.model);
        spec.params = parse_sim_params(spec.model, o.params, o.K);
        spec.T = o.T;
        spec.K = o.K;
        spec.seed = o.seed;
        spec.burn_in = o.burn_in;
        spec.start = parse_date(o.start);
        spec.names = o.names;
        spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << '\n';
        return kExitConfig;
    }
    const ReturnMatrix r = simulate(spec);
    if (o.out.empty() || o.out == "-") {
        write_returns_csv(std::cout, r);
    } else {
        std::ofstream out(o.out, std::ios::binary);
        if (!out) {
            std::cerr << "simulate: cannot write " << o.out << '\n';
            return 1;
        }
        write_returns_csv(out, r);
    }
    if (!o.prices_dir.empty()) {
        fs::create_directories(o.prices_dir);
        const PricePanel panel = prices_from_returns(r);
        for (std::size_t k = 0; k < panel.markets.size(); ++k) {
            const PriceSeries s = panel.series(k);
            std::ofstream out(fs::path(o.prices_dir) / (s.market + ".csv"), std::ios::binary);
            out << "date,close\n";
            char buf[40];
            for (std::size_t t = 0; t < s.dates.size(); ++t) {
                std::snprintf(buf, sizeof buf, "%.10f", s.closes[t]);
                out << format_date(s.dates[t]) << ',' << buf << '\n';
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volatility spillover analysis: BEKK and DCC-GARCH estimation with diagnostics"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        StageSelection stages;
    };
    const std::vector<Command> commands{
        {"ingest", "Load and align price files", {false, false, false, false, false}},
        {"returns", "Write aligned prices and log returns", {true, false, false, false, false}},
        {"stationarity", "ADF, PP and KPSS tests per market", {true, true, false, false, false}},
        {"bekk", "Pairwise BEKK(1,1) fits and spillover summary", {true, false, true, false, false}},
        {"dcc", "DCC and t-DCC fits with correlation paths", {true, false, false, true, false}},
        {"compare", "DCC fits, residual diagnostics and cross-period comparison", {true, false, false, true, true}},
        {"run", "Full pipeline", {true, true, true, true, true}},
    };
    std::vector<Overrides> overrides(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        subs.push_back(app.add_subcommand(commands[i].name, commands[i].help));
        add_config_options(subs.back(), overrides[i]);
    }

    SimOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a seeded data-generating process");
    sim_cmd->add_option("--model", sim.model, "iid_gaussian, random_walk, ar1, garch11, bekk11 or dcc_garch");
    sim_cmd->add_option("--params", sim.params, "Model parameters as key=value,...");
    sim_cmd->add_option("--T", sim.T, "Number of observations")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--K", sim.K, "Number of series")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--burn_in,--burn-in", sim.burn_in, "Discarded leading draws");
    sim_cmd->add_option("--start", sim.start, "First date (YYYY-MM-DD)");
    sim_cmd->add_option("--names", sim.names, "Column names")->delimiter(',');
    sim_cmd->add_option("--out", sim.out, "Output returns CSV (default stdout)");
    sim_cmd->add_option("--prices_dir,--prices-dir", sim.prices_dir, "Also write date,close price files per column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (sim_cmd->parsed()) return run_simulate(sim);

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        RunConfig config;
        try {
            config = resolve_config(overrides[i]);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        RunOptions options;
        options.stages = commands[i].stages;
        if (overrides[i].returns) options.returns_input = fs::path(*overrides[i].returns);
        options.quiet = overrides[i].quiet;
        return run_pipeline(config, options);
    }
    return kExitConfig;
}
