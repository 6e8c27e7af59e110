#include "pipeline.hpp"

#include "spillover/bekk.hpp"
#include "spillover/dcc.hpp"
#include "spillover/diagnostics.hpp"
#include "spillover/report.hpp"
#include "spillover/stationarity.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace spillover::cli {

namespace fs = std::filesystem;

int exit_code(Stage stage) {
    switch (stage) {
        case Stage::ingest: return 10;
        case Stage::stationarity: return 20;
        case Stage::bekk: return 30;
        case Stage::dcc: return 40;
        case Stage::diagnostics: return 50;
    }
    return 1;
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::ingest: return "ingest";
        case Stage::stationarity: return "stationarity";
        case Stage::bekk: return "bekk";
        case Stage::dcc: return "dcc";
        case Stage::diagnostics: return "diagnostics";
    }
    return "unknown";
}

namespace {

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Runs fn(0..count-1) on up to `jobs` threads; the first exception (by index)
// is rethrown after all workers finish.
void parallel_for(int jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

class Run {
public:
    Run(const RunConfig& config, const RunOptions& options) : config_(config), options_(options) {}

    int execute() {
        manifest_["config_hash"] = config_hash(config_);
        manifest_["seed"] = config_.optimizer.seed;
        manifest_["artifacts"] = nlohmann::json::array();
        manifest_["started"] = utc_now();
        int code = 0;
        try {
            stage(Stage::ingest, [&] { ingest(); });
            if (options_.stages.returns) {
                if (options_.stages.stationarity) stage(Stage::stationarity, [&] { stationarity(); });
                if (options_.stages.bekk && config_.has_model("bekk")) stage(Stage::bekk, [&] { bekk(); });
                if (options_.stages.dcc) stage(Stage::dcc, [&] { dcc(); });
                if (options_.stages.compare) stage(Stage::diagnostics, [&] { diagnostics(); });
            }
            manifest_["status"] = "complete";
        } catch (const StageError& e) {
            log("error", e.what());
            manifest_["status"] = "incomplete";
            manifest_["failed_stage"] = to_string(e.stage());
            manifest_["error"] = e.what();
            code = exit_code(e.stage());
        }
        manifest_["finished"] = utc_now();
        write_manifest();
        return code;
    }

private:
    struct DccUnit {
        std::string model;
        std::string period;
        std::string label;  ///< "joint" or pair label
        std::vector<std::string> markets;
        DccFit fit;
    };

    void log(const std::string& tag, const std::string& message) {
        if (options_.quiet && tag != "error") return;
        std::lock_guard lock(log_mutex_);
        std::cerr << '[' << tag << "] " << message << '\n';
    }

    template <typename F>
    void stage(Stage s, F&& body) {
        try {
            body();
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(s, to_string(s) + " stage failed: " + e.what());
        }
    }

    template <typename Writer>
    void artifact(const std::string& name, Stage s, Writer&& write) {
        const fs::path path = config_.output_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw StageError(s, "cannot write " + path.string());
        write(out);
        out.close();
        if (!out) throw StageError(s, "failed writing " + path.string());
        manifest_["artifacts"].push_back({{"name", name}, {"path", path.string()}, {"stage", to_string(s)}});
    }

    void write_manifest() {
        std::error_code ec;
        fs::create_directories(config_.output_dir, ec);
        std::ofstream out(config_.output_dir / "manifest.json", std::ios::binary);
        out << manifest_.dump(2) << '\n';
    }

    void ingest() {
        if (options_.returns_input) {
            if (!fs::exists(*options_.returns_input)) {
                throw StageError(Stage::ingest, "missing input file " + options_.returns_input->string());
            }
            returns_ = read_returns_csv(*options_.returns_input);
        } else {
            std::vector<std::pair<std::string, fs::path>> files;
            for (const auto& m : config_.markets) {
                if (!fs::exists(m.file)) throw StageError(Stage::ingest, "missing input file " + m.file.string());
                files.emplace_back(m.name, m.file);
            }
            const PricePanel panel = load_prices(files);
            log("ingest", std::to_string(panel.rows()) + " common dates across " + std::to_string(panel.markets.size()) + " markets");
            fs::create_directories(config_.output_dir);
            artifact("prices.csv", Stage::ingest, [&](std::ostream& os) { write_prices_csv(os, panel); });
            if (!options_.stages.returns) return;
            returns_ = log_returns(panel);
        }
        fs::create_directories(config_.output_dir);
        artifact("returns.csv", Stage::ingest, [&](std::ostream& os) { write_returns_csv(os, returns_); });
        periods_ = split_periods(returns_, config_.periods);
        for (const auto& p : config_.periods) {
            log("ingest", "period " + p.name + ": " + std::to_string(periods_.at(p.name).rows()) + " returns");
        }
    }

    void stationarity() {
        std::vector<report::StationarityRow> rows;
        for (std::size_t k = 0; k < returns_.cols(); ++k) {
            const Eigen::VectorXd y = returns_.values.col(static_cast<Eigen::Index>(k));
            const std::string& m = returns_.markets[k];
            for (auto test : {adf_test, pp_test, kpss_test}) rows.push_back({m, test(y, std::nullopt)});
        }
        artifact("stationarity.csv", Stage::stationarity, [&](std::ostream& os) { report::write_stationarity(os, rows); });
    }

    void bekk() {
        const auto pairs = config_.effective_pairs();
        struct Job {
            const PeriodSpec* period;
            const MarketPair* pair;
            BekkFit fit;
        };
        std::vector<Job> jobs;
        for (const auto& p : config_.periods) {
            for (const auto& pr : pairs) jobs.push_back({&p, &pr, {}});
        }
        parallel_for(config_.jobs, jobs.size(), [&](std::size_t i) {
            auto& job = jobs[i];
            const ReturnMatrix sub = periods_.at(job.period->name).select({job.pair->foreign, job.pair->home});
            job.fit = fit_bekk(sub.values, config_.optimizer);
            log("bekk", job.period->name + " " + report::pair_label(job.pair->foreign, job.pair->home) +
                            (job.fit.converged ? " converged" : " NOT converged"));
        });
        std::vector<report::SpilloverRow> spill;
        for (const auto& p : config_.periods) {
            std::vector<report::BekkColumn> columns;
            for (const auto& job : jobs) {
                if (job.period != &p) continue;
                columns.push_back({report::pair_label(job.pair->foreign, job.pair->home), job.fit});
                if (job.fit.converged) {
                    spill.push_back({p.name, spillover_summary(job.fit, job.pair->foreign, job.pair->home), true});
                } else {
                    SpilloverSummary s;
                    s.market_i = job.pair->foreign;
                    s.market_j = job.pair->home;
                    s.g21 = job.fit.params.G(1, 0);
                    s.g12 = job.fit.params.G(0, 1);
                    s.se_g21 = job.fit.std_errors.G(1, 0);
                    s.se_g12 = job.fit.std_errors.G(0, 1);
                    spill.push_back({p.name, s, false});
                }
            }
            artifact("bekk_" + p.name + ".csv", Stage::bekk, [&](std::ostream& os) { report::write_bekk_table(os, columns); });
        }
        artifact("spillover.csv", Stage::bekk, [&](std::ostream& os) { report::write_spillover(os, spill); });
    }

    // Markets taking part in any configured pair, in config order.
    std::vector<std::string> pair_markets() const {
        std::vector<std::string> out;
        const auto pairs = config_.effective_pairs();
        for (const auto& m : returns_.markets) {
            for (const auto& p : pairs) {
                if (p.foreign == m || p.home == m) {
                    out.push_back(m);
                    break;
                }
            }
        }
        return out;
    }

    void dcc() {
        const auto pairs = config_.effective_pairs();
        for (const std::string model : {"dcc", "tdcc"}) {
            if (!config_.has_model(model)) continue;
            for (const auto& p : config_.periods) {
                if (config_.pairwise) {
                    for (const auto& pr : pairs) {
                        dcc_units_.push_back({model, p.name, report::pair_label(pr.foreign, pr.home), {pr.foreign, pr.home}, {}});
                    }
                } else {
                    dcc_units_.push_back({model, p.name, "joint", pair_markets(), {}});
                }
            }
        }
        if (dcc_units_.empty()) return;
        parallel_for(config_.jobs, dcc_units_.size(), [&](std::size_t i) {
            auto& u = dcc_units_[i];
            const ReturnMatrix sub = periods_.at(u.period).select(u.markets);
            u.fit = fit_dcc(sub, parse_distribution(u.model), config_.optimizer);
            log(u.model, u.period + " " + u.label + (u.fit.converged ? " converged" : " NOT converged"));
        });

        std::vector<report::DccParamRow> params;
        std::vector<report::GarchRow> garch;
        std::vector<report::CorrelationSummaryRow> summary;
        const std::string first_model = dcc_units_.front().model;
        for (const auto& u : dcc_units_) {
            params.push_back({u.model, u.period, u.label, &u.fit});
            if (u.model == first_model) {
                for (std::size_t k = 0; k < u.fit.stage1.size(); ++k) {
                    const std::string label = u.period + ":" + u.fit.markets[k];
                    const bool seen = std::any_of(garch.begin(), garch.end(), [&](const auto& g) { return g.label == label; });
                    if (!seen) garch.push_back({label, u.fit.stage1[k]});
                }
            }
        }
        for (const std::string model : {"dcc", "tdcc"}) {
            for (const auto& p : config_.periods) {
                std::vector<CorrelationSeries> series;
                for (const auto& pr : pairs) {
                    const auto* unit = find_unit(model, p.name, pr);
                    if (!unit) continue;
                    series.push_back(pair_series(*unit, pr));
                    summary.push_back({model, p.name, report::pair_label(pr.foreign, pr.home), series.back().rho});
                }
                if (series.empty()) continue;
                artifact("correlations_" + model + "_" + p.name + ".csv", Stage::dcc,
                         [&](std::ostream& os) { report::write_correlations(os, series); });
            }
        }
        artifact("dcc_params.csv", Stage::dcc, [&](std::ostream& os) { report::write_dcc_params(os, params); });
        artifact("garch.csv", Stage::dcc, [&](std::ostream& os) { report::write_garch(os, garch); });
        artifact("dcc_summary.csv", Stage::dcc, [&](std::ostream& os) { report::write_correlation_summary(os, summary); });
    }

    const DccUnit* find_unit(const std::string& model, const std::string& period, const MarketPair& pr) const {
        const std::string label = report::pair_label(pr.foreign, pr.home);
        for (const auto& u : dcc_units_) {
            if (u.model == model && u.period == period && (u.label == "joint" || u.label == label)) return &u;
        }
        return nullptr;
    }

    static CorrelationSeries pair_series(const DccUnit& u, const MarketPair& pr) {
        const auto index = [&](const std::string& m) {
            return static_cast<std::size_t>(std::find(u.fit.markets.begin(), u.fit.markets.end(), m) - u.fit.markets.begin());
        };
        return extract_pair(u.fit, index(pr.foreign), index(pr.home));
    }

    void diagnostics() {
        if (dcc_units_.empty()) return;
        std::vector<report::DiagnosticRow> rows;
        for (const auto& u : dcc_units_) {
            rows.push_back({u.model, u.period, u.label, hosking_test(u.fit.std_residuals, config_.lags)});
            rows.push_back({u.model, u.period, u.label, li_mcleod_test(u.fit.std_residuals, config_.lags)});
        }
        artifact("diagnostics.csv", Stage::diagnostics, [&](std::ostream& os) { report::write_diagnostics(os, rows); });

        if (config_.periods.size() < 2) {
            log("compare", "fewer than two periods configured; comparison skipped");
            return;
        }
        const std::string& pre = config_.periods[0].name;
        const std::string& during = config_.periods[1].name;
        for (const std::string model : {"dcc", "tdcc"}) {
            std::vector<DccComparison> rows_cmp;
            for (const auto& pr : config_.effective_pairs()) {
                const auto* a = find_unit(model, pre, pr);
                const auto* b = find_unit(model, during, pr);
                if (!a || !b) continue;
                rows_cmp.push_back(dcc_compare(pair_series(*a, pr).rho, pair_series(*b, pr).rho, report::pair_label(pr.foreign, pr.home)));
            }
            if (rows_cmp.empty()) continue;
            artifact("compare_" + model + ".csv", Stage::diagnostics, [&](std::ostream& os) { report::write_comparison(os, rows_cmp); });
        }
    }

    const RunConfig& config_;
    const RunOptions& options_;
    nlohmann::json manifest_;
    std::mutex log_mutex_;
    ReturnMatrix returns_;
    std::map<std::string, ReturnMatrix> periods_;
    std::vector<DccUnit> dcc_units_;
};

}  // namespace

int run_pipeline(const RunConfig& config, const RunOptions& options) { return Run(config, options).execute(); }

}  // namespace spillover::cli
