#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spillover {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Timestamps are rejected.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// Raised for malformed input files; the message names the file and line.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One market's closing prices as read from disk, sorted by date.
struct PriceSeries {
    std::string market;
    std::vector<Date> dates;
    std::vector<double> closes;
};

/**
 * Date-aligned closing prices. Row t of `prices` holds the close of every
 * market on `dates[t]`; column order follows `markets`.
 *
 * Invariants: dates strictly increasing, every price finite and > 0.
 */
struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> markets;
    Eigen::MatrixXd prices;

    [[nodiscard]] std::size_t rows() const noexcept { return dates.size(); }
    [[nodiscard]] PriceSeries series(std::size_t column) const;
    void validate() const;
};

/// T x K daily log returns. Row t is dated by the later of the two prices.
struct ReturnMatrix {
    std::vector<Date> dates;
    std::vector<std::string> markets;
    Eigen::MatrixXd values;
    std::vector<std::string> period_tags;

    [[nodiscard]] std::size_t rows() const noexcept { return dates.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return markets.size(); }
    [[nodiscard]] std::size_t column_index(std::string_view market) const;
    [[nodiscard]] ReturnMatrix select(const std::vector<std::string>& names) const;
    [[nodiscard]] ReturnMatrix slice(Date start, Date end) const;
    void validate() const;
};

struct PeriodSpec {
    std::string name;
    Date start;
    Date end;
};

/// Parses "name=YYYY-MM-DD:YYYY-MM-DD".
PeriodSpec parse_period(std::string_view text);
void validate_periods(const std::vector<PeriodSpec>& specs);

PriceSeries read_price_csv(const std::filesystem::path& path, std::string market);

/// Intersection alignment: keeps only dates present in every series.
PricePanel align_prices(const std::vector<PriceSeries>& series);

PricePanel load_prices(const std::vector<std::pair<std::string, std::filesystem::path>>& files);

ReturnMatrix log_returns(const PricePanel& panel);

/// Rows are tagged with the period name they fall in; untagged rows are dropped.
std::map<std::string, ReturnMatrix> split_periods(const ReturnMatrix& returns,
                                                  const std::vector<PeriodSpec>& specs);

void write_prices_csv(std::ostream& out, const PricePanel& panel);
void write_returns_csv(std::ostream& out, const ReturnMatrix& returns);
ReturnMatrix read_returns_csv(const std::filesystem::path& path);

}  // namespace spillover
