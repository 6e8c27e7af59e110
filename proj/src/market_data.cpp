#include "spillover/market_data.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace spillover {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string where(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

}  // namespace

Date parse_date(std::string_view text) {
    text = detail::trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("expected YYYY-MM-DD date, got '" + std::string(text) + "'");
    }
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (!is_digit(text[i])) {
            throw std::invalid_argument("expected YYYY-MM-DD date, got '" + std::string(text) + "'");
        }
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
        return v;
    };
    const Date date{std::chrono::year{num(0, 4)}, std::chrono::month{static_cast<unsigned>(num(5, 2))},
                    std::chrono::day{static_cast<unsigned>(num(8, 2))}};
    if (!date.ok()) throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string format_date(Date date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

PriceSeries PricePanel::series(std::size_t column) const {
    PriceSeries s{markets.at(column), dates, {}};
    s.closes.assign(prices.col(static_cast<Eigen::Index>(column)).data(),
                    prices.col(static_cast<Eigen::Index>(column)).data() + prices.rows());
    return s;
}

void PricePanel::validate() const {
    if (static_cast<std::size_t>(prices.rows()) != dates.size() ||
        static_cast<std::size_t>(prices.cols()) != markets.size()) {
        throw std::invalid_argument("price panel shape does not match its labels");
    }
    for (std::size_t t = 1; t < dates.size(); ++t) {
        if (!(dates[t - 1] < dates[t])) throw std::invalid_argument("panel dates not strictly increasing");
    }
    if (!(prices.array().isFinite().all() && (prices.array() > 0.0).all())) {
        throw std::invalid_argument("panel prices must be finite and positive");
    }
}

std::size_t ReturnMatrix::column_index(std::string_view market) const {
    const auto it = std::find(markets.begin(), markets.end(), market);
    if (it == markets.end()) throw std::invalid_argument("unknown market '" + std::string(market) + "'");
    return static_cast<std::size_t>(it - markets.begin());
}

ReturnMatrix ReturnMatrix::select(const std::vector<std::string>& names) const {
    ReturnMatrix out;
    out.dates = dates;
    out.period_tags = period_tags;
    out.markets = names;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        out.values.col(static_cast<Eigen::Index>(k)) = values.col(static_cast<Eigen::Index>(column_index(names[k])));
    }
    return out;
}

ReturnMatrix ReturnMatrix::slice(Date start, Date end) const {
    ReturnMatrix out;
    out.markets = markets;
    std::vector<Eigen::Index> keep;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (!(dates[t] < start) && !(end < dates[t])) keep.push_back(static_cast<Eigen::Index>(t));
    }
    out.values.resize(static_cast<Eigen::Index>(keep.size()), values.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.values.row(static_cast<Eigen::Index>(i)) = values.row(keep[i]);
        out.dates.push_back(dates[static_cast<std::size_t>(keep[i])]);
        out.period_tags.push_back(period_tags.empty() ? std::string{} : period_tags[static_cast<std::size_t>(keep[i])]);
    }
    return out;
}

void ReturnMatrix::validate() const {
    if (static_cast<std::size_t>(values.rows()) != dates.size() ||
        static_cast<std::size_t>(values.cols()) != markets.size() ||
        (!period_tags.empty() && period_tags.size() != dates.size())) {
        throw std::invalid_argument("return matrix shape does not match its labels");
    }
    for (std::size_t t = 1; t < dates.size(); ++t) {
        if (!(dates[t - 1] < dates[t])) throw std::invalid_argument("return dates not strictly increasing");
    }
    if (!values.array().isFinite().all()) throw std::invalid_argument("return matrix contains non-finite values");
}

PeriodSpec parse_period(std::string_view text) {
    const auto eq = text.find('=');
    const auto colon = text.find(':', eq == std::string_view::npos ? 0 : eq);
    if (eq == std::string_view::npos || colon == std::string_view::npos || eq == 0) {
        throw std::invalid_argument("period must look like name=YYYY-MM-DD:YYYY-MM-DD, got '" +
                                    std::string(text) + "'");
    }
    PeriodSpec spec{std::string(detail::trim(text.substr(0, eq))), parse_date(text.substr(eq + 1, colon - eq - 1)),
                    parse_date(text.substr(colon + 1))};
    validate_periods({spec});
    return spec;
}

void validate_periods(const std::vector<PeriodSpec>& specs) {
    std::set<std::string> names;
    for (const auto& s : specs) {
        if (s.name.empty()) throw std::invalid_argument("period name must not be empty");
        if (s.end < s.start) throw std::invalid_argument("period '" + s.name + "' ends before it starts");
        if (!names.insert(s.name).second) throw std::invalid_argument("duplicate period name '" + s.name + "'");
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            const auto& a = specs[i];
            const auto& b = specs[j];
            if (!(a.end < b.start) && !(b.end < a.start)) {
                throw std::invalid_argument("periods '" + a.name + "' and '" + b.name + "' overlap");
            }
        }
    }
}

PriceSeries read_price_csv(const std::filesystem::path& path, std::string market) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open price file " + path.string());

    PriceSeries out{std::move(market), {}, {}};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<std::pair<Date, double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
        view = detail::trim(view);
        if (view.empty()) continue;
        const auto fields = detail::split(view);
        if (!header_seen) {
            if (fields.size() != 2 || detail::trim(fields[0]) != "date" || detail::trim(fields[1]) != "close") {
                throw DataError(where(path, line_no) + ": expected header 'date,close'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 2) throw DataError(where(path, line_no) + ": expected 2 fields");
        Date date;
        try {
            date = parse_date(fields[0]);
        } catch (const std::invalid_argument& e) {
            throw DataError(where(path, line_no) + ": " + e.what());
        }
        const auto close = detail::parse_double(fields[1]);
        if (!close) throw DataError(where(path, line_no) + ": unparseable close '" + std::string(fields[1]) + "'");
        if (!std::isfinite(*close) || *close <= 0.0) {
            throw DataError(where(path, line_no) + ": close must be positive and finite, got " +
                            std::string(detail::trim(fields[1])));
        }
        rows.emplace_back(date, *close);
    }
    if (!header_seen) throw DataError(path.string() + ": empty file");

    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first) {
            throw DataError(path.string() + ": duplicate date " + format_date(rows[i].first));
        }
    }
    for (const auto& [d, c] : rows) {
        out.dates.push_back(d);
        out.closes.push_back(c);
    }
    return out;
}

PricePanel align_prices(const std::vector<PriceSeries>& series) {
    if (series.empty()) throw std::invalid_argument("no price series to align");

    std::vector<Date> common = series.front().dates;
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), series[k].dates.begin(), series[k].dates.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty()) throw DataError("price files share no common dates");

    PricePanel panel;
    panel.dates = common;
    panel.prices.resize(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(series.size()));
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (std::find(panel.markets.begin(), panel.markets.end(), s.market) != panel.markets.end()) {
            throw std::invalid_argument("duplicate market name '" + s.market + "'");
        }
        panel.markets.push_back(s.market);
        std::size_t j = 0;
        for (std::size_t t = 0; t < common.size(); ++t) {
            while (s.dates[j] < common[t]) ++j;
            panel.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = s.closes[j];
        }
    }
    panel.validate();
    return panel;
}

PricePanel load_prices(const std::vector<std::pair<std::string, std::filesystem::path>>& files) {
    std::vector<PriceSeries> series;
    series.reserve(files.size());
    for (const auto& [name, path] : files) series.push_back(read_price_csv(path, name));
    return align_prices(series);
}

ReturnMatrix log_returns(const PricePanel& panel) {
    if (panel.rows() < 2) throw std::invalid_argument("log returns need at least 2 dated prices");
    panel.validate();

    const Eigen::Index T = panel.prices.rows() - 1;
    ReturnMatrix out;
    out.markets = panel.markets;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.period_tags.assign(static_cast<std::size_t>(T), std::string{});
    out.values = panel.prices.bottomRows(T).array().log() - panel.prices.topRows(T).array().log();
    return out;
}

std::map<std::string, ReturnMatrix> split_periods(const ReturnMatrix& returns,
                                                  const std::vector<PeriodSpec>& specs) {
    validate_periods(specs);
    std::map<std::string, ReturnMatrix> out;
    for (const auto& spec : specs) {
        ReturnMatrix part = returns.slice(spec.start, spec.end);
        if (part.rows() == 0) {
            throw std::invalid_argument("empty period '" + spec.name + "' (" + format_date(spec.start) + " to " +
                                        format_date(spec.end) + ")");
        }
        std::fill(part.period_tags.begin(), part.period_tags.end(), spec.name);
        out.emplace(spec.name, std::move(part));
    }
    return out;
}

void write_prices_csv(std::ostream& out, const PricePanel& panel) {
    out << "date";
    for (const auto& m : panel.markets) out << ',' << m;
    out << '\n';
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out << format_date(panel.dates[t]);
        for (Eigen::Index k = 0; k < panel.prices.cols(); ++k) {
            out << ',' << detail::format_full(panel.prices(static_cast<Eigen::Index>(t), k));
        }
        out << '\n';
    }
}

void write_returns_csv(std::ostream& out, const ReturnMatrix& returns) {
    out << "date";
    for (const auto& m : returns.markets) out << ',' << m;
    out << '\n';
    for (std::size_t t = 0; t < returns.rows(); ++t) {
        out << format_date(returns.dates[t]);
        for (Eigen::Index k = 0; k < returns.values.cols(); ++k) {
            out << ',' << detail::format_full(returns.values(static_cast<Eigen::Index>(t), k));
        }
        out << '\n';
    }
}

ReturnMatrix read_returns_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open returns file " + path.string());

    ReturnMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = detail::trim(line);
        if (view.empty()) continue;
        const auto fields = detail::split(view);
        if (out.markets.empty()) {
            if (fields.size() < 2 || detail::trim(fields[0]) != "date") {
                throw DataError(where(path, line_no) + ": expected header 'date,<market>,...'");
            }
            for (std::size_t k = 1; k < fields.size(); ++k) out.markets.emplace_back(detail::trim(fields[k]));
            continue;
        }
        if (fields.size() != out.markets.size() + 1) {
            throw DataError(where(path, line_no) + ": expected " + std::to_string(out.markets.size() + 1) + " fields");
        }
        try {
            out.dates.push_back(parse_date(fields[0]));
        } catch (const std::invalid_argument& e) {
            throw DataError(where(path, line_no) + ": " + e.what());
        }
        std::vector<double> row;
        for (std::size_t k = 1; k < fields.size(); ++k) {
            const auto v = detail::parse_double(fields[k]);
            if (!v || !std::isfinite(*v)) throw DataError(where(path, line_no) + ": bad return value");
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    if (out.markets.empty()) throw DataError(path.string() + ": empty file");
    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.markets.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t k = 0; k < rows[t].size(); ++k) {
            out.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = rows[t][k];
        }
    }
    out.period_tags.assign(out.dates.size(), std::string{});
    out.validate();
    return out;
}

}  // namespace spillover
