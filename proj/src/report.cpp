#include "spillover/report.hpp"

#include "text_util.hpp"

#include "spillover/market_data.hpp"

#include <stdexcept>

namespace spillover::report {

namespace {

std::string num(double x) { return detail::format_sig(x, 10); }

}  // namespace

std::string pair_label(const std::string& market_i, const std::string& market_j) { return market_i + "-" + market_j; }

void write_stationarity(std::ostream& os, const std::vector<StationarityRow>& rows) {
    os << "market,test,statistic,lags,cv1,cv5,cv10,decision\n";
    for (const auto& r : rows) {
        const auto& t = r.report;
        os << r.market << ',' << t.test_name << ',' << num(t.statistic) << ',' << t.lags_used << ','
           << num(t.critical_values.pct1) << ',' << num(t.critical_values.pct5) << ',' << num(t.critical_values.pct10)
           << ',' << t.decision << '\n';
    }
}

void write_garch(std::ostream& os, const std::vector<GarchRow>& rows) {
    os << "market,mu,omega,alpha,beta,se_omega,se_alpha,se_beta,loglik,converged\n";
    for (const auto& r : rows) {
        const auto& p = r.fit.params;
        const auto& se = r.fit.std_errors;
        os << r.label << ',' << num(p.mu) << ',' << num(p.omega) << ',' << num(p.alpha) << ',' << num(p.beta) << ','
           << num(se.omega) << ',' << num(se.alpha) << ',' << num(se.beta) << ',' << num(r.fit.loglik) << ','
           << (r.fit.converged ? "true" : "false") << '\n';
    }
}

void write_bekk_table(std::ostream& os, const std::vector<BekkColumn>& columns) {
    os << "param";
    for (const auto& c : columns) os << ',' << c.pair << " estimate," << c.pair << " se," << c.pair << " stars";
    os << '\n';
    std::vector<std::array<double, BekkParams::kFreeParameters>> est;
    std::vector<std::array<double, BekkParams::kFreeParameters>> se;
    for (const auto& c : columns) {
        est.push_back(c.fit.params.to_array());
        se.push_back(c.fit.std_errors.to_array());
    }
    for (std::size_t i = 0; i < BekkParams::kFreeParameters; ++i) {
        os << BekkParams::names()[i];
        for (std::size_t c = 0; c < columns.size(); ++c) {
            os << ',' << num(est[c][i]) << ',' << num(se[c][i]) << ',' << columns[c].fit.stars[i];
        }
        os << '\n';
    }
    os << "loglik";
    for (const auto& c : columns) os << ',' << num(c.fit.loglik) << ",,";
    os << "\nconverged";
    for (const auto& c : columns) os << ',' << (c.fit.converged ? "true" : "false") << ",,";
    os << '\n';
}

void write_spillover(std::ostream& os, const std::vector<SpilloverRow>& rows) {
    os << "period,market_i,market_j,g21,se_g21,stars_g21,g12,se_g12,stars_g12,direction,"
          "magnitude_pct_i_to_j,magnitude_pct_j_to_i,converged\n";
    for (const auto& r : rows) {
        const auto& s = r.summary;
        os << r.period << ',' << s.market_i << ',' << s.market_j << ',' << num(s.g21) << ',' << num(s.se_g21) << ','
           << s.stars_g21 << ',' << num(s.g12) << ',' << num(s.se_g12) << ',' << s.stars_g12 << ','
           << to_string(s.direction, s.market_i, s.market_j) << ',' << num(s.magnitude_pct_i_to_j) << ','
           << num(s.magnitude_pct_j_to_i) << ',' << (r.converged ? "true" : "false") << '\n';
    }
}

void write_dcc_params(std::ostream& os, const std::vector<DccParamRow>& rows) {
    os << "model,period,fit,alpha,se_alpha,beta,se_beta,nu,se_nu,loglik,converged\n";
    for (const auto& r : rows) {
        if (!r.dcc) throw std::invalid_argument("missing DCC fit for report row");
        const auto& p = r.dcc->params;
        const auto& se = r.dcc->std_errors;
        os << r.model << ',' << r.period << ',' << r.fit << ',' << num(p.alpha) << ',' << num(se.alpha) << ','
           << num(p.beta) << ',' << num(se.beta) << ',' << (p.nu ? num(*p.nu) : "") << ','
           << (se.nu ? num(*se.nu) : "") << ',' << num(r.dcc->loglik_stage2) << ','
           << (r.dcc->converged ? "true" : "false") << '\n';
    }
}

void write_correlations(std::ostream& os, const std::vector<CorrelationSeries>& series) {
    os << "date,pair,rho\n";
    for (const auto& s : series) {
        if (s.dates.size() != static_cast<std::size_t>(s.rho.size())) {
            throw std::invalid_argument("correlation series needs one date per value");
        }
        const std::string pair = pair_label(s.market_i, s.market_j);
        for (std::size_t t = 0; t < s.dates.size(); ++t) {
            os << format_date(s.dates[t]) << ',' << pair << ',' << num(s.rho[static_cast<Eigen::Index>(t)]) << '\n';
        }
    }
}

void write_correlation_summary(std::ostream& os, const std::vector<CorrelationSummaryRow>& rows) {
    os << "model,period,pair,mean,max,min\n";
    for (const auto& r : rows) {
        if (r.rho.size() == 0) throw std::invalid_argument("empty correlation series for " + r.pair);
        os << r.model << ',' << r.period << ',' << r.pair << ',' << num(r.rho.mean()) << ',' << num(r.rho.maxCoeff())
           << ',' << num(r.rho.minCoeff()) << '\n';
    }
}

void write_comparison(std::ostream& os, const std::vector<DccComparison>& rows) {
    os << "pair,mean_pre,mean_during,mean_diff,t_stat,significant\n";
    for (const auto& r : rows) {
        os << r.pair << ',' << num(r.mean_pre) << ',' << num(r.mean_during) << ',' << num(r.mean_diff) << ','
           << num(r.t_stat) << ',' << (r.significant_5pct ? "true" : "false") << '\n';
    }
}

void write_diagnostics(std::ostream& os, const std::vector<DiagnosticRow>& rows) {
    os << "model,period,fit,test,statistic,lags,cv5,p_value,decision\n";
    for (const auto& r : rows) {
        const auto& t = r.report;
        os << r.model << ',' << r.period << ',' << r.fit << ',' << t.test_name << ',' << num(t.statistic) << ',' << t.lags_used << ','
           << num(t.critical_values.pct5) << ',' << (t.p_value ? num(*t.p_value) : "") << ',' << t.decision << '\n';
    }
}

}  // namespace spillover::report
