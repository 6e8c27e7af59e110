#pragma once

#include "spillover/bekk.hpp"
#include "spillover/dcc.hpp"
#include "spillover/diagnostics.hpp"
#include "spillover/garch.hpp"
#include "spillover/test_report.hpp"

#include <ostream>
#include <string>
#include <vector>

// CSV writers for every pipeline artifact. Each writer emits its header line
// followed by one row per record; numbers use 10 significant digits.
namespace spillover::report {

std::string pair_label(const std::string& market_i, const std::string& market_j);

struct StationarityRow {
    std::string market;
    TestReport report;
};
/// market,test,statistic,lags,cv1,cv5,cv10,decision
void write_stationarity(std::ostream& os, const std::vector<StationarityRow>& rows);

struct GarchRow {
    std::string label;  ///< market, optionally qualified by period
    GarchFit fit;
};
/// market,mu,omega,alpha,beta,se_omega,se_alpha,se_beta,loglik,converged
void write_garch(std::ostream& os, const std::vector<GarchRow>& rows);

struct BekkColumn {
    std::string pair;
    BekkFit fit;
};
/// One row per coefficient (c11 ... g22), then loglik and converged; three
/// columns (estimate, se, stars) per pair.
void write_bekk_table(std::ostream& os, const std::vector<BekkColumn>& columns);

struct SpilloverRow {
    std::string period;
    SpilloverSummary summary;
    bool converged = false;
};
void write_spillover(std::ostream& os, const std::vector<SpilloverRow>& rows);

struct DccParamRow {
    std::string model;
    std::string period;
    std::string fit;  ///< "joint" or a pair label
    const DccFit* dcc = nullptr;
};
/// model,period,fit,alpha,se_alpha,beta,se_beta,nu,se_nu,loglik,converged
void write_dcc_params(std::ostream& os, const std::vector<DccParamRow>& rows);

/// date,pair,rho
void write_correlations(std::ostream& os, const std::vector<CorrelationSeries>& series);

struct CorrelationSummaryRow {
    std::string model;
    std::string period;
    std::string pair;
    Eigen::VectorXd rho;
};
/// model,period,pair,mean,max,min
void write_correlation_summary(std::ostream& os, const std::vector<CorrelationSummaryRow>& rows);

/// pair,mean_pre,mean_during,mean_diff,t_stat,significant
void write_comparison(std::ostream& os, const std::vector<DccComparison>& rows);

struct DiagnosticRow {
    std::string model;
    std::string period;
    std::string fit;
    TestReport report;
};
/// model,period,fit,test,statistic,lags,cv5,p_value,decision
void write_diagnostics(std::ostream& os, const std::vector<DiagnosticRow>& rows);

}  // namespace spillover::report
