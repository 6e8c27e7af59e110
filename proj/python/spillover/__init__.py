"""Volatility spillover estimators: unit-root tests, GARCH, BEKK and DCC."""

from ._core import (
    BekkFit,
    DataError,
    DccComparison,
    DccFit,
    GarchFit,
    GarchParams,
    MleSettings,
    PricePanel,
    ReturnMatrix,
    TestReport,
    adf_test,
    bekk_spillover,
    dcc_compare,
    dcc_loglik,
    fit_bekk,
    fit_dcc,
    fit_garch,
    garch_loglik,
    hosking_test,
    kpss_test,
    li_mcleod_test,
    load_prices,
    log_returns,
    pp_test,
    simulate,
    tdcc_loglik,
)

__all__ = [name for name in dir() if not name.startswith("_")]
