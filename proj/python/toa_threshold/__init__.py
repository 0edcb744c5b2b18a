"""Time-of-arrival MSE approximations, SNR thresholds and UWB pulse design."""

import json as _json

from ._core import (
    AcrModel,
    EstimationSetup,
    _design_json,
    alb_b,
    alb_z,
    crlb,
    ecrlb,
    lambert_w_m1,
    max_mse,
    mse_ana,
    mse_num,
    q_function,
    q_inverse,
    run_cli,
    simulate_mle_mse,
    thresholds_analytic,
)


def design_pulse(rho0_db, f_low_ghz=3.1, f_high_ghz=10.6, bandwidth_ghz=None):
    """Optimal (B0, f_c0) for the available SNR, as a dict (GHz, ps^2, ps)."""
    return _json.loads(_design_json(rho0_db, f_low_ghz, f_high_ghz, bandwidth_ghz))


def db_to_linear(db):
    return 10.0 ** (db / 10.0)

__all__ = [
    "AcrModel",
    "EstimationSetup",
    "alb_b",
    "alb_z",
    "crlb",
    "db_to_linear",
    "design_pulse",
    "ecrlb",
    "lambert_w_m1",
    "max_mse",
    "mse_ana",
    "mse_num",
    "q_function",
    "q_inverse",
    "run_cli",
    "simulate_mle_mse",
    "thresholds_analytic",
]
