"""Python bindings for the bessel_lab C++ library."""

import json

from ._core import (
    ConvergenceError,
    DomainError,
    ParseError,
    SamplerError,
    bessel_i_scaled,
    bridge_density,
    mu_pair,
    p_delta_t,
    q_delta_t,
    sample_bridge,
    sigma,
    solve_sl,
    zeta,
    zeta_second_deriv,
)
from ._core import verify as _verify

__all__ = [
    "ConvergenceError",
    "DomainError",
    "ParseError",
    "SamplerError",
    "bessel_i_scaled",
    "bridge_density",
    "mu_pair",
    "p_delta_t",
    "q_delta_t",
    "sample_bridge",
    "sigma",
    "solve_sl",
    "verify",
    "zeta",
    "zeta_second_deriv",
]


def verify(case, seed=0):
    """Check one case given as a dict (same schema as a suite config entry)."""
    return json.loads(_verify(json.dumps(case), seed))
