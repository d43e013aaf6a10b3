"""Time-s flows ``exp(sV)x`` of autonomous vector fields.

A :class:`FlowMap` either wraps a closed-form solution (error exponent
``inf``) or a fixed-step classical Runge-Kutta integrator, optionally boosted
by local Richardson extrapolation.  The flow time ``s`` may be a scalar or an
array with one entry per batch column, which is how the schemes pass
per-sample Brownian increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, ContractError, FlowDivergence
from .model import VectorField

RK4_EXPONENT = 5


@dataclass(frozen=True)
class FlowMap:
    """``apply(s, x)`` differs from the exact flow by ``O(s**error_exponent)``."""

    field: VectorField
    fn: Callable
    error_exponent: float
    description: str = ""

    @property
    def exact(self) -> bool:
        return math.isinf(self.error_exponent)

    def apply(self, s, x):
        x = np.asarray(x, dtype=float)
        s_arr = np.asarray(s, dtype=float)
        if s_arr.ndim == 0 and s_arr == 0.0:
            return x.copy()
        out = self.fn(s, x)
        # exact identity at s = 0, to the last bit
        if s_arr.ndim > 0:
            zero = s_arr == 0.0
            if zero.any():
                out = np.where(zero, x, out)
        return out


def _rk4_substep(field, x, h):
    k1 = field(x)
    k2 = field(x + (0.5 * h) * k1)
    k3 = field(x + (0.5 * h) * k2)
    k4 = field(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_flow(field: VectorField, s, x, substeps: int = 1):
    """Classical 4-stage Runge-Kutta over ``substeps`` equal pieces of [0, s]."""
    if substeps < 1:
        raise ContractError("substeps must be >= 1")
    x = np.asarray(x, dtype=float)
    h = np.asarray(s, dtype=float) / substeps
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        for k in range(substeps):
            x = _rk4_substep(field, x, h)
            if not np.isfinite(x).all():
                raise FlowDivergence(
                    f"non-finite state in RK4 flow of {field.name or 'field'}",
                    sub_time=(k + 1) / substeps,
                )
    return x


def richardson_flow(base: FlowMap, s, x, levels: int):
    """Local Richardson extrapolation of ``base`` repeated ``levels`` times.

    Each level combines one full step with two half steps.  If the level
    below has local error ``C s**q``, two half steps leave ``C s**q / 2**(q-1)``,
    so the combination uses weights ``2**(q-1)/(2**(q-1)-1)`` and
    ``-1/(2**(q-1)-1)`` and the exponent rises to ``q + 1``.
    """
    if levels < 0:
        raise ContractError("levels must be non-negative")
    q = base.error_exponent
    if math.isinf(q):
        raise ContractError("Richardson extrapolation needs a finite error exponent")
    if levels == 0:
        return base.apply(s, x)
    half = np.asarray(s, dtype=float) / 2.0
    coarse = richardson_flow(base, s, x, levels - 1)
    fine = richardson_flow(base, half, richardson_flow(base, half, x, levels - 1), levels - 1)
    w = 2.0 ** (q + levels - 2)
    return (w * fine - coarse) / (w - 1.0)


def make_flow(
    field: VectorField,
    exact: Optional[Callable] = None,
    substeps: int = 1,
    levels: int = 0,
    probe=None,
    debug: bool = False,
    exponent: Optional[float] = None,
) -> FlowMap:
    """Build a FlowMap from a closed form or from RK4 + Richardson settings.

    For a closed form, ``probe`` (a state in the field's domain) is used to
    check the identity at s=0; with ``debug`` the semigroup property is also
    checked there.  ``exponent`` overrides the declared error exponent of a
    closed-form callback that is only an approximation.
    """
    if exact is not None:
        declared = math.inf if exponent is None else float(exponent)
        flow = FlowMap(field, exact, declared, "closed form")
        if probe is not None:
            _check_closed_form(exact, np.asarray(probe, dtype=float), declared, debug)
        return flow

    if substeps < 1 or levels < 0:
        raise ConfigurationError("need substeps >= 1 and levels >= 0")
    base = FlowMap(
        field,
        lambda s, x: rk4_flow(field, s, x, substeps),
        RK4_EXPONENT,
        f"rk4 x{substeps}",
    )
    if levels == 0:
        return base
    return FlowMap(
        field,
        lambda s, x: richardson_flow(base, s, x, levels),
        RK4_EXPONENT + levels,
        f"rk4 x{substeps} + {levels} richardson",
    )


def _check_closed_form(fn, probe, exponent, debug):
    out = np.asarray(fn(0.0, probe), dtype=float)
    if out.shape != probe.shape or not np.allclose(out, probe, rtol=1e-12, atol=0.0):
        raise ConfigurationError("closed-form flow is not the identity at s=0")
    if debug and math.isinf(exponent):
        s, t = 0.1, 0.2
        lhs = np.asarray(fn(s, fn(t, probe)), dtype=float)
        rhs = np.asarray(fn(s + t, probe), dtype=float)
        if not np.allclose(lhs, rhs, rtol=1e-10, atol=1e-14):
            raise ConfigurationError("closed-form flow fails the semigroup check")
