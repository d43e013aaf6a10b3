"""Heston model with the running price integral, for Asian call pricing.

State ``y = (y1, y2, y3)``: price, instantaneous variance and
``y3 = int_0^t y1 ds``.  Stratonovich fields::

    V0 = (y1 (mu - y2/2), alpha (theta - y2) - beta^2/4, y1)
    V1 = (y1 sqrt(y2), 0, 0)
    V2 = (0, beta sqrt(y2), 0)

driven by independent Brownian motions.  V1 and V2 have exact flows; for V0
the first two components are exact and y3 is approximated.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ConfigurationError, DomainError
from .flows import FlowMap
from .model import SdeModel, VectorField

REFERENCE_PRICE = 6.0473907415e-2

PARAMS_ENV = "WEAKAPPROX_PARAMS"


def reference_price() -> float:
    """Asian call price used as ground truth for the default parameters."""
    return REFERENCE_PRICE


@dataclass(frozen=True)
class HestonParams:
    mu: float = 0.05
    alpha: float = 2.0
    beta: float = 0.1
    theta: float = 0.09
    x1: float = 1.0
    x2: float = 0.09
    T: float = 1.0
    K: float = 1.05

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        if not 2.0 * self.alpha * self.theta - self.beta**2 > 0.0:
            raise ConfigurationError(
                "Feller condition 2*alpha*theta - beta**2 > 0 violated "
                f"({2.0 * self.alpha * self.theta - self.beta**2:.6g})"
            )
        if not (self.x1 > 0 and self.x2 > 0 and self.T > 0):
            raise ConfigurationError("need x1 > 0, x2 > 0 and T > 0")

    @property
    def x0(self) -> np.ndarray:
        return np.array([self.x1, self.x2, 0.0])

    @property
    def J(self) -> float:
        """Mean-reversion level of the Stratonovich variance drift."""
        return self.theta - self.beta**2 / (4.0 * self.alpha)

    def to_text(self) -> str:
        return "".join(f"{k}={v!r}\n" for k, v in asdict(self).items())


def parse_params(text: str) -> HestonParams:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    known = {f.name for f in fields(HestonParams)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown parameter {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigurationError(f"line {lineno}: {key} is not a number") from None
    return HestonParams(**values)


def load_params(path=None) -> HestonParams:
    """Read a parameter file; falls back to ``$WEAKAPPROX_PARAMS``, then defaults."""
    path = path or os.environ.get(PARAMS_ENV)
    if not path:
        return HestonParams()
    try:
        with open(path) as fh:
            return parse_params(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read parameter file {path}: {exc}") from None


def _require_variance(y):
    if np.any(np.asarray(y[1]) < 0.0):
        raise DomainError("negative variance y2 < 0")


def _zeros(y):
    return np.zeros_like(y[0])


def heston_model(params: HestonParams = HestonParams()) -> SdeModel:
    mu, alpha, beta, theta = params.mu, params.alpha, params.beta, params.theta

    def v0(y):
        return np.stack([y[0] * (mu - 0.5 * y[1]), alpha * (theta - y[1]) - 0.25 * beta**2, y[0]])

    def v0_jac(y):
        z, one = _zeros(y), np.ones_like(y[0])
        return np.stack([
            np.stack([mu - 0.5 * y[1], -0.5 * y[0], z]),
            np.stack([z, -alpha * one, z]),
            np.stack([one, z, z]),
        ])

    def v1(y):
        z = _zeros(y)
        return np.stack([y[0] * np.sqrt(y[1]), z, z])

    def v1_jac(y):
        z = _zeros(y)
        r = np.sqrt(y[1])
        return np.stack([
            np.stack([r, 0.5 * y[0] / r, z]),
            np.stack([z, z, z]),
            np.stack([z, z, z]),
        ])

    def v2(y):
        z = _zeros(y)
        return np.stack([z, beta * np.sqrt(y[1]), z])

    def v2_jac(y):
        z = _zeros(y)
        return np.stack([
            np.stack([z, z, z]),
            np.stack([z, 0.5 * beta / np.sqrt(y[1]), z]),
            np.stack([z, z, z]),
        ])

    def ito(y):
        return np.stack([mu * y[0], alpha * (theta - y[1]), y[0]])

    def domain(y):
        return np.asarray(y[1]) >= 0.0

    def project(y):
        out = np.array(y, dtype=float, copy=True)
        out[1] = np.maximum(out[1], 0.0)
        return out

    return SdeModel(
        VectorField(3, v0, v0_jac, "V0"),
        (VectorField(3, v1, v1_jac, "V1"), VectorField(3, v2, v2_jac, "V2")),
        ito_drift_fn=ito,
        domain=domain,
        project=project,
        name="heston",
    )


def flow_v1(s, y):
    """``exp(s V1) y = (y1 exp(s sqrt(y2)), y2, y3)``."""
    y = np.asarray(y, dtype=float)
    _require_variance(y)
    out = y.copy()
    out[0] = y[0] * np.exp(s * np.sqrt(y[1]))
    return out


def flow_v2(s, y, params: HestonParams = HestonParams()):
    """``exp(s V2) y = (y1, (beta s/2 + sqrt(y2))^2, y3)``, for every real s."""
    y = np.asarray(y, dtype=float)
    _require_variance(y)
    out = y.copy()
    # sqrt-then-square is not bit-exact, so keep y2 where s = 0
    out[1] = np.where(np.asarray(s) == 0.0, y[1], (0.5 * params.beta * s + np.sqrt(y[1])) ** 2)
    return out


def _expm1_ratio(a, s):
    """``(exp(a s) - 1) / a`` with the limit ``s`` at ``a = 0``."""
    a = np.asarray(a, dtype=float)
    x = a * s
    small = np.abs(x) < 1e-8
    safe_a = np.where(small, 1.0, a)
    return np.where(small, s * (1.0 + 0.5 * x), np.expm1(x) / safe_a)


def _g1(s, y1, y2, params):
    J = params.J
    return y1 * np.exp((params.mu - 0.5 * J) * s + (y2 - J) / (2.0 * params.alpha) * np.expm1(-params.alpha * s))


def flow_v0(s, y, params: HestonParams = HestonParams(), variant: str = "order3"):
    """Approximate ``exp(s V0) y``.

    y1 and y2 follow the exact flow.  For y3, ``order3`` freezes y2 in the
    integrand (local error O(s^3)); ``order4`` integrates the exact y1 path
    over [0, s] with one classical RK4 step (local error O(s^5)).
    """
    y = np.asarray(y, dtype=float)
    if variant not in ("order3", "order4"):
        raise ValueError(f"unknown variant {variant!r}")
    y1, y2, y3 = y[0], y[1], y[2]
    out = np.empty_like(y)
    out[0] = _g1(s, y1, y2, params)
    out[1] = params.J + (y2 - params.J) * np.exp(-params.alpha * s)
    if variant == "order3":
        out[2] = y3 + y1 * _expm1_ratio(params.mu - 0.5 * y2, s)
    else:
        # RK4 for dy3/dt = g1(t): the integrand does not depend on y3
        k1 = y1
        k23 = _g1(0.5 * s, y1, y2, params)
        k4 = out[0]
        out[2] = y3 + (s / 6.0) * (k1 + 4.0 * k23 + k4)
    return out


def heston_flows(params: HestonParams = HestonParams(), variant: str = "order3") -> tuple:
    """FlowMaps for (V0, V1, V2) with their declared error exponents."""
    model = heston_model(params)
    v0, (v1, v2) = model.v0, model.diffusion
    exponent = 3 if variant == "order3" else 5
    return (
        FlowMap(v0, lambda s, y: flow_v0(s, y, params, variant), exponent, f"closed form, y3 {variant}"),
        FlowMap(v1, flow_v1, float("inf"), "exact"),
        FlowMap(v2, lambda s, y: flow_v2(s, y, params), float("inf"), "exact"),
    )


def asian_call_payoff(terminal, params: HestonParams = HestonParams()):
    """``max(y3/T - K, 0)`` without discounting; batched over columns."""
    terminal = np.asarray(terminal, dtype=float)
    return np.maximum(terminal[2] / params.T - params.K, 0.0)
