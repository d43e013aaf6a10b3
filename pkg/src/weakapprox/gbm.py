"""One-dimensional geometric Brownian motion, a test model with exact flows.

Itô form ``dY = mu Y dt + sigma Y dB``; Stratonovich drift
``(mu - sigma^2/2) y``.  Both fields are linear, so every flow is an
exponential and E[Y_T] = exp(mu T) Y_0.
"""

from __future__ import annotations

import numpy as np

from .flows import FlowMap
from .model import SdeModel, linear_field


def gbm_model(mu: float = 0.05, sigma: float = 0.3) -> SdeModel:
    drift = linear_field([[mu - 0.5 * sigma**2]], "V0")
    vol = linear_field([[sigma]], "V1")
    return SdeModel(drift, (vol,), name="gbm")


def gbm_flows(mu: float = 0.05, sigma: float = 0.3) -> tuple:
    model = gbm_model(mu, sigma)
    c0 = mu - 0.5 * sigma**2

    def f0(s, y):
        return np.asarray(y, dtype=float) * np.exp(c0 * np.asarray(s))

    def f1(s, y):
        return np.asarray(y, dtype=float) * np.exp(sigma * np.asarray(s))

    return (
        FlowMap(model.v0, f0, float("inf"), "exact"),
        FlowMap(model.diffusion[0], f1, float("inf"), "exact"),
    )
