"""Inverse of the standard normal CDF.

Acklam's rational approximation (relative error about 1.15e-9) followed by
one Halley step against ``Phi`` computed with ``erfc``.  The refinement is
always done in the lower tail, using ``1 - u`` for ``u > 1/2`` (exact in
floating point for ``u >= 1/2``), so accuracy holds at both ends.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

from .errors import DomainError

_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)

_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _lower_half(p):
    """Approximate quantile for ``0 < p <= 1/2``."""
    z = np.empty_like(p)
    tail = p < _P_LOW
    if tail.any():
        q = np.sqrt(-2.0 * np.log(p[tail]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        z[tail] = num / den
    mid = ~tail
    if mid.any():
        q = p[mid] - 0.5
        r = q * q
        num = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        z[mid] = num / den
    # Halley step on Phi(z) - p
    e = 0.5 * erfc(-z / _SQRT2) - p
    u = e * _SQRT2PI * np.exp(0.5 * z * z)
    return z - u / (1.0 + 0.5 * z * u)


def inv_norm_cdf(u):
    """Standard normal quantile, elementwise, for ``0 < u < 1``.

    Raises DomainError for values outside the open unit interval.
    """
    arr = np.asarray(u, dtype=float)
    if not ((arr > 0.0) & (arr < 1.0)).all():
        raise DomainError("inv_norm_cdf requires 0 < u < 1")
    upper = arr > 0.5
    p = np.where(upper, 1.0 - arr, arr)
    z = _lower_half(np.atleast_1d(p)).reshape(arr.shape)
    z = np.where(upper, -z, z)
    if np.ndim(u) == 0:
        return float(z)
    return z
