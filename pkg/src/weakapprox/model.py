"""Vector fields and SDE models in Stratonovich form.

States are float64 arrays of shape ``(N,)`` for a single point or ``(N, M)``
for a batch of ``M`` points stored column-wise.  Field callbacks must accept
both layouts, which is natural when they are written in terms of the rows
``x[0], x[1], ...``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractError

Array = np.ndarray

_FD_SCALE = np.finfo(float).eps ** (1.0 / 3.0)


def _check_state(x, dim: int) -> Array:
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2) or x.shape[0] != dim:
        raise ContractError(f"state of shape {x.shape} does not match dimension {dim}")
    return x


@dataclass(frozen=True)
class VectorField:
    """A smooth autonomous vector field on R^N.

    ``jacobian(x)`` returns ``J[i, k] = dV^i/dx_k`` with shape ``(N, N)`` or
    ``(N, N, M)`` for batched input.
    """

    dim: int
    fn: Callable[[Array], Array]
    jacobian: Optional[Callable[[Array], Array]] = None
    name: str = ""

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ContractError("vector field dimension must be positive")

    def __call__(self, x) -> Array:
        x = _check_state(x, self.dim)
        out = np.asarray(self.fn(x), dtype=float)
        if out.shape != x.shape:
            raise ContractError(
                f"field {self.name or '?'} returned shape {out.shape} for input {x.shape}"
            )
        return out

    def jac(self, x, fd_fallback: bool = True) -> Array:
        """Analytic Jacobian if available, else central finite differences."""
        x = _check_state(x, self.dim)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        if not fd_fallback:
            raise ContractError(f"field {self.name or '?'} has no analytic Jacobian")
        return fd_jacobian(self, x)


def fd_jacobian(v: VectorField, x) -> Array:
    """Central-difference Jacobian with step ``max(1, |x_k|) * eps**(1/3)``."""
    x = _check_state(x, v.dim)
    n = v.dim
    jac = np.empty((n, n) + x.shape[1:])
    for k in range(n):
        h = np.maximum(1.0, np.abs(x[k])) * _FD_SCALE
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        # the actual step after rounding keeps the quotient consistent
        jac[:, k] = (v(xp) - v(xm)) / (xp[k] - xm[k])
    return jac


def directional_apply(v: VectorField, f_grad, x) -> Array:
    """Evaluate ``(Vf)(x) = sum_i V^i(x) df/dx_i`` given the gradient of f at x."""
    x = _check_state(x, v.dim)
    f_grad = np.asarray(f_grad, dtype=float)
    if f_grad.shape[0] != v.dim:
        raise ContractError(f"gradient length {f_grad.shape[0]} does not match dimension {v.dim}")
    return np.sum(v(x) * f_grad, axis=0)


@dataclass(frozen=True)
class SdeModel:
    """``dY = V0(Y) dt + sum_j Vj(Y) o dB^j`` in Stratonovich form.

    Optional hooks:

    ito_drift_fn
        Closed-form Itô drift, used in place of the Jacobian formula (for
        fields whose Jacobian is singular on the domain boundary).
    domain
        Returns a boolean mask of states in the model's domain.
    project
        Maps an out-of-domain state to one on which the diffusion fields can be
        evaluated (used by the full-truncation policy).
    """

    v0: VectorField
    diffusion: tuple
    ito_drift_fn: Optional[Callable[[Array], Array]] = None
    domain: Optional[Callable[[Array], Array]] = None
    project: Optional[Callable[[Array], Array]] = None
    name: str = ""
    vector_fields: tuple = field(init=False, repr=False)

    def __post_init__(self):
        diffusion = tuple(self.diffusion)
        if not diffusion:
            raise ContractError("a model needs at least one diffusion field")
        for v in diffusion:
            if v.dim != self.v0.dim:
                raise ContractError("all vector fields must share the state dimension")
        object.__setattr__(self, "diffusion", diffusion)
        object.__setattr__(self, "vector_fields", (self.v0,) + diffusion)

    @property
    def state_dim(self) -> int:
        return self.v0.dim

    @property
    def driving_dim(self) -> int:
        return len(self.diffusion)


def stratonovich_correction(model: SdeModel, x, fd_fallback: bool = True) -> Array:
    """``1/2 sum_j J_{Vj}(x) Vj(x)``, computed from Jacobians."""
    x = _check_state(x, model.state_dim)
    corr = np.zeros_like(x)
    for v in model.diffusion:
        corr += np.einsum("ik...,k...->i...", v.jac(x, fd_fallback), v(x))
    return 0.5 * corr


def ito_drift(model: SdeModel, x, fd_fallback: bool = True, use_closed_form: bool = True) -> Array:
    """Itô drift ``V0 + 1/2 sum_j (Vj . grad) Vj`` at x."""
    x = _check_state(x, model.state_dim)
    if use_closed_form and model.ito_drift_fn is not None:
        return np.asarray(model.ito_drift_fn(x), dtype=float)
    return model.v0(x) + stratonovich_correction(model, x, fd_fallback)


def constant_field(value: Sequence[float], name: str = "") -> VectorField:
    value = np.asarray(value, dtype=float)
    n = value.size

    def fn(x):
        return np.broadcast_to(value.reshape((n,) + (1,) * (x.ndim - 1)), x.shape).copy()

    def jac(x):
        return np.zeros((n, n) + x.shape[1:])

    return VectorField(n, fn, jac, name)


def linear_field(matrix, name: str = "") -> VectorField:
    """``V(x) = A x``."""
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    n = a.shape[0]

    def fn(x):
        return np.tensordot(a, x, axes=(1, 0))

    def jac(x):
        return np.broadcast_to(a.reshape((n, n) + (1,) * (x.ndim - 1)), (n, n) + x.shape[1:]).copy()

    return VectorField(n, fn, jac, name)
