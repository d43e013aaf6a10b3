"""Weak approximation schemes: Euler-Maruyama, cubature of degree 3 and the
second-order splitting scheme (NV), plus Romberg extrapolation.

Each step consumes a block of ``noise_width(kind, d)`` uniforms.  For NV the
first coordinate of the block picks the order in which the diffusion flows
are composed and the remaining d coordinates give the normal increments.
Blocks are laid out step-major: step k uses coordinates
``[k*C, (k+1)*C)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError, ContractError, DomainError, FlowDivergence, StepFailure
from .flows import FlowMap, make_flow
from .model import SdeModel, VectorField, ito_drift
from .normal import inv_norm_cdf


class SchemeKind(enum.Enum):
    EULER_MARUYAMA = "em"
    CUB3 = "cub3"
    NV = "nv"

    @property
    def weak_order(self) -> int:
        return 2 if self is SchemeKind.NV else 1

    def noise_width(self, d: int) -> int:
        return d + 1 if self is SchemeKind.NV else d

    @classmethod
    def parse(cls, name) -> "SchemeKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ConfigurationError(f"unknown scheme {name!r}") from None


class DomainPolicy(enum.Enum):
    """What the explicit schemes do when a state leaves the model domain.

    REJECT raises StepFailure; FULL_TRUNCATION evaluates the diffusion fields
    at ``model.project(x)`` and leaves the drift untouched.
    """

    REJECT = "reject"
    FULL_TRUNCATION = "truncate"

    @classmethod
    def parse(cls, name) -> "DomainPolicy":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ConfigurationError(f"unknown policy {name!r}") from None


def noise_width(kind: SchemeKind, d: int) -> int:
    return SchemeKind.parse(kind).noise_width(d)


def scheme_dimension(kind, n: int, d: int) -> int:
    """Dimension ``n * C(d)`` of the integration domain."""
    if n < 1 or d < 1:
        raise ContractError("n and d must be positive")
    return n * noise_width(kind, d)


@dataclass(frozen=True)
class StepNoise:
    """``lam`` has shape ``(M,)`` with entries +-1; ``z`` has shape ``(d, M)``.

    A single draw uses shapes ``()`` and ``(d,)``.
    """

    lam: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if not np.all(np.abs(lam) == 1.0):
            raise ContractError("lambda must be +1 or -1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))


def noise_from_uniforms(kind, d: int, u) -> StepNoise:
    """Map one step's uniforms (shape ``(C,)`` or ``(M, C)``) to a StepNoise."""
    kind = SchemeKind.parse(kind)
    u = np.asarray(u, dtype=float)
    width = kind.noise_width(d)
    if u.shape[-1] != width:
        raise ContractError(f"expected {width} uniforms per step, got {u.shape[-1]}")
    if not ((u >= 0.0) & (u < 1.0)).all():
        raise ContractError("uniforms must lie in [0, 1)")
    if kind is SchemeKind.NV:
        lam = np.where(u[..., 0] < 0.5, 1.0, -1.0)
        z = inv_norm_cdf(u[..., 1:])
    else:
        lam = np.ones(u.shape[:-1])
        z = inv_norm_cdf(u)
    return StepNoise(lam, np.moveaxis(np.asarray(z), -1, 0))


def _first_bad(mask) -> Optional[int]:
    mask = np.asarray(mask)
    if mask.ndim == 0:
        return 0 if mask else None
    if mask.any():
        return int(np.argmax(mask))
    return None


def _column(x, j):
    return x if x.ndim == 1 else x[:, j]


def _check_finite(x, what):
    bad = ~np.isfinite(x).all(axis=0)
    j = _first_bad(bad)
    if j is not None:
        raise StepFailure(f"non-finite state after {what}", sample=j, state=_column(x, j))


def _check_domain(model: SdeModel, x, what):
    if model.domain is None:
        return
    inside = np.asarray(model.domain(x), dtype=bool)
    j = _first_bad(~inside)
    if j is not None:
        raise StepFailure(f"state outside model domain {what}", sample=j, state=_column(x, j))


def _diffusion_state(model: SdeModel, x, policy: DomainPolicy):
    if policy is DomainPolicy.FULL_TRUNCATION and model.project is not None:
        return model.project(x)
    return x


def em_step(model: SdeModel, x, dt: float, z, policy=DomainPolicy.REJECT):
    """``x + dt * ito_drift(x) + sqrt(dt) * sum_i z_i V_i(x)``.

    Under REJECT the step fails if its input or its output leaves the model
    domain (a negative variance would make the next square root undefined).
    """
    if dt <= 0:
        raise ContractError("dt must be positive")
    policy = DomainPolicy.parse(policy)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if policy is DomainPolicy.REJECT:
        _check_domain(model, x, "on entry")
    xd = _diffusion_state(model, x, policy)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        out = x + dt * ito_drift(model, x)
        sq = math.sqrt(dt)
        for zi, v in zip(z, model.diffusion):
            out = out + (sq * zi) * v(xd)
    _check_finite(out, "Euler-Maruyama step")
    if policy is DomainPolicy.REJECT:
        _check_domain(model, out, "after Euler-Maruyama step")
    return out


@dataclass(frozen=True)
class OdeSettings:
    """RK4 substeps and Richardson levels for flows without a closed form."""

    substeps: int = 1
    levels: int = 0

    @property
    def exponent(self) -> int:
        return 5 + self.levels


def _combined_field(model: SdeModel, dt, z, policy) -> VectorField:
    sq = math.sqrt(dt)
    weights = [sq * zi for zi in z]

    def fn(y):
        out = dt * model.v0(y)
        yd = _diffusion_state(model, y, policy)
        for w, v in zip(weights, model.diffusion):
            out = out + w * v(yd)
        return out

    return VectorField(model.state_dim, fn, name="combined")


def cub3_step(model: SdeModel, x, dt: float, z, ode: OdeSettings = OdeSettings(), policy=DomainPolicy.REJECT):
    """Time-1 flow along ``dt V0 + sqrt(dt) sum_i z_i V_i`` (frozen z)."""
    if dt <= 0:
        raise ContractError("dt must be positive")
    if ode.exponent < 4:
        raise ConfigurationError("cubature step needs a flow of error exponent >= 4")
    policy = DomainPolicy.parse(policy)
    x = np.asarray(x, dtype=float)
    if policy is DomainPolicy.REJECT:
        _check_domain(model, x, "on entry")
    w = _combined_field(model, dt, np.asarray(z, dtype=float), policy)
    flow = make_flow(w, substeps=ode.substeps, levels=ode.levels)
    try:
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            out = flow.apply(1.0, x)
    except FlowDivergence as exc:
        raise StepFailure(f"cubature flow diverged ({exc})") from exc
    _check_finite(out, "cubature step")
    if policy is DomainPolicy.REJECT:
        _check_domain(model, out, "after cubature step")
    return out


def flow_budget(extrapolated: bool) -> tuple:
    """Minimum error exponents ``(drift, diffusion)`` for the NV flows."""
    return (4, 7) if extrapolated else (3, 6)


def check_flow_budget(flows: Sequence[FlowMap], d: int, extrapolated: bool = False):
    if len(flows) != d + 1:
        raise ConfigurationError(f"need {d + 1} flows (V0..V{d}), got {len(flows)}")
    drift_min, diff_min = flow_budget(extrapolated)
    if flows[0].error_exponent < drift_min:
        raise ConfigurationError(
            f"drift flow exponent {flows[0].error_exponent} below required {drift_min}"
        )
    for i, f in enumerate(flows[1:], start=1):
        if f.error_exponent < diff_min:
            raise ConfigurationError(
                f"diffusion flow V{i} exponent {f.error_exponent} below required {diff_min}"
            )


def _nv_compose(flows, x, dt, z, order):
    sq = math.sqrt(dt)
    x = flows[0].apply(0.5 * dt, x)
    for i in order:
        x = flows[i + 1].apply(sq * z[i], x)
    return flows[0].apply(0.5 * dt, x)


def nv_step(model: SdeModel, x, dt: float, noise: StepNoise, flows: Sequence[FlowMap]):
    """One step of the splitting scheme: d + 2 flows per sample.

    With lambda = +1 the composition ``exp(dt/2 V0) exp(a_1 V_1) ... exp(a_d V_d)
    exp(dt/2 V0)`` acts right to left: half drift, then V_d, ..., V_1, then
    half drift.  With lambda = -1 the diffusion flows run V_1 first.
    """
    if dt <= 0:
        raise ContractError("dt must be positive")
    d = model.driving_dim
    x = np.asarray(x, dtype=float)
    z = noise.z
    lam = noise.lam
    plus_order = list(range(d - 1, -1, -1))
    minus_order = list(range(d))
    try:
        with np.errstate(invalid="ignore", over="ignore"):
            if lam.ndim == 0:
                out = _nv_compose(flows, x, dt, z, plus_order if lam > 0 else minus_order)
            else:
                out = np.empty_like(x)
                plus = lam > 0
                for mask, order in ((plus, plus_order), (~plus, minus_order)):
                    if mask.all():
                        out = _nv_compose(flows, x, dt, z, order)
                    elif mask.any():
                        out[:, mask] = _nv_compose(flows, x[:, mask], dt, z[:, mask], order)
    except (FlowDivergence, DomainError) as exc:
        raise StepFailure(f"flow failed in splitting step ({exc})") from exc
    _check_finite(out, "splitting step")
    return out


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme, number of equal steps on [0, horizon] and flow settings.

    ``flows`` (one FlowMap per field, V0 first) is required for NV; for
    ``extrapolated`` runs the tighter Romberg flow budget is enforced.
    """

    kind: SchemeKind
    n: int
    horizon: float = 1.0
    flows: Optional[tuple] = None
    policy: DomainPolicy = DomainPolicy.FULL_TRUNCATION
    ode: OdeSettings = field(default_factory=OdeSettings)
    extrapolated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind.parse(self.kind))
        object.__setattr__(self, "policy", DomainPolicy.parse(self.policy))
        if int(self.n) < 1:
            raise ConfigurationError("n must be >= 1")
        if not self.horizon > 0:
            raise ConfigurationError("horizon must be positive")
        if self.kind is SchemeKind.NV:
            if self.flows is None:
                raise ConfigurationError("the NV scheme needs a flow per vector field")
            object.__setattr__(self, "flows", tuple(self.flows))
            check_flow_budget(self.flows, len(self.flows) - 1, self.extrapolated)

    @property
    def dt(self) -> float:
        return self.horizon / self.n

    def dimension(self, d: int) -> int:
        return scheme_dimension(self.kind, self.n, d)


def step(config: SchemeConfig, model: SdeModel, x, noise: StepNoise):
    dt = config.dt
    if config.kind is SchemeKind.EULER_MARUYAMA:
        return em_step(model, x, dt, noise.z, config.policy)
    if config.kind is SchemeKind.CUB3:
        return cub3_step(model, x, dt, noise.z, config.ode, config.policy)
    return nv_step(model, x, dt, noise, config.flows)


def simulate_path(config: SchemeConfig, model: SdeModel, x0, u):
    """Terminal state after ``config.n`` steps.

    ``u`` has shape ``(n*C,)`` for one path (returns shape ``(N,)``) or
    ``(M, n*C)`` for M paths (returns ``(N, M)``).
    """
    d = model.driving_dim
    width = config.kind.noise_width(d)
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != config.n * width:
        raise ContractError(f"expected {config.n * width} uniforms per path, got {u.shape[-1]}")
    if config.kind is SchemeKind.NV and config.flows is not None:
        if len(config.flows) != d + 1:
            raise ConfigurationError("flow bundle does not match the model")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.state_dim,):
        raise ContractError("x0 must be a single state")
    x = x0.copy() if u.ndim == 1 else np.repeat(x0[:, None], u.shape[0], axis=1)
    for k in range(config.n):
        noise = noise_from_uniforms(config.kind, d, u[..., k * width:(k + 1) * width])
        try:
            x = step(config, model, x, noise)
        except StepFailure as exc:
            exc.step = k
            raise
    return x


def romberg_combine(e_n: float, e_2n: float, p: int) -> float:
    """``2^p/(2^p-1) e_2n - 1/(2^p-1) e_n``: raises weak order p to p+1."""
    if p < 1:
        raise ContractError("order p must be >= 1")
    w = 2.0**p
    return (w * e_2n - e_n) / (w - 1.0)


def romberg_weights(p: int) -> tuple:
    """Weights ``(on e_n, on e_2n)``."""
    w = 2.0**p
    return (-1.0 / (w - 1.0), w / (w - 1.0))
