"""Heston Asian-call experiments: single prices, convergence in n, MC vs QMC
and the method comparison table.  Results are plain dataclasses; the CSV
writers at the bottom fix the column layout used by the command line.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, StepFailure
from .heston import REFERENCE_PRICE, HestonParams, asian_call_payoff, heston_flows, heston_model
from .sampling import DEFAULT_BLOCK, EstimateResult, estimate, make_source
from .schemes import DomainPolicy, SchemeConfig, SchemeKind, romberg_combine, romberg_weights, simulate_path

TARGET_ACCURACY = 1e-4


@dataclass(frozen=True)
class RunSpec:
    """One pricing run.  With ``romberg`` the scheme runs at ``n`` and ``2n``."""

    scheme: str = "nv"
    romberg: bool = False
    n: int = 12
    sampler: str = "qmc"
    seed: int = 0
    skip: int = 1
    m: int = 200_000
    params: HestonParams = field(default_factory=HestonParams)
    policy: str = "truncate"
    threads: int = 1
    block: int = DEFAULT_BLOCK
    reference: float = REFERENCE_PRICE

    def __post_init__(self):
        SchemeKind.parse(self.scheme)
        DomainPolicy.parse(self.policy)
        if self.sampler not in ("mc", "qmc"):
            raise ConfigurationError(f"sampler must be 'mc' or 'qmc', got {self.sampler!r}")
        if int(self.n) < 1:
            raise ConfigurationError("n must be >= 1")
        if int(self.m) < 2:
            raise ConfigurationError("need at least 2 samples")

    @property
    def kind(self) -> SchemeKind:
        return SchemeKind.parse(self.scheme)

    @property
    def n_label(self) -> str:
        return f"{2 * self.n}+{self.n}" if self.romberg else str(self.n)

    @property
    def cost(self) -> int:
        """Steps times samples, the quantity run time is proportional to."""
        steps = 3 * self.n if self.romberg else self.n
        return steps * self.m

    def sampler_label(self) -> str:
        return f"mc:{self.seed}" if self.sampler == "mc" else f"qmc:{self.skip}"


def parse_n(text, n2=None):
    """Parse ``"12"`` or ``"4+2"`` (plus optional explicit fine n) into ``(n, romberg)``.

    For a pair ``a+b`` the coarse level is b and a must equal 2b.
    """
    text = str(text).strip()
    if "+" in text:
        a, b = (int(p) for p in text.split("+", 1))
        if a != 2 * b:
            raise ConfigurationError(f"Romberg pair {text}: need a = 2b")
        return b, True
    n = int(text)
    if n2 is not None:
        if int(n2) != 2 * n:
            raise ConfigurationError(f"Romberg pair needs n2 = 2n, got n={n}, n2={n2}")
        return n, True
    return n, False


@dataclass(frozen=True)
class PriceResult:
    spec: RunSpec
    estimate: float = math.nan
    stderr: float = math.nan
    abs_error: float = math.nan
    wall_seconds: float = 0.0
    status: str = "OK"
    failed_step: Optional[int] = None
    message: str = ""
    variance: float = math.nan

    @property
    def ok(self) -> bool:
        return self.status == "OK"


def scheme_config(spec: RunSpec, n: int) -> SchemeConfig:
    kind = spec.kind
    flows = None
    if kind is SchemeKind.NV:
        flows = heston_flows(spec.params, "order4" if spec.romberg else "order3")
    return SchemeConfig(
        kind, n, spec.params.T, flows, DomainPolicy.parse(spec.policy), extrapolated=spec.romberg
    )


def path_sampler(config: SchemeConfig, params: HestonParams, payoff=None) -> Callable:
    """Map a ``(count, n*C)`` block of uniforms to payoffs."""
    model = heston_model(params)
    x0 = params.x0
    payoff = payoff or (lambda y: asian_call_payoff(y, params))

    def sample(u):
        return payoff(simulate_path(config, model, x0, u))

    return sample


def _run_level(spec: RunSpec, n: int, stream: int, payoff) -> EstimateResult:
    config = scheme_config(spec, n)
    source = make_source(spec.sampler, config.dimension(2), seed=spec.seed, skip=spec.skip, stream=stream)
    return estimate(path_sampler(config, spec.params, payoff), spec.m, source, spec.block, spec.threads)


def price(spec: RunSpec, payoff=None) -> PriceResult:
    """Estimate the price for one RunSpec; step failures give a FAILED result.

    Romberg runs combine the estimates at n and 2n with p equal to the weak
    order of the scheme.  MC runs draw the 2n level from an independent
    stream, and the reported stderr assumes independence.
    """
    t0 = time.perf_counter()
    try:
        coarse = _run_level(spec, spec.n, 0, payoff)
        if spec.romberg:
            fine = _run_level(spec, 2 * spec.n, 1, payoff)
            p = spec.kind.weak_order
            value = romberg_combine(coarse.mean, fine.mean, p)
            wc, wf = romberg_weights(p)
            stderr = math.hypot(wc * coarse.stderr, wf * fine.stderr)
            variance = wc**2 * coarse.variance + wf**2 * fine.variance
        else:
            value, stderr, variance = coarse.mean, coarse.stderr, coarse.variance
    except StepFailure as exc:
        return PriceResult(
            spec,
            wall_seconds=time.perf_counter() - t0,
            status="FAILED",
            failed_step=exc.step,
            message=str(exc),
        )
    return PriceResult(
        spec,
        estimate=value,
        stderr=stderr,
        abs_error=abs(value - spec.reference),
        wall_seconds=time.perf_counter() - t0,
        variance=variance,
    )


def loglog_slope(ns: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.size < 3:
        raise ConfigurationError("need at least 3 points to fit a slope")
    if not (errors > 0).all():
        raise ConfigurationError("slope fit needs strictly positive errors")
    return float(np.polyfit(np.log(ns), np.log(errors), 1)[0])


def convergence(spec: RunSpec, n_list: Sequence[int]):
    """Price at each n; returns ``(results, slope)`` (slope is nan on failures)."""
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3:
        raise ConfigurationError("convergence needs at least 3 values of n")
    results = [price(replace(spec, n=n)) for n in n_list]
    if all(r.ok for r in results):
        slope = loglog_slope(n_list, [r.abs_error for r in results])
    else:
        slope = math.nan
    return results, slope


def mc_vs_qmc(spec: RunSpec, m_list: Sequence[int], samplers=("mc", "qmc"), payoff=None):
    """Error as a function of the sample count for each sampler."""
    m_list = [int(m) for m in m_list]
    if m_list != sorted(m_list):
        raise ConfigurationError("sample counts must be ascending")
    return [price(replace(spec, sampler=s, m=m), payoff) for s in samplers for m in m_list]


@dataclass(frozen=True)
class TableRow:
    method: str
    scheme: str
    romberg: bool
    n: int
    sampler: str
    m_full: int


TABLE_ROWS = (
    TableRow("E-M + MC", "em", False, 2000, "mc", 10**8),
    TableRow("E-M + Extrpltn + MC", "em", True, 8, "mc", 10**8),
    TableRow("New + MC", "nv", False, 12, "mc", 10**8),
    TableRow("New + Extrpltn + MC", "nv", True, 2, "mc", 10**8),
    TableRow("E-M + Extrpltn + QMC", "em", True, 8, "qmc", 5 * 10**6),
    TableRow("New + QMC", "nv", False, 12, "qmc", 2 * 10**5),
    TableRow("New + Extrpltn + QMC", "nv", True, 2, "qmc", 2 * 10**5),
)


def table(base: RunSpec = RunSpec(), mc_samples: int = 10**5, qmc_samples: Optional[int] = None, rows=TABLE_ROWS):
    """Run the method comparison rows.

    MC rows are capped at ``mc_samples`` (the original counts are far beyond
    desk scale); QMC rows use their original counts unless ``qmc_samples``
    caps them too.  Returns a list of ``(TableRow, PriceResult)``.
    """
    out = []
    for row in rows:
        cap = mc_samples if row.sampler == "mc" else qmc_samples
        m = row.m_full if cap is None else min(row.m_full, int(cap))
        spec = replace(base, scheme=row.scheme, romberg=row.romberg, n=row.n, sampler=row.sampler, m=m)
        out.append((row, price(spec)))
    return out


def table_checks(rows) -> dict:
    """Relative orderings the cost model n*M predicts for the table rows.

    Keys name the comparison; values are booleans (False when a row failed).
    """
    by_method = {row.method: r for row, r in rows}
    checks = {}
    fast, slow = by_method.get("New + Extrpltn + QMC"), by_method.get("E-M + Extrpltn + QMC")
    if fast is not None and slow is not None:
        both = fast.ok and slow.ok
        checks["cost New+Extrpltn+QMC < E-M+Extrpltn+QMC"] = both and fast.spec.cost < slow.spec.cost
        checks["time New+Extrpltn+QMC < E-M+Extrpltn+QMC"] = both and fast.wall_seconds < slow.wall_seconds
    return checks


# CSV output ------------------------------------------------------------------

PRICE_COLUMNS = (
    "scheme", "romberg", "n", "sampler", "m", "estimate", "stderr",
    "abs_error_vs_reference", "wall_seconds", "status", "failed_step",
)
MC_QMC_COLUMNS = (
    "scheme", "romberg", "n", "sampler", "m", "abs_error", "stderr",
    "estimate", "wall_seconds", "status",
)
TABLE_COLUMNS = (
    "method", "scheme", "romberg", "n", "sampler", "m_full", "m", "estimate",
    "stderr", "abs_error", "target_met", "desk_scaled", "cost", "wall_seconds", "status",
)
WALL_COLUMNS = ("wall_seconds",)


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.12g}"


def price_row(r: PriceResult) -> dict:
    s = r.spec
    return {
        "scheme": s.kind.value,
        "romberg": fmt(s.romberg),
        "n": s.n_label,
        "sampler": s.sampler_label(),
        "m": fmt(s.m),
        "estimate": fmt(r.estimate),
        "stderr": fmt(r.stderr if s.sampler == "mc" else None),
        "abs_error_vs_reference": fmt(r.abs_error),
        "abs_error": fmt(r.abs_error),
        "wall_seconds": f"{r.wall_seconds:.3f}",
        "status": r.status,
        "failed_step": fmt(r.failed_step),
    }


def table_row(row: TableRow, r: PriceResult) -> dict:
    d = price_row(r)
    d.update(
        method=row.method,
        m_full=fmt(row.m_full),
        target_met=fmt(r.ok and r.abs_error <= TARGET_ACCURACY),
        desk_scaled=fmt(r.spec.m < row.m_full),
        cost=fmt(r.spec.cost),
    )
    return d


def write_csv(fh, columns, rows: Sequence[dict], comments: Sequence[str] = ()):
    writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    for c in comments:
        fh.write(f"# {c}\n")
