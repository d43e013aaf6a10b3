"""Weak approximation of SDEs: Euler-Maruyama, cubature-3 and a second-order
splitting scheme, with MC/QMC estimation and a Heston Asian-option benchmark."""

from .errors import (
    ConfigurationError,
    ContractError,
    DomainError,
    EstimationError,
    FlowDivergence,
    StepFailure,
)
from .flows import FlowMap, make_flow, richardson_flow, rk4_flow
from .heston import (
    REFERENCE_PRICE,
    HestonParams,
    asian_call_payoff,
    flow_v0,
    flow_v1,
    flow_v2,
    heston_flows,
    heston_model,
    reference_price,
)
from .model import SdeModel, VectorField, directional_apply, ito_drift
from .normal import inv_norm_cdf
from .sampling import EstimateResult, PrngSource, SobolSource, estimate
from .schemes import (
    DomainPolicy,
    SchemeConfig,
    SchemeKind,
    StepNoise,
    cub3_step,
    em_step,
    noise_from_uniforms,
    nv_step,
    romberg_combine,
    scheme_dimension,
    simulate_path,
)

__version__ = "0.1.0"
