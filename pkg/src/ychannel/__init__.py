"""Three-user Y-channel toolkit.

Deterministic (bit-level) network-coding simulator, Gaussian achievable-rate
region evaluation with power-allocation search, and a desk-scale
nested-lattice codec.
"""

from .flows import (
    ChannelConfig,
    FlowDecomposition,
    RateTuple,
    decompose_flows,
    recompose,
)
from .dyc import (
    DycConfig,
    DycLevelPlan,
    InfeasiblePlan,
    plan_levels,
    simulate_uplink,
    simulate_downlink,
    decode_user,
    verify_end_to_end,
)
from .gaussian import (
    DownlinkPowers,
    UplinkPowers,
    achievable_point,
    cap,
    cap_plus,
    check_feasibility,
    corollary_region_contains,
    derive_coupled_powers,
    downlink_bounds,
    maximize_objective,
    outer_bound_proxy,
    uplink_bounds,
)
from .lattice import (
    NestedLatticeCode,
    encode,
    extract_partner,
    monte_carlo_sum_decode,
    relay_decode_sum,
    scaled_code,
)

__all__ = [
    "ChannelConfig", "FlowDecomposition", "RateTuple",
    "decompose_flows", "recompose",
    "DycConfig", "DycLevelPlan", "InfeasiblePlan", "plan_levels",
    "simulate_uplink", "simulate_downlink", "decode_user",
    "verify_end_to_end",
    "UplinkPowers", "DownlinkPowers", "cap", "cap_plus",
    "derive_coupled_powers", "check_feasibility", "uplink_bounds",
    "downlink_bounds", "achievable_point", "corollary_region_contains",
    "outer_bound_proxy", "maximize_objective",
    "NestedLatticeCode", "encode", "relay_decode_sum", "extract_partner",
    "scaled_code", "monte_carlo_sum_decode",
]

__version__ = "0.1.0"
