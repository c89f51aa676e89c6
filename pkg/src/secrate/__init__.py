"""Achievable perfect-secrecy rates for a state-aware relay wiretap channel.

The model: a transmitter sends to a receiver with help from a full-duplex
decode-and-forward relay, while an eavesdropper listens.  An additive
Gaussian interference (the "state") hits every receive antenna and is known
in advance to both the transmitter and the relay, which cancel it with
dirty-paper style auxiliary codebooks.  This package evaluates the
achievable secrecy rate in closed form, cross-checks it against a log-det
mutual-information oracle, optimizes the coding parameters, evaluates the
matching discrete-alphabet rate expressions, and generates the sweep tables
behind the standard plots.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CoincidentNodesError,
    DegenerateParameterError,
    DomainError,
    SecrateError,
    SingularityError,
)
from .rate_core import (  # noqa: E402
    ChannelGains,
    CodingParams,
    RateBreakdown,
    SystemParams,
    c1,
    c2,
    mi_eve,
    mi_main,
    mi_relay,
    mi_state,
    rates,
)
from .dmc_eval import (  # noqa: E402
    JointPmf,
    ReductionReport,
    achievable_rates,
    check_reductions,
    mutual_info,
    pmf_from_dict,
)
from .gaussian_oracle import (  # noqa: E402
    SweepVerifyReport,
    VerifyReport,
    build_covariance,
    gaussian_mi,
    verify_closed_forms,
    verify_random_draws,
)
from .optimizer import OptConfig, OptResult, optimize, optimize_expected  # noqa: E402
from .scenarios import (  # noqa: E402
    ScenarioResult,
    ScenarioSpec,
    SweepSpec,
    emit_csv,
    load_spec,
    preset,
    run_scenario,
    spec_from_dict,
)
from .topology import (  # noqa: E402
    FadingDraw,
    FadingSampler,
    Network,
    gains_fading,
    gains_real,
    sample_phases,
)

__all__ = [
    "ChannelGains",
    "achievable_rates",
    "CodingParams",
    "CoincidentNodesError",
    "DegenerateParameterError",
    "DomainError",
    "FadingDraw",
    "FadingSampler",
    "JointPmf",
    "Network",
    "OptConfig",
    "OptResult",
    "RateBreakdown",
    "ReductionReport",
    "ScenarioResult",
    "ScenarioSpec",
    "SecrateError",
    "SingularityError",
    "SweepSpec",
    "SweepVerifyReport",
    "SystemParams",
    "VerifyReport",
    "build_covariance",
    "c1",
    "c2",
    "check_reductions",
    "emit_csv",
    "gains_fading",
    "gains_real",
    "gaussian_mi",
    "load_spec",
    "mi_eve",
    "mi_main",
    "mi_relay",
    "mi_state",
    "mutual_info",
    "optimize",
    "optimize_expected",
    "pmf_from_dict",
    "preset",
    "rates",
    "run_scenario",
    "sample_phases",
    "spec_from_dict",
    "verify_closed_forms",
    "verify_random_draws",
]
