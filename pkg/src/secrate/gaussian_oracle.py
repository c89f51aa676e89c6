"""Independent verification of the closed-form rates via Gaussian log-determinants.

The six jointly Gaussian variables (U1, U2, S, Y2, Y, Z) are assembled from
their definitions over the independent sources (X2, Xhat, S, Z1, Z2, Z3):

    U1 = c*X2 + Xhat + alpha1*S
    U2 = X2 + alpha2*S
    Y2 = h_sr*(c*X2 + Xhat + S) + Z1
    Y  = (c*h_sd + h_rd)*X2 + h_sd*Xhat + (h_sd + h_rd)*S + Z2
    Z  = (c*h_se + h_re)*X2 + h_se*Xhat + (h_se + h_re)*S + Z3

so the covariance is B diag(p2, p, q, 1, 1, 1) B^H for the coefficient
matrix B above.  Conditional mutual information then follows from the
standard identity

    I(A; B | C) = 0.5 * log2( det S_AC * det S_BC / (det S_C * det S_ABC) )

which never touches the closed forms being checked.  Complex gains are
handled by keeping the covariance complex Hermitian and taking log|det|;
the 0.5 factor is retained so the real case is the zero-imaginary special
case of the same convention the closed forms use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularityError
from .rate_core import ChannelGains, CodingParams, SystemParams, mi_eve, mi_main, mi_relay, mi_state

LABELS = ("U1", "U2", "S", "Y2", "Y", "Z")

_LN2 = math.log(2.0)
_JITTER = 1e-12
_DET_FLOOR_LOG = math.log(1e-300)


@dataclass
class JointCovariance:
    """Ordered labels plus the matching Hermitian PSD covariance matrix."""

    labels: tuple[str, ...]
    matrix: np.ndarray


def build_covariance(gains: ChannelGains, sys: SystemParams, cp: CodingParams) -> JointCovariance:
    """Exact second moments of (U1, U2, S, Y2, Y, Z) for one operating point."""
    c = complex(cp.c)
    a1 = float(cp.alpha1)
    a2 = float(cp.alpha2)
    hsr = complex(gains.h_sr)
    hsd = complex(gains.h_sd)
    hrd = complex(gains.h_rd)
    hse = complex(gains.h_se)
    hre = complex(gains.h_re)
    # rows: variables, columns: independent sources (X2, Xhat, S, Z1, Z2, Z3)
    b = np.array(
        [
            [c, 1.0, a1, 0.0, 0.0, 0.0],
            [1.0, 0.0, a2, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            [hsr * c, hsr, hsr, 1.0, 0.0, 0.0],
            [c * hsd + hrd, hsd, hsd + hrd, 0.0, 1.0, 0.0],
            [c * hse + hre, hse, hse + hre, 0.0, 0.0, 1.0],
        ],
        dtype=np.complex128,
    )
    variances = np.array([sys.p2, cp.p, sys.q, 1.0, 1.0, 1.0])
    m = (b * variances) @ b.conj().T
    m = 0.5 * (m + m.conj().T)  # scrub roundoff asymmetry
    return JointCovariance(labels=LABELS, matrix=m)


def _logdet(sub: np.ndarray) -> float:
    """Natural-log determinant of a Hermitian PSD block via Cholesky with jitter fallback."""
    try:
        chol = np.linalg.cholesky(sub)
    except np.linalg.LinAlgError:
        try:
            chol = np.linalg.cholesky(sub + _JITTER * np.eye(len(sub)))
        except np.linalg.LinAlgError as exc:
            raise SingularityError(
                f"covariance block is not PSD even after {_JITTER} jitter"
            ) from exc
    out = 2.0 * float(np.sum(np.log(np.abs(np.diag(chol)))))
    if out < _DET_FLOOR_LOG:
        raise SingularityError(f"covariance block determinant underflow (logdet={out})")
    return out


def gaussian_mi(cov: JointCovariance, set_a, set_b, set_c=()) -> float:
    """Conditional mutual information I(A; B | C) in bits from a joint covariance.

    set_a and set_b must be nonempty and the three sets pairwise disjoint;
    set_c may be empty.  Variables whose variance and covariances are exactly
    zero (e.g. S when q = 0) are constants and are dropped before factoring,
    which keeps the zero-state corner exact.
    """
    index = {lab: i for i, lab in enumerate(cov.labels)}
    try:
        a = sorted(index[lab] for lab in set_a)
        bb = sorted(index[lab] for lab in set_b)
        cc = sorted(index[lab] for lab in set_c)
    except KeyError as exc:
        raise DomainError(f"unknown variable label {exc.args[0]!r}") from exc
    if not a or not bb:
        raise DomainError("set_a and set_b must be nonempty")
    seen = a + bb + cc
    if len(set(seen)) != len(seen):
        raise DomainError("variable sets must be pairwise disjoint")

    m = cov.matrix
    live = [i for i in range(len(cov.labels)) if np.any(m[i, :] != 0) or np.any(m[:, i] != 0)]
    a = [i for i in a if i in live]
    bb = [i for i in bb if i in live]
    cc = [i for i in cc if i in live]
    if not a or not bb:
        return 0.0  # one side is a constant, so it carries no information

    def block_logdet(ixs: list[int]) -> float:
        if not ixs:
            return 0.0
        return _logdet(m[np.ix_(ixs, ixs)])

    ld = (
        block_logdet(sorted(a + cc))
        + block_logdet(sorted(bb + cc))
        - block_logdet(cc)
        - block_logdet(sorted(a + bb + cc))
    )
    return 0.5 * ld / _LN2


@dataclass
class VerifyReport:
    """Absolute closed-form vs oracle deviations for one operating point."""

    deviations: dict[str, float]
    max_deviation: float
    tol: float
    passed: bool


def verify_closed_forms(
    gains: ChannelGains, sys: SystemParams, cp: CodingParams, tol: float = 1e-9
) -> VerifyReport:
    """Check all four closed-form mutual informations against the log-det oracle."""
    cov = build_covariance(gains, sys, cp)
    deviations = {
        "mi_relay": abs(mi_relay(gains, cp) - gaussian_mi(cov, ("U1",), ("Y2",), ("S", "U2"))),
        "mi_state": abs(mi_state(sys, cp) - gaussian_mi(cov, ("U1", "U2"), ("S",))),
        "mi_main": abs(mi_main(gains, sys, cp) - gaussian_mi(cov, ("U1", "U2"), ("Y",))),
        "mi_eve": abs(mi_eve(gains, sys, cp) - gaussian_mi(cov, ("U1", "U2"), ("Z",))),
    }
    worst = max(deviations.values())
    return VerifyReport(deviations=deviations, max_deviation=worst, tol=tol, passed=worst <= tol)


@dataclass
class SweepVerifyReport:
    """Aggregate of verify_closed_forms over seeded random draws."""

    draws: int
    seed: int
    tol: float
    max_deviation: float
    passed: bool
    worst_draw: int = field(default=-1)


def random_draw(rng: np.random.Generator) -> tuple[ChannelGains, SystemParams, CodingParams]:
    """One random nondegenerate operating point with complex gains.

    Powers p, p2, q are drawn in (0.01, 10); gain magnitudes in (0.1, 3) with
    uniform phases; alphas in (-3, 3); |c| in (0, 2) with uniform phase.
    """
    def cgain():
        mag = rng.uniform(0.1, 3.0)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        return mag * complex(math.cos(phase), math.sin(phase))

    gains = ChannelGains(cgain(), cgain(), cgain(), cgain(), cgain())
    p2 = rng.uniform(0.01, 10.0)
    q = rng.uniform(0.01, 10.0)
    p = rng.uniform(0.01, 10.0)
    c_mag = rng.uniform(0.0, 2.0)
    c_phase = rng.uniform(0.0, 2.0 * math.pi)
    c = c_mag * complex(math.cos(c_phase), math.sin(c_phase))
    # p1 is irrelevant to the closed forms; make the draw feasible anyway
    p1 = abs(c) ** 2 * p2 + p + rng.uniform(0.0, 1.0)
    sys = SystemParams(p1=p1, p2=p2, q=q)
    cp = CodingParams(c=c, alpha1=rng.uniform(-3.0, 3.0), alpha2=rng.uniform(-3.0, 3.0), p=p)
    return gains, sys, cp


def verify_random_draws(draws: int = 1000, seed: int = 0, tol: float = 1e-9) -> SweepVerifyReport:
    """Run verify_closed_forms on `draws` seeded random points; report the worst one."""
    if draws < 1:
        raise DomainError(f"draws must be >= 1, got {draws}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_draw = -1
    for i in range(draws):
        gains, sys, cp = random_draw(rng)
        report = verify_closed_forms(gains, sys, cp, tol=tol)
        if report.max_deviation > worst:
            worst = report.max_deviation
            worst_draw = i
    return SweepVerifyReport(
        draws=draws, seed=seed, tol=tol, max_deviation=worst, passed=worst <= tol,
        worst_draw=worst_draw,
    )
