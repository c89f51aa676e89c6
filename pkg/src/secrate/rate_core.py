"""Closed-form secrecy rates for the state-aware Gaussian relay network.

Model: a transmitter sends X1 = c*X2 + Xhat where X2 ~ N(0, P2) is the relay
signal and Xhat ~ N(0, P) carries fresh information, subject to the power
constraint |c|^2*P2 + P <= P1.  An i.i.d. additive state S ~ N(0, Q), known
ahead of time to transmitter and relay, is precoded against through the
auxiliaries U1 = X1 + alpha1*S and U2 = X2 + alpha2*S.  Receiver, relay and
eavesdropper observe their inputs through five link gains (h_sr, h_sd, h_rd,
h_se, h_re) plus unit-variance white noise.

The achievable secrecy rate is r_s = min(r_tilde, r_hat) with

    r_tilde = [c1(|h_sr|^2 P) - mi_eve]+
    r_hat   = [mi_main - mi_eve - mi_state]+

where mi_main / mi_eve are the same eight-argument half-log form `c2`
evaluated with the receiver / eavesdropper gains, and mi_state is the rate
spent on binning against the known state.  All rates are in bits per channel
use (base-2 logs).  [x]+ means max(0, x).

Every function here is a pure function of its arguments and is safe to call
concurrently.  The private kernels (`_c1`, `_c2`, `_mi_state`, `_min_rate`)
accept numpy arrays and broadcast, which the optimizer relies on; the public
API takes scalars and returns floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameterError, DomainError

FEASIBILITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

def _check_real(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(out):
        raise DomainError(f"{name} must be finite, got {out!r}")
    return out


def _check_complex(name: str, value) -> complex:
    try:
        out = complex(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a (complex) number, got {value!r}") from exc
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise DomainError(f"{name} must be finite, got {out!r}")
    return out


@dataclass
class ChannelGains:
    """The five link coefficients; real-valued networks just use zero imaginary parts.

    sr: transmitter->relay, sd: transmitter->receiver, rd: relay->receiver,
    se: transmitter->eavesdropper, re: relay->eavesdropper.
    """

    h_sr: complex
    h_sd: complex
    h_rd: complex
    h_se: complex
    h_re: complex

    def __post_init__(self):
        for name in ("h_sr", "h_sd", "h_rd", "h_se", "h_re"):
            value = getattr(self, name)
            # arrays are allowed (Monte-Carlo draws); scalars get normalized
            if isinstance(value, np.ndarray):
                if not np.all(np.isfinite(value)):
                    raise DomainError(f"{name} contains non-finite entries")
            else:
                checked = _check_complex(name, value)
                setattr(self, name, checked.real if checked.imag == 0.0 else checked)


@dataclass
class SystemParams:
    """Power budget p1, relay power p2, and state variance q (all in power units)."""

    p1: float
    p2: float
    q: float

    def __post_init__(self):
        self.p1 = _check_real("p1", self.p1)
        self.p2 = _check_real("p2", self.p2)
        self.q = _check_real("q", self.q)
        if self.p1 <= 0 or self.p2 <= 0:
            raise DomainError(f"p1 and p2 must be positive, got p1={self.p1}, p2={self.p2}")
        if self.q < 0:
            raise DomainError(f"q must be nonnegative, got {self.q}")


@dataclass
class CodingParams:
    """One operating point of the transmission scheme.

    c is the relay-signal reuse coefficient (complex allowed), alpha1/alpha2
    the real precoding coefficients, and p the fresh-information power.
    """

    c: complex
    alpha1: float
    alpha2: float
    p: float

    def __post_init__(self):
        self.c = _check_complex("c", self.c)
        if self.c.imag == 0.0:
            self.c = self.c.real  # keep real operating points JSON-friendly
        self.alpha1 = _check_real("alpha1", self.alpha1)
        self.alpha2 = _check_real("alpha2", self.alpha2)
        self.p = _check_real("p", self.p)
        if self.p < 0:
            raise DomainError(f"p must be nonnegative, got {self.p}")

    def feasible(self, sys: SystemParams, tol: float = FEASIBILITY_TOL) -> bool:
        """Power-budget check |c|^2 p2 + p <= p1 within tol."""
        return abs(self.c) ** 2 * sys.p2 + self.p <= sys.p1 + tol


@dataclass
class RateBreakdown:
    """All mutual-information terms plus the clamped rates, in bits/channel use.

    r_tilde_raw and r_hat_raw are the pre-clamp differences, kept for
    diagnostics; the reported rates are their [.]+ clamps and
    r_s = min(r_tilde, r_hat) always holds.
    """

    mi_relay: float
    mi_state: float
    mi_main: float
    mi_eve: float
    r_tilde: float
    r_hat: float
    r_s: float
    r_tilde_raw: float
    r_hat_raw: float


# ---------------------------------------------------------------------------
# broadcast-friendly kernels (shared with the optimizer; no validation here)
# ---------------------------------------------------------------------------

def _c1(x):
    return 0.5 * np.log2(1.0 + x)


def _c2_parts(a, b, cc, d, e, f, g, h):
    # n1 > 0 is required; callers on the hot path guarantee e*d > 0
    n1 = np.abs(a * cc - b) ** 2 * (d * f) + e * d + cc**2 * (f * e)
    n2 = np.abs(a * g + h) ** 2 * d + np.abs(g) ** 2 * e + np.abs(g + h) ** 2 * f + 1.0
    cross = np.abs(g * (b - 1.0) + h * (cc - 1.0)) ** 2 * (f * d * e)
    return n1, n2, cross


def _c2(a, b, cc, d, e, f, g, h):
    # ratio form: never materializes the (possibly huge) product n1*n2
    n1, n2, cross = _c2_parts(a, b, cc, d, e, f, g, h)
    return 0.5 * np.log2(n2) - 0.5 * np.log2(1.0 + cross / n1)


def _mi_state(c, a1, a2, p, p2, q):
    return _c1((np.abs(c * a2 - a1) ** 2 * p2 + a2**2 * p) * q / (p * p2))


def _min_rate(c, a1, a2, p, h_sr, h_sd, h_rd, h_se, h_re, p2, q):
    """min(r_tilde, r_hat) for broadcastable parameter/gain arrays."""
    mi_relay = _c1(np.abs(h_sr) ** 2 * p)
    mi_state = _mi_state(c, a1, a2, p, p2, q)
    mi_main = _c2(c, a1, a2, p2, p, q, h_sd, h_rd)
    mi_eve = _c2(c, a1, a2, p2, p, q, h_se, h_re)
    r_tilde = np.maximum(mi_relay - mi_eve, 0.0)
    r_hat = np.maximum(mi_main - mi_eve - mi_state, 0.0)
    return np.minimum(r_tilde, r_hat)


# ---------------------------------------------------------------------------
# public scalar API
# ---------------------------------------------------------------------------

def c1(x) -> float:
    """Half-log form 0.5*log2(1 + x) for x >= 0."""
    x = _check_real("x", x)
    if x < 0:
        raise DomainError(f"c1 requires x >= 0, got {x}")
    return float(_c1(np.float64(x)))


def c2(a, b, cc, d, e, f, g, h) -> float:
    """Eight-argument half-log rate form, evaluated in a stable ratio shape.

    Parameters
    ----------
    a, g, h : complex
        Relay-reuse coefficient and the two link gains of the observer.
    b, cc : float
        The two real precoding coefficients.
    d, e, f : float
        Nonnegative powers (relay power, fresh power, state variance).

    Returns
    -------
    float
        0.5*log2(n1*n2/(cross + n1)) in bits, computed as
        0.5*log2(n2) - 0.5*log2(1 + cross/n1) so large f cannot overflow,
        where n1 = |a*cc-b|^2*d*f + e*d + cc^2*f*e,
        n2 = |a*g+h|^2*d + |g|^2*e + |g+h|^2*f + 1 and
        cross = |g*(b-1) + h*(cc-1)|^2*f*d*e.

    Raises
    ------
    DegenerateParameterError
        If n1 <= 0 (the e=0 / d=0 corners); callers treat it as infeasible.
    """
    a = np.complex128(_check_complex("a", a))
    g = np.complex128(_check_complex("g", g))
    h = np.complex128(_check_complex("h", h))
    b = np.float64(_check_real("b", b))
    cc = np.float64(_check_real("cc", cc))
    d = np.float64(_check_real("d", d))
    e = np.float64(_check_real("e", e))
    f = np.float64(_check_real("f", f))
    if d < 0 or e < 0 or f < 0:
        raise DomainError(f"d, e, f must be nonnegative, got d={d}, e={e}, f={f}")
    n1, _, _ = _c2_parts(a, b, cc, d, e, f, g, h)
    if not n1 > 0:
        raise DegenerateParameterError(
            f"c2 is singular: first numerator factor n1={float(n1)} <= 0"
        )
    return float(_c2(a, b, cc, d, e, f, g, h))


def mi_relay(gains: ChannelGains, cp: CodingParams) -> float:
    """Information the relay can decode: c1(|h_sr|^2 p)."""
    return c1(abs(complex(gains.h_sr)) ** 2 * cp.p)


def mi_state(sys: SystemParams, cp: CodingParams) -> float:
    """Binning rate spent on the known state; singular at p=0 or p2=0."""
    if cp.p == 0 or sys.p2 == 0:
        raise DegenerateParameterError(
            f"mi_state is singular at p={cp.p}, p2={sys.p2} (division by p*p2)"
        )
    return float(
        _mi_state(
            np.complex128(complex(cp.c)),
            np.float64(cp.alpha1),
            np.float64(cp.alpha2),
            np.float64(cp.p),
            np.float64(sys.p2),
            np.float64(sys.q),
        )
    )


def mi_main(gains: ChannelGains, sys: SystemParams, cp: CodingParams) -> float:
    """Rate of the auxiliary pair into the legitimate receiver's output."""
    return c2(cp.c, cp.alpha1, cp.alpha2, sys.p2, cp.p, sys.q, gains.h_sd, gains.h_rd)


def mi_eve(gains: ChannelGains, sys: SystemParams, cp: CodingParams) -> float:
    """Rate of the auxiliary pair into the eavesdropper's output."""
    return c2(cp.c, cp.alpha1, cp.alpha2, sys.p2, cp.p, sys.q, gains.h_se, gains.h_re)


def rates(gains: ChannelGains, sys: SystemParams, cp: CodingParams) -> RateBreakdown:
    """Full rate breakdown at one operating point.

    Parameters
    ----------
    gains : ChannelGains
        Scalar link coefficients.
    sys : SystemParams
        Powers and state variance.
    cp : CodingParams
        Operating point; must satisfy the power constraint for `sys`.

    Returns
    -------
    RateBreakdown
        The four mutual informations, pre-clamp differences, clamped rates
        and r_s = min(r_tilde, r_hat).

    Raises
    ------
    DomainError
        If cp violates |c|^2 p2 + p <= p1 (tolerance 1e-12).
    DegenerateParameterError
        Propagated from the closed forms at p=0 / p2=0 corners.
    """
    if not cp.feasible(sys):
        raise DomainError(
            f"infeasible operating point: |c|^2*p2 + p = "
            f"{abs(cp.c) ** 2 * sys.p2 + cp.p} > p1 = {sys.p1}"
        )
    m_rel = mi_relay(gains, cp)
    m_st = mi_state(sys, cp)
    m_main = mi_main(gains, sys, cp)
    m_eve = mi_eve(gains, sys, cp)
    rt_raw = m_rel - m_eve
    rh_raw = m_main - m_eve - m_st
    r_tilde = max(rt_raw, 0.0)
    r_hat = max(rh_raw, 0.0)
    return RateBreakdown(
        mi_relay=m_rel,
        mi_state=m_st,
        mi_main=m_main,
        mi_eve=m_eve,
        r_tilde=r_tilde,
        r_hat=r_hat,
        r_s=min(r_tilde, r_hat),
        r_tilde_raw=rt_raw,
        r_hat_raw=rh_raw,
    )
