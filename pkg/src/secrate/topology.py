"""Node geometry to channel gains, plus fading-phase sampling.

Real mode: h = d^(-gamma) per link, d the Euclidean node distance.  Fading
mode multiplies each magnitude by e^(i*theta) with per-link phases; the
transmitter-side phases (theta_12 tx->relay, theta_13 tx->rx, theta_23
relay->rx) are known to the encoders, while the eavesdropper-link phases
(theta_14 tx->eve, theta_24 relay->eve) are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoincidentNodesError, DomainError
from .rate_core import ChannelGains, _check_real

Point = tuple[float, float]

PHASE_NAMES = ("theta_12", "theta_13", "theta_23", "theta_14", "theta_24")
KNOWN_PHASE_NAMES = ("theta_12", "theta_13", "theta_23")


@dataclass
class Network:
    """Planar positions of the four nodes and the attenuation exponent."""

    tx: Point = (0.0, 0.0)
    relay: Point = (0.5, 0.0)
    rx: Point = (1.0, 0.0)
    eve: Point = (0.0, 1.0)
    gamma: float = 3.0

    def __post_init__(self):
        for name in ("tx", "relay", "rx", "eve"):
            pos = getattr(self, name)
            if len(pos) != 2:
                raise DomainError(f"{name} must be a 2D point, got {pos!r}")
            setattr(self, name, (_check_real(f"{name}[0]", pos[0]), _check_real(f"{name}[1]", pos[1])))
        self.gamma = _check_real("gamma", self.gamma)
        if not self.gamma > 1:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")


@dataclass
class FadingDraw:
    """One realization of the five link phases, each in [0, 2*pi)."""

    theta_12: float
    theta_13: float
    theta_23: float
    theta_14: float
    theta_24: float

    def __post_init__(self):
        for name in PHASE_NAMES:
            value = _check_real(name, getattr(self, name))
            if not 0.0 <= value < 2.0 * math.pi:
                raise DomainError(f"{name} must lie in [0, 2*pi), got {value}")
            setattr(self, name, value)


def _link_distance(net: Network, src: Point, dst: Point, d_min: float) -> float:
    d = math.dist(src, dst)
    if d <= 0.0 and d_min <= 0.0:
        raise CoincidentNodesError(f"coincident nodes at {src}: link gain undefined")
    return max(d, d_min)


def gains_real(net: Network, d_min: float = 0.0) -> ChannelGains:
    """Path-loss gains h = d^(-gamma) for the five links, strictly positive reals.

    d_min > 0 clamps each link distance from below, which lets sweeps place
    nodes on top of each other (the gain saturates instead of diverging).
    With the default d_min = 0 coincident nodes raise CoincidentNodesError.
    """
    def gain(src: Point, dst: Point) -> float:
        return _link_distance(net, src, dst, d_min) ** (-net.gamma)

    return ChannelGains(
        h_sr=gain(net.tx, net.relay),
        h_sd=gain(net.tx, net.rx),
        h_rd=gain(net.relay, net.rx),
        h_se=gain(net.tx, net.eve),
        h_re=gain(net.relay, net.eve),
    )


def gains_fading(net: Network, draw: FadingDraw, d_min: float = 0.0) -> ChannelGains:
    """Real-mode magnitudes rotated by the per-link phases of `draw`."""
    base = gains_real(net, d_min)
    rot = lambda mag, theta: complex(mag) * complex(math.cos(theta), math.sin(theta))
    return ChannelGains(
        h_sr=rot(base.h_sr, draw.theta_12),
        h_sd=rot(base.h_sd, draw.theta_13),
        h_rd=rot(base.h_rd, draw.theta_23),
        h_se=rot(base.h_se, draw.theta_14),
        h_re=rot(base.h_re, draw.theta_24),
    )


def sample_phases(rng, known_phases: dict | None = None) -> FadingDraw:
    """Draw the five phases i.i.d. uniform on [0, 2*pi), then apply overrides.

    `rng` is a numpy Generator (or a seed for one); the caller owns it, there
    is no hidden global stream.  `known_phases` maps phase names (see
    PHASE_NAMES) to fixed values, e.g. to pin the transmitter-known phases.
    """
    rng = np.random.default_rng(rng)
    values = dict(zip(PHASE_NAMES, rng.uniform(0.0, 2.0 * math.pi, size=5)))
    if known_phases:
        for name, value in known_phases.items():
            if name not in PHASE_NAMES:
                raise DomainError(f"unknown phase name {name!r}")
            values[name] = value
    return FadingDraw(**values)


@dataclass
class FadingSampler:
    """Vectorized gain draws with known phases pinned and eavesdropper phases random.

    Calling the sampler with (rng, n) returns a ChannelGains whose h_se and
    h_re are length-n complex arrays (theta_14, theta_24 ~ U[0, 2*pi) drawn
    from `rng`) while the other three links are fixed complex scalars built
    from `known_phases` (default: all zero, since the encoders can pre-rotate
    against phases they know).  `pin_unknown` forces the eavesdropper phases
    instead of sampling them, which is only useful in tests.
    """

    net: Network
    d_min: float = 0.0
    known_phases: dict = field(default_factory=dict)
    pin_unknown: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in self.known_phases:
            if name not in KNOWN_PHASE_NAMES:
                raise DomainError(f"{name!r} is not a transmitter-known phase")
        for name in self.pin_unknown:
            if name not in ("theta_14", "theta_24"):
                raise DomainError(f"{name!r} is not an eavesdropper-link phase")
        base = gains_real(self.net, self.d_min)
        rot = lambda mag, theta: complex(mag) * complex(math.cos(theta), math.sin(theta))
        self._h_sr = rot(base.h_sr, self.known_phases.get("theta_12", 0.0))
        self._h_sd = rot(base.h_sd, self.known_phases.get("theta_13", 0.0))
        self._h_rd = rot(base.h_rd, self.known_phases.get("theta_23", 0.0))
        self._mag_se = float(base.h_se.real if isinstance(base.h_se, complex) else base.h_se)
        self._mag_re = float(base.h_re.real if isinstance(base.h_re, complex) else base.h_re)

    @property
    def reference_gains(self) -> ChannelGains:
        """The draw with both unknown phases at zero (deterministic reference point)."""
        return ChannelGains(
            h_sr=self._h_sr, h_sd=self._h_sd, h_rd=self._h_rd,
            h_se=complex(self._mag_se), h_re=complex(self._mag_re),
        )

    def __call__(self, rng, n: int) -> ChannelGains:
        if n < 1:
            raise DomainError(f"need at least one draw, got n={n}")
        rng = np.random.default_rng(rng)
        # one phase pair per realization: a longer run extends a shorter one
        # drawn from the same seed, so raising the draw count only refines
        # the estimate instead of resampling it
        thetas = rng.uniform(0.0, 2.0 * math.pi, size=(n, 2))
        t14, t24 = thetas[:, 0], thetas[:, 1]
        if "theta_14" in self.pin_unknown:
            t14 = np.full(n, float(self.pin_unknown["theta_14"]))
        if "theta_24" in self.pin_unknown:
            t24 = np.full(n, float(self.pin_unknown["theta_24"]))
        return ChannelGains(
            h_sr=self._h_sr,
            h_sd=self._h_sd,
            h_rd=self._h_rd,
            h_se=self._mag_se * np.exp(1j * t14),
            h_re=self._mag_re * np.exp(1j * t24),
        )
