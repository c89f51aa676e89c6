"""Exact finite-alphabet evaluation of the secrecy rates, plus reduction checks.

The joint law over (s, u1, u2, x1, x2, y2, y, z) factors as

    p(s) * p(u1, u2, x1, x2 | s) * p(y2, y, z | x1, x2, s)

and is materialized as a dense 8-axis tensor; with alphabet sizes up to 4
that is at most 4^8 = 65536 entries, so direct summation is exact and cheap.
The 0*log(0) = 0 convention applies entrywise everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

VARS = ("s", "u1", "u2", "x1", "x2", "y2", "y", "z")
_AXIS = {name: i for i, name in enumerate(VARS)}

_SLICE_TOL = 1e-12
DEFAULT_MAX_ALPHABET = 4


@dataclass
class JointPmf:
    """Dense factored pmf: state p(s), input law p(u1,u2,x1,x2|s), channel p(y2,y,z|x1,x2,s).

    Shapes: state (ns,), input_law (ns, nu1, nu2, nx1, nx2),
    channel (nx1, nx2, ns, ny2, ny, nz).  Every conditional slice must sum
    to 1 within 1e-12 and all entries must be nonnegative.
    """

    state: np.ndarray
    input_law: np.ndarray
    channel: np.ndarray

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=float)
        self.input_law = np.asarray(self.input_law, dtype=float)
        self.channel = np.asarray(self.channel, dtype=float)
        if self.state.ndim != 1 or self.input_law.ndim != 5 or self.channel.ndim != 6:
            raise DomainError(
                "need state (ns,), input_law (ns,nu1,nu2,nx1,nx2), channel (nx1,nx2,ns,ny2,ny,nz); "
                f"got {self.state.shape}, {self.input_law.shape}, {self.channel.shape}"
            )
        ns = self.state.shape[0]
        if self.input_law.shape[0] != ns or self.channel.shape[2] != ns:
            raise DomainError("state alphabet size disagrees between the three factors")
        if self.channel.shape[0] != self.input_law.shape[3] or self.channel.shape[1] != self.input_law.shape[4]:
            raise DomainError("x1/x2 alphabet sizes disagree between input law and channel")
        for name, arr in (("state", self.state), ("input_law", self.input_law), ("channel", self.channel)):
            if not np.isfinite(arr).all():
                raise DomainError(f"{name} contains non-finite entries")
            if (arr < 0).any():
                raise DomainError(f"{name} contains negative entries")
        if abs(self.state.sum() - 1.0) > _SLICE_TOL:
            raise DomainError(f"state pmf sums to {self.state.sum()}, not 1")
        inp_sums = self.input_law.sum(axis=(1, 2, 3, 4))
        if np.max(np.abs(inp_sums - 1.0)) > _SLICE_TOL:
            raise DomainError("some input_law slice does not sum to 1")
        ch_sums = self.channel.sum(axis=(3, 4, 5))
        if np.max(np.abs(ch_sums - 1.0)) > _SLICE_TOL:
            raise DomainError("some channel slice does not sum to 1")

    @property
    def sizes(self) -> dict[str, int]:
        ns, nu1, nu2, nx1, nx2 = self.input_law.shape
        ny2, ny, nz = self.channel.shape[3:]
        return {"s": ns, "u1": nu1, "u2": nu2, "x1": nx1, "x2": nx2, "y2": ny2, "y": ny, "z": nz}

    def joint(self) -> np.ndarray:
        """The full 8-axis joint tensor, axes ordered as VARS."""
        return np.einsum("s,suvab,abswyz->suvabwyz", self.state, self.input_law, self.channel)


def _axes_of(names) -> tuple[int, ...]:
    try:
        return tuple(_AXIS[n] for n in names)
    except KeyError as exc:
        raise DomainError(f"unknown variable {exc.args[0]!r}; valid names: {VARS}") from exc


def mutual_info(pmf: JointPmf, set_a, set_b, set_c=()) -> float:
    """Exact conditional mutual information I(A; B | C) in bits by direct summation.

    The three variable-name sets must be pairwise disjoint; set_c may be
    empty.  Computed as sum p(a,b,c) * log2( p(c) p(a,b,c) / (p(a,c) p(b,c)) )
    over the marginal joint, with zero-probability entries contributing 0.
    """
    a_ax, b_ax, c_ax = _axes_of(set_a), _axes_of(set_b), _axes_of(set_c)
    if not a_ax or not b_ax:
        raise DomainError("set_a and set_b must be nonempty")
    seen = a_ax + b_ax + c_ax
    if len(set(seen)) != len(seen):
        raise DomainError("variable sets must be pairwise disjoint")

    keep = sorted(seen)
    drop = tuple(i for i in range(len(VARS)) if i not in keep)
    sub = pmf.joint().sum(axis=drop)
    # positions of the a/b axes inside the reduced tensor
    pos = {orig: k for k, orig in enumerate(keep)}
    a_pos = tuple(pos[i] for i in a_ax)
    b_pos = tuple(pos[i] for i in b_ax)

    p_abc = sub
    p_ac = sub.sum(axis=b_pos, keepdims=True)
    p_bc = sub.sum(axis=a_pos, keepdims=True)
    p_c = sub.sum(axis=a_pos + b_pos, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (p_abc * p_c) / (p_ac * p_bc)
        terms = np.where(p_abc > 0, p_abc * np.log2(ratio), 0.0)
    return float(terms.sum())


def achievable_rates(pmf: JointPmf) -> tuple[float, float, float]:
    """The two clamped rate expressions and their min, evaluated exactly.

    r_tilde = [I(u1; y2 | s, u2) - I(u1,u2; z)]+
    r_hat   = [I(u1,u2; y) - I(u1,u2; s) - I(u1,u2; z)]+
    r_s     = min(r_tilde, r_hat)
    """
    i_relay = mutual_info(pmf, ("u1",), ("y2",), ("s", "u2"))
    i_state = mutual_info(pmf, ("u1", "u2"), ("s",))
    i_main = mutual_info(pmf, ("u1", "u2"), ("y",))
    i_eve = mutual_info(pmf, ("u1", "u2"), ("z",))
    r_tilde = max(0.0, i_relay - i_eve)
    r_hat = max(0.0, i_main - i_state - i_eve)
    return r_tilde, r_hat, min(r_tilde, r_hat)


@dataclass
class ReductionCheck:
    name: str
    deviation: float
    ok: bool


@dataclass
class ReductionReport:
    checks: list[ReductionCheck]
    tol: float
    passed: bool


def _identified(pmf: JointPmf) -> bool:
    """True when u1 == x1 and u2 == x2 hold with probability one."""
    sizes = pmf.sizes
    if sizes["u1"] != sizes["x1"] or sizes["u2"] != sizes["x2"]:
        return False
    joint = pmf.joint()
    m1 = joint.sum(axis=(0, 2, 4, 5, 6, 7))  # (u1, x1)
    m2 = joint.sum(axis=(0, 1, 3, 5, 6, 7))  # (u2, x2)
    off1 = m1.sum() - np.trace(m1)
    off2 = m2.sum() - np.trace(m2)
    return off1 <= _SLICE_TOL and off2 <= _SLICE_TOL


def check_reductions(pmf: JointPmf, tol: float = 1e-12) -> ReductionReport:
    """Verify the degenerate-alphabet identities that the rate formula must reduce to.

    With |z| = 1 the rates must match the state-aware relay form
    [min(I(u1;y2|s,u2), I(u1,u2;y) - I(u1,u2;s))]+; with |s| = 1 the
    eavesdropper relay form [min(I(u1;y2|u2), I(u1,u2;y)) - I(u1,u2;z)]+;
    with both degeneracies plus u1==x1, u2==x2 the plain decode-and-forward
    rate min(I(x1;y2|x2), I(x1,x2;y)).  Raises DomainError when no reduction
    applies to the given pmf.
    """
    sizes = pmf.sizes
    _, _, r_s = achievable_rates(pmf)
    checks: list[ReductionCheck] = []

    if sizes["z"] == 1:
        i_relay = mutual_info(pmf, ("u1",), ("y2",), ("s", "u2"))
        i_main = mutual_info(pmf, ("u1", "u2"), ("y",))
        i_state = mutual_info(pmf, ("u1", "u2"), ("s",))
        target = max(0.0, min(i_relay, i_main - i_state))
        dev = abs(r_s - target)
        checks.append(ReductionCheck("no-eavesdropper relay form", dev, dev <= tol))

    if sizes["s"] == 1:
        i_relay = mutual_info(pmf, ("u1",), ("y2",), ("u2",))
        i_main = mutual_info(pmf, ("u1", "u2"), ("y",))
        i_eve = mutual_info(pmf, ("u1", "u2"), ("z",))
        target = max(0.0, min(i_relay, i_main) - i_eve)
        dev = abs(r_s - target)
        checks.append(ReductionCheck("state-free eavesdropper relay form", dev, dev <= tol))

    if sizes["s"] == 1 and sizes["z"] == 1 and _identified(pmf):
        i_relay = mutual_info(pmf, ("x1",), ("y2",), ("x2",))
        i_main = mutual_info(pmf, ("x1", "x2"), ("y",))
        target = min(i_relay, i_main)
        dev = abs(r_s - target)
        checks.append(ReductionCheck("plain decode-and-forward", dev, dev <= tol))

    if not checks:
        raise DomainError(
            "no reduction applies: need |z| == 1, |s| == 1, or both plus u=x identification"
        )
    return ReductionReport(checks=checks, tol=tol, passed=all(ch.ok for ch in checks))


def pmf_from_dict(data: dict, max_alphabet: int = DEFAULT_MAX_ALPHABET) -> JointPmf:
    """Build a JointPmf from parsed JSON (nested row-major lists)."""
    missing = {"state", "input_law", "channel"} - set(data)
    if missing:
        raise DomainError(f"pmf definition is missing fields: {sorted(missing)}")
    pmf = JointPmf(
        state=np.asarray(data["state"], dtype=float),
        input_law=np.asarray(data["input_law"], dtype=float),
        channel=np.asarray(data["channel"], dtype=float),
    )
    if max_alphabet is not None:
        oversized = {k: v for k, v in pmf.sizes.items() if v > max_alphabet}
        if oversized:
            raise DomainError(
                f"alphabets exceed the size-{max_alphabet} budget: {oversized} "
                "(pass a larger max_alphabet to allow this)"
            )
    return pmf
