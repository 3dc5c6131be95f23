"""(k, n) threshold sharing of a Gaussian secret.

Shares are labelled 1..2k-1 as players; mode indices of the underlying
:class:`~cvqss.gaussian.GaussianState` are 0-based.  The dealer's linear
map is stored as a ``(2k-1, k)`` matrix ``L`` whose row ``i-1`` holds the
coefficients of the position carried by share ``i`` in terms of
``(x_1, ..., x_k)``; ``x_1`` carries the secret and the remaining ``x_j``
are halves of EPR pairs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import gaussian as g

if TYPE_CHECKING:
    from .circuit import Circuit

SUBSET_DET_TOL = 1e-9
T_DET_TOL = 1e-12
T_COND_MAX = 1e10


class SchemeError(ValueError):
    """A threshold scheme that cannot be dealt or reconstructed."""


class NoCloningError(SchemeError):
    """n >= 2k: two disjoint groups of k players could both hold the secret."""


class AccessStructureError(SchemeError):
    pass


def default_L(k: int, seed: int | None = None) -> np.ndarray:
    """An encoding map for which every k rows of ``[e_1; L]`` are independent.

    For k = 2 this is the beamsplitter encoding
    ``L_1 = (x_1 + x_2)/sqrt2, L_2 = (x_2 - x_1)/sqrt2, L_3 = x_2``.
    Otherwise the rows are unit-normalised Vandermonde rows on distinct,
    non-zero nodes; the nodes are redrawn at random if validation fails.
    """
    if k < 1:
        raise ValueError(f"threshold k must be at least 1, got {k}")
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        h = 1 / np.sqrt(2)
        return np.array([[h, h], [-h, h], [0.0, 1.0]])
    nodes = np.linspace(-1.0, 1.0, 2 * k)
    nodes = nodes[nodes != 0][: 2 * k - 1]
    rng = np.random.default_rng(seed)
    for _ in range(100):
        L = np.vander(nodes, k, increasing=True)
        L /= np.linalg.norm(L, axis=1, keepdims=True)
        if _min_subset_det(L)[0] > SUBSET_DET_TOL:
            return L
        nodes = rng.uniform(-1.0, 1.0, 2 * k - 1)
    raise RuntimeError(f"could not construct a valid encoding map for k={k}")


@dataclass(frozen=True, eq=False)
class ThresholdSchemeSpec:
    k: int
    n: int
    L: np.ndarray = None
    discarded_shares: tuple[int, ...] = None

    def __post_init__(self):
        k, n = int(self.k), int(self.n)
        if k < 1:
            raise SchemeError(f"threshold k must be at least 1, got {k}")
        if n >= 2 * k:
            raise NoCloningError(
                f"a ({k},{n}) scheme is impossible: n >= 2k would let two disjoint groups reconstruct"
            )
        if n < k:
            raise SchemeError(f"n={n} players cannot meet a threshold of k={k}")
        L = default_L(k) if self.L is None else np.array(self.L, dtype=float)
        if L.shape != (2 * k - 1, k):
            raise SchemeError(f"L must have shape ({2 * k - 1}, {k}), got {L.shape}")
        if not np.all(np.isfinite(L)):
            raise SchemeError("L has non-finite entries")
        if self.discarded_shares is None:
            discarded = tuple(range(n + 1, 2 * k))
        else:
            discarded = tuple(sorted(int(i) for i in self.discarded_shares))
        if len(discarded) != 2 * k - 1 - n or len(set(discarded)) != len(discarded):
            raise SchemeError(f"expected {2 * k - 1 - n} distinct discarded shares, got {list(discarded)}")
        for i in discarded:
            if not 1 <= i <= 2 * k - 1:
                raise SchemeError(f"discarded share {i} out of range 1..{2 * k - 1}")
        L.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "discarded_shares", discarded)

    @property
    def shares(self) -> tuple[int, ...]:
        """Labels of the shares actually dealt, ascending."""
        return tuple(i for i in range(1, 2 * self.k) if i not in self.discarded_shares)

    @property
    def full(self) -> "ThresholdSchemeSpec":
        """The (k, 2k-1) scheme this one is derived from by discarding."""
        return ThresholdSchemeSpec(self.k, 2 * self.k - 1, self.L)

    def rows(self) -> np.ndarray:
        """``[e_1; L]``: coefficient rows of x_1 followed by L_1 .. L_{2k-1}."""
        e1 = np.zeros((1, self.k))
        e1[0, 0] = 1.0
        return np.vstack([e1, self.L])


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    min_abs_det: float
    worst_subset: tuple[int, ...]
    subsets_checked: int
    message: str


def _min_subset_det(L: np.ndarray) -> tuple[float, tuple[int, ...], int]:
    k = L.shape[1]
    e1 = np.zeros((1, k))
    e1[0, 0] = 1.0
    rows = np.vstack([e1, L])
    norms = np.linalg.norm(rows, axis=1)
    rows = rows / np.where(norms > 0, norms, 1.0)[:, None]
    best, worst, count = np.inf, (), 0
    for subset in itertools.combinations(range(len(rows)), k):
        d = abs(np.linalg.det(rows[list(subset)]))
        count += 1
        if d < best:
            best, worst = d, subset
    return float(best), worst, count


def validate(spec: ThresholdSchemeSpec) -> ValidationReport:
    """Check that every k of the 2k rows ``x_1, L_1, ..., L_{2k-1}`` are independent.

    Row 0 of the subset labels is ``x_1``; row ``i`` is share ``i``.
    """
    best, worst, count = _min_subset_det(spec.L)
    ok = best > SUBSET_DET_TOL
    if ok:
        msg = f"all {count} subsets of size {spec.k} independent; min |det| = {best:.12g}"
    else:
        names = ["x1" if i == 0 else f"L{i}" for i in worst]
        msg = f"rows {', '.join(names)} are linearly dependent (|det| = {best:.3g})"
    return ValidationReport(ok, best, worst, count, msg)


def check(spec: ThresholdSchemeSpec) -> None:
    report = validate(spec)
    if not report.ok:
        raise AccessStructureError(report.message)


@dataclass(frozen=True, eq=False)
class ReconstructionPlan:
    collaborators: tuple[int, ...]
    complement: tuple[int, ...]
    T: np.ndarray
    S: g.SymplecticTransform

    @property
    def output_share(self) -> int:
        return self.collaborators[0]


def solve_T(
    spec: ThresholdSchemeSpec,
    collaborators: Sequence[int],
    complement: Sequence[int] | None = None,
) -> ReconstructionPlan:
    """Position map taking the collaborators' ``L`` rows to ``(x_1, L_complement)``.

    The first collaborator receives the secret.  ``complement`` defaults to
    the remaining shares in ascending order.
    """
    k = spec.k
    collaborators = tuple(int(i) for i in collaborators)
    if len(collaborators) != k or len(set(collaborators)) != k:
        raise SchemeError(f"need {k} distinct collaborators, got {list(collaborators)}")
    for i in collaborators:
        if not 1 <= i <= 2 * k - 1:
            raise SchemeError(f"share {i} out of range 1..{2 * k - 1}")
        if i in spec.discarded_shares:
            raise SchemeError(f"share {i} was discarded by the dealer")
    rest = tuple(i for i in range(1, 2 * k) if i not in collaborators)
    if complement is None:
        complement = rest
    complement = tuple(int(i) for i in complement)
    if sorted(complement) != list(rest):
        raise SchemeError(f"complement {list(complement)} is not a permutation of {list(rest)}")
    check(spec)

    rows = spec.rows()
    source = rows[list(collaborators)]
    target = rows[[0, *complement]]
    if np.linalg.cond(source) > T_COND_MAX:
        raise SchemeError("collaborator rows are ill-conditioned")
    # T @ source = target  <=>  source^T T^T = target^T
    T = np.linalg.solve(source.T, target.T).T
    det = abs(np.linalg.det(T))
    assert det > T_DET_TOL, "valid access structure produced a singular reconstruction map"
    if np.linalg.cond(T) > T_COND_MAX:
        raise SchemeError("reconstruction map is ill-conditioned")
    T.setflags(write=False)
    return ReconstructionPlan(collaborators, complement, T, g.symplectic_from_position_map(T))


@dataclass(frozen=True, eq=False)
class EncodedSecret:
    state: g.GaussianState
    scheme: ThresholdSchemeSpec
    r: tuple[float, ...]
    # kept for tests and reports; reconstruction never reads it
    secret: complex

    @property
    def shares(self) -> tuple[int, ...]:
        return self.scheme.shares

    def mode_of(self, share: int) -> int:
        try:
            return self.shares.index(share)
        except ValueError:
            raise SchemeError(f"share {share} is not held by any player") from None


def _pair_squeezing(r: float | Sequence[float], k: int) -> tuple[float, ...]:
    rs = tuple(float(x) for x in np.broadcast_to(np.asarray(r, dtype=float), (k - 1,)))
    for x in rs:
        if not x >= 0:
            raise ValueError(f"squeezing must be non-negative, got {x}")
    return rs


def encode(
    secret: complex | g.GaussianState,
    spec: ThresholdSchemeSpec,
    r: float | Sequence[float],
) -> EncodedSecret:
    """Deal a secret into ``spec.n`` shares, using finite squeezing ``r`` for every EPR pair.

    The secret is a coherent amplitude or any single-mode Gaussian state.
    Mode 0 holds the secret and modes ``(j, k-1+j)`` hold the j-th two-mode
    squeezed vacuum; the inverse of the reconstruction map of players
    ``1..k`` is then applied to modes ``0..k-1`` and discarded shares are
    traced out.
    """
    check(spec)
    k = spec.k
    rs = _pair_squeezing(r, k)
    psi = secret if isinstance(secret, g.GaussianState) else g.coherent(secret)
    if psi.mode_count != 1:
        raise ValueError("the secret must be a single-mode state")
    state = psi
    for rj in rs:
        state = g.tensor(state, g.two_mode_squeezed(rj))
    # tensor order is 0, (1, k), (2, k+1), ...; move pair partners after the first k modes
    order = [0] + [1 + 2 * j for j in range(k - 1)] + [2 + 2 * j for j in range(k - 1)]
    state = g.partial_trace(state, order)
    plan = solve_T(spec.full, range(1, k + 1))
    state = g.apply(plan.S.inverse(), state, range(k))
    keep = [i - 1 for i in spec.shares]
    if len(keep) < state.mode_count:
        state = g.partial_trace(state, keep)
    alpha = complex(secret) if not isinstance(secret, g.GaussianState) else complex(np.nan, np.nan)
    return EncodedSecret(state, spec, rs, alpha)


def reconstruct(enc: EncodedSecret, plan: ReconstructionPlan) -> g.GaussianState:
    """Apply the plan's interferometer to the collaborators' shares and return the secret mode."""
    modes = [enc.mode_of(i) for i in plan.collaborators]
    out = g.apply(plan.S, enc.state, modes)
    return g.partial_trace(out, [modes[0]])


def roundtrip_fidelity(alpha: complex, spec: ThresholdSchemeSpec, collaborators: Sequence[int], r: float) -> float:
    plan = solve_T(spec, collaborators)
    return g.fidelity_coherent(reconstruct(encode(alpha, spec, r), plan), alpha)


def encode_22_thermal(alpha: complex, nbar: float) -> g.GaussianState:
    """(2,2) sharing: mix the secret with a thermal state on the dealer's 50/50 beamsplitter."""
    state = g.tensor(g.coherent(alpha), g.thermal(nbar))
    return g.apply(g.beamsplitter(np.pi / 4).inverse(), state)


def leakage(
    enc: EncodedSecret,
    subset: Sequence[int],
    alpha0: complex,
    alpha1: complex,
) -> float:
    """Fidelity between what ``subset`` holds when the secret is ``alpha0`` versus ``alpha1``.

    1 means the shares carry no information distinguishing the two secrets.
    """
    subset = tuple(int(i) for i in subset)
    if len(subset) >= enc.scheme.k:
        raise SchemeError(f"{len(subset)} shares meet the threshold k={enc.scheme.k}; leakage is undefined")
    if not subset:
        return 1.0
    modes = [enc.mode_of(i) for i in subset]
    rho0 = g.partial_trace(encode(alpha0, enc.scheme, enc.r).state, modes)
    rho1 = g.partial_trace(encode(alpha1, enc.scheme, enc.r).state, modes)
    if rho0.mode_count == 1:
        return _single_mode_fidelity(rho0, rho1)
    return g.fidelity(rho0, rho1)


def _single_mode_fidelity(a: g.GaussianState, b: g.GaussianState) -> float:
    # closed form for one mode, vacuum variance 1/2
    total = a.cov + b.cov
    delta = a.mean - b.mean
    big = np.linalg.det(total)
    lam = 4.0 * (np.linalg.det(a.cov) - 0.25) * (np.linalg.det(b.cov) - 0.25)
    lam = max(lam, 0.0)
    f = np.exp(-0.5 * delta @ np.linalg.solve(total, delta)) / (np.sqrt(big + lam) - np.sqrt(lam))
    return float(min(1.0, f))


def fidelity_sweep(
    spec: ThresholdSchemeSpec,
    collaborators: Sequence[int],
    alpha: complex,
    r_grid: Sequence[float],
) -> list[tuple[float, float]]:
    plan = solve_T(spec, collaborators)
    rows = []
    for r in r_grid:
        rho = reconstruct(encode(alpha, spec, r), plan)
        rows.append((float(r), g.fidelity_coherent(rho, alpha)))
    return rows


def is_standard_23(spec: ThresholdSchemeSpec) -> bool:
    """True for the (2,3) scheme with the beamsplitter encoding map."""
    return spec.k == 2 and spec.n == 3 and np.allclose(spec.L, default_L(2), atol=1e-12, rtol=0)


def fidelity_formula_23(collaborators: Sequence[int], r: float) -> float | None:
    """Closed-form coherent-secret fidelity for the (2,3) beamsplitter scheme, if known."""
    c = set(collaborators)
    if c == {1, 2}:
        return 1.0
    if c in ({1, 3}, {2, 3}):
        return (1.0 + np.tanh(r)) / 2.0
    return None


def interferometer_23(collaborators: Sequence[int]) -> "Circuit":
    """Two-element optical realisation of the (2,3) reconstruction maps.

    Players {1,2} meet on a 50/50 beamsplitter; {1,3} on a non-degenerate
    down-converter with cosh r = sqrt(2); {2,3} on the same down-converter
    followed by a pi phase shift on the output share.  Local mode 0 is the
    first collaborator.
    """
    from .circuit import BeamSplitter, Circuit, PhaseShifter, TwoModeSqueezer

    c = tuple(collaborators)
    r = float(np.arccosh(np.sqrt(2.0)))
    if c == (1, 2):
        return Circuit(2, [BeamSplitter((0, 1), np.pi / 4)])
    if c == (1, 3):
        return Circuit(2, [TwoModeSqueezer((0, 1), r)])
    if c == (2, 3):
        return Circuit(2, [TwoModeSqueezer((0, 1), r), PhaseShifter(0, np.pi)])
    raise SchemeError(f"no hand-built interferometer for collaborators {list(c)}")


def dealer_interferometer_23() -> "Circuit":
    """The dealer's 50/50 beamsplitter on shares 1 and 2 (inverse of the {1,2} reconstruction)."""
    from .circuit import BeamSplitter, Circuit

    return Circuit(2, [BeamSplitter((0, 1), np.pi / 4, np.pi)])
