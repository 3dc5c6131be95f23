"""Compile symplectic transforms into optical circuits and back.

A :class:`Circuit` is an ordered list of elements applied left to right,
so ``replay`` returns ``S_last @ ... @ S_first``.  Compilation goes through
a Bloch-Messiah factorisation ``S = K_out @ D @ K_in`` with both passive
factors realised as a triangular beamsplitter mesh followed by trailing
phase shifters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from . import gaussian as g

PASSIVE_TOL = 1e-9
SQUEEZE_TOL = 1e-12
ANGLE_TOL = 1e-14


@dataclass(frozen=True)
class BeamSplitter:
    modes: tuple[int, int]
    theta: float
    phi: float = 0.0

    def symplectic(self) -> g.SymplecticTransform:
        return g.beamsplitter(self.theta, self.phi)


@dataclass(frozen=True)
class PhaseShifter:
    mode: int
    phi: float

    @property
    def modes(self) -> tuple[int]:
        return (self.mode,)

    def symplectic(self) -> g.SymplecticTransform:
        return g.phase_shifter(self.phi)


@dataclass(frozen=True)
class SingleModeSqueezer:
    mode: int
    r: float
    phi: float = 0.0

    @property
    def modes(self) -> tuple[int]:
        return (self.mode,)

    def symplectic(self) -> g.SymplecticTransform:
        return g.single_mode_squeezer(self.r, self.phi)


@dataclass(frozen=True)
class TwoModeSqueezer:
    modes: tuple[int, int]
    r: float
    phi: float = 0.0

    def symplectic(self) -> g.SymplecticTransform:
        return g.two_mode_squeezer(self.r, self.phi)


CircuitElement = Union[BeamSplitter, PhaseShifter, SingleModeSqueezer, TwoModeSqueezer]


@dataclass(frozen=True)
class Circuit:
    mode_count: int
    elements: tuple[CircuitElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            modes = el.modes
            if len(set(modes)) != len(modes) or any(not 0 <= i < self.mode_count for i in modes):
                raise ValueError(f"{el} does not fit a {self.mode_count}-mode circuit")
            params = [v for k, v in vars(el).items() if k not in ("modes", "mode")]
            if not all(math.isfinite(v) for v in params):
                raise ValueError(f"{el} has non-finite parameters")

    def count(self, kind: type) -> int:
        return sum(isinstance(el, kind) for el in self.elements)


def replay(c: Circuit) -> g.SymplecticTransform:
    m = c.mode_count
    S = np.eye(2 * m)
    for el in c.elements:
        S = el.symplectic().embed(el.modes, m).matrix @ S
    return g.SymplecticTransform(S)


# ------------------------------------------------------------ Bloch-Messiah


def _complex_basis(vectors: np.ndarray, m: int, Om: np.ndarray, basis: list[np.ndarray]) -> None:
    """Extend ``basis`` with vectors from an Omega-invariant subspace, keeping it Omega-orthonormal."""
    for u in vectors.T:
        for v in basis:
            u = u - (v @ u) * v - ((Om @ v) @ u) * (Om @ v)
        nrm = np.linalg.norm(u)
        if nrm > 0.5:
            basis.append(u / nrm)
        if len(basis) == m:
            return


def bloch_messiah(S: g.SymplecticTransform) -> tuple[g.SymplecticTransform, np.ndarray, g.SymplecticTransform]:
    """Factor ``S = K_out @ D @ K_in``.

    Returns ``(K_out, r, K_in)`` where ``r`` holds the squeezing values,
    sorted descending, and ``D = diag(exp(r), exp(-r))`` in xxpp order.
    """
    m = S.mode_count
    M = S.matrix
    Om = g.omega(m)
    lam, E = np.linalg.eigh(M @ M.T)
    lam = np.clip(lam, np.finfo(float).tiny, None)
    # polar factor P = sqrt(S S^T) = exp(H) with H symmetric and H Omega = -Omega H
    logs = 0.5 * np.log(lam)
    P_inv = (E / np.sqrt(lam)) @ E.T
    O2 = P_inv @ M

    order = np.argsort(-logs, kind="stable")
    positive = [i for i in order if logs[i] > SQUEEZE_TOL]
    kernel = [i for i in order if abs(logs[i]) <= SQUEEZE_TOL]
    basis = [E[:, i] for i in positive]
    r = [logs[i] for i in positive]
    _complex_basis(E[:, kernel], m, Om, basis)
    r += [0.0] * (m - len(r))
    if len(basis) != m:
        raise g.NotSymplecticError("could not pair stretched and squeezed directions")
    if not positive:
        return g.identity(m), np.zeros(m), g.SymplecticTransform(O2)

    V = np.array(basis).T
    # columns (x; y) and (-y; x) give an orthogonal symplectic matrix
    O = np.hstack([V, -Om @ V])
    K_out = g.SymplecticTransform(O)
    K_in = g.SymplecticTransform(O.T @ O2)
    return K_out, np.array(r), K_in


def squeeze_matrix(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return np.diag(np.concatenate([np.exp(r), np.exp(-r)]))


# ------------------------------------------------------------------ meshes


def passive_to_mesh(K: g.SymplecticTransform) -> list[CircuitElement]:
    """Nearest-neighbour beamsplitter triangle plus trailing phases realising a passive ``K``."""
    m = K.mode_count
    Km = K.matrix
    if np.linalg.norm(Km.T @ Km - np.eye(2 * m)) > PASSIVE_TOL:
        raise ValueError("transform is not passive (not orthogonal)")
    U = g.unitary_from_passive(K).copy()
    splitters: list[BeamSplitter] = []
    for row in range(m - 1, 0, -1):
        for c in range(row):
            a, b = U[row, c], U[row, c + 1]
            if a == 0:
                continue
            theta = math.atan2(abs(a), abs(b))
            phi = float(np.angle(a) - np.angle(b)) if b != 0 else 0.0
            ct, st = math.cos(theta), math.sin(theta)
            col_c = ct * U[:, c] - np.exp(1j * phi) * st * U[:, c + 1]
            col_d = np.exp(-1j * phi) * st * U[:, c] + ct * U[:, c + 1]
            U[:, c], U[:, c + 1] = col_c, col_d
            U[row, c] = 0.0
            if abs(theta) > ANGLE_TOL:
                splitters.append(BeamSplitter((c, c + 1), theta, _wrap(phi)))
    # U = D @ G_N ... G_1 with G_i the splitters in the order they were found
    elements: list[CircuitElement] = list(splitters)
    for i in range(m):
        phase = _wrap(float(np.angle(U[i, i])))
        if abs(phase) > ANGLE_TOL:
            elements.append(PhaseShifter(i, phase))
    return elements


def _wrap(phi: float) -> float:
    return (phi + math.pi) % (2 * math.pi) - math.pi if abs(phi) > math.pi else phi


def compile(S: g.SymplecticTransform) -> Circuit:  # noqa: A001
    K_out, r, K_in = bloch_messiah(S)
    elements: list[CircuitElement] = passive_to_mesh(K_in)
    for i, ri in enumerate(r):
        if ri > SQUEEZE_TOL:
            # phi = pi stretches x by exp(r), matching D
            elements.append(SingleModeSqueezer(i, float(ri), math.pi))
    elements += passive_to_mesh(K_out)
    return Circuit(S.mode_count, elements)


# ----------------------------------------------------------------- netlist


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def to_netlist(c: Circuit) -> str:
    lines = [f"MODES {c.mode_count}"]
    for el in c.elements:
        if isinstance(el, BeamSplitter):
            lines.append(f"BS {el.modes[0]} {el.modes[1]} {_fmt(el.theta)} {_fmt(el.phi)}")
        elif isinstance(el, PhaseShifter):
            lines.append(f"PS {el.mode} {_fmt(el.phi)}")
        elif isinstance(el, SingleModeSqueezer):
            lines.append(f"SQ {el.mode} {_fmt(el.r)} {_fmt(el.phi)}")
        elif isinstance(el, TwoModeSqueezer):
            lines.append(f"TMS {el.modes[0]} {el.modes[1]} {_fmt(el.r)} {_fmt(el.phi)}")
        else:
            raise TypeError(f"unknown circuit element {el!r}")
    return "\n".join(lines) + "\n"


class NetlistError(ValueError):
    pass


_ARITY = {"BS": (2, 2), "PS": (1, 1), "SQ": (1, 2), "TMS": (2, 2)}


def parse_netlist(text: str) -> Circuit:
    """Inverse of :func:`to_netlist`; blank lines and ``#`` comments are ignored."""
    mode_count = None
    elements: list[CircuitElement] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if mode_count is None:
                if tok[0] != "MODES" or len(tok) != 2:
                    raise NetlistError("first line must be 'MODES m'")
                mode_count = int(tok[1])
                continue
            kind = tok[0]
            if kind not in _ARITY:
                raise NetlistError(f"unknown element {kind!r}")
            n_modes, n_params = _ARITY[kind]
            if len(tok) != 1 + n_modes + n_params:
                raise NetlistError(f"{kind} takes {n_modes} mode(s) and {n_params} parameter(s)")
            modes = tuple(int(t) for t in tok[1 : 1 + n_modes])
            params = [float(t) for t in tok[1 + n_modes :]]
        except (ValueError, IndexError) as exc:
            raise NetlistError(f"line {lineno}: {exc}") from None
        if kind == "BS":
            elements.append(BeamSplitter(modes, *params))
        elif kind == "PS":
            elements.append(PhaseShifter(modes[0], *params))
        elif kind == "SQ":
            elements.append(SingleModeSqueezer(modes[0], *params))
        else:
            elements.append(TwoModeSqueezer(modes, *params))
    if mode_count is None:
        raise NetlistError("empty netlist")
    return Circuit(mode_count, elements)


def random_symplectic(m: int, rng: np.random.Generator, depth: int = 10, max_r: float = 1.0) -> g.SymplecticTransform:
    """Compose ``depth`` randomly chosen generators on ``m`` modes."""
    return replay(random_circuit(m, rng, depth, max_r))


def random_circuit(m: int, rng: np.random.Generator, depth: int = 10, max_r: float = 1.0) -> Circuit:
    kinds: Iterable[str] = ["PS", "SQ"] + (["BS", "TMS"] if m > 1 else [])
    kinds = list(kinds)
    elements: list[CircuitElement] = []
    for _ in range(depth):
        kind = kinds[rng.integers(len(kinds))]
        phi = float(rng.uniform(-math.pi, math.pi))
        if kind in ("BS", "TMS"):
            i, j = (int(v) for v in rng.choice(m, size=2, replace=False))
            if kind == "BS":
                elements.append(BeamSplitter((i, j), float(rng.uniform(0, math.pi)), phi))
            else:
                elements.append(TwoModeSqueezer((i, j), float(rng.uniform(0, max_r)), phi))
        elif kind == "PS":
            elements.append(PhaseShifter(int(rng.integers(m)), phi))
        else:
            elements.append(SingleModeSqueezer(int(rng.integers(m)), float(rng.uniform(0, max_r)), phi))
    return Circuit(m, elements)
