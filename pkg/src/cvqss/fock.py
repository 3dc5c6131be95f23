"""Truncated Fock-space simulator used to cross-check the Gaussian pipeline.

Deliberately simple: states are dense amplitude tensors of shape
``(N+1,) * modes``, each optical element is the exponential of its
truncated quadratic generator, and quadrature moments are read off with
ladder operators.  Nothing here imports the symplectic code path, so
agreement with :mod:`cvqss.gaussian` is an independent check of both the
phase-space formulas and the element conventions.

Truncation is tracked explicitly: ``leakage`` bounds the probability that
sits at (or was pushed through) the cutoff.  Anything above
``MAX_LEAKAGE`` is refused rather than returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import expm_multiply

from .circuit import BeamSplitter, Circuit, PhaseShifter, SingleModeSqueezer, TwoModeSqueezer

MAX_LEAKAGE = 1e-6


class TruncationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FockVector:
    amplitudes: np.ndarray
    leakage: float = 0.0

    @property
    def mode_count(self) -> int:
        return self.amplitudes.ndim

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Density operator on ``modes`` modes stored as a ``(D, D)`` matrix, ``D = (N+1)**modes``."""

    matrix: np.ndarray
    mode_count: int
    leakage: float = 0.0

    def __post_init__(self):
        rho = self.matrix
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("density matrix is not hermitian")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def _ladder(N: int) -> sparse.csr_matrix:
    return sparse.diags(np.sqrt(np.arange(1, N + 1)), 1, shape=(N + 1, N + 1), format="csr")


def vacuum_fock(m: int, N: int) -> FockVector:
    amp = np.zeros((N + 1,) * m, dtype=complex)
    amp[(0,) * m] = 1.0
    return FockVector(amp)


def coherent_fock(alpha: complex, N: int) -> FockVector:
    if N < 1:
        raise ValueError("cutoff must be at least 1")
    if abs(alpha) ** 2 > N / 2:
        raise TruncationError(f"|alpha|^2 = {abs(alpha) ** 2:.3g} is too large for cutoff {N}")
    n = np.arange(N + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        amp = (n == 0).astype(complex)
    else:
        amp = np.exp(-abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - 0.5 * log_fact)
    return FockVector(amp, max(0.0, 1.0 - float(np.sum(np.abs(amp) ** 2))))


def two_mode_squeezed_fock(r: float, N: int) -> FockVector:
    """Schmidt form sqrt(1 - eta^2) sum_n eta^n |n, n> with eta = tanh r."""
    eta = math.tanh(r)
    tail = eta ** (2 * (N + 1))
    if tail > 1e-12:
        raise TruncationError(f"r={r} leaves {tail:.2g} of the state above cutoff {N}")
    amp = np.zeros((N + 1, N + 1), dtype=complex)
    idx = np.arange(N + 1)
    amp[idx, idx] = math.sqrt(1 - eta**2) * eta**idx
    return FockVector(amp, tail)


def tensor_fock(a: FockVector, b: FockVector) -> FockVector:
    if a.cutoff != b.cutoff:
        raise ValueError("cutoffs differ")
    amp = np.multiply.outer(a.amplitudes, b.amplitudes)
    return FockVector(amp, a.leakage + b.leakage)


def _generator(el, N: int) -> sparse.csr_matrix:
    """Anti-hermitian G with the element's unitary equal to exp(G) on its own modes."""
    a = _ladder(N)
    eye = sparse.identity(N + 1, format="csr")
    ad = a.conj().T
    if isinstance(el, PhaseShifter):
        return 1j * el.phi * (ad @ a)
    if isinstance(el, SingleModeSqueezer):
        e = np.exp(1j * el.phi)
        return 0.5 * el.r * (np.conj(e) * (a @ a) - e * (ad @ ad))
    a1, a2 = sparse.kron(a, eye), sparse.kron(eye, a)
    a1d, a2d = a1.conj().T, a2.conj().T
    e = np.exp(1j * el.phi)
    if isinstance(el, BeamSplitter):
        return el.theta * (e * (a1 @ a2d) - np.conj(e) * (a1d @ a2))
    if isinstance(el, TwoModeSqueezer):
        return el.r * (np.conj(e) * (a1 @ a2) - e * (a1d @ a2d))
    raise TypeError(f"unknown element {el!r}")


def _edge_weight(amp: np.ndarray, modes: Sequence[int]) -> float:
    N = amp.shape[0] - 1
    p = np.abs(amp) ** 2
    w = 0.0
    for i in modes:
        w += float(np.sum(np.take(p, [N - 1, N], axis=i)))
    return w


def apply_element_fock(state: FockVector, el, modes: Sequence[int] | None = None) -> FockVector:
    """Evolve by one circuit element; ``modes`` maps the element's local modes onto the state's."""
    local = el.modes
    targets = list(local) if modes is None else [modes[i] for i in local]
    N = state.cutoff
    G = _generator(el, N)
    amp = np.moveaxis(state.amplitudes, targets, range(len(targets)))
    shape = amp.shape
    flat = amp.reshape((N + 1) ** len(targets), -1)
    out = expm_multiply(G, flat) if G.nnz else flat
    out = np.moveaxis(out.reshape(shape), range(len(targets)), targets)
    leak = state.leakage + _edge_weight(out, targets) + _edge_weight(state.amplitudes, targets)
    if leak > MAX_LEAKAGE:
        raise TruncationError(f"truncation leakage {leak:.2g} exceeds {MAX_LEAKAGE:g} at cutoff {N}")
    return FockVector(out, leak)


def apply_circuit_fock(state: FockVector, circuit: Circuit, modes: Sequence[int] | None = None) -> FockVector:
    if modes is None:
        modes = list(range(circuit.mode_count))
    if len(modes) != circuit.mode_count:
        raise ValueError("mode map does not match the circuit")
    for el in circuit.elements:
        state = apply_element_fock(state, el, modes)
    return state


def reduce(state: FockVector, keep: Sequence[int]) -> FockDensity:
    """Reduced density matrix on ``keep`` (in the given order)."""
    keep = list(keep)
    m = state.mode_count
    rest = [i for i in range(m) if i not in keep]
    amp = np.transpose(state.amplitudes, keep + rest)
    D = (state.cutoff + 1) ** len(keep)
    psi = amp.reshape(D, -1)
    rho = psi @ psi.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return FockDensity(rho, len(keep), state.leakage)


def _apply_lowering(amp: np.ndarray, mode: int) -> np.ndarray:
    N = amp.shape[0] - 1
    out = np.zeros_like(amp)
    src = [slice(None)] * amp.ndim
    dst = [slice(None)] * amp.ndim
    src[mode] = slice(1, N + 1)
    dst[mode] = slice(0, N)
    shape = [1] * amp.ndim
    shape[mode] = N
    out[tuple(dst)] = amp[tuple(src)] * np.sqrt(np.arange(1, N + 1)).reshape(shape)
    return out


def moments(state: FockVector) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature mean and covariance (xxpp, vacuum variance 1/2) of a pure truncated state."""
    psi = state.amplitudes
    m = state.mode_count
    nrm = np.vdot(psi, psi).real
    lowered = [_apply_lowering(psi, i) for i in range(m)]
    A = np.array([np.vdot(psi, la) for la in lowered]) / nrm
    Nmat = np.array([[np.vdot(lowered[i], lowered[j]) for j in range(m)] for i in range(m)]) / nrm
    Mmat = np.array(
        [[np.vdot(psi, _apply_lowering(lowered[j], i)) for j in range(m)] for i in range(m)]
    ) / nrm
    return _moments_from_ladder(A, Nmat, Mmat)


def moments_density(rho: FockDensity, N: int) -> tuple[np.ndarray, np.ndarray]:
    m = rho.mode_count
    a = _ladder(N).toarray()
    eye = np.eye(N + 1)

    def lower(i):
        ops = [eye] * m
        ops[i] = a
        out = ops[0]
        for op in ops[1:]:
            out = np.kron(out, op)
        return out

    lows = [lower(i) for i in range(m)]
    R = rho.matrix / rho.trace()
    A = np.array([np.trace(R @ L) for L in lows])
    Nmat = np.array([[np.trace(R @ lows[i].conj().T @ lows[j]) for j in range(m)] for i in range(m)])
    Mmat = np.array([[np.trace(R @ lows[i] @ lows[j]) for j in range(m)] for i in range(m)])
    return _moments_from_ladder(A, Nmat, Mmat)


def _moments_from_ladder(A, Nmat, Mmat):
    # A_i = <a_i>, N_ij = <a_i^+ a_j>, M_ij = <a_i a_j>
    m = len(A)
    eye = np.eye(m)
    xx = Mmat.real + Nmat.real + eye / 2
    pp = -Mmat.real + Nmat.real + eye / 2
    xp = Mmat.imag + Nmat.imag
    second = np.block([[xx, xp], [xp.T, pp]])
    mean = np.sqrt(2.0) * np.concatenate([A.real, A.imag])
    cov = second - np.outer(mean, mean)
    return mean, 0.5 * (cov + cov.T)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = eigh(rho)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def fidelity_fock(a: FockVector | FockDensity, b: FockVector | FockDensity) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2; reduces to |<a|b>|^2 or <a|b|a> for pure inputs."""
    if isinstance(a, FockVector) and isinstance(b, FockVector):
        return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
    if isinstance(a, FockDensity) and isinstance(b, FockVector):
        a, b = b, a
    if isinstance(a, FockVector):
        v = a.amplitudes.reshape(-1)
        return float(np.real(v.conj() @ b.matrix @ v))
    s = _psd_sqrt(a.matrix)
    inner = s @ b.matrix @ s
    w = np.clip(eigh(0.5 * (inner + inner.conj().T), eigvals_only=True), 0, None)
    return float(np.sum(np.sqrt(w)) ** 2)


def coherent_density(alpha: complex, N: int) -> FockDensity:
    v = coherent_fock(alpha, N).amplitudes
    return FockDensity(np.outer(v, v.conj()), 1)


def thermal_density(nbar: float, N: int) -> FockDensity:
    n = np.arange(N + 1)
    p = nbar**n / (1 + nbar) ** (n + 1)
    return FockDensity(np.diag(p).astype(complex), 1, max(0.0, 1 - float(p.sum())))


def roundtrip_23(alpha: complex, r: float, collaborators: Sequence[int], N: int = 40):
    """Deal a coherent secret in the (2,3) scheme and reconstruct it, entirely in Fock space.

    Uses the two-element interferometers (beamsplitter / down-converter).
    Returns ``(encoded, reconstructed, fidelity)``: the three-mode pure
    states before and after reconstruction, and <alpha|rho|alpha> on the
    first collaborator's mode.
    """
    from .scheme import dealer_interferometer_23, interferometer_23

    state = tensor_fock(coherent_fock(alpha, N), two_mode_squeezed_fock(r, N))
    encoded = apply_circuit_fock(state, dealer_interferometer_23(), [0, 1])
    modes = [i - 1 for i in collaborators]
    out = apply_circuit_fock(encoded, interferometer_23(collaborators), modes)
    F = fidelity_fock(coherent_fock(alpha, N), reduce(out, [modes[0]]))
    return encoded, out, F
