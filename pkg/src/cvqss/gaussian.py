"""Gaussian states and symplectic linear algebra.

Conventions used throughout the package:

* hbar = 1, vacuum quadrature variance 1/2;
* quadrature ordering ``(x_1, ..., x_m, p_1, ..., p_m)`` ("xxpp");
* ``x = (a + a^dagger) / sqrt(2)``, ``p = (a - a^dagger) / (i sqrt(2))``;
* the symplectic form is ``Omega = [[0, I], [-I, 0]]``.

Mode indices in this module are 0-based.  States and transforms are
immutable values; every function returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import sqrtm

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-10
PURE_TOL = 1e-12


class InvalidStateError(ValueError):
    """Moments that do not describe a physical Gaussian state."""


class NotSymplecticError(ValueError):
    pass


def omega(m: int) -> np.ndarray:
    """Symplectic form on ``m`` modes in xxpp ordering."""
    eye = np.eye(m)
    zero = np.zeros((m, m))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Sorted symplectic eigenvalues of a positive-definite covariance matrix."""
    m = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * omega(m) @ cov)
    # eigenvalues come in +/- pairs; keep the positive half
    return np.sort(np.abs(ev.real))[::2]


def xxpp_indices(modes: Sequence[int], m: int) -> np.ndarray:
    modes = list(modes)
    return np.array(modes + [i + m for i in modes], dtype=int)


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray
    mode_count: int = field(init=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise InvalidStateError(f"mean vector must have even positive length, got {mean.size}")
        m = mean.size // 2
        if cov.shape != (2 * m, 2 * m):
            raise InvalidStateError(f"covariance shape {cov.shape} does not match {m} modes")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidStateError("non-finite moments")
        scale = max(1.0, np.max(np.abs(cov)))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise InvalidStateError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.min(np.linalg.eigvalsh(cov)) <= 0:
            raise InvalidStateError("covariance matrix is not positive definite")
        nu = symplectic_eigenvalues(cov)
        if nu.min() < 0.5 - UNCERTAINTY_TOL * scale:
            raise InvalidStateError(
                f"uncertainty relation violated: smallest symplectic eigenvalue {nu.min():.3g} < 1/2"
            )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mode_count", m)

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def purity(self) -> float:
        return float(1.0 / np.sqrt(np.linalg.det(2.0 * self.cov)))


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    matrix: np.ndarray

    def __post_init__(self):
        S = np.array(self.matrix, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise NotSymplecticError(f"expected a square matrix of even size, got shape {S.shape}")
        Om = omega(S.shape[0] // 2)
        err = np.linalg.norm(S @ Om @ S.T - Om)
        if err > SYMPLECTIC_TOL * max(1.0, np.linalg.norm(S) ** 2):
            raise NotSymplecticError(f"S Omega S^T differs from Omega by {err:.3g}")
        S.setflags(write=False)
        object.__setattr__(self, "matrix", S)

    @property
    def mode_count(self) -> int:
        return self.matrix.shape[0] // 2

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        return SymplecticTransform(self.matrix @ other.matrix)

    def inverse(self) -> "SymplecticTransform":
        # S^{-1} = -Omega S^T Omega
        Om = omega(self.mode_count)
        return SymplecticTransform(-Om @ self.matrix.T @ Om)

    def is_passive(self, tol: float = 1e-10) -> bool:
        S = self.matrix
        return bool(np.linalg.norm(S.T @ S - np.eye(len(S))) < tol)

    def embed(self, modes: Sequence[int], m: int) -> "SymplecticTransform":
        """Lift onto ``m`` modes, acting on ``modes`` and as identity elsewhere."""
        modes = _check_modes(modes, m)
        if len(modes) != self.mode_count:
            raise ValueError(f"transform acts on {self.mode_count} modes, got {len(modes)} mode indices")
        idx = xxpp_indices(modes, m)
        big = np.eye(2 * m)
        big[np.ix_(idx, idx)] = self.matrix
        return SymplecticTransform(big)


def identity(m: int) -> SymplecticTransform:
    return SymplecticTransform(np.eye(2 * m))


def _check_modes(modes: Sequence[int], m: int) -> list[int]:
    modes = [int(i) for i in modes]
    if len(set(modes)) != len(modes):
        raise ValueError(f"repeated mode index in {modes}")
    for i in modes:
        if not 0 <= i < m:
            raise ValueError(f"mode index {i} out of range for {m} modes")
    return modes


# ---------------------------------------------------------------- states


def vacuum(m: int) -> GaussianState:
    if m < 1:
        raise ValueError("mode count must be at least 1")
    return GaussianState(np.zeros(2 * m), 0.5 * np.eye(2 * m))


def coherent(alpha: complex) -> GaussianState:
    alpha = complex(alpha)
    return GaussianState(np.sqrt(2.0) * np.array([alpha.real, alpha.imag]), 0.5 * np.eye(2))


def thermal(nbar: float) -> GaussianState:
    if nbar < 0:
        raise ValueError(f"mean photon number must be non-negative, got {nbar}")
    return GaussianState(np.zeros(2), (nbar + 0.5) * np.eye(2))


def eta_to_nbar(eta: float) -> float:
    """Thermal occupation of one half of a two-mode squeezed vacuum with ``eta = tanh r``."""
    if not 0 <= eta < 1:
        raise ValueError(f"eta must lie in [0, 1), got {eta} (eta -> 1 is infinite temperature)")
    return eta**2 / (1.0 - eta**2)


@dataclass(frozen=True)
class SqueezingParameter:
    r: float

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r >= 0):
            raise ValueError(f"squeezing must be finite and non-negative, got {self.r}")
        if np.tanh(self.r) >= 1.0:
            raise ValueError(f"squeezing r={self.r} is indistinguishable from the ideal EPR limit")

    @property
    def eta(self) -> float:
        return float(np.tanh(self.r))

    @property
    def nbar(self) -> float:
        return float(np.sinh(self.r) ** 2)


def two_mode_squeezed(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with Var(x1 - x2) = Var(p1 + p2) = exp(-2r)."""
    if r < 0:
        raise ValueError(f"squeezing must be non-negative, got {r}")
    c = 0.5 * np.cosh(2 * r)
    s = 0.5 * np.sinh(2 * r)
    cov = np.array(
        [
            [c, s, 0, 0],
            [s, c, 0, 0],
            [0, 0, c, -s],
            [0, 0, -s, c],
        ]
    )
    return GaussianState(np.zeros(4), cov)


# ------------------------------------------------------------ operations


def apply(S: SymplecticTransform, state: GaussianState, modes: Sequence[int] | None = None) -> GaussianState:
    """Evolve ``state`` by ``S`` acting on ``modes`` (all modes, in order, by default)."""
    m = state.mode_count
    if modes is None:
        modes = range(m)
    modes = _check_modes(modes, m)
    if 2 * len(modes) != S.matrix.shape[0]:
        raise ValueError(f"transform of size {S.matrix.shape[0]} does not match {len(modes)} modes")
    big = S.embed(modes, m).matrix
    return GaussianState(big @ state.mean, big @ state.cov @ big.T)


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state; the modes of ``b`` follow those of ``a``."""
    ma, mb = a.mode_count, b.mode_count
    m = ma + mb
    ia = xxpp_indices(range(ma), m)
    ib = xxpp_indices(range(ma, m), m)
    mean = np.zeros(2 * m)
    cov = np.zeros((2 * m, 2 * m))
    mean[ia] = a.mean
    mean[ib] = b.mean
    cov[np.ix_(ia, ia)] = a.cov
    cov[np.ix_(ib, ib)] = b.cov
    return GaussianState(mean, cov)


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Reduced state on ``keep``; the result's modes follow the order given."""
    keep = _check_modes(keep, state.mode_count)
    if not keep:
        raise ValueError("cannot trace out every mode")
    idx = xxpp_indices(keep, state.mode_count)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def displace(state: GaussianState, shift: np.ndarray) -> GaussianState:
    return GaussianState(state.mean + np.asarray(shift, dtype=float), state.cov)


def fidelity_coherent(rho: GaussianState, alpha: complex) -> float:
    """Overlap <alpha|rho|alpha> of a single-mode Gaussian state with a coherent state."""
    if rho.mode_count != 1:
        raise ValueError(f"expected a single-mode state, got {rho.mode_count} modes")
    sigma = rho.cov + 0.5 * np.eye(2)
    if np.min(np.linalg.eigvalsh(sigma)) <= 0:
        raise InvalidStateError("V + I/2 is not positive definite")
    delta = rho.mean - coherent(alpha).mean
    return float(np.exp(-0.5 * delta @ np.linalg.solve(sigma, delta)) / np.sqrt(np.linalg.det(sigma)))


def fidelity(a: GaussianState, b: GaussianState) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))**2`` between two Gaussian states.

    Uses the closed form of Banchi, Braunstein and Pirandola (PRL 115, 260501)
    rewritten for vacuum variance 1/2.
    """
    if a.mode_count != b.mode_count:
        raise ValueError("states live on different numbers of modes")
    m = a.mode_count
    Om = omega(m)
    V1, V2 = a.cov, b.cov
    total = V1 + V2
    delta = a.mean - b.mean
    gauss = np.exp(-0.5 * delta @ np.linalg.solve(total, delta))
    if abs(a.purity() - 1) < PURE_TOL or abs(b.purity() - 1) < PURE_TOL:
        # one pure state: F = Tr(rho_a rho_b), no matrix square root needed
        return float(min(1.0, gauss / np.sqrt(np.linalg.det(total))))
    vaux = Om.T @ np.linalg.solve(total, 0.25 * Om + V2 @ Om @ V1)
    A = vaux @ Om
    eye = np.eye(2 * m)
    root = sqrtm(eye + 0.25 * np.linalg.matrix_power(np.linalg.inv(A), 2))
    ftot = np.linalg.det(2.0 * (root + eye) @ vaux)
    prefactor = np.sqrt(np.real(ftot) / np.linalg.det(total))
    return float(min(1.0, max(0.0, np.real(prefactor) * gauss)))


# ------------------------------------------------------------ generators


def passive_from_unitary(U: np.ndarray) -> SymplecticTransform:
    """Symplectic of the passive map ``a -> U a``."""
    U = np.asarray(U, dtype=complex)
    return SymplecticTransform(np.block([[U.real, -U.imag], [U.imag, U.real]]))


def unitary_from_passive(K: SymplecticTransform) -> np.ndarray:
    m = K.mode_count
    return K.matrix[:m, :m] + 1j * K.matrix[m:, :m]


def from_bogoliubov(A: np.ndarray, B: np.ndarray) -> SymplecticTransform:
    """Symplectic of ``a -> A a + B a^dagger``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return SymplecticTransform(
        np.block(
            [
                [(A + B).real, -(A - B).imag],
                [(A + B).imag, (A - B).real],
            ]
        )
    )


def beamsplitter(theta: float, phi: float = 0.0) -> SymplecticTransform:
    """Two-mode beamsplitter: a1 -> cos(t) a1 - exp(-i phi) sin(t) a2, a2 -> exp(i phi) sin(t) a1 + cos(t) a2.

    ``beamsplitter(pi/4)`` is the 50/50 element.
    """
    c, s = np.cos(theta), np.sin(theta)
    U = np.array([[c, -np.exp(-1j * phi) * s], [np.exp(1j * phi) * s, c]])
    return passive_from_unitary(U)


def phase_shifter(phi: float) -> SymplecticTransform:
    return passive_from_unitary(np.array([[np.exp(1j * phi)]]))


def single_mode_squeezer(r: float, phi: float = 0.0) -> SymplecticTransform:
    """a -> cosh(r) a - exp(i phi) sinh(r) a^dagger; at phi=0, x is scaled by exp(-r)."""
    return from_bogoliubov(
        np.array([[np.cosh(r)]]), np.array([[-np.exp(1j * phi) * np.sinh(r)]])
    )


def two_mode_squeezer(r: float, phi: float = 0.0) -> SymplecticTransform:
    """a1 -> cosh(r) a1 - exp(i phi) sinh(r) a2^dagger (and 1 <-> 2).

    At phi=0 the position block is [[cosh r, -sinh r], [-sinh r, cosh r]].
    """
    A = np.cosh(r) * np.eye(2)
    B = -np.exp(1j * phi) * np.sinh(r) * np.array([[0, 1], [1, 0]])
    return from_bogoliubov(A, B)


def symplectic_from_position_map(T: np.ndarray) -> SymplecticTransform:
    """Symplectic acting as ``T`` on positions and ``(T^T)^{-1}`` on momenta."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    k = T.shape[0]
    if T.shape != (k, k):
        raise ValueError(f"position map must be square, got shape {T.shape}")
    if abs(np.linalg.det(T)) <= 1e-12:
        raise np.linalg.LinAlgError("position map is singular")
    zero = np.zeros((k, k))
    return SymplecticTransform(np.block([[T, zero], [zero, np.linalg.inv(T).T]]))
