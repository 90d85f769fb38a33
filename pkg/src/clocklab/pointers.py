"""Measurement-device pointers: conjugate (Q, P) pairs and momentum states.

A pointer mirrors the clock construction with symmetric grids: positions
``dq*(k - (dim-1)/2)`` and momenta ``dp*(m - (dim-1)/2)`` with
``dp = 2*pi*hbar/(dim*dq)``, so the momentum spectrum is symmetric about
zero for any dimension.  Non-negativity of the pointer momentum, which the
measurement model requires, is imposed at the state level: a Gaussian
momentum packet has its negative-momentum components projected out and is
renormalized.  The free evolution of the pointer is neglected throughout,
so its momentum distribution is conserved by every generator in this
package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import OperatorMatrix, SpaceLayout, StateVector


@dataclass
class PointerModel:
    """Conjugate position/momentum pair on symmetric grids."""

    dim: int
    dq: float
    label: str = "E"
    hbar: float = 1.0
    q_grid: np.ndarray = field(init=False)
    p_grid: np.ndarray = field(init=False)
    position_op: OperatorMatrix = field(init=False)
    momentum_op: OperatorMatrix = field(init=False)
    momentum_vectors: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.dim < 8:
            raise ValueError(f"pointer dimension must be >= 8, got {self.dim}")
        if self.dq <= 0:
            raise ValueError("position spacing must be positive")
        layout = SpaceLayout.single(self.label, self.dim)
        half = 0.5 * (self.dim - 1)
        self.q_grid = self.dq * (np.arange(self.dim) - half)
        dp = 2.0 * np.pi * self.hbar / (self.dim * self.dq)
        self.p_grid = dp * (np.arange(self.dim) - half)
        # plane waves <q_k|p_m> = exp(i p q / hbar)/sqrt(N); unitary because both
        # grids are symmetric about zero.
        phases = np.outer(self.q_grid, self.p_grid) / self.hbar
        self.momentum_vectors = np.exp(1j * phases) / np.sqrt(self.dim)
        self.position_op = OperatorMatrix(np.diag(self.q_grid.astype(np.complex128)), layout)
        p_mat = (self.momentum_vectors * self.p_grid) @ self.momentum_vectors.conj().T
        self.momentum_op = OperatorMatrix(0.5 * (p_mat + p_mat.conj().T), layout)

    @property
    def layout(self) -> SpaceLayout:
        return self.position_op.layout

    @property
    def dp(self) -> float:
        return float(self.p_grid[1] - self.p_grid[0])

    def to_momentum_basis(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.momentum_vectors.conj().T @ np.asarray(amplitudes, dtype=np.complex128)

    def from_momentum_basis(self, momentum_amps: np.ndarray) -> np.ndarray:
        return self.momentum_vectors @ np.asarray(momentum_amps, dtype=np.complex128)

    def nonneg_projector(self) -> OperatorMatrix:
        """Projector onto the non-negative momentum eigenspace."""
        mask = (self.p_grid >= 0.0).astype(np.complex128)
        proj = (self.momentum_vectors * mask) @ self.momentum_vectors.conj().T
        return OperatorMatrix(0.5 * (proj + proj.conj().T), self.layout)


@dataclass(frozen=True)
class PointerStateSpec:
    """Target momentum distribution of a pointer state.

    ``p_mean >= 4*p_sigma`` keeps the Gaussian effectively on the
    non-negative momentum half-line, so projecting out the negative part
    barely perturbs the moments.
    """

    p_mean: float
    p_sigma: float

    def validate(self) -> None:
        if self.p_mean <= 0.0:
            raise ValueError(f"pointer mean momentum must be positive, got {self.p_mean}")
        if self.p_sigma <= 0.0:
            raise ValueError("pointer momentum spread must be positive")
        if self.p_mean < 4.0 * self.p_sigma:
            raise ValueError(
                f"positivity regime requires p_mean >= 4*p_sigma "
                f"(got {self.p_mean} < {4.0 * self.p_sigma})"
            )


def build_pointer(dim: int, dq: float, label: str = "E", hbar: float = 1.0) -> PointerModel:
    """Construct the symmetric conjugate pair (Q diagonal, P Fourier-conjugate)."""
    return PointerModel(dim=dim, dq=dq, label=label, hbar=hbar)


def _momentum_gaussian(pointer: PointerModel, spec: PointerStateSpec) -> np.ndarray:
    amps = np.exp(-((pointer.p_grid - spec.p_mean) ** 2) / (4.0 * spec.p_sigma**2))
    return amps.astype(np.complex128)


def negative_momentum_weight(pointer: PointerModel, spec: PointerStateSpec) -> float:
    """Pre-projection probability weight on negative-momentum eigenstates."""
    amps = _momentum_gaussian(pointer, spec)
    total = float(np.sum(np.abs(amps) ** 2))
    neg = float(np.sum(np.abs(amps[pointer.p_grid < 0.0]) ** 2))
    return neg / total


def nonneg_momentum_state(pointer: PointerModel, spec: PointerStateSpec) -> StateVector:
    """Gaussian momentum packet with the negative-momentum part projected out.

    The projection enforces exactly zero weight at p < 0; use
    :func:`negative_momentum_weight` for the pre-projection leakage
    diagnostic.
    """
    spec.validate()
    hi = spec.p_mean + 4.0 * spec.p_sigma
    if hi > pointer.p_grid[-1]:
        raise ValueError(
            f"momentum support up to {hi:.4g} exceeds the grid maximum "
            f"{pointer.p_grid[-1]:.4g}"
        )
    amps = _momentum_gaussian(pointer, spec)
    amps[pointer.p_grid < 0.0] = 0.0
    amps /= np.linalg.norm(amps)
    return StateVector(pointer.from_momentum_basis(amps), pointer.layout)


def momentum_eigenstate(pointer: PointerModel, index: int) -> StateVector:
    """Exact momentum eigenstate |p_index> (a fully delocalized pointer)."""
    if not 0 <= index < pointer.dim:
        raise IndexError(f"momentum index {index} out of range")
    return StateVector(pointer.momentum_vectors[:, index].copy(), pointer.layout)
