"""Dense complex linear algebra over labelled tensor-product Hilbert spaces.

Everything in this package lives on a small composite space described by a
:class:`SpaceLayout`: an ordered list of labelled factors such as
``[("B", 128), ("S", 2), ("E", 32)]``.  States are flat complex vectors,
operators are dense square matrices, and both carry their layout so that
lifting, conditioning and expectation values can check dimensions instead of
trusting the caller.

The module also provides matrix-free helpers (:func:`apply_factor`,
:func:`factor_expectation`) that act on a single factor without ever
materialising the full-space matrix.  Composite spaces are deliberately kept
small (a few thousand dimensions); there is no sparse or structured-matrix
machinery here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered labelled factorisation of a tensor-product space."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        factors = tuple((str(lbl), int(dim)) for lbl, dim in self.factors)
        object.__setattr__(self, "factors", factors)
        labels = [lbl for lbl, _ in factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate factor labels in layout: {labels}")
        for lbl, dim in factors:
            if dim < 1:
                raise ValueError(f"factor {lbl!r} has non-positive dimension {dim}")

    @classmethod
    def single(cls, label: str, dim: int) -> "SpaceLayout":
        return cls(((label, dim),))

    @classmethod
    def of(cls, *factors: tuple[str, int]) -> "SpaceLayout":
        return cls(tuple(factors))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def axis_of(self, label: str) -> int:
        for i, (lbl, _) in enumerate(self.factors):
            if lbl == label:
                return i
        raise KeyError(f"unknown factor label {label!r}; layout has {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.factors[self.axis_of(label)][1]

    def drop(self, label: str) -> "SpaceLayout":
        axis = self.axis_of(label)
        remaining = self.factors[:axis] + self.factors[axis + 1:]
        if not remaining:
            raise ValueError("cannot drop the only factor of a layout")
        return SpaceLayout(remaining)


@dataclass
class StateVector:
    """Complex amplitudes over a labelled tensor-product space."""

    amplitudes: np.ndarray
    layout: SpaceLayout

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.layout.total_dim:
            raise ValueError(
                f"amplitude length {amps.size} does not match layout dimension "
                f"{self.layout.total_dim}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("state amplitudes must be finite")
        self.amplitudes = amps

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.layout)

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per factor (a view when possible)."""
        return self.amplitudes.reshape(self.layout.dims)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.layout)


@dataclass
class OperatorMatrix:
    """Dense square operator over a labelled tensor-product space."""

    entries: np.ndarray
    layout: SpaceLayout

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=np.complex128)
        d = self.layout.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"operator shape {mat.shape} does not match layout dimension {d}")
        self.entries = mat

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.layout)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _check_same_layout(self.layout, other.layout)
        return OperatorMatrix(self.entries @ other.entries, self.layout)


def _check_same_layout(a: SpaceLayout, b: SpaceLayout) -> None:
    if a.factors != b.factors:
        raise ValueError(f"layout mismatch: {a.factors} vs {b.factors}")


def _as_matrix(op: "OperatorMatrix | np.ndarray") -> np.ndarray:
    if isinstance(op, OperatorMatrix):
        return op.entries
    return np.asarray(op, dtype=np.complex128)


def product_state(parts: Iterable[tuple[str, np.ndarray]]) -> StateVector:
    """Tensor product of per-factor amplitude vectors, in the given order."""
    parts = list(parts)
    if not parts:
        raise ValueError("product_state needs at least one factor")
    amps = np.asarray(parts[0][1], dtype=np.complex128).reshape(-1)
    factors = [(parts[0][0], amps.size)]
    for lbl, vec in parts[1:]:
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        amps = np.kron(amps, vec)
        factors.append((lbl, vec.size))
    return StateVector(amps, SpaceLayout(tuple(factors)))


def lift_operator(op: "OperatorMatrix | np.ndarray", factor_label: str,
                  layout: SpaceLayout) -> OperatorMatrix:
    """Embed a single-factor operator into the full space (identity elsewhere)."""
    mat = _as_matrix(op)
    axis = layout.axis_of(factor_label)
    dim = layout.dims[axis]
    if mat.shape != (dim, dim):
        raise ValueError(
            f"operator shape {mat.shape} does not match factor {factor_label!r} "
            f"of dimension {dim}"
        )
    d_before = int(np.prod(layout.dims[:axis], dtype=np.int64))
    d_after = int(np.prod(layout.dims[axis + 1:], dtype=np.int64))
    full = np.kron(np.kron(np.eye(d_before), mat), np.eye(d_after))
    return OperatorMatrix(full, layout)


def expectation(state: StateVector, op: OperatorMatrix) -> complex:
    """Return <psi|A|psi> (complex in general; real for Hermitian A)."""
    _check_same_layout(state.layout, op.layout)
    return complex(np.vdot(state.amplitudes, op.entries @ state.amplitudes))


def hermiticity_defect(op: "OperatorMatrix | np.ndarray") -> float:
    """Frobenius norm of A - A^dagger; zero iff A is Hermitian."""
    mat = _as_matrix(op)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"operator must be square, got shape {mat.shape}")
    return float(np.linalg.norm(mat - mat.conj().T))


def operator_function(op: OperatorMatrix, f: Callable[[np.ndarray], np.ndarray],
                      herm_tol: float = 1e-10) -> OperatorMatrix:
    """Apply a scalar function to a Hermitian operator by spectral calculus.

    Diagonal inputs are mapped pointwise; otherwise the operator is
    diagonalised and ``f`` is applied to the (real) eigenvalues.  For
    real-valued ``f`` the result is re-symmetrised so Hermiticity survives
    floating point.
    """
    mat = _as_matrix(op)
    defect = hermiticity_defect(mat)
    if defect > herm_tol:
        raise ValueError(f"operator is not Hermitian (defect {defect:.3e} > {herm_tol:.1e})")
    diag = np.diagonal(mat)
    if np.count_nonzero(mat - np.diag(diag)) == 0:
        fw = _eval_scalar(f, diag.real)
        return OperatorMatrix(np.diag(fw.astype(np.complex128)), op.layout)
    w, v = np.linalg.eigh(mat)
    fw = _eval_scalar(f, w)
    out = (v * fw) @ v.conj().T
    if np.isrealobj(fw) or np.max(np.abs(fw.imag)) == 0.0:
        out = 0.5 * (out + out.conj().T)
    return OperatorMatrix(out, op.layout)


def _eval_scalar(f: Callable, w: np.ndarray) -> np.ndarray:
    out = f(w)
    out = np.asarray(out)
    if out.shape != w.shape:
        # scalar function that does not broadcast; evaluate pointwise
        out = np.asarray([f(x) for x in w])
    return out


def condition(state: StateVector, factor_label: str, basis_index: int) -> StateVector:
    """Partial inner product with a basis vector of one factor (unnormalized).

    Returns the relative state on the remaining factors; the dropped factor's
    label disappears from the layout.
    """
    axis = state.layout.axis_of(factor_label)
    dim = state.layout.dims[axis]
    if not 0 <= basis_index < dim:
        raise IndexError(f"basis index {basis_index} out of range for factor "
                         f"{factor_label!r} of dimension {dim}")
    if len(state.layout.factors) == 1:
        raise ValueError("cannot condition away the only factor")
    tens = state.tensor_view()
    reduced = np.take(tens, basis_index, axis=axis)
    return StateVector(reduced.reshape(-1), state.layout.drop(factor_label))


def apply_factor(state: StateVector, op: "OperatorMatrix | np.ndarray",
                 factor_label: str) -> StateVector:
    """Apply a single-factor operator without building the lifted matrix."""
    mat = _as_matrix(op)
    axis = state.layout.axis_of(factor_label)
    dim = state.layout.dims[axis]
    if mat.shape != (dim, dim):
        raise ValueError(f"operator shape {mat.shape} does not match factor "
                         f"{factor_label!r} of dimension {dim}")
    tens = np.moveaxis(state.tensor_view(), axis, 0)
    out = np.tensordot(mat, tens, axes=([1], [0]))
    out = np.moveaxis(out, 0, axis)
    return StateVector(out.reshape(-1), state.layout)


def apply_factors(state: StateVector, ops: Mapping[str, "OperatorMatrix | np.ndarray"]) -> StateVector:
    """Apply one single-factor operator per labelled factor (product of lifts)."""
    out = state
    for lbl, op in ops.items():
        out = apply_factor(out, op, lbl)
    return out


def factor_expectation(state: StateVector, op: "OperatorMatrix | np.ndarray",
                       factor_label: str) -> complex:
    """<psi| (op on one factor) |psi> without lifting the operator."""
    return complex(np.vdot(state.amplitudes,
                           apply_factor(state, op, factor_label).amplitudes))


def factor_variance(state: StateVector, op: "OperatorMatrix | np.ndarray",
                    factor_label: str) -> float:
    """Variance of a Hermitian single-factor observable on a normalized state."""
    applied = apply_factor(state, op, factor_label)
    mean = np.vdot(state.amplitudes, applied.amplitudes)
    second = np.vdot(applied.amplitudes, applied.amplitudes)
    return float(second.real - abs(mean) ** 2)
