"""Generators of motion for clocks coupled to energy meters.

Two measurement schemes, each seen from two clock frames, give four
generators on three-factor spaces (clock, subsystem S, pointer):

* external meter, frame of the outer clock A: Hermitian, the measured
  system's Hamiltonian times ``(I + g(t) P)`` on the pointer;
* external meter, frame of the inner clock B: non-Hermitian, the outer
  clock's generator dressed by the resolvent ``(I + g(T_A) P)^{-1}``;
* internal meter, frame of A: Hermitian and time-independent thanks to the
  symmetrized coupling ``{g(T_B), H} P / 2``;
* internal meter, frame of B: non-Hermitian with an explicit
  ``-i*hbar/2 g'(t) P`` drift term.

Every generator commutes with the pointer momentum, so each is
block-diagonal over momentum sectors.  The generator classes expose that
structure (:class:`SectorBlocks`) so the dynamics layer can evolve states
with exact per-sector exponentials instead of full-space matrix
exponentials; ``matrix(t)`` assembles the dense operator for tests and
small-scale work.

The module also builds the many-clock effective generators (a redshift
resolvent times the sum of the other clocks' Hamiltonians) and the
Hermitian effective generator of two clocks coupled through the product of
their Hamiltonians.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .clocks import ClockModel
from .pointers import PointerModel
from .pulses import PulseProfile
from .tensor import (
    OperatorMatrix,
    SpaceLayout,
    hermiticity_defect,
    lift_operator,
    operator_function,
)

_HERM_TOL = 1e-10
_SINGULAR_TOL = 1e-8


@dataclass
class SystemSpec:
    """Subsystem S: its Hamiltonian and its coupling to the inner clock.

    The coupling is restricted to the separable form ``f(T_B) (x) V`` with
    ``V`` Hermitian on S and ``f`` a real profile of the inner clock
    reading; ``coupling_profile=None`` means no coupling.  ``dim=1`` models
    the bare-clock case (S present only formally).
    """

    dim: int = 1
    hamiltonian: np.ndarray | None = None
    coupling_op: np.ndarray | None = None
    coupling_profile: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "S"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("subsystem dimension must be >= 1")
        self.hamiltonian = self._checked(self.hamiltonian, "hamiltonian")
        self.coupling_op = self._checked(self.coupling_op, "coupling_op")

    def _checked(self, mat: np.ndarray | None, name: str) -> np.ndarray:
        if mat is None:
            return np.zeros((self.dim, self.dim), dtype=np.complex128)
        mat = np.asarray(mat, dtype=np.complex128)
        if mat.shape != (self.dim, self.dim):
            raise ValueError(f"{name} shape {mat.shape} does not match dim {self.dim}")
        defect = hermiticity_defect(mat)
        if defect > _HERM_TOL:
            raise ValueError(f"{name} is not Hermitian (defect {defect:.3e})")
        return mat

    @classmethod
    def trivial(cls, label: str = "S") -> "SystemSpec":
        return cls(dim=1, label=label)

    def f(self, t) -> np.ndarray | float:
        if self.coupling_profile is None:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        return self.coupling_profile(t)

    @property
    def has_coupling(self) -> bool:
        return self.coupling_profile is not None and np.any(self.coupling_op)

    def coupling_codiagonal(self) -> np.ndarray | None:
        """Eigenvalues of V in the H_S eigenbasis if they commute, else None."""
        if self.dim == 1:
            return self.coupling_op.real.reshape(1)
        w, v = np.linalg.eigh(self.hamiltonian)
        vt = v.conj().T @ self.coupling_op @ v
        off = vt - np.diag(np.diagonal(vt))
        if np.linalg.norm(off) > 1e-12 * max(1.0, np.linalg.norm(vt)):
            return None
        return np.diagonal(vt).real.copy()


def measured_hamiltonian(clock_b: ClockModel, system: SystemSpec) -> OperatorMatrix:
    """Generator of the measured system (inner clock + S) on B (x) S."""
    layout = SpaceLayout.of((clock_b.label, clock_b.dim), (system.label, system.dim))
    h = lift_operator(clock_b.energy_op, clock_b.label, layout).entries
    h = h + lift_operator(system.hamiltonian, system.label, layout).entries
    if system.has_coupling:
        f_vals = np.asarray(system.f(clock_b.t_grid), dtype=float)
        h = h + np.kron(np.diag(f_vals.astype(np.complex128)), system.coupling_op)
    return OperatorMatrix(h, layout)


# ---------------------------------------------------------------------------
# sector structure
# ---------------------------------------------------------------------------

Coefficient = Callable[[np.ndarray, float], np.ndarray]


@dataclass
class SectorBlocks:
    """Diagonalized momentum-sector family of a generator.

    The sector Hamiltonian at pointer momentum ``p_values[i]`` and time
    ``t`` is ``basis[i] @ diag(sum_j coefficients[j](p_values, t)[i] *
    components[j][i]) @ basis_inv[i]``.  ``basis``/``components`` may have a
    leading axis of 1 when shared by all sectors.  All component matrices of
    one family commute, so stepping with midpoint-sampled coefficients is an
    exact matrix exponential of the midpoint generator.
    """

    p_values: np.ndarray
    sector_indices: np.ndarray
    basis: np.ndarray
    basis_inv: np.ndarray
    components: tuple[np.ndarray, ...]
    coefficients: tuple[Coefficient, ...]

    def phase_exponent(self, t: float) -> np.ndarray:
        """sum_j c_j(p, t) * lambda_j, shape (n_sectors, block_dim)."""
        total = None
        for comp, coeff in zip(self.components, self.coefficients):
            term = np.asarray(coeff(self.p_values, t), dtype=np.complex128)[:, None] * comp
            total = term if total is None else total + term
        return total


class _MeterGenerator:
    """Shared plumbing for the four scheme/frame generators."""

    def __init__(self, clock: ClockModel, system: SystemSpec, pulse: PulseProfile,
                 pointer: PointerModel) -> None:
        if len({clock.label, system.label, pointer.label}) != 3:
            raise ValueError("clock, system and pointer labels must be distinct")
        if clock.hbar != pointer.hbar:
            raise ValueError("clock and pointer disagree on hbar")
        self.clock = clock
        self.system = system
        self.pulse = pulse
        self.pointer = pointer
        self.hbar = clock.hbar
        self.layout = SpaceLayout.of(
            (clock.label, clock.dim), (system.label, system.dim),
            (pointer.label, pointer.dim),
        )
        self.rest_dim = clock.dim * system.dim

    @property
    def pointer_label(self) -> str:
        return self.pointer.label

    def matrix(self, t: float) -> OperatorMatrix:
        raise NotImplementedError

    def sector_matrix(self, p: float, t: float) -> np.ndarray:
        raise NotImplementedError

    def blocks(self) -> SectorBlocks | None:
        raise NotImplementedError

    def valid_sector_mask(self) -> np.ndarray:
        """Sectors on which the generator is well defined."""
        return np.ones(self.pointer.dim, dtype=bool)

    def _valid_p(self) -> tuple[np.ndarray, np.ndarray]:
        mask = self.valid_sector_mask()
        idx = np.nonzero(mask)[0]
        return self.pointer.p_grid[idx], idx


class ExternalMeterFrameA(_MeterGenerator):
    """External meter clocked by the outer clock, seen from that clock.

    Hermitian for every t; commutes with the measured system's Hamiltonian,
    so the measured energy is a constant of motion.
    """

    hermitian = True

    def __init__(self, clock_b: ClockModel, system: SystemSpec, pulse: PulseProfile,
                 pointer: PointerModel) -> None:
        super().__init__(clock_b, system, pulse, pointer)
        self.measured_h = measured_hamiltonian(clock_b, system)
        self._eigvals, self._eigvecs = np.linalg.eigh(self.measured_h.entries)

    def matrix(self, t: float) -> OperatorMatrix:
        return external_meter_frame_a(self.measured_h, self.pulse, self.pointer, t)

    def sector_matrix(self, p: float, t: float) -> np.ndarray:
        return (1.0 + float(self.pulse.evaluate(t)) * p) * self.measured_h.entries

    def blocks(self) -> SectorBlocks:
        p_vals, idx = self._valid_p()
        pulse = self.pulse

        def coeff(p: np.ndarray, t: float) -> np.ndarray:
            return 1.0 + float(pulse.evaluate(t)) * p

        return SectorBlocks(
            p_values=p_vals, sector_indices=idx,
            basis=self._eigvecs[None, :, :],
            basis_inv=self._eigvecs.conj().T[None, :, :],
            components=(self._eigvals[None, :].astype(np.complex128),),
            coefficients=(coeff,),
        )


class InternalMeterFrameA(_MeterGenerator):
    """Internal meter clocked by the inner clock, seen from the outer clock.

    Time independent; Hermitian by the symmetrization of the coupling.
    """

    hermitian = True

    def __init__(self, clock_b: ClockModel, system: SystemSpec, pulse: PulseProfile,
                 pointer: PointerModel) -> None:
        super().__init__(clock_b, system, pulse, pointer)
        self.measured_h = measured_hamiltonian(clock_b, system)
        g_b = pulse.as_clock_operator(clock_b).entries
        g_full = np.kron(g_b, np.eye(system.dim))
        hr = self.measured_h.entries
        self.symmetrized = 0.5 * (g_full @ hr + hr @ g_full)
        self._blocks_cache: SectorBlocks | None = None

    def matrix(self, t: float = 0.0) -> OperatorMatrix:
        i_p = np.eye(self.pointer.dim)
        full = np.kron(self.measured_h.entries, i_p)
        full += np.kron(self.symmetrized, self.pointer.momentum_op.entries)
        return OperatorMatrix(full, self.layout)

    def sector_matrix(self, p: float, t: float = 0.0) -> np.ndarray:
        return self.measured_h.entries + p * self.symmetrized

    def blocks(self) -> SectorBlocks:
        if self._blocks_cache is None:
            p_vals, idx = self._valid_p()
            mats = (self.measured_h.entries[None, :, :]
                    + p_vals[:, None, None] * self.symmetrized[None, :, :])
            w, v = np.linalg.eigh(mats)
            self._blocks_cache = SectorBlocks(
                p_values=p_vals, sector_indices=idx,
                basis=v, basis_inv=np.conj(np.swapaxes(v, -1, -2)),
                components=(w.astype(np.complex128),),
                coefficients=(lambda p, t: np.ones_like(p, dtype=np.complex128),),
            )
        return self._blocks_cache


class ExternalMeterFrameB(_MeterGenerator):
    """External meter seen from the inner clock: resolvent-dressed outer clock.

    Non-Hermitian whenever the pulse varies over the outer clock's grid.  The
    inner-clock time enters only as the parameter of the S coupling.
    """

    hermitian = False

    def __init__(self, clock_a: ClockModel, system: SystemSpec, pulse: PulseProfile,
                 pointer: PointerModel) -> None:
        super().__init__(clock_a, system, pulse, pointer)
        self.g_values = np.asarray(pulse.evaluate(clock_a.t_grid), dtype=float)
        self._v_codiag = system.coupling_codiagonal()
        self._blocks_cache: SectorBlocks | None = None

    def valid_sector_mask(self) -> np.ndarray:
        dressing = 1.0 + np.outer(self.g_values, self.pointer.p_grid)
        return np.min(dressing, axis=0) > _SINGULAR_TOL

    def matrix(self, t: float) -> OperatorMatrix:
        return external_meter_frame_b(self.clock, self.pulse, self.pointer,
                                      self.system, t)

    def sector_matrix(self, p: float, t: float) -> np.ndarray:
        denom = 1.0 + self.g_values * p
        if np.min(denom) <= _SINGULAR_TOL:
            raise ValueError(f"singular resolvent in momentum sector p={p}")
        block = np.kron((1.0 / denom)[:, None] * self.clock.energy_op.entries,
                        np.eye(self.system.dim))
        block += np.kron(np.eye(self.clock.dim), self.system.hamiltonian)
        if self.system.has_coupling:
            block += float(self.system.f(t)) * np.kron(np.eye(self.clock.dim),
                                                       self.system.coupling_op)
        return block

    def blocks(self) -> SectorBlocks | None:
        needs_v_term = self.system.has_coupling
        if needs_v_term and self._v_codiag is None:
            return None  # V does not commute with H_S: no shared eigenbasis
        if self._blocks_cache is None:
            self._blocks_cache = self._build_blocks()
        return self._blocks_cache

    def _build_blocks(self) -> SectorBlocks:
        p_vals, idx = self._valid_p()
        d_a, d_s = self.clock.dim, self.system.dim
        dressed = ((1.0 / (1.0 + np.outer(self.g_values, p_vals))).T[:, :, None]
                   * self.clock.energy_op.entries[None, :, :])
        lam_a, vec_a = np.linalg.eig(dressed)
        inv_a = np.linalg.inv(vec_a)
        w_s, v_s = np.linalg.eigh(self.system.hamiltonian)
        n = len(p_vals)
        basis = np.empty((n, d_a * d_s, d_a * d_s), dtype=np.complex128)
        basis_inv = np.empty_like(basis)
        for i in range(n):
            basis[i] = np.kron(vec_a[i], v_s)
            basis_inv[i] = np.kron(inv_a[i], v_s.conj().T)
        comps = [np.repeat(lam_a, d_s, axis=1),
                 np.tile(w_s.astype(np.complex128), d_a)[None, :]]
        coeffs: list[Coefficient] = [
            lambda p, t: np.ones_like(p, dtype=np.complex128),
            lambda p, t: np.ones_like(p, dtype=np.complex128),
        ]
        if self.system.has_coupling:
            f = self.system.f
            comps.append(np.tile(self._v_codiag.astype(np.complex128), d_a)[None, :])
            coeffs.append(lambda p, t: np.full_like(p, float(f(t)), dtype=np.complex128))
        return SectorBlocks(
            p_values=p_vals, sector_indices=idx,
            basis=basis, basis_inv=basis_inv,
            components=tuple(comps), coefficients=tuple(coeffs),
        )


class InternalMeterFrameB(_MeterGenerator):
    """Internal meter seen from the inner clock itself.

    The pulse argument is the frame's own time, so the resolvent is a
    function of the pointer momentum alone, and a ``-i*hbar/2 g'(t) P``
    term makes the generator non-Hermitian during the pulse.
    """

    hermitian = False

    def __init__(self, clock_a: ClockModel, system: SystemSpec, pulse: PulseProfile,
                 pointer: PointerModel) -> None:
        if not pulse.differentiable:
            raise ValueError("inner-frame generator needs a differentiable pulse")
        super().__init__(clock_a, system, pulse, pointer)
        self._v_codiag = system.coupling_codiagonal()
        self._w_a, self._v_a = np.linalg.eigh(clock_a.energy_op.entries)
        self._blocks_cache: SectorBlocks | None = None

    def valid_sector_mask(self) -> np.ndarray:
        g_max = float(np.max(self.pulse.evaluate(
            self.pulse.start + np.linspace(0.0, self.pulse.tau, 257))))
        return 1.0 + g_max * self.pointer.p_grid > _SINGULAR_TOL

    def matrix(self, t: float) -> OperatorMatrix:
        return internal_meter_frame_b(self.clock, self.pulse, self.pointer,
                                      self.system, t)

    def sector_matrix(self, p: float, t: float) -> np.ndarray:
        g = float(self.pulse.evaluate(t))
        gp = float(self.pulse.derivative(t))
        denom = 1.0 + g * p
        if denom <= _SINGULAR_TOL:
            raise ValueError(f"singular resolvent in momentum sector p={p}")
        block = np.kron(self.clock.energy_op.entries, np.eye(self.system.dim)) / denom
        block += (-0.5j * self.hbar * gp * p / denom) * np.eye(self.rest_dim)
        block += np.kron(np.eye(self.clock.dim), self.system.hamiltonian)
        if self.system.has_coupling:
            block += float(self.system.f(t)) * np.kron(np.eye(self.clock.dim),
                                                       self.system.coupling_op)
        return block

    def blocks(self) -> SectorBlocks | None:
        if self.system.has_coupling and self._v_codiag is None:
            return None
        if self._blocks_cache is None:
            self._blocks_cache = self._build_blocks()
        return self._blocks_cache

    def _build_blocks(self) -> SectorBlocks:
        p_vals, idx = self._valid_p()
        d_a, d_s = self.clock.dim, self.system.dim
        w_s, v_s = np.linalg.eigh(self.system.hamiltonian)
        basis = np.kron(self._v_a, v_s)[None, :, :]
        basis_inv = basis[0].conj().T[None, :, :]
        pulse, hbar, f = self.pulse, self.hbar, self.system.f
        comps = [np.repeat(self._w_a.astype(np.complex128), d_s)[None, :],
                 np.tile(w_s.astype(np.complex128), d_a)[None, :],
                 np.ones((1, d_a * d_s), dtype=np.complex128)]

        def clock_coeff(p: np.ndarray, t: float) -> np.ndarray:
            return 1.0 / (1.0 + float(pulse.evaluate(t)) * p)

        def scalar_coeff(p: np.ndarray, t: float) -> np.ndarray:
            g = float(pulse.evaluate(t))
            gp = float(pulse.derivative(t))
            return -0.5j * hbar * gp * p / (1.0 + g * p)

        coeffs: list[Coefficient] = [
            clock_coeff,
            lambda p, t: np.ones_like(p, dtype=np.complex128),
            scalar_coeff,
        ]
        if self.system.has_coupling:
            comps.append(np.tile(self._v_codiag.astype(np.complex128), d_a)[None, :])
            coeffs.append(lambda p, t: np.full_like(p, float(f(t)), dtype=np.complex128))
        return SectorBlocks(
            p_values=p_vals, sector_indices=idx,
            basis=basis, basis_inv=basis_inv,
            components=tuple(comps), coefficients=tuple(coeffs),
        )


# ---------------------------------------------------------------------------
# dense single-time builders
# ---------------------------------------------------------------------------


def external_meter_frame_a(measured_h: OperatorMatrix, pulse: PulseProfile,
                           pointer: PointerModel, t: float) -> OperatorMatrix:
    """Dense outer-frame external-meter generator at outer time t."""
    layout = SpaceLayout(measured_h.layout.factors + ((pointer.label, pointer.dim),))
    coupling = np.eye(pointer.dim) + float(pulse.evaluate(t)) * pointer.momentum_op.entries
    return OperatorMatrix(np.kron(measured_h.entries, coupling), layout)


def internal_meter_frame_a(clock_b: ClockModel, pulse: PulseProfile,
                           pointer: PointerModel, measured_h: OperatorMatrix) -> OperatorMatrix:
    """Dense outer-frame internal-meter generator (time independent)."""
    layout = SpaceLayout(measured_h.layout.factors + ((pointer.label, pointer.dim),))
    d_s = measured_h.layout.total_dim // clock_b.dim
    g_full = np.kron(pulse.as_clock_operator(clock_b).entries, np.eye(d_s))
    hr = measured_h.entries
    sym = 0.5 * (g_full @ hr + hr @ g_full)
    full = np.kron(hr, np.eye(pointer.dim)) + np.kron(sym, pointer.momentum_op.entries)
    return OperatorMatrix(full, layout)


def _dressing_inverse(clock_a: ClockModel, pulse: PulseProfile,
                      pointer: PointerModel, s_dim: int) -> np.ndarray:
    """Dense (I + g(T_A) P)^{-1} on A (x) S (x) pointer."""
    g_vals = np.asarray(pulse.evaluate(clock_a.t_grid), dtype=float)
    eigenvals = 1.0 + np.outer(g_vals, pointer.p_grid)
    if np.min(np.abs(eigenvals)) <= _SINGULAR_TOL:
        raise ValueError("dressing operator I + g(T_A) P is numerically singular; "
                         "the positivity assumptions are violated on this grid")
    v_p = pointer.momentum_vectors
    inv_blocks = np.einsum("qp,ap,rp->aqr", v_p, 1.0 / eigenvals, v_p.conj())
    n_a, n_p = clock_a.dim, pointer.dim
    block_dim = s_dim * n_p
    full = np.zeros((n_a * block_dim, n_a * block_dim), dtype=np.complex128)
    eye_s = np.eye(s_dim)
    for a in range(n_a):
        i0 = a * block_dim
        full[i0:i0 + block_dim, i0:i0 + block_dim] = np.kron(eye_s, inv_blocks[a])
    return full


def external_meter_frame_b(clock_a: ClockModel, pulse: PulseProfile,
                           pointer: PointerModel, system: SystemSpec,
                           t_inner: float) -> OperatorMatrix:
    """Dense inner-frame external-meter generator at inner time t_inner."""
    layout = SpaceLayout.of((clock_a.label, clock_a.dim), (system.label, system.dim),
                            (pointer.label, pointer.dim))
    resolvent = _dressing_inverse(clock_a, pulse, pointer, system.dim)
    h = resolvent @ lift_operator(clock_a.energy_op, clock_a.label, layout).entries
    h += lift_operator(system.hamiltonian, system.label, layout).entries
    if system.has_coupling:
        h += float(system.f(t_inner)) * lift_operator(system.coupling_op, system.label,
                                                      layout).entries
    return OperatorMatrix(h, layout)


def internal_meter_frame_b(clock_a: ClockModel, pulse: PulseProfile,
                           pointer: PointerModel, system: SystemSpec,
                           t_inner: float) -> OperatorMatrix:
    """Dense inner-frame internal-meter generator at inner time t_inner."""
    if not pulse.differentiable:
        raise ValueError("inner-frame generator needs a differentiable pulse")
    layout = SpaceLayout.of((clock_a.label, clock_a.dim), (system.label, system.dim),
                            (pointer.label, pointer.dim))
    g = float(pulse.evaluate(t_inner))
    g_prime = float(pulse.derivative(t_inner))
    denom = 1.0 + g * pointer.p_grid
    if np.min(denom) <= _SINGULAR_TOL:
        raise ValueError("I + g(t) P is singular on the pointer spectrum")
    v_p = pointer.momentum_vectors
    resolvent_p = (v_p * (1.0 / denom)) @ v_p.conj().T
    core = lift_operator(clock_a.energy_op, clock_a.label, layout).entries
    core += (-0.5j * clock_a.hbar * g_prime) * lift_operator(
        pointer.momentum_op, pointer.label, layout).entries
    h = lift_operator(resolvent_p, pointer.label, layout).entries @ core
    h += lift_operator(system.hamiltonian, system.label, layout).entries
    if system.has_coupling:
        h += float(system.f(t_inner)) * lift_operator(system.coupling_op, system.label,
                                                      layout).entries
    return OperatorMatrix(h, layout)


# ---------------------------------------------------------------------------
# many-clock effective generators
# ---------------------------------------------------------------------------


@dataclass
class MultiClockSpec:
    """A chain of clocks with one clock's Hamiltonian dressed by a function
    of other clocks' readings (or of its own reading, as a parameter).

    ``target`` is the clock whose frame is taken; the effective generator
    acts on the composite of the remaining clocks.  ``f`` must be
    non-negative on the relevant grids so the redshift factor ``I + f`` is
    invertible.
    """

    clocks: Sequence[ClockModel]
    target: int
    f: Callable[..., np.ndarray]
    f_args: tuple[int, ...] = ()
    self_interaction: bool = False
    f_derivative: Callable[[float], float] | None = None
    interaction: OperatorMatrix | None = None

    def __post_init__(self) -> None:
        n = len(self.clocks)
        if n < 2:
            raise ValueError("need at least two clocks")
        if not 0 <= self.target < n:
            raise ValueError("target index out of range")
        labels = [c.label for c in self.clocks]
        if len(set(labels)) != n:
            raise ValueError(f"clock labels must be distinct, got {labels}")
        if self.self_interaction:
            if self.f_derivative is None:
                raise ValueError("self-interaction case needs f_derivative")
        else:
            if self.target in self.f_args:
                raise ValueError("target clock may not appear among the f arguments "
                                 "unless self_interaction is set")
            if not self.f_args:
                raise ValueError("external-argument case needs at least one f argument")
            for r in self.f_args:
                if not 0 <= r < n:
                    raise ValueError(f"f argument index {r} out of range")

    def rest_layout(self) -> SpaceLayout:
        factors = tuple((c.label, c.dim) for i, c in enumerate(self.clocks)
                        if i != self.target)
        return SpaceLayout(factors)

    def rest_indices(self) -> list[int]:
        return [i for i in range(len(self.clocks)) if i != self.target]


def _redshift_values(spec: MultiClockSpec, layout: SpaceLayout) -> np.ndarray:
    """f(T_r1, ..., T_rm) evaluated over the composite grid, flattened."""
    rest = spec.rest_indices()
    dims = layout.dims
    grids = []
    for r in spec.f_args:
        axis = rest.index(r)
        shape = [1] * len(dims)
        shape[axis] = dims[axis]
        grids.append(spec.clocks[r].t_grid.reshape(shape))
    values = np.broadcast_to(np.asarray(spec.f(*grids), dtype=float),
                             dims).reshape(-1)
    if np.min(values) < 0.0:
        raise ValueError("redshift profile f must be non-negative on the grids")
    return values


def multiclock_effective(spec: MultiClockSpec, t_target: float | None = None) -> OperatorMatrix:
    """Effective generator in the target clock's frame.

    External-argument case: ``(I+f(T_r...))^{-1} (sum_{k != target} H_k +
    interaction)``.  Self-interaction case (``t_target`` required): the same
    sum acquires a ``-i*hbar/2 f'(t)`` drift and the redshift factor is the
    scalar ``1 + f(t)``.
    """
    layout = spec.rest_layout()
    hbar = spec.clocks[spec.target].hbar
    h_sum = np.zeros((layout.total_dim, layout.total_dim), dtype=np.complex128)
    for i in spec.rest_indices():
        clock = spec.clocks[i]
        h_sum += lift_operator(clock.energy_op, clock.label, layout).entries
    if spec.interaction is not None:
        if spec.interaction.layout.factors != layout.factors:
            raise ValueError("interaction layout must match the non-target composite")
        h_sum += spec.interaction.entries
    if spec.self_interaction:
        if t_target is None:
            raise ValueError("self-interaction case needs the target clock time")
        f_val = float(spec.f(t_target))
        if f_val < 0.0:
            raise ValueError("redshift profile f must be non-negative")
        drift = -0.5j * hbar * float(spec.f_derivative(t_target))
        h_eff = (h_sum + drift * np.eye(layout.total_dim)) / (1.0 + f_val)
        return OperatorMatrix(h_eff, layout)
    values = _redshift_values(spec, layout)
    denom = 1.0 + values
    if np.min(np.abs(denom)) <= _SINGULAR_TOL:
        raise ValueError("redshift factor I + f is numerically singular")
    return OperatorMatrix((1.0 / denom)[:, None] * h_sum, layout)


def gravitational_effective(clock_b: ClockModel, coupling: float) -> OperatorMatrix:
    """Effective generator of one clock coupled to another through the
    product of their Hamiltonians: ``(I + coupling*H)^{-1} H``, Hermitian."""
    if coupling < 0.0:
        raise ValueError("coupling must be non-negative")
    eigenvalues = clock_b.hbar * clock_b.frequencies
    denom = 1.0 + coupling * eigenvalues
    if np.min(np.abs(denom)) <= _SINGULAR_TOL:
        raise ValueError("I + coupling*H is numerically singular "
                         "(an eigenvalue sits at -1/coupling)")
    return operator_function(clock_b.energy_op, lambda w: w / (1.0 + coupling * w))
