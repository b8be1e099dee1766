"""Exact 2-dimensional complex linear algebra for a single qubit.

States are column vectors in the Z eigenbasis ``{|+1>, |-1>}``. Values are
immutable: the backing arrays are flagged read-only at construction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotHermitian, NotNormalized

TOL = 1e-12


def _frozen(values, shape):
    arr = np.array(values, dtype=np.complex128)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized qubit ket."""

    amplitudes: np.ndarray

    def __init__(self, amplitudes):
        arr = _frozen(amplitudes, (2,))
        norm2 = float(np.vdot(arr, arr).real)
        if abs(norm2 - 1.0) > TOL:
            raise NotNormalized(f"state has norm^2 {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def normalized(cls, amplitudes):
        arr = np.asarray(amplitudes, dtype=np.complex128)
        return cls(arr / np.linalg.norm(arr))

    def __getitem__(self, i):
        return self.amplitudes[i]

    def __repr__(self):
        a, b = self.amplitudes
        return f"PureState({a:.6g}, {b:.6g})"

    def projector(self):
        """Return ``|psi><psi|`` as a :class:`HermitianOperator`."""
        return HermitianOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def orthogonal(self):
        """The (phase-fixed) state orthogonal to this one."""
        a, b = self.amplitudes
        return PureState([-np.conj(b), np.conj(a)])


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """2x2 Hermitian matrix. Positivity is not required."""

    entries: np.ndarray

    def __init__(self, entries):
        arr = _frozen(entries, (2, 2))
        dev = float(np.max(np.abs(arr - arr.conj().T)))
        if dev > TOL:
            raise NotHermitian(f"matrix deviates from its adjoint by {dev:.3g}")
        object.__setattr__(self, "entries", arr)

    def __repr__(self):
        return f"HermitianOperator({self.entries.tolist()})"

    def __matmul__(self, other):
        other = other.entries if isinstance(other, HermitianOperator) else other
        return self.entries @ other

    def trace(self):
        return float(np.trace(self.entries).real)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)


I = HermitianOperator(np.eye(2))
X = HermitianOperator([[0, 1], [1, 0]])
Y = HermitianOperator([[0, -1j], [1j, 0]])
Z = HermitianOperator([[1, 0], [0, -1]])

KET_PLUS = PureState([1, 0])
KET_MINUS = PureState([0, 1])


def inner(a, b):
    """``<a|b>`` (conjugate-linear in the first argument)."""
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def matrix_element(phi, A, psi):
    """``<phi|A|psi>``; ``A`` may be any 2x2 array or operator."""
    M = A.entries if isinstance(A, HermitianOperator) else np.asarray(A)
    return complex(np.vdot(phi.amplitudes, M @ psi.amplitudes))


def expectation(A, psi):
    """``<psi|A|psi>``, real for Hermitian ``A``."""
    value = matrix_element(psi, A, psi)
    if abs(value.imag) > TOL:
        raise NotHermitian(f"expectation has imaginary part {value.imag:.3g}")
    return value.real


def anticommutator(A, B):
    """``AB + BA``."""
    a, b = A.entries, B.entries
    return HermitianOperator(a @ b + b @ a)


@dataclass(frozen=True, eq=False)
class StatePair:
    """Pre-selection ``psi = (c, s)`` and post-selection ``phi = (c, -s)``
    with ``c = cos(theta/2)``, ``s = sin(theta/2)``; ``<phi|psi> = cos(theta)``.
    """

    theta: float
    psi: PureState
    phi: PureState


def make_state_pair(theta):
    theta = float(theta)
    if not (0.0 <= theta < np.pi / 2):
        raise DomainError(f"theta must satisfy 0 <= theta < pi/2, got {theta!r}")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return StatePair(theta, PureState([c, s]), PureState([c, -s]))
