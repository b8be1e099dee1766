"""Closed-form weak values, the linearized sign operation and its statistics.

Conditioning formulas recover only ``Re(a_w)``; the imaginary part is kept on
:func:`weak_value` for inspection but never enters a probability.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InadmissibleStrength, OrthogonalSelection
from .qubit import (
    KET_MINUS,
    KET_PLUS,
    X,
    Z,
    HermitianOperator,
    PureState,
    anticommutator,
    expectation,
    inner,
    matrix_element,
)

ORTHOGONAL_TOL = 1e-14
SIGNS = (+1, -1)


def _check_sign(s):
    if s not in SIGNS:
        raise DomainError(f"outcome sign must be +1 or -1, got {s!r}")
    return int(s)


@dataclass(frozen=True)
class WeakSetup:
    """Observable ``A`` measured with strength ``0 < lam < 1``."""

    A: HermitianOperator
    lam: float

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise DomainError(f"measurement strength violates 0<λ<1: λ={self.lam!r}")


def weak_value(A, psi, phi):
    """``<phi|A|psi> / <phi|psi>`` as a complex number."""
    overlap = inner(phi, psi)
    if abs(overlap) <= ORTHOGONAL_TOL:
        raise OrthogonalSelection(f"|<phi|psi>| = {abs(overlap):.3g} is below {ORTHOGONAL_TOL}")
    return matrix_element(phi, A, psi) / overlap


def apply_weak_operation(setup, rho, s):
    """Unnormalized state after reading sign ``s``: ``(rho + s*lam/2 {A, rho}) / 2``.

    Truncated at first order in ``lam``, so the result need not be positive.
    """
    s = _check_sign(s)
    if abs(rho.trace() - 1.0) > 1e-12:
        raise DomainError(f"rho must have unit trace, got {rho.trace()!r}")
    ac = anticommutator(setup.A, rho).entries
    return HermitianOperator(0.5 * (rho.entries + s * (setup.lam / 2) * ac))


def outcome_prob(setup, psi, s):
    s = _check_sign(s)
    return 0.5 * (1.0 + s * setup.lam * expectation(setup.A, psi))


def _joint_unchecked(setup, psi, phi, s):
    overlap = inner(phi, psi)
    cross = matrix_element(phi, setup.A, psi) * overlap.conjugate()
    return 0.5 * (abs(overlap) ** 2 + s * setup.lam * cross.real)


def joint_prob(setup, psi, phi, s):
    """``Pr(s, phi | psi) = <phi| E_s(|psi><psi|) |phi>``."""
    s = _check_sign(s)
    p = _joint_unchecked(setup, psi, phi, s)
    if p < 0.0:
        if p > -1e-15:
            return 0.0
        raise InadmissibleStrength(
            f"joint probability {p:.3g} < 0 for s={s:+d}; λ={setup.lam} is too strong",
            max_lambda=max_admissible_lambda(setup.A, psi, phi),
        )
    return p


def _basis_of(phi):
    return (phi, phi.orthogonal())


def max_admissible_lambda(A, psi, phi):
    """Largest ``lam`` with ``lam * |Re a_w| <= 1`` over ``{phi, phi_perp}``."""
    worst = 0.0
    for f in _basis_of(phi):
        if abs(inner(f, psi)) > ORTHOGONAL_TOL:
            worst = max(worst, abs(weak_value(A, psi, f).real))
    return np.inf if worst == 0.0 else 1.0 / worst


def validate_admissible(setup, psi, phi):
    """True when every first-order joint probability in the basis containing
    ``phi`` is nonnegative."""
    return all(
        _joint_unchecked(setup, psi, f, s) >= -1e-15 for f in _basis_of(phi) for s in SIGNS
    )


def require_admissible(setup, psi, phi):
    """Raise :class:`InadmissibleStrength` unless ``validate_admissible`` holds."""
    if not validate_admissible(setup, psi, phi):
        lam_max = max_admissible_lambda(setup.A, psi, phi)
        raise InadmissibleStrength(
            f"λ={setup.lam} violates λ|a_w|≤1; largest admissible λ is {lam_max:.6g}",
            max_lambda=lam_max,
        )
    return setup


def postselection_prob(setup, psi, phi):
    """``Pr(phi | psi) = sum_s Pr(s, phi | psi)``."""
    return sum(joint_prob(setup, psi, phi, s) for s in SIGNS)


def conditional_expectation_s(setup, psi, phi):
    """``E[s | phi, psi]`` from the joint table; equals ``lam * Re(a_w)``."""
    overlap = inner(phi, psi)
    if abs(overlap) <= ORTHOGONAL_TOL:
        raise OrthogonalSelection(f"|<phi|psi>| = {abs(overlap):.3g} is below {ORTHOGONAL_TOL}")
    require_admissible(setup, psi, phi)
    joints = {s: joint_prob(setup, psi, phi, s) for s in SIGNS}
    total = joints[+1] + joints[-1]
    return (joints[+1] - joints[-1]) / total


def weak_value_via_conditioning(setup, psi, phi):
    """``E[s/lam | phi, psi]``."""
    return conditional_expectation_s(setup, psi, phi) / setup.lam


def total_expectation_identity(setup, psi, phi_basis):
    """Both sides of ``<psi|A|psi> = sum_k Pr(phi_k|psi) Re a_w(phi_k)``.

    Returns ``(lhs, rhs)``.
    """
    if len(phi_basis) != 2:
        raise DomainError("phi_basis must contain exactly two states")
    gram = np.array([[inner(a, b) for b in phi_basis] for a in phi_basis])
    if np.max(np.abs(gram - np.eye(2))) > 1e-12:
        raise DomainError("phi_basis is not orthonormal")
    lhs = expectation(setup.A, psi)
    rhs = 0.0
    for phi in phi_basis:
        aw = weak_value(setup.A, psi, phi)
        rhs += postselection_prob(setup, psi, phi) * aw.real
    return lhs, rhs


# -- disturbance channel, written in qubit notation -------------------------


@dataclass(frozen=True)
class DisturbanceChannel:
    """Sign-dependent bit flip ``p(s) = (1 + s*lam - delta) / (1 + s*lam)``.

    Requires ``0 < delta < 1 - lam`` so that ``0 < p < 1``.
    """

    delta: float
    lam: float

    def __post_init__(self):
        if not (0.0 < self.lam < 1.0):
            raise DomainError(f"violates 0<λ<1: λ={self.lam!r}")
        if not (0.0 < self.delta < 1.0 - self.lam):
            raise DomainError(
                f"violates 0<δ<1−λ: δ={self.delta!r}, 1−λ={1.0 - self.lam!r}"
            )

    def flip_prob(self, s):
        s = _check_sign(s)
        return ((1.0 - self.delta) + s * self.lam) / (1.0 + s * self.lam)


@dataclass(frozen=True)
class DisturbanceTables:
    """Probabilities of the disturbed protocol pre-selected on ``|+1>``.

    All tables are keyed by the Z eigenvalue label of the post-selection.
    """

    conditional: dict  # (phi, s) -> Pr(phi | s, psi=+1)
    joint: dict  # (phi, s) -> Pr(phi, s | psi=+1)
    marginal: dict  # phi -> Pr(phi | psi=+1)
    weak_value: float  # E[s/lam | phi=-1, psi=+1]


def quantum_disturbance_tables(channel, psi=+1):
    """Propagate ``|+1><+1|`` through the Z weak reading and the flip channel.

    Each branch is carried as a density matrix: ``E_s`` from
    :func:`apply_weak_operation`, then ``rho -> (1-p) rho + p X rho X``,
    then a projective Z post-selection.
    """
    if psi != +1:
        raise DomainError("the disturbance channel is defined only for pre-selection psi=+1")
    setup = WeakSetup(Z, channel.lam)
    rho = KET_PLUS.projector()
    kets = {+1: KET_PLUS, -1: KET_MINUS}
    joint, conditional = {}, {}
    for s in SIGNS:
        branch = apply_weak_operation(setup, rho, s).entries
        p = channel.flip_prob(s)
        out = (1.0 - p) * branch + p * (X.entries @ branch @ X.entries)
        weight = float(np.trace(out).real)
        for phi, ket in kets.items():
            j = float(np.vdot(ket.amplitudes, out @ ket.amplitudes).real)
            joint[(phi, s)] = j
            conditional[(phi, s)] = j / weight
    marginal = {phi: joint[(phi, +1)] + joint[(phi, -1)] for phi in kets}
    aw = sum(s / channel.lam * joint[(-1, s)] for s in SIGNS) / marginal[-1]
    return DisturbanceTables(conditional, joint, marginal, aw)


def quantum_disturbance_weak_value(channel, psi=+1):
    """Weak value of Z pre-selected on ``|+1>`` and post-selected on ``|-1>``.

    Closed form ``1 / (1 - delta)``.
    """
    return quantum_disturbance_tables(channel, psi).weak_value
