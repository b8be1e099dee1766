"""Von Neumann system-meter model with a Gaussian pointer.

The interaction ``U = exp(-i x A (x) P)`` (hbar = 1, ``P = -i d/dq``)
translates the pointer by ``x*a`` for the eigenvalue ``a`` of ``A``, so the
exact Kraus operator at pointer reading ``q`` is
``M_q = sum_a |a><a| Phi(q - x a)``. Its first-order expansion is
``[I + q x / (2 sigma^2) A] Phi(q)``.

The sign reading follows that translation: a positive pointer position is
reported as ``s = +1`` ("+1" for ``q > 0``, "-1" for ``q <= 0``). With this
assignment, coarse graining the first-order Kraus operators over each
half-line reproduces ``E_s rho = (rho + s*lam/2 {A, rho}) / 2``
with ``lam = 2x / sqrt(2 pi sigma^2)``.

Only observables diagonal in Z with eigenvalues +-1 are supported.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .analytic import _check_sign
from .errors import DomainError, QuadratureError, UnsupportedObservable, VanishingPostselection
from .qubit import HermitianOperator

QUAD_EPSABS = 1e-13
TAIL_SIGMAS = 8.0


@dataclass(frozen=True)
class GaussianMeter:
    sigma: float
    x: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma!r}")
        if not self.x > 0:
            raise DomainError(f"x must be > 0, got {self.x!r}")
        lam = lambda_of(self)
        if not lam < 1.0:
            raise DomainError(f"meter gives λ={lam:.6g}; requires 0<λ<1")

    @property
    def lam(self):
        return lambda_of(self)

    @property
    def window(self):
        """Integration interval outside which the pointer density is negligible."""
        half = TAIL_SIGMAS * self.sigma + self.x
        return -half, half


def lambda_of(meter):
    """Measurement strength ``2x / sqrt(2 pi sigma^2)``."""
    return 2.0 * meter.x / np.sqrt(2.0 * np.pi * meter.sigma**2)


def meter_wavefunction(meter, q):
    """``Phi(q) = (2 pi sigma^2)^(-1/4) exp(-q^2 / 4 sigma^2)``; vectorized in ``q``."""
    s2 = meter.sigma**2
    return (2.0 * np.pi * s2) ** -0.25 * np.exp(-np.square(q) / (4.0 * s2))


def _pm_eigenvalues(A):
    a = A.entries
    if abs(a[0, 1]) > 1e-12 or abs(a[1, 0]) > 1e-12:
        raise UnsupportedObservable("observable must be diagonal in the Z basis")
    eig = a.diagonal().real
    if not np.all(np.isclose(np.abs(eig), 1.0, rtol=0, atol=1e-12)):
        raise UnsupportedObservable(f"observable eigenvalues must be +-1, got {eig}")
    return np.round(eig)


def exact_kraus(meter, A, q):
    a = _pm_eigenvalues(A)
    return np.diag(meter_wavefunction(meter, q - meter.x * a)).astype(np.complex128)


def first_order_kraus(meter, A, q):
    k = meter.x / (2.0 * meter.sigma**2)
    return (np.eye(2) + q * k * A.entries) * meter_wavefunction(meter, q)


@dataclass(frozen=True)
class PositionDensity:
    """Unnormalized density of pointer position jointly with a post-selection."""

    evaluator: Callable
    normalization: float

    def __call__(self, q):
        return self.evaluator(q)


def _branch_weights(psi, phi):
    # amplitude of the |+1> and |-1> paths from psi to phi
    return np.conj(phi.amplitudes) * psi.amplitudes


def joint_density(meter, psi, phi):
    """Density of ``(q, phi)`` given ``psi``; integrates to ``Pr(phi | psi)``.

    The normalization uses the Gaussian overlap
    ``int Phi(q-x) Phi(q+x) dq = exp(-x^2 / 2 sigma^2)``.
    """
    a, b = _branch_weights(psi, phi)
    x = meter.x

    def density(q):
        amp = a * meter_wavefunction(meter, q - x) + b * meter_wavefunction(meter, q + x)
        return np.abs(amp) ** 2

    overlap = np.exp(-(x**2) / (2.0 * meter.sigma**2))
    norm = abs(a) ** 2 + abs(b) ** 2 + 2.0 * (a * np.conj(b)).real * overlap
    return PositionDensity(density, float(norm))


def _quad(f, lo, hi, points=None):
    val, err, info = integrate.quad(
        f, lo, hi, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=400, points=points, full_output=1
    )[:3]
    if err > 1e-10:
        raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge", err)
    return val


def postselected_mean_shift(meter, psi, phi):
    """Closed-form ``E[q | phi, psi]``.

    ``int q density dq = x (|a|^2 - |b|^2)``: the cross term is odd in ``q``.
    """
    dens = joint_density(meter, psi, phi)
    if dens.normalization <= 1e-14:
        raise VanishingPostselection(f"Pr(phi|psi) = {dens.normalization:.3g}")
    a, b = _branch_weights(psi, phi)
    return meter.x * (abs(a) ** 2 - abs(b) ** 2) / dens.normalization


def postselected_mean_shift_quadrature(meter, psi, phi):
    """``E[q | phi, psi]`` by adaptive quadrature of the joint density."""
    dens = joint_density(meter, psi, phi)
    lo, hi = meter.window
    pts = [-meter.x, 0.0, meter.x]
    norm = _quad(dens, lo, hi, pts)
    if norm <= 1e-14:
        raise VanishingPostselection(f"Pr(phi|psi) = {norm:.3g}")
    first = _quad(lambda q: q * dens(q), lo, hi, pts)
    return first / norm


def normalization_quadrature(meter, psi, phi):
    dens = joint_density(meter, psi, phi)
    lo, hi = meter.window
    return _quad(dens, lo, hi, [-meter.x, 0.0, meter.x])


def coarse_grained_operation(meter, A, rho, s):
    """``int_{half-line(s)} M_q rho M_q^dagger dq`` with first-order ``M_q``.

    ``s = +1`` integrates ``q > 0`` and ``s = -1`` integrates ``q <= 0``.
    Returns a 2x2 complex array.
    """
    s = _check_sign(s)
    r = rho.entries if isinstance(rho, HermitianOperator) else np.asarray(rho)
    lo, hi = meter.window
    bounds = (0.0, hi) if s == +1 else (lo, 0.0)

    def integrand(q):
        M = first_order_kraus(meter, A, q)
        out = M @ r @ M.conj().T
        return np.concatenate([out.real.ravel(), out.imag.ravel()])

    res, err = integrate.quad_vec(integrand, *bounds, epsabs=QUAD_EPSABS, epsrel=1e-12, norm="max")
    if err > 1e-10:
        raise QuadratureError(f"coarse-graining quadrature error {err:.3g} exceeds 1e-10", err)
    return (res[:4] + 1j * res[4:]).reshape(2, 2)
