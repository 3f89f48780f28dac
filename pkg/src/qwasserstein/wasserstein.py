"""Closed-form quantum Wasserstein-2 distance between one-mode Gaussian states.

The transport plan between two states is a coupling (a two-mode Gaussian
state with covariance ``[[A, X], [X^T, B]]``) or, equivalently, a Gaussian
channel ``(U, V)`` applied to the canonical purification of the second state.
The cost of a coupling is ``Tr[A + B - 2X] / 2`` plus half the squared
distance between the displacement vectors.
"""
import enum
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateChannel, NotSymplectic, UnphysicalState
from .gaussian import (
    OMEGA,
    GaussianState,
    coupling_hermitian,
    purification_f,
    require_physical,
    rotation,
    symplectic_value,
)
from .linalg import det2, min_eig_herm4, sqrt_spd2, symmetrize

# |nu - hbar/2| below this (times hbar) counts as a pure state
PURE_TOL = 1e-9


class Branch(str, enum.Enum):
    NU_A_GE_NU_B = "nuA_ge_nuB"
    NU_A_LE_NU_B = "nuA_le_nuB"
    PURE_SHORTCUT = "pure_shortcut"
    UNITARY = "unitary"


@dataclass(frozen=True)
class CouplingCovariance:
    A: np.ndarray
    B: np.ndarray
    X: np.ndarray

    @property
    def matrix(self):
        return np.block([[self.A, self.X], [self.X.T, self.B]])

    def cost(self):
        return 0.5 * float(np.trace(self.A + self.B - 2 * self.X))

    def margin(self, hbar=1.0):
        """Smallest eigenvalue over both signs of the coupling uncertainty relation."""
        g = self.matrix
        stack = np.stack([coupling_hermitian(g, +1, hbar), coupling_hermitian(g, -1, hbar)])
        return float(np.min(min_eig_herm4(stack)))


@dataclass(frozen=True)
class ChannelPair:
    """Gaussian channel acting as ``gamma -> U gamma U^T + V``."""

    U: np.ndarray
    V: np.ndarray
    degenerate: bool = False

    def apply(self, gamma):
        return self.U @ gamma @ self.U.T + self.V

    def constraint_margin(self, hbar=1.0):
        """Smallest eigenvalue of ``V +- i hbar/2 (Omega - U Omega U^T)``."""
        k = 0.5 * hbar * (OMEGA - self.U @ OMEGA @ self.U.T)
        stack = np.stack([self.V + 1j * k, self.V - 1j * k])
        return float(np.min(min_eig_herm4(stack)))


@dataclass(frozen=True)
class WassersteinResult:
    d_squared: float
    branch: Branch
    coupling: CouplingCovariance
    channel: Optional[ChannelPair]


def _nu(gamma, hbar):
    # clamp rounding just below the pure-state bound
    return max(symplectic_value(gamma), hbar / 2)


def _is_pure(nu, hbar):
    return nu - hbar / 2 <= PURE_TOL * hbar


def _prepare(a, b, hbar):
    a = symmetrize(a)
    b = symmetrize(b)
    require_physical(a, hbar)
    require_physical(b, hbar)
    return a, b, _nu(a, hbar), _nu(b, hbar)


def _n_matrix(a, b):
    """``sqrt(sqrt(B) A sqrt(B))`` together with ``sqrt(B)``."""
    sb = sqrt_spd2(b)
    return sqrt_spd2(symmetrize(sb @ a @ sb)), sb


def _prefactor_sq(nu_a, nu_b, hbar):
    if nu_a >= nu_b:
        f = (2 * nu_b - hbar) * (2 * nu_a + hbar)
    else:
        f = (2 * nu_b + hbar) * (2 * nu_a - hbar)
    return max(f, 0.0) / (nu_a * nu_b)


def optimal_W(nu_a, nu_b, hbar=1.0):
    """Contraction W* that maximizes ``Tr[W N]`` in the channel parametrization."""
    if min(nu_a, nu_b) < hbar / 2 - PURE_TOL * hbar:
        raise UnphysicalState(f"symplectic values must be >= {hbar / 2}")
    nu_a, nu_b = max(nu_a, hbar / 2), max(nu_b, hbar / 2)
    if nu_a >= nu_b:
        w = np.sqrt((2 + hbar / nu_a) / (2 + hbar / nu_b))
    else:
        w = np.sqrt((2 - hbar / nu_a) / (2 - hbar / nu_b))
    return w * np.eye(2)


def optimal_X(a, b, hbar=1.0):
    """Off-diagonal block X* of the optimal coupling covariance.

    ``X* = c sqrt(B)^{-1} sqrt(sqrt(B) A sqrt(B)) sqrt(B)`` with
    ``c = sqrt((2 nu_B -+ hbar)(2 nu_A +- hbar)) / (2 sqrt(nu_A nu_B))``,
    upper signs when ``nu_A >= nu_B``. A pure B admits only the product
    coupling, so zero is returned directly.
    """
    a, b, nu_a, nu_b = _prepare(a, b, hbar)
    if _is_pure(nu_b, hbar):
        return np.zeros((2, 2))
    n, sb = _n_matrix(a, b)
    c = 0.5 * np.sqrt(_prefactor_sq(nu_a, nu_b, hbar))
    return c * np.linalg.inv(sb) @ n @ sb


def optimal_channel(a, b, hbar=1.0):
    """Gaussian channel (U, V) that maps B to A and realizes the coupling X*.

    ``U^T = sqrt(B)^{-1} W* N sqrt(B)^{-1}`` and ``V = A - U B U^T``. When
    A and B are related by a symplectic map, V vanishes (unitary channel).

    For a pure B the purification carries no correlations and any channel
    reproduces the product coupling; the replacement channel ``U = 0,
    V = A`` is returned, flagged ``degenerate`` and a
    :class:`DegenerateChannel` warning is emitted.
    """
    a, b, nu_a, nu_b = _prepare(a, b, hbar)
    if _is_pure(nu_b, hbar):
        warnings.warn("target state is pure; returning the replacement channel", DegenerateChannel)
        return ChannelPair(np.zeros((2, 2)), a.copy(), degenerate=True)
    w = optimal_W(nu_a, nu_b, hbar)
    n, sb = _n_matrix(a, b)
    sb_inv = np.linalg.inv(sb)
    u = (sb_inv @ w @ n @ sb_inv).T
    v = symmetrize(a - u @ b @ u.T)
    if np.max(np.abs(v)) <= 1e-12 * max(1.0, float(np.max(np.abs(a)))):
        v = np.zeros((2, 2))
    return ChannelPair(u, v)


def wasserstein2(a: GaussianState, b: GaussianState, hbar=1.0) -> WassersteinResult:
    """Squared quantum Wasserstein-2 distance between two one-mode Gaussian states.

    Parameters
    ----------
    a, b : GaussianState
        Source and target states; both must be physical at ``hbar``.
    hbar : float, optional
        Value of Planck's constant in the chosen units (default 1). Small
        values approach the classical Gaussian Wasserstein distance.

    Returns
    -------
    WassersteinResult
        ``d_squared`` together with the optimal coupling, the reconstructed
        channel and the formula branch that was used.

    Notes
    -----
    With ``N = sqrt(sqrt(B) A sqrt(B))`` the centered part is

        D^2 = Tr[A + B]/2 - sqrt((2 nu_B -+ hbar)(2 nu_A +- hbar) / (nu_A nu_B)) Tr[N] / 2

    (upper signs for ``nu_A >= nu_B``) and the displacement contributes
    ``|d_A - d_B|^2 / 2``. If either state is pure the coupling is a
    product state and ``D^2 = Tr[A + B]/2``.
    """
    A, B, nu_a, nu_b = _prepare(a.cov, b.cov, hbar)
    shift = 0.5 * float(np.sum((a.displacement - b.displacement) ** 2))
    half_trace = 0.5 * float(np.trace(A + B))

    if _is_pure(nu_a, hbar) or _is_pure(nu_b, hbar):
        coupling = CouplingCovariance(A, B, np.zeros((2, 2)))
        return WassersteinResult(half_trace + shift, Branch.PURE_SHORTCUT, coupling, None)

    n, _ = _n_matrix(A, B)
    d2 = half_trace - 0.5 * np.sqrt(_prefactor_sq(nu_a, nu_b, hbar)) * float(np.trace(n))
    coupling = CouplingCovariance(A, B, optimal_X(A, B, hbar))
    channel = optimal_channel(A, B, hbar)
    if not np.any(channel.V):
        branch = Branch.UNITARY
    elif nu_a >= nu_b:
        branch = Branch.NU_A_GE_NU_B
    else:
        branch = Branch.NU_A_LE_NU_B
    return WassersteinResult(d2 + shift, branch, coupling, channel)


def thermal_wasserstein2(nu_a, nu_b, hbar=1.0):
    """``(sqrt(nu_max + hbar/2) - sqrt(nu_min - hbar/2))^2`` for two thermal states."""
    if min(nu_a, nu_b) < hbar / 2 - PURE_TOL * hbar:
        raise UnphysicalState(f"thermal states need nu >= {hbar / 2}")
    hi, lo = max(nu_a, nu_b), max(min(nu_a, nu_b), hbar / 2)
    return (np.sqrt(hi + hbar / 2) - np.sqrt(lo - hbar / 2)) ** 2


def unitary_related_distance(b, u, hbar=1.0):
    """``D^2(U B U^T, B) = Tr[U B U^T + B - 2 U F] / 2`` for a symplectic U."""
    u = np.asarray(u, dtype=float)
    if abs(det2(u) - 1.0) > 1e-10:
        raise NotSymplectic(f"det U = {det2(u)} != 1")
    b = symmetrize(b)
    f = purification_f(b, hbar)
    return 0.5 * float(np.trace(u @ b @ u.T + b - 2 * u @ f))


def self_distance(s: GaussianState, hbar=1.0):
    """``D^2(rho, rho)``; equals twice the Wigner-Yanase nonclassicality quantifier."""
    return wasserstein2(s, s, hbar).d_squared


def is_nonclassical(s: GaussianState):
    """Sufficient test: a self-distance above 1 certifies nonclassicality."""
    return self_distance(s) > 1.0


def classical_wasserstein2(sigma1, sigma2):
    """Gaussian (Givens-Shortt) distance with the 1/2 prefactor used here.

    ``Tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}) / 2``
    """
    s1 = sqrt_spd2(sigma1)
    sigma2 = symmetrize(sigma2)
    sqrt_spd2(sigma2)  # validates positivity
    cross = sqrt_spd2(symmetrize(s1 @ sigma2 @ s1))
    return 0.5 * float(np.trace(symmetrize(sigma1) + sigma2 - 2 * cross))


def shifted_distance(a: GaussianState, b: GaussianState, hbar=1.0):
    """``D^2(a, b) - D^2(a, a)/2 - D^2(b, b)/2``; vanishes for identical states."""
    if a.cov.tobytes() == b.cov.tobytes() and a.displacement.tobytes() == b.displacement.tobytes():
        return 0.0
    return (
        wasserstein2(a, b, hbar).d_squared
        - 0.5 * self_distance(a, hbar)
        - 0.5 * self_distance(b, hbar)
    )


def rotate_state(s: GaussianState, theta):
    r = rotation(theta)
    return GaussianState(r @ s.cov @ r.T, r @ s.displacement)
