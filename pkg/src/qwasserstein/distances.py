"""Closed-form comparison distances between centered one-mode Gaussian states.

All formulas below are written for hbar = 1 (vacuum covariance I/2). For
another hbar the covariances are rescaled by 1/hbar first: a state with
covariance gamma at hbar is the same density operator as gamma/hbar at 1.
"""
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DisplacedStateUnsupported, DivergentEntropy
from .gaussian import GaussianState, require_physical, symplectic_value
from .linalg import det2, sqrt_spd2, symmetrize
from .wasserstein import shifted_distance, wasserstein2

_PURE_TOL = 1e-9


def _prep(a, b, hbar):
    a = symmetrize(a) / hbar
    b = symmetrize(b) / hbar
    require_physical(a)
    require_physical(b)
    return a, b


def _nu(gamma):
    return max(symplectic_value(gamma), 0.5)


def fidelity(a, b, hbar=1.0):
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho_A) rho_B sqrt(rho_A)))^2``.

    ``1 / (sqrt(det(A+B) + L) - sqrt(L))`` with
    ``L = 4 (det A - 1/4)(det B - 1/4)``.
    """
    a, b = _prep(a, b, hbar)
    lam = 4 * max(det2(a) - 0.25, 0.0) * max(det2(b) - 0.25, 0.0)
    f = 1.0 / (math.sqrt(det2(a + b) + lam) - math.sqrt(lam))
    return min(f, 1.0)


def bures(a, b, hbar=1.0):
    return math.sqrt(max(2.0 - 2.0 * math.sqrt(fidelity(a, b, hbar)), 0.0))


def overlap(a, b, hbar=1.0):
    """``Tr[rho_A rho_B] = 1/sqrt(det(A+B))``."""
    a, b = _prep(a, b, hbar)
    return 1.0 / math.sqrt(det2(a + b))


def purity(a, hbar=1.0):
    a, _ = _prep(a, a, hbar)
    return 1.0 / (2.0 * math.sqrt(det2(a)))


def hilbert_schmidt(a, b, hbar=1.0):
    """``sqrt(Tr rho_A^2 - 2 Tr rho_A rho_B + Tr rho_B^2)``.

    The purity terms are ``1/(2 sqrt(det))``; this is what makes the distance
    vanish for equal states and reproduces the thermal special case.
    """
    a, b = _prep(a, b, hbar)
    val = 1 / (2 * math.sqrt(det2(a))) - 2 / math.sqrt(det2(a + b)) + 1 / (2 * math.sqrt(det2(b)))
    return math.sqrt(max(val, 0.0))


def _xlogy_ratio(x, num, den):
    # x * log(num/den) with the x -> 0 limit taken as 0
    if x == 0.0:
        return 0.0
    return x * math.log(num / den)


def relative_entropy(a, b, hbar=1.0):
    """Quantum relative entropy ``S(rho_A || rho_B)`` in nats.

    ``Tr Ã`` uses the congruence ``S B S^T = nu_B I``; with the symmetric
    choice of S this equals ``nu_B Tr[A B^{-1}]``.

    Raises
    ------
    DivergentEntropy
        If B is pure and differs from A.
    """
    a, b = _prep(a, b, hbar)
    nu_a, nu_b = _nu(a), _nu(b)
    if nu_b - 0.5 <= _PURE_TOL:
        if np.allclose(a, b, rtol=0, atol=1e-10):
            return 0.0
        raise DivergentEntropy("relative entropy against a different pure state is infinite")
    s_inv = sqrt_spd2(b) / math.sqrt(nu_b)  # B = nu_B s_inv s_inv^T
    s = np.linalg.inv(s_inv)
    tr_a_tilde = float(np.trace(s @ a @ s.T))
    beta = math.log((nu_b + 0.5) / (nu_b - 0.5))
    excess_a = max(nu_a - 0.5, 0.0)
    val = (
        (nu_a + 0.5) * math.log((nu_b + 0.5) / (nu_a + 0.5))
        + _xlogy_ratio(excess_a, excess_a, nu_b - 0.5)
        + 0.5 * (tr_a_tilde - 2 * nu_a) * beta
    )
    return max(val, 0.0)


def trace_distance_bounds(a, b, hbar=1.0):
    """``(1 - F, sqrt(1 - F^2))`` bracketing the trace distance."""
    f = fidelity(a, b, hbar)
    return 1.0 - f, math.sqrt(max(1.0 - f * f, 0.0))


def _centered_states(a, b):
    if not (a.is_centered and b.is_centered):
        raise DisplacedStateUnsupported("closed-form distances need centered states")


def bures_wasserstein_gap(a: GaussianState, b: GaussianState, hbar=1.0):
    """``((nu_A + nu_B)/2 * Bures^2, D^2)``; the first should not exceed the second."""
    _centered_states(a, b)
    lhs = 0.5 * (a.nu + b.nu) * bures(a.cov, b.cov, hbar) ** 2
    return lhs, wasserstein2(a, b, hbar).d_squared


@dataclass(frozen=True)
class DistanceReport:
    wasserstein2: float
    shifted_wasserstein2: float
    fidelity: float
    bures: float
    overlap: float
    hilbert_schmidt: float
    relative_entropy_ab: float
    relative_entropy_ba: float
    trace_lower: float
    trace_upper: float

    def to_dict(self):
        return {k: fmt_float(v) for k, v in asdict(self).items()}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def fmt_float(x):
    """Round to 12 significant digits; infinities become the strings 'inf'/'-inf'."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def _safe_entropy(a, b, hbar):
    try:
        return relative_entropy(a, b, hbar)
    except DivergentEntropy:
        return math.inf


def distance_report(a: GaussianState, b: GaussianState, hbar=1.0) -> DistanceReport:
    """Every closed-form distance for a pair of centered states.

    A divergent relative entropy (pure reference state) is reported as inf.
    """
    _centered_states(a, b)
    lower, upper = trace_distance_bounds(a.cov, b.cov, hbar)
    return DistanceReport(
        wasserstein2=wasserstein2(a, b, hbar).d_squared,
        shifted_wasserstein2=shifted_distance(a, b, hbar),
        fidelity=fidelity(a.cov, b.cov, hbar),
        bures=bures(a.cov, b.cov, hbar),
        overlap=overlap(a.cov, b.cov, hbar),
        hilbert_schmidt=hilbert_schmidt(a.cov, b.cov, hbar),
        relative_entropy_ab=_safe_entropy(a.cov, b.cov, hbar),
        relative_entropy_ba=_safe_entropy(b.cov, a.cov, hbar),
        trace_lower=lower,
        trace_upper=upper,
    )
