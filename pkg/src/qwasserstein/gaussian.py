"""One-mode Gaussian states, physicality checks and symplectic helpers.

Conventions: quadratures (x, p) with vacuum covariance ``hbar/2 * I``; the
default ``hbar = 1``. Covariance matrices are 2x2 numpy arrays.
"""
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import SingularInput, UnphysicalState
from .linalg import det2, is_symmetric, min_eig_herm4, sqrt_spd2, symmetrize

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
PHYS_TOL = 1e-9


def rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def symplectic_value(gamma):
    """``sqrt(det gamma)``, the single symplectic eigenvalue of one mode."""
    return float(np.sqrt(max(det2(np.asarray(gamma, dtype=float)), 0.0)))


def _phys_tol(gamma, tol):
    # det is computed from products of entries; allow for its rounding so that
    # strongly squeezed pure states are not rejected.
    return tol + 8 * np.finfo(float).eps * float(np.sum(np.asarray(gamma) ** 2))


def check_physical(gamma, hbar=1.0, tol=PHYS_TOL):
    """Uncertainty principle ``gamma + i hbar/2 Omega >= 0`` up to ``tol``.

    Evaluated twice: spectrally (smallest eigenvalue of the 2x2 Hermitian
    matrix) and through the scalar one-mode criterion
    ``det gamma >= hbar^2/4`` with ``Tr gamma > 0``. Both must pass.
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (2, 2) or not np.all(np.isfinite(gamma)) or not is_symmetric(gamma):
        return False
    gamma = symmetrize(gamma)
    tol_eff = _phys_tol(gamma, tol)
    spectral = float(min_eig_herm4(gamma + 0.5j * hbar * OMEGA)) >= -tol_eff
    scalar = det2(gamma) >= hbar**2 / 4 - tol_eff and np.trace(gamma) > 0
    return bool(spectral and scalar)


def require_physical(gamma, hbar=1.0, tol=PHYS_TOL):
    if not check_physical(gamma, hbar, tol):
        raise UnphysicalState(f"unphysical covariance {np.asarray(gamma).tolist()} at hbar={hbar}")


@dataclass(frozen=True)
class GaussianState:
    """Displacement vector plus symmetric positive-definite covariance matrix.

    Physicality depends on hbar, so it is checked by the functions that
    consume states rather than here.
    """

    cov: np.ndarray
    displacement: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        disp = np.asarray(self.displacement, dtype=float).reshape(-1)
        if cov.shape != (2, 2) or not np.all(np.isfinite(cov)):
            raise UnphysicalState(f"covariance must be a finite 2x2 matrix, got {cov!r}")
        if disp.shape != (2,) or not np.all(np.isfinite(disp)):
            raise UnphysicalState(f"displacement must be a finite 2-vector, got {disp!r}")
        if not is_symmetric(cov):
            raise UnphysicalState("covariance matrix is not symmetric")
        cov = symmetrize(cov)
        if det2(cov) <= 0 or np.trace(cov) <= 0:
            raise UnphysicalState("covariance matrix is not positive definite")
        cov.setflags(write=False)
        disp.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "displacement", disp)

    @property
    def nu(self):
        return symplectic_value(self.cov)

    @property
    def mean_photon_number(self):
        return self.nu - 0.5

    @property
    def is_centered(self):
        return not np.any(self.displacement)

    @classmethod
    def vacuum(cls):
        return cls(0.5 * np.eye(2))

    @classmethod
    def thermal(cls, nu):
        return build_state(Thermal(nu))

    @classmethod
    def squeezed_thermal(cls, nu, r, phi=0.0):
        return build_state(SqueezedThermal(nu, r, phi))

    def displaced(self, d):
        return GaussianState(self.cov, np.asarray(d, dtype=float))


@dataclass(frozen=True)
class Thermal:
    nu: float


@dataclass(frozen=True)
class SqueezedThermal:
    nu: float
    r: float
    phi: float = 0.0


@dataclass(frozen=True)
class Explicit:
    cov: tuple
    displacement: tuple = (0.0, 0.0)


StateSpec = Union[Thermal, SqueezedThermal, Explicit]


def thermal_nu_from_q(q):
    """Symplectic value of the thermal state with Boltzmann ratio ``q``."""
    return 0.5 * (1 + q) / (1 - q)


def build_state(spec, hbar=1.0):
    """Construct and validate a :class:`GaussianState` from a state spec.

    Thermal states get ``nu * I``; squeezed thermal states get
    ``nu R(phi) diag(e^{-2r}, e^{2r}) R(phi)^T``.

    Raises
    ------
    UnphysicalState
        When the resulting covariance violates the uncertainty principle.
    """
    if isinstance(spec, Thermal):
        if not np.isfinite(spec.nu) or spec.nu < hbar / 2 - PHYS_TOL:
            raise UnphysicalState(f"thermal state needs nu >= {hbar / 2}, got {spec.nu}")
        cov = spec.nu * np.eye(2)
        disp = np.zeros(2)
    elif isinstance(spec, SqueezedThermal):
        if not np.isfinite(spec.nu) or spec.nu < hbar / 2 - PHYS_TOL:
            raise UnphysicalState(f"squeezed thermal state needs nu >= {hbar / 2}, got {spec.nu}")
        if not (np.isfinite(spec.r) and np.isfinite(spec.phi)):
            raise UnphysicalState("squeezing parameters must be finite")
        rot = rotation(spec.phi)
        cov = spec.nu * rot @ np.diag([np.exp(-2 * spec.r), np.exp(2 * spec.r)]) @ rot.T
        disp = np.zeros(2)
    elif isinstance(spec, Explicit):
        cov = np.asarray(spec.cov, dtype=float)
        disp = np.asarray(spec.displacement, dtype=float)
    else:
        raise TypeError(f"unknown state spec {spec!r}")
    require_physical(cov, hbar)
    return GaussianState(cov, disp)


def parse_state_spec(obj):
    """Turn the JSON form of a state spec into a spec dataclass.

    Accepted shapes::

        {"kind": "thermal", "nu": 1.0}
        {"kind": "squeezed_thermal", "nu": 1.0, "r": 0.5, "phi": 0.0}
        {"kind": "explicit", "displacement": [0.0, 0.0], "cov": [[1, 0], [0, 1]]}
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("state spec must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "thermal":
            return Thermal(float(obj["nu"]))
        if kind == "squeezed_thermal":
            return SqueezedThermal(float(obj["nu"]), float(obj["r"]), float(obj.get("phi", 0.0)))
        if kind == "explicit":
            cov = np.asarray(obj["cov"], dtype=float)
            disp = np.asarray(obj.get("displacement", [0.0, 0.0]), dtype=float)
            if cov.shape != (2, 2) or disp.shape != (2,):
                raise ValueError("explicit state needs a 2x2 'cov' and a length-2 'displacement'")
            return Explicit(tuple(map(tuple, cov.tolist())), tuple(disp.tolist()))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {kind!r} state spec: {exc}") from exc
    raise ValueError(f"unknown state kind {kind!r}")


def lemma_positive_definite(s, k):
    """Positivity of the Hermitian matrix ``S + iK`` via its real and imaginary parts.

    ``S + iK > 0`` iff ``S > 0`` and ``S + K S^{-1} K > 0``, for symmetric,
    invertible S and skew-symmetric, invertible K.
    """
    s = np.asarray(s, dtype=float)
    k = np.asarray(k, dtype=float)
    if det2(s) == 0.0 or det2(k) == 0.0:
        raise SingularInput("S and K must both be invertible")

    def pos_def(m):
        m = symmetrize(m)
        return det2(m) > 0 and np.trace(m) > 0

    return bool(pos_def(s) and pos_def(s + k @ np.linalg.inv(s) @ k))


@dataclass(frozen=True)
class Williamson1:
    nu: float
    S: np.ndarray


def williamson1(gamma, hbar=1.0):
    """One-mode Williamson form ``gamma = nu S S^T`` with ``det S = 1``.

    S is fixed to the symmetric positive-definite representative
    ``sqrt(gamma)/sqrt(nu)``; any ``S O`` with O a rotation would also do.
    Note that ``S^{-1} gamma S^{-T} = nu I`` is the diagonalizing congruence.
    """
    require_physical(gamma, hbar)
    gamma = symmetrize(gamma)
    nu = symplectic_value(gamma)
    return Williamson1(nu, sqrt_spd2(gamma) / np.sqrt(nu))


def purification_f(b, hbar=1.0):
    """Correlation block F of the canonical purification of ``b``."""
    require_physical(b, hbar)
    b = symmetrize(b)
    nu = max(symplectic_value(b), hbar / 2)
    return np.sqrt(max(nu**2 - hbar**2 / 4, 0.0)) / nu * b


def purification_cov(b, hbar=1.0):
    """4x4 covariance ``[[B, F], [F^T, B]]`` of the canonical purification of B.

    ``F = sqrt(nu^2 - hbar^2/4) S S^T``; the two-mode state is pure.
    """
    b = symmetrize(b)
    f = purification_f(b, hbar)
    return np.block([[b, f], [f.T, b]])


def coupling_hermitian(gamma_pi, sign, hbar=1.0):
    """``gamma_pi + sign * i hbar/2 diag(Omega, -Omega)`` for a 4x4 coupling covariance."""
    z = np.zeros((2, 2))
    j = np.block([[OMEGA, z], [z, -OMEGA]])
    return np.asarray(gamma_pi, dtype=float) + sign * 0.5j * hbar * j

