"""Small dense kernels: 2x2 SPD square roots and Hermitian minimum eigenvalues.

Every matrix in the package is either a one-mode 2x2 block or a two-mode 4x4
block, so nothing here tries to be general-purpose.
"""
import numpy as np

from .errors import NonPositiveDefinite, NotHermitian

SYMMETRY_TOL = 1e-12


def det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def symmetrize(m):
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def is_symmetric(m, tol=SYMMETRY_TOL):
    m = np.asarray(m, dtype=float)
    scale = max(1.0, float(np.max(np.abs(m))))
    return bool(np.max(np.abs(m - m.T)) <= tol * scale)


def sqrt_spd2(m):
    """Principal square root of a symmetric positive-definite 2x2 matrix.

    Uses the Cayley-Hamilton closed form

        sqrt(M) = (M + sqrt(det M) I) / sqrt(Tr M + 2 sqrt(det M))

    which is exact up to rounding and needs no eigendecomposition.

    Raises
    ------
    NonPositiveDefinite
        If ``det M <= 0`` or ``Tr M <= 0`` (or M is not symmetric).
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise NonPositiveDefinite(f"expected a finite 2x2 matrix, got {m!r}")
    if not is_symmetric(m):
        raise NonPositiveDefinite("matrix is not symmetric")
    m = symmetrize(m)
    d = det2(m)
    t = m[0, 0] + m[1, 1]
    if d <= 0.0 or t <= 0.0:
        raise NonPositiveDefinite(f"matrix is not positive definite (det={d}, tr={t})")
    s = np.sqrt(d)
    return (m + s * np.eye(2)) / np.sqrt(t + 2.0 * s)


def real_embedding(h):
    """Map complex Hermitian ``H = S + iK`` to the real symmetric ``[[S, -K], [K, S]]``.

    The embedding has the spectrum of H with every eigenvalue doubled.
    Works on stacks of matrices (leading batch dimensions).
    """
    h = np.asarray(h, dtype=complex)
    s, k = h.real, h.imag
    top = np.concatenate([s, -k], axis=-1)
    bottom = np.concatenate([k, s], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def _check_hermitian(h):
    h = np.asarray(h, dtype=complex)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise NotHermitian(f"expected square matrices, got shape {h.shape}")
    dev = np.max(np.abs(h - np.conj(np.swapaxes(h, -1, -2))))
    if not dev <= SYMMETRY_TOL:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    return h


def min_eig_herm4(h, check=True):
    """Smallest eigenvalue of a complex Hermitian matrix (typically 4x4).

    The eigenvalues are taken from the real symmetric embedding, so only a
    real symmetric eigensolver is involved. A stack of matrices returns an
    array of minima, one per matrix.
    """
    if check:
        h = _check_hermitian(h)
    return np.linalg.eigvalsh(real_embedding(h))[..., 0]


def is_psd(h, tol=0.0):
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(np.all(min_eig_herm4(h) >= -tol))
