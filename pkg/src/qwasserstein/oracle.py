"""Brute-force checks that do not rely on the closed-form solution.

The coupling feasible set ``{X : [[A, X], [X^T, B]] +- i/2 diag(Omega, -Omega) >= 0}``
is convex (a spectrahedron) and the transport cost is linear in X, so any
local optimum is global. :func:`minimize_cost` exploits this with a plain
derivative-free penalty search; it never looks at the analytic optimum
except to seed one of its starting points.

Randomness comes from ``numpy.random.default_rng(seed)``, i.e. the PCG64
generator, so results reproduce across platforms for a fixed seed.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import InfeasibleInput, NoFeasiblePoint, OutOfRange
from .gaussian import OMEGA, require_physical, williamson1
from .linalg import min_eig_herm4, real_embedding, symmetrize

PENALTY_SCHEDULE = (1e2, 1e4, 1e6)

_Z = np.zeros((2, 2))
_J = np.block([[OMEGA, _Z], [_Z, -OMEGA]])


@dataclass(frozen=True)
class OracleOptions:
    starts: int = 4
    max_iters: int = 4000
    feas_tol: float = 1e-9
    conv_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.feas_tol > 0 and self.conv_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class OracleResult:
    x_opt: np.ndarray
    cost: float
    feasibility_margin: float
    iterations: int


class _Margin:
    """Vectorized coupling margin for fixed marginals (hot loop of the search)."""

    def __init__(self, a, b, hbar):
        self.buf = np.zeros((2, 4, 4), dtype=complex)
        for k, sign in enumerate((1, -1)):
            self.buf[k, :2, :2] = a
            self.buf[k, 2:, 2:] = b
            self.buf[k] += sign * 0.5j * hbar * _J
        self.emb = real_embedding(self.buf)
        self.evals = 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float).reshape(2, 2)
        emb = self.emb
        # X sits in the real part of the off-diagonal blocks of each sign
        for off in (0, 4):
            emb[:, off:off + 2, off + 2:off + 4] = x
            emb[:, off + 2:off + 4, off:off + 2] = x.T
        self.evals += 1
        return float(np.min(np.linalg.eigvalsh(emb)[:, 0]))


class _RayStep:
    """Largest ``s`` with ``s * D`` feasible, for a direction D of the off-diagonal block.

    With ``M0`` the block-diagonal part (``X = 0``) and ``M1(D)`` the
    off-diagonal part, ``M0 + s M1 >= 0`` holds up to
    ``s = 1 / lambda_max(-M0^{-1/2} M1 M0^{-1/2})``. Needs ``M0 > 0``, i.e.
    both marginals mixed.
    """

    def __init__(self, margin):
        base = margin.emb.copy()
        for off in (0, 4):
            base[:, off:off + 2, off + 2:off + 4] = 0.0
            base[:, off + 2:off + 4, off:off + 2] = 0.0
        w, v = np.linalg.eigh(base)
        self.ok = bool(np.min(w) > 1e-12 * np.max(w))
        if self.ok:
            self.l = (v / np.sqrt(w)[:, None, :]) @ np.swapaxes(v, -1, -2)
        self.m1 = np.zeros((8, 8))

    def __call__(self, d):
        d = np.asarray(d, dtype=float).reshape(2, 2)
        m1 = self.m1
        for off in (0, 4):
            m1[off:off + 2, off + 2:off + 4] = d
            m1[off + 2:off + 4, off:off + 2] = d.T
        top = -float(np.min(np.linalg.eigvalsh(self.l @ m1 @ self.l)[:, 0]))
        return np.inf if top <= 0 else 1.0 / top


def coupling_margin(a, b, x, hbar=1.0):
    """Minimum eigenvalue over both signs of ``gamma_pi +- i hbar/2 diag(Omega, -Omega)``.

    Non-negative exactly when ``[[A, X], [X^T, B]]`` is a physical coupling.
    """
    a = symmetrize(a)
    b = symmetrize(b)
    x = np.asarray(x, dtype=float)
    g = np.block([[a, x], [x.T, b]])
    stack = np.stack([g + 0.5j * hbar * _J, g - 0.5j * hbar * _J])
    return float(np.min(min_eig_herm4(stack)))


def _project(margin, x, target, iters=60):
    """Largest ``s in [0, 1]`` with ``margin(s x) >= target``; returns ``s x``.

    The margin is concave in X, so the feasible part of the segment [0, x]
    is an interval containing 0.
    """
    if margin(x) >= target:
        return x
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if margin(mid * x) >= target:
            lo = mid
        else:
            hi = mid
    return lo * x


def _nelder_mead(fun, x0, step, opts):
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(4)])
    res = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxiter": opts.max_iters,
            "maxfev": 2 * opts.max_iters,
            "xatol": opts.conv_tol,
            "fatol": opts.conv_tol * 1e-2,
            "adaptive": False,
        },
    )
    return res.x, int(res.nit)


def minimize_cost(a, b, opts=None, hbar=1.0):
    """Numerically minimize the coupling cost ``Tr[A + B - 2X]/2`` over all 2x2 X.

    The search runs in Williamson coordinates: with ``A = nu_A S_A S_A^T``
    and ``B = nu_B S_B S_B^T`` the congruence ``X = S_A Y S_B^T`` maps the
    feasible set onto the one for the marginals ``nu_A I`` and ``nu_B I``
    (symplectic maps preserve the uncertainty relation), which keeps the
    search well conditioned however strongly the states are squeezed.

    Each start runs Nelder-Mead on ``cost + lam * max(0, -margin)^2`` for
    ``lam`` in :data:`PENALTY_SCHEDULE` and is then re-polished on the
    exactly feasible objective ``cost(s(D) D)``, where ``s(D)`` is the
    longest feasible step along direction D. Starts: ``X = 0``, a perturbed
    analytic optimum, and seeded random matrices. The best feasible point
    wins; ties go to the larger margin, then to the lexicographically
    smaller X.

    Parameters
    ----------
    a, b : array_like
        Covariance matrices of the two centered states.
    opts : OracleOptions, optional
    hbar : float, optional

    Returns
    -------
    OracleResult
    """
    from .wasserstein import optimal_X  # seeding only

    opts = opts or OracleOptions()
    a = symmetrize(a)
    b = symmetrize(b)
    require_physical(a, hbar)
    require_physical(b, hbar)
    rng = np.random.default_rng(opts.seed)
    wa, wb = williamson1(a, hbar), williamson1(b, hbar)
    sa, sb = wa.S, wb.S
    sa_inv, sb_inv = np.linalg.inv(sa), np.linalg.inv(sb)
    # Tr X = <C, Y> in Williamson coordinates
    c = (sa.T @ sb).ravel()
    margin = _Margin(wa.nu * np.eye(2), wb.nu * np.eye(2), hbar)
    ray = _RayStep(margin)
    half_trace = 0.5 * float(np.trace(a + b))

    def to_x(y):
        return sa @ y.reshape(2, 2) @ sb.T

    # X = 0 is the product coupling, always physical for physical marginals
    m0 = margin(np.zeros(4))
    if m0 < -opts.feas_tol:
        raise NoFeasiblePoint(f"product coupling infeasible (margin {m0:.3e})")
    target = min(0.0, m0)

    scale = np.sqrt(wa.nu * wb.nu)
    starts = [np.zeros(4)]
    if opts.starts > 1:
        y_star = (sa_inv @ optimal_X(a, b, hbar) @ sb_inv.T).ravel()
        starts.append(y_star + 0.1 * scale * rng.standard_normal(4))
    while len(starts) < opts.starts:
        starts.append(scale * rng.standard_normal(4))

    c_norm = float(np.linalg.norm(c))

    def exact(v):
        # cost at the feasible boundary point along v (or v itself if beyond reach)
        step = ray(v)
        return -c @ v * min(step, 1e6) / c_norm

    best = None
    for y0 in starts:
        y = np.asarray(y0, dtype=float)
        iterations = 0
        step = 0.5 * scale
        for lam in PENALTY_SCHEDULE:

            def penalized(v, lam=lam):
                return -(c @ v) / c_norm + lam * max(0.0, -margin(v)) ** 2

            y, nit = _nelder_mead(penalized, y, step, opts)
            iterations += nit
            step *= 0.1
        if ray.ok and np.any(y):
            d, nit = _nelder_mead(exact, y, 0.1 * float(np.linalg.norm(y)), opts)
            iterations += nit
            s = ray(d)
            if np.isfinite(s) and exact(d) < exact(y):
                y = s * d
        y = _project(margin, y, target)
        x = to_x(y).ravel()
        m = coupling_margin(a, b, x.reshape(2, 2), hbar)
        if m < target - opts.feas_tol:
            # congruence rounding; pull back in original coordinates
            x = _project(_Margin(a, b, hbar), x, target)
            m = coupling_margin(a, b, x.reshape(2, 2), hbar)
        cost = half_trace - (x[0] + x[3])
        key = (cost, -m, tuple(x))
        if best is None or key < best[0]:
            best = (key, x, cost, m, iterations)

    _, x, cost, m, iterations = best
    if m < -opts.feas_tol:
        raise NoFeasiblePoint(f"search ended infeasible (margin {m:.3e})")
    return OracleResult(x.reshape(2, 2).copy(), float(cost), float(m), iterations)


def diagonal_restriction_check(a, b, x, hbar=1.0, tol=1e-9):
    """Whether replacing a feasible X by ``Tr(X)/2 * I`` keeps the coupling physical.

    Guaranteed when A and B are both multiples of the identity. For other
    marginals the answer can be False.
    """
    if coupling_margin(a, b, x, hbar) < -tol:
        raise InfeasibleInput("X does not give a physical coupling")
    x_diag = 0.5 * np.trace(np.asarray(x, dtype=float)) * np.eye(2)
    return coupling_margin(a, b, x_diag, hbar) >= -tol


def random_feasible_x(a, b, rng, hbar=1.0, scale=None):
    """Random X scaled back into the physical coupling set."""
    margin = _Margin(symmetrize(a), symmetrize(b), hbar)
    if scale is None:
        scale = np.sqrt(np.sqrt(np.linalg.det(a) * np.linalg.det(b)))
    x = scale * rng.standard_normal(4)
    target = min(0.0, margin(np.zeros(4)))
    return _project(margin, x, target).reshape(2, 2)


def search_diagonal_counterexample(a, b, trials=2000, seed=0, hbar=1.0):
    """Look for a feasible X whose diagonal replacement is not feasible.

    The numerically optimal coupling is tried first: it maximizes Tr X, so
    if the replacement ``Tr(X)/2 * I`` were always feasible the optimum
    would be a multiple of the identity. Then ``trials`` random feasible
    points are tried. Returns the first counterexample found, or None.
    """
    opt = minimize_cost(a, b, OracleOptions(seed=seed), hbar).x_opt
    if not diagonal_restriction_check(a, b, opt, hbar):
        return opt
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x = random_feasible_x(a, b, rng, hbar, scale=2 * np.sqrt(np.trace(a) * np.trace(b)))
        if not diagonal_restriction_check(a, b, x, hbar):
            return x
    return None


def optimal_K(a0, b0):
    """Closed-form maximizer of ``Tr K`` under ``0 <= K``, ``K(1 - i a0/2 Omega)K <= 1 - i b0/2 Omega``.

    ``sqrt((2 + b0)/(2 + a0)) I`` if ``a0 >= b0``, else ``sqrt((2 - b0)/(2 - a0)) I``.
    """
    if not (abs(a0) <= 2 and abs(b0) <= 2):
        raise OutOfRange(f"need |a0|, |b0| <= 2, got {a0}, {b0}")
    if a0 >= b0:
        if a0 == -2:
            raise OutOfRange("a0 = -2 makes the constraint singular")
        return np.sqrt((2 + b0) / (2 + a0)) * np.eye(2)
    if a0 == 2:
        raise OutOfRange("a0 = 2 makes the constraint singular")
    return np.sqrt((2 - b0) / (2 - a0)) * np.eye(2)


def _k_margins(ks, a0, b0):
    """Constraint margins for a stack of symmetric K matrices."""
    eye = np.eye(2)
    lhs = (eye - 0.5j * b0 * OMEGA) - ks @ (eye - 0.5j * a0 * OMEGA) @ ks
    both = np.stack([lhs, ks.astype(complex)], axis=1)
    return np.min(min_eig_herm4(both, check=False), axis=1)


def _best_margin_at_trace(t, a0, b0, grid=11, zooms=14):
    """Max over (u, b) of the K-constraint margin with ``K = [[t/2+u, b], [b, t/2-u]]``.

    The margin is concave in K, so a shrinking grid converges to the maximum.
    """
    cu, cb, half = 0.0, 0.0, max(t, 1.0)
    offsets = np.linspace(-1.0, 1.0, grid)
    best = -np.inf
    for _ in range(zooms):
        uu, bb = np.meshgrid(cu + half * offsets, cb + half * offsets, indexing="ij")
        uu, bb = uu.ravel(), bb.ravel()
        ks = np.empty((uu.size, 2, 2))
        ks[:, 0, 0] = t / 2 + uu
        ks[:, 1, 1] = t / 2 - uu
        ks[:, 0, 1] = ks[:, 1, 0] = bb
        m = _k_margins(ks, a0, b0)
        i = int(np.argmax(m))
        best, cu, cb = max(best, float(m[i])), uu[i], bb[i]
        half *= 0.3
    return best


def optimal_K_bruteforce(a0, b0, tol=1e-7):
    """Largest achievable ``Tr K`` found without the closed form.

    Bisects on the trace t; for each t the best constraint margin over the
    traceless part of K comes from a concave grid search.
    """
    if not (abs(a0) < 2 and abs(b0) < 2):
        raise OutOfRange(f"need |a0|, |b0| < 2, got {a0}, {b0}")
    lo, hi = 0.0, 1.0
    while _best_margin_at_trace(hi, a0, b0) >= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _best_margin_at_trace(mid, a0, b0) >= 0:
            lo = mid
        else:
            hi = mid
    return lo
