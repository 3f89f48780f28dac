"""Command-line interface.

Exit codes: 0 ok, 1 verification failed, 2 input error, 3 unphysical state,
4 I/O error.
"""
import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import distances
from .errors import QWassersteinError, UnphysicalState
from .gaussian import GaussianState, Thermal, build_state, parse_state_spec, require_physical
from .oracle import OracleOptions, minimize_cost
from .wasserstein import shifted_distance, thermal_wasserstein2, wasserstein2

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_UNPHYSICAL, EXIT_IO = 0, 1, 2, 3, 4

CSV_COLUMNS = (
    "sweep_var",
    "d_squared",
    "d_delta_squared",
    "bures",
    "weighted_bures",
    "fidelity",
    "overlap",
    "hilbert_schmidt",
    "rel_entropy_ab",
    "rel_entropy_ba",
    "trace_lower",
    "trace_upper",
)

FAMILIES = {"thermal_theta": "theta", "squeezed_dr": "dr", "squeezed_r": "r"}


class InputError(Exception):
    pass


def fmt(x):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepSpec:
    """Grid over one parameter of the pair

    ``A = (nu + theta) diag(e^{-2r}, e^{2r})``,
    ``B = nu diag(e^{-2(r+dr)}, e^{2(r+dr)})``.
    """

    family: str
    nu: float
    r: float = 0.0
    theta: float = 0.0
    dr: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    step: float = 0.1
    hbar: float = 1.0

    @property
    def variable(self):
        return FAMILIES[self.family]

    def grid(self):
        n = int(round((self.hi - self.lo) / self.step)) + 1
        # values rounded to the CSV precision so rows recompute bit-identically
        return [float(fmt(self.lo + i * self.step)) for i in range(n)]

    def states(self, value):
        p = {"r": self.r, "theta": self.theta, "dr": self.dr}
        p[self.variable] = value
        r, theta, dr = p["r"], p["theta"], p["dr"]
        a = (self.nu + theta) * np.diag([np.exp(-2 * r), np.exp(2 * r)])
        b = self.nu * np.diag([np.exp(-2 * (r + dr)), np.exp(2 * (r + dr))])
        return build_state_from_cov(a, self.hbar), build_state_from_cov(b, self.hbar)


def build_state_from_cov(cov, hbar):
    require_physical(cov, hbar)
    return GaussianState(cov)


def parse_sweep_spec(obj):
    """Validate the sweep JSON.

    Example::

        {"family": "thermal_theta", "nu": 1.0, "r": 0.0, "dr": 0.0,
         "range": {"lo": 0.0, "hi": 2.0, "step": 0.1}, "hbar": 1.0}

    ``lo``, ``hi`` and ``step`` may also sit at the top level. The parameter
    named by the family (theta, dr or r) is the sweep variable; its fixed
    value, if given, is ignored.
    """
    if not isinstance(obj, dict):
        raise InputError("sweep spec must be a JSON object")
    family = obj.get("family")
    if family not in FAMILIES:
        raise InputError(f"family must be one of {sorted(FAMILIES)}, got {family!r}")
    # the range may be nested under "range" or given as top-level lo/hi/step
    rng = obj.get("range", obj)
    if not isinstance(rng, dict):
        raise InputError("'range' must be an object with lo, hi, step")
    try:
        spec = SweepSpec(
            family=family,
            nu=float(obj["nu"]),
            r=float(obj.get("r", 0.0)),
            theta=float(obj.get("theta", 0.0)),
            dr=float(obj.get("dr", 0.0)),
            lo=float(rng["lo"]),
            hi=float(rng["hi"]),
            step=float(rng["step"]),
            hbar=float(obj.get("hbar", 1.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed sweep spec: {exc}") from exc
    values = (spec.nu, spec.r, spec.theta, spec.dr, spec.lo, spec.hi, spec.step, spec.hbar)
    if not all(math.isfinite(v) for v in values):
        raise InputError("sweep parameters must be finite")
    if not spec.lo < spec.hi:
        raise InputError(f"empty range: lo={spec.lo} must be < hi={spec.hi}")
    if not spec.step > 0:
        raise InputError("step must be positive")
    if not spec.hbar > 0:
        raise InputError("hbar must be positive")
    return spec


def sweep_row(spec, value):
    a, b = spec.states(value)
    rep = distances.distance_report(a, b, spec.hbar)
    weighted = 0.5 * (a.nu + b.nu) * rep.bures**2
    return [
        value,
        rep.wasserstein2,
        rep.shifted_wasserstein2,
        rep.bures,
        weighted,
        rep.fidelity,
        rep.overlap,
        rep.hilbert_schmidt,
        rep.relative_entropy_ab,
        rep.relative_entropy_ba,
        rep.trace_lower,
        rep.trace_upper,
    ]


def run_sweep(spec):
    return [sweep_row(spec, v) for v in spec.grid()]


def write_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([fmt(x) for x in row])


# ---------------------------------------------------------------------------
# commands


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _load_state(path, hbar):
    try:
        spec = parse_state_spec(_load_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return build_state(spec, hbar)


def _matrix(m):
    return None if m is None else [[fmt_json(x) for x in row] for row in np.asarray(m)]


def fmt_json(x):
    return distances.fmt_float(float(x))


def cmd_compute(args):
    hbar = args.hbar
    a = _load_state(args.state_a, hbar)
    b = _load_state(args.state_b, hbar)
    if args.all:
        out = distances.distance_report(a, b, hbar).to_dict()
    else:
        res = wasserstein2(a, b, hbar)
        out = {
            "d_squared": fmt_json(res.d_squared),
            "branch": res.branch.value,
            "X": _matrix(res.coupling.X),
            "U": _matrix(res.channel.U if res.channel else None),
            "V": _matrix(res.channel.V if res.channel else None),
        }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_sweep(args):
    spec = parse_sweep_spec(_load_json(args.spec))
    rows = run_sweep(spec)
    try:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def random_pair(rng, family="general"):
    """Centered pair with nu in [0.5, 3], r in [0, 1.5], phi in [0, 2 pi)."""
    states = []
    for _ in range(2):
        nu = rng.uniform(0.5, 3.0)
        if family == "thermal":
            states.append(build_state(Thermal(nu)))
        else:
            r, phi = rng.uniform(0.0, 1.5), rng.uniform(0.0, 2 * np.pi)
            states.append(GaussianState.squeezed_thermal(nu, r, phi))
    return states


def verify(trials, seed, family="general", opts=None):
    """Closed form vs brute-force oracle on seeded random pairs; returns per-trial deltas."""
    rng = np.random.default_rng(seed)
    deltas = []
    for i in range(trials):
        a, b = random_pair(rng, family)
        closed = wasserstein2(a, b).d_squared
        o = minimize_cost(a.cov, b.cov, opts or OracleOptions(seed=seed + i))
        deltas.append(closed - o.cost)
    return np.array(deltas)


def cmd_verify(args):
    if args.trials < 1:
        raise InputError("trials must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise InputError("seed must be an unsigned 64-bit integer")
    deltas = verify(args.trials, args.seed, args.family)
    max_delta = float(np.max(np.abs(deltas)))
    ok = max_delta <= args.tol
    rel = "<=" if ok else ">"
    print(
        f"trials={args.trials} seed={args.seed} family={args.family} "
        f"max_delta={max_delta:.3e} {rel} tol={args.tol:.1e} -> {'PASS' if ok else 'FAIL'}"
    )
    return EXIT_OK if ok else EXIT_VERIFY


def _thermal_entropy(nu, theta):
    """Relative entropy between thermal states (nu + theta) I and nu I; None if divergent."""
    if theta == 0:
        return 0.0
    if nu - 0.5 <= 0:
        return None
    a_nu = nu + theta
    x = a_nu - 0.5
    val = (a_nu + 0.5) * math.log((nu + 0.5) / (a_nu + 0.5))
    return val + (0.0 if x == 0 else x * math.log(x / (nu - 0.5)))


def table_rows(nu, theta):
    """Thermal-pair rows ``(name, thermal-column value, general-formula value)``.

    ``A = (nu + theta) I`` and ``B = nu I``. The thermal column uses the
    scalar simplifications, the general column the covariance formulas.
    A value of None marks a divergent quantity.
    """
    if not (nu >= 0.5 and nu + theta >= 0.5):
        raise UnphysicalState(f"need nu >= 1/2 and nu + theta >= 1/2, got nu={nu}, theta={theta}")
    a_nu = nu + theta
    a = build_state(Thermal(a_nu))
    b = build_state(Thermal(nu))

    def self_d(v):
        return thermal_wasserstein2(v, v)

    d2 = thermal_wasserstein2(a_nu, nu)
    root = math.sqrt((4 * nu**2 - 1) * (4 * a_nu**2 - 1))
    f = 2 / (4 * (nu**2 + nu * theta) + 1 - root)
    general_entropy = distances._safe_entropy(a.cov, b.cov, 1.0)
    return [
        ("wasserstein2", d2, wasserstein2(a, b).d_squared),
        ("shifted_wasserstein2", d2 - 0.5 * self_d(a_nu) - 0.5 * self_d(nu), shifted_distance(a, b)),
        ("fidelity", f, distances.fidelity(a.cov, b.cov)),
        ("bures", math.sqrt(max(2 - 2 * math.sqrt(f), 0.0)), distances.bures(a.cov, b.cov)),
        ("overlap", 1 / (2 * nu + theta), distances.overlap(a.cov, b.cov)),
        (
            "hilbert_schmidt",
            abs(theta) / math.sqrt(2 * nu * a_nu * (2 * nu + theta)),
            distances.hilbert_schmidt(a.cov, b.cov),
        ),
        (
            "relative_entropy",
            _thermal_entropy(nu, theta),
            None if math.isinf(general_entropy) else general_entropy,
        ),
    ]


def cmd_table(args):
    rows = table_rows(args.nu, args.theta)
    pure_pair = args.nu == 0.5 and args.theta == 0
    print(f"thermal pair: A = {args.nu + args.theta:g} I, B = {args.nu:g} I")
    print(f"{'quantity':<22} {'thermal column':>20} {'general formula':>20}  agree")
    worst = 0.0
    for name, special, general in rows:
        if special is None or general is None:
            s = g = "divergent"
            agree = special is None and general is None
        else:
            s, g = fmt(special), fmt(general)
            if name == "relative_entropy" and pure_pair:
                s = g = "0 (limit)"
            worst = max(worst, abs(special - general))
            agree = abs(special - general) <= 1e-10
        print(f"{name:<22} {s:>20} {g:>20}  {'yes' if agree else 'NO'}")
    return EXIT_OK if worst <= 1e-10 else EXIT_VERIFY


def build_parser():
    p = argparse.ArgumentParser(prog="qwasserstein", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="distance between two states given as JSON files")
    c.add_argument("--state-a", required=True)
    c.add_argument("--state-b", required=True)
    c.add_argument("--hbar", type=float, default=1.0)
    c.add_argument("--all", action="store_true", help="print the full distance report")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("sweep", help="parameter sweep written to CSV")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="closed form vs numerical minimization")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--tol", type=float, default=1e-4)
    v.add_argument("--family", choices=("general", "thermal"), default="general")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", help="thermal-pair comparison table")
    t.add_argument("--nu", type=float, required=True)
    t.add_argument("--theta", type=float, required=True)
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UnphysicalState as exc:
        print(f"error: unphysical covariance: {exc}", file=sys.stderr)
        return EXIT_UNPHYSICAL
    except QWassersteinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
