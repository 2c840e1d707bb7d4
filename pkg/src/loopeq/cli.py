"""Command-line entry point.

Exit codes: 0 success, 1 mathematical verification failure (residual above
tolerance, singular value below threshold, nonzero residual series, delta
deviation too large), 2 usage or configuration error.  All outputs are JSON;
quadrature results can be cached across subcommands (--cache or LOOPEQ_CACHE).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction

from .contours import (
    admissibility_check,
    basis_arcs,
    circle_contour,
    real_axis_contour,
    HomologyClass,
    sample_polyline,
    sectors,
)
from .loopgen import Potential, q_polynomial, q_rational
from .momsolve import MomentFunctional, residuals, solve_moments
from .quadrature import (
    MomentTable,
    QuadratureError,
    expectation,
    moment_matrix,
    oracle_from_quadrature,
)
from .symfunc import Partition, PowerSumPoly
from .wick import map_series, tutte_residual
from .discriminator import discriminator_report

USAGE_ERROR = 2
VERIFY_ERROR = 1


class ConfigError(Exception):
    pass


def _load_potential(path: str) -> Potential:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"potential file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"potential file {path} is not valid JSON: {e}")
    try:
        return Potential.from_json(data)
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"bad potential in {path}: {e}")


def _parse_mu(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError:
        raise ConfigError(f"bad index tuple {text!r}; expected comma-separated integers")


def _emit(data, path: str | None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


class CachedMomentTable(MomentTable):
    """Moment table backed by a JSON cache keyed by potential/arc/k/tol hashes."""

    def __init__(self, arcs, V, tol, cache_dir):
        super().__init__(arcs, V, tol)
        self.cache_dir = cache_dir
        self.path = os.path.join(cache_dir, "moments.json")
        self._store = {}
        if os.path.exists(self.path):
            with open(self.path) as fh:
                self._store = json.load(fh)
        self._dirty = False
        pot = json.dumps(V.to_json(), sort_keys=True)
        self._arc_keys = [
            hashlib.sha256(f"{pot}|{arc!r}|{tol!r}".encode()).hexdigest() for arc in arcs
        ]

    def moment(self, arc_index, k):
        key = f"{self._arc_keys[arc_index]}:{k}"
        if key in self._store and (arc_index, k) not in self.data:
            re, im, err = self._store[key]
            self.data[(arc_index, k)] = (complex(re, im), err)
        val, err = super().moment(arc_index, k)
        if key not in self._store:
            self._store[key] = [val.real, val.imag, err]
            self._dirty = True
        return val, err

    def flush(self):
        if self._dirty:
            os.makedirs(self.cache_dir, exist_ok=True)
            with open(self.path, "w") as fh:
                json.dump(self._store, fh, sort_keys=True)
            self._dirty = False


def _make_table(arcs, V, tol, cache_dir):
    if cache_dir:
        return CachedMomentTable(arcs, V, tol, cache_dir)
    return MomentTable(arcs, V, tol)


def _flush(table):
    if isinstance(table, CachedMomentTable):
        table.flush()


def _dump_moments_csv(table: MomentTable, path: str | None):
    if not path:
        return
    with open(path, "w") as fh:
        fh.write("arc_index,k,re,im,err\n")
        for (arc, k), (val, err) in sorted(table.data.items()):
            fh.write(f"{arc},{k},{val.real!r},{val.imag!r},{err!r}\n")


def _load_class(path: str, V: Potential) -> HomologyClass:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        raise ConfigError(f"bad class file {path}: {e}")
    for f in ("N", "arcs", "terms"):
        if f not in data:
            raise ConfigError(f"class file {path} missing field '{f}'")
    N = int(data["N"])
    kind = data["arcs"]
    if kind == "real":
        arcs = [real_axis_contour()]
    elif kind == "circle":
        arcs = [circle_contour(0j, float(data.get("radius", 1.0)))]
    elif kind == "basis":
        arcs = basis_arcs(V)
    else:
        raise ConfigError(f"class 'arcs' must be real|circle|basis, got {kind!r}")
    terms = {}
    for entry in data["terms"]:
        n = tuple(int(x) for x in entry["n"])
        re, im = entry["c"]
        terms[n] = complex(float(re), float(im))
    return HomologyClass.make(N, arcs, terms)


def _couplings(args) -> dict[int, Fraction]:
    out = {}
    for k in (3, 4, 5, 6):
        v = getattr(args, f"t{k}", None)
        if v is not None:
            out[k] = Fraction(v)
    return out


# -- subcommand handlers -------------------------------------------------------


def cmd_gen(args) -> int:
    V = _load_potential(args.potential)
    mu = _parse_mu(args.mu)
    if V.kind == "polynomial":
        Q = q_polynomial(mu, V, args.N)
    else:
        Q = q_rational(mu, V, args.N)
    _emit({"mu": list(mu), "N": args.N, "Q": Q.to_json(), "pretty": str(Q)}, args.out)
    return 0


def cmd_solve(args) -> int:
    V = _load_potential(args.potential)
    try:
        with open(args.basis) as fh:
            basis_data = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        raise ConfigError(f"bad basis file {args.basis}: {e}")
    d = int(basis_data.get("d", V.d))
    values = {}
    for entry in basis_data["values"]:
        mu = Partition(tuple(entry["mu"]))
        re, im = entry["value"]
        values[mu] = complex(float(re), float(im))
    F = MomentFunctional(N=args.N, d=d, basis_values=values)
    targets = [_parse_mu(t) for t in args.targets.split(";") if t.strip()]
    out, red = solve_moments(F, V, targets)
    _emit(
        {
            "values": [
                {"mu": list(mu), "value": [v.real, v.imag]} for mu, v in sorted(out.items())
            ],
            "coefficient_growth": red.max_abs_coeff,
        },
        args.out,
    )
    return 0


def cmd_residuals(args) -> int:
    V = _load_potential(args.potential)
    G = _class_from_flag(args, V)
    needed = set()
    from .momsolve import loop_tuples

    for mu in loop_tuples(args.weight_max):
        Q = q_polynomial(mu, V, G.N) if V.kind == "polynomial" else q_rational(mu, V, G.N)
        needed.update(Q.terms)
    table = _make_table(G.arc_basis, V, args.tol, args.cache)
    oracle, errors = oracle_from_quadrature(G, V, sorted(needed), args.tol, table=table)
    _flush(table)
    _dump_moments_csv(table, args.dump_moments)
    report = residuals(oracle, V, G.N, args.weight_max, errors=errors)
    _emit(report.to_json(), args.out)
    return 0 if report.max_relative < args.fail_above else VERIFY_ERROR


def _class_from_flag(args, V) -> HomologyClass:
    if args.cls:
        return _load_class(args.cls, V)
    kind = args.gamma
    if kind == "real":
        return HomologyClass.make(args.N, [real_axis_contour()], {(args.N,): 1.0})
    if kind == "circle":
        return HomologyClass.make(args.N, [circle_contour()], {(args.N,): 1.0})
    raise ConfigError("provide --class FILE or --gamma real|circle")


def cmd_contours(args) -> int:
    V = _load_potential(args.potential)
    arcs = basis_arcs(V)
    data = {
        "d": V.d,
        "arcs": [
            {
                "label": arc.label,
                "polyline": sample_polyline(arc),
                "admissible": admissibility_check(arc, V, kmax=8).ok,
            }
            for arc in arcs
        ],
    }
    if V.kind == "polynomial":
        data["sectors"] = [
            {"index": s.index, "center_angle": s.center_angle, "half_width": s.half_width}
            for s in sectors(V)
        ]
    _emit(data, args.emit or args.out)
    return 0


def cmd_expect(args) -> int:
    V = _load_potential(args.potential)
    G = _load_class(args.cls, V)
    mu = _parse_mu(args.poly) if args.poly else ()
    p = PowerSumPoly.monomial(Partition.of(mu), G.N)
    table = _make_table(G.arc_basis, V, args.tol, args.cache)
    val, err = expectation(G, p, V, args.tol, table=table)
    _flush(table)
    _dump_moments_csv(table, args.dump_moments)
    _emit({"re": val.real, "im": val.imag, "err": err}, args.out)
    return 0


def cmd_iso(args) -> int:
    V = _load_potential(args.potential)
    arcs = basis_arcs(V)
    table = _make_table(arcs, V, args.tol, args.cache)
    M = moment_matrix(V, args.N, args.tol, arcs=arcs, table=table)
    _flush(table)
    _dump_moments_csv(table, args.dump_moments)
    _emit(M.to_json(), args.out)
    return 0 if M.min_scaled_singular > args.min_singular else VERIFY_ERROR


def cmd_maps(args) -> int:
    weights = _couplings(args)
    marked = _parse_mu(args.marked) if args.marked else ()
    series = map_series(weights, marked, args.order)
    _emit(series.to_json(), args.out)
    return 0


def cmd_tutte(args) -> int:
    weights = _couplings(args)
    mu = _parse_mu(args.mu)
    series = tutte_residual(weights, mu, args.order)
    ok = series.is_zero()
    out = series.to_json()
    out["identically_zero"] = ok
    _emit(out, args.out)
    return 0 if ok else VERIFY_ERROR


def cmd_discrim(args) -> int:
    V = _load_potential(args.potential)
    report = discriminator_report(V, args.r, args.N, args.tol)
    _emit(report.to_json(), args.out)
    return 0 if report.max_deviation < args.delta_tol else VERIFY_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="loopeq",
        description="Loop equations of matrix models: generate, solve, integrate, cross-check.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, potential=True):
        if potential:
            p.add_argument("--potential", required=True, help="potential JSON file")
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")
        p.add_argument(
            "--cache",
            default=os.environ.get("LOOPEQ_CACHE"),
            help="moment cache directory (env LOOPEQ_CACHE)",
        )
        p.add_argument(
            "--dump-moments",
            default=None,
            help="write the 1-D moment table used to this CSV file",
        )

    p = sub.add_parser("gen", help="emit the loop-equation polynomial Q_mu")
    common(p)
    p.add_argument("--mu", required=True, help="comma-separated index tuple, e.g. 3,1")
    p.add_argument("--N", type=int, required=True, help="number of eigenvalues (folds p_0)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="reduce moments to the finite basis and evaluate")
    common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--basis", required=True, help="JSON with basis values on the box partitions")
    p.add_argument("--targets", required=True, help="semicolon-separated tuples, e.g. '4;3,1'")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("residuals", help="loop-equation residuals of a quadrature functional")
    common(p)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--weight-max", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--fail-above", type=float, default=1e-8)
    p.add_argument("--class", dest="cls", default=None, help="homology class JSON")
    p.add_argument("--gamma", choices=["real", "circle"], default=None)
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("contours", help="emit sampled basis arcs as polylines")
    common(p)
    p.add_argument("--emit", default=None, help="output path (same as --out)")
    p.set_defaults(func=cmd_contours)

    p = sub.add_parser("expect", help="moment functional value on a class")
    common(p)
    p.add_argument("--class", dest="cls", required=True, help="homology class JSON")
    p.add_argument("--poly", default="", help="partition, e.g. 2,1 (empty = Z)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("iso", help="moment matrix + singular values (isomorphism witness)")
    common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--min-singular", type=float, default=1e-8)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("maps", help="map generating series by edge count")
    common(p, potential=False)
    for k in (3, 4, 5, 6):
        p.add_argument(f"--t{k}", default=None, help=f"degree-{k} vertex weight (rational)")
    p.add_argument("--marked", default="", help="marked face sizes, e.g. 3 or 2,1")
    p.add_argument("--order", type=int, default=4, help="edge-count truncation")
    p.set_defaults(func=cmd_maps)

    p = sub.add_parser("tutte", help="loop-equation residual of the map series (exact)")
    common(p, potential=False)
    for k in (3, 4, 5, 6):
        p.add_argument(f"--t{k}", default=None, help=f"degree-{k} vertex weight (rational)")
    p.add_argument("--mu", required=True)
    p.add_argument("--order", type=int, default=4)
    p.set_defaults(func=cmd_tutte)

    p = sub.add_parser("discrim", help="saddle-point delta-limit ratios")
    common(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--delta-tol", type=float, default=0.2)
    p.set_defaults(func=cmd_discrim)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except QuadratureError as e:
        # unreachable tolerance is a configuration problem, not a falsified check
        print(f"quadrature error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
