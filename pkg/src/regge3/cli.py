"""Command-line front end.

Subcommands: analyze, spectrum, sweep, find-csc, find-einstein, yamabe,
reproduce.  Exit codes: 0 success, 1 usage error, 2 inadmissible metric,
3 solver hit the admissibility boundary, 4 iteration limit reached.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import curvature, reproduce, solve
from .complexes import Complex, double_tetrahedron, load_complex, six_hundred_cell
from .conformal import ConformalClass
from .geometry import InadmissibleMetricError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INADMISSIBLE = 2
EXIT_BOUNDARY = 3
EXIT_MAXITERS = 4

_REASON_EXIT = {"converged": EXIT_OK, "stall": EXIT_OK,
                "boundary-hit": EXIT_BOUNDARY, "max-iters": EXIT_MAXITERS,
                "singular-jacobian": EXIT_MAXITERS}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _vector(values) -> str:
    return "[" + ", ".join(_fmt(x) for x in values) + "]"


def get_complex(spec: str) -> Complex:
    if spec == "dt":
        return double_tetrahedron()
    if spec == "cell600":
        return six_hundred_cell()
    return load_complex(spec)


def parse_lengths(spec: str, num_edges: int) -> np.ndarray:
    """Parse 'uniform:k' or a comma-separated length list."""
    if spec.startswith("uniform:"):
        try:
            k = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad uniform length {spec!r}") from exc
        return np.full(num_edges, k)
    try:
        vals = np.asarray([float(x) for x in spec.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"bad length list {spec!r}") from exc
    if vals.size != num_edges:
        raise UsageError(f"expected {num_edges} lengths, got {vals.size}")
    return vals


def parse_factors(spec: str, num_vertices: int) -> np.ndarray:
    try:
        vals = np.asarray([float(x) for x in spec.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"bad factor list {spec!r}") from exc
    if vals.size != num_vertices:
        raise UsageError(f"expected {num_vertices} factors, got {vals.size}")
    return vals


def resolve_metric(args, c: Complex) -> np.ndarray:
    """Exactly one metric source: --lengths, or --class (+ optional --conformal)."""
    has_lengths = getattr(args, "lengths", None) is not None
    has_class = getattr(args, "cls", None) is not None
    if has_lengths and has_class:
        raise UsageError("give either --lengths or --class, not both")
    if has_lengths:
        if getattr(args, "conformal", None) is not None:
            raise UsageError("--conformal requires --class")
        return parse_lengths(args.lengths, c.num_edges)
    if has_class:
        cls = ConformalClass(c, parse_lengths(args.cls, c.num_edges))
        f = np.zeros(c.num_vertices) if getattr(args, "conformal", None) is None \
            else parse_factors(args.conformal, c.num_vertices)
        lengths, ok = cls.apply(f)
        if not ok:
            raise InadmissibleMetricError(
                "conformal point induces an inadmissible metric")
        return lengths
    raise UsageError("a metric is required: --lengths or --class [--conformal]")


def cmd_analyze(args) -> int:
    c = get_complex(args.complex)
    lengths = resolve_metric(args, c)
    rep = curvature.functionals(c, lengths)
    bounds = curvature.bounds_report(c, lengths)
    res = {
        "einstein_residual_l": float(np.abs(curvature.einstein_residual(c, lengths, "L")).max()),
        "einstein_residual_v": float(np.abs(curvature.einstein_residual(c, lengths, "V")).max()),
        "csc_residual_l": float(np.abs(curvature.csc_residual(c, lengths, "L")).max()),
        "csc_residual_v": float(np.abs(curvature.csc_residual(c, lengths, "V")).max()),
    }
    if args.format == "human":
        print(f"complex: {args.complex}  (V,E,F,T) = {c.counts()}")
        print(f"LEHR = {_fmt(rep.lehr)}   VEHR = {_fmt(rep.vehr)}   EHR = {_fmt(rep.ehr)}")
        print(f"length = {_fmt(rep.length)}   volume = {_fmt(rep.volume)}")
        print(f"edge curvature range: [{_fmt(rep.k_edge.min())}, {_fmt(rep.k_edge.max())}]")
        print(f"bounds: {_fmt(bounds.lehr_lower)} <= LEHR <= {_fmt(bounds.lehr_upper)}"
              f"   fatness = {_fmt(bounds.fatness)}   VEHR >= {_fmt(bounds.vehr_lower)}")
        for k, v in res.items():
            print(f"{k} = {_fmt(v)}")
    else:
        print(rep.to_text(), end="")
        print(bounds.to_text(), end="")
        for k, v in res.items():
            print(f"{k}: {_fmt(v)}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    c = get_complex(args.complex)
    lengths = resolve_metric(args, c)
    functional = args.functional
    if args.space == "lengths":
        H = curvature.hessian_fd_lengths(c, lengths, functional, richardson=True)
        label = f"finite-difference length Hessian of {functional.upper()}"
    else:
        if functional == "lehr" and \
                float(np.abs(curvature.csc_residual(c, lengths, "L")).max()) <= 1e-8:
            H = curvature.lehr_conformal_hessian_csc(c, lengths)
            label = "analytic conformal Hessian of LEHR (csc metric)"
        else:
            H = curvature.conformal_hessian_fd(c, lengths, functional, richardson=True)
            label = f"finite-difference conformal Hessian of {functional.upper()}"
    spec = solve.eig_sym(H)
    if args.format == "human":
        print(label)
        print("eigenvalues:", _vector(spec.eigenvalues))
        equal_length = np.allclose(lengths, lengths[0], rtol=1e-12, atol=0.0)
        if c.num_vertices == 4 and equal_length:
            k = float(lengths[0])
            refs = _equal_length_reference(functional, args.space, k)
            if refs is not None:
                print("reference eigenvalues at the equal-length metric:",
                      _vector(refs))
                print("max deviation:", _fmt(np.abs(spec.eigenvalues - refs).max()))
        if args.vectors:
            for i in range(spec.eigenvalues.size):
                print(f"v[{i}] ({_fmt(spec.eigenvalues[i])}):",
                      _vector(spec.eigenvectors[:, i]))
    else:
        print("eigenvalues: " + _vector(spec.eigenvalues))
        for i in range(spec.eigenvalues.size):
            print(f"eigenvector_{i}: " + _vector(spec.eigenvectors[:, i]))
    return EXIT_OK


def _equal_length_reference(functional: str, space: str, k: float):
    acos13 = np.arccos(1.0 / 3.0)
    if space == "lengths" and functional == "lehr":
        lam1, lam2 = 2 * np.sqrt(2) / 9 / k ** 2, -2 * np.sqrt(2) / 3 / k ** 2
        return np.array(sorted([lam1] * 3 + [lam2] * 2 + [0.0]))
    if space == "lengths" and functional == "vehr":
        lam1 = 2 ** (7 / 6) * 3 ** (-2 / 3) / k ** 2 * (2 ** 1.5 + 9 * np.pi - 9 * acos13)
        lam2 = 2 ** (7 / 6) * 3 ** (1 / 3) / k ** 2 * (7 * np.pi - 2 ** 1.5 - 7 * acos13)
        return np.array(sorted([lam1] * 3 + [lam2] * 2 + [0.0]))
    if space == "conformal" and functional == "lehr":
        return np.array([0.0] + [4 * np.sqrt(2) / 9] * 3)
    return None


def cmd_sweep(args) -> int:
    c = get_complex(args.complex)
    if args.family != "diag":
        raise UsageError(f"unknown family {args.family!r} (available: diag)")
    if c.num_edges != 6:
        raise UsageError("the diag family is defined on the double tetrahedron")
    try:
        a, b, n = args.t.split(":")
        ts = np.linspace(float(a), float(b), int(n))
    except ValueError as exc:
        raise UsageError(f"bad --t range {args.t!r}, expected start:stop:steps") from exc
    quantities = [q.strip() for q in args.quantities.split(",") if q.strip()]
    try:
        table = solve.sweep_family(c, solve.diagonal_family, ts, quantities)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sep = {"delimited": ",", "structured": "\t", "human": "\t"}[args.format]
    print(table.to_delimited(sep=sep), end="")
    return EXIT_OK


def _print_trace(trace) -> None:
    print("trace:")
    for i, rn in enumerate(trace.residual_norms):
        step = trace.step_sizes[i] if i < len(trace.step_sizes) else ""
        val = trace.values[i] if i < len(trace.values) else ""
        parts = [f"  iter {i}: residual {_fmt(rn)}"]
        if step != "":
            parts.append(f"step {_fmt(step)}")
        if val != "":
            parts.append(f"value {_fmt(val)}")
        print("  ".join(parts))


def cmd_find_csc(args) -> int:
    c = get_complex(args.complex)
    if args.cls is None:
        raise UsageError("find-csc requires --class")
    cls = ConformalClass(c, parse_lengths(args.cls, c.num_edges))
    f0 = np.zeros(c.num_vertices) if args.start is None \
        else parse_factors(args.start, c.num_vertices)
    f, trace = solve.solve_csc(cls, args.which, f0, tol=args.tol,
                               max_iter=args.max_iters)
    lengths, _ = cls.apply(f)
    print(f"reason: {trace.reason}")
    print(f"iterations: {len(trace.residual_norms)}")
    print(f"factors: {_vector(f)}")
    print(f"lengths: {_vector(lengths)}")
    print(f"residual: {_fmt(trace.residual_norms[-1])}")
    if args.trace:
        _print_trace(trace)
    return _REASON_EXIT[trace.reason]


def cmd_find_einstein(args) -> int:
    c = get_complex(args.complex)
    lengths = resolve_metric(args, c)
    functional = "lehr" if args.which.upper() == "L" else "vehr"
    lend, trace = solve.descend_lengths(c, functional, lengths,
                                        normalize=args.which.upper(),
                                        max_iter=args.max_iters)
    res = curvature.einstein_residual(c, lend, args.which.upper())
    print(f"reason: {trace.reason}")
    print(f"iterations: {len(trace.residual_norms)}")
    print(f"lengths: {_vector(lend)}")
    print(f"{functional}: {_fmt(curvature.FUNCTIONALS[functional](c, lend))}")
    print(f"einstein_residual: {_fmt(np.abs(res).max())}")
    if args.trace:
        _print_trace(trace)
    return _REASON_EXIT[trace.reason]


def cmd_yamabe(args) -> int:
    c = get_complex(args.complex)
    if args.cls is None:
        raise UsageError("yamabe requires --class")
    cls = ConformalClass(c, parse_lengths(args.cls, c.num_edges))
    est = solve.yamabe_constant_estimate(cls, args.which, starts=args.starts,
                                         seed=args.seed)
    print(f"value: {_fmt(est.value)}")
    print(f"bound_kind: {est.bound_kind}  # upper bound on the conformal infimum")
    print(f"attained_interior: {est.attained_interior}")
    print(f"factors: {_vector(est.factors)}")
    print("runs:")
    for val, reason in est.runs:
        print(f"  {_fmt(val) if np.isfinite(val) else 'nan'}  {reason}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    rows = reproduce.run_all(only=args.only)
    if not rows:
        raise UsageError(f"no criteria match {args.only!r}")
    print(reproduce.format_rows(rows, delimited=(args.format == "delimited")), end="")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_MAXITERS


def build_parser() -> _Parser:
    p = _Parser(prog="regge3",
                description="Curvature functionals on piecewise flat 3-manifolds")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, conformal=True):
        sp.add_argument("--complex", default="dt",
                        help="dt | cell600 | path to a triangulation file")
        sp.add_argument("--lengths", help="comma-separated lengths or uniform:k")
        sp.add_argument("--class", dest="cls",
                        help="background lengths of a conformal class")
        if conformal:
            sp.add_argument("--conformal", help="comma-separated per-vertex factors")
        sp.add_argument("--format", choices=("human", "structured", "delimited"),
                        default="human")

    sp = sub.add_parser("analyze", help="curvature report, bounds, residuals")
    add_common(sp)
    sp.set_defaults(fn=cmd_analyze)

    sp = sub.add_parser("spectrum", help="Hessian spectra in length or conformal space")
    add_common(sp)
    sp.add_argument("--functional", choices=("ehr", "lehr", "vehr"), default="lehr")
    sp.add_argument("--space", choices=("lengths", "conformal"), default="lengths")
    sp.add_argument("--vectors", action="store_true", help="print eigenvectors")
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("sweep", help="one-parameter family sweep")
    add_common(sp, conformal=False)
    sp.add_argument("--family", default="diag")
    sp.add_argument("--t", required=True, help="start:stop:steps")
    sp.add_argument("--quantities", default="ehr,lehr,vehr",
                    help=f"comma list from: {', '.join(solve.sweep_quantities())}")
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("find-csc", help="Newton solve for constant scalar curvature")
    add_common(sp, conformal=False)
    sp.add_argument("--which", choices=("L", "V"), default="L")
    sp.add_argument("--start", help="comma-separated starting factors")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iters", type=int, default=100)
    sp.add_argument("--trace", action="store_true", help="print per-iteration trace")
    sp.set_defaults(fn=cmd_find_csc)

    sp = sub.add_parser("find-einstein", help="projected descent toward an Einstein metric")
    add_common(sp, conformal=False)
    sp.add_argument("--which", choices=("L", "V"), default="V")
    sp.add_argument("--max-iters", type=int, default=2000)
    sp.add_argument("--trace", action="store_true", help="print per-iteration trace")
    sp.set_defaults(fn=cmd_find_einstein)

    sp = sub.add_parser("yamabe", help="multi-start Yamabe constant estimate")
    add_common(sp, conformal=False)
    sp.add_argument("--which", choices=("L", "V"), default="L")
    sp.add_argument("--starts", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_yamabe)

    sp = sub.add_parser("reproduce", help="run the reference-value suite")
    sp.add_argument("--all", action="store_true", help="run every criterion (default)")
    sp.add_argument("--only", help="filter criteria by substring")
    sp.add_argument("--format", choices=("human", "delimited"), default="human")
    sp.set_defaults(fn=cmd_reproduce)

    return p


_NUMERIC_LIST_FLAGS = ("--start", "--conformal")


def _merge_negative_values(argv):
    """Join flag/value pairs whose value begins with a minus sign.

    Lets ``--start -1,-1,0,0`` parse without requiring the ``=`` form.
    """
    out = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok in _NUMERIC_LIST_FLAGS and i + 1 < len(argv):
            nxt = argv[i + 1]
            if nxt.startswith("-") and set(nxt) <= set("-+.,0123456789eE"):
                out.append(f"{tok}={nxt}")
                skip = True
                continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_negative_values(list(argv))
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InadmissibleMetricError as exc:
        print(f"inadmissible metric: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
