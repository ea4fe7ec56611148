"""Command-line front end: ``measure-spectra <subcommand> problem.json``.

Exit codes: 0 success, 1 verification failed, 2 invalid input, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, asymptotics, bcspec, green, trace
from .bcspec import BoundaryConditions
from .errors import NumericalError, SpectraError, ValidationError
from .measure import SignedMeasure
from .spectrum import spectrum

TOP_KEYS = {"interval", "bc", "measure", "options"}
MEASURE_KEYS = {"atoms", "density"}
DENSITY_KEYS = {"breakpoints", "values"}
OPTION_KEYS = {"terms", "cesaro", "tolerance", "schedule", "points", "lambdas", "x", "N", "branch"}


class ProblemError(ValidationError):
    """Problem-file error carrying the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class Problem:
    bc: BoundaryConditions
    measure: SignedMeasure
    options: dict = field(default_factory=dict)


def _key_line(text: str, *path: str) -> int | None:
    """Line of the last key in ``path``, searching after each parent key in turn."""
    pos = 0
    found = None
    for key in path:
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            break
        pos = m.start()
        found = text.count("\n", 0, pos) + 1
    return found


def _complex(v, where: str) -> complex:
    if isinstance(v, dict):
        if set(v) != {"re", "im"}:
            raise ValidationError(f"{where}: complex numbers are written as {{\"re\": x, \"im\": y}}")
        v = complex(_real(v["re"], where), _real(v["im"], where))
    elif isinstance(v, (list, tuple)) and len(v) == 2:
        v = complex(_real(v[0], where), _real(v[1], where))
    else:
        v = complex(_real(v, where))
    return v


def _real(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {v!r}")
    if not math.isfinite(v):
        raise ValidationError(f"{where}: value must be finite")
    return float(v)


def _check_keys(obj, allowed: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ValidationError(f"{where}: unknown key(s) {', '.join(unknown)}")


def parse_problem(text: str) -> Problem:
    """Parse and validate a JSON problem file."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    section = ()
    try:
        _check_keys(data, TOP_KEYS, "problem")
        for key in ("interval", "bc"):
            if key not in data:
                raise ValidationError(f"missing required key {key!r}")
        section = ("interval",)
        iv = data["interval"]
        if not isinstance(iv, list) or len(iv) != 2:
            raise ValidationError("interval must be [a, b]")
        a, b = _real(iv[0], "interval"), _real(iv[1], "interval")
        section = ("bc",)
        rows = data["bc"]
        if not isinstance(rows, list) or len(rows) != 2 or any(not isinstance(r, list) or len(r) != 4 for r in rows):
            raise ValidationError("bc must be a 2x4 matrix [[alpha, gamma, beta, phi], ...]")
        matrix = [[_complex(v, "bc") for v in row] for row in rows]
        bc = BoundaryConditions.from_matrix(a, b, matrix)
        section = ("measure",)
        meas = data.get("measure", {})
        _check_keys(meas, MEASURE_KEYS, "measure")
        atoms = []
        section = ("measure", "atoms")
        for i, atom in enumerate(meas.get("atoms", [])):
            where = f"measure.atoms[{i}]"
            if not isinstance(atom, list) or len(atom) not in (2, 3):
                raise ValidationError(f"{where}: atoms are written as [x, re, im]")
            h = complex(_real(atom[1], where), _real(atom[2], where) if len(atom) == 3 else 0.0)
            atoms.append((_real(atom[0], where), h))
        SignedMeasure.create(a, b, atoms)
        section = ("measure", "density")
        dens = meas.get("density", {})
        _check_keys(dens, DENSITY_KEYS, "measure.density")
        bps = [_real(v, "measure.density.breakpoints") for v in dens.get("breakpoints", [])]
        vals = [_complex(v, "measure.density.values") for v in dens.get("values", [])]
        q = SignedMeasure.create(a, b, atoms, bps, vals)
        section = ("options",)
        opts = data.get("options", {})
        _check_keys(opts, OPTION_KEYS, "options")
        return Problem(bc, q, dict(opts))
    except ValidationError as exc:
        if isinstance(exc, ProblemError):
            raise
        raise ProblemError(str(exc), _key_line(text, *section) if section else 1) from None


# -- output helpers ----------------------------------------------------------------
def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json_default(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _opt(args, prob: Problem, name: str, flag: str, default):
    v = getattr(args, flag, None)
    if v is not None:
        return v
    return prob.options.get(name, default)


# -- subcommands -------------------------------------------------------------------
def cmd_classify(args, prob: Problem) -> tuple[int, str]:
    inv = bcspec.classify(prob.bc)
    coef = bcspec.trace_coefficients(prob.bc)
    info = {
        "A": inv.A, "B": inv.B, "C": inv.C,
        "alpha": inv.alpha,
        "regularity": inv.regularity.value,
        "case": inv.case.value,
        "d0": inv.d0, "d1": inv.d1,
        "sigma": inv.sigma,
        "trace_A": coef.A, "trace_B": coef.B,
    }
    if args.format == "json":
        return 0, _dumps(info)
    lines = []
    for k, v in info.items():
        if isinstance(v, complex):
            v = fmt(v.real) if v.imag == 0 else f"{fmt(v.real)}{'+' if v.imag >= 0 else '-'}{fmt(abs(v.imag))}j"
        lines.append(f"{k}: {v}")
    return 0, "\n".join(lines) + "\n"


def cmd_spectrum(args, prob: Problem) -> tuple[int, str]:
    K = int(_opt(args, prob, "terms", "terms", 100))
    spec = spectrum(prob.bc, prob.measure, K)
    rows = [(e.index, e.lam.real, e.lam.imag, e.multiplicity, e.jordan, e.z.real, e.z.imag)
            for e in spec.eigenvalues]
    header = ["N", "re_lambda", "im_lambda", "multiplicity", "jordan", "re_z", "im_z"]
    if args.format == "json":
        return 0, _dumps([dict(zip(header, r)) for r in rows])
    return 0, _csv(header, rows)


def cmd_green(args, prob: Problem) -> tuple[int, str]:
    bc = prob.bc
    mid = 0.5 * (bc.a + bc.b)
    points = prob.options.get("points", [[mid, mid]])
    lambdas = [_complex(v, "options.lambdas") for v in prob.options.get("lambdas", [-1.0])]
    rows = []
    for lam in lambdas:
        for x, y in points:
            g = complex(green.green0(bc, float(x), float(y), lam))
            rows.append((x, y, lam.real, lam.imag, g.real, g.imag))
    header = ["x", "y", "re_lambda", "im_lambda", "re_green", "im_green"]
    if args.format == "json":
        return 0, _dumps([dict(zip(header, r)) for r in rows])
    return 0, _csv(header, rows)


def cmd_contour(args, prob: Problem) -> tuple[int, str]:
    bc = prob.bc
    L = int(_opt(args, prob, "schedule", "schedule", 20))
    sched = green.build_schedule(bc, L)
    rows = []
    if args.quantity == "g0sq":
        x = float(prob.options.get("x", 0.5 * (bc.a + bc.b)))
        target = green.TARGET_G0_SQUARED
        for ell, R in enumerate(sched.radii):
            v = green.contour_g0_squared(bc, x, float(R))
            rows.append((ell, R, v.real, v.imag, abs(v - target)))
    else:
        for ell, R in enumerate(sched.radii):
            v = green.contour_trace_term(bc, prob.measure, float(R))
            rows.append((ell, R, v.real, v.imag, math.nan))
    header = ["ell", "radius", "re_value", "im_value", "abs_error"]
    if args.format == "json":
        return 0, _dumps([dict(zip(header, r)) for r in rows])
    return 0, _csv(header, rows)


def cmd_asymptotics(args, prob: Problem) -> tuple[int, str]:
    bc = prob.bc
    Ns = prob.options.get("N", [5, 10, 20, 40, 80])
    branch = int(prob.options.get("branch", -1))
    Ns = [int(n) for n in Ns]
    need = 2 * max(Ns) + 8
    zs = spectrum(bc, None, need).z * bc.length
    rows = []
    for N in Ns:
        e = asymptotics.rho_expansion(bc, N, branch)
        num = complex(zs[np.argmin(np.abs(zs - e.value))])
        err = abs(num - e.value)
        scaled = err * N ** e.order if e.order < 99 else err
        rows.append((N, e.value.real, e.value.imag, num.real, num.imag, scaled))
    header = ["N", "re_expansion", "im_expansion", "re_numeric", "im_numeric", "scaled_error"]
    if args.format == "json":
        return 0, _dumps([dict(zip(header, r)) for r in rows])
    return 0, _csv(header, rows)


def _trace_opts(args, prob: Problem) -> tuple[int, int]:
    K = int(_opt(args, prob, "terms", "terms", trace.DEFAULT_TERMS))
    C = int(_opt(args, prob, "cesaro", "cesaro", trace.DEFAULT_CESARO))
    return K, C


def cmd_trace(args, prob: Problem) -> tuple[int, str]:
    K, C = _trace_opts(args, prob)
    report = trace.regularized_trace(prob.bc, prob.measure, K, C)
    return 0, report.to_json() + "\n"


def cmd_verify(args, prob: Problem) -> tuple[int, str]:
    K, C = _trace_opts(args, prob)
    tol = float(_opt(args, prob, "tolerance", "tolerance", 0.02))
    ok, report = trace.verify(prob.bc, prob.measure, tol, K, C)
    out = {"passed": ok, "tolerance": tol, "report": report.to_dict()}
    return (0 if ok else 1), _dumps(out)


COMMANDS = {
    "classify": cmd_classify,
    "spectrum": cmd_spectrum,
    "green": cmd_green,
    "contour": cmd_contour,
    "asymptotics": cmd_asymptotics,
    "trace": cmd_trace,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="measure-spectra", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("problem", help="JSON problem file ('-' for stdin)")
        s.add_argument("--terms", type=int, help="number of eigenvalues K")
        s.add_argument("--cesaro", type=int, help="number of partial sums averaged")
        s.add_argument("--tolerance", type=float, help="verification tolerance")
        s.add_argument("--schedule", type=int, help="number of contour radii")
        s.add_argument("--output", help="write the result here instead of stdout")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "contour":
            s.add_argument("--quantity", choices=("g0sq", "trace"), default="g0sq")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = sys.stdin.read() if args.problem == "-" else open(args.problem, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: cannot read {args.problem}: {exc.strerror}", file=sys.stderr)
        return 2
    try:
        prob = parse_problem(text)
        code, out = COMMANDS[args.command](args, prob)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    except SpectraError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
