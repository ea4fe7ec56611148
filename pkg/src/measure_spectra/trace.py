"""Regularized trace: numeric Cesaro sum of eigenvalue shifts versus the closed form."""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .bcspec import BoundaryConditions, classify, trace_coefficients
from .errors import InsufficientTerms, RootLoss, ValidationError
from .green import build_schedule, contour_g0_squared, contour_trace_term
from .measure import SignedMeasure
from .spectrum import Spectrum, count_in_disc, spectrum
from .summation import cesaro, pair_terms

DEFAULT_TERMS = 4000
DEFAULT_CESARO = 4000
THREADS_ENV = "MEASURE_SPECTRA_THREADS"


def thread_cap() -> int:
    """Worker count from ``MEASURE_SPECTRA_THREADS`` (default 2, at least 1)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw) if raw.strip() else 2
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _cpx(v) -> dict:
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def _uncpx(d) -> complex:
    return complex(d["re"], d["im"])


def problem_hash(bc: BoundaryConditions, q: SignedMeasure, **opts) -> str:
    """SHA-256 of a canonical serialization of the inputs."""
    payload = {
        "interval": [bc.a, bc.b],
        "bc": [[_cpx(v) for v in row] for row in bc.rows],
        "atoms": [[x, _cpx(h)] for x, h in q.atoms],
        "breakpoints": list(q.breakpoints),
        "values": [_cpx(v) for v in q.values],
        "options": {k: opts[k] for k in sorted(opts)},
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


# -- closed form -----------------------------------------------------------------
@dataclass(frozen=True)
class FormulaParts:
    value: complex
    linear: complex
    nonlinear: complex
    raw_derivatives: tuple[complex, complex]
    adjusted_derivatives: tuple[complex, complex]


def formula_parts(bc: BoundaryConditions, q: SignedMeasure) -> FormulaParts:
    coef = trace_coefficients(bc)
    raw = q.endpoint_derivatives()
    adj = q.zero_mean_adjust().endpoint_derivatives()
    linear = coef.A * adj[0] + coef.B * adj[1]
    nonlinear = -0.125 * complex(sum(h * h for _, h in q.atoms))
    return FormulaParts(complex(linear + nonlinear), complex(linear), nonlinear, raw, adj)


def formula_value(bc: BoundaryConditions, q: SignedMeasure) -> complex:
    """``A Q'(a) + B Q'(b) - (1/8) sum h_j^2`` with ``Q`` of the zero-mean measure."""
    return formula_parts(bc, q).value


# -- report ------------------------------------------------------------------------
@dataclass
class TraceReport:
    numeric: complex
    cesaro_diagnostic: float
    cesaro_terms: int
    means_of_means: complex
    rebracket_correction: complex
    formula: complex
    linear: complex
    nonlinear: complex
    raw_derivatives: tuple[complex, complex]
    adjusted_derivatives: tuple[complex, complex]
    residual: float
    eigenvalues_used: int
    regularity: str
    case: str
    schedule_radii: int
    schedule_max_radius: float
    schedule_min_margin: float
    count_checks: list[tuple[float, int]] = field(default_factory=list)
    version: str = __version__
    input_hash: str = ""

    _COMPLEX = ("numeric", "means_of_means", "rebracket_correction", "formula", "linear", "nonlinear")
    _PAIRS = ("raw_derivatives", "adjusted_derivatives")

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in self._COMPLEX:
            d[k] = _cpx(d[k])
        for k in self._PAIRS:
            d[k] = [_cpx(v) for v in d[k]]
        d["count_checks"] = [[float(r), int(n)] for r, n in self.count_checks]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TraceReport":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValidationError(f"unknown TraceReport fields: {sorted(unknown)}")
        d = dict(d)
        for k in cls._COMPLEX:
            d[k] = _uncpx(d[k])
        for k in cls._PAIRS:
            d[k] = tuple(_uncpx(v) for v in d[k])
        d["count_checks"] = [(float(r), int(n)) for r, n in d["count_checks"]]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "TraceReport":
        return cls.from_dict(json.loads(text))


def _spectra(bc, q, K: int) -> tuple[Spectrum, Spectrum]:
    with ThreadPoolExecutor(max_workers=min(2, thread_cap())) as pool:
        f0 = pool.submit(spectrum, bc, None, K)
        fq = pool.submit(spectrum, bc, q, K)
        return f0.result(), fq.result()


def _count_checks(bc, q, spec0: Spectrum, spec_q: Spectrum, schedule) -> list[tuple[float, int]]:
    """Winding counts at a few scheduled radii must match the enumerated spectra."""
    n = len(schedule)
    picks = sorted({i for i in (0, 1, 2, n // 2, n - 1) if 0 <= i < n})
    out = []
    for i in picks:
        R = float(schedule.radii[i])
        want = int(schedule.inside[i])
        for qq, spec in ((None, spec0), (q, spec_q)):
            measure = SignedMeasure.zero(bc.a, bc.b) if qq is None else qq
            got = count_in_disc(bc, measure, R)
            listed = int(np.sum(np.abs(spec.z) < R))
            if got != want or listed != want:
                raise RootLoss(f"disc |z| < {R:.6g}: winding count {got}, listed {listed}, expected {want}")
        out.append((R, want))
    return out


def regularized_trace(bc: BoundaryConditions, q: SignedMeasure, terms: int = DEFAULT_TERMS,
                      cesaro_terms: int = DEFAULT_CESARO, tolerance: float | None = None) -> TraceReport:
    """Numeric regularized trace of ``-y'' + q y`` under ``bc`` with its closed-form value.

    The series ``lam_N(q) - lam_N - q([a, b])/(b - a)`` is bracketed per
    regularity class and (C,1)-summed over at most ``cesaro_terms`` partial
    sums.  With ``tolerance`` set, a Cesaro diagnostic above it raises
    :class:`InsufficientTerms`.
    """
    inv = classify(bc)
    parts = formula_parts(bc, q)
    spec0, spec_q = _spectra(bc, q, terms)
    shift = q.total_mass / bc.length
    paired = pair_terms(spec0, spec_q, bc, shift)
    K = min(cesaro_terms, len(paired.terms))
    res = cesaro(paired.terms, K)
    if tolerance is not None and res.diagnostic > tolerance:
        raise InsufficientTerms(
            f"Cesaro diagnostic {res.diagnostic:.3g} exceeds tolerance {tolerance:.3g}; raise --terms/--cesaro")
    used = sum(len(g) for g in paired.groups[:K])
    L = max(1, min(K, len(paired.groups)) - 3)
    schedule = build_schedule(bc, L, spec0)
    checks = _count_checks(bc, q, spec0, spec_q, schedule)
    return TraceReport(
        numeric=res.estimate,
        cesaro_diagnostic=res.diagnostic,
        cesaro_terms=K,
        means_of_means=res.means_of_means,
        rebracket_correction=paired.correction,
        formula=parts.value,
        linear=parts.linear,
        nonlinear=parts.nonlinear,
        raw_derivatives=parts.raw_derivatives,
        adjusted_derivatives=parts.adjusted_derivatives,
        residual=abs(res.estimate - parts.value),
        eigenvalues_used=used,
        regularity=inv.regularity.value,
        case=inv.case.value,
        schedule_radii=len(schedule),
        schedule_max_radius=float(schedule.radii[-1]),
        schedule_min_margin=float(np.min(schedule.margins)),
        count_checks=checks,
        input_hash=problem_hash(bc, q, terms=terms, cesaro_terms=cesaro_terms),
    )


def verify(bc: BoundaryConditions, q: SignedMeasure, tolerance: float, terms: int = DEFAULT_TERMS,
           cesaro_terms: int = DEFAULT_CESARO) -> tuple[bool, TraceReport]:
    """Pass iff the numeric trace is within ``tolerance`` of the closed form."""
    report = regularized_trace(bc, q, terms, cesaro_terms, tolerance=tolerance)
    return report.residual < tolerance, report


# -- splitting -------------------------------------------------------------------
@dataclass
class SplittingRow:
    radius: float
    inside: int
    eigen_side: complex
    contour_side: complex

    @property
    def defect(self) -> float:
        return abs(self.eigen_side - self.contour_side)


def splitting_rows(bc: BoundaryConditions, q: SignedMeasure, L: int) -> list[SplittingRow]:
    """Both sides of the first-order splitting at the first ``L`` scheduled radii.

    The eigenvalue side is ``sum (lam_N(q) - lam_N)`` over ``|lam_N| < R^2``;
    the contour side is the resolvent term plus
    ``(1/4 pi i) sum_j h_j^2 oint G0(x_j, x_j, lam)^2 dlam``.
    """
    schedule = build_schedule(bc, L)
    K = int(schedule.inside[-1]) + 4
    spec0, spec_q = _spectra(bc, q, K)
    diffs = np.cumsum(spec_q.lam - spec0.lam)
    rows = []
    for R, n in zip(schedule.radii, schedule.inside):
        R = float(R)
        n = int(n)
        for qq, spec in ((SignedMeasure.zero(bc.a, bc.b), spec0), (q, spec_q)):
            got = count_in_disc(bc, qq, R)
            if got != n or int(np.sum(np.abs(spec.z) < R)) != n:
                raise RootLoss(f"disc |z| < {R:.6g}: winding count {got}, expected {n}")
        eig = complex(diffs[n - 1]) if n else 0j
        contour = contour_trace_term(bc, q, R)
        for x, h in q.atoms:
            contour += h * h * contour_g0_squared(bc, x, R) / (4j * np.pi)
        rows.append(SplittingRow(R, n, eig, contour))
    return rows
