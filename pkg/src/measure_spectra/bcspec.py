"""Two-point boundary conditions for -y'' + q y = lambda y on [a, b].

A system is stored as a 2x4 complex matrix whose row ``j`` reads::

    alpha_j y'(a) + gamma_j y(a) + beta_j y'(b) + phi_j y(b) = 0

Normalization brings the system to a canonical row-equivalent form with the
minimal total derivative order, from which the leading coefficients
``a_j, b_j``, the lower-order coefficients ``c_j, f_j`` and the invariants
``A = b1 a0 + a1 b0``, ``B = f1 a0 - c1 b0``, ``C = a1 a0 + b1 b0`` are read.
Lower-order coefficients are reported in the rescaled variable
``t = (x - a) / (b - a)`` so that the closed-form expansions written for
``[0, 1]`` apply to any interval.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateRows, IrregularBC

ZERO_TOL = 1e-12


class Regularity(str, enum.Enum):
    IRREGULAR = "Irregular"
    STRONGLY_REGULAR = "StronglyRegular"
    REGULAR_NOT_STRONG = "RegularNotStrong"


class CaseTag(str, enum.Enum):
    DIRICHLET = "Dirichlet"
    BOTH1 = "Both1"
    DOUBLE_NO_JORDAN = "Mixed-DoubleNoJordan"
    JORDAN = "Mixed-Jordan"
    CLOSE_V1 = "Mixed-CloseV1"
    CLOSE_V2 = "Mixed-CloseV2"
    CLOSE_V3 = "Mixed-CloseV3"
    SEPARATED = "Mixed-Separated"

    @property
    def is_mixed(self) -> bool:
        return self.value.startswith("Mixed")


@dataclass(frozen=True)
class BoundaryConditions:
    """Boundary conditions on ``[a, b]``; see the module docstring for the row layout."""

    a: float
    b: float
    rows: tuple[tuple[complex, complex, complex, complex], tuple[complex, complex, complex, complex]]

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise DegenerateRows(f"interval endpoints must satisfy a < b, got [{self.a}, {self.b}]")
        m = np.asarray(self.rows, dtype=complex)
        if m.shape != (2, 4):
            raise DegenerateRows(f"boundary matrix must be 2x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DegenerateRows("boundary matrix has non-finite entries")
        rows = tuple(tuple(complex(v) for v in r) for r in m)
        object.__setattr__(self, "rows", rows)
        for j, r in enumerate(m):
            if not np.any(r):
                raise DegenerateRows(f"row {j} is identically zero")
        if np.linalg.matrix_rank(m, tol=ZERO_TOL * np.abs(m).max()) < 2:
            raise DegenerateRows("boundary rows are linearly dependent")

    @classmethod
    def from_matrix(cls, a, b, matrix) -> "BoundaryConditions":
        return cls(float(a), float(b), tuple(tuple(r) for r in np.asarray(matrix, dtype=complex)))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=complex)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def degrees(self) -> tuple[int, int]:
        m = self.matrix
        return tuple(int(bool(m[j, 0] != 0 or m[j, 2] != 0)) for j in range(2))

    def apply(self, y_a, dy_a, y_b, dy_b) -> np.ndarray:
        """Evaluate both boundary functionals on Cauchy data at the endpoints."""
        m = self.matrix
        data = np.stack(np.broadcast_arrays(dy_a, y_a, dy_b, y_b), axis=-1)
        return data @ m.T


def dirichlet(a: float = 0.0, b: float = 1.0) -> BoundaryConditions:
    return BoundaryConditions.from_matrix(a, b, [[0, 1, 0, 0], [0, 0, 0, 1]])


def periodic(a: float = 0.0, b: float = 1.0) -> BoundaryConditions:
    return BoundaryConditions.from_matrix(a, b, [[0, 1, 0, -1], [1, 0, -1, 0]])


def antiperiodic(a: float = 0.0, b: float = 1.0) -> BoundaryConditions:
    return BoundaryConditions.from_matrix(a, b, [[0, 1, 0, 1], [1, 0, 1, 0]])


def both1(c0, f0, c1, f1, a: float = 0.0, b: float = 1.0) -> BoundaryConditions:
    """``y'(a) + c0 y(a) + f0 y(b) = 0``, ``y'(b) + c1 y(a) + f1 y(b) = 0``."""
    return BoundaryConditions.from_matrix(a, b, [[1, c0, 0, f0], [0, c1, 1, f1]])


def mixed(a0, b0, a1, b1, c1=0, f1=0, a: float = 0.0, b: float = 1.0) -> BoundaryConditions:
    """``a0 y(a) + b0 y(b) = 0``, ``a1 y'(a) + b1 y'(b) + c1 y(a) + f1 y(b) = 0``."""
    return BoundaryConditions.from_matrix(a, b, [[0, a0, 0, b0], [a1, c1, b1, f1]])


def _scale_by_largest(row: np.ndarray, idx) -> np.ndarray:
    sub = row[list(idx)]
    k = int(np.argmax(np.abs(sub)))
    return row / sub[k]


def _clean(row: np.ndarray, scale: float) -> np.ndarray:
    out = row.copy()
    out[np.abs(out) <= ZERO_TOL * scale] = 0
    return out


def _det2(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def normalize(bc: BoundaryConditions) -> BoundaryConditions:
    """Return the canonical row-equivalent system with minimal total degree.

    Dirichlet-type systems become ``y(a) = 0, y(b) = 0``; systems with two
    derivative rows become ``y'(a) + ... = 0, y'(b) + ... = 0``; mixed systems
    keep one value row (scaled so its largest entry is 1) followed by one
    derivative row (scaled so its largest derivative coefficient is 1).
    """
    m = bc.matrix
    scale = float(np.abs(m).max())
    d = m[:, [0, 2]]
    dmax = float(np.abs(d).max())
    if dmax <= ZERO_TOL * scale:
        g = m[:, [1, 3]]
        if abs(_det2(g)) <= ZERO_TOL * float(np.abs(g).max()) ** 2:
            raise DegenerateRows("value rows are linearly dependent")
        out = np.zeros((2, 4), dtype=complex)
        out[0, 1] = 1
        out[1, 3] = 1
        return BoundaryConditions.from_matrix(bc.a, bc.b, out)
    if abs(_det2(d)) > ZERO_TOL * dmax ** 2:
        out = np.linalg.solve(d, m)
        out[:, [0, 2]] = np.eye(2)
        return BoundaryConditions.from_matrix(bc.a, bc.b, _clean_rows(out))
    # rank-one derivative block: eliminate with the largest-modulus pivot
    p, k = np.unravel_index(np.argmax(np.abs(d)), d.shape)
    r = 1 - p
    value_row = m[r] - (d[r, k] / d[p, k]) * m[p]
    value_row[[0, 2]] = 0
    if np.abs(value_row).max() <= ZERO_TOL * scale:
        raise DegenerateRows("boundary rows are linearly dependent")
    value_row = _scale_by_largest(value_row, (1, 3))
    kv = 1 if abs(value_row[1]) >= abs(value_row[3]) else 3
    deriv_row = m[p] - m[p, kv] * value_row
    deriv_row[kv] = 0
    deriv_row = _scale_by_largest(deriv_row, (0, 2))
    out = np.vstack([value_row, deriv_row])
    return BoundaryConditions.from_matrix(bc.a, bc.b, _clean_rows(out))


def _clean_rows(m: np.ndarray) -> np.ndarray:
    return np.vstack([_clean(row, float(np.abs(row).max())) for row in m])


@dataclass(frozen=True)
class Canonical:
    """Leading and lower-order coefficients of a normalized system.

    ``a_j, b_j`` are the leading coefficients of row ``j`` at ``a`` and ``b``;
    ``c_j, f_j`` the coefficients of ``y(a), y(b)`` in a derivative row, in
    the rescaled variable on ``[0, 1]``.
    """

    d0: int
    d1: int
    a0: complex
    b0: complex
    a1: complex
    b1: complex
    c0: complex = 0j
    f0: complex = 0j
    c1: complex = 0j
    f1: complex = 0j


def canonical(bc: BoundaryConditions) -> Canonical:
    n = normalize(bc)
    m = n.matrix
    L = n.length
    d0, d1 = n.degrees
    if d0 == d1 == 0:
        return Canonical(0, 0, 1, 0, 0, 1)
    if d0 == d1 == 1:
        return Canonical(1, 1, 1, 0, 0, 1, c0=L * m[0, 1], f0=L * m[0, 3], c1=L * m[1, 1], f1=L * m[1, 3])
    return Canonical(0, 1, m[0, 1], m[0, 3], m[1, 0], m[1, 2], c1=L * m[1, 1], f1=L * m[1, 3])


@dataclass(frozen=True)
class BCInvariants:
    A: complex
    B: complex
    C: complex
    alpha: complex | None
    regularity: Regularity
    case: CaseTag
    d0: int
    d1: int
    sigma: int = 0
    coefficients: Canonical = field(repr=False, default=None)

    @property
    def strongly_regular(self) -> bool:
        return self.regularity is Regularity.STRONGLY_REGULAR


@dataclass(frozen=True)
class TraceCoefficients:
    A: complex
    B: complex


def _is_zero(v, scale=1.0) -> bool:
    return abs(v) <= ZERO_TOL * max(scale, 1.0)


def separation_angle(A: complex, C: complex) -> complex:
    """``alpha = i log(-C/A - sqrt((C/A)^2 - 1))`` on the principal branches."""
    r = C / A
    alpha = 1j * cmath.log(-r - cmath.sqrt(r * r - 1))
    # only the pair +-alpha (mod 2 pi) is determined and rounding in r can flip the sqrt
    # branch, so pick the representative with Re alpha in [0, pi] and Im alpha >= 0 on ties
    if alpha.real < 0:
        alpha = -alpha
    if abs(alpha.real - math.pi) <= ZERO_TOL * math.pi:
        alpha = complex(math.pi, abs(alpha.imag))
    elif abs(alpha.real) <= ZERO_TOL * math.pi:
        alpha = complex(0.0, abs(alpha.imag))
    return alpha


def classify(bc: BoundaryConditions) -> BCInvariants:
    """Compute invariants, regularity class and case tag of ``bc``."""
    k = canonical(bc)
    A = k.b1 * k.a0 + k.a1 * k.b0
    B = k.f1 * k.a0 - k.c1 * k.b0
    C = k.a1 * k.a0 + k.b1 * k.b0
    if k.d0 == k.d1 == 0:
        return BCInvariants(A, B, C, None, Regularity.STRONGLY_REGULAR, CaseTag.DIRICHLET, 0, 0, 0, k)
    if k.d0 == k.d1 == 1:
        return BCInvariants(A, B, C, None, Regularity.STRONGLY_REGULAR, CaseTag.BOTH1, 1, 1, 0, k)
    lead = max(abs(k.a0 * k.b1), abs(k.a1 * k.b0), 1.0)
    if _is_zero(A, lead):
        raise IrregularBC(f"boundary conditions are not Birkhoff regular (A = {A})")
    scale = max(abs(A), abs(C))
    for sigma in (1, -1):
        if _is_zero(C + sigma * A, scale):
            break
    else:
        sigma = 0
    if sigma == 0:
        alpha = separation_angle(A, C)
        degenerate = abs(abs(alpha.real) - math.pi) <= ZERO_TOL * math.pi
        reg = Regularity.REGULAR_NOT_STRONG if degenerate else Regularity.STRONGLY_REGULAR
        return BCInvariants(A, B, C, alpha, reg, CaseTag.SEPARATED, 0, 1, 0, k)
    # C = -sigma A: the pair structure is governed by u0 = a0 + sigma b0, u1 = a1 + sigma b1
    u0 = k.a0 + sigma * k.b0
    u1 = k.a1 + sigma * k.b1
    s0 = max(abs(k.a0), abs(k.b0))
    s1 = max(abs(k.a1), abs(k.b1))
    z0, z1 = _is_zero(u0, s0), _is_zero(u1, s1)
    bscale = max(abs(k.f1 * k.a0), abs(k.c1 * k.b0), 1.0)
    if _is_zero(B, bscale):
        tag = CaseTag.DOUBLE_NO_JORDAN if (z0 and z1) else CaseTag.JORDAN
    elif z0 and z1:
        tag = CaseTag.CLOSE_V3
    elif z0:
        tag = CaseTag.CLOSE_V1
    else:
        tag = CaseTag.CLOSE_V2
    return BCInvariants(A, B, C, None, Regularity.REGULAR_NOT_STRONG, tag, 0, 1, sigma, k)


def trace_coefficients(bc: BoundaryConditions) -> TraceCoefficients:
    inv = classify(bc)
    if inv.case is CaseTag.DIRICHLET:
        return TraceCoefficients(-0.25 + 0j, -0.25 + 0j)
    if inv.case is CaseTag.BOTH1:
        return TraceCoefficients(0.25 + 0j, 0.25 + 0j)
    k = inv.coefficients
    v = 0.25 * (k.a1 * k.b0 - k.a0 * k.b1) / (k.a1 * k.b0 + k.a0 * k.b1)
    return TraceCoefficients(complex(v), complex(-v))


def adjoint(bc: BoundaryConditions) -> BoundaryConditions:
    """Boundary conditions of the adjoint operator, normalized.

    Built from the Lagrange boundary form of ``-D^2``: ``z`` is admissible iff
    ``(z(a), -z'(a), -z(b), z'(b))`` lies in the conjugate row space of ``bc``.
    """
    n = normalize(bc)
    null = scipy.linalg.null_space(n.matrix)
    rows = np.array([[-np.conj(v[1]), np.conj(v[0]), np.conj(v[3]), -np.conj(v[2])] for v in null.T])
    return normalize(BoundaryConditions.from_matrix(bc.a, bc.b, rows))


def row_equivalent(bc1: BoundaryConditions, bc2: BoundaryConditions, tol: float = 1e-9) -> bool:
    stacked = np.vstack([bc1.matrix / np.abs(bc1.matrix).max(), bc2.matrix / np.abs(bc2.matrix).max()])
    s = np.linalg.svd(stacked, compute_uv=False)
    return bool(s[2] <= tol * s[0])
