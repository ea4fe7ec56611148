"""Green function of the unperturbed problem and contour integrals over ``|lambda| = R^2``.

The constructive Green function uses the basis ``exp(iz(x-a))``,
``exp(iz(b-x))`` with ``Im z >= 0``, both bounded on ``[a, b]``, and the free
kernel ``(i / 2z) exp(iz|x-y|)``.  On the diagonal this gives::

    G0(x, x) = i/(2z) - (X1 Ea^2 + (X2 + Y1) Ea Eb + Y2 Eb^2)

with ``Ea = exp(iz(x-a))``, ``Eb = exp(iz(b-x))`` and constants ``X, Y``
depending on ``z`` only, so integrals against a piecewise-constant density
are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bcspec
from .bcspec import BoundaryConditions, Regularity
from .errors import CircleTooClose, NearPole, UnseparableSpectrum
from .measure import SignedMeasure
from .propagator import sqrt_upper
from .spectrum import CLUSTER_TOL, Spectrum, unperturbed_spectrum

POLE_TOL = 1e-8
SEPARATION_TOL = 1e-4
# below this |lambda| the 1/z terms cancel badly; values come from a Cauchy integral instead
SMALL_LAM = 1e-2
_CAUCHY_RADIUS = 2 * SMALL_LAM
_CAUCHY_NODES = 64
TARGET_G0_SQUARED = -0.5j * math.pi


# -- constructive Green function ------------------------------------------------
def _functionals(bc: BoundaryConditions, z: np.ndarray):
    """System matrix on the bounded basis and the free-kernel coefficients ``P, Q``.

    Returns ``M`` with shape ``z.shape + (2, 2)`` and ``P, Q`` with shape
    ``z.shape + (2,)`` such that ``U_j(g(., y)) = P_j Ea(y) + Q_j Eb(y)``.
    """
    u = bcspec.normalize(bc).matrix
    al, ga, be, ph = (u[:, k][None, :] for k in range(4))
    z = z[..., None]
    E = np.exp(1j * z * bc.length)
    U1 = al * 1j * z + ga + be * 1j * z * E + ph * E
    U2 = -al * 1j * z * E + ga * E - be * 1j * z + ph
    M = np.stack([U1, U2], axis=-1)
    P = ga * (0.5j / z) + al * 0.5
    Q = ph * (0.5j / z) - be * 0.5
    return M, P, Q


def _check_pole(M: np.ndarray, exc=NearPole):
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    scale = np.abs(M[..., 0, 0] * M[..., 1, 1]) + np.abs(M[..., 0, 1] * M[..., 1, 0])
    if np.any(np.abs(det) < POLE_TOL * scale):
        raise exc("spectral parameter too close to an eigenvalue of the unperturbed problem")


def _diag_coefficients(bc: BoundaryConditions, z: np.ndarray, exc=NearPole):
    M, P, Q = _functionals(bc, z)
    _check_pole(M, exc)
    X = np.linalg.solve(M, P[..., None])[..., 0]
    Y = np.linalg.solve(M, Q[..., None])[..., 0]
    return X[..., 0], X[..., 1] + Y[..., 0], Y[..., 1]


def _cauchy_nodes():
    w = _CAUCHY_RADIUS * np.exp(2j * np.pi * np.arange(_CAUCHY_NODES) / _CAUCHY_NODES)
    return w


def green0(bc: BoundaryConditions, x, y, lam) -> np.ndarray:
    """``G0(x, y, lambda)``, the kernel of ``(L0 - lambda)^{-1}``."""
    lam = complex(lam)
    if abs(lam) < SMALL_LAM:
        w = _cauchy_nodes()
        vals = np.array([_green0(bc, x, y, wk) for wk in w])
        wt = (w / (w - lam)).reshape((-1,) + (1,) * (vals.ndim - 1))
        return np.mean(vals * wt, axis=0)
    return _green0(bc, x, y, lam)


def _green0(bc: BoundaryConditions, x, y, lam) -> np.ndarray:
    z = np.atleast_1d(sqrt_upper(lam))
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    M, P, Q = _functionals(bc, z)
    _check_pole(M)
    Mi = np.linalg.inv(M)[0]
    P, Q, z = P[0], Q[0], z[0]
    a, b = bc.a, bc.b
    ea_y = np.exp(1j * z * (y - a))
    eb_y = np.exp(1j * z * (b - y))
    c = -(Mi @ P)[:, None] * ea_y - (Mi @ Q)[:, None] * eb_y
    c = c.reshape((2,) + x.shape)
    free = 0.5j / z * np.exp(1j * z * np.abs(x - y))
    return free + c[0] * np.exp(1j * z * (x - a)) + c[1] * np.exp(1j * z * (b - x))


def green0_diagonal(bc: BoundaryConditions, x, lam, exc=NearPole) -> np.ndarray:
    """``G0(x, x, lambda)`` for arrays ``x`` (trailing) and ``lam`` (leading)."""
    lam_arr = np.asarray(lam, complex)
    small = np.abs(lam_arr) < SMALL_LAM
    if np.any(small):
        out = _green0_diagonal(bc, x, np.where(small, 1.0, lam_arr), exc)
        w = _cauchy_nodes()
        ring = _green0_diagonal(bc, x, w, exc)
        x_nd = np.ndim(x)
        for idx in zip(*np.nonzero(small)) if lam_arr.ndim else [()]:
            wt = (w / (w - lam_arr[idx])).reshape((-1,) + (1,) * x_nd)
            out[idx] = np.mean(ring * wt, axis=0)
        return out
    return _green0_diagonal(bc, x, lam, exc)


def _green0_diagonal(bc: BoundaryConditions, x, lam, exc=NearPole) -> np.ndarray:
    z = np.atleast_1d(sqrt_upper(lam))
    k1, k2, k3 = _diag_coefficients(bc, z, exc)
    x = np.asarray(x, float)
    zz = z.reshape(z.shape + (1,) * x.ndim)
    ea = np.exp(1j * zz * (x - bc.a))
    eb = np.exp(1j * zz * (bc.b - x))
    r = lambda k: k.reshape(k.shape + (1,) * x.ndim)
    out = 0.5j / zz - (r(k1) * ea * ea + r(k2) * ea * eb + r(k3) * eb * eb)
    return out.reshape(np.shape(lam) + x.shape)


def integrate_green0_diagonal(bc: BoundaryConditions, q: SignedMeasure, lam, exc=NearPole) -> np.ndarray:
    """``int G0(x, x, lambda) q(dx)`` in closed form, vectorized over ``lam``."""
    lam = np.asarray(lam, complex)
    z = np.atleast_1d(sqrt_upper(lam)).ravel()
    k1, k2, k3 = _diag_coefficients(bc, z, exc)
    a, b = bc.a, bc.b
    total = np.zeros(z.shape, complex)
    for xj, h in q.atoms:
        ea = np.exp(1j * z * (xj - a))
        eb = np.exp(1j * z * (b - xj))
        total += h * (0.5j / z - (k1 * ea * ea + k2 * ea * eb + k3 * eb * eb))
    E = np.exp(1j * z * (b - a))
    for x0, x1, v in q.pieces():
        if v == 0:
            continue
        dx = x1 - x0
        i_aa = (np.exp(2j * z * (x1 - a)) - np.exp(2j * z * (x0 - a))) / (2j * z)
        i_bb = (np.exp(2j * z * (b - x0)) - np.exp(2j * z * (b - x1))) / (2j * z)
        total += v * (0.5j / z * dx - (k1 * i_aa + k2 * E * dx + k3 * i_bb))
    return total.reshape(lam.shape)


# -- Delta determinants ------------------------------------------------------------
@dataclass
class DeltaDeterminants:
    z: complex
    delta: complex
    d11: complex
    d12: complex
    d21: complex
    d22: complex
    hat: complex
    hat11: complex
    hat12: complex
    hat21: complex
    hat22: complex

    def green_diagonal(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        z = self.z
        num = self.d11 + np.exp(-2j * z * x) * self.d12 - np.exp(2j * z * x) * self.d21 - self.d22
        return num / (2j * z * self.delta)

    def leading(self, a: float, b: float, d: int) -> dict:
        """Leading asymptotic forms of the exact determinants."""
        z = self.z
        f = (1j * z) ** d
        return {
            "delta": self.hat * np.exp(1j * z * (a - b)) * f,
            "d11": self.hat11 * f,
            "d12": self.hat12 * np.exp(1j * z * (a + b)) * f,
            "d21": self.hat21 * np.exp(-1j * z * (a + b)) * f,
            "d22": self.hat22 * np.exp(1j * z * (a - b)) * f,
        }


def delta_determinants(bc: BoundaryConditions, z: complex) -> DeltaDeterminants:
    """Exact determinants on the basis ``exp(izx), exp(-izx)`` and their leading forms."""
    z = complex(z)
    u = bcspec.normalize(bc).matrix
    a, b = bc.a, bc.b
    al, ga, be, ph = u.T

    def parts(s):
        ea, eb = np.exp(s * 1j * z * a), np.exp(s * 1j * z * b)
        return al * s * 1j * z * ea + ga * ea, be * s * 1j * z * eb + ph * eb

    A1, B1 = parts(1)
    A2, B2 = parts(-1)
    C1, C2 = A1 + B1, A2 + B2
    det = lambda c1, c2: complex(c1[0] * c2[1] - c1[1] * c2[0])
    inv = bcspec.classify(bc)
    k = inv.coefficients
    d0, d1 = inv.d0, inv.d1
    E = np.exp(1j * z * (b - a))
    s0, s1 = (-1) ** d0, (-1) ** d1
    hat = (k.a0 + k.b0 * E) * s1 * (k.a1 * E + k.b1) - (k.a1 + k.b1 * E) * s0 * (k.a0 * E + k.b0)
    hat11 = k.b0 * s1 * (k.a1 * E + k.b1) - k.b1 * s0 * (k.a0 * E + k.b0)
    hat12 = k.a0 * k.b1 - k.a1 * k.b0
    hat21 = (-1) ** (d0 + d1 + 1) * hat12
    hat22 = (k.a0 + k.b0 * E) * s1 * k.b1 - (k.a1 + k.b1 * E) * s0 * k.b0
    return DeltaDeterminants(z, det(C1, C2), det(B1, C2), det(C1, B1), -det(A2, C2), det(C1, B2),
                             complex(hat), complex(hat11), complex(hat12), complex(hat21), complex(hat22))


# -- schedule -------------------------------------------------------------------
@dataclass
class ContourSchedule:
    """Radii ``R_l`` in the ``z``-plane separating clusters of ``|lambda_N^0|^(1/2)``.

    ``inside[l]`` is the number of unperturbed eigenvalues (with multiplicity)
    in ``|lambda| < R_l^2``; ``sizes[l]`` the size of the cluster just below
    ``R_l``.
    """

    radii: np.ndarray
    margins: np.ndarray
    inside: np.ndarray
    sizes: np.ndarray

    def __len__(self) -> int:
        return len(self.radii)


def _structural_clusters(z_abs: np.ndarray, inv) -> list[list[int]]:
    n = len(z_abs)
    start = 1 if inv.sigma == 1 else 0
    groups = [[0]] if start else []
    groups += [list(range(i, min(i + 2, n))) for i in range(start, n, 2)]
    return groups


def _margin_clusters(z_abs: np.ndarray) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, r in enumerate(z_abs):
        if groups and r - z_abs[groups[-1][-1]] < CLUSTER_TOL * (1 + r):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def build_schedule(bc: BoundaryConditions, L: int, spectrum: Spectrum | None = None) -> ContourSchedule:
    """First ``L`` radii of the contour schedule for ``bc``."""
    inv = bcspec.classify(bc)
    paired = inv.regularity is Regularity.REGULAR_NOT_STRONG
    need = 2 * L + 4 if paired else L + 3
    if spectrum is None or len(spectrum) < need:
        spectrum = unperturbed_spectrum(bc, need)
    z_abs = np.abs(spectrum.z)
    groups = _structural_clusters(z_abs, inv) if paired else _margin_clusters(z_abs)
    hi = [float(np.max(z_abs[g])) for g in groups]
    lo = [float(np.min(z_abs[g])) for g in groups]
    radii, margins, inside, sizes = [], [], [], []
    if lo[0] > SEPARATION_TOL:
        # nothing near the origin: the first circle sits below the first cluster
        radii.append(0.5 * lo[0])
        margins.append(0.5 * lo[0])
        inside.append(0)
        sizes.append(0)
    for i in range(len(groups) - 1):
        if len(radii) >= L:
            break
        r = 0.5 * (hi[i] + lo[i + 1])
        m = 0.5 * (lo[i + 1] - hi[i])
        if m < SEPARATION_TOL:
            raise UnseparableSpectrum(
                f"clusters ending at N={groups[i][-1] + 1} and starting at N={groups[i + 1][0] + 1} "
                f"are {2 * m:.3g} apart")
        radii.append(r)
        margins.append(m)
        inside.append(groups[i][-1] + 1)
        sizes.append(len(groups[i]))
    if len(radii) < L:
        raise UnseparableSpectrum(f"only {len(radii)} separating radii found, {L} requested")
    return ContourSchedule(np.array(radii[:L]), np.array(margins[:L]), np.array(inside[:L]),
                           np.array(sizes[:L]))


# -- contour integrals ---------------------------------------------------------
def _contour(fn, R: float, tol: float = 1e-8, n0: int = 64, cap: int = 1 << 14) -> complex:
    """``oint_{|lambda| = R^2} fn(lambda) dlambda`` by the periodic trapezoid rule in ``z``."""
    n = n0
    prev = None
    while True:
        theta = np.pi * np.arange(n) / n
        z = R * np.exp(1j * theta)
        val = complex(np.sum(fn(z * z) * 2j * z * z) * np.pi / n)
        if prev is not None and abs(val - prev) < tol * max(1.0, abs(val)):
            return val
        if n >= cap:
            return val
        prev = val
        n *= 2


def contour_g0_squared(bc: BoundaryConditions, x: float, R: float) -> complex:
    """``oint G0(x, x, lambda)^2 dlambda`` over ``|lambda| = R^2``."""
    def f(lam):
        return green0_diagonal(bc, np.array([x]), lam, CircleTooClose)[:, 0] ** 2

    n0 = max(64, 1 << math.ceil(math.log2(max(1.0, 2 * R * bc.length))))
    return _contour(f, R, n0=min(n0, 1 << 12))


def contour_trace_term(bc: BoundaryConditions, q: SignedMeasure, R: float) -> complex:
    """``-(1/2 pi i) oint int G0(x, x, lambda) q(dx) dlambda`` over ``|lambda| = R^2``."""
    if q.is_zero:
        return 0j

    def f(lam):
        return integrate_green0_diagonal(bc, q, lam, CircleTooClose)

    n0 = max(64, 1 << math.ceil(math.log2(max(1.0, 2 * R * bc.length))))
    return -_contour(f, R, tol=1e-12, n0=min(n0, 1 << 12)) / (2j * math.pi)
