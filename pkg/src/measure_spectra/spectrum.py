"""Characteristic function, eigenvalues, multiplicities and eigenpairs.

For Cauchy data ``u1 = (1, 0)``, ``u2 = (0, 1)`` at ``a`` and total transfer
matrix ``M``, the determinant ``det[U_j(u_k)]`` is quadratic in the entries of
``M``; using ``det M = 1`` the quadratic part collapses to a constant, so::

    char(lambda) = k0 + k11 M11 + k12 M12 + k21 M21 + k22 M22

which is evaluated on the scaled matrix without cancellation even where the
entries of ``M`` are of size ``exp(|Im z| L)``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bcspec
from .bcspec import BoundaryConditions, CaseTag
from .errors import CircleTooClose, NormalizationBreakdown, RootLoss
from .measure import SignedMeasure, gauss_legendre
from .propagator import fundamental_values, sqrt_upper, transfer

NEWTON_TOL = 1e-10
CLUSTER_TOL = 1e-6
RANK_TOL = 1e-8
TOO_CLOSE = 1e-10


# -- characteristic function -----------------------------------------------------
def char_coefficients(bc: BoundaryConditions) -> np.ndarray:
    """``(k0, k11, k12, k21, k22)`` for the normalized rows of ``bc``."""
    return _char_coefficients(bc).copy()


@functools.lru_cache(maxsize=256)
def _normalized(bc: BoundaryConditions) -> np.ndarray:
    return bcspec.normalize(bc).matrix


@functools.lru_cache(maxsize=256)
def _char_coefficients(bc: BoundaryConditions) -> np.ndarray:
    m = _normalized(bc)
    (al0, ga0, be0, ph0), (al1, ga1, be1, ph1) = m
    return np.array([
        ga0 * al1 - al0 * ga1 + ph0 * be1 - be0 * ph1,
        al1 * ph0 - al0 * ph1,
        ga0 * ph1 - ga1 * ph0,
        al1 * be0 - al0 * be1,
        ga0 * be1 - ga1 * be0,
    ])


@dataclass
class CharValue:
    """``char = mantissa * exp(exponent)``; ``magnitude`` is the size of the summed terms."""

    mantissa: np.ndarray
    exponent: np.ndarray
    dmantissa: np.ndarray | None
    magnitude: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return self.mantissa * np.exp(self.exponent)

    @property
    def relative(self) -> np.ndarray:
        return np.abs(self.mantissa) / np.where(self.magnitude > 0, self.magnitude, 1.0)


def characteristic(bc: BoundaryConditions, q: SignedMeasure, lam, derivative: bool = False) -> CharValue:
    lam = np.asarray(lam, dtype=complex)
    k = char_coefficients(bc)
    t = transfer(q, lam, derivative=derivative)
    m = t.matrix
    damp = np.exp(-t.logscale)
    terms = [k[0] * damp, k[1] * m[..., 0, 0], k[2] * m[..., 0, 1], k[3] * m[..., 1, 0], k[4] * m[..., 1, 1]]
    mant = sum(terms)
    mag = sum(np.abs(x) for x in terms)
    dmant = None
    if derivative:
        d = t.derivative
        dmant = k[1] * d[..., 0, 0] + k[2] * d[..., 0, 1] + k[3] * d[..., 1, 0] + k[4] * d[..., 1, 1]
    return CharValue(mant, t.logscale, dmant, mag)


def boundary_matrix(bc: BoundaryConditions, q: SignedMeasure, lam: complex, derivative: bool = False):
    """``B[j, k] = U_j(u_k)`` (unscaled), optionally with ``dB/dlambda``."""
    u = _normalized(bc)
    t = transfer(q, complex(lam), derivative=derivative)
    m = t.unscaled()
    # Cauchy data of u1, u2 at a and b in the row layout (y'(a), y(a), y'(b), y(b))
    data = np.array([[0, 1, m[1, 0], m[0, 0]], [1, 0, m[1, 1], m[0, 1]]], dtype=complex)
    B = u @ data.T
    if not derivative:
        return B
    dm = t.unscaled_derivative()
    ddata = np.array([[0, 0, dm[1, 0], dm[0, 0]], [0, 0, dm[1, 1], dm[0, 1]]], dtype=complex)
    return B, u @ ddata.T


# -- counting -----------------------------------------------------------------
def _winding(values_fn: Callable[[np.ndarray], CharValue], n0: int, max_nodes: int = 1 << 22) -> int:
    n = n0
    while True:
        theta = 2 * np.pi * np.arange(n) / n
        cv = values_fn(theta)
        if np.min(cv.relative) < TOO_CLOSE:
            raise CircleTooClose("characteristic function nearly vanishes on the counting circle")
        ph = np.angle(cv.mantissa)
        dph = np.diff(np.concatenate([ph, ph[:1]]))
        dph = (dph + np.pi) % (2 * np.pi) - np.pi
        if np.max(np.abs(dph)) < np.pi / 2:
            return int(round(dph.sum() / (2 * np.pi)))
        if 2 * n > max_nodes:
            raise CircleTooClose("phase of the characteristic function could not be resolved")
        n *= 2


def count_in_disc(bc: BoundaryConditions, q: SignedMeasure, R: float) -> int:
    """Number of eigenvalues (with multiplicity) in ``|lambda| < R^2``."""
    L = bc.length
    n0 = max(256, int(8 * R * L) + 1)
    return _winding(lambda th: characteristic(bc, q, R * R * np.exp(1j * th)), n0)


def count_in_circle(bc: BoundaryConditions, q: SignedMeasure, center: complex, radius: float) -> int:
    return _winding(lambda th: characteristic(bc, q, center + radius * np.exp(1j * th)), 64)


# -- types -----------------------------------------------------------------------
@dataclass(frozen=True)
class Eigenvalue:
    lam: complex
    index: int
    multiplicity: int = 1
    jordan: bool = False

    @property
    def z(self) -> complex:
        return complex(sqrt_upper(self.lam))


@dataclass
class Spectrum:
    eigenvalues: list[Eigenvalue]
    provenance: str
    bc: BoundaryConditions = field(repr=False)
    q: SignedMeasure = field(repr=False)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __getitem__(self, i):
        return self.eigenvalues[i]

    @property
    def lam(self) -> np.ndarray:
        return np.array([e.lam for e in self.eigenvalues])

    @property
    def z(self) -> np.ndarray:
        return sqrt_upper(self.lam)


# -- Newton ----------------------------------------------------------------------
def _newton(bc, q, lam0, mult: int = 1, maxit: int = 80, polish: int = 2):
    """Vectorized Newton in ``lambda``; returns ``(roots, converged)``."""
    lam = np.array(lam0, dtype=complex).ravel()
    done = np.zeros(lam.shape, bool)
    extra = np.zeros(lam.shape, int)
    bad = np.zeros(lam.shape, bool)
    for _ in range(maxit):
        act = ~done & ~bad
        if not act.any():
            break
        cv = characteristic(bc, q, lam[act], derivative=True)
        with np.errstate(all="ignore"):
            step = mult * cv.mantissa / cv.dmantissa
        # trust region: at most one unit in z
        cap = 2 * np.abs(sqrt_upper(lam[act])) + 1
        big = np.abs(step) > cap
        with np.errstate(all="ignore"):
            step = np.where(big, step / np.abs(step) * cap, step)
        finite = np.isfinite(step)
        idx = np.flatnonzero(act)
        bad[idx[~finite]] = True
        step = np.where(finite, step, 0)
        lam[idx] -= step
        small = np.abs(step) < NEWTON_TOL * (1 + np.abs(lam[idx]))
        conv_idx = idx[small | (extra[idx] > 0)]
        extra[conv_idx] += 1
        done[idx[extra[idx] > polish]] = True
    return lam, done & ~bad


def _sort_key(lam: np.ndarray) -> np.ndarray:
    return np.lexsort((np.mod(np.angle(lam), 2 * np.pi), np.round(np.abs(lam), 9)))


# -- seeds -------------------------------------------------------------------------
def _lattice_roots(bc: BoundaryConditions) -> np.ndarray:
    """Roots ``w`` of the leading part of ``char`` for ``q = 0`` in ``w = exp(i z L)``."""
    k0, k11, k12, k21, k22 = char_coefficients(bc)
    # char * w as quadratics in w at the three orders z^1, z^0, z^-1
    levels = [
        np.array([-k21 / 2j, 0, k21 / 2j]),
        np.array([(k11 + k22) / 2, k0, (k11 + k22) / 2]),
        np.array([k12 / 2j, 0, -k12 / 2j]),
    ]
    scale = max(abs(v) for v in (k0, k11, k12, k21, k22))
    for poly in levels:
        if abs(poly[0]) > 1e-12 * scale:
            return np.roots(poly)
    raise RootLoss("characteristic function has no regular leading part")


def _lattice_seeds(bc: BoundaryConditions, kmax: int) -> np.ndarray:
    L = bc.length
    ws = _lattice_roots(bc)
    zs = []
    for w in ws:
        base = -1j * np.log(w)
        for k in range(-1, kmax + 1):
            zs.append((base + 2 * np.pi * k) / L)
    zs = np.array(zs)
    # coincident lattice points may hide a nearby pair: add split seeds
    double = abs(ws[0] - ws[1]) < 1e-6 * max(1.0, abs(ws[0]))
    if double:
        d = 1.0 / np.sqrt(1 + np.abs(zs))
        zs = np.concatenate([zs, zs + d, zs - d, zs + 1j * d, zs - 1j * d])
    return zs * zs


# -- assembly ----------------------------------------------------------------------
def _cluster(lam: np.ndarray) -> list[np.ndarray]:
    """Group roots whose ``z`` values lie within the cluster margin."""
    order = np.argsort(np.abs(lam))
    lam = lam[order]
    z = sqrt_upper(lam)
    groups: list[list[int]] = []
    for i in range(len(lam)):
        for g in groups[-8:]:
            zr = abs(z[g[0]])
            if abs(lam[i] - lam[g[0]]) < CLUSTER_TOL * (1 + zr) * (2 * zr + 1):
                g.append(i)
                break
        else:
            groups.append([i])
    return [lam[g] for g in groups]


def _split_pair(bc, q, center: complex, radius: float) -> tuple[complex, complex] | None:
    """Two roots inside a small circle from contour power sums, or ``None`` for a double root."""
    n = 64
    th = 2 * np.pi * np.arange(n) / n
    t = radius * np.exp(1j * th)
    cv = characteristic(bc, q, center + t, derivative=True)
    ratio = cv.dmantissa / cv.mantissa * t
    s1 = complex(np.mean(ratio * t))
    s2 = complex(np.mean(ratio * t * t))
    disc = np.sqrt(complex(2 * s2 - s1 * s1))
    # the discriminant of an exact double root is pure rounding noise of this size
    noise = 100 * math.sqrt(np.finfo(float).eps / max(float(np.min(cv.relative)), 1e-300)) * radius
    if abs(disc) < noise:
        return None
    t1, t2 = 0.5 * (s1 + disc), 0.5 * (s1 - disc)
    roots, ok = _newton(bc, q, [center + t1, center + t2])
    if not ok.all() or abs(roots[0] - roots[1]) < 0.5 * abs(disc):
        return None
    return complex(roots[0]), complex(roots[1])


def _distinct_roots(bc, q, roots: np.ndarray) -> list[tuple[complex, int]]:
    """Deduplicate converged roots and attach local multiplicities.

    Candidates closer than the cluster margin are counted on a small circle;
    a count of two is then either resolved into two simple roots by contour
    power sums or kept as one double root.
    """
    groups = _cluster(roots)
    centers = np.array([np.mean(g) for g in groups])
    out = []
    for i, g in enumerate(groups):
        c = centers[i]
        zc = abs(complex(sqrt_upper(c)))
        if len(g) == 1:
            out.append((complex(c), 1))
            continue
        others = np.delete(centers, i)
        gap = np.min(np.abs(others - c)) if len(others) else np.inf
        r = min(2 * (1 + zc) * 1e-4 * (1 + zc), 0.25 * gap)
        r = max(r, 10 * float(np.max(np.abs(g - c))))
        m = count_in_circle(bc, q, c, r)
        if m <= 0:
            m = 1
        if m == 2:
            pair = _split_pair(bc, q, c, r)
            if pair is not None:
                out.extend([(pair[0], 1), (pair[1], 1)])
                continue
        out.append((complex(c), m))
    return out


def _refine_double(bc, q, lam: complex, inv) -> complex:
    root, ok = _newton(bc, q, [lam], mult=2, maxit=40, polish=1)
    cand = complex(root[0]) if ok[0] else lam
    if q.is_zero and inv.case in (CaseTag.DOUBLE_NO_JORDAN, CaseTag.JORDAN):
        L = bc.length
        z = complex(sqrt_upper(cand))
        step = 2 * np.pi / L
        shift = 0.0 if inv.sigma == 1 else np.pi / L
        snapped = (round((z.real - shift) / step) * step + shift) ** 2
        cv = characteristic(bc, q, snapped)
        if float(cv.relative) < 1e-9:
            return complex(snapped)
    return cand


def _jordan_flag(bc, q, lam: complex) -> bool:
    B = boundary_matrix(bc, q, lam)
    z = abs(complex(sqrt_upper(lam)))
    Bb = B * np.array([1.0, 1 + z])[None, :]
    # entry scale from the size of the transfer entries
    t = transfer(q, complex(lam))
    scale = np.abs(t.unscaled()).max() * (1 + z) * np.abs(_normalized(bc)).max()
    return bool(np.abs(Bb).max() > RANK_TOL * scale)


def _checkpoints(z_abs: np.ndarray, upto: int) -> list[tuple[int, float]]:
    """``(n, R)`` pairs with ``R`` in a gap after the ``n``-th root."""
    n_tot = len(z_abs)
    targets = sorted({min(upto, n_tot - 1)} | {2 ** j for j in range(0, 40) if 2 ** j < upto})
    out = []
    for n in targets:
        m = n
        while m < n_tot and z_abs[m] - z_abs[m - 1] < 1e-3 * (1 + z_abs[m]):
            m += 1
        if m >= n_tot:
            continue
        out.append((m, 0.5 * (z_abs[m - 1] + z_abs[m])))
    return out


def _grid_seeds(r_lo: float, r_hi: float, height: float, L: float) -> np.ndarray:
    h = 0.5 / L
    re = np.arange(-r_hi, r_hi + h, h)
    im = np.arange(0, height + h, h)
    Z = (re[:, None] + 1j * im[None, :]).ravel()
    keep = (np.abs(Z) >= r_lo - h) & (np.abs(Z) <= r_hi + h)
    return Z[keep] ** 2


def _assemble(bc, q, roots: np.ndarray, K: int, inv, extra_seeds: Callable[[float, float], np.ndarray]):
    roots = roots[np.isfinite(roots)]
    for _ in range(4):
        distinct = _distinct_roots(bc, q, roots)
        lam = []
        mult = []
        for c, m in distinct:
            if m >= 2:
                c = _refine_double(bc, q, c, inv)
            lam.extend([c] * m)
            mult.extend([m] * m)
        lam = np.array(lam)
        mult = np.array(mult)
        order = _sort_key(lam)
        lam, mult = lam[order], mult[order]
        z_abs = np.abs(sqrt_upper(lam))
        failed = None
        prev_R = 0.0
        for n, R in _checkpoints(z_abs, K):
            c = count_in_disc(bc, q, R)
            if c != n:
                failed = (prev_R, R, c, n)
                break
            prev_R = R
        if failed is None:
            if len(lam) < K:
                raise RootLoss(f"only {len(lam)} eigenvalues located, {K} requested")
            return lam[:K], mult[:K]
        r_lo, r_hi, c, n = failed
        height = 4.0 + float(np.max(np.abs(sqrt_upper(lam).imag), initial=0.0))
        new, ok = _newton(bc, q, extra_seeds(r_lo, r_hi) if extra_seeds else _grid_seeds(r_lo, r_hi, height, bc.length))
        roots = np.concatenate([lam, new[ok]])
    raise RootLoss(f"argument principle finds {c} eigenvalues below R={r_hi:.6g}, located {n}")


def _build(bc, q, lam, mult, provenance) -> Spectrum:
    lam = np.array(lam, dtype=complex)
    # rounding-level imaginary parts would flip z across the branch cut
    tiny = np.abs(lam.imag) <= 1e-13 * (1 + np.abs(lam))
    lam[tiny] = lam[tiny].real
    evs = []
    i = 0
    while i < len(lam):
        m = int(mult[i])
        jordan = m >= 2 and _jordan_flag(bc, q, lam[i])
        for j in range(m):
            if i + j < len(lam):
                evs.append(Eigenvalue(complex(lam[i + j]), i + j + 1, m, jordan))
        i += m
    return Spectrum(evs, provenance, bc, q)


def unperturbed_spectrum(bc: BoundaryConditions, K: int) -> Spectrum:
    """First ``K`` eigenvalues of ``-y''`` with boundary conditions ``bc``."""
    inv = bcspec.classify(bc)
    q = SignedMeasure.zero(bc.a, bc.b)
    seeds = _lattice_seeds(bc, K // 2 + 4)
    roots, ok = _newton(bc, q, seeds)
    lam, mult = _assemble(bc, q, roots[ok], K, inv, None)
    return _build(bc, q, lam, mult, "unperturbed")


def _homotopy(bc, q, lam0: np.ndarray, steps: int = 4) -> tuple[np.ndarray, np.ndarray]:
    lam = lam0.copy()
    ok = np.ones(lam.shape, bool)
    for t in np.linspace(0, 1, steps + 1)[1:]:
        lam, ok_t = _newton(bc, q.scaled(t), lam)
        ok &= ok_t
    return lam, ok


def perturbed_spectrum(bc: BoundaryConditions, q: SignedMeasure, K: int) -> Spectrum:
    """First ``K`` eigenvalues of ``-y'' + q y`` with boundary conditions ``bc``."""
    inv = bcspec.classify(bc)
    if q.is_zero:
        return unperturbed_spectrum(bc, K)
    base = unperturbed_spectrum(bc, K + 8)
    seeds = base.lam
    mult = np.array([e.multiplicity for e in base.eigenvalues])
    z = sqrt_upper(seeds)
    d = 1.0 / np.sqrt(1 + np.abs(z))
    dbl = mult >= 2
    if inv.regularity is bcspec.Regularity.REGULAR_NOT_STRONG:
        # close pairs may leave the real axis as conjugate pairs
        dbl = np.ones_like(dbl)
    split = np.concatenate([((z + d) ** 2)[dbl], ((z - d) ** 2)[dbl], ((z + 1j * d) ** 2)[dbl],
                            ((z - 1j * d) ** 2)[dbl]])
    seeds = np.concatenate([seeds, split])
    roots, ok = _newton(bc, q, seeds)
    if not ok.all():
        r2, ok2 = _homotopy(bc, q, seeds[~ok])
        roots = np.concatenate([roots[ok], r2[ok2]])
    else:
        roots = roots[ok]
    lam, mult = _assemble(bc, q, roots, K, inv, None)
    return _build(bc, q, lam, mult, "perturbed")


def spectrum(bc: BoundaryConditions, q: SignedMeasure | None, K: int) -> Spectrum:
    if q is None or q.is_zero:
        return unperturbed_spectrum(bc, K)
    return perturbed_spectrum(bc, q, K)


# -- eigenfunctions ----------------------------------------------------------------
def _quad_nodes(q: SignedMeasure, z: complex, per: int = 16) -> tuple[np.ndarray, np.ndarray]:
    t, w = gauss_legendre(per)
    freq = abs(z.real) + abs(z.imag) + 1
    xs, ws = [], []
    for x0, x1 in zip(q.events()[:-1], q.events()[1:]):
        m = max(1, math.ceil((x1 - x0) * freq / math.pi))
        e = np.linspace(x0, x1, m + 1)
        half = 0.5 * np.diff(e)
        mid = 0.5 * (e[1:] + e[:-1])
        xs.append((mid[:, None] + half[:, None] * t).ravel())
        ws.append((half[:, None] * w).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _null_vectors(B: np.ndarray, semisimple: bool) -> np.ndarray:
    if semisimple:
        return np.eye(2, dtype=complex)
    _, _, vh = np.linalg.svd(B)
    return vh[-1:].conj()


def _fd_lambda(fn, lam: complex, h: float):
    """Fourth-order derivative in ``lambda`` of an analytic function."""
    return (fn(lam + h) - fn(lam - h) - 1j * fn(lam + 1j * h) + 1j * fn(lam - 1j * h)) / (4 * h)


@dataclass
class EigenPair:
    """Eigenfunctions ``y`` and adjoint eigenfunctions ``z`` of one eigenvalue.

    ``ys[i]`` and ``zs[i]`` are callables of ``x``.  For a semi-simple double
    eigenvalue both members are listed and ``<ys[i], zs[j]> = delta_ij``.  For
    a Jordan block ``ys = [y, yhat]`` and ``zs = [z, zhat]`` with
    ``<y, zhat> = <yhat, z> = 1`` and ``<y, z> = <yhat, zhat> = 0``.
    """

    lam: complex
    ys: list
    zs: list
    jordan: bool = False

    def diagonal(self, x) -> np.ndarray:
        """Diagonal of the Riesz projector kernel at ``x``."""
        if self.jordan:
            y, yh = self.ys
            z, zh = self.zs
            return y(x) * np.conj(zh(x)) + yh(x) * np.conj(z(x))
        return sum(y(x) * np.conj(z(x)) for y, z in zip(self.ys, self.zs))


def _eigenfunctions(bc, q, lam: complex, semisimple: bool):
    B = boundary_matrix(bc, q, lam)
    V = _null_vectors(B, semisimple)

    def make(v):
        return lambda x: fundamental_values(q, lam, np.asarray(x, float))[..., 0, :] @ v

    return [make(v) for v in V], B, V


def _adjoined(bc, q, lam: complex, v: np.ndarray):
    """``yhat`` with ``(L - lambda) yhat = y`` and ``yhat`` satisfying ``bc``."""
    h = 1e-3 * (1 + abs(lam)) ** 0.5
    B, dB = boundary_matrix(bc, q, lam, derivative=True)
    w, *_ = np.linalg.lstsq(B, -dB @ v, rcond=None)

    def yhat(x):
        x = np.asarray(x, float)
        part = _fd_lambda(lambda l: fundamental_values(q, l, x)[..., 0, :] @ v, lam, h)
        return part + fundamental_values(q, lam, x)[..., 0, :] @ w

    return yhat


def eigenpair(bc: BoundaryConditions, q: SignedMeasure, ev: Eigenvalue) -> EigenPair:
    lam = complex(ev.lam)
    adj = bcspec.adjoint(bc)
    qa = q.conjugate()
    xs, ws = _quad_nodes(q, complex(sqrt_upper(lam)))

    def inner(f, g):
        return complex(np.sum(ws * f(xs) * np.conj(g(xs))))

    if ev.multiplicity >= 2 and ev.jordan:
        ys, _, V = _eigenfunctions(bc, q, lam, False)
        zs, _, W = _eigenfunctions(adj, qa, lam.conjugate(), False)
        y, z = ys[0], zs[0]
        yh = _adjoined(bc, q, lam, V[0])
        zh = _adjoined(adj, qa, lam.conjugate(), W[0])
        g = inner(yh, z)
        if abs(g) < 1e-12 * math.sqrt(abs(inner(yh, yh) * inner(z, z))):
            raise NormalizationBreakdown("Jordan chain is degenerate")
        y1 = lambda x, y=y, g=g: y(x) / g
        yh1 = lambda x, yh=yh, g=g: yh(x) / g
        c = inner(yh1, zh)
        yh2 = lambda x, yh1=yh1, y1=y1, c=c: yh1(x) - c * y1(x)
        return EigenPair(lam, [y1, yh2], [z, zh], True)

    semisimple = ev.multiplicity >= 2
    ys, _, _ = _eigenfunctions(bc, q, lam, semisimple)
    zs, _, _ = _eigenfunctions(adj, qa, lam.conjugate(), semisimple)
    ynorm = [math.sqrt(inner(y, y).real) for y in ys]
    ys = [lambda x, y=y, s=s: y(x) / s for y, s in zip(ys, ynorm)]
    G = np.array([[inner(y, z) for z in zs] for y in ys])
    znorm = [math.sqrt(inner(z, z).real) for z in zs]
    if abs(np.linalg.det(G)) < 1e-10 * float(np.prod(znorm)):
        raise NormalizationBreakdown(f"<y, z> vanishes at lambda={lam:.6g}: missed Jordan structure")
    C = np.conj(np.linalg.inv(G))
    zs_new = [lambda x, j=j: sum(C[k, j] * zs[k](x) for k in range(len(zs))) for j in range(len(zs))]
    return EigenPair(lam, ys, zs_new, False)


def eigenpairs(spec: Spectrum) -> list[EigenPair]:
    """One :class:`EigenPair` per distinct eigenvalue of ``spec``."""
    out = []
    i = 0
    evs = spec.eigenvalues
    while i < len(evs):
        out.append(eigenpair(spec.bc, spec.q, evs[i]))
        i += max(1, evs[i].multiplicity)
    return out


def projector_sum(spec: Spectrum, mu: SignedMeasure, R: float) -> complex:
    """``sum over |lambda| < R^2`` of ``int P_N(x, x) mu(dx)``."""
    total = 0j
    for pair in eigenpairs(spec):
        if abs(pair.lam) < R * R:
            z = complex(sqrt_upper(pair.lam))
            total += mu.integrate_against(pair.diagonal, frequency=2 * (abs(z) + 1))
    return total
