"""Exact transfer matrices for -y'' + q y = lambda y.

On a piece of constant density ``v`` and length ``dx`` the Cauchy data
``(y, y')`` evolve by::

    [[cos(mu dx),          sin(mu dx) / mu],
     [-mu sin(mu dx),      cos(mu dx)     ]],    mu^2 = lambda - v

and an atom ``h delta(x - x0)`` keeps ``y`` continuous while ``y'`` jumps by
``h y(x0)``.  All entries are even in ``mu``, so no branch of the square root
is ever chosen.  For large ``|Im mu| dx`` the matrices are returned scaled by
``exp(-|Im mu| dx)`` together with the accumulated log-scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measure import SignedMeasure

_SMALL = 0.5
# sin(w)/w and (cos w - sin(w)/w) / (2 w^2) as series in w^2
_SINC = np.array([1.0, -1 / 6, 1 / 120, -1 / 5040, 1 / 362880, -1 / 39916800, 1 / 6227020800])
_DSINC = np.array([-1 / 6, 2 / 120, -3 / 5040, 4 / 362880, -5 / 39916800, 6 / 6227020800, -7 / 1307674368000])


def sqrt_upper(lam) -> np.ndarray:
    """Square root with argument in ``[0, pi)``."""
    z = np.sqrt(np.asarray(lam, dtype=complex))
    flip = (z.imag < 0) | ((z.imag == 0) & (z.real < 0))
    return np.where(flip, -z, z)


def _poly_w2(coeffs, w2):
    out = np.zeros_like(w2)
    for c in coeffs[::-1]:
        out = out * w2 + c
    return out


@dataclass
class Transfer:
    """Scaled transfer matrix: the true matrix is ``matrix * exp(logscale)``."""

    matrix: np.ndarray
    logscale: np.ndarray
    derivative: np.ndarray | None = None

    def unscaled(self) -> np.ndarray:
        return self.matrix * np.exp(self.logscale)[..., None, None]

    def unscaled_derivative(self) -> np.ndarray:
        return self.derivative * np.exp(self.logscale)[..., None, None]


def piece_transfer(v: complex, dx: float, lam, derivative: bool = False) -> Transfer:
    lam = np.asarray(lam, dtype=complex)
    mu2 = lam - v
    mu = np.sqrt(mu2)
    w = mu * dx
    s = np.abs(w.imag)
    e1 = np.exp(1j * w - s)
    e2 = np.exp(-1j * w - s)
    c = 0.5 * (e1 + e2)
    small = np.abs(w) < _SMALL
    w2 = w * w
    safe_mu = np.where(small, 1.0, mu)
    sn = np.where(small, dx * _poly_w2(_SINC, w2) * np.exp(-s), (e1 - e2) / (2j * safe_mu))
    m = np.empty(lam.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = c
    m[..., 0, 1] = sn
    m[..., 1, 0] = -mu2 * sn
    m[..., 1, 1] = c
    dm = None
    if derivative:
        dc = -0.5 * dx * sn
        safe_mu2 = np.where(small, 1.0, mu2)
        dsn = np.where(small, dx ** 3 * _poly_w2(_DSINC, w2) * np.exp(-s), (dx * c - sn) / (2 * safe_mu2))
        dm = np.empty_like(m)
        dm[..., 0, 0] = dc
        dm[..., 0, 1] = dsn
        dm[..., 1, 0] = -sn - mu2 * dsn
        dm[..., 1, 1] = dc
    return Transfer(m, s, dm)


def piece_matrix(v: complex, dx: float, lam) -> np.ndarray:
    """Unscaled transfer matrix across a constant-density piece."""
    return piece_transfer(v, dx, lam).unscaled()


def atom_matrix(h: complex) -> np.ndarray:
    return np.array([[1, 0], [h, 1]], dtype=complex)


def segments(q: SignedMeasure, x0: float, x1: float):
    """Ordered ``('piece', v, dx)`` / ``('atom', h)`` steps from ``x0`` to ``x1``.

    Atoms at ``x0`` are excluded and atoms at ``x1`` included.
    """
    if x1 <= x0:
        return []
    atoms = dict(q.atoms)
    stops = [p for p in q.events() if x0 < p < x1] + [x1]
    out = []
    cur = x0
    for p in stops:
        if p > cur:
            out.append(("piece", complex(q.density(cur)), p - cur))
        if p in atoms:
            out.append(("atom", atoms[p]))
        cur = p
    return out


def transfer(q: SignedMeasure, lam, x0: float | None = None, x1: float | None = None,
             derivative: bool = False) -> Transfer:
    """Scaled transfer matrix (and optionally its lambda-derivative) from ``x0`` to ``x1``."""
    lam = np.asarray(lam, dtype=complex)
    x0 = q.a if x0 is None else x0
    x1 = q.b if x1 is None else x1
    m = np.broadcast_to(np.eye(2, dtype=complex), lam.shape + (2, 2)).copy()
    log = np.zeros(lam.shape)
    dm = np.zeros_like(m) if derivative else None
    for step in segments(q, x0, x1):
        if step[0] == "atom":
            a = atom_matrix(step[1])
            m = a @ m
            if derivative:
                dm = a @ dm
            continue
        t = piece_transfer(step[1], step[2], lam, derivative)
        if derivative:
            dm = t.derivative @ m + t.matrix @ dm
        m = t.matrix @ m
        log = log + t.logscale
    return Transfer(m, log, dm)


def propagate(q: SignedMeasure, lam, x0: float, x1: float, state) -> np.ndarray:
    """Cauchy data at ``x1`` of the solution with data ``state`` at ``x0``."""
    t = transfer(q, lam, x0, x1)
    return t.unscaled() @ np.asarray(state, dtype=complex)


def fundamental_values(q: SignedMeasure, lam: complex, xs) -> np.ndarray:
    """Cauchy data of the fundamental pair at the points ``xs``.

    Returns an array of shape ``xs.shape + (2, 2)`` whose column ``k`` is
    ``(u_k(x), u_k'(x))`` for ``u_1(a) = 1, u_1'(a) = 0`` and ``u_2(a) = 0,
    u_2'(a) = 1``.  Atoms located exactly at a point are already applied.
    """
    xs = np.asarray(xs, dtype=float)
    flat = xs.ravel()
    lam = complex(lam)
    events = [e for e in q.events() if e > q.a]
    # cumulative matrices at each event (right-closed)
    starts = [q.a]
    cums = [np.eye(2, dtype=complex)]
    cur = np.eye(2, dtype=complex)
    prev = q.a
    for e in events:
        cur = transfer(q, lam, prev, e).unscaled() @ cur
        starts.append(e)
        cums.append(cur)
        prev = e
    starts_arr = np.array(starts)
    idx = np.searchsorted(starts_arr, flat, side="right") - 1
    idx = np.clip(idx, 0, len(starts) - 1)
    out = np.empty(flat.shape + (2, 2), dtype=complex)
    for k in np.unique(idx):
        sel = idx == k
        base = starts[k]
        v = complex(q.density(base)) if base < q.b else complex(q.values[-1])
        dx = flat[sel] - base
        mu2 = lam - v
        mu = np.sqrt(mu2)
        w = mu * dx
        c = np.cos(w)
        small = np.abs(w) < _SMALL
        sn = np.where(small, dx * _poly_w2(_SINC, (w * w).astype(complex)),
                      np.sin(w) / np.where(mu == 0, 1.0, mu))
        pm = np.empty(dx.shape + (2, 2), dtype=complex)
        pm[..., 0, 0] = c
        pm[..., 0, 1] = sn
        pm[..., 1, 0] = -mu2 * sn
        pm[..., 1, 1] = c
        out[sel] = pm @ cums[k]
    return out.reshape(xs.shape + (2, 2))
