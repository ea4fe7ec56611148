"""Closed-form large-``N`` expansions for the unperturbed problem on ``[0, 1]``.

Everything here is written for the unit interval with the normalized
coefficients of :func:`bcspec.canonical`; for ``[a, b]`` the square roots of
eigenvalues scale by ``1 / (b - a)``.

Cases that are conjugate to a tabulated one (``CloseV2`` and the Jordan
variant with ``a0 + b0 = 0``) are reduced to it through the adjoint problem:
eigenvalues and normalized eigenfunction products of the adjoint problem are
the complex conjugates of the original ones.  Paired cases with
``C = A`` (``sigma = -1``) use the same formulas with ``N`` replaced by
``N - 1/2``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bcspec
from .bcspec import BoundaryConditions, CaseTag
from .errors import SingularAlpha, WrongCase

PI = math.pi


@dataclass(frozen=True)
class RowParams:
    """Normalized coefficients of a mixed (``d0 = 0, d1 = 1``) or ``d0 = d1 = 1`` system."""

    a0: complex = 1
    b0: complex = 0
    a1: complex = 0
    b1: complex = 1
    c0: complex = 0
    f0: complex = 0
    c1: complex = 0
    f1: complex = 0

    @property
    def A(self) -> complex:
        return self.b1 * self.a0 + self.a1 * self.b0

    @property
    def B(self) -> complex:
        return self.f1 * self.a0 - self.c1 * self.b0

    @property
    def C(self) -> complex:
        return self.a1 * self.a0 + self.b1 * self.b0

    @property
    def alpha(self) -> complex:
        return bcspec.separation_angle(self.A, self.C)


@dataclass(frozen=True)
class Expansion:
    """Truncated expansion ``value`` with error ``O(N^-order)``."""

    value: complex
    order: int


def params_from_bc(bc: BoundaryConditions) -> RowParams:
    k = bcspec.canonical(bc)
    return RowParams(k.a0, k.b0, k.a1, k.b1, k.c0, k.f0, k.c1, k.f1)


def _b_over(p: RowParams, d: complex) -> complex:
    """``B / d``, taken as 0 when ``B`` vanishes (the correction term is absent)."""
    return 0j if p.B == 0 else p.B / d


def _shifted(N: float, sigma: int) -> float:
    return N if sigma >= 0 else N - 0.5


# -- eigenvalues -----------------------------------------------------------------
def rho_both1(p: RowParams, N: int) -> Expansion:
    """``rho_{N+1}`` for ``d0 = d1 = 1``."""
    if N == 0:
        raise WrongCase("expansion needs N >= 1")
    v = PI * N + (p.f1 - p.c0) / (PI * N) + (-1) ** N * (p.c1 - p.f0) / (PI * N)
    return Expansion(complex(v), 2)


def rho_close_v1(p: RowParams, N: float) -> Expansion:
    """``rho_N^-`` when ``a0 + b0 = 0``, ``a1 + b1 != 0``."""
    A, B = p.A, p.B
    v = 2 * PI * N + B / (PI * N * A) - (6 * A * B ** 2 + B ** 3) / (12 * A ** 3 * N ** 3 * PI ** 3)
    return Expansion(complex(v), 4)


def _c1_effective(p: RowParams, sigma: int) -> complex:
    """``c1`` of the reduced form ``y(0) = sigma y(1)``, ``y'(0) - sigma y'(1) + c1 y(0) = 0``."""
    return sigma * p.B / (p.a0 * p.a1)


def rho_close_v3(p: RowParams, N: float, sigma: int = 1) -> Expansion:
    """``rho_N^-`` when ``a0 + b0 = 0``, ``a1 + b1 = 0``."""
    c1 = _c1_effective(p, sigma)
    v = (2 * PI * N - c1 / (2 * PI * N) + (c1 ** 3 - 12 * c1 ** 2) / (96 * PI ** 3 * N ** 3)
         + (c1 ** 4 - 6 * c1 ** 3) / (96 * PI ** 5 * N ** 5))
    return Expansion(complex(v), 6)


def rho_separated(p: RowParams, N: int, branch: int) -> Expansion:
    v = 2 * PI * N + branch * p.alpha + p.B / (2 * PI * N * p.A)
    return Expansion(complex(v), 2)


def rho_expansion(bc: BoundaryConditions, N: int, branch: int = -1) -> Expansion:
    """Expansion of a square root of an eigenvalue, on ``[0, 1]`` scale.

    ``branch`` selects ``rho_N^+`` (``+1``) or ``rho_N^-`` (``-1``) in the
    paired and separated cases; for ``d0 = d1 = 1`` the result is ``rho_{N+1}``.
    """
    inv = bcspec.classify(bc)
    p = params_from_bc(bc)
    case = inv.case
    if case is CaseTag.DIRICHLET:
        return Expansion(complex(PI * N), 99)
    if case is CaseTag.BOTH1:
        return rho_both1(p, N)
    if case is CaseTag.SEPARATED:
        if branch not in (1, -1):
            raise WrongCase("separated case needs branch = +1 or -1")
        return rho_separated(p, N, branch)
    n = _shifted(N, inv.sigma)
    if case in (CaseTag.DOUBLE_NO_JORDAN, CaseTag.JORDAN) or branch == 1:
        return Expansion(complex(2 * PI * n), 99)
    if case is CaseTag.CLOSE_V1:
        return rho_close_v1(p, n)
    if case is CaseTag.CLOSE_V3:
        return rho_close_v3(p, n, inv.sigma)
    if case is CaseTag.CLOSE_V2:
        e = rho_expansion(bcspec.adjoint(bc), N, branch)
        return Expansion(e.value.conjugate(), e.order)
    raise WrongCase(f"no expansion for case {case.value}")


# -- V, W functions ------------------------------------------------------------
def r1(x, alpha, p: RowParams):
    a0, b0, a1, A = p.a0, p.b0, p.a1, p.A
    d = a0 ** 2 - b0 ** 2
    return (a0 * b0 * (3 * A * b0 + a1 * d * (1 + 2 * x))
            + 2 * (a0 ** 2 + b0 ** 2) * (A * b0 + a1 * d * x) * np.cos(alpha)
            + a0 * b0 * (A * b0 + a1 * d * (2 * x - 1)) * np.cos(2 * alpha))


def r2(x, alpha, p: RowParams):
    a0, b0, a1, A = p.a0, p.b0, p.a1, p.A
    d = a0 ** 2 - b0 ** 2
    return (4 * A * a0 ** 2 * b0 + 2 * a1 * (a0 ** 4 - b0 ** 4) * (1 - x)
            + a0 * (A * (2 * a0 ** 2 + 5 * b0 ** 2) + a1 * b0 * d * (5 - 2 * x)) * np.cos(alpha)
            + 2 * (a0 ** 2 + b0 ** 2) * (A * b0 + a1 * d * x) * np.cos(2 * alpha)
            + a0 * b0 * (A * b0 + a1 * d * (2 * x - 1)) * np.cos(3 * alpha))


def vw(x, alpha, p: RowParams):
    """``(V0, V1, W0, W1)`` at ``(x, alpha)``."""
    x = np.asarray(x, dtype=float)
    alpha = complex(alpha)
    s = cmath.sin(alpha)
    if abs(s) < 1e-10:
        raise SingularAlpha(f"sin(alpha) = {s:.3g} is too small")
    a0, b0 = p.a0, p.b0
    d = a0 ** 2 - b0 ** 2
    if d == 0:
        raise WrongCase("V and W need a0 != +-b0")
    amp = (a0 ** 2 + b0 ** 2 + 2 * a0 * b0 * cmath.cos(alpha)) / (d * s)
    v0 = np.sin(alpha * (2 * x - 1)) * amp
    v1 = np.cos(alpha * (2 * x - 1)) * amp
    R1, R2 = r1(x, alpha, p), r2(x, alpha, p)
    den = 4 * p.A * p.a1 * d ** 2 * PI * s ** 2
    w0 = p.B * (2 * R1 * s * np.cos(2 * alpha * x) - R2 * np.sin(2 * alpha * x)) / den
    w1 = -p.B * (2 * R1 * s * np.sin(2 * alpha * x) + R2 * np.cos(2 * alpha * x)) / den
    return v0, v1, w0, w1


def w1_numerator(x, alpha, p: RowParams) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the factorization of ``2 R1 sin(alpha) sin(2 alpha x) + R2 cos(2 alpha x)``.

    The identity needs ``A cos(alpha) + C = 0``.
    """
    x = np.asarray(x, dtype=float)
    a0, b0, a1, b1, A = p.a0, p.b0, p.a1, p.b1, p.A
    d = a0 ** 2 - b0 ** 2
    s = np.sin
    lhs = 2 * r1(x, alpha, p) * s(alpha) * s(2 * alpha * x) + r2(x, alpha, p) * np.cos(2 * alpha * x)
    inner = ((a0 * a1 * b0 * d * (2 * x - 1) + a0 * b0 ** 2 * A) * s(alpha * (2.5 - x))
             + (2 * a1 * (a0 ** 4 - b0 ** 4) * x + 2 * b0 * (a0 ** 2 + b0 ** 2) * A) * s(alpha * (1.5 - x))
             - (5 * a0 ** 3 * a1 * b0 + a0 * a1 * b0 ** 3 + a0 ** 4 * b1 + 5 * a0 ** 2 * b0 ** 2 * b1)
             * s(alpha * (x - 0.5))
             - (2 * a1 * (a0 ** 4 - b0 ** 4) * (1 - x) + 4 * a0 ** 2 * b0 * A) * s(alpha * (0.5 + x))
             + (a0 * a1 * b0 * d * (2 * x - 1) - a0 ** 3 * A) * s(alpha * (1.5 + x)))
    return lhs, 2 * s(alpha * (x - 0.5)) * inner


# -- normalized eigenfunction products ----------------------------------------
def product_expansion(bc: BoundaryConditions, N: int, x, branch: int | None = None) -> Expansion:
    """Normalized product ``y z-bar`` at ``x`` in ``[0, 1]``.

    Paired cases return the pair sum ``y_2N z_2N-bar + y_2N+1 z_2N+1-bar``
    (with adjoined functions for Jordan blocks).  In the separated case a
    single member is returned when ``branch`` is ``+1`` or ``-1``.  For
    ``d0 = d1 = 1`` the result belongs to index ``N + 1``.
    """
    x = np.asarray(x, dtype=float)
    inv = bcspec.classify(bc)
    p = params_from_bc(bc)
    case = inv.case
    if case is CaseTag.DIRICHLET:
        return Expansion(1 - np.cos(2 * PI * N * x), 99)
    if case is CaseTag.BOTH1:
        s = np.sin(2 * PI * N * x)
        v = (1 + np.cos(2 * PI * N * x) - 2 * s / (PI * N) * (p.c0 * (1 - x) + p.f1 * x)
             + (-1) ** N * s / (PI * N) * (p.c1 - p.f0) * (1 - 2 * x))
        return Expansion(v, 2)
    if case is CaseTag.SEPARATED:
        v0, v1, w0, w1 = vw(x, p.alpha, p)
        c, s = np.cos(4 * PI * N * x), np.sin(4 * PI * N * x)
        if branch is None:
            return Expansion(2 + 2 * c * v0 + 2 / N * s * w1, 2)
        if branch == -1:
            v0, v1, w0, w1 = vw(x, -p.alpha, p)
        return Expansion(1 + c * v0 + s * v1 + c * w0 / N + s * w1 / N, 2)
    n = _shifted(N, inv.sigma)
    c, s = np.cos(4 * PI * n * x), np.sin(4 * PI * n * x)
    if case is CaseTag.DOUBLE_NO_JORDAN:
        return Expansion(np.full(x.shape, 2.0 + 0j), 99)
    u0 = p.a0 + inv.sigma * p.b0
    if case is CaseTag.JORDAN:
        if abs(u0) <= 1e-12 * max(abs(p.a0), abs(p.b0)):
            e = product_expansion(bcspec.adjoint(bc), N, x)
            return Expansion(np.conj(e.value), e.order)
        k = (p.a0 + inv.sigma * p.b0) / (p.a0 - inv.sigma * p.b0)
        return Expansion(2 + 2 * c * k * (2 * x - 1), 99)
    if case is CaseTag.CLOSE_V1:
        a1, b1 = p.a1, inv.sigma * p.b1
        cf = inv.sigma * p.B / p.a0
        v = (2 + 2 * c * (a1 + b1) * (1 - 2 * x) / (a1 - b1)
             + 2 * s * cf * (1 - 2 * x) * (b1 * x - a1 * (1 - x)) / ((a1 - b1) ** 2 * PI * n))
        return Expansion(v, 2)
    if case is CaseTag.CLOSE_V3:
        c1 = _c1_effective(p, inv.sigma)
        return Expansion(2 + s * c1 * (2 * x - 1) / (2 * PI * n), 2)
    if case is CaseTag.CLOSE_V2:
        e = product_expansion(bcspec.adjoint(bc), N, x)
        return Expansion(np.conj(e.value), e.order)
    raise WrongCase(f"no product expansion for case {case.value}")


# -- displayed eigenfunctions and scalar products -----------------------------------
def eigenfunction_forms(bc: BoundaryConditions, N: int, branch: int = -1,
                        rho: complex | None = None) -> tuple[Callable, Callable]:
    """Displayed ``(y, z-bar)`` with unit constants, evaluated at ``rho``.

    ``rho`` defaults to :func:`rho_expansion`.  Supported for ``d0 = d1 = 1``
    (index ``N + 1``), the ``sigma = +1`` paired variants with ``a0 + b0 = 0``
    and the separated case.
    """
    inv = bcspec.classify(bc)
    p = params_from_bc(bc)
    case = inv.case
    r = complex(rho) if rho is not None else rho_expansion(bc, N, branch).value
    sin, cos = np.sin, np.cos
    if case is CaseTag.BOTH1:
        y = lambda x: cos(r * x) - p.c0 * sin(r * x) / r + p.f0 * sin(r * (1 - x)) / r
        zb = lambda x: cos(r * x) - p.c0 * sin(r * x) / r - p.c1 * sin(r * (1 - x)) / r
        return y, zb
    if case is CaseTag.SEPARATED:
        y = lambda x: p.a0 * sin(r * x) - p.b0 * sin(r * (1 - x))
        k = _b_over(p, p.a1)
        zb = lambda x: p.b0 * cos(r * x) + p.a0 * cos(r * (1 - x)) + k * sin(r * x) / r
        return y, zb
    if inv.sigma != 1:
        raise WrongCase("displayed eigenfunctions are tabulated for C = -A only")
    # the displays use the value row y(0) - y(1) = 0
    a1, b1, c1, f1 = (v / p.a0 for v in (p.a1, p.b1, p.c1, p.f1))
    if case is CaseTag.CLOSE_V1:
        if branch == 1:
            y = lambda x: (a1 + b1) * cos(r * x) - (c1 + f1) * sin(r * x) / r
            zb = lambda x: sin(r * x)
        else:
            y = lambda x: a1 * cos(r * x) + b1 * cos(r * (1 - x)) - c1 * sin(r * x) / r + f1 * sin(r * (1 - x)) / r
            zb = lambda x: b1 * sin(r * x) - a1 * sin(r * (1 - x))
        return y, zb
    if case is CaseTag.CLOSE_V3:
        if branch == 1:
            return (lambda x: sin(r * x)), (lambda x: sin(r * x))
        f = lambda x: sin(r * x) + sin(r * (1 - x))
        return f, f
    raise WrongCase(f"no displayed eigenfunctions for case {case.value}")


def scalar_product_expansion(bc: BoundaryConditions, N: int, branch: int = -1, c1c2: complex = 1) -> Expansion:
    """Displayed truncation of ``<y, z>`` for the forms of :func:`eigenfunction_forms`.

    For Jordan blocks the common value ``<y_2N, zhat_2N+1> = <yhat_2N+1, z_2N>``.
    """
    inv = bcspec.classify(bc)
    p = params_from_bc(bc)
    case = inv.case
    if case is CaseTag.BOTH1:
        return Expansion(c1c2 / 2, 2)
    if case is CaseTag.SEPARATED:
        al, A = p.alpha, p.A
        d = p.a0 ** 2 - p.b0 ** 2
        v = (branch * cmath.sin(al) * d / 2
             + _b_over(p, p.a1) * (A * p.a0 + (A * p.b0 + p.a1 * d) * cmath.cos(al)) / (4 * PI * A * N))
        return Expansion(c1c2 * v, 2)
    if inv.sigma != 1:
        raise WrongCase("displayed scalar products are tabulated for C = -A only")
    if case is CaseTag.JORDAN:
        return Expansion(c1c2 * (p.a0 - p.b0) / (16 * PI * N * (p.a0 + p.b0)), 99)
    a1, b1, c1, f1 = (v / p.a0 for v in (p.a1, p.b1, p.c1, p.f1))
    if case is CaseTag.CLOSE_V1:
        if branch == 1:
            return Expansion(-c1c2 * (c1 + f1) / (4 * PI * N), 3)
        v = ((c1 + f1) * (a1 + b1) / (4 * PI * N)
             - (c1 + f1) ** 2 * (a1 * f1 + c1 * b1) / (8 * (a1 - b1) ** 2 * PI ** 3 * N ** 3))
        return Expansion(c1c2 * v, 4)
    if case is CaseTag.CLOSE_V3:
        if branch == 1:
            return Expansion(c1c2 / 2, 99)
        c = _c1_effective(p, 1)
        return Expansion(c1c2 * (c ** 2 / (8 * PI ** 2 * N ** 2) - (c ** 4 - 4 * c ** 3) / (128 * PI ** 4 * N ** 4)), 6)
    raise WrongCase(f"no scalar product expansion for case {case.value}")
