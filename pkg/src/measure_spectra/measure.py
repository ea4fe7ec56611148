"""Finite complex measures on [a, b]: atoms plus a piecewise-constant density."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import EndpointAtom, ValidationError


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class SignedMeasure:
    """``q = density dx + sum_j h_j delta(x - x_j)`` on ``[a, b]``.

    ``breakpoints`` always cover the whole interval (``breakpoints[0] == a``,
    ``breakpoints[-1] == b``) and ``values[i]`` is the density on
    ``[breakpoints[i], breakpoints[i+1])``.  Use :meth:`create` to build one
    from partial data.
    """

    a: float
    b: float
    atoms: tuple[tuple[float, complex], ...]
    breakpoints: tuple[float, ...]
    values: tuple[complex, ...]

    @classmethod
    def create(cls, a: float, b: float, atoms: Iterable = (), breakpoints: Iterable = (),
               values: Iterable = ()) -> "SignedMeasure":
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValidationError(f"invalid interval [{a}, {b}]")
        merged: dict[float, complex] = {}
        for x, h in atoms:
            x = float(x)
            if not (a <= x <= b) or not math.isfinite(x):
                raise ValidationError(f"atom at {x} lies outside [{a}, {b}]")
            h = complex(h)
            if not (math.isfinite(h.real) and math.isfinite(h.imag)):
                raise ValidationError(f"atom weight at {x} is not finite")
            merged[x] = merged.get(x, 0j) + h
        atom_list = tuple(sorted((x, h) for x, h in merged.items() if h != 0))

        bps = [float(t) for t in breakpoints]
        vals = [complex(v) for v in values]
        if bps or vals:
            if len(vals) != len(bps) - 1:
                raise ValidationError("density needs exactly one value per breakpoint interval")
            if any(t1 <= t0 for t0, t1 in zip(bps, bps[1:])):
                raise ValidationError("density breakpoints must be strictly increasing")
            if bps[0] < a or bps[-1] > b:
                raise ValidationError(f"density breakpoints must lie within [{a}, {b}]")
            if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
                raise ValidationError("density values must be finite")
            if bps[0] > a:
                bps.insert(0, a)
                vals.insert(0, 0j)
            if bps[-1] < b:
                bps.append(b)
                vals.append(0j)
        else:
            bps, vals = [a, b], [0j]
        return cls(a, b, atom_list, tuple(bps), tuple(vals))

    @classmethod
    def zero(cls, a: float = 0.0, b: float = 1.0) -> "SignedMeasure":
        return cls.create(a, b)

    @classmethod
    def delta(cls, x0: float, h: complex = 1.0, a: float = 0.0, b: float = 1.0) -> "SignedMeasure":
        return cls.create(a, b, atoms=[(x0, h)])

    # -- structure -----------------------------------------------------------
    def pieces(self) -> Iterator[tuple[float, float, complex]]:
        for x0, x1, v in zip(self.breakpoints, self.breakpoints[1:], self.values):
            yield x0, x1, v

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def atom_positions(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms], dtype=float)

    @property
    def atom_weights(self) -> np.ndarray:
        return np.array([h for _, h in self.atoms], dtype=complex)

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not any(self.values)

    def events(self) -> list[float]:
        """Sorted positions where the propagator has to stop (breakpoints and atoms)."""
        return sorted(set(self.breakpoints) | {x for x, _ in self.atoms})

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        if (self.a, self.b) != (other.a, other.b):
            raise ValidationError("measures live on different intervals")
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        mids = 0.5 * (np.array(bps[:-1]) + np.array(bps[1:]))
        vals = self.density(mids) + other.density(mids)
        return SignedMeasure.create(self.a, self.b, list(self.atoms) + list(other.atoms), bps, vals)

    def scaled(self, t: complex) -> "SignedMeasure":
        return SignedMeasure.create(self.a, self.b, [(x, t * h) for x, h in self.atoms],
                                    self.breakpoints, [t * v for v in self.values])

    def conjugate(self) -> "SignedMeasure":
        return SignedMeasure.create(self.a, self.b, [(x, complex(h).conjugate()) for x, h in self.atoms],
                                    self.breakpoints, [complex(v).conjugate() for v in self.values])

    def __mul__(self, t: complex) -> "SignedMeasure":
        return self.scaled(t)

    __rmul__ = __mul__

    # -- scalar functionals --------------------------------------------------
    def density(self, x) -> np.ndarray:
        """Right-continuous density value at ``x`` (left limit at ``b``)."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values, dtype=complex)[idx]

    @property
    def total_mass(self) -> complex:
        return complex(sum(h for _, h in self.atoms) + sum(v * (x1 - x0) for x0, x1, v in self.pieces()))

    def total_variation(self) -> float:
        return float(sum(abs(h) for _, h in self.atoms) + sum(abs(v) * (x1 - x0) for x0, x1, v in self.pieces()))

    def distribution(self, x, left: bool = False) -> np.ndarray:
        """``Q(x) = q([a, x])``; with ``left=True`` the left limit ``Q(x-)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(x.shape, dtype=complex)
        for x0, x1, v in self.pieces():
            out += v * (np.clip(x, x0, x1) - x0)
        for xj, h in self.atoms:
            out += h * ((x > xj) if left else (x >= xj))
        return out

    def zero_mean_adjust(self) -> "SignedMeasure":
        m = self.total_mass
        if m == 0:
            return self
        return SignedMeasure.create(self.a, self.b, self.atoms, self.breakpoints,
                                    [v - m / self.length for v in self.values])

    def endpoint_derivatives(self) -> tuple[complex, complex]:
        """One-sided derivatives ``(Q'(a+), Q'(b-))`` of the distribution function."""
        for x, _ in self.atoms:
            if x == self.a or x == self.b:
                raise EndpointAtom(f"atom at endpoint {x}: distribution function is not differentiable there")
        return complex(self.values[0]), complex(self.values[-1])

    def integrate_against(self, f: Callable[[np.ndarray], np.ndarray], frequency: float = 0.0,
                          nodes: int = 16) -> complex:
        """``sum_j h_j f(x_j) + int f(x) density(x) dx``.

        ``frequency`` is the largest angular frequency of ``f``; pieces are
        subdivided so that every period gets at least 8 quadrature nodes.
        """
        total = 0j
        if self.atoms:
            total += complex(np.sum(self.atom_weights * f(self.atom_positions)))
        t, w = gauss_legendre(nodes)
        for x0, x1, v in self.pieces():
            if v == 0:
                continue
            periods = (x1 - x0) * abs(frequency) / (2 * math.pi)
            m = max(1, math.ceil(8 * periods / nodes))
            edges = np.linspace(x0, x1, m + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            xs = (mid[:, None] + half[:, None] * t[None, :]).ravel()
            ws = (half[:, None] * w[None, :]).ravel()
            total += v * complex(np.sum(ws * f(xs)))
        return total

    def cosine_coefficient(self, ell: int) -> complex:
        """``int cos(2 pi ell (x - a)/(b - a)) q(dx)``, in closed form."""
        k = 2 * math.pi * ell / self.length
        total = 0j
        for xj, h in self.atoms:
            total += h * math.cos(k * (xj - self.a))
        for x0, x1, v in self.pieces():
            if v == 0:
                continue
            if k == 0:
                total += v * (x1 - x0)
            else:
                total += v * (math.sin(k * (x1 - self.a)) - math.sin(k * (x0 - self.a))) / k
        return total


def cosine_cesaro_means(q: SignedMeasure, K: int) -> np.ndarray:
    """Running (C,1) means of ``ell -> int cos(2 pi ell x) q(dx)``, ``ell = 1..K``."""
    terms = np.array([q.cosine_coefficient(ell) for ell in range(1, K + 1)])
    partial = np.cumsum(terms)
    return np.cumsum(partial) / np.arange(1, K + 1)
