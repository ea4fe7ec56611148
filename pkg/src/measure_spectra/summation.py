"""Cesaro (C,1) summation and re-bracketing of eigenvalue-difference series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bcspec import BoundaryConditions, Regularity, classify
from .errors import ClusterMismatch, ValidationError
from .spectrum import Spectrum

MIN_TERMS = 10


@dataclass
class CesaroResult:
    """Outcome of averaging the first ``K`` partial sums.

    ``diagnostic`` is the largest distance between the estimate and the
    running means over the last ``ceil(K/10)`` terms.  ``means_of_means`` is a
    second-level average shown for comparison only.
    """

    estimate: complex
    partial_sums: np.ndarray
    means: np.ndarray
    diagnostic: float
    terms_used: int
    means_of_means: complex = field(default=0j)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "diagnostic": self.diagnostic,
            "terms_used": self.terms_used,
            "means_of_means": self.means_of_means,
        }


def cesaro(values, K: int | None = None, partial: bool = False) -> CesaroResult:
    """(C,1) estimate from series terms, or from partial sums when ``partial``.

    Parameters
    ----------
    values : array_like
        Terms ``a_1, a_2, ...`` or partial sums ``I_1, I_2, ...``.
    K : int, optional
        Number of partial sums to average (all of them by default).
    """
    v = np.asarray(values, dtype=complex).ravel()
    K = v.size if K is None else int(K)
    if K < MIN_TERMS:
        raise ValidationError(f"Cesaro summation needs at least {MIN_TERMS} terms, got K={K}")
    if v.size < K:
        raise ValidationError(f"only {v.size} values available for K={K}")
    v = v[:K]
    sums = v if partial else np.cumsum(v)
    means = np.cumsum(sums) / np.arange(1, K + 1)
    estimate = complex(means[-1])
    tail = math.ceil(K / 10)
    diagnostic = float(np.max(np.abs(means[-tail:] - estimate)))
    return CesaroResult(estimate, sums, means, diagnostic, K, complex(np.mean(means)))


def cesaro_limit(values, K: int | None = None) -> complex:
    """(C,1)-lim of a sequence: the running mean of the sequence itself."""
    return cesaro(values, K, partial=True).estimate


def odd_even_forms(a, K: int | None = None) -> tuple[complex, complex, complex]:
    """The three equal-valued expressions of the pairwise re-bracketing identity.

    Returns ``(direct, odd_first, even_first)`` where::

        direct     = (C,1)-sum a_k
        odd_first  = (C,1)-sum (a_{2k-1} + a_{2k}) - (1/2) (C,1)-lim a_{2k}
        even_first = (C,1)-sum (a_{2k} + a_{2k+1}) + a_1 - (1/2) (C,1)-lim a_{2k+1}

    with 1-based indexing.  ``K`` bounds the number of paired terms used.
    """
    a = np.asarray(a, dtype=complex).ravel()
    npairs = (a.size - 1) // 2
    K = npairs if K is None else min(K, npairs)
    direct = cesaro(a[: 2 * K]).estimate
    odd = a[0::2][:K] + a[1::2][:K]
    odd_first = cesaro(odd).estimate - 0.5 * cesaro_limit(a[1::2][:K])
    even = a[1::2][:K] + a[2::2][:K]
    even_first = cesaro(even).estimate + a[0] - 0.5 * cesaro_limit(a[2::2][:K])
    return direct, odd_first, even_first


@dataclass
class PairedTerms:
    """Differences grouped into one term per eigenvalue cluster.

    ``correction`` is the ``-(1/2) (C,1)-lim`` term that converts the
    bracketed series back into the plain one; it is reported, not applied.
    """

    terms: np.ndarray
    groups: list[tuple[int, ...]]
    correction: complex
    leading_single: bool


def _group_sizes(spec0: Spectrum, n: int, inv) -> list[tuple[int, ...]]:
    if inv.regularity is Regularity.STRONGLY_REGULAR:
        return [(i,) for i in range(n)]
    groups: list[tuple[int, ...]] = []
    i = 0
    if inv.sigma == 1:
        groups.append((0,))
        i = 1
    while i + 1 < n:
        groups.append((i, i + 1))
        i += 2
    return groups


def _check_clusters(spec0: Spectrum, spec_q: Spectrum, groups: list[tuple[int, ...]]) -> None:
    """Perturbed roots must fall in the annuli cut out by the unperturbed clusters."""
    r0 = np.abs(spec0.z)
    rq = np.abs(spec_q.z)
    bounds = [0.5 * (r0[g[-1]] + r0[h[0]]) for g, h in zip(groups, groups[1:])]
    # only gaps wide enough to be meaningful are enforced
    gaps = [r0[h[0]] - r0[g[-1]] for g, h in zip(groups, groups[1:])]
    for k, (g, bound, gap) in enumerate(zip(groups, bounds, gaps)):
        if gap < 1e-6 * (1 + r0[g[-1]]):
            continue
        inside = rq[list(g)]
        nxt = rq[list(groups[k + 1])]
        if np.any(inside > bound) or np.any(nxt < bound):
            raise ClusterMismatch(
                f"perturbed eigenvalues {list(g)} / {list(groups[k + 1])} straddle the cluster "
                f"boundary |z| = {bound:.6g}"
            )


def pair_terms(spec0: Spectrum, spec_q: Spectrum, bc: BoundaryConditions | None = None,
               shift: complex = 0.0) -> PairedTerms:
    """Differences ``lam_N(q) - lam_N - shift`` bracketed per regularity class.

    Strongly regular conditions keep one term per eigenvalue.  Otherwise the
    eigenvalues are grouped in the structural pairs of the unperturbed
    spectrum: a leading singleton when the clusters start at a simple
    eigenvalue, then consecutive pairs.
    """
    bc = spec0.bc if bc is None else bc
    inv = classify(bc)
    n = min(len(spec0.eigenvalues), len(spec_q.eigenvalues))
    groups = _group_sizes(spec0, n, inv)
    _check_clusters(spec0, spec_q, groups)
    diffs = spec_q.lam[:n] - spec0.lam[:n] - shift
    terms = np.array([diffs[list(g)].sum() for g in groups])
    correction = 0j
    leading = bool(groups and len(groups[0]) == 1 and len(groups) > 1 and len(groups[1]) == 2)
    if inv.regularity is not Regularity.STRONGLY_REGULAR and len(groups) > MIN_TERMS:
        second = np.array([diffs[g[1]] for g in groups if len(g) == 2])
        correction = -0.5 * cesaro_limit(second)
    return PairedTerms(terms, groups, complex(correction), leading)
