import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from measure_spectra import bcspec
from measure_spectra.bcspec import BoundaryConditions, CaseTag, Regularity
from measure_spectra.errors import DegenerateRows, IrregularBC

coef = st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 3))


def bc_of(rows, a=0.0, b=1.0):
    return BoundaryConditions.from_matrix(a, b, rows)


class TestNormalize:
    def test_dirichlet_unchanged(self):
        bc = bcspec.dirichlet()
        n = bcspec.normalize(bc)
        assert n.degrees == (0, 0)
        assert bcspec.row_equivalent(n, bc)

    def test_both_rows_keep_derivatives(self):
        # y'(0) + y'(1) = 0, y'(0) - y'(1) + y(0) = 0
        n = bcspec.normalize(bc_of([[1, 0, 1, 0], [1, 1, -1, 0]]))
        assert n.degrees == (1, 1)
        assert bcspec.row_equivalent(n, bc_of([[2, 1, 0, 0], [0, -1, 2, 0]]))

    def test_add_subtract_rows(self):
        # y(0) + y'(1) = 0, y(0) - y'(1) = 0  ->  y(0) = 0, y'(1) = 0
        n = bcspec.normalize(bc_of([[0, 1, 1, 0], [0, 1, -1, 0]]))
        assert n.degrees == (0, 1)
        assert bcspec.row_equivalent(n, bcspec.mixed(1, 0, 0, 1))

    def test_dependent_rows(self):
        with pytest.raises(DegenerateRows):
            bcspec.normalize(bc_of([[1, 0, 0, 0], [2, 0, 0, 0]]))

    def test_zero_row_rejected(self):
        with pytest.raises(DegenerateRows):
            bc_of([[0, 0, 0, 0], [0, 1, 0, 0]])


class TestClassify:
    def test_periodic(self):
        inv = bcspec.classify(bcspec.periodic())
        assert (inv.A, inv.B, inv.C) == (-2, 0, 2)
        assert inv.case is CaseTag.DOUBLE_NO_JORDAN
        assert inv.regularity is Regularity.REGULAR_NOT_STRONG

    def test_separated_right_angle(self):
        inv = bcspec.classify(bcspec.mixed(1, 0, 0, 1))
        assert (inv.A, inv.B, inv.C) == (1, 0, 0)
        assert inv.regularity is Regularity.STRONGLY_REGULAR
        assert inv.alpha == pytest.approx(math.pi / 2)

    def test_close_variant_three(self):
        # y(0) - y(1) = 0, y'(0) - y'(1) + c1 y(0) = 0
        inv = bcspec.classify(bc_of([[0, 1, 0, -1], [1, 2, -1, 0]]))
        assert inv.case is CaseTag.CLOSE_V3
        assert inv.C == -inv.A
        assert inv.B == 2

    @pytest.mark.parametrize("bc, tag", [
        (bcspec.dirichlet(), CaseTag.DIRICHLET),
        (bcspec.both1(0.3, 0.1, 0.1, -0.2), CaseTag.BOTH1),
        (bcspec.antiperiodic(), CaseTag.DOUBLE_NO_JORDAN),
        (bcspec.mixed(1, 0.5, 1, -1), CaseTag.JORDAN),
        (bcspec.mixed(1, -1, 1, 0.5, c1=0.3, f1=0.4), CaseTag.CLOSE_V1),
        (bcspec.mixed(1, -0.5, 1, -1, c1=0.3, f1=0.4), CaseTag.CLOSE_V2),
        (bcspec.mixed(1, 0.5, 0.3, 1, c1=0.2), CaseTag.SEPARATED),
    ])
    def test_case_tree(self, bc, tag):
        assert bcspec.classify(bc).case is tag

    def test_antiperiodic_sigma(self):
        assert bcspec.classify(bcspec.antiperiodic()).sigma == -1

    def test_irregular(self):
        # A = b1 a0 + a1 b0 = 0
        with pytest.raises(IrregularBC):
            bcspec.classify(bcspec.mixed(1, -1, 1, 1))

    @given(coef, coef, coef, coef)
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, a0, b0, a1, b1):
        bc = bcspec.mixed(a0 or 1.0, b0, a1, b1 or 1.0, c1=0.2, f1=-0.3)
        try:
            inv = bcspec.classify(bcspec.normalize(bc))
        except IrregularBC:
            return
        again = bcspec.classify(bcspec.normalize(bcspec.normalize(bc)))
        assert again.case is inv.case
        assert again.A == pytest.approx(inv.A) and again.C == pytest.approx(inv.C)

    @given(coef, coef, coef, st.complex_numbers(min_magnitude=0.2, max_magnitude=5))
    @settings(max_examples=60, deadline=None)
    def test_row_scaling_invariance(self, b0, a1, c1, s):
        bc = bcspec.mixed(1.0, b0, a1, 1.0, c1=c1, f1=0.1)
        try:
            inv = bcspec.classify(bc)
        except IrregularBC:
            return
        m = bc.matrix.copy()
        m[1] *= s
        scaled = bc_of(m)
        inv2 = bcspec.classify(scaled)
        assert inv2.case is inv.case
        if inv.A != 0:
            assert inv2.B / inv2.A == pytest.approx(inv.B / inv.A, rel=1e-12, abs=1e-12)
        if inv.alpha is not None:
            assert inv2.alpha == pytest.approx(inv.alpha)
            assert abs(cmath.sin(inv.alpha)) > 0
        c1_, c2_ = bcspec.trace_coefficients(bc), bcspec.trace_coefficients(scaled)
        assert (c2_.A, c2_.B) == (pytest.approx(c1_.A), pytest.approx(c1_.B))


class TestTraceCoefficients:
    def test_table(self):
        d = bcspec.trace_coefficients(bcspec.dirichlet())
        assert (d.A, d.B) == (-0.25, -0.25)
        b = bcspec.trace_coefficients(bcspec.both1(0.3, 0.1, 0.1, -0.2))
        assert (b.A, b.B) == (0.25, 0.25)
        m = bcspec.trace_coefficients(bcspec.mixed(1, 0, 0, 1))
        assert (m.A, m.B) == (pytest.approx(-0.25), pytest.approx(0.25))
        p = bcspec.trace_coefficients(bcspec.periodic())
        assert (p.A, p.B) == (0, 0)

    @given(coef, coef, coef, coef)
    @settings(max_examples=80, deadline=None)
    def test_mixed_sum_zero(self, a0, b0, a1, b1):
        bc = bcspec.mixed(a0 or 1.0, b0, a1, b1 or 0.5)
        try:
            c = bcspec.trace_coefficients(bc)
        except IrregularBC:
            return
        assert np.isfinite(c.A) and c.A + c.B == pytest.approx(0, abs=1e-12)


class TestAdjoint:
    def test_dirichlet(self):
        assert bcspec.row_equivalent(bcspec.adjoint(bcspec.dirichlet()), bcspec.dirichlet())

    def test_both1(self):
        c0, f0, c1, f1 = 0.3 + 0.1j, 0.1, 0.2 - 0.5j, -0.4
        adj = bcspec.adjoint(bcspec.both1(c0, f0, c1, f1))
        want = bcspec.both1(np.conj(c0), -np.conj(c1), -np.conj(f0), np.conj(f1))
        assert bcspec.row_equivalent(adj, want)

    def test_separated_right_angle_is_self_adjoint(self):
        bc = bcspec.mixed(1, 0, 0, 1)
        assert bcspec.row_equivalent(bcspec.adjoint(bc), bc)

    @given(st.lists(st.complex_numbers(max_magnitude=2), min_size=8, max_size=8))
    @settings(max_examples=60, deadline=None)
    def test_involution(self, entries):
        m = np.array(entries).reshape(2, 4)
        assume(np.linalg.matrix_rank(m, tol=1e-3) == 2)
        try:
            bc = bc_of(m)
            bcspec.normalize(bc)
        except DegenerateRows:
            return
        assert bcspec.row_equivalent(bcspec.adjoint(bcspec.adjoint(bc)), bc, tol=1e-7)

    @given(st.lists(st.complex_numbers(max_magnitude=2), min_size=8, max_size=8),
           st.lists(st.complex_numbers(max_magnitude=2), min_size=8, max_size=8))
    @settings(max_examples=60, deadline=None)
    def test_lagrange_form_vanishes(self, entries, ys):
        m = np.array(entries).reshape(2, 4)
        assume(np.linalg.matrix_rank(m, tol=1e-3) == 2)
        try:
            bc = bc_of(m)
            adj = bcspec.adjoint(bc)
        except DegenerateRows:
            return
        # boundary data satisfying bc and its adjoint make the Lagrange form vanish
        ns = np.linalg.svd(m)[2][2:].conj().T
        nsa = np.linalg.svd(adj.matrix)[2][2:].conj().T
        u = ns @ np.array(ys[:2])
        v = nsa @ np.array(ys[2:4])
        # layout (y'(a), y(a), y'(b), y(b)); form [y' conj(z) - y conj(z')] from a to b
        form = (u[2] * np.conj(v[3]) - u[3] * np.conj(v[2])) - (u[0] * np.conj(v[1]) - u[1] * np.conj(v[0]))
        assert abs(form) <= 1e-8 * (1 + np.abs(u).max() * np.abs(v).max())
