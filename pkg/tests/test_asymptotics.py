import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from measure_spectra import asymptotics as asy
from measure_spectra import bcspec
from measure_spectra.bcspec import BoundaryConditions, CaseTag
from measure_spectra.errors import SingularAlpha, WrongCase
from measure_spectra.spectrum import eigenpairs, unperturbed_spectrum

PI = math.pi
XS = np.linspace(0.05, 0.95, 19)
CLOSE_V3 = BoundaryConditions.from_matrix(0, 1, [[0, 1, 0, -1], [1, 1, -1, 0]])  # c1 = 1
SEPARATED = bcspec.mixed(1, 0.5, 0.3, 1, c1=0.2)
BOTH1 = bcspec.both1(0.3, 0.1, 0.1, -0.2)
CLOSE_V1 = bcspec.mixed(1, -1, 1, 0.5, c1=0.3, f1=0.4)
JORDAN = bcspec.mixed(1, 0.5, 1, -1)


class TestRho:
    def test_neumann(self):
        assert asy.rho_expansion(bcspec.both1(0, 0, 0, 0), 4).value == pytest.approx(4 * PI)

    def test_close_v3_truncation(self):
        e = asy.rho_expansion(CLOSE_V3, 10)
        want = 20 * PI - 1 / (20 * PI) + (1 - 12) / (96 * 1000 * PI ** 3)
        assert e.order == 6
        # the next printed term is (1 - 6) / (96 pi^5 10^5)
        assert e.value == pytest.approx(want - 5 / (96 * PI ** 5 * 1e5), abs=1e-13)

    def test_right_angle_exact(self):
        bc = bcspec.mixed(1, 0, 0, 1)
        assert asy.rho_expansion(bc, 3, 1).value == pytest.approx(6.5 * PI, abs=1e-14)
        assert asy.rho_expansion(bc, 3, -1).value == pytest.approx(5.5 * PI, abs=1e-14)

    def test_separated_needs_branch(self):
        with pytest.raises(WrongCase):
            asy.rho_expansion(SEPARATED, 3, 0)

    @pytest.mark.parametrize("bc, branch", [(BOTH1, 1), (SEPARATED, 1), (SEPARATED, -1), (CLOSE_V1, -1),
                                            (CLOSE_V3, -1), (bcspec.antiperiodic(), -1)])
    def test_scaled_error_bounded(self, bc, branch):
        s = unperturbed_spectrum(bc, 420)
        z = s.z.real
        Ns = np.arange(20, 201, 20)
        errs, floors, order = [], [], 0
        for N in Ns:
            e = asy.rho_expansion(bc, int(N), branch)
            num = z[np.argmin(np.abs(z - e.value.real))]
            errs.append(abs(num - e.value))
            # relative rounding of the computed root
            floors.append(1e-14 * abs(num))
            order = min(e.order, 6)
        errs, floors = np.array(errs), np.array(floors)
        C = np.max(errs[:3] * Ns[:3] ** order)
        assert np.all(errs <= 2 * C / Ns ** order + floors)


class TestProducts:
    def test_dirichlet(self):
        e = asy.product_expansion(bcspec.dirichlet(), 3, XS)
        assert np.allclose(e.value, 1 - np.cos(6 * PI * XS))

    def test_separated_midpoint(self):
        for N in (5, 50, 500):
            assert asy.product_expansion(SEPARATED, N, 0.5).value == pytest.approx(2 + 2 * math.cos(2 * PI * N)
                                                                                   * asy.vw(0.5, SEPARATED_ALPHA, SEPARATED_P)[0])

    @pytest.mark.parametrize("bc", [BOTH1, CLOSE_V3, SEPARATED, CLOSE_V1, JORDAN])
    def test_against_numeric(self, bc):
        case = bcspec.classify(bc).case
        s = unperturbed_spectrum(bc, 90)
        pairs = eigenpairs(s)
        scaled = []
        for N in (10, 20, 40):
            if case is CaseTag.BOTH1:
                members = [p for p in pairs if abs(abs(cmath.sqrt(p.lam)) - N * PI) < 1]
            else:
                members = [p for p in pairs if abs(abs(cmath.sqrt(p.lam)) - 2 * PI * N) < 0.99 * PI]
            num = sum(p.diagonal(XS) for p in members)
            scaled.append(np.abs(num - asy.product_expansion(bc, N, XS).value).max() * N)
        assert scaled[-1] <= scaled[0] + 1e-8
        assert max(scaled) < 0.1


SEPARATED_P = asy.params_from_bc(SEPARATED)
SEPARATED_ALPHA = bcspec.classify(SEPARATED).alpha


@st.composite
def vw_draws(draw):
    a0 = draw(st.floats(-2, 2))
    b0 = draw(st.floats(-2, 2))
    a1 = draw(st.floats(-2, 2))
    b1 = draw(st.floats(-2, 2))
    assume(abs(abs(a0) - abs(b0)) > 0.1 and abs(a1) > 0.1 and abs(b1 * a0 + a1 * b0) > 0.1)
    p = asy.RowParams(a0, b0, a1, b1, 0, 0, draw(st.floats(-1, 1)), draw(st.floats(-1, 1)))
    ratio = p.C / p.A
    assume(abs(ratio) < 0.99)
    return p, draw(st.floats(0, 1))


class TestVW:
    @given(vw_draws())
    @settings(max_examples=200, deadline=None)
    def test_parity_identities(self, draw):
        p, x = draw
        alpha = p.alpha
        assume(abs(cmath.sin(alpha)) > 0.1)
        v0, v1, w0, w1 = asy.vw(x, alpha, p)
        m0, m1, n0, n1 = asy.vw(x, -alpha, p)
        scale = 1 + max(abs(v) for v in (v0, v1, w0, w1))
        assert abs(v0 - m0) < 1e-10 * scale
        assert abs(v1 + m1) < 1e-10 * scale
        assert abs(w1 - n1) < 1e-10 * scale
        assert abs(w0 + n0) < 1e-10 * scale
        h0, _, _, h1 = asy.vw(0.5, alpha, p)
        assert abs(h0) < 1e-10 * scale and abs(h1) < 1e-10 * scale
        lhs, rhs = asy.w1_numerator(x, alpha, p)
        assert abs(lhs - rhs) < 1e-10 * (1 + abs(lhs))

    def test_singular_alpha(self):
        with pytest.raises(SingularAlpha):
            asy.vw(0.3, 1e-12, SEPARATED_P)

    def test_continuity(self):
        # grid modulus of continuity shrinks with the grid step
        alphas = np.linspace(0.4, 2.7, 41)
        xs = np.linspace(0, 1, 41)
        vals = np.array([[asy.vw(x, a, SEPARATED_P)[3] for x in xs] for a in alphas])
        fine = np.array([[asy.vw(x, a, SEPARATED_P)[3] for x in xs[:11] + 0.0025] for a in alphas[:11] + 0.0025])
        assert np.abs(fine - vals[:11, :11]).max() < 0.1 * np.abs(np.diff(vals, axis=0)).max() + 1e-12


class TestScalarProducts:
    def test_both1(self):
        assert asy.scalar_product_expansion(BOTH1, 7, c1c2=3).value == 1.5

    def test_jordan(self):
        a0, b0 = 1, 0.5
        e = asy.scalar_product_expansion(JORDAN, 5)
        assert e.value == pytest.approx((a0 - b0) / (16 * PI * 5 * (a0 + b0)))

    def test_right_angle(self):
        bc = bcspec.mixed(1, 0, 0, 1)
        for branch in (1, -1):
            v = asy.scalar_product_expansion(bc, 50, branch).value
            assert v == pytest.approx(branch * 0.5, abs=1e-12)

    @pytest.mark.parametrize("bc, branch", [(BOTH1, 1), (SEPARATED, 1), (SEPARATED, -1), (CLOSE_V3, -1),
                                            (CLOSE_V3, 1)])
    def test_displayed_forms(self, bc, branch):
        # quadrature of the displayed eigenfunctions at the numeric root matches the truncation
        s = unperturbed_spectrum(bc, 130)
        t, w = np.polynomial.legendre.leggauss(400)
        x, w = 0.5 * (t + 1), 0.5 * w
        errs = []
        for N in (15, 30, 60):
            guess = asy.rho_expansion(bc, N, branch).value
            rho = s.z[np.argmin(np.abs(s.z - guess))]
            y, zb = asy.eigenfunction_forms(bc, N, branch, rho)
            quad = np.sum(w * y(x) * zb(x))
            want = asy.scalar_product_expansion(bc, N, branch).value
            errs.append(abs(quad - want))
        assert errs[-1] <= errs[0] + 1e-10
        assert errs[-1] < 1e-3
