import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measure_spectra import bcspec, green
from measure_spectra.errors import CircleTooClose, IrregularBC, NearPole
from measure_spectra.measure import SignedMeasure
from measure_spectra.spectrum import eigenpair, projector_sum, unperturbed_spectrum

SEPARATED = bcspec.mixed(1, 0.5, 0.3, 1, c1=0.2)
RIGHT_ANGLE = bcspec.mixed(1, 0, 0, 1)

coef = st.floats(-2, 2, allow_nan=False)


def regular_mixed(a0, b0, a1, b1, c1=0.0, f1=0.0):
    bc = bcspec.mixed(a0, b0, a1, b1, c1=c1, f1=f1)
    try:
        inv = bcspec.classify(bc)
    except IrregularBC:
        return None
    return bc if abs(inv.A) > 0.1 else None


class TestGreen0:
    def test_dirichlet_closed_form(self):
        xs = np.array([0.1, 0.5, 0.8])
        g = green.green0(bcspec.dirichlet(), xs, xs, -1.0)
        assert np.allclose(g, np.sinh(xs) * np.sinh(1 - xs) / math.sinh(1), rtol=1e-12)
        assert g[1].real == pytest.approx(0.2311, abs=1e-4)

    def test_solves_equation(self):
        # the jump of the x-derivative at x = y is -1
        lam, y, h = 13.0 + 4j, 0.4, 1e-6
        g = lambda x: green.green0(SEPARATED, x, y, lam)
        dl = (g(y - h) - g(y - 2 * h)) / h
        dr = (g(y + 2 * h) - g(y + h)) / h
        assert dr - dl == pytest.approx(-1, abs=1e-4)

    @pytest.mark.parametrize("bc", [bcspec.dirichlet(), SEPARATED, bcspec.periodic(),
                                    bcspec.both1(0.3, 0.1, 0.1, -0.2)])
    def test_diagonal_routes_agree(self, bc):
        rng = np.random.default_rng(3)
        for _ in range(20):
            lam = complex(*rng.uniform(-400, 400, 2))
            x = rng.uniform(0.02, 0.98)
            a = green.green0(bc, x, x, lam)
            b = green.green0_diagonal(bc, x, lam)
            c = green.delta_determinants(bc, cmath.sqrt(lam)).green_diagonal(x)
            if np.imag(cmath.sqrt(lam)) < 0:
                c = green.delta_determinants(bc, -cmath.sqrt(lam)).green_diagonal(x)
            assert abs(a - b) < 1e-9 * abs(a)
            assert abs(a - c) < 1e-9 * abs(a)

    @pytest.mark.parametrize("bc", [bcspec.dirichlet(), SEPARATED, bcspec.both1(0.3, 0.1, 0.1, -0.2)])
    def test_residue(self, bc):
        s = unperturbed_spectrum(bc, 4)
        x, y = 0.3, 0.75
        for ev in s.eigenvalues:
            if ev.multiplicity > 1:
                continue
            n = 64
            r = 0.1
            nodes = ev.lam + r * np.exp(2j * math.pi * np.arange(n) / n)
            vals = np.array([complex(green.green0(bc, x, y, lam)) for lam in nodes])
            res = np.sum(vals * (nodes - ev.lam)) / n
            p = eigenpair(bc, s.q, ev)
            want = -p.ys[0](np.array(x)) * np.conj(p.zs[0](np.array(y)))
            assert abs(res - want) < 1e-9 * (1 + abs(want))

    @given(coef, coef, coef, st.floats(0.05, 0.95), st.floats(0.05, 0.95),
           st.complex_numbers(max_magnitude=300))
    @settings(max_examples=40, deadline=None)
    def test_adjoint_symmetry(self, b0, a1, c1, x, y, lam):
        bc = regular_mixed(1.0, b0, a1, 1.0, c1=c1, f1=0.3)
        if bc is None:
            return
        adj = bcspec.adjoint(bc)
        try:
            g = green.green0(bc, x, y, lam)
            ga = green.green0(adj, y, x, np.conj(lam))
        except NearPole:
            return
        assert abs(g - np.conj(ga)) <= 1e-9 * (1 + abs(g))

    def test_near_pole(self):
        with pytest.raises(NearPole):
            green.green0(bcspec.dirichlet(), 0.3, 0.3, math.pi ** 2)


class TestDeltaDeterminants:
    def test_dirichlet_zeros(self):
        for N in range(1, 6):
            d = green.delta_determinants(bcspec.dirichlet(), N * math.pi)
            off = green.delta_determinants(bcspec.dirichlet(), (N + 0.5) * math.pi)
            assert abs(d.delta) < 1e-12 * abs(off.delta)

    @given(coef, coef, coef, coef, coef, st.booleans())
    @settings(max_examples=50, deadline=None)
    def test_hat21_relation(self, b0, a1, c1, f1, zr, both):
        bc = bcspec.both1(b0, a1, c1, f1) if both else regular_mixed(1.0, b0, a1, 1.0, c1=c1, f1=f1)
        if bc is None:
            return
        inv = bcspec.classify(bc)
        d = green.delta_determinants(bc, 5 + zr + 1j)
        assert d.hat21 == (-1) ** (inv.d0 + inv.d1 + 1) * d.hat12

    @pytest.mark.parametrize("bc", [bcspec.dirichlet(), SEPARATED, bcspec.both1(0.3, 0.1, 0.1, -0.2)])
    def test_leading_form_slope(self, bc):
        d0 = bcspec.classify(bc).d0 + bcspec.classify(bc).d1
        # beyond R ~ 500 the exact determinant overflows double precision on this ray
        Rs = np.geomspace(10, 450, 9)
        errs = []
        for R in Rs:
            dd = green.delta_determinants(bc, R * cmath.exp(0.25j * math.pi))
            errs.append(abs(dd.delta / dd.leading(bc.a, bc.b, d0)["delta"] - 1))
        errs = np.array(errs)
        if errs.max() < 1e-12:
            return
        slope = np.polyfit(np.log(Rs), np.log(errs), 1)[0]
        assert slope == pytest.approx(-1, abs=0.15)


class TestSchedule:
    def test_dirichlet(self):
        s = green.build_schedule(bcspec.dirichlet(), 6)
        assert np.allclose(s.radii, (np.arange(6) + 0.5) * math.pi)
        assert list(s.inside) == list(range(6))

    def test_periodic(self):
        s = green.build_schedule(bcspec.periodic(), 5)
        assert np.allclose(s.radii, (2 * np.arange(5) + 1) * math.pi)
        assert list(s.inside) == [1, 3, 5, 7, 9]

    def test_right_angle_mixed(self):
        # spectrum (k + 1/2) pi: radii at integer multiples of pi
        s = green.build_schedule(RIGHT_ANGLE, 6)
        assert np.allclose(s.radii[1:], np.arange(1, 6) * math.pi)
        assert np.all(s.sizes[1:] == 1)


class TestContour:
    def test_g0_squared_dirichlet(self):
        val = green.contour_g0_squared(bcspec.dirichlet(), 0.37, 200.5 * math.pi)
        assert abs(val - green.TARGET_G0_SQUARED) < 0.05

    @pytest.mark.parametrize("bc, x", [(bcspec.dirichlet(), 0.5), (RIGHT_ANGLE, 0.25),
                                       (bcspec.both1(0.3, 0.1, 0.1, -0.2), 0.4)])
    def test_g0_squared_trend(self, bc, x):
        radii = green.build_schedule(bc, 80).radii[[9, 19, 39, 79]]
        errs = [abs(green.contour_g0_squared(bc, x, R) - green.TARGET_G0_SQUARED) for R in radii]
        assert errs[-1] < errs[0]
        assert errs[-1] < 0.1

    def test_zero_measure(self):
        assert green.contour_trace_term(bcspec.dirichlet(), SignedMeasure.zero(), 10.5 * math.pi) == 0

    @pytest.mark.parametrize("bc", [bcspec.dirichlet(), SEPARATED, bcspec.periodic()])
    def test_residue_identity(self, bc):
        q = SignedMeasure.create(0, 1, [(0.3, 0.5 - 0.2j)], breakpoints=[0, 0.55, 1], values=[0.4, -0.7])
        sched = green.build_schedule(bc, 8)
        s = unperturbed_spectrum(bc, int(sched.inside[-1]) + 4)
        for R in sched.radii[[2, 5, 7]]:
            contour = green.contour_trace_term(bc, q, R)
            spectral = projector_sum(s, q, R)
            assert abs(contour - spectral) < 1e-6 * max(1.0, abs(spectral))

    def test_circle_through_pole(self):
        with pytest.raises(CircleTooClose):
            green.contour_trace_term(bcspec.dirichlet(), SignedMeasure.delta(0.3), 3 * math.pi)
