import cmath
import math

import numpy as np
import pytest

from catlab import (
    DimensionTooLarge,
    RadiusOutOfRange,
    Symbol,
    antiwick_expectation,
    antiwick_quantize_dense,
    bump_symbols,
    choose_theta,
    husimi,
    position_interval_mass,
    propagator,
    torus_coherent,
    translation,
    weyl_antiwick_gap,
    weyl_quantize,
)
from catlab.quantize import weyl_dense

from conftest import random_state


def random_real_trig_poly(rng, nmax=3, terms=4):
    coeffs = {}
    for _ in range(terms):
        n = (int(rng.integers(-nmax, nmax + 1)), int(rng.integers(-nmax, nmax + 1)))
        if n == (0, 0):
            continue
        c = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[n] = coeffs.get(n, 0) + c
        coeffs[(-n[0], -n[1])] = coeffs.get((-n[0], -n[1]), 0) + np.conj(c)
    coeffs[(0, 0)] = complex(rng.standard_normal(), 0.0)
    return Symbol.from_fourier(coeffs, real=True)


class TestSymbol:
    def test_needs_data(self):
        with pytest.raises(ValueError):
            Symbol()

    def test_hermitian_check(self):
        with pytest.raises(ValueError):
            Symbol.from_fourier({(1, 0): 1.0}, real=True)
        Symbol.from_fourier({(1, 0): 0.5, (-1, 0): 0.5}, real=True)

    def test_plane_wave_values(self):
        sym = Symbol.plane_wave((1, 0))
        q = np.array([0.25])
        p = np.array([0.4])
        # e_n(x) = exp(2 pi i (n2 q - n1 p)) = exp(-2 pi i p) for n = (1,0)
        assert sym.evaluate(q, p)[0] == pytest.approx(cmath.exp(-2j * math.pi * 0.4))

    def test_rho_range(self):
        with pytest.raises(ValueError):
            Symbol.from_fourier({(0, 0): 1.0}).__class__(
                fourier={(0, 0): 1.0}, rho=0.7
            )


class TestWeyl:
    def test_constant_is_identity(self, arnold):
        grid = choose_theta(arnold, 64)
        op = weyl_quantize(Symbol.from_fourier({(0, 0): 1.0}), grid)
        psi = random_state(grid, 0).amplitudes
        assert np.max(np.abs(op.apply(psi) - psi)) < 1e-15

    def test_plane_wave_is_translation(self, arnold):
        grid = choose_theta(arnold, 48)
        n = (2, -3)
        op = weyl_quantize(Symbol.plane_wave(n), grid)
        psi = random_state(grid, 1).amplitudes
        assert np.max(np.abs(op.apply(psi) - translation(n, grid).apply(psi))) == 0.0

    def test_real_symbol_self_adjoint(self, arnold):
        grid = choose_theta(arnold, 512)
        rng = np.random.default_rng(3)
        for _ in range(10):
            sym = random_real_trig_poly(rng)
            W = weyl_dense(sym, grid)
            assert np.max(np.abs(W - W.conj().T)) < 1e-12

    def test_l2_boundedness(self, arnold):
        grid = choose_theta(arnold, 128)
        rng = np.random.default_rng(4)
        for _ in range(5):
            sym = random_real_trig_poly(rng)
            op = weyl_quantize(sym, grid)
            bound = sym.sup_norm_bound()
            for seed in range(3):
                psi = random_state(grid, seed).amplitudes
                val = abs(np.vdot(psi, op.apply(psi)))
                assert val <= bound + 1e-10

    def test_egorov_for_symbols(self, arnold):
        # U^-1 a^w U = (a o M)^w with (a o M)~(m) = a~(M m)
        grid = choose_theta(arnold, 512)
        u = propagator(arnold, grid)
        rng = np.random.default_rng(5)
        psi = random_state(grid, 6).amplitudes
        for _ in range(10):
            sym = random_real_trig_poly(rng)
            # (a o M)~(m) = a~(M m), i.e. coefficients move to M^-1 n
            composed = Symbol.from_fourier(
                {
                    (
                        arnold.d * n[0] - arnold.b * n[1],
                        -arnold.c * n[0] + arnold.a * n[1],
                    ): c
                    for n, c in sym.fourier.items()
                }
            )
            aw = weyl_quantize(sym, grid)
            awc = weyl_quantize(composed, grid)
            lhs = u.apply_adjoint(aw.apply(u.apply(psi)))
            assert np.linalg.norm(lhs - awc.apply(psi)) < 1e-8


class TestAntiWick:
    def test_constant_gives_norm(self, arnold, grid1024):
        psi = random_state(grid1024, 7)
        val = antiwick_expectation(psi, Symbol.from_fourier({(0, 0): 1.0}), arnold)
        assert val.real == pytest.approx(1.0, abs=0.005)
        assert abs(val.imag) < 1e-12

    def test_ball_bump_at_coherent_center(self, arnold, grid1024):
        coh = torus_coherent((0.5, 0.5), arnold, grid1024)
        r = 10.0 * math.sqrt(grid1024.hbar)
        lower, upper = bump_symbols((0.5, 0.5), r)
        lo = antiwick_expectation(coh, lower, arnold).real
        hi = antiwick_expectation(coh, upper, arnold).real
        assert lo == pytest.approx(1.0, abs=0.01)
        assert hi == pytest.approx(1.0, abs=0.01)

    def test_plane_wave_phase(self, arnold, grid4096):
        x0 = (0.3, 0.65)
        coh = torus_coherent(x0, arnold, grid4096)
        h = husimi(coh, arnold, 256)
        for n1 in range(-2, 3):
            for n2 in range(-2, 3):
                if (n1, n2) == (0, 0):
                    continue
                val = antiwick_expectation(
                    coh, Symbol.plane_wave((n1, n2)), arnold, hgrid=h
                )
                assert abs(val) <= 1.0 + 1e-9
                want = 2 * math.pi * (n2 * x0[0] - n1 * x0[1])
                got = cmath.phase(val)
                diff = (got - want + math.pi) % (2 * math.pi) - math.pi
                assert abs(diff) < 1e-3

    def test_positivity(self, arnold, grid1024):
        lower, upper = bump_symbols((0.4, 0.4), 0.15)
        for seed in range(3):
            psi = random_state(grid1024, seed)
            assert antiwick_expectation(psi, lower, arnold).real >= 0.0
            assert antiwick_expectation(psi, upper, arnold).real >= 0.0


class TestBumps:
    def test_radius_range(self):
        with pytest.raises(RadiusOutOfRange):
            bump_symbols((0.5, 0.5), 0.3)
        with pytest.raises(RadiusOutOfRange):
            bump_symbols((0.5, 0.5), 0.0)

    def test_pointwise_sandwich(self):
        x0, r = (0.4, 0.6), 0.1
        lower, upper = bump_symbols(x0, r)
        G = 512
        c = (np.arange(G) + 0.5) / G
        q, p = c[:, None], c[None, :]
        dq = np.mod(q - x0[0] + 0.5, 1.0) - 0.5
        dp = np.mod(p - x0[1] + 0.5, 1.0) - 0.5
        chi = (dq**2 + dp**2 <= r * r).astype(float)
        lo = lower.sample(G).real
        hi = upper.sample(G).real
        assert np.all(lo <= chi + 1e-15)
        assert np.all(chi <= hi + 1e-15)
        assert np.all((lo >= 0) & (lo <= 1) & (hi >= 0) & (hi <= 1))

    def test_integrals(self):
        x0, r = (0.5, 0.5), 0.1
        lower, upper = bump_symbols(x0, r)
        G = 1024
        vol = math.pi * r * r
        lo = lower.sample(G).real.mean()
        hi = upper.sample(G).real.mean()
        assert (2.0 / 3.0) ** 2 <= lo / vol <= 1.0
        assert 1.0 <= hi / vol <= 1.5**2
        # the difference lives in the annulus between the inner and outer
        # supports, so it is bounded by its area
        assert 0.0 < hi - lo <= vol * (9.0 / 4.0 - 4.0 / 9.0)

    def test_quadrature_grid_convergence(self):
        lower, _ = bump_symbols((0.3, 0.7), 0.12)
        v512 = lower.sample(512).real.mean()
        v1024 = lower.sample(1024).real.mean()
        assert v512 == pytest.approx(v1024, rel=1e-3)


class TestPositionMass:
    def test_full_circle_exact(self, arnold, grid1024):
        psi = random_state(grid1024, 9)
        assert position_interval_mass(psi, 0.3, 0.5) == pytest.approx(
            psi.norm2(), abs=1e-12
        )

    def test_coherent_interval_both_paths(self, arnold, grid4096):
        coh = torus_coherent((0.5, 0.25), arnold, grid4096)
        r = 10.0 * math.sqrt(grid4096.hbar)
        direct = position_interval_mass(coh, 0.5, r)
        via_h = position_interval_mass(coh, 0.5, r, via="husimi", catmap=arnold)
        assert direct == pytest.approx(1.0, abs=0.01)
        assert via_h == pytest.approx(1.0, abs=0.01)

    def test_far_strip(self, arnold, grid4096):
        coh = torus_coherent((0.2, 0.6), arnold, grid4096)
        assert position_interval_mass(coh, 0.7, 0.05) < 1e-8

    def test_radius_validation(self, arnold, grid1024):
        psi = random_state(grid1024, 0)
        with pytest.raises(RadiusOutOfRange):
            position_interval_mass(psi, 0.5, 0.6)


class TestWAWGap:
    def test_constant_symbol_zero_gap(self, arnold):
        grid = choose_theta(arnold, 256)
        gap = weyl_antiwick_gap(Symbol.from_fourier({(0, 0): 1.0}), arnold, grid)
        assert gap < 1e-10

    def test_aw_dense_constant_is_identity(self, arnold):
        grid = choose_theta(arnold, 128)
        AW = antiwick_quantize_dense(
            Symbol.from_fourier({(0, 0): 1.0}), arnold, grid, G=128
        )
        assert np.max(np.abs(AW - np.eye(128))) < 1e-12

    def test_aw_dense_hermitian_for_real_symbol(self, arnold):
        grid = choose_theta(arnold, 128)
        sym = Symbol.from_fourier({(1, 0): 0.5, (-1, 0): 0.5}, real=True)
        AW = antiwick_quantize_dense(sym, arnold, grid, G=128)
        assert np.max(np.abs(AW - AW.conj().T)) < 1e-12

    def test_plane_wave_gap_decreasing(self, arnold):
        sym = Symbol.from_fourier({(1, 0): 0.5, (-1, 0): 0.5}, real=True)
        gaps = []
        for N in (256, 512, 1024):
            grid = choose_theta(arnold, N)
            gaps.append(weyl_antiwick_gap(sym, arnold, grid, G=256))
        assert gaps[0] > gaps[1] > gaps[2] > 0
        # hbar-linear rate: halving hbar about halves the gap
        assert gaps[0] / gaps[1] == pytest.approx(2.0, rel=0.25)

    def test_expectation_agreement_bounded_by_gap(self, arnold):
        grid = choose_theta(arnold, 512)
        rng = np.random.default_rng(12)
        for _ in range(5):
            sym = random_real_trig_poly(rng, nmax=2, terms=3)
            gap = weyl_antiwick_gap(sym, arnold, grid, G=256)
            op = weyl_quantize(sym, grid)
            for seed in range(10):
                psi = random_state(grid, seed)
                wval = np.vdot(psi.amplitudes, op.apply(psi.amplitudes))
                aval = antiwick_expectation(psi, sym, arnold, G=256)
                assert abs(wval - aval) <= gap * (1 + 1e-6) + 1e-9

    def test_dimension_cap(self, arnold, grid4096):
        with pytest.raises(DimensionTooLarge):
            weyl_antiwick_gap(
                Symbol.from_fourier({(0, 0): 1.0}), arnold, grid4096
            )
