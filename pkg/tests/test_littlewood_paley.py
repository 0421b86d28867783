import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emhd.grid import VOLUME, constant_field, single_mode_field, zero_field
from emhd.littlewood_paley import (
    BesovSpec,
    LPFamily,
    auto_split_cutoff,
    bernstein_margin,
    besov_norm,
    besov_time_norm,
    chi_symbol,
    decompose,
    decompose_low_high,
    infer_shell_index,
    kernel_K,
    kernel_convolve,
    kernel_kappa,
    low_pass,
    phi_symbol,
    project_shell,
    q_max_for,
    shell_amplitudes,
)
from emhd.mollify import ParameterError
from emhd.operators import l2_norm, lp_norm
from conftest import random_field

L3_COS4 = ((2 * math.pi) ** 2 * 8.0 / 3.0) ** (1.0 / 3.0)


class TestSymbols:
    def test_chi_plateau_and_support(self):
        rho = np.array([0.0, 0.5, 0.75, 0.9, 1.0, 2.0])
        vals = chi_symbol(rho)
        assert vals[0] == 1.0 and vals[1] == 1.0 and vals[2] == 1.0
        assert 0.0 < vals[3] < 1.0
        assert vals[4] == 0.0 and vals[5] == 0.0

    def test_phi_support(self):
        rho = np.linspace(0, 3, 301)
        vals = phi_symbol(rho)
        inside = (rho > 0.75) & (rho < 2.0)
        assert np.all(vals[~inside] == 0.0)
        assert np.all(vals[inside] > 0.0)

    def test_partition_of_unity(self, grid64):
        fam = LPFamily(grid64)
        assert fam.partition_defect() <= 1e-12
        assert fam.partition_defect_full() <= 1e-12

    def test_reconstruction(self, grid32):
        f = random_field(grid32, seed=1)
        total = decompose(f).reconstruct()
        assert l2_norm(total - f) <= 1e-12 * l2_norm(f)

    def test_distant_shells_disjoint(self, grid32):
        f = random_field(grid32, seed=2)
        for i in (-1, 0, 1, 2):
            for j in range(i + 2, q_max_for(grid32) + 1):
                double = project_shell(project_shell(f, j), i)
                assert l2_norm(double) <= 1e-13 * l2_norm(f)


class TestProjections:
    def test_mode_four_lives_in_shell_two(self, grid32):
        f = single_mode_field(grid32, 4)
        assert l2_norm(project_shell(f, 2) - f) <= 1e-13 * l2_norm(f)
        assert l2_norm(project_shell(f, 5)) == 0.0
        assert l2_norm(project_shell(f, 1)) == 0.0

    def test_constant_in_lowest_shell(self, grid16):
        f = constant_field(grid16, [1.0, 2.0, 3.0])
        assert np.max(np.abs(project_shell(f, -1).coeffs - f.coeffs)) == 0.0

    def test_negative_shell_rejected(self, grid16):
        with pytest.raises(ParameterError):
            project_shell(zero_field(grid16), -2)

    def test_low_pass_identity_at_qmax(self, grid32):
        f = random_field(grid32, seed=3)
        assert l2_norm(low_pass(f, q_max_for(grid32)) - f) <= 1e-12 * l2_norm(f)

    def test_low_pass_kills_mode_four_at_zero(self, grid32):
        f = single_mode_field(grid32, 4)
        assert l2_norm(low_pass(f, 0)) == 0.0

    def test_low_pass_zero_field(self, grid16):
        assert l2_norm(low_pass(zero_field(grid16), 3)) == 0.0


class TestBesov:
    def test_single_mode_value(self, grid32):
        f = single_mode_field(grid32, 4)
        spec = BesovSpec(s=1.0 / 3.0, p=3.0)
        expect = 2.0 ** (2.0 / 3.0) * L3_COS4
        assert besov_norm(f, spec) == pytest.approx(expect, rel=1e-3)

    def test_zero_field(self, grid16):
        assert besov_norm(zero_field(grid16), BesovSpec(s=0.5, p=2.0)) == 0.0

    def test_l2_equivalence(self, grid32):
        f = random_field(grid32, q_lo=0, q_hi=4, seed=4)
        val = besov_norm(f, BesovSpec(s=0.0, p=2.0, q=2.0))
        ratio = val / l2_norm(f)
        assert 1.0 / math.sqrt(3.0) <= ratio <= math.sqrt(3.0)

    def test_translation_invariance(self, grid32):
        f = random_field(grid32, seed=5)
        shift = np.exp(1j * grid32.k_broadcast()[0] * 1.2345)
        g = f.with_coeffs(f.coeffs * shift)
        spec = BesovSpec(s=0.4, p=4.0)
        a, b = besov_norm(f, spec), besov_norm(g, spec)
        assert abs(a - b) <= 1e-10 * a

    def test_dyadic_power_law(self, grid64):
        s = 0.7
        for j in range(1, 5):
            f = single_mode_field(grid64, 2**j)
            val = besov_norm(f, BesovSpec(s=s, p=math.inf))
            assert abs(val - 2.0 ** (s * j)) <= 1e-10 * 2.0 ** (s * j)

    def test_invalid_exponents(self):
        with pytest.raises(ParameterError):
            BesovSpec(s=0.0, p=0.5)


class TestBesovTimeNorm:
    def test_constant_in_time(self, grid16):
        f0 = random_field(grid16, q_lo=1, q_hi=2, seed=6)
        snaps = [f0.with_time(t) for t in np.linspace(0, 1, 11)]
        spec = BesovSpec(s=0.5, p=2.0)
        assert besov_time_norm(snaps, 3.0, spec) == pytest.approx(
            besov_norm(f0, spec), rel=1e-12
        )

    def test_exponential_decay(self, grid16):
        f0 = random_field(grid16, q_lo=1, q_hi=2, seed=7)
        times = np.linspace(0, 1, 2001)
        snaps = [(f0 * math.exp(-t)).with_time(t) for t in times]
        spec = BesovSpec(s=0.5, p=2.0)
        expect = besov_norm(f0, spec) * math.sqrt((1 - math.exp(-2.0)) / 2.0)
        assert besov_time_norm(snaps, 2.0, spec) == pytest.approx(expect, rel=1e-6)

    def test_max_in_time(self, grid16):
        f0 = random_field(grid16, q_lo=1, q_hi=2, seed=8)
        snaps = [(f0 * (1 + t)).with_time(t) for t in np.linspace(0, 1, 5)]
        spec = BesovSpec(s=0.0, p=2.0)
        assert besov_time_norm(snaps, math.inf, spec) == pytest.approx(
            2.0 * besov_norm(f0, spec), rel=1e-12
        )

    def test_needs_two_snapshots(self, grid16):
        with pytest.raises(ParameterError):
            besov_time_norm([zero_field(grid16)], 2.0, BesovSpec(s=0.0, p=2.0))


class TestLowHighSplit:
    def test_high_vanishes_for_low_field(self, grid32):
        f = random_field(grid32, q_lo=2, q_hi=2, seed=9)
        split = decompose_low_high(f, 4)
        assert l2_norm(split.high) <= 1e-12 * l2_norm(f)

    def test_low_vanishes_for_high_field(self):
        from emhd.grid import Grid

        g = Grid(128)  # shell 6 only intersects the spectrum from n = 128 up
        f = random_field(g, q_lo=6, q_hi=6, seed=10)
        split = decompose_low_high(f, 2)
        assert l2_norm(split.low) <= 1e-12 * l2_norm(f)

    def test_two_shell_separation(self):
        from emhd.grid import Grid

        g = Grid(128)
        lowpart = random_field(g, q_lo=2, q_hi=2, seed=11)
        highpart = random_field(g, q_lo=6, q_hi=6, seed=12)
        split = decompose_low_high(lowpart + highpart, 4)
        assert l2_norm(split.low - lowpart) <= 1e-12 * l2_norm(lowpart)
        assert l2_norm(split.high - highpart) <= 1e-12 * l2_norm(highpart)

    def test_exact_reconstruction(self, grid32):
        f = random_field(grid32, q_lo=0, q_hi=4, seed=13)
        split = decompose_low_high(f, 2)
        defect = np.max(np.abs((split.low + split.high).coeffs - f.coeffs))
        # complementary by construction; only the f - low rounding remains
        assert defect <= 2 * np.finfo(float).eps * np.max(np.abs(f.coeffs))

    def test_auto_cutoff_in_range(self, grid32):
        f = random_field(grid32, q_lo=0, q_hi=4, seed=14)
        q = auto_split_cutoff(f)
        assert -1 <= q <= q_max_for(grid32)


class TestShellAmplitudes:
    def test_single_mode(self, grid32):
        amps = shell_amplitudes(single_mode_field(grid32, 4))
        idx = list(amps.q_values).index(2)
        assert amps.b[idx] == pytest.approx(4.0 ** (1.0 / 3.0) * L3_COS4, rel=1e-3)
        others = np.delete(amps.b, idx)
        assert np.max(others) <= 1e-12

    def test_zero_field(self, grid16):
        amps = shell_amplitudes(zero_field(grid16))
        assert np.max(amps.b) == 0.0 and np.max(amps.beta) == 0.0

    def test_beta_ratio(self, grid32):
        amps = shell_amplitudes(random_field(grid32, q_lo=0, q_hi=4, seed=15))
        lam = 2.0 ** amps.q_values.astype(float)
        active = amps.b > 0
        assert np.allclose(amps.beta[active], lam[active] ** (1.0 / 3.0) * amps.b[active])


class TestKernels:
    def test_kernel_values(self):
        assert kernel_K(0) == 1.0
        assert kernel_K(1) == pytest.approx(2.0 ** (-4.0 / 3.0), rel=1e-15)
        assert kernel_K(-1) == pytest.approx(2.0 ** (-2.0 / 3.0), rel=1e-15)
        assert kernel_kappa(1) == pytest.approx(2.0 ** (-2.0 / 3.0), rel=1e-15)
        assert kernel_kappa(-1) == pytest.approx(2.0 ** (-4.0 / 3.0), rel=1e-15)

    def test_single_entry_convolution(self):
        amps = np.zeros(8)
        amps[1] = 1.0  # b_0^2 = 1 (index 0 is shell -1)
        assert kernel_convolve(amps, "K", 0) == pytest.approx(1.0)
        assert kernel_convolve(amps, "K", 1) == pytest.approx(2.0 ** (-4.0 / 3.0))
        assert kernel_convolve(amps, "K", -1) == pytest.approx(2.0 ** (-2.0 / 3.0))

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(0.0, 10.0), min_size=3, max_size=8),
        st.integers(-1, 8),
        st.integers(0, 7),
        st.floats(0.01, 5.0),
    )
    def test_linear_and_monotone(self, amps, q_at, bump_idx, bump):
        amps = np.asarray(amps)
        base = kernel_convolve(amps, "K", q_at)
        scaled = kernel_convolve(2.0 * amps, "K", q_at)
        assert scaled == pytest.approx(2.0 * base, rel=1e-12, abs=1e-12)
        bumped = amps.copy()
        bumped[bump_idx % len(amps)] += bump
        assert kernel_convolve(bumped, "K", q_at) >= base

    def test_rejects_negative(self):
        with pytest.raises(ParameterError):
            kernel_convolve([-1.0, 2.0], "K", 0)


class TestBernstein:
    def test_single_mode_value(self, grid32):
        f = single_mode_field(grid32, 4)
        ratio = bernstein_margin(f, s=2.0, r=math.inf)
        expect = 1.0 / (4.0**1.5 * (VOLUME / 2.0) ** 0.5)
        assert ratio == pytest.approx(expect, rel=1e-10)

    def test_equal_exponents(self, grid32):
        f = random_field(grid32, q_lo=3, q_hi=3, seed=16)
        shell = project_shell(f, 3)
        assert bernstein_margin(shell, 2.0, 2.0) == pytest.approx(1.0, rel=1e-13)

    def test_scale_invariance(self, grid32):
        f = project_shell(random_field(grid32, q_lo=3, q_hi=3, seed=17), 3)
        a = bernstein_margin(f, 2.0, math.inf)
        b = bernstein_margin(f * 5.0, 2.0, math.inf)
        assert abs(a - b) <= 1e-13 * a

    def test_bounded_over_shells(self, grid32):
        for q in (2, 3, 4):
            for seed in range(5):
                f = project_shell(random_field(grid32, q_lo=q, q_hi=q, seed=seed), q)
                assert bernstein_margin(f, 2.0, math.inf) <= 3.0

    def test_infer_shell_of_mode(self, grid32):
        assert infer_shell_index(single_mode_field(grid32, 4)) == 2
        assert infer_shell_index(constant_field(grid32, [1, 0, 0])) == -1

    def test_multi_shell_rejected(self, grid32):
        f = single_mode_field(grid32, 4) + single_mode_field(grid32, 1)
        with pytest.raises(ParameterError):
            bernstein_margin(f, 2.0, math.inf)
