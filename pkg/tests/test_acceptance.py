"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with -s to see them live).  Desk scale: N <= 64, every
criterion well under five minutes.
"""

import math
import time

import numpy as np
import pytest

from emhd.grid import Grid, abc_field, resample, single_mode_field
from emhd.diagnostics import (
    criterion_norms,
    cross_energy_residual,
    energy_inequality_residual,
    flux_spectrum,
    generalized_helicity_residual,
    constant_test_function,
    scaling_residual,
    separable_test_function,
    uniqueness_bound_check,
)
from emhd.littlewood_paley import (
    BesovSpec,
    LPFamily,
    bernstein_margin,
    besov_norm,
    decompose,
    kernel_convolve,
    project_shell,
    shell_amplitudes,
)
from emhd.operators import (
    l2_norm,
    relative_l2_difference,
    residual_curl_cross_expansion,
    residual_curl_of_cross,
    residual_curl_of_scalar_product,
    residual_div_of_scalar_product,
    residual_grad_of_scalar_product,
)
from emhd.regions import classify
from emhd.solver import SolverConfig, evolve, evolve_potential, random_shell_field
from conftest import random_field, random_scalar

VOLUME = (2.0 * math.pi) ** 3


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\n[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def ideal_run():
    cfg = SolverConfig(n=32, mu=0.0, d_i=1.0, dt=5e-4, t_end=0.25, snapshot_every=100,
                       init="random_shells", q_lo=1, q_hi=3, seed=6)
    return evolve(cfg)


class TestAcceptance:
    def test_beltrami_exact_solution(self):
        cfg = SolverConfig(n=32, mu=0.1, d_i=1.0, dt=1e-3, t_end=1.0, snapshot_every=200)
        started = time.perf_counter()
        traj = evolve(cfg)
        elapsed = time.perf_counter() - started
        expect = math.exp(-0.1) * abc_field(Grid(32))
        err = relative_l2_difference(traj.final, expect)
        report(
            "beltrami_exact_solution",
            err <= 1e-8 and elapsed <= 30.0,
            f"rel_err={err:.2e} (<=1e-8), runtime={elapsed:.1f}s (<=30s)",
        )

    def test_vector_identity_suite(self, grid64):
        worst = 0.0
        for draw in range(20):
            phi = random_scalar(grid64, k_max=4, seed=1000 + draw)
            a = random_field(grid64, q_lo=1, q_hi=3, seed=2000 + draw)
            b = random_field(grid64, q_lo=1, q_hi=3, seed=3000 + draw)
            residuals = (
                residual_grad_of_scalar_product(phi, a),
                residual_div_of_scalar_product(phi, a),
                residual_curl_of_scalar_product(phi, a),
                residual_curl_of_cross(a, b),
                residual_curl_cross_expansion(a, b),
            )
            worst = max(worst, max(residuals))
        report("vector_identity_suite", worst <= 1e-10,
               f"worst residual over 20 fields x 5 identities = {worst:.2e} (<=1e-10)")

    def test_energy_inequality(self, ideal_run):
        cfg = SolverConfig(n=32, mu=0.05, d_i=1.0, dt=5e-4, t_end=0.25, snapshot_every=100,
                           init="random_shells", q_lo=1, q_hi=2, seed=6)
        resistive = abs(energy_inequality_residual(evolve(cfg)))
        e = np.asarray(ideal_run.log.energy)
        drift = abs(e[-1] - e[0]) / e[0]
        report(
            "energy_inequality",
            resistive <= 1e-6 and drift <= 1e-6,
            f"resistive residual={resistive:.2e} (<=1e-6), ideal drift={drift:.2e} (<=1e-6)",
        )

    def test_ideal_helicity_conservation(self, ideal_run):
        h = np.asarray(ideal_run.log.helicity)
        drift = np.max(np.abs(h - h[0])) / abs(h[0])
        report("ideal_helicity_conservation", drift <= 1e-6,
               f"|H0|={abs(h[0]):.3e}, max relative drift={drift:.2e} (<=1e-6)")

    def test_littlewood_paley_family(self, grid64, grid32):
        part64 = LPFamily(grid64).partition_defect_full()
        part32 = LPFamily(grid32).partition_defect_full()
        f = random_field(grid32, q_lo=0, q_hi=4, seed=50)
        recon = l2_norm(decompose(f).reconstruct() - f) / l2_norm(f)
        law_err = 0.0
        s = 0.7
        for j in range(1, 5):
            mode = single_mode_field(grid64, 2**j)
            val = besov_norm(mode, BesovSpec(s=s, p=math.inf))
            law_err = max(law_err, abs(val - 2.0 ** (s * j)) / 2.0 ** (s * j))
        ok = part64 <= 1e-12 and part32 <= 1e-12 and recon <= 1e-12 and law_err <= 1e-10
        report(
            "littlewood_paley_family",
            ok,
            f"partition defect={max(part64, part32):.2e} (<=1e-12), "
            f"reconstruction={recon:.2e} (<=1e-12), 2^sj law err={law_err:.2e} (<=1e-10)",
        )

    def test_bernstein_margins(self, grid64):
        per_shell = {}
        draws_per_shell = 13  # 52 draws total across shells 2..5
        for q in (2, 3, 4, 5):
            ratios = []
            for d in range(draws_per_shell):
                f = project_shell(random_field(grid64, q_lo=q, q_hi=q, seed=7000 + 97 * q + d), q)
                ratios.append(bernstein_margin(f, s=2.0, r=math.inf))
            per_shell[q] = ratios
        overall = max(max(r) for r in per_shell.values())
        means = [float(np.mean(per_shell[q])) for q in (2, 3, 4, 5)]
        trend_ok = all(means[i + 1] <= means[i] * 1.05 for i in range(3))
        report(
            "bernstein_margins",
            overall <= 3.0 and trend_ok,
            f"max ratio={overall:.3f} (<=3), shell means={[f'{m:.3f}' for m in means]} non-increasing",
        )

    def test_flux_spectrum(self, grid32):
        # Beltrami field: every flux vanishes
        b_abc = abc_field(grid32)
        spec_abc = flux_spectrum(b_abc, 4)
        abc_scale = l2_norm(b_abc) ** 3
        abc_max = max(np.max(np.abs(spec_abc.helicity_flux)),
                      np.max(np.abs(spec_abc.energy_flux)))

        # two-mode field against the 128^3 brute-force quadrature oracle
        b2 = single_mode_field(grid32, 4) + single_mode_field(
            grid32, 2, component=0, axis=1, amplitude=0.5
        )
        spec2 = flux_spectrum(b2, 3)
        scale2 = l2_norm(b2) ** 3
        err_two = self._two_mode_oracle_error(spec2, scale2)

        # triad field with genuinely nonzero transfer, same oracle route
        err_triad, flux_mag = self._triad_oracle_error()

        # localization-kernel tail decay
        b_loc = random_field(grid32, q_lo=1, q_hi=2, seed=60)
        amps = shell_amplitudes(b_loc).b_squared()
        q_a = 2
        qs = np.arange(q_a + 1, q_a + 5)
        vals = np.array([kernel_convolve(amps, "K", int(q)) for q in qs])
        slope = np.polyfit(qs * math.log(2.0), np.log(vals), 1)[0]

        ok = (
            abc_max <= 1e-12 * abc_scale
            and err_two <= 1e-8
            and err_triad <= 1e-8
            and abs(slope + 4.0 / 3.0) <= 0.15
        )
        report(
            "flux_spectrum",
            ok,
            f"ABC flux={abc_max:.1e} (<=1e-12*scale), two-mode oracle err={err_two:.1e} (<=1e-8), "
            f"triad oracle err={err_triad:.1e} at |H_Q|={flux_mag:.1f}, tail slope={slope:.3f} (-4/3 +/- 0.15)",
        )

    @staticmethod
    def _chi(rho):
        u = np.clip((np.asarray(rho, dtype=float) - 0.75) * 4.0, 0.0, 1.0)
        return 1.0 - u**3 * (10.0 + u * (-15.0 + 6.0 * u))

    def _two_mode_oracle_error(self, spec, scale):
        """Closed-form trig quadrature at 128^2 (fields depend on x1, x2 only)."""
        n = 128
        x = np.arange(n) * 2 * math.pi / n
        y1, y2 = x[:, None], x[None, :]
        zero = np.zeros((n, n))
        bv = np.stack([0.5 * np.cos(2 * y2) + zero, np.cos(4 * y1) + zero, zero])
        jz = -4.0 * np.sin(4 * y1) + np.sin(2 * y2)
        lor = np.stack([-jz * bv[1], jz * bv[0], zero])
        cell = (2 * math.pi / n) ** 2 * (2 * math.pi)
        worst = 0.0
        for i, q in enumerate(spec.q_values):
            lam = 2.0 ** (int(q) + 1)
            w4 = float(self._chi(4.0 / lam)) ** 2
            w2 = float(self._chi(2.0 / lam)) ** 2
            bw = np.stack([w2 * 0.5 * np.cos(2 * y2) + zero, w4 * np.cos(4 * y1) + zero, zero])
            jw = np.stack([zero, zero, w4 * (-4.0 * np.sin(4 * y1)) + w2 * np.sin(2 * y2)])
            h_oracle = 2.0 * cell * np.sum(lor * bw)
            pi_oracle = cell * np.sum(lor * jw)
            worst = max(
                worst,
                abs(spec.helicity_flux[i] - h_oracle) / scale,
                abs(spec.energy_flux[i] - pi_oracle) / scale,
            )
        return worst

    def _triad_oracle_error(self):
        """Three interacting modes (0,0,1), (0,2,0), (0,2,1): nonzero flux
        through Q = 0, checked against an FD-curl + quadrature oracle."""
        a_, b_, c_ = 1.0, 0.7, 0.5
        grid = Grid(32)
        _, x2, x3 = grid.meshgrid()

        def mode_parts(y2, y3):
            zero = np.zeros(np.broadcast(y2, y3).shape)
            b1 = np.stack([np.cos(y3) + zero, np.sin(y3) + zero, zero])
            b2 = np.stack([np.cos(2 * y2) + zero, zero, np.sin(2 * y2) + zero])
            b3 = np.stack([np.cos(2 * y2 + y3) + zero, zero, zero])
            j3 = np.stack([zero, -np.sin(2 * y2 + y3) + zero, 2 * np.sin(2 * y2 + y3) + zero])
            return b1, b2, b3, -b1, 2 * b2, j3

        from emhd.grid import from_physical

        b1, b2, b3, *_ = mode_parts(x2, x3)
        field = from_physical(grid, a_ * b1 + b_ * b2 + c_ * b3)
        spec = flux_spectrum(field, 2)
        scale = l2_norm(field) ** 3

        n = 128
        h = 2 * math.pi / n
        x = np.arange(n) * h
        y2, y3 = x[:, None], x[None, :]
        b1, b2, b3, j1, j2, j3 = mode_parts(y2, y3)
        bv = a_ * b1 + b_ * b2 + c_ * b3

        def ddx(f, axis):
            out = np.zeros_like(f)
            for s, w in ((-4, -1 / 280), (-3, 4 / 105), (-2, -1 / 5), (-1, 4 / 5),
                         (1, -4 / 5), (2, 1 / 5), (3, -4 / 105), (4, 1 / 280)):
                out += w * np.roll(f, s, axis=axis)
            return out / h

        j_fd = np.stack([
            ddx(bv[2], 0) - ddx(bv[1], 1),
            ddx(bv[0], 1),
            -ddx(bv[0], 0),
        ])
        lor = np.cross(j_fd, bv, axis=0)
        cell = (2 * math.pi / n) ** 2 * (2 * math.pi)
        worst = 0.0
        flux_mag = 0.0
        for i, q in enumerate(spec.q_values):
            lam = 2.0 ** (int(q) + 1)
            w1 = float(self._chi(1.0 / lam)) ** 2
            w2 = float(self._chi(2.0 / lam)) ** 2
            w3 = float(self._chi(math.sqrt(5.0) / lam)) ** 2
            bw = a_ * w1 * b1 + b_ * w2 * b2 + c_ * w3 * b3
            jw = a_ * w1 * j1 + b_ * w2 * j2 + c_ * w3 * j3
            for got, oracle in (
                (spec.helicity_flux[i], 2.0 * cell * np.sum(lor * bw)),
                (spec.energy_flux[i], cell * np.sum(lor * jw)),
            ):
                # strict relative match on real transfer values; entries that
                # vanish by orthogonality are held to the dimensional scale
                denom = abs(oracle) if abs(oracle) > 1e-3 * scale else scale
                worst = max(worst, abs(got - oracle) / denom)
            flux_mag = max(flux_mag, abs(2.0 * cell * np.sum(lor * bw)))
        assert flux_mag > 1.0, "triad flux should be order one"
        return worst, flux_mag

    def test_generalized_helicity_identity(self):
        cfg = SolverConfig(n=16, mu=0.1, d_i=1.0, dt=1e-3, t_end=0.2, snapshot_every=1)
        beltrami = abs(
            generalized_helicity_residual(evolve_potential(cfg), constant_test_function(Grid(16)))
        )

        b0 = random_shell_field(Grid(32), 1, 1, seed=12)

        def refined(n, dt):
            cfg_r = SolverConfig(n=n, mu=0.05, d_i=1.0, dt=dt, t_end=0.1, snapshot_every=4)
            traj = evolve_potential(cfg_r, b0=resample(b0, n))
            return generalized_helicity_residual(traj, separable_test_function(Grid(n), 0.1))

        coarse = abs(refined(32, 1e-3))
        fine = abs(refined(64, 5e-4))
        ratio = coarse / fine
        # trapezoid in time dominates, so the contraction limit is exactly 4;
        # allow the asymptote to be approached from below
        report(
            "generalized_helicity_identity",
            beltrami <= 1e-7 and ratio >= 3.9,
            f"phi=1 Beltrami residual={beltrami:.2e} (<=1e-7), "
            f"refinement {coarse:.2e} -> {fine:.2e}, contraction x{ratio:.3f} (>=3.9)",
        )

    def test_uniqueness_machinery(self, grid32):
        # cross-energy identity residual halves (in fact quarters) with dt
        pert3 = random_shell_field(grid32, 3, 3, seed=77)

        def en1(dt):
            cfg = SolverConfig(n=32, mu=0.1, d_i=1.0, dt=dt, t_end=0.2, snapshot_every=10)
            t1 = evolve(cfg)
            t2 = evolve(cfg, b0=abc_field(grid32) + 1e-3 * pert3)
            _, res = cross_energy_residual(t1, t2)
            return float(np.max(np.abs(res)))

        r_dt = en1(1e-3)
        r_half = en1(5e-4)

        # Gronwall bound over a 10-seed ensemble on an active base flow
        base0 = random_shell_field(grid32, 1, 2, seed=42)

        def ensemble_fit(dt):
            cfg = SolverConfig(n=32, mu=0.005, d_i=1.0, dt=dt, t_end=0.25, snapshot_every=25)
            base = evolve(cfg, b0=base0)
            crit = criterion_norms(base, 3.0, 1.0)
            fits, all_ok = [], True
            for seed in range(10):
                pert = random_shell_field(grid32, 2, 2, seed=100 + seed)
                other = evolve(cfg, b0=base0 + 1e-3 * pert)
                rep = uniqueness_bound_check(base, other, 3.0, 2.0, 1.0, crit=crit)
                fits.append(rep.fitted_c)
                all_ok = all_ok and bool(np.all(rep.bound_ok))
            return max(fits), all_ok

        c_coarse, ok_coarse = ensemble_fit(1e-3)
        c_fine, ok_fine = ensemble_fit(5e-4)
        stable = 0.5 <= c_coarse / c_fine <= 2.0 and c_coarse > 0
        ok = r_dt <= 1e-5 and r_half <= 0.6 * r_dt and ok_coarse and ok_fine and stable
        report(
            "uniqueness_machinery",
            ok,
            f"en1 residual={r_dt:.2e} (<=1e-5) halving to {r_half:.2e}, "
            f"ensemble C={c_coarse:.4f} -> {c_fine:.4f} under dt/2 (within 2x), bound holds",
        )

    def test_scaling_symmetry(self):
        b0 = random_shell_field(Grid(64), 1, 1, seed=5)
        cfg = SolverConfig(n=64, mu=0.05, d_i=1.0, dt=1e-3, t_end=0.05, snapshot_every=50)
        res = scaling_residual(b0, cfg, 2)
        report("scaling_symmetry", res <= 1e-6, f"lambda=2 residual={res:.2e} (<=1e-6)")

    def test_region_classifier(self):
        cases = [
            ((3.0, 2.0, 1.0), "uniqueness_region"),
            ((math.inf, 1.0, 1.0), "excluded_boundary"),
            ((1.5, 4.0, 1.0), "excluded_boundary"),
            ((3.0, math.inf, None), "region_II_regular"),
        ]
        results = [(args, classify(*args).classification) for args, _ in cases]
        ok = all(got == want for (_, got), (_, want) in zip(results, cases))
        report(
            "region_classifier",
            ok,
            "; ".join(f"{args}->{got}" for (args, got) in results),
        )
