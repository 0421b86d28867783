"""Time integration of the electron-MHD system on the torus.

The magnetic field obeys

    dB/dt = -d_i curl((curl B) x B) + mu Laplacian(B),    div B = 0,

with the stiff diffusion handled exactly by the integrating factor
exp(-mu |k|^2 dt) and the quadratic Hall term advanced explicitly under a
whistler-wave step-size gate (waves oscillate at ~ d_i |B| |k|^2, which sets
the stability limit for any explicit scheme).

The potential form advances A with B = curl A and

    dA/dt = -d_i P((curl B) x B) + mu Laplacian(A),

where P is the divergence-free projection fixing the Coulomb gauge.  Taking
the curl of this equation reproduces the B equation above exactly, including
at the discrete level, so both formulations yield the same B trajectory up
to roundoff.  (Note the sign: the potential equation printed with
+d_i (curl B) x B would, after a curl, flip the sign of the Hall term in the
B equation; this solver treats the B equation as canonical.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.fft as _fft

from .grid import Grid, SpectralField, _workers, abc_field, from_physical, single_mode_field
from .littlewood_paley import lam, phi_symbol, q_max_for
from .operators import (
    biot_savart,
    curl,
    cross_product,
    h1_seminorm,
    inner_product,
    l2_norm,
    leray_project,
    lp_norm,
)


class ConfigError(ValueError):
    """Invalid solver configuration; the message names the offending key."""


class InstabilityError(RuntimeError):
    """Blow-up detected mid-run; carries the trajectory up to the last stable step."""

    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


INTEGRATORS = ("ifrk4", "imex_cn")
INITS = ("abc", "random_shells", "single_mode", "file")


@dataclass(frozen=True)
class SolverConfig:
    n: int = 32
    mu: float = 0.1
    d_i: float = 1.0
    dt: float = 1e-3
    t_end: float = 1.0
    integrator: str = "ifrk4"
    init: str = "abc"
    seed: int = 0
    q_lo: int = 1
    q_hi: int = 3
    snapshot_every: int = 10
    cfl_safety: float = 0.5
    out_dir: str = "emhd_run"

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ConfigError(f"mu must be nonnegative, got {self.mu}")
        if self.d_i < 0:
            raise ConfigError(f"d_i must be nonnegative, got {self.d_i}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")
        if self.integrator not in INTEGRATORS:
            raise ConfigError(
                f"integrator must be one of {INTEGRATORS}, got {self.integrator!r}"
            )
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be a positive step count")
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        base = self.init.split(":", 1)[0]
        if base not in INITS:
            raise ConfigError(f"init must be one of {INITS}, got {self.init!r}")

    @property
    def grid(self) -> Grid:
        return Grid(self.n)


@dataclass
class StepLog:
    """Per-step scalar record; linf is the collocation-grid maximum."""

    t: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    helicity: list[float] = field(default_factory=list)
    l2: list[float] = field(default_factory=list)
    linf: list[float] = field(default_factory=list)
    grad_l2: list[float] = field(default_factory=list)

    def append(self, t: float, b: SpectralField) -> None:
        bl2 = l2_norm(b)
        self.t.append(t)
        self.energy.append(0.5 * bl2 * bl2)
        self.helicity.append(helicity_of(b))
        self.l2.append(bl2)
        self.linf.append(float(np.max(np.sqrt(np.sum(b.to_physical() ** 2, axis=0)))))
        self.grad_l2.append(h1_seminorm(b))

    def as_arrays(self) -> dict[str, np.ndarray]:
        return {
            "t": np.asarray(self.t),
            "E": np.asarray(self.energy),
            "H": np.asarray(self.helicity),
            "l2": np.asarray(self.l2),
            "linf": np.asarray(self.linf),
            "grad_l2": np.asarray(self.grad_l2),
        }


@dataclass(frozen=True)
class Trajectory:
    config: SolverConfig
    snapshots: list[SpectralField]
    potentials: list[SpectralField] | None
    log: StepLog

    @property
    def times(self) -> np.ndarray:
        return np.asarray([s.time for s in self.snapshots])

    @property
    def final(self) -> SpectralField:
        return self.snapshots[-1]


def helicity_of(b: SpectralField, a: SpectralField | None = None) -> float:
    """Magnetic helicity int A . B with the Coulomb-gauge potential."""
    if a is None:
        a = biot_savart(b)
    return inner_product(a, b)


# -- initial conditions ------------------------------------------------------


def random_shell_field(grid: Grid, q_lo: int, q_hi: int, seed: int) -> SpectralField:
    """Isotropic divergence-free Gaussian field confined to shells [q_lo, q_hi],
    normalized to unit energy.  The draw is fixed by the seed."""
    if q_lo < -1 or q_hi < q_lo:
        raise ConfigError(f"shell range [{q_lo}, {q_hi}] is invalid (key q_lo/q_hi)")
    if q_hi > q_max_for(grid):
        raise ConfigError(f"q_hi={q_hi} exceeds the grid spectrum (key q_hi)")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((3, grid.n, grid.n, grid.n))
    f = from_physical(grid, noise)
    km = grid.k_magnitude
    mask = np.zeros_like(km)
    for q in range(q_lo, q_hi + 1):
        mask += phi_symbol(km / lam(q)) if q >= 0 else np.where(km == 0.0, 1.0, 0.0)
    f = f.with_coeffs(f.coeffs * np.minimum(mask, 1.0))
    f = leray_project(f).dealias().zero_mean()
    norm = l2_norm(f)
    if norm == 0.0:
        raise ConfigError("shell range selected no modes (key q_lo/q_hi)")
    return f * (math.sqrt(2.0) / norm)  # energy (1/2)||B||^2 = 1


def initial_field(cfg: SolverConfig) -> SpectralField:
    kind, _, arg = cfg.init.partition(":")
    grid = cfg.grid
    if kind == "abc":
        return abc_field(grid)
    if kind == "random_shells":
        return random_shell_field(grid, cfg.q_lo, cfg.q_hi, cfg.seed)
    if kind == "single_mode":
        try:
            k = int(arg) if arg else 4
        except ValueError as exc:
            raise ConfigError(f"single_mode wavenumber {arg!r} is not an integer (key init)") from exc
        if abs(k) > grid.dealias_cutoff:
            raise ConfigError(f"single_mode wavenumber {k} above the dealias cutoff (key init)")
        return single_mode_field(grid, k)
    if kind == "file":
        from .snapshots import read_snapshot

        if not arg:
            raise ConfigError("init=file needs a path, e.g. file:run/snap.emhd (key init)")
        snap = read_snapshot(arg)
        if snap.field.grid.n != cfg.n:
            raise ConfigError(
                f"snapshot grid n={snap.field.grid.n} does not match config n={cfg.n} (key n)"
            )
        return snap.field.with_time(0.0)
    raise ConfigError(f"unknown init {cfg.init!r} (key init)")


# -- stability gate ----------------------------------------------------------


def whistler_dt_limit(b: SpectralField, cfg: SolverConfig) -> float:
    """Explicit step limit 1 / (d_i ||B||_inf k_max^2) for whistler waves."""
    b_inf = lp_norm(b, math.inf)
    k_max = float(b.grid.dealias_cutoff)
    denom = cfg.d_i * b_inf * k_max * k_max
    return math.inf if denom == 0.0 else 1.0 / denom


def validate_timestep(b0: SpectralField, cfg: SolverConfig) -> None:
    limit = whistler_dt_limit(b0, cfg)
    if cfg.dt > cfg.cfl_safety * limit:
        raise ConfigError(
            f"dt={cfg.dt:g} exceeds cfl_safety*whistler limit "
            f"{cfg.cfl_safety:g}*{limit:g} (key cfl_safety)"
        )


# -- single-step integrators --------------------------------------------------
#
# The hot loop works on the Hermitian half-spectrum (rfft layout, last axis
# 0..n/2), which halves both transform and arithmetic cost; fields convert
# to the full coefficient cube only at step boundaries.


@lru_cache(maxsize=16)
def _half_kit(n: int):
    """Broadcastable ik arrays, dealias mask, and 1/k^2 on the half cube."""
    grid = Grid(n)
    k = grid.wavenumbers.astype(np.float64)
    kh = np.abs(k[: n // 2 + 1])
    ik1 = (1j * k)[:, None, None]
    ik2 = (1j * k)[None, :, None]
    ik3 = (1j * kh)[None, None, :]
    cut = grid.dealias_cutoff
    mask = (
        (np.abs(k)[:, None, None] <= cut)
        & (np.abs(k)[None, :, None] <= cut)
        & (kh[None, None, :] <= cut)
    )
    k2 = (
        k[:, None, None] ** 2 + k[None, :, None] ** 2 + kh[None, None, :] ** 2
    )
    k2_safe = k2.copy()
    k2_safe[0, 0, 0] = 1.0
    for arr in (ik1, ik2, ik3, mask, k2, k2_safe):
        arr.flags.writeable = False
    return ik1, ik2, ik3, mask, k2, 1.0 / k2_safe


def _to_half(c: np.ndarray) -> np.ndarray:
    n = c.shape[-1]
    return np.ascontiguousarray(c[..., : n // 2 + 1])


def _to_full(ch: np.ndarray, n: int) -> np.ndarray:
    """Hermitian extension of the half cube back to the full cube."""
    full = np.empty(ch.shape[:-1] + (n,), dtype=np.complex128)
    full[..., : n // 2 + 1] = ch
    seg = np.conj(ch[..., ::-1, ::-1, 1 : n // 2])  # k3 = n/2-1 .. 1, mirrored
    seg = np.roll(seg, 1, axis=-3)
    seg = np.roll(seg, 1, axis=-2)
    full[..., n // 2 + 1 :] = seg[..., ::-1]
    return full


def _half_curl(ch: np.ndarray, kit, out: np.ndarray) -> None:
    ik1, ik2, ik3 = kit[0], kit[1], kit[2]
    out[0] = ik2 * ch[2] - ik3 * ch[1]
    out[1] = ik3 * ch[0] - ik1 * ch[2]
    out[2] = ik1 * ch[1] - ik2 * ch[0]


def _half_leray_dealias(ch: np.ndarray, kit) -> np.ndarray:
    ik1, ik2, ik3, mask, _, inv_k2 = kit
    ch = ch * mask
    kdot = (ik1 * ch[0] + ik2 * ch[1] + ik3 * ch[2]) * inv_k2
    ch[0] += ik1 * kdot
    ch[1] += ik2 * kdot
    ch[2] += ik3 * kdot
    ch[:, 0, 0, 0] = 0.0
    return ch


class _HallEvaluator:
    """Fused half-spectrum evaluation of the Hall right-hand side.

    One batched inverse transform carries curl(B) and B to collocation
    points; the cross product is formed componentwise and transformed back
    under the two-thirds mask.  ``potential_form`` swaps the final curl for
    the divergence-free projection, yielding the A-equation force.
    """

    def __init__(self, grid: Grid, d_i: float, potential_form: bool = False):
        self.grid = grid
        self.d_i = d_i
        self.potential_form = potential_form
        self.kit = _half_kit(grid.n)
        self.workers = _workers(grid.n)
        n = grid.n
        self._buf = np.empty((6, n, n, n // 2 + 1), dtype=np.complex128)

    def __call__(self, ch: np.ndarray) -> np.ndarray:
        if self.d_i == 0.0:
            return np.zeros_like(ch)
        n = self.grid.n
        kit = self.kit
        if self.potential_form:
            b = np.empty_like(ch)
            _half_curl(ch, kit, b)  # B = curl A
        else:
            b = ch
        buf = self._buf
        _half_curl(b, kit, buf[:3])  # J = curl B
        buf[3:] = b
        vals = _fft.irfftn(buf, s=(n, n, n), axes=(1, 2, 3), workers=self.workers)
        jv, bv = vals[:3], vals[3:]
        lor = np.empty_like(vals[:3])
        lor[0] = jv[1] * bv[2] - jv[2] * bv[1]
        lor[1] = jv[2] * bv[0] - jv[0] * bv[2]
        lor[2] = jv[0] * bv[1] - jv[1] * bv[0]
        lc = _fft.rfftn(lor, axes=(1, 2, 3), workers=self.workers)
        lc *= kit[3] * float(n) ** 3  # mask, and undo the irfft/rfft 1/n^3
        out = np.empty_like(ch)
        ik1, ik2, ik3 = kit[0], kit[1], kit[2]
        if self.potential_form:
            # divergence-free projection of the Lorentz force (Coulomb gauge)
            kdot = (ik1 * lc[0] + ik2 * lc[1] + ik3 * lc[2]) * kit[5]
            out[0] = lc[0] + ik1 * kdot
            out[1] = lc[1] + ik2 * kdot
            out[2] = lc[2] + ik3 * kdot
            out[:, 0, 0, 0] = 0.0
        else:
            _half_curl(lc, kit, out)
        out *= -self.d_i
        return out


@lru_cache(maxsize=32)
def _decay_factors(n: int, mu: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    k2 = _half_kit(n)[4]
    half = np.exp(-0.5 * mu * dt * k2)
    full = half * half
    half.flags.writeable = False
    full.flags.writeable = False
    return half, full


def _advance_ifrk4(c0: np.ndarray, rhs, n: int, mu: float, dt: float) -> np.ndarray:
    e_half, e_full = _decay_factors(n, mu, dt)
    k1 = rhs(c0)
    k2 = rhs(e_half * (c0 + 0.5 * dt * k1))
    k3 = rhs(e_half * c0 + 0.5 * dt * k2)
    k4 = rhs(e_full * c0 + dt * e_half * k3)
    return e_full * c0 + (dt / 6.0) * (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4)


def _advance_imex_cn(c0: np.ndarray, rhs, n: int, mu: float, dt: float) -> np.ndarray:
    k2 = _half_kit(n)[4]
    num = 1.0 - 0.5 * mu * dt * k2
    den = 1.0 + 0.5 * mu * dt * k2
    n0 = rhs(c0)
    pred = (num * c0 + dt * n0) / den
    n1 = rhs(pred)
    return (num * c0 + 0.5 * dt * (n0 + n1)) / den


_ADVANCERS = {"ifrk4": _advance_ifrk4, "imex_cn": _advance_imex_cn}


def step(
    b: SpectralField,
    cfg: SolverConfig,
    dt: float | None = None,
    _rhs: "_HallEvaluator | None" = None,
) -> SpectralField:
    """Advance one step; output is dealiased, divergence-free, mean-zero."""
    h = cfg.dt if dt is None else dt
    rhs = _rhs if _rhs is not None else _HallEvaluator(b.grid, cfg.d_i)
    n = b.grid.n
    ch = _ADVANCERS[cfg.integrator](_to_half(b.coeffs), rhs, n, cfg.mu, h)
    ch = _half_leray_dealias(ch, _half_kit(n))
    if not np.all(np.isfinite(ch)):
        raise InstabilityError(
            "non-finite field after step: the explicit Hall term exceeded the "
            f"whistler CFL (limit now {whistler_dt_limit(b, cfg):g}, dt {h:g})"
        )
    return b.with_coeffs(_to_full(ch, n), time=b.time + h)


def _step_count(cfg: SolverConfig) -> tuple[int, float]:
    if cfg.t_end == 0.0:
        return 0, cfg.dt
    n_steps = max(1, math.ceil(cfg.t_end / cfg.dt - 1e-9))
    last = cfg.t_end - (n_steps - 1) * cfg.dt
    return n_steps, last


def evolve(cfg: SolverConfig, b0: SpectralField | None = None) -> Trajectory:
    """Integrate B from the configured initial condition to t_end.

    Deterministic given the config: the seed fixes the draw and all
    reductions run in a fixed order.  On instability the partial trajectory
    is attached to the raised error.
    """
    b = initial_field(cfg) if b0 is None else leray_project(b0.dealias()).with_time(0.0)
    validate_timestep(b, cfg)
    n_steps, last_dt = _step_count(cfg)
    rhs = _HallEvaluator(cfg.grid, cfg.d_i)
    log = StepLog()
    log.append(0.0, b)
    snaps = [b]
    try:
        for i in range(1, n_steps + 1):
            h = cfg.dt if i < n_steps else last_dt
            b = step(b, cfg, h, _rhs=rhs)
            b = b.with_time(min(b.time, cfg.t_end))
            log.append(b.time, b)
            if i % cfg.snapshot_every == 0 or i == n_steps:
                snaps.append(b)
    except InstabilityError as exc:
        raise InstabilityError(
            str(exc), Trajectory(cfg, snaps, None, log)
        ) from None
    return Trajectory(cfg, snaps, None, log)


def evolve_potential(cfg: SolverConfig, b0: SpectralField | None = None) -> Trajectory:
    """Integrate the Coulomb-gauge potential; snapshots carry both A and B = curl A."""
    b_init = initial_field(cfg) if b0 is None else leray_project(b0.dealias()).with_time(0.0)
    validate_timestep(b_init, cfg)
    a = biot_savart(b_init)
    rhs = _HallEvaluator(cfg.grid, cfg.d_i, potential_form=True)
    n_steps, last_dt = _step_count(cfg)
    log = StepLog()
    log.append(0.0, b_init)
    snaps_b = [b_init]
    snaps_a = [a]
    t = 0.0
    kit = _half_kit(cfg.n)
    for i in range(1, n_steps + 1):
        h = cfg.dt if i < n_steps else last_dt
        ch = _ADVANCERS[cfg.integrator](_to_half(a.coeffs), rhs, cfg.n, cfg.mu, h)
        ch = _half_leray_dealias(ch, kit)
        t = min(t + h, cfg.t_end)
        if not np.all(np.isfinite(ch)):
            raise InstabilityError(
                "non-finite potential after step (whistler CFL exceeded)",
                Trajectory(cfg, snaps_b, snaps_a, log),
            )
        a = a.with_coeffs(_to_full(ch, cfg.n), time=t)
        b_now = curl(a)
        log.append(t, b_now)
        if i % cfg.snapshot_every == 0 or i == n_steps:
            snaps_b.append(b_now)
            snaps_a.append(a)
    return Trajectory(cfg, snaps_b, snaps_a, log)


def with_potentials(traj: Trajectory) -> Trajectory:
    """Attach Coulomb-gauge potentials to a B trajectory via Biot-Savart."""
    if traj.potentials is not None:
        return traj
    pots = [biot_savart(b) for b in traj.snapshots]
    return replace(traj, potentials=pots)
