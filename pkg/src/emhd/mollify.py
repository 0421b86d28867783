"""Mollification machinery: bump profiles, field mollifiers, singular-curve
cutoffs, and derivative-norm diagnostics for the cutoff.

The spatial mollifier is the standard bump c * exp(-1/(1 - |y|^2)) on the
unit ball, normalized to unit mass; scaled copies act on fields as the
Fourier multiplier eta_hat(delta * k), which commutes with every spectral
derivative by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import TWO_PI, Grid, SpectralField, from_physical


class ParameterError(ValueError):
    pass


# -- bump profiles ----------------------------------------------------------


def _bump(u: np.ndarray) -> np.ndarray:
    """exp(-1/(1-u^2)) on |u| < 1, zero outside (unnormalized)."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


@lru_cache(maxsize=4)
def _gauss_rule(nodes: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@lru_cache(maxsize=1)
def _bump_mass_3d() -> float:
    r, w = _gauss_rule(400, 0.0, 1.0)
    return float(4.0 * math.pi * np.sum(w * r * r * _bump(r)))


@lru_cache(maxsize=1)
def _bump_mass_1d() -> float:
    r, w = _gauss_rule(400, -1.0, 1.0)
    return float(np.sum(w * _bump(r)))


def profile_3d(rho: np.ndarray) -> np.ndarray:
    """Unit-mass radial mollifier on the unit ball of R^3."""
    return _bump(rho) / _bump_mass_3d()


def profile_1d(tau: np.ndarray) -> np.ndarray:
    """Unit-mass even mollifier on [-1, 1], used for curve smoothing."""
    return _bump(tau) / _bump_mass_1d()


def profile_mass_3d() -> float:
    """Quadrature of the normalized profile; equals 1 up to quadrature error."""
    r, w = _gauss_rule(400, 0.0, 1.0)
    return float(4.0 * math.pi * np.sum(w * r * r * profile_3d(r)))


def profile_transform(s) -> np.ndarray:
    """eta_hat(s) = int eta(y) exp(-i s.y) dy for radial arguments s = |xi|.

    Real, eta_hat(0) = 1; evaluated by Gauss quadrature of
    (4 pi / s) int_0^1 eta(rho) rho sin(s rho) drho.
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    r, w = _gauss_rule(400, 0.0, 1.0)
    eta_r = profile_3d(r)
    sr = np.multiply.outer(s, r)
    integ = np.where(
        s[:, None] > 1e-12,
        np.sin(sr) / np.where(sr == 0.0, 1.0, sr),
        1.0 - sr**2 / 6.0,
    )
    vals = 4.0 * math.pi * (integ * (w * r * r * eta_r)[None, :]).sum(axis=1)
    return vals


# -- field mollification -----------------------------------------------------


@dataclass(frozen=True)
class MollifierSpec:
    """Mollification radius delta and singular-curve cutoff scale epsilon."""

    delta: float
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if self.delta <= 0.0:
            raise ParameterError(f"mollifier radius must be positive, got {self.delta}")
        if self.epsilon <= 0.0:
            raise ParameterError(f"cutoff scale must be positive, got {self.epsilon}")


def mollify(f: SpectralField, spec: MollifierSpec) -> SpectralField:
    """Convolution with the delta-scaled bump, as the multiplier eta_hat(delta k)."""
    if spec.delta >= math.pi:
        raise ParameterError("mollifier support must fit in half the domain period")
    return f.with_coeffs(f.coeffs * mollifier_multiplier(f.grid, spec.delta))


def mollifier_multiplier(grid: Grid, delta: float) -> np.ndarray:
    km = grid.k_magnitude
    flat = profile_transform(delta * km.ravel())
    return flat.reshape(km.shape)


# -- singular curves ---------------------------------------------------------


@dataclass(frozen=True)
class SingularCurve:
    """A curve t -> s(t) in the torus, sampled at increasing times."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=np.float64)
        p = np.asarray(self.points, dtype=np.float64)
        if t.ndim != 1 or p.shape != (t.size, 3):
            raise ParameterError("curve needs times (m,) and points (m, 3)")
        if t.size < 1 or np.any(np.diff(t) <= 0.0) and t.size > 1:
            raise ParameterError("curve times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", p)

    @property
    def hoelder_seminorm(self) -> float:
        """Largest |s(t1)-s(t2)| / |t1-t2|^(1/2) over sample pairs."""
        t, p = self.times, self.points
        if t.size < 2:
            return 0.0
        dt = np.abs(t[:, None] - t[None, :])
        dist = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)
        mask = dt > 0.0
        return float(np.max(dist[mask] / np.sqrt(dt[mask])))

    def at(self, t) -> np.ndarray:
        """Constant-extension linear interpolation (s^ext of the smoothing step)."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if self.times.size == 1:
            return np.repeat(self.points, t.size, axis=0)
        return np.stack(
            [np.interp(t, self.times, self.points[:, c]) for c in range(3)], axis=1
        )


def constant_curve(x0, t_end: float = 1.0, samples: int = 9) -> SingularCurve:
    t = np.linspace(0.0, t_end, samples)
    return SingularCurve(t, np.tile(np.asarray(x0, dtype=np.float64), (samples, 1)))


def mollify_curve(curve: SingularCurve, epsilon: float, t) -> np.ndarray:
    """Time-mollified curve s_eps(t), trapezoid quadrature with step eps^2 / 8.

    Weights are renormalized to unit mass so constants are reproduced
    exactly; the smoothing window has width eps^2.
    """
    if epsilon <= 0.0:
        raise ParameterError("epsilon must be positive")
    width = epsilon * epsilon
    tau = np.linspace(-width, width, 17)  # step eps^2 / 8
    w = profile_1d(tau / width)
    trap = np.ones_like(w)
    trap[0] = trap[-1] = 0.5
    w = w * trap
    w /= w.sum()
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros((t.size, 3))
    for tj, wj in zip(tau, w):
        out += wj * curve.at(t - tj)
    return out


def curve_mollification_gap(curve: SingularCurve, epsilon: float) -> float:
    """sup over sample times of |s(t) - s_eps(t)|."""
    s = curve.at(curve.times)
    s_eps = mollify_curve(curve, epsilon, curve.times)
    return float(np.max(np.linalg.norm(s - s_eps, axis=1))) if curve.times.size else 0.0


# -- radial cutoff around the mollified curve --------------------------------


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u**3 * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_d1(u: np.ndarray) -> np.ndarray:
    inside = (u > 0.0) & (u < 1.0)
    return np.where(inside, 30.0 * u**2 * (1.0 - u) ** 2, 0.0)


def _smoothstep_d2(u: np.ndarray) -> np.ndarray:
    inside = (u > 0.0) & (u < 1.0)
    return np.where(inside, 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u), 0.0)


def cutoff_profile(u: np.ndarray) -> np.ndarray:
    """Radial quintic cutoff: 0 on [0,2], rises C^2-smoothly to 1 on [2,3]."""
    return _smoothstep(np.asarray(u, dtype=np.float64) - 2.0)


def cutoff_profile_d1(u: np.ndarray) -> np.ndarray:
    return _smoothstep_d1(np.asarray(u, dtype=np.float64) - 2.0)


def cutoff_profile_d2(u: np.ndarray) -> np.ndarray:
    return _smoothstep_d2(np.asarray(u, dtype=np.float64) - 2.0)


def singular_cutoff(
    curve: SingularCurve, spec: MollifierSpec, t: float, grid: Grid
) -> SpectralField:
    """chi_eps(t, .) sampled on the grid: 0 within 2 eps of s_eps(t), 1 beyond 3 eps.

    Distances wrap around the torus; 3 eps must fit inside a half period.
    """
    eps = spec.epsilon
    if 3.0 * eps >= math.pi:
        raise ParameterError("cutoff support 3*epsilon must fit in half the torus")
    center = mollify_curve(curve, eps, t)[0]
    x1, x2, x3 = grid.meshgrid()
    d1 = (x1 - center[0] + math.pi) % TWO_PI - math.pi
    d2 = (x2 - center[1] + math.pi) % TWO_PI - math.pi
    d3 = (x3 - center[2] + math.pi) % TWO_PI - math.pi
    r = np.sqrt(d1 * d1 + d2 * d2 + d3 * d3)
    return from_physical(grid, cutoff_profile(r / eps)[None], time=t)


def cutoff_derivative_norm(epsilon: float, gamma: int, p: float) -> float:
    """||D^gamma chi_eps||_p evaluated from the analytic radial profile.

    gamma = 1 uses |grad chi_eps|, gamma = 2 the Frobenius norm of the
    Hessian; both are supported on the shell 2 eps <= r <= 3 eps, so the
    norm reduces to a 1-D radial quadrature (exact ~eps^{3/p - gamma}
    scaling up to the quadrature).
    """
    if gamma not in (1, 2):
        raise ParameterError("only first and second derivatives are implemented")
    if p < 1:
        raise ParameterError(f"L^p norm needs p >= 1, got {p}")
    r, w = _gauss_rule(400, 2.0 * epsilon, 3.0 * epsilon)
    u = r / epsilon
    if gamma == 1:
        g = cutoff_profile_d1(u) / epsilon
    else:
        f2 = cutoff_profile_d2(u) / epsilon**2
        f1_over_r = cutoff_profile_d1(u) / (epsilon * r)
        g = np.sqrt(f2 * f2 + 2.0 * f1_over_r * f1_over_r)
    if math.isinf(p):
        return float(np.max(g))
    return float((4.0 * math.pi * np.sum(w * r * r * np.abs(g) ** p)) ** (1.0 / p))
