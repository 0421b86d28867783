"""Spectral representation of periodic fields on the 2pi-torus.

Fields live in Fourier space as amplitude coefficients: a field with
coefficients ``c`` takes the physical values ``u(x) = sum_k c[k] exp(i k.x)``
with integer wavenumbers ``k``.  Under this normalization a single mode
``cos(4 x1)`` has coefficients of 1/2 at k = (+-4, 0, 0), and Parseval reads
``int |u|^2 dx = (2pi)^3 sum_k |c[k]|^2``.

The wavenumber cube uses the standard FFT index order (k3 fastest, each axis
running 0, 1, ..., n/2-1, -n/2, ..., -1).  All nonlinear work elsewhere in the
package applies the two-thirds rule, so the ambiguous Nyquist mode is always
zero in practice.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.fft

TWO_PI = 2.0 * np.pi
#: Domain volume (2pi)^3, the weight in all integral norms.
VOLUME = TWO_PI**3

def _workers(n: int) -> int:
    # thread dispatch costs more than it saves below ~64^3
    return 1 if n <= 32 else -1


class ShapeError(ValueError):
    """Operation applied to a field with the wrong component count."""


class GaugeError(ValueError):
    """Inverse Laplacian requested on a field with a nonzero mean mode."""


def _check_n(n: int) -> None:
    if n < 8 or (n & (n - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 8, got {n}")


@dataclass(frozen=True)
class Grid:
    """Cubic N^3 collocation grid for the torus [0, 2pi)^3."""

    n: int

    def __post_init__(self) -> None:
        _check_n(self.n)

    @property
    def length(self) -> float:
        return TWO_PI

    @property
    def dealias_cutoff(self) -> int:
        """Largest |k_i| retained under the two-thirds rule."""
        return self.n // 3

    @property
    def wavenumbers(self) -> np.ndarray:
        """1-D integer wavenumbers in FFT order."""
        return _wavenumbers(self.n)

    def k_broadcast(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Wavenumber vectors reshaped to broadcast over an (n,n,n) cube."""
        k = self.wavenumbers.astype(np.float64)
        return k[:, None, None], k[None, :, None], k[None, None, :]

    @property
    def k_squared(self) -> np.ndarray:
        return _k_squared(self.n)

    @property
    def k_magnitude(self) -> np.ndarray:
        return _k_magnitude(self.n)

    @property
    def dealias_mask(self) -> np.ndarray:
        return _dealias_mask(self.n)

    def axis_points(self) -> np.ndarray:
        return np.arange(self.n) * (TWO_PI / self.n)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.axis_points()
        return np.meshgrid(x, x, x, indexing="ij")


@lru_cache(maxsize=16)
def _wavenumbers(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
    k.flags.writeable = False
    return k


@lru_cache(maxsize=16)
def _k_squared(n: int) -> np.ndarray:
    k = _wavenumbers(n).astype(np.float64)
    k2 = k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2
    k2.flags.writeable = False
    return k2


@lru_cache(maxsize=16)
def _k_magnitude(n: int) -> np.ndarray:
    km = np.sqrt(_k_squared(n))
    km.flags.writeable = False
    return km


@lru_cache(maxsize=16)
def _dealias_mask(n: int) -> np.ndarray:
    k = np.abs(_wavenumbers(n))
    cut = n // 3
    keep = (
        (k[:, None, None] <= cut)
        & (k[None, :, None] <= cut)
        & (k[None, None, :] <= cut)
    )
    keep.flags.writeable = False
    return keep


@dataclass(frozen=True)
class SpectralField:
    """Vector (3-component) or scalar (1-component) field in Fourier space.

    ``coeffs`` has shape (ncomp, n, n, n), complex128.  Operations never
    mutate; they return new fields.
    """

    grid: Grid
    coeffs: np.ndarray = field(repr=False)
    time: float = 0.0

    def __post_init__(self) -> None:
        c = self.coeffs
        n = self.grid.n
        if c.ndim != 4 or c.shape[1:] != (n, n, n) or c.shape[0] not in (1, 3):
            raise ShapeError(f"expected (1|3, {n}, {n}, {n}) coefficients, got {c.shape}")

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0]

    @property
    def is_vector(self) -> bool:
        return self.ncomp == 3

    def require_vector(self) -> None:
        if not self.is_vector:
            raise ShapeError("operation requires a 3-component field")

    def require_scalar(self) -> None:
        if self.is_vector:
            raise ShapeError("operation requires a scalar field")

    def with_coeffs(self, coeffs: np.ndarray, time: float | None = None) -> "SpectralField":
        return SpectralField(self.grid, coeffs, self.time if time is None else time)

    def with_time(self, time: float) -> "SpectralField":
        return replace(self, time=time)

    def copy(self) -> "SpectralField":
        return self.with_coeffs(self.coeffs.copy())

    # -- transforms --------------------------------------------------------

    def to_physical(self) -> np.ndarray:
        """Collocation values, shape (ncomp, n, n, n), real."""
        n = self.grid.n
        return scipy.fft.ifftn(
            self.coeffs, axes=(1, 2, 3), workers=_workers(n)
        ).real * n**3

    def dealias(self) -> "SpectralField":
        return self.with_coeffs(self.coeffs * self.grid.dealias_mask)

    def mean_mode(self) -> np.ndarray:
        return self.coeffs[:, 0, 0, 0]

    def zero_mean(self) -> "SpectralField":
        c = self.coeffs.copy()
        c[:, 0, 0, 0] = 0.0
        return self.with_coeffs(c)

    # -- diagnostics on the raw coefficients -------------------------------

    def max_abs_coeff(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def hermitian_defect(self) -> float:
        """Max |c(-k) - conj(c(k))|; zero for real-valued physical fields."""
        c = self.coeffs
        mirrored = c
        for ax in (1, 2, 3):
            mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
        return float(np.max(np.abs(mirrored - np.conj(c))))

    def divergence_defect(self) -> float:
        """Max |k . c(k)| over modes, the divergence-free residual."""
        self.require_vector()
        k1, k2, k3 = self.grid.k_broadcast()
        d = k1 * self.coeffs[0] + k2 * self.coeffs[1] + k3 * self.coeffs[2]
        return float(np.max(np.abs(d)))

    def is_divergence_free(self, rel_tol: float = 1e-12) -> bool:
        scale = self.max_abs_coeff()
        if scale == 0.0:
            return True
        return self.divergence_defect() <= rel_tol * scale

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.grid.n != other.grid.n or self.ncomp != other.ncomp:
            raise ShapeError("fields live on different grids or component counts")


def from_physical(grid: Grid, values: np.ndarray, time: float = 0.0) -> SpectralField:
    """Build a field from collocation values of shape (ncomp, n, n, n)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 3:
        values = values[None]
    n3 = grid.n**3
    coeffs = scipy.fft.fftn(values, axes=(1, 2, 3), workers=_workers(grid.n)) / n3
    return SpectralField(grid, coeffs, time)


def zero_field(grid: Grid, ncomp: int = 3, time: float = 0.0) -> SpectralField:
    return SpectralField(grid, np.zeros((ncomp, grid.n, grid.n, grid.n), dtype=np.complex128), time)


def constant_field(grid: Grid, values, time: float = 0.0) -> SpectralField:
    values = np.atleast_1d(np.asarray(values, dtype=np.float64))
    f = zero_field(grid, ncomp=len(values), time=time)
    f.coeffs[:, 0, 0, 0] = values
    return f


def single_mode_field(grid: Grid, k: int, component: int = 1, amplitude: float = 1.0,
                      axis: int = 0, time: float = 0.0) -> SpectralField:
    """The divergence-free mode ``amplitude * cos(k * x_axis)`` in one component.

    The oscillation axis must differ from the component so k . c = 0.
    """
    if axis == component:
        raise ValueError("oscillation along the field component is not divergence-free")
    if abs(k) > grid.n // 2:
        raise ValueError(f"mode {k} does not fit on an n={grid.n} grid")
    f = zero_field(grid, ncomp=3, time=time)
    idx_pos = [0, 0, 0]
    idx_neg = [0, 0, 0]
    idx_pos[axis] = k % grid.n
    idx_neg[axis] = (-k) % grid.n
    f.coeffs[(component, *idx_pos)] = amplitude / 2.0
    f.coeffs[(component, *idx_neg)] = amplitude / 2.0
    return f


def abc_field(grid: Grid, time: float = 0.0) -> SpectralField:
    """The unit Beltrami field (sin z + cos y, sin x + cos z, sin y + cos x).

    Curl eigenfield with eigenvalue one: curl(B) = B, so the Hall
    nonlinearity vanishes identically and resistive decay is exact.
    """
    f = zero_field(grid, ncomp=3, time=time)
    n = grid.n
    half = 0.5
    half_i = -0.5j  # sin: (e^{ix} - e^{-ix}) / 2i
    # component 0: sin x3 + cos x2
    f.coeffs[0, 0, 0, 1 % n] = half_i
    f.coeffs[0, 0, 0, (-1) % n] = -half_i
    f.coeffs[0, 0, 1 % n, 0] = half
    f.coeffs[0, 0, (-1) % n, 0] = half
    # component 1: sin x1 + cos x3
    f.coeffs[1, 1 % n, 0, 0] = half_i
    f.coeffs[1, (-1) % n, 0, 0] = -half_i
    f.coeffs[1, 0, 0, 1 % n] = half
    f.coeffs[1, 0, 0, (-1) % n] = half
    # component 2: sin x2 + cos x1
    f.coeffs[2, 0, 1 % n, 0] = half_i
    f.coeffs[2, 0, (-1) % n, 0] = -half_i
    f.coeffs[2, 1 % n, 0, 0] = half
    f.coeffs[2, (-1) % n, 0, 0] = half
    return f


def resample(f: SpectralField, m: int) -> SpectralField:
    """Copy spectral content onto an m^3 grid (zero-padding or truncation)."""
    _check_n(m)
    src = f.grid.wavenumbers
    n = f.grid.n
    keep = np.abs(src) <= min(n, m) // 2
    src_idx = np.nonzero(keep)[0]
    dst_idx = np.array([int(src[i]) % m for i in src_idx])
    out = np.zeros((f.ncomp, m, m, m), dtype=np.complex128)
    ix = np.ix_(range(f.ncomp), dst_idx, dst_idx, dst_idx)
    jx = np.ix_(range(f.ncomp), src_idx, src_idx, src_idx)
    out[ix] = f.coeffs[jx]
    return SpectralField(Grid(m), out, f.time)


def dilate(f: SpectralField, lam: int) -> SpectralField:
    """Return the field x -> f(lam x): mode k moves to lam*k.

    lam must be a power of two and the dilated modes must stay below the
    dealias cutoff.
    """
    if lam < 1 or (lam & (lam - 1)) != 0:
        raise ValueError("dilation factor must be a power of two")
    if lam == 1:
        return f.copy()
    grid = f.grid
    k = grid.wavenumbers
    active = np.nonzero(np.abs(f.coeffs).sum(axis=0) > 0.0)
    if active[0].size:
        max_active = max(int(np.max(np.abs(k[ax[...]]))) for ax in active)
        if lam * max_active > grid.dealias_cutoff:
            raise ValueError(
                f"dilation by {lam} pushes mode {max_active} past the dealias cutoff"
            )
    src_idx = np.nonzero(np.abs(k) * lam <= grid.n // 2)[0]
    dst_idx = (k[src_idx] * lam) % grid.n
    out = np.zeros_like(f.coeffs)
    ix = np.ix_(range(f.ncomp), dst_idx, dst_idx, dst_idx)
    jx = np.ix_(range(f.ncomp), src_idx, src_idx, src_idx)
    out[ix] = f.coeffs[jx]
    return SpectralField(grid, out, f.time)
