"""Differential and integral operators on spectral fields.

Derivatives are exact mode-wise multiplications by ik.  Products are formed
at collocation points and truncated by the two-thirds rule afterwards, which
keeps every retained mode of a quadratic product exact for band-limited
inputs (the aliased images land only in the discarded band).
"""

from __future__ import annotations

import math

import numpy as np

from .grid import (
    VOLUME,
    GaugeError,
    Grid,
    SpectralField,
    from_physical,
    resample,
)


def curl(f: SpectralField) -> SpectralField:
    """curl(F) computed mode-wise as i k x F(k); divergence-free by construction."""
    f.require_vector()
    k1, k2, k3 = f.grid.k_broadcast()
    cx, cy, cz = f.coeffs
    out = np.empty_like(f.coeffs)
    out[0] = 1j * (k2 * cz - k3 * cy)
    out[1] = 1j * (k3 * cx - k1 * cz)
    out[2] = 1j * (k1 * cy - k2 * cx)
    return f.with_coeffs(out)


def divergence(f: SpectralField) -> SpectralField:
    f.require_vector()
    k1, k2, k3 = f.grid.k_broadcast()
    out = 1j * (k1 * f.coeffs[0] + k2 * f.coeffs[1] + k3 * f.coeffs[2])
    return SpectralField(f.grid, out[None], f.time)


def gradient(f: SpectralField) -> SpectralField:
    f.require_scalar()
    k1, k2, k3 = f.grid.k_broadcast()
    c = f.coeffs[0]
    out = np.empty((3,) + c.shape, dtype=np.complex128)
    out[0] = 1j * k1 * c
    out[1] = 1j * k2 * c
    out[2] = 1j * k3 * c
    return SpectralField(f.grid, out, f.time)


def laplacian(f: SpectralField) -> SpectralField:
    return f.with_coeffs(f.coeffs * (-f.grid.k_squared))


def inverse_laplacian(f: SpectralField) -> SpectralField:
    """(-Delta)^{-1} on mean-zero fields; the constant mode must vanish."""
    mean = np.max(np.abs(f.mean_mode()))
    scale = f.max_abs_coeff()
    if scale > 0.0 and mean > 1e-13 * scale:
        raise GaugeError("inverse Laplacian undefined on a nonzero mean mode")
    k2 = f.grid.k_squared.copy()
    k2[0, 0, 0] = 1.0
    out = f.coeffs / k2
    out[:, 0, 0, 0] = 0.0
    return f.with_coeffs(out)


def leray_project(f: SpectralField) -> SpectralField:
    """Divergence-free projection; also zeroes the (gauge) mean mode."""
    f.require_vector()
    k1, k2, k3 = f.grid.k_broadcast()
    k2n = f.grid.k_squared.copy()
    k2n[0, 0, 0] = 1.0
    kdot = (k1 * f.coeffs[0] + k2 * f.coeffs[1] + k3 * f.coeffs[2]) / k2n
    out = np.empty_like(f.coeffs)
    out[0] = f.coeffs[0] - k1 * kdot
    out[1] = f.coeffs[1] - k2 * kdot
    out[2] = f.coeffs[2] - k3 * kdot
    out[:, 0, 0, 0] = 0.0
    return f.with_coeffs(out)


def biot_savart(b: SpectralField) -> SpectralField:
    """Coulomb-gauge vector potential A = curl((-Delta)^{-1} B).

    Requires a divergence-free, mean-zero B; then curl(A) = B exactly.
    """
    b.require_vector()
    return curl(inverse_laplacian(b))


# -- pointwise products --------------------------------------------------


def pointwise_multiply(a: SpectralField, b: SpectralField) -> SpectralField:
    """Scalar * scalar, scalar * vector, or componentwise-matching product."""
    va, vb = a.to_physical(), b.to_physical()
    if a.ncomp == 1 and b.ncomp > 1:
        va, vb = vb, va
    if vb.shape[0] == 1 and va.shape[0] > 1:
        vb = np.broadcast_to(vb, va.shape)
    return from_physical(a.grid, va * vb, a.time).dealias()


def cross_product(a: SpectralField, b: SpectralField) -> SpectralField:
    a.require_vector()
    b.require_vector()
    va, vb = a.to_physical(), b.to_physical()
    return from_physical(a.grid, np.cross(va, vb, axis=0), a.time).dealias()


def dot_product_field(a: SpectralField, b: SpectralField) -> SpectralField:
    a.require_vector()
    b.require_vector()
    va, vb = a.to_physical(), b.to_physical()
    return from_physical(a.grid, np.sum(va * vb, axis=0)[None], a.time).dealias()


def advect(a: SpectralField, b: SpectralField) -> SpectralField:
    """(a . grad) b for vector fields, grid products dealiased."""
    a.require_vector()
    b.require_vector()
    k1, k2, k3 = b.grid.k_broadcast()
    va = a.to_physical()
    out = np.empty_like(va)
    ks = (k1, k2, k3)
    for comp in range(3):
        acc = np.zeros((b.grid.n,) * 3, dtype=np.float64)
        for ax in range(3):
            der = SpectralField(b.grid, (1j * ks[ax] * b.coeffs[comp])[None], b.time)
            acc += va[ax] * der.to_physical()[0]
        out[comp] = acc
    return from_physical(b.grid, out, b.time).dealias()


def hall_nonlinearity(b: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Lorentz force (curl B) x B and its curl, both dealiased.

    The cross product is taken at collocation points; the curl is then exact
    on the retained band.
    """
    b.require_vector()
    j = curl(b)
    lorentz = cross_product(j, b)
    return lorentz, curl(lorentz)


# -- norms ----------------------------------------------------------------


def inner_product(a: SpectralField, b: SpectralField) -> float:
    """int_{T^3} a . b dx by Parseval (exact for the stored modes)."""
    a._check_compatible(b)
    return float(VOLUME * np.real(np.sum(a.coeffs * np.conj(b.coeffs))))


def l2_norm(f: SpectralField) -> float:
    return math.sqrt(max(inner_product(f, f), 0.0))


def h1_seminorm(f: SpectralField) -> float:
    """|| grad F ||_2 from the spectrum."""
    val = VOLUME * np.sum(f.grid.k_squared * np.abs(f.coeffs) ** 2).real
    return math.sqrt(max(float(val), 0.0))


def lp_norm(f: SpectralField, p: float, oversample: int = 2) -> float:
    """L^p norm of |F| (pointwise vector magnitude).

    p = 2 uses Parseval exactly; p = inf takes the max over a grid
    oversampled ``oversample``x per axis; other p >= 1 use rectangle
    quadrature on the oversampled grid (|F|^p is not band-limited, so this
    is a quadrature, not an exact value).
    """
    if p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    if p == 2:
        return l2_norm(f)
    m = f.grid.n * oversample
    vals = resample(f, m).to_physical()
    mag = np.sqrt(np.sum(vals * vals, axis=0))
    if math.isinf(p):
        return float(np.max(mag))
    cell = (2.0 * np.pi / m) ** 3
    return float((cell * np.sum(mag**p)) ** (1.0 / p))


def relative_l2_difference(a: SpectralField, b: SpectralField) -> float:
    denom = max(l2_norm(a), l2_norm(b))
    if denom == 0.0:
        return 0.0
    return l2_norm(a - b) / denom


# -- vector-calculus identity residuals -----------------------------------
#
# Each residual evaluates both sides of an identity independently through
# the dealiased product pipeline and returns ||LHS - RHS||_2 normalized by
# ||LHS||_2 (or the absolute norm when the LHS vanishes).  For band-limited
# inputs every retained mode is exact, so residuals are pure roundoff.


def _rel(diff: SpectralField, ref: SpectralField) -> float:
    ref_norm = l2_norm(ref)
    d = l2_norm(diff)
    return d / ref_norm if ref_norm > 0.0 else d


def identity_residual(b: SpectralField) -> float:
    """(curl B) x B = div(B tensor B) - (1/2) grad |B|^2 for div-free B."""
    b.require_vector()
    lhs = cross_product(curl(b), b)
    vb = b.to_physical()
    k1, k2, k3 = b.grid.k_broadcast()
    ks = (k1, k2, k3)
    # div(B tensor B)_i = sum_j d_j (B_j B_i)
    div_t = np.empty_like(b.coeffs)
    for i in range(3):
        acc = np.zeros_like(b.coeffs[0])
        for jax in range(3):
            prod = from_physical(b.grid, (vb[jax] * vb[i])[None]).dealias()
            acc += 1j * ks[jax] * prod.coeffs[0]
        div_t[i] = acc
    half_grad = gradient(dot_product_field(b, b)) * 0.5
    rhs = SpectralField(b.grid, div_t, b.time) - half_grad
    return _rel(lhs - rhs, lhs)


def residual_grad_of_scalar_product(phi: SpectralField, a: SpectralField) -> float:
    """grad(phi A) = grad(phi) tensor A + phi grad(A), contracted to a vector test.

    Checked row-wise: d_i (phi a_j) = (d_i phi) a_j + phi (d_i a_j).
    Returns the worst relative residual over the nine tensor entries.
    """
    phi.require_scalar()
    a.require_vector()
    grid = a.grid
    k1, k2, k3 = grid.k_broadcast()
    ks = (k1, k2, k3)
    vphi = phi.to_physical()[0]
    va = a.to_physical()
    worst = 0.0
    gp = gradient(phi).to_physical()
    for i in range(3):
        for j in range(3):
            lhs_field = from_physical(grid, (vphi * va[j])[None]).dealias()
            lhs = 1j * ks[i] * lhs_field.coeffs[0]
            da_j = SpectralField(grid, (1j * ks[i] * a.coeffs[j])[None]).to_physical()[0]
            rhs = from_physical(grid, (gp[i] * va[j] + vphi * da_j)[None]).dealias().coeffs[0]
            num = np.linalg.norm(lhs - rhs)
            den = np.linalg.norm(lhs)
            worst = max(worst, float(num / den) if den > 0 else float(num))
    return worst


def residual_div_of_scalar_product(phi: SpectralField, a: SpectralField) -> float:
    """div(phi A) = grad(phi) . A + phi div(A)."""
    phi.require_scalar()
    a.require_vector()
    lhs = divergence(pointwise_multiply(phi, a))
    rhs = dot_product_field(gradient(phi), a) + pointwise_multiply(phi, divergence(a))
    return _rel(lhs - rhs, lhs)


def residual_curl_of_scalar_product(phi: SpectralField, a: SpectralField) -> float:
    """curl(phi A) = phi curl(A) + grad(phi) x A."""
    phi.require_scalar()
    a.require_vector()
    lhs = curl(pointwise_multiply(phi, a))
    rhs = pointwise_multiply(phi, curl(a)) + cross_product(gradient(phi), a)
    return _rel(lhs - rhs, lhs)


def residual_curl_of_cross(a: SpectralField, b: SpectralField) -> float:
    """curl(A x B) = A div(B) - B div(A) + (B . grad) A - (A . grad) B."""
    lhs = curl(cross_product(a, b))
    rhs = (
        pointwise_multiply(divergence(b), a)
        - pointwise_multiply(divergence(a), b)
        + advect(b, a)
        - advect(a, b)
    )
    return _rel(lhs - rhs, lhs)


def residual_curl_cross_expansion(a: SpectralField, b: SpectralField) -> float:
    """(curl A) x B = A x (curl B) + (A . grad) B + (B . grad) A - grad(A . B)."""
    lhs = cross_product(curl(a), b)
    rhs = (
        cross_product(a, curl(b))
        + advect(a, b)
        + advect(b, a)
        - gradient(dot_product_field(a, b))
    )
    return _rel(lhs - rhs, lhs)


def cross_orthogonality_defect(a: SpectralField, b: SpectralField) -> float:
    """max over collocation points of |(A x B) . A| (zero pointwise)."""
    va, vb = a.to_physical(), b.to_physical()
    return float(np.max(np.abs(np.sum(np.cross(va, vb, axis=0) * va, axis=0))))
