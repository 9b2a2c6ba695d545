"""Linear wave operator M, its spectral inverse, nonlinear coupling N, map S.

M(u)_n = u''_n - [u_{n+1} - 2 u_n + u_{n-1}] acts diagonally on space-time
Fourier modes with eigenvalue nu_m(k) = -Om^2 m^2 + 4 sin^2(k/2).  Above the
phonon band (Om^2 > 4) every eigenvalue is negative and bounded away from
zero by Om^2 - 4, so M inverts by spectral division.  N applies the
second-difference stencil to W'(u) on a dealiased collocation grid, and the
breather fixed-point map is S = M^{-1} o N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice_model import PotentialSpec, eval_potential
from .spectral_field import GridSpec, SpectralField, analyze, synthesize, x0_norm, \
    WeightSpec, random_field

RESONANCE_FLOOR = 1e-9


class ResonanceError(ValueError):
    """Frequency at or inside the phonon band; M is not safely invertible."""


@dataclass(frozen=True)
class Multiplier:
    """Eigenvalue table nu[m-1, j] = -Om^2 m^2 + 4 sin^2(k_j / 2), k_j = 2 pi j / N."""

    omega: float
    table: np.ndarray

    @classmethod
    def build(cls, grid: GridSpec) -> "Multiplier":
        k = 2.0 * np.pi * np.arange(grid.n_sites) / grid.n_sites
        m = grid.harmonics
        table = -(grid.omega * m[:, None]) ** 2 + 4.0 * np.sin(k[None, :] / 2.0) ** 2
        return cls(grid.omega, table)

    def rows(self):
        """(m, j, nu) triples for the diagnostic CSV dump."""
        n_m, n_j = self.table.shape
        for mi in range(n_m):
            for j in range(n_j):
                yield mi + 1, j, self.table[mi, j]


def _check_invertible(grid: GridSpec, table: np.ndarray):
    if grid.omega**2 <= 4.0:
        raise ResonanceError(
            f"omega^2 = {grid.omega**2:.6g} does not clear the phonon band edge 4")
    if np.min(np.abs(table)) < RESONANCE_FLOOR:
        raise ResonanceError("multiplier magnitude below resonance floor")


def apply_M(field: SpectralField) -> SpectralField:
    """Stencil route: -Om^2 m^2 c minus the periodic discrete Laplacian."""
    c = field.coeffs
    m = field.grid.harmonics
    lap = np.roll(c, -1, axis=0) - 2.0 * c + np.roll(c, 1, axis=0)
    return field.with_coeffs(-((field.grid.omega * m[None, :]) ** 2) * c - lap)


def apply_M_via_multiplier(field: SpectralField) -> SpectralField:
    """Multiplier route: spatial FFT, multiply by nu_m(k), inverse FFT."""
    mult = Multiplier.build(field.grid)
    spectral = np.fft.fft(field.coeffs, axis=0)
    return field.with_coeffs(np.fft.ifft(spectral * mult.table.T, axis=0))


def apply_M_inverse(field: SpectralField) -> SpectralField:
    """Invert M by spectral division; requires Om^2 > 4 (non-resonance)."""
    mult = Multiplier.build(field.grid)
    _check_invertible(field.grid, mult.table)
    spectral = np.fft.fft(field.coeffs, axis=0)
    return field.with_coeffs(np.fft.ifft(spectral / mult.table.T, axis=0))


def apply_N(field: SpectralField, spec: PotentialSpec) -> SpectralField:
    """Nonlinear coupling N(u)_n = W'(u_{n+1}) + W'(u_{n-1}) - 2 W'(u_n).

    W' is evaluated pointwise on a collocation grid oversampled to
    2*(deg+1)*M + 1 samples (deg = polynomial degree of W'), which keeps the
    truncated result an exact restriction of the continuous operator; the
    zero-mean projection is part of the transform back.
    """
    deg = spec.wprime_degree
    if deg == 0:
        return field.with_coeffs(np.zeros_like(field.coeffs))
    nt = 2 * (deg + 1) * field.grid.n_harmonics + 2
    nt = max(nt, field.grid.n_time_samples)
    u = synthesize(field, n_time_samples=nt)
    wp = eval_potential(spec, u).Wp
    stencil = np.roll(wp, -1, axis=0) + np.roll(wp, 1, axis=0) - 2.0 * wp
    return analyze(field.grid, stencil)


def apply_S(field: SpectralField, spec: PotentialSpec) -> SpectralField:
    """Fixed-point map S = M^{-1} o N; breathers are its nontrivial fixed points."""
    return apply_M_inverse(apply_N(field, spec))


def probe_operator_norm(omega: float, grid: GridSpec, trials: int,
                        seed: int = 0) -> tuple[float, float]:
    """Randomised estimate of ||M^{-1}|| on X0 against the exact supremum.

    Returns (max probed ratio, 1/(omega^2 - 4)).  The supremum is attained
    on the (m = 1, k = pi) mode; random probes stay at or below it.
    """
    grid = GridSpec(grid.n_sites, grid.n_harmonics, grid.n_time_samples, omega)
    if omega**2 <= 4.0:
        raise ResonanceError("operator norm probe needs omega^2 > 4")
    rng = np.random.default_rng(seed)
    flat = WeightSpec(0.0)
    best = 0.0
    for _ in range(trials):
        u = random_field(grid, rng)
        denom = x0_norm(u, flat)
        if denom == 0.0:
            continue
        best = max(best, x0_norm(apply_M_inverse(u), flat) / denom)
    return best, 1.0 / (omega**2 - 4.0)
