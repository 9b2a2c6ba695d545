"""Fixed-point solvers for breather fields: Picard/Anderson, Newton, sweeps.

Zero is always a fixed point of S and, for homogeneous anharmonic forces,
the radial direction at a nontrivial fixed point is expanding (S scales like
amplitude**(alpha+1)), so plain damped iteration cannot settle on a breather
by itself.  The hybrid strategy therefore runs damped Picard with optional
Anderson-type residual acceleration to lock in the profile shape, then
finishes with a matrix-free Newton iteration on F(x) = x - S(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field, replace

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from . import validation
from .lattice_model import PotentialSpec, growth_bound
from .operators import apply_S, ResonanceError
from .spectral_field import (GridSpec, SpectralField, WeightSpec,
                             parity_projector, seed_field, x0_norm, x2_norm,
                             zero_field)
from .validation import BoundsReport

DIVERGENCE_NORM = 1e6
PICARD_TO_NEWTON_RESIDUAL = 1e-4

STATUS_CONVERGED = "converged"
STATUS_COLLAPSED = "collapsed_to_zero"
STATUS_DIVERGED = "diverged"
STATUS_MAX_ITER = "max_iter"
STATUS_RESONANCE = "resonance"


@dataclass(frozen=True)
class SolverConfig:
    grid: GridSpec
    weight: WeightSpec
    potential: PotentialSpec
    parity: str = "odd"
    strategy: str = "hybrid"
    damping: float = 0.5
    accel_depth: int = 5
    tol_residual: float = 1e-10
    tol_zero: float = 1e-8
    max_iter: int = 500
    seed: tuple[float | None, float] = (None, 1.0)

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")
        if self.tol_residual <= 0.0 or self.tol_zero <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.accel_depth < 0:
            raise ValueError("accel_depth must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.parity not in ("even", "odd"):
            raise ValueError(f"unknown parity {self.parity!r}")
        if self.strategy not in ("picard", "newton", "hybrid"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass
class BreatherResult:
    field: SpectralField
    omega: float
    iterations: int
    fp_residual: float
    strong_residual: float
    x0_norm: float
    x2_norm: float
    parity_deviation: float
    decay_fit: float
    bounds: BoundsReport | None
    status: str
    parity: str
    weight: WeightSpec
    potential: PotentialSpec
    trace: list[tuple[int, float, float]] = dataclass_field(default_factory=list)
    refinement_change: float | None = None


def _as_vector(field: SpectralField) -> np.ndarray:
    c = field.coeffs
    return np.concatenate([c.real.ravel(), c.imag.ravel()])


def _as_field(grid: GridSpec, vec: np.ndarray) -> SpectralField:
    half = vec.size // 2
    shape = (grid.n_sites, grid.n_harmonics)
    return SpectralField(grid, vec[:half].reshape(shape) + 1j * vec[half:].reshape(shape))


def default_seed_amplitude(config: SolverConfig) -> float:
    """Seed scale from the existence-bound ring when one is available.

    Midpoint of [r_crit, r_max] under the strengthened non-resonance
    condition, half of r_max under the plain one, and a plain 0.5 for
    potentials without a global growth pair.
    """
    try:
        kbar, _ = growth_bound(config.potential)
    except Exception:
        return 0.5
    if kbar == 0.0:
        return 0.5
    report = validation.bounds_report(config.grid.omega, config.weight,
                                      config.potential, 0.0)
    if report.nonres_ok:
        return 0.5 * (report.r_crit + report.r_max)
    if report.nonres0_ok and report.r_max > 0.0:
        return 0.5 * report.r_max
    return 0.5


def build_seed(config: SolverConfig) -> SpectralField:
    amplitude, width = config.seed
    seed = seed_field(config.grid, config.parity,
                      amplitude if amplitude is not None else 1.0, width)
    if amplitude is None:
        target = default_seed_amplitude(config)
        current = x0_norm(seed, config.weight)
        if current > 0.0:
            seed = seed.with_coeffs(seed.coeffs * (target / current))
    return seed


def _finalize(config: SolverConfig, fld: SpectralField, status: str,
              fp_residual: float, trace: list) -> BreatherResult:
    grid = config.grid
    norm0 = x0_norm(fld, config.weight)
    norm2 = x2_norm(fld, config.weight)
    project = parity_projector(config.parity)
    dev = x0_norm(fld.with_coeffs(fld.coeffs - project(fld).coeffs), config.weight)
    parity_deviation = dev / norm0 if norm0 > 0.0 else dev
    strong = validation.strong_residual(fld, config.potential, config.weight)
    decay = float("nan")
    if status == STATUS_CONVERGED:
        try:
            center = -0.5 if config.parity == "even" else 0.0
            decay, _ = validation.fit_decay_profile(
                validation.max_amplitude_profile(fld), center)
        except validation.InsufficientTailError:
            pass
    bounds = None
    if config.potential.is_pure and not config.potential.is_harmonic:
        bounds = validation.bounds_report(grid.omega, config.weight,
                                          config.potential, norm0)
    return BreatherResult(
        field=fld, omega=grid.omega, iterations=len(trace) - 1 if trace else 0,
        fp_residual=fp_residual, strong_residual=strong,
        x0_norm=norm0, x2_norm=norm2, parity_deviation=parity_deviation,
        decay_fit=decay, bounds=bounds, status=status,
        parity=config.parity, weight=config.weight, potential=config.potential,
        trace=list(trace))


def _anderson_step(x_hist: list, f_hist: list, theta: float) -> np.ndarray:
    """Damped Anderson mixing over the residual history.

    With an empty difference history this reduces to the damped Picard
    update x + theta * f; otherwise the least-squares combination of past
    residual differences is removed first (regularised normal equations keep
    the step deterministic).
    """
    x_k, f_k = x_hist[-1], f_hist[-1]
    depth = len(x_hist) - 1
    if depth == 0:
        return x_k + theta * f_k
    dx = np.stack([x_hist[i + 1] - x_hist[i] for i in range(depth)], axis=1)
    df = np.stack([f_hist[i + 1] - f_hist[i] for i in range(depth)], axis=1)
    a = df.T @ df
    reg = 1e-12 * max(np.trace(a) / depth, 1e-30)
    gamma = np.linalg.solve(a + reg * np.eye(depth), df.T @ f_k)
    return x_k + theta * f_k - (dx + theta * df) @ gamma


@dataclass
class _PicardOutcome:
    status: str | None  # None: budget or stall, caller may continue
    field: SpectralField
    fp_residual: float
    best_field: SpectralField
    best_residual: float


def _picard_phase(config: SolverConfig, start: SpectralField, budget: int,
                  trace: list, stall_window: int = 8,
                  handover_residual: float | None = None) -> _PicardOutcome:
    """Damped/accelerated fixed-point iteration.

    A None status means a handover point was reached (residual below the
    handover threshold, stall, or budget); the best iterate seen is carried
    along so a hybrid caller can pass it to Newton.
    """
    project = parity_projector(config.parity)
    x_field = project(start)
    x_hist: list[np.ndarray] = []
    f_hist: list[np.ndarray] = []
    best_field, best_res = x_field, float("inf")
    since_best = 0
    for _ in range(budget):
        norm = x0_norm(x_field, config.weight)
        if norm <= config.tol_zero:
            trace.append((len(trace), float("nan"), norm))
            return _PicardOutcome(STATUS_COLLAPSED, x_field, float("nan"),
                                  best_field, best_res)
        if norm > DIVERGENCE_NORM:
            trace.append((len(trace), float("nan"), norm))
            return _PicardOutcome(STATUS_DIVERGED, x_field, float("nan"),
                                  best_field, best_res)
        g_field = project(apply_S(x_field, config.potential))
        res_field = x_field.with_coeffs(g_field.coeffs - x_field.coeffs)
        fp_res = x0_norm(res_field, config.weight) / norm
        trace.append((len(trace), fp_res, norm))
        if fp_res < best_res:
            best_field, best_res, since_best = x_field, fp_res, 0
        else:
            since_best += 1
        if fp_res <= config.tol_residual:
            return _PicardOutcome(STATUS_CONVERGED, x_field, fp_res,
                                  x_field, fp_res)
        if handover_residual is not None and fp_res <= handover_residual:
            return _PicardOutcome(None, x_field, fp_res, x_field, fp_res)
        if since_best >= stall_window:
            return _PicardOutcome(None, x_field, fp_res, best_field, best_res)
        x_vec = _as_vector(x_field)
        x_hist.append(x_vec)
        f_hist.append(_as_vector(res_field))
        if len(x_hist) > config.accel_depth + 1:
            x_hist.pop(0)
            f_hist.pop(0)
        new_vec = _anderson_step(x_hist, f_hist, config.damping)
        if not np.all(np.isfinite(new_vec)) or \
                np.linalg.norm(new_vec) > 1e3 * max(1.0, np.linalg.norm(x_vec)):
            # runaway extrapolation: fall back to the plain damped step
            new_vec = x_vec + config.damping * f_hist[-1]
            x_hist, f_hist = [x_vec], [f_hist[-1]]
        x_field = project(_as_field(config.grid, new_vec))
    return _PicardOutcome(None, best_field, best_res, best_field, best_res)


def _newton_phase(config: SolverConfig, start: SpectralField, outer_budget: int,
                  trace: list):
    """Matrix-free Newton on F(x) = x - S(x).

    Directional derivatives use central differences with relative step 1e-6
    and each linear solve runs GMRES to a loose 1e-3 relative tolerance,
    which is enough for quadratic-looking outer convergence in practice.
    """
    project = parity_projector(config.parity)
    grid = config.grid

    def f_of(vec: np.ndarray) -> np.ndarray:
        fld = project(_as_field(grid, vec))
        return _as_vector(fld) - _as_vector(project(apply_S(fld, config.potential)))

    x_vec = _as_vector(project(start))
    fp_res = float("inf")
    best_res = float("inf")
    since_best = 0
    for _ in range(outer_budget):
        x_field = _as_field(grid, x_vec)
        norm = x0_norm(x_field, config.weight)
        if norm <= config.tol_zero:
            trace.append((len(trace), float("nan"), norm))
            return STATUS_COLLAPSED, x_field, float("nan")
        if norm > DIVERGENCE_NORM:
            trace.append((len(trace), float("nan"), norm))
            return STATUS_DIVERGED, x_field, fp_res
        r_vec = f_of(x_vec)
        fp_res = x0_norm(_as_field(grid, r_vec), config.weight) / norm
        trace.append((len(trace), fp_res, norm))
        if fp_res <= config.tol_residual:
            return STATUS_CONVERGED, project(x_field), fp_res
        if fp_res < 0.5 * best_res:
            best_res, since_best = fp_res, 0
        else:
            since_best += 1
            if since_best >= 10:
                # no factor-2 progress in ten steps: stagnated
                return STATUS_MAX_ITER, x_field, fp_res
        h = 1e-6 * max(1.0, float(np.linalg.norm(x_vec)))

        def matvec(w: np.ndarray) -> np.ndarray:
            wn = float(np.linalg.norm(w))
            if wn == 0.0:
                return np.zeros_like(w)
            step = h / wn
            return (f_of(x_vec + step * w) - f_of(x_vec - step * w)) / (2.0 * step)

        op = LinearOperator((x_vec.size, x_vec.size), matvec=matvec)
        # restart length bounds the matvec count per outer step
        delta, _ = gmres(op, -r_vec, rtol=1e-3, atol=0.0, restart=60, maxiter=3)
        if not np.all(np.isfinite(delta)) or np.linalg.norm(delta) == 0.0:
            return STATUS_MAX_ITER, x_field, fp_res
        r_norm = np.linalg.norm(r_vec)
        candidate = x_vec + delta
        for _ in range(4):
            if np.linalg.norm(f_of(candidate)) <= r_norm or r_norm == 0.0:
                break
            delta = 0.5 * delta
            candidate = x_vec + delta
        x_vec = _as_vector(project(_as_field(grid, candidate)))
    x_field = _as_field(grid, x_vec)
    return STATUS_MAX_ITER, x_field, fp_res


def picard_solve(config: SolverConfig, initial: SpectralField | None = None) -> BreatherResult:
    """Damped/accelerated Picard iteration from the configured seed.

    Terminates with one of the four statuses; a converged result is
    nontrivial by construction (collapse to the zero fixed point is reported
    separately).
    """
    trace: list[tuple[int, float, float]] = []
    start = initial if initial is not None else build_seed(config)
    out = _picard_phase(config, start, config.max_iter, trace,
                        stall_window=config.max_iter)
    status = out.status if out.status is not None else STATUS_MAX_ITER
    return _finalize(config, out.field, status, out.fp_residual, trace)


def newton_solve(config: SolverConfig, initial: SpectralField | None = None) -> BreatherResult:
    """Matrix-free Newton iteration on F(x) = x - S(x) from ``initial``."""
    trace: list[tuple[int, float, float]] = []
    start = initial if initial is not None else build_seed(config)
    status, fld, fp_res = _newton_phase(config, start, min(config.max_iter, 60), trace)
    return _finalize(config, fld, status, fp_res, trace)


def _radial_rescale(config: SolverConfig, fld: SpectralField) -> SpectralField:
    """Rebalance a shape's amplitude onto its own fixed-point ray.

    For a force of homogeneity degree p, scaling a field by c scales S(x)
    by c**p, so the radius where the ray balances is
    c* = (||x|| / ||S(x)||)**(1/(p-1)).  Starting Newton there keeps it out
    of the zero root's basin after a Picard phase has slid inward.
    """
    p = config.potential.wprime_degree
    if p < 2:
        return fld
    x_norm = x0_norm(fld, config.weight)
    s_norm = x0_norm(apply_S(fld, config.potential), config.weight)
    if x_norm == 0.0 or s_norm == 0.0:
        return fld
    scale = float(np.clip((x_norm / s_norm) ** (1.0 / (p - 1)), 0.125, 8.0))
    return fld.with_coeffs(fld.coeffs * scale)


def hybrid_solve(config: SolverConfig, initial: SpectralField | None = None) -> BreatherResult:
    """Picard to lock the shape, Newton to polish.

    Picard hands over once its residual is below 1e-4, stalls, or exhausts
    a fraction of the iteration budget; Newton then starts from the best
    iterate seen, radially rebalanced onto its own fixed-point ray.
    """
    trace: list[tuple[int, float, float]] = []
    start = initial if initial is not None else build_seed(config)
    picard_budget = max(10, min(100, config.max_iter // 2))
    out = _picard_phase(config, start, picard_budget, trace,
                        handover_residual=PICARD_TO_NEWTON_RESIDUAL)
    if out.status == STATUS_CONVERGED:
        return _finalize(config, out.field, out.status, out.fp_residual, trace)
    # Picard sliding into the zero basin or running away does not end a
    # hybrid solve: Newton is attempted from the best iterate whenever that
    # iterate still carries a nontrivial shape (a strict residual below 1
    # excludes the exact-collapse case where S is identically zero).
    rescuable = (np.isfinite(out.best_residual) and out.best_residual < 1.0
                 and x0_norm(out.best_field, config.weight) > config.tol_zero)
    if not rescuable:
        status = out.status if out.status is not None else STATUS_MAX_ITER
        return _finalize(config, out.field, status, out.fp_residual, trace)
    outer = max(1, min(60, config.max_iter - (len(trace) - 1)))
    start_field = _radial_rescale(config, out.best_field)
    status, fld, fp_res = _newton_phase(config, start_field, outer, trace)
    return _finalize(config, fld, status, fp_res, trace)


def solve(config: SolverConfig, initial: SpectralField | None = None) -> BreatherResult:
    """Dispatch on the configured strategy."""
    if config.strategy == "picard":
        return picard_solve(config, initial)
    if config.strategy == "newton":
        return newton_solve(config, initial)
    return hybrid_solve(config, initial)


def _interpolate(field: SpectralField, grid: GridSpec) -> SpectralField:
    """Embed a field into a finer grid: zero-pad sites outward and harmonics up."""
    out = np.zeros((grid.n_sites, grid.n_harmonics), dtype=complex)
    n_old = field.grid.n_sites
    offset = (grid.n_sites - n_old) // 2
    out[offset:offset + n_old, :field.grid.n_harmonics] = field.coeffs
    return SpectralField(grid, out)


def refine(result: BreatherResult, factor: int) -> BreatherResult:
    """Re-solve on a grid with ``factor`` times the sites and harmonics.

    The X0-norm change against the input is recorded on the returned result
    as a discretisation-error estimate.  The re-solve starts from the
    zero-padded field, so a well-resolved input converges in a step or two.
    """
    if result.status != STATUS_CONVERGED:
        raise ValueError("refine needs a converged result")
    if factor < 1:
        raise ValueError("factor must be >= 1")
    old_grid = result.field.grid
    deg = result.potential.wprime_degree
    n_t = max(old_grid.n_time_samples * factor,
              2 * (max(deg, 1) + 1) * old_grid.n_harmonics * factor + 2)
    grid = GridSpec(old_grid.n_sites * factor, old_grid.n_harmonics * factor,
                    n_t, old_grid.omega)
    config = SolverConfig(grid=grid, weight=result.weight, potential=result.potential,
                          parity=result.parity, strategy="newton")
    refined = newton_solve(config, _interpolate(result.field, grid))
    refined.refinement_change = abs(refined.x0_norm - result.x0_norm)
    return refined


def continuation_sweep(config: SolverConfig, omega_from: float, omega_to: float,
                       steps: int) -> list[BreatherResult]:
    """Solve along a frequency ramp, seeding each point from the last success.

    A failed point is bisected once: the midpoint between the last good
    frequency and the failure is solved first and, if it converges, the
    failed point is retried from its field.  Points inside the phonon band
    are reported with a resonance status instead of raising.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    omegas = np.linspace(omega_from, omega_to, steps)
    results: list[BreatherResult] = []
    carry: SpectralField | None = None
    last_good_omega: float | None = None
    for omega in omegas:
        cfg = _with_omega(config, float(omega))
        try:
            res = solve(cfg, _regrid(carry, cfg.grid))
        except ResonanceError:
            results.append(_resonance_placeholder(cfg))
            continue
        if res.status != STATUS_CONVERGED and carry is not None and last_good_omega is not None:
            mid_cfg = _with_omega(config, 0.5 * (last_good_omega + float(omega)))
            try:
                mid = solve(mid_cfg, _regrid(carry, mid_cfg.grid))
                if mid.status == STATUS_CONVERGED:
                    res = solve(cfg, _regrid(mid.field, cfg.grid))
            except ResonanceError:
                pass
        results.append(res)
        if res.status == STATUS_CONVERGED:
            carry, last_good_omega = res.field, float(omega)
    return results


def _with_omega(config: SolverConfig, omega: float) -> SolverConfig:
    grid = config.grid
    return replace(config, grid=GridSpec(grid.n_sites, grid.n_harmonics,
                                         grid.n_time_samples, omega))


def _regrid(field: SpectralField | None, grid: GridSpec) -> SpectralField | None:
    if field is None:
        return None
    return SpectralField(grid, field.coeffs.copy())


def _resonance_placeholder(config: SolverConfig) -> BreatherResult:
    fld = zero_field(config.grid)
    return BreatherResult(
        field=fld, omega=config.grid.omega, iterations=0,
        fp_residual=float("nan"), strong_residual=0.0, x0_norm=0.0,
        x2_norm=0.0, parity_deviation=0.0, decay_fit=float("nan"),
        bounds=None, status=STATUS_RESONANCE, parity=config.parity,
        weight=config.weight, potential=config.potential, trace=[])
