"""GRW-form master equation: kernel parameters and density-matrix evolution.

At second order the ensemble-averaged evolution of a single massive
particle's position-space density matrix takes the localization form

    d rho / dt = -lambda (1 - exp(-(alpha/4) (x - x')^2)) rho - (i/hbar)[H0, rho]

with rate ``lambda = sqrt(pi/2) M^2 c^4 A0^4 tau / hbar^2`` and inverse-square
localization scale ``alpha = 8 / (c tau)^2``.  Without H0 the equation is
diagonal in ``(x, x')`` and solved exactly; with a free kinetic H0 we use
Strang splitting with a spectral kinetic step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import NATURAL, PhysicalConstants
from .errors import QuadratureFailure, StepTooLarge
from .field import CorrelationModel

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-9
_QUAD_RTOL = 1e-8
_HALVING_TOL = 1e-6


def grw_params(mass: float, a0: float, tau: float,
               constants: PhysicalConstants = NATURAL) -> "GrwParams":
    """Localization rate and scale implied by the fluctuation model."""
    if mass <= 0 or a0 <= 0 or tau <= 0:
        raise ValueError("mass, a0 and tau must be positive")
    c, hbar = constants.c, constants.hbar
    lam = math.sqrt(math.pi / 2.0) * mass**2 * c**4 * a0**4 * tau / hbar**2
    alpha = 8.0 / (c * tau) ** 2
    return GrwParams(lambda_grw=lam, alpha=alpha)


@dataclass(frozen=True)
class GrwParams:
    """Localization parameters: decay rate ``lambda_grw`` and scale ``alpha``."""

    lambda_grw: float
    alpha: float

    def __post_init__(self):
        if self.lambda_grw < 0 or self.alpha <= 0:
            raise ValueError("lambda_grw must be >= 0 and alpha > 0")


def decoherence_factor(delta_x, t, params: GrwParams):
    """Exact off-diagonal suppression ``exp(lambda t (exp(-(alpha/4) dx^2) - 1))``.

    Monotonically decreasing in both ``|delta_x|`` and ``t``; equals 1 at
    either argument zero and saturates at ``exp(-lambda t)`` for separations
    far beyond the correlation length.
    """
    dx = np.asarray(delta_x, dtype=float)
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise ValueError("t must be non-negative")
    out = np.exp(params.lambda_grw * tt * (np.exp(-0.25 * params.alpha * dx * dx) - 1.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Position-space density matrix on a uniform grid.

    ``entries[i, j]`` approximates ``rho(x_i, x_j)``; normalization is
    ``trace * dx = 1``.  Construction validates hermiticity, grid uniformity
    and the trace; positivity is checked on demand (``min_eigenvalue``).
    """

    x_grid: np.ndarray
    entries: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        e = np.asarray(self.entries, dtype=complex)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("x_grid must be 1-d with at least two points")
        if e.shape != (x.size, x.size):
            raise ValueError("entries must be square and match the grid")
        steps = np.diff(x)
        if steps.min() <= 0 or (steps.max() - steps.min()) > 1e-9 * steps.mean():
            raise ValueError("x_grid must be uniformly spaced and increasing")
        scale = max(np.abs(e).max(), 1e-300)
        if np.abs(e - e.conj().T).max() > _HERMITICITY_TOL * scale:
            raise ValueError("entries are not Hermitian within tolerance")
        tr = float(np.real(np.trace(e))) * float(steps.mean())
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ValueError(f"trace * dx = {tr} differs from 1 beyond tolerance")
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "entries", e)
        x.setflags(write=False)
        e.setflags(write=False)

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def n(self) -> int:
        return self.x_grid.size

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)) * self.dx)

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the (Hermitian) entries matrix times dx."""
        return float(np.linalg.eigvalsh(self.entries).min() * self.dx)

    @classmethod
    def from_unnormalized(cls, x_grid, entries) -> "DensityMatrix":
        """Hermitize roundoff and rescale so that ``trace * dx = 1``."""
        e = np.asarray(entries, dtype=complex)
        e = 0.5 * (e + e.conj().T)
        x = np.asarray(x_grid, dtype=float)
        dx = float(x[1] - x[0])
        tr = float(np.real(np.trace(e))) * dx
        if tr <= 0:
            raise ValueError("cannot normalize: non-positive trace")
        return cls(x_grid=x, entries=e / tr)


def gaussian_pure_state(x_grid, sigma: float, center: float = 0.0,
                        momentum: float = 0.0, hbar: float = 1.0) -> DensityMatrix:
    """Pure Gaussian wavepacket ``rho = psi psi*`` with position spread sigma."""
    x = np.asarray(x_grid, dtype=float)
    psi = np.exp(-((x - center) ** 2) / (4.0 * sigma**2)
                 + 1j * momentum * x / hbar)
    return DensityMatrix.from_unnormalized(x, np.outer(psi, psi.conj()))


def superposed_gaussians(x_grid, sigma: float, separation: float,
                         hbar: float = 1.0) -> DensityMatrix:
    """Equal superposition of two Gaussians separated by ``separation``."""
    x = np.asarray(x_grid, dtype=float)
    psi = (np.exp(-((x - separation / 2.0) ** 2) / (4.0 * sigma**2))
           + np.exp(-((x + separation / 2.0) ** 2) / (4.0 * sigma**2)))
    return DensityMatrix.from_unnormalized(x, np.outer(psi, psi.conj()))


def _factor_matrix(rho: DensityMatrix, params: GrwParams, t: float) -> np.ndarray:
    dx_mat = rho.x_grid[:, None] - rho.x_grid[None, :]
    return decoherence_factor(np.abs(dx_mat), t, params)


def evolve_pure_decoherence(rho: DensityMatrix, params: GrwParams,
                            t: float) -> DensityMatrix:
    """Exact solution with H0 = 0: elementwise off-diagonal suppression.

    The diagonal is untouched (factor 1), so the trace is preserved exactly;
    the factor matrix is positive semidefinite, so positivity survives by
    the Schur product theorem.  Composition over time intervals is exact:
    evolving t1 then t2 equals evolving t1 + t2.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    return DensityMatrix(x_grid=rho.x_grid,
                         entries=rho.entries * _factor_matrix(rho, params, t))


def _kinetic_phase(rho: DensityMatrix, mass: float, dt: float,
                   hbar: float) -> np.ndarray:
    k = 2.0 * math.pi * np.fft.fftfreq(rho.n, d=rho.dx)
    return np.exp(-1j * hbar * k * k * dt / (2.0 * mass))


def _kinetic_step(entries: np.ndarray, phase: np.ndarray) -> np.ndarray:
    # rho -> U rho U+ with U diagonal in k-space, applied along both indices
    a = np.fft.ifft(phase[:, None] * np.fft.fft(entries, axis=0), axis=0)
    return np.fft.ifft(phase[None, :].conj() * np.fft.fft(a, axis=1), axis=1)


def _strang_run(rho: DensityMatrix, params: GrwParams, mass: float, dt: float,
                n_steps: int, hbar: float) -> np.ndarray:
    half = _factor_matrix(rho, params, dt / 2.0)
    phase = _kinetic_phase(rho, mass, dt, hbar)
    e = rho.entries.copy()
    for _ in range(n_steps):
        e *= half
        e = _kinetic_step(e, phase)
        e *= half
    return e


def evolve_with_free_hamiltonian(rho: DensityMatrix, params: GrwParams,
                                 mass: float, dt: float, n_steps: int,
                                 constants: PhysicalConstants = NATURAL
                                 ) -> DensityMatrix:
    """Strang-split evolution with a free kinetic Hamiltonian.

    Each step is a decoherence half-step, a spectral kinetic step on both
    density-matrix indices (periodic boundaries), and another half-step.
    The result is recomputed at half the step; if the two disagree by more
    than 1e-6 in max entry norm the step is too coarse (``StepTooLarge``)
    and the caller should reduce ``dt``.  The finer result is returned.
    """
    if mass <= 0 or dt <= 0:
        raise ValueError("mass and dt must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if n_steps == 0:
        return rho
    hbar = constants.hbar
    coarse = _strang_run(rho, params, mass, dt, n_steps, hbar)
    fine = _strang_run(rho, params, mass, dt / 2.0, 2 * n_steps, hbar)
    diff = np.abs(fine - coarse).max()
    if diff > _HALVING_TOL:
        raise StepTooLarge(
            f"halving dt changed the result by {diff:.3e} > {_HALVING_TOL}")
    return DensityMatrix(x_grid=rho.x_grid,
                         entries=0.5 * (fine + fine.conj().T))


def general_kernel(g1_model: CorrelationModel, delta_x: float, t_total: float,
                   mass: float, a0: float,
                   constants: PhysicalConstants = NATURAL) -> float:
    """Relative off-diagonal change for an arbitrary even correlation g1.

    Evaluates

        (M^2 c^4 A0^4 / hbar^2) * [ I1 - 2 I2 ],
        I1 = int_0^T int_0^T g1(t - t' - dx/c) g1(t - t' + dx/c) dt dt',
        I2 = int_0^T int_0^t g1(t - t')^2 dt' dt,

    with both double integrals reduced to single lag integrals weighted by
    (T - |s|) and computed adaptively to 1e-8 relative tolerance.  For the
    Gaussian g1 and T >> tau this approaches
    ``sqrt(pi/2) (M c^2 A0^2 / hbar)^2 tau T (exp(-2 dx^2/(c tau)^2) - 1)``
    with finite-T edge terms of order tau / T.
    """
    if t_total <= 0:
        raise ValueError("t_total must be positive")
    tau, c = g1_model.tau, constants.c
    d = abs(delta_x) / c
    if t_total < 10.0 * max(tau, d):
        raise ValueError("validity needs T >= 10 max(tau, delta_x / c)")

    def weighted(f, support, kinks=()):
        hi = min(t_total, support)
        if hi <= 0.0:
            return 0.0
        pts = sorted({p for p in kinks if 0.0 < p < hi})
        val, err = quad(lambda s: (t_total - s) * f(s), 0.0, hi,
                        epsabs=0.0, epsrel=_QUAD_RTOL, limit=400,
                        points=pts or None)
        if abs(err) > 10.0 * _QUAD_RTOL * max(abs(val), 1e-300):
            raise QuadratureFailure(
                f"quadrature error {err:.3e} too large for value {val:.3e}")
        return val

    # Tabulated correlations are piecewise linear, so hand their
    # breakpoints to the adaptive integrator.
    knots = g1_model.breakpoints()
    # I1: even integrand over [-T, T] -> twice the half-line integral;
    # the product vanishes once either factor leaves its support.
    i1 = 2.0 * weighted(lambda s: g1_model.g1(s - d) * g1_model.g1(s + d),
                        g1_model.max_lag + d,
                        kinks=[d + k for k in knots] + [d - k for k in knots]
                              + [k - d for k in knots])
    i2 = weighted(lambda s: g1_model.g1(s) ** 2, g1_model.max_lag, kinks=knots)
    pref = (mass * c**2 * a0**2 / constants.hbar) ** 2
    return pref * (i1 - 2.0 * i2)


def closed_form_kernel(delta_x: float, t_total: float, mass: float, a0: float,
                       tau: float, constants: PhysicalConstants = NATURAL) -> float:
    """Large-T Gaussian-correlation limit of ``general_kernel``."""
    lam = grw_params(mass, a0, tau, constants).lambda_grw
    dxn = delta_x / (constants.c * tau)
    return lam * t_total * (math.exp(-2.0 * dxn * dxn) - 1.0)
