"""Monte Carlo verification of wavepacket decoherence by phase accumulation.

Each sample draws an independent field realization, integrates the effective
potential at two positions to get the accumulated phases

    phi(x) = -(1/hbar) * integral_0^T V(x, t) dt,
    V(x, t) = (M c^2 / 2) * ((1 + A0 * (xi+ + xi-))^2 - 1),

and averages ``exp(i * (phi(x') - phi(x)))`` over the ensemble.  The decay of
that average with T gives the decoherence rate for separation ``|x' - x|``.

Per-sample RNG streams are derived from ``(master seed, T index, sample
index)``, so results are reproducible and independent of block batching up
to floating-point reduction order (below 1e-12 relative).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .core import NATURAL, PhysicalConstants
from .errors import (FitDegenerate, InsufficientSamples, OutOfRange,
                     UndersampledSignal)
from .field import (CorrelationModel, FieldGrid, FieldRealization,
                    _check_resolution, _stream_rng, embedding_spectrum)

_BLOCK = 256            # samples per synthesis batch (fixed for determinism)
_GRID_MARGIN_TAUS = 2.0  # realization slack beyond the light-cone offsets


@dataclass(frozen=True)
class McParams:
    """Configuration of one Monte Carlo coherence run.

    positions
        Pair ``(x, x')`` whose phase difference is tracked.
    t_list
        Flight times; each must be a multiple of ``dt`` and exceed
        ``10 |x - x'| / c`` so edge effects stay subdominant.
    dt
        Integration step, defaulting to ``tau / 8``.
    """

    a0: float
    mass: float
    tau: float
    positions: tuple
    t_list: tuple
    n_samples: int
    seed: int
    dt: float | None = None
    constants: PhysicalConstants = dc_field(default_factory=lambda: NATURAL)

    def __post_init__(self):
        if self.a0 <= 0:
            raise ValueError("a0 must be positive")
        if self.a0 > 0.2:
            raise ValueError("a0 > 0.2 is outside the perturbative regime")
        if self.a0 > 0.1:
            warnings.warn("a0 > 0.1: quartic-order corrections may be visible",
                          stacklevel=2)
        if self.mass <= 0 or self.tau <= 0:
            raise ValueError("mass and tau must be positive")
        if len(self.positions) != 2:
            raise ValueError("positions must be a pair (x, x')")
        object.__setattr__(self, "positions", tuple(float(x) for x in self.positions))
        object.__setattr__(self, "t_list", tuple(float(t) for t in self.t_list))
        if not self.t_list:
            raise ValueError("t_list must not be empty")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        _check_resolution(CorrelationModel.gaussian(self.tau), self.dt_effective)
        dx_time = abs(self.positions[1] - self.positions[0]) / self.constants.c
        for t in self.t_list:
            if t <= 10.0 * dx_time:
                raise ValueError(
                    f"T = {t} must exceed 10 |x - x'| / c = {10.0 * dx_time}")
            steps = t / self.dt_effective
            if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
                raise ValueError(f"T = {t} is not a multiple of dt = {self.dt_effective}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    @property
    def dt_effective(self) -> float:
        return self.tau / 8.0 if self.dt is None else self.dt

    @property
    def delta_x(self) -> float:
        return abs(self.positions[1] - self.positions[0])

    @property
    def model(self) -> CorrelationModel:
        return CorrelationModel.gaussian(self.tau)


@dataclass(frozen=True)
class CoherenceRecord:
    t: float
    mean: complex
    stderr: float
    n_samples: int


@dataclass(frozen=True)
class CoherenceEstimate:
    delta_x: float
    records: tuple


@dataclass(frozen=True)
class RateFit:
    rate: float
    stderr: float
    intercept: float


def _mc_grid(params: McParams, t: float):
    """Realization grid covering [-max|x|/c - 2 tau, T + max|x|/c + 2 tau].

    Returns ``(grid, k0, k_t)`` with ``k0`` the index of t = 0 and ``k_t``
    the number of integration steps to T.
    """
    dt = params.dt_effective
    margin = (max(abs(x) for x in params.positions) / params.constants.c
              + _GRID_MARGIN_TAUS * params.tau)
    k0 = int(math.ceil(margin / dt - 1e-9))
    k_t = int(round(t / dt))
    grid = FieldGrid(dt=dt, n_steps=2 * k0 + k_t + 1, t_start=-k0 * dt)
    return grid, k0, k_t


def _shifted_segment(arr: np.ndarray, k0: int, k_t: int, offset: float) -> np.ndarray:
    """Slice ``arr`` at fractional indices ``k0 + offset + (0..k_t)``.

    Works on the last axis; linear interpolation between neighbors when the
    offset is not a whole number of steps.
    """
    q0 = k0 + offset
    base = int(math.floor(q0 + 1e-12))
    w = q0 - base
    n = arr.shape[-1]
    need_hi = base + k_t + (1 if w > 1e-12 else 0)
    if base < 0 or need_hi > n - 1:
        raise OutOfRange("realization does not cover the shifted integration window")
    if w <= 1e-12:
        return arr[..., base:base + k_t + 1]
    return ((1.0 - w) * arr[..., base:base + k_t + 1]
            + w * arr[..., base + 1:base + k_t + 2])


def _phases_at(xi_p, xi_m, k0, k_t, params: McParams, x: float) -> np.ndarray:
    """Accumulated phase at position x for stacked realizations (..., n)."""
    c = params.constants.c
    dt = params.dt_effective
    shift = x / (c * dt)
    s = (_shifted_segment(xi_p, k0, k_t, -shift)
         + _shifted_segment(xi_m, k0, k_t, +shift))
    integrand = params.a0 * s + 0.5 * params.a0**2 * s * s
    trapz = integrand.sum(axis=-1) - 0.5 * (integrand[..., 0] + integrand[..., -1])
    pref = params.mass * c**2 / params.constants.hbar
    return -pref * dt * trapz


def accumulate_phase(realization: FieldRealization, x: float, t_final: float,
                     params: McParams) -> float:
    """Phase accumulated at position ``x`` from t = 0 to ``t_final``.

    The realization grid must contain t = 0 as a node and cover the shifted
    window for this position (``OutOfRange`` otherwise).
    """
    grid = realization.grid
    dt = grid.dt
    k0_f = -grid.t_start / dt
    if abs(k0_f - round(k0_f)) > 1e-9:
        raise ValueError("realization grid does not contain t = 0 as a node")
    steps = t_final / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)):
        raise ValueError(f"t_final = {t_final} is not a multiple of dt = {dt}")
    k0, k_t = int(round(k0_f)), int(round(steps))
    if k_t < 1:
        raise ValueError("t_final must be at least one step")
    return float(_phases_at(realization.xi_plus[None, :], realization.xi_minus[None, :],
                            k0, k_t, params, x)[0])


def predicted_mean_phase(params: McParams, t: float) -> float:
    """First-order ensemble mean of the accumulated phase, ``-(M c^2/hbar) A0^2 T``."""
    pref = params.mass * params.constants.c**2 / params.constants.hbar
    return -pref * params.a0**2 * t


def _phase_pair_blocks(params: McParams, t: float, t_index: int):
    """Yield per-block phase arrays ``(phi_x, phi_xp)`` for each sample block."""
    grid, k0, k_t = _mc_grid(params, t)
    L, amp = embedding_spectrum(params.model, grid)
    half = L // 2 + 1
    n = grid.n_steps
    x_a, x_b = params.positions
    for start in range(0, params.n_samples, _BLOCK):
        b = min(_BLOCK, params.n_samples - start)
        z = np.empty((2, b, L))
        for j in range(b):
            entropy = (params.seed, t_index, start + j)
            for stream in (0, 1):
                _stream_rng(entropy, stream).standard_normal(out=z[stream, j])
        spec = np.zeros((2, b, half), dtype=complex)
        spec.real = z[:, :, :half]
        spec[:, :, 1:-1] += 1j * z[:, :, half:]
        spec *= amp
        xi = np.fft.irfft(spec, n=L, axis=2)[:, :, :n]
        yield (_phases_at(xi[0], xi[1], k0, k_t, params, x_a),
               _phases_at(xi[0], xi[1], k0, k_t, params, x_b))


def sample_phases(params: McParams, t: float, t_index: int = 0):
    """All per-sample phases ``(phi_x, phi_x')`` at flight time ``t``."""
    chunks = [np.stack(pair) for pair in _phase_pair_blocks(params, t, t_index)]
    stacked = np.concatenate(chunks, axis=1)
    return stacked[0], stacked[1]


def sample_phase_differences(params: McParams, t: float, t_index: int = 0) -> np.ndarray:
    """Per-sample phase differences ``phi(x') - phi(x)`` at flight time ``t``."""
    phi_a, phi_b = sample_phases(params, t, t_index)
    return phi_b - phi_a


def _summarize(z_sums, n: int, t: float) -> CoherenceRecord:
    sr, si, srr, sii, sri = z_sums
    mr, mi = sr / n, si / n
    mean = complex(mr, mi)
    if n < 2:
        return CoherenceRecord(t=t, mean=mean, stderr=0.0, n_samples=n)
    vrr = max((srr - n * mr * mr) / (n - 1), 0.0)
    vii = max((sii - n * mi * mi) / (n - 1), 0.0)
    vri = (sri - n * mr * mi) / (n - 1)
    mag = abs(mean)
    if mag == 0.0:
        var_along = 0.5 * (vrr + vii)
    else:
        ur, ui = mr / mag, mi / mag
        var_along = ur * ur * vrr + 2.0 * ur * ui * vri + ui * ui * vii
    return CoherenceRecord(t=t, mean=mean,
                           stderr=math.sqrt(max(var_along, 0.0) / n), n_samples=n)


def coherence_mc(params: McParams) -> CoherenceEstimate:
    """Ensemble coherence ``M[exp(i (phi(x') - phi(x)))]`` for every T.

    Each T uses its own independent ensemble of ``n_samples`` realizations.
    The standard error is that of the coherence magnitude (variance of the
    sample component along the mean direction).
    """
    if params.n_samples < 100:
        raise InsufficientSamples(
            f"n_samples = {params.n_samples} < 100 gives meaningless statistics")
    records = []
    for t_index, t in enumerate(params.t_list):
        sums = np.zeros(5)
        n = 0
        for phi_a, phi_b in _phase_pair_blocks(params, t, t_index):
            z = np.exp(1j * (phi_b - phi_a))
            re, im = z.real, z.imag
            sums += (re.sum(), im.sum(), (re * re).sum(), (im * im).sum(),
                     (re * im).sum())
            n += z.size
        records.append(_summarize(sums, n, t))
    return CoherenceEstimate(delta_x=params.delta_x, records=tuple(records))


def fit_decoherence_rate(estimate: CoherenceEstimate) -> RateFit:
    """Weighted linear fit of ``-ln|mean|`` against T.

    The slope estimates the decoherence rate; the intercept absorbs the
    T-independent boundary dephasing.  Requires at least four distinct T
    spanning a factor of two, with every coherence at least five standard
    errors above zero.
    """
    recs = estimate.records
    ts = np.array([r.t for r in recs])
    if np.unique(ts).size < 4:
        raise ValueError("rate fit needs at least 4 distinct T values")
    if ts.max() < 2.0 * ts.min():
        raise FitDegenerate(
            f"T range [{ts.min()}, {ts.max()}] spans less than a factor of 2")
    mags = np.array([abs(r.mean) for r in recs])
    errs = np.array([r.stderr for r in recs])
    if np.any(mags <= 5.0 * errs):
        raise UndersampledSignal("coherence magnitude within 5 stderr of zero")
    y = -np.log(mags)
    sigma = errs / mags
    if sigma.max() == 0.0:
        w = np.ones_like(y)
        exact = True
    else:
        w = 1.0 / np.maximum(sigma, 1e-300) ** 2
        exact = False
    s0 = w.sum()
    sx = (w * ts).sum()
    sxx = (w * ts * ts).sum()
    sy = (w * y).sum()
    sxy = (w * ts * y).sum()
    delta = s0 * sxx - sx * sx
    rate = (s0 * sxy - sx * sy) / delta
    intercept = (sxx * sy - sx * sxy) / delta
    stderr = 0.0 if exact else math.sqrt(s0 / delta)
    return RateFit(rate=float(rate), stderr=float(stderr), intercept=float(intercept))
