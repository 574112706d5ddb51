"""Synthesis and statistics of the counter-propagating stochastic streams.

The field amplitude is ``A(x, t) = A0 * (xi_plus(t - x/c) + xi_minus(t + x/c))``
where each stream is a stationary, zero-mean, unit-variance Gaussian process
with autocorrelation ``g1``.  Streams are mutually independent.

Sampling uses circulant embedding: the target covariance sequence is
periodized onto a grid padded by at least eight correlation times, its FFT
gives the (non-negative) spectral weights, and one inverse real FFT of
weighted white noise yields an exact-covariance realization.  The pad is
discarded so the retained samples carry no periodicity artifacts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.fft import next_fast_len

from .errors import (EvenOrderRejected, IndefiniteCovariance, OutOfRange,
                     ResolutionError)

_SPECTRUM_TOL = 1e-8     # relative tolerance for negative circulant eigenvalues
_PAD_CORR_TIMES = 8.0    # pad length in units of tau


@dataclass(frozen=True)
class CorrelationModel:
    """First-order correlation ``g1`` of a single stream.

    kind
        ``"gaussian"`` for ``exp(-(s/tau)^2)`` or ``"tabulated"`` for an
        even, linearly interpolated table.
    tau
        Correlation time; sets resolution and padding requirements.
    table
        Optional ``((lag, value), ...)`` pairs for the tabulated kind,
        lags non-negative and strictly increasing, ``value(0) == 1``,
        final ``|value| < 1e-6``.
    """

    kind: str = "gaussian"
    tau: float = 1.0
    table: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "tabulated"):
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.kind == "tabulated":
            if self.table is None or len(self.table) < 2:
                raise ValueError("tabulated model needs at least two (lag, value) pairs")
            lags = np.array([p[0] for p in self.table], dtype=float)
            vals = np.array([p[1] for p in self.table], dtype=float)
            if np.any(np.diff(lags) <= 0):
                raise ValueError("table lags must be strictly increasing")
            if lags[0] != 0.0:
                raise ValueError("table must start at lag 0")
            if abs(vals[0] - 1.0) > 1e-9:
                raise ValueError("g1(0) must be 1 (unit-variance streams)")
            if abs(vals[-1]) >= 1e-6:
                raise ValueError("table must decay: |last value| < 1e-6")
            object.__setattr__(self, "_lags", lags)
            object.__setattr__(self, "_vals", vals)

    @classmethod
    def gaussian(cls, tau: float) -> "CorrelationModel":
        return cls(kind="gaussian", tau=tau)

    @classmethod
    def tabulated(cls, lags: Sequence[float], values: Sequence[float],
                  tau: float | None = None) -> "CorrelationModel":
        """Build a tabulated model, folding and checking an even table.

        Tables may include negative lags; they must then mirror the positive
        side to within 1e-9 or a ``ValueError`` is raised.  When ``tau`` is
        omitted it is taken as the first lag where the table drops below 1/e.
        """
        lags = np.asarray(lags, dtype=float)
        values = np.asarray(values, dtype=float)
        if lags.shape != values.shape or lags.ndim != 1:
            raise ValueError("lags and values must be 1-d arrays of equal length")
        if np.any(lags < 0):
            # Folding an even table needs canonical order; positive-only
            # tables keep caller order so bad ordering is caught below.
            order = np.argsort(lags)
            lags, values = lags[order], values[order]
        neg = lags < 0
        if np.any(neg):
            nl, nv = -lags[neg][::-1], values[neg][::-1]
            pos_mask = lags > 0
            pl, pv = lags[pos_mask], values[pos_mask]
            if (nl.size != pl.size or np.max(np.abs(nl - pl)) > 1e-9
                    or np.max(np.abs(nv - pv)) > 1e-9):
                raise ValueError("tabulated g1 is not even in the lag")
            lags, values = lags[~neg], values[~neg]
        if tau is None:
            below = np.nonzero(values < math.exp(-1.0))[0]
            if below.size == 0:
                raise ValueError("cannot infer tau: table never drops below 1/e")
            tau = float(lags[below[0]])
        return cls(kind="tabulated", tau=float(tau),
                   table=tuple((float(l), float(v)) for l, v in zip(lags, values)))

    def g1(self, s):
        """Evaluate the correlation at lag ``s`` (scalar or array)."""
        s = np.abs(np.asarray(s, dtype=float))
        if self.kind == "gaussian":
            out = np.exp(-((s / self.tau) ** 2))
        else:
            out = np.interp(s, self._lags, self._vals, right=0.0)
        return float(out) if out.ndim == 0 else out

    @property
    def max_lag(self) -> float:
        """Lag beyond which g1 is treated as zero."""
        if self.kind == "gaussian":
            return 15.0 * self.tau          # exp(-225) is far below float noise
        return self._lags[-1]

    def breakpoints(self):
        """Lags where g1 is not smooth (table knots; empty for gaussian)."""
        if self.kind == "gaussian":
            return []
        return [float(l) for l in self._lags]


@dataclass(frozen=True)
class FieldGrid:
    """Uniform time grid ``t_start + k*dt`` for ``k = 0 .. n_steps-1``."""

    dt: float
    n_steps: int
    t_start: float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 2:
            raise ValueError("n_steps must be at least 2")

    @property
    def duration(self) -> float:
        return (self.n_steps - 1) * self.dt

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_steps)


@dataclass(frozen=True, eq=False)
class FieldRealization:
    """One sampled pair of streams on a grid; arrays are read-only."""

    grid: FieldGrid
    xi_plus: np.ndarray
    xi_minus: np.ndarray
    seed: object

    def __post_init__(self):
        for arr in (self.xi_plus, self.xi_minus):
            if arr.shape != (self.grid.n_steps,):
                raise ValueError("stream length does not match grid")
            arr.setflags(write=False)


def _seed_entropy(seed) -> tuple:
    """Normalize a seed to a tuple of non-negative ints for SeedSequence."""
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        return (int(seed),)
    if isinstance(seed, (tuple, list)):
        if not seed or any((not isinstance(s, (int, np.integer))) or s < 0 for s in seed):
            raise ValueError("seed tuple must contain non-negative integers")
        return tuple(int(s) for s in seed)
    raise ValueError(f"seed must be an int or tuple of ints, got {type(seed)}")


def _stream_rng(entropy: tuple, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy + (stream,))
    return np.random.Generator(np.random.PCG64(ss))


def _check_resolution(model: CorrelationModel, dt: float):
    if dt > model.tau / 8.0 * (1.0 + 1e-12):
        raise ResolutionError(
            f"dt = {dt} exceeds tau/8 = {model.tau / 8.0}; refine the grid")


def embedding_spectrum(model: CorrelationModel, grid: FieldGrid):
    """Circulant length and half-spectrum amplitudes for the padded grid.

    Returns ``(L, amp)`` where ``L`` is the (even) embedding length and
    ``amp`` has length ``L//2 + 1``; feeding ``amp * (a + i b)`` with unit
    normals ``a, b`` through ``irfft`` yields a realization whose retained
    covariance matches ``g1`` up to terms of order ``g1(8 tau)``.
    """
    pad = int(math.ceil(_PAD_CORR_TIMES * model.tau / grid.dt))
    L = next_fast_len(grid.n_steps + pad)
    while L % 2:
        L = next_fast_len(L + 1)
    k = np.arange(L)
    circ_lag = np.minimum(k, L - k) * grid.dt
    eig = np.fft.fft(model.g1(circ_lag)).real
    top = eig.max()
    if eig.min() < -_SPECTRUM_TOL * top:
        raise IndefiniteCovariance(
            f"negative spectral component {eig.min():.3e} for tabulated correlation")
    eig = np.clip(eig, 0.0, None)
    half = L // 2 + 1
    amp = np.empty(half)
    amp[0] = math.sqrt(eig[0] * L)
    amp[-1] = math.sqrt(eig[L // 2] * L)
    amp[1:-1] = np.sqrt(eig[1:L // 2] * L / 2.0)
    return L, amp


def synthesize_stream(rng: np.random.Generator, L: int, amp: np.ndarray,
                      n_steps: int) -> np.ndarray:
    """Draw one real stream of length ``n_steps`` from the embedding spectrum."""
    z = rng.standard_normal(L)
    half = L // 2 + 1
    spec = np.zeros(half, dtype=complex)
    spec.real = z[:half]
    spec[1:-1] += 1j * z[half:]
    spec *= amp
    return np.fft.irfft(spec, n=L)[:n_steps].copy()


def sample_field(model: CorrelationModel, grid: FieldGrid, seed) -> FieldRealization:
    """Sample both streams on ``grid`` from disjoint RNG streams.

    Deterministic: identical ``(model, grid, seed)`` give bit-identical
    realizations.  The two streams come from separate children of the seed
    so they are independent and individually reproducible.
    """
    _check_resolution(model, grid.dt)
    L, amp = embedding_spectrum(model, grid)
    entropy = _seed_entropy(seed)
    xi_plus = synthesize_stream(_stream_rng(entropy, 0), L, amp, grid.n_steps)
    xi_minus = synthesize_stream(_stream_rng(entropy, 1), L, amp, grid.n_steps)
    return FieldRealization(grid=grid, xi_plus=xi_plus, xi_minus=xi_minus, seed=seed)


def field_at(realization: FieldRealization, x, t, direction: str, c: float = 1.0):
    """Evaluate one stream at position ``x`` and time ``t``.

    The plus stream propagates rightward and is evaluated at ``t - x/c``,
    the minus stream at ``t + x/c``.  Linear interpolation between grid
    nodes; lookups outside the sampled interval raise ``OutOfRange``.
    """
    if direction == "plus":
        shifted = np.asarray(t, dtype=float) - np.asarray(x, dtype=float) / c
        data = realization.xi_plus
    elif direction == "minus":
        shifted = np.asarray(t, dtype=float) + np.asarray(x, dtype=float) / c
        data = realization.xi_minus
    else:
        raise ValueError(f"direction must be 'plus' or 'minus', got {direction!r}")
    grid = realization.grid
    idx = (shifted - grid.t_start) / grid.dt
    eps = 1e-9
    if np.any(idx < -eps) or np.any(idx > grid.n_steps - 1 + eps):
        raise OutOfRange(
            f"lookup at shifted time {shifted} outside sampled interval "
            f"[{grid.t_start}, {grid.t_end}]")
    idx = np.clip(idx, 0.0, grid.n_steps - 1.0)
    k = np.minimum(idx.astype(int), grid.n_steps - 2)
    w = idx - k
    out = (1.0 - w) * data[k] + w * data[k + 1]
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class CorrelationEstimate:
    """Sample correlation curves keyed by 'plus', 'minus', 'cross'."""

    lags: np.ndarray
    estimates: dict
    stderrs: dict


def _block_means(series: np.ndarray, block_len: int) -> np.ndarray:
    nb = series.size // block_len
    while nb < 8 and block_len > 1:
        block_len = max(block_len // 2, 1)
        nb = series.size // block_len
    return series[:nb * block_len].reshape(nb, block_len).mean(axis=1)


def _block_stderr(series: np.ndarray, block_len: int) -> float:
    means = _block_means(series, block_len)
    if means.size < 2:
        return float(series.std(ddof=1) / math.sqrt(series.size))
    return float(means.std(ddof=1) / math.sqrt(means.size))


def _lag_products(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return a * b
    return a[:-k] * b[k:]


def _correlation_scan(realization, max_lag, transform):
    grid = realization.grid
    if max_lag > grid.duration / 4.0:
        raise ValueError("max_lag must not exceed a quarter of the duration")
    n_lags = int(math.floor(max_lag / grid.dt + 1e-9))
    lags = np.arange(n_lags + 1) * grid.dt
    # blocks much longer than the correlation structure of the products
    block_len = max(4 * (n_lags + 1), 32)
    xp = transform(realization.xi_plus)
    xm = transform(realization.xi_minus)
    pairs = {"plus": (xp, xp), "minus": (xm, xm), "cross": (xp, xm)}
    estimates, stderrs = {}, {}
    for key, (a, b) in pairs.items():
        est = np.empty(n_lags + 1)
        err = np.empty(n_lags + 1)
        for k in range(n_lags + 1):
            prod = _lag_products(a, b, k)
            est[k] = prod.mean()          # unbiased: population mean is known zero
            err[k] = _block_stderr(prod, block_len)
        estimates[key], stderrs[key] = est, err
    return CorrelationEstimate(lags=lags, estimates=estimates, stderrs=stderrs)


def estimate_g1(realization: FieldRealization, max_lag: float) -> CorrelationEstimate:
    """Sample autocovariance of each stream and their cross-covariance.

    Standard errors come from block averaging of the lag products with
    blocks spanning several correlation times.
    """
    return _correlation_scan(realization, max_lag, lambda x: x)


def estimate_g2(realization: FieldRealization, max_lag: float) -> CorrelationEstimate:
    """Sample second-order correlation ``M[xi(t)^2 xi(t+lag)^2]``.

    For Gaussian streams the same-stream curve is ``1 + 2 g1(lag)^2`` and
    the cross-stream curve is 1.
    """
    return _correlation_scan(realization, max_lag, lambda x: x * x)


def odd_moment_check(realization: FieldRealization,
                     orders: Iterable[int] = (1, 3, 5)) -> list:
    """Sample odd moments of the pooled streams; all should vanish.

    Returns ``[(order, estimate, stderr), ...]``.  Even orders are refused
    (they do not vanish and would silently pass a zero test's complement);
    orders above 7 are too noisy to be meaningful and are rejected too.
    """
    results = []
    block_len = 64
    for order in orders:
        if order % 2 == 0:
            raise EvenOrderRejected(f"order {order} is even; only odd orders vanish")
        if not 1 <= order <= 7:
            raise ValueError("orders must lie in 1..7")
        means = np.concatenate([
            _block_means(realization.xi_plus ** order, block_len),
            _block_means(realization.xi_minus ** order, block_len),
        ])
        est = float(np.concatenate([realization.xi_plus ** order,
                                    realization.xi_minus ** order]).mean())
        stderr = float(means.std(ddof=1) / math.sqrt(means.size))
        results.append((order, est, stderr))
    return results
