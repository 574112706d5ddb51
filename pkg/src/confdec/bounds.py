"""Physical source models for the fluctuations and experimental bounds.

A zero-point model cuts the fluctuation spectrum off at ``lambda_cut``
Planck lengths, which fixes the correlation time ``tau = lambda_cut * t_p``
and amplitude ``a0 = lambda_cut**-2``.  Feeding these into the decoherence
rate and comparing with the contrast retained in an atom-interferometry
experiment turns an observed contrast loss into a lower bound on
``lambda_cut``.  A cosmological source model instead takes amplitude and
correlation time from energy-density limits on conformal waves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .core import SI, PhysicalConstants
from .errors import QuadratureFailure, SubPlanckCutoff


@dataclass(frozen=True)
class CutoffModel:
    """Zero-point fluctuation model truncated at ``lambda_cut`` Planck lengths."""

    lambda_cut: float
    omega_max: float
    a0: float
    tau: float


def build_cutoff_model(lambda_cut: float,
                       constants: PhysicalConstants = SI) -> CutoffModel:
    """Derive ``(omega_max, a0, tau)`` from the cutoff length.

    ``omega_max = 2 pi / (lambda_cut t_p)``, ``a0 = lambda_cut**-2`` and
    ``tau = lambda_cut t_p``.  Cutoffs below one Planck length are refused.
    """
    if lambda_cut < 1.0:
        raise SubPlanckCutoff(f"lambda_cut = {lambda_cut} is below the Planck scale")
    t_p = constants.t_planck
    return CutoffModel(lambda_cut=float(lambda_cut),
                       omega_max=2.0 * math.pi / (lambda_cut * t_p),
                       a0=lambda_cut**-2.0,
                       tau=lambda_cut * t_p)


def mode_density(omega: float, constants: PhysicalConstants = SI) -> float:
    """Spectral mode density ``4 pi omega^2 / (2 pi c)^3`` per unit volume."""
    if omega < 0:
        raise ValueError("omega must be non-negative")
    return 4.0 * math.pi * omega**2 / (2.0 * math.pi * constants.c) ** 3


def zero_point_energy_density(omega_max: float,
                              constants: PhysicalConstants = SI) -> float:
    """Zero-point energy density up to the cutoff: ``hbar omega_max^4 / (16 pi^2 c^3)``.

    Equal to the integral of ``(hbar omega / 2) * mode_density(omega)`` from
    0 to ``omega_max`` (see ``integrated_zero_point_density``).
    """
    if omega_max < 0:
        raise ValueError("omega_max must be non-negative")
    return constants.hbar * omega_max**4 / (16.0 * math.pi**2 * constants.c**3)


def integrated_zero_point_density(omega_max: float,
                                  constants: PhysicalConstants = SI) -> float:
    """Quadrature of ``(hbar omega / 2) * mode_density`` over ``[0, omega_max]``.

    Numerical verification path for the closed form; agrees with
    ``zero_point_energy_density`` to better than 1e-10 relative.
    """
    val, err = quad(lambda w: 0.5 * constants.hbar * w * mode_density(w, constants),
                    0.0, omega_max, epsabs=0.0, epsrel=1e-12, limit=200)
    if abs(err) > 1e-9 * max(abs(val), 1e-300):
        raise QuadratureFailure("zero-point density quadrature did not converge")
    return val


@dataclass(frozen=True)
class ExperimentParams:
    """Matter-wave interferometry run: mass, flight time, observed contrast loss.

    ``separation`` (wavepacket split, meters) is optional; when omitted the
    separation is assumed far beyond the correlation length ``c tau`` so the
    localization kernel is saturated.
    """

    mass_amu: float
    flight_time: float
    contrast_loss: float
    separation: float | None = None

    def __post_init__(self):
        if self.mass_amu <= 0 or self.flight_time <= 0:
            raise ValueError("mass_amu and flight_time must be positive")
        if not 0.0 < self.contrast_loss < 1.0:
            raise ValueError("contrast_loss must lie in (0, 1)")
        if self.separation is not None and self.separation <= 0:
            raise ValueError("separation must be positive when given")


@dataclass(frozen=True)
class CosmoSourceParams:
    """Conformal-wave source limited by the cosmological energy density.

    ``energy_density_limit`` is recorded in g/cm^3 for reference; the loss
    prediction only uses the implied ``amplitude`` and ``correlation_time``.
    """

    energy_density_limit: float = 1e-29
    correlation_time: float = 1e-13
    amplitude: float = 1e-30

    def __post_init__(self):
        if min(self.energy_density_limit, self.correlation_time) <= 0:
            raise ValueError("energy density limit and correlation time must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")


def _loss(mass_kg: float, a0: float, tau: float, flight_time: float,
          separation: float | None, constants: PhysicalConstants) -> float:
    c, hbar = constants.c, constants.hbar
    loss = (math.sqrt(math.pi / 2.0) * mass_kg**2 * c**4 * a0**4 * tau
            * flight_time / hbar**2)
    if separation is not None:
        xi = separation / (c * tau)
        loss *= 1.0 - math.exp(-2.0 * xi * xi)
    return loss


def predicted_contrast_loss(experiment: ExperimentParams, model: CutoffModel,
                            constants: PhysicalConstants = SI) -> float:
    """Fractional contrast loss the cutoff model predicts for the experiment.

    ``sqrt(pi/2) M^2 c^4 a0^4 tau T / hbar^2``, multiplied by the kernel
    factor ``1 - exp(-2 (dx / c tau)^2)`` when a separation is supplied.
    Scales as the fourth power of the amplitude and linearly in both the
    correlation time and the flight time.
    """
    mass_kg = experiment.mass_amu * constants.amu
    return _loss(mass_kg, model.a0, model.tau, experiment.flight_time,
                 experiment.separation, constants)


def lambda_bound(experiment: ExperimentParams,
                 constants: PhysicalConstants = SI) -> float:
    """Smallest cutoff compatible with the observed contrast loss.

    Setting the predicted loss equal to the observed one and inverting the
    ``lambda_cut**-7`` dependence gives

        lambda_cut >= (sqrt(pi/2) M^2 c^4 t_p T / (hbar^2 delta)) ** (1/7).

    Inverse of ``predicted_contrast_loss`` over the saturated-kernel regime:
    feeding a predicted loss back in recovers the cutoff exactly.
    """
    mass_kg = experiment.mass_amu * constants.amu
    base = (math.sqrt(math.pi / 2.0) * mass_kg**2 * constants.c**4
            * constants.t_planck * experiment.flight_time
            / (constants.hbar**2 * experiment.contrast_loss))
    return base ** (1.0 / 7.0)


def cosmological_feasibility(source: CosmoSourceParams,
                             experiment: ExperimentParams,
                             constants: PhysicalConstants = SI) -> float:
    """Contrast loss the cosmological source would produce in the experiment.

    Uses the source amplitude and correlation time directly; the result is
    astronomically small because of the fourth power of the amplitude.
    """
    mass_kg = experiment.mass_amu * constants.amu
    return _loss(mass_kg, source.amplitude, source.correlation_time,
                 experiment.flight_time, experiment.separation, constants)


def bound_report(experiment: ExperimentParams,
                 lambda_cut: float | None = None,
                 source: CosmoSourceParams | None = None,
                 reference_bound: float | None = None,
                 constants: PhysicalConstants = SI) -> dict:
    """Assemble the full bound computation as a plain dict.

    Includes the cutoff bound, intermediate quantities, the predicted loss
    for an explicit ``lambda_cut`` (default: the bound itself), optionally
    the cosmological-source loss, and a comparison against an externally
    published reference bound when one is supplied.
    """
    mass_kg = experiment.mass_amu * constants.amu
    bound = lambda_bound(experiment, constants)
    inputs = {
        "mass_amu": experiment.mass_amu,
        "flight_time_s": experiment.flight_time,
        "contrast_loss": experiment.contrast_loss,
        "separation_m": experiment.separation,
    }
    consts = {
        "c_m_per_s": constants.c,
        "hbar_J_s": constants.hbar,
        "G_m3_per_kg_s2": constants.G,
        "amu_kg": constants.amu,
        "t_planck_s": constants.t_planck,
        "l_planck_m": constants.l_planck,
    }
    results = {
        "mass_kg": mass_kg,
        "rest_energy_J": mass_kg * constants.c**2,
        "lambda_bound": bound,
    }
    checks = {}
    model = build_cutoff_model(lambda_cut if lambda_cut is not None else bound,
                               constants)
    results["cutoff_model"] = {
        "lambda_cut": model.lambda_cut,
        "omega_max_rad_per_s": model.omega_max,
        "a0": model.a0,
        "tau_s": model.tau,
        "zero_point_energy_density_J_per_m3":
            zero_point_energy_density(model.omega_max, constants),
    }
    results["predicted_loss_at_cutoff"] = predicted_contrast_loss(
        experiment, model, constants)
    checks["loss_round_trip"] = {
        "recovered_lambda": lambda_bound(
            ExperimentParams(experiment.mass_amu, experiment.flight_time,
                             min(results["predicted_loss_at_cutoff"], 1.0 - 1e-12)),
            constants),
        "target_lambda": model.lambda_cut,
    }
    if reference_bound is not None:
        results["reference_bound"] = reference_bound
        results["bound_over_reference"] = bound / reference_bound
        checks["reference_discrepancy"] = {
            "factor": bound / reference_bound,
            "same_order_of_magnitude":
                0.1 <= bound / reference_bound <= 10.0,
        }
    if source is not None:
        results["cosmological_loss"] = cosmological_feasibility(
            source, experiment, constants)
        checks["cosmological_unobservable"] = (
            results["cosmological_loss"] < experiment.contrast_loss * 1e-12)
    return {"inputs": inputs, "constants": consts,
            "results": results, "checks": checks}
