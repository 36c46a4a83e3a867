"""Observables extracted from trajectories.

The transient decay rate comes from a log-linear fit of the quadrature
envelope sqrt(z^2 + (zdot/carrier)^2); the carrier frequency comes from
interpolated zero crossings. Stationary statistics average z^2 over the
post-burn-in samples of an ensemble of driven realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constants import DerivedConstants
from .dynamics import Trajectory


@dataclass(frozen=True)
class TransientFit:
    """Fitted envelope decay rate and carrier frequency, in units of omega_C."""

    decay_rate: float
    carrier_freq: float
    r_squared: float
    window: tuple[float, float]
    low_confidence: bool  # set when the log-envelope fit has r^2 < 0.9


@dataclass(frozen=True)
class EnsembleStats:
    n_realizations: int
    mean_z2: float   # ensemble-and-time averaged z^2 (lambda_C_bar^2 units)
    stderr: float    # standard error from between-realization scatter


def fit_decay_rate(traj: Trajectory, window: tuple[float, float]) -> TransientFit:
    """Fit decay rate and carrier to a decaying oscillation inside ``window``."""
    t0, t1 = window
    if t0 < traj.times[0] or t1 > traj.times[-1] or t0 >= t1:
        raise ValueError(
            f"fit window [{t0}, {t1}] must lie inside the trajectory span "
            f"[{traj.times[0]}, {traj.times[-1]}]"
        )
    mask = (traj.times >= t0) & (traj.times <= t1)
    t = traj.times[mask]
    z = traj.z[mask]
    v = traj.zdot[mask]

    # carrier from linearly interpolated zero crossings of z
    flips = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
    if len(flips) < 2:
        raise ValueError("too few zero crossings in window to estimate the carrier")
    t_cross = t[flips] - z[flips] * (t[flips + 1] - t[flips]) / (z[flips + 1] - z[flips])
    carrier = math.pi * (len(t_cross) - 1) / (t_cross[-1] - t_cross[0])

    envelope = np.hypot(z, v / carrier)
    if np.any(envelope <= 0.0):
        raise ValueError("quadrature envelope vanishes inside the fit window")
    log_env = np.log(envelope)
    slope, intercept = np.polyfit(t, log_env, 1)
    residuals = log_env - (slope * t + intercept)
    ss_tot = float(np.sum((log_env - log_env.mean()) ** 2))
    r_squared = 0.0 if ss_tot == 0.0 else 1.0 - float(np.sum(residuals**2)) / ss_tot
    r_squared = min(max(r_squared, 0.0), 1.0)
    return TransientFit(
        decay_rate=float(-slope),
        carrier_freq=float(carrier),
        r_squared=r_squared,
        window=(float(t0), float(t1)),
        low_confidence=r_squared < 0.9,
    )


def transition_time_from_fit(fit: TransientFit, dc: DerivedConstants) -> float:
    """Physical 1/e time of the fitted envelope, in seconds.

    For the ideal rate eps/2 this equals 2/(tau*omega_C^2).
    """
    if fit.decay_rate <= 0.0:
        raise ValueError(f"decay rate must be positive, got {fit.decay_rate}")
    return 1.0 / (fit.decay_rate * dc.omega_C)


def ensemble_stationary_variance(trajs: Sequence[Trajectory],
                                 discard: float) -> EnsembleStats:
    """Average z^2 over realizations after discarding the burn-in fraction."""
    if len(trajs) < 2:
        raise ValueError(f"need at least 2 realizations, got {len(trajs)}")
    if not 0.0 <= discard < 1.0:
        raise ValueError(f"discard fraction must lie in [0, 1), got {discard}")
    per_run = []
    for traj in trajs:
        start = int(discard * len(traj.z))
        kept = traj.z[start:]
        per_run.append(float(np.mean(kept**2)))
    per_run = np.asarray(per_run)
    n = len(per_run)
    return EnsembleStats(
        n_realizations=n,
        mean_z2=float(np.mean(per_run)),
        stderr=float(np.std(per_run, ddof=1) / math.sqrt(n)),
    )


def oscillations_during_transition(line_period: float, dc: DerivedConstants) -> float:
    """How many field oscillations of the given period fit in the transition time."""
    if line_period <= 0.0:
        raise ValueError(f"line period must be positive, got {line_period}")
    return dc.T_tr / line_period
