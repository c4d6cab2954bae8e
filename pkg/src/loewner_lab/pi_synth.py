"""Weighted-sensitivity PI tuning on a frequency grid.

The closed loop of a plant H and controller K = kp + ki/s is scored by the
worst-case Euclidean norm of the weighted channel pair

    z(i*omega) = ( We * S,  Wu * K * S ),    S = 1 / (1 + H*K),

over a frequency grid; the score is the grid estimate of the H-infinity
norm of the stacked performance channel.  The tuner minimizes that score
over (kp, ki) with Nelder-Mead restarted from a logarithmic grid of seeds,
and every returned candidate is screened for closed-loop stability through
the descriptor poles of the actual feedback realization, since a pure grid
score cannot see an internal instability that happens to have small gain
on the sampled frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.optimize

from ._parallel import parallel_map
from .descriptor_ops import (
    DescriptorRealization,
    TransferMap,
    feedback_unity,
    poles,
    series,
)
from .errors import LoewnerLabError, LoopSingularityError, OptimizationError

__all__ = [
    "PIController",
    "WeightingFilters",
    "SynthesisResult",
    "default_weights",
    "fit_pi_gains",
    "eval_weighted_performance",
    "optimize_pi",
]


@dataclass(frozen=True)
class PIController:
    """Proportional-integral controller kp + ki/s."""

    kp: float
    ki: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kp", float(self.kp))
        object.__setattr__(self, "ki", float(self.ki))
        if not (math.isfinite(self.kp) and math.isfinite(self.ki)):
            raise ValueError(f"gains must be finite, got kp={self.kp}, ki={self.ki}")

    def realization(self) -> DescriptorRealization:
        return DescriptorRealization(
            E=np.array([[1.0]]),
            A=np.array([[0.0]]),
            B=np.array([[1.0]]),
            C=np.array([[self.ki]]),
            D=self.kp,
        )

    def transfer_map(self) -> TransferMap:
        label = f"PI(kp={self.kp:g}, ki={self.ki:g})"
        return TransferMap.from_realization(self.realization(), label=label)

    def frequency_response(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return self.kp + self.ki / (1j * omega)


@dataclass(frozen=True)
class WeightingFilters:
    """Sensitivity weight ``we`` and control-effort weight ``wu``."""

    we: TransferMap
    wu: TransferMap


def default_weights() -> WeightingFilters:
    """Integral-action tracking weight and a high-frequency effort weight.

    we(s) = 10 (s+1)/s penalizes steady-state error hard, wu(s) =
    (s+10)/(s+1000) leaves low-frequency actuation nearly free while
    damping fast control action.
    """
    we = DescriptorRealization(
        E=np.array([[1.0]]),
        A=np.array([[0.0]]),
        B=np.array([[1.0]]),
        C=np.array([[10.0]]),
        D=10.0,
    )
    wu = DescriptorRealization(
        E=np.array([[1.0]]),
        A=np.array([[-1000.0]]),
        B=np.array([[1.0]]),
        C=np.array([[-990.0]]),
        D=1.0,
    )
    return WeightingFilters(
        we=TransferMap.from_realization(we, label="tracking weight 10(s+1)/s"),
        wu=TransferMap.from_realization(wu, label="effort weight (s+10)/(s+1000)"),
    )


def fit_pi_gains(
    controller,
    omega_low: float = 1e-4,
    omega_high: float = 1e3,
) -> PIController:
    """Read PI gains off a controller's frequency response.

    For K = kp + ki/s the response tends to kp at high frequency while
    s*K(s) tends to ki at low frequency, so two probes recover the gains.
    The probe frequencies should sit above and below the band where the
    controller actually has dynamics; the defaults suit data bands around
    1 rad/s.
    """
    if isinstance(controller, DescriptorRealization):
        controller = TransferMap.from_realization(controller)
    kp = float(np.real(controller(1j * omega_high)))
    s_low = 1j * omega_low
    ki = float(np.real(s_low * controller(s_low)))
    return PIController(kp=kp, ki=ki)


def _channel_norms(plant: TransferMap, k: PIController, w: WeightingFilters, omega):
    omega = np.asarray(omega, dtype=float).ravel()
    if omega.size == 0:
        raise ValueError("frequency grid is empty")
    if np.any(omega <= 0.0):
        raise ValueError(
            "grid must contain strictly positive frequencies only (the "
            "tracking weight has a pole at omega = 0)"
        )
    s = 1j * omega
    hvals = np.asarray(plant(s), dtype=complex)
    kvals = k.frequency_response(omega)
    loop = hvals * kvals
    den = 1.0 + loop
    bad = np.abs(den) < 1e-12 * np.maximum(1.0, np.abs(loop))
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise LoopSingularityError(
            f"1 + H*K vanishes at omega = {omega[idx]:g} rad/s"
        )
    sens = 1.0 / den
    ch_e = np.abs(np.asarray(w.we(s), dtype=complex) * sens)
    ch_u = np.abs(np.asarray(w.wu(s), dtype=complex) * kvals * sens)
    return ch_e, ch_u


def eval_weighted_performance(
    plant: TransferMap, k: PIController, w: WeightingFilters, grid
) -> float:
    """Worst grid value of the weighted closed-loop channel pair.

    Returns max over the grid of the Euclidean norm of
    (We*S, Wu*K*S) with S = 1/(1 + H*K).  Raises
    :class:`LoopSingularityError` when 1 + H*K underflows at a grid point.
    """
    ch_e, ch_u = _channel_norms(plant, k, w, grid)
    return float(np.max(np.hypot(ch_e, ch_u)))


@dataclass(frozen=True)
class SynthesisResult:
    """Best controller found, its score, and the stability screen outcome.

    ``stability_checked`` is False when the plant carried no realization
    (or has an identically zero response), in which case descriptor poles
    could not be formed and ``stable`` just echoes True.
    """

    controller: PIController
    gamma: float
    stable: bool
    stability_checked: bool
    feasible_candidates: int


def _loop_is_stable(
    plant_rlz: Optional[DescriptorRealization], ctrl: PIController
) -> Optional[bool]:
    if plant_rlz is None:
        return None
    try:
        loop = feedback_unity(series(plant_rlz, ctrl.realization()))
        spectrum = poles(loop)
    except LoewnerLabError:
        return False
    return bool(np.all(spectrum.finite.real < 0.0))


def optimize_pi(
    plant: TransferMap,
    w: WeightingFilters,
    grid,
    start: PIController,
    gain_box: tuple[float, float] = (1e-3, 10.0),
    extra_starts: int = 20,
) -> SynthesisResult:
    """Minimize the weighted performance score over PI gains.

    Runs Nelder-Mead in log10 gain space from ``extra_starts`` seeds laid
    out logarithmically over ``gain_box`` squared, plus the user's start.
    The start itself also competes, so the returned score never exceeds
    the start's score when the start is feasible.  Every candidate must
    have a finite score and, when the plant carries a realization with a
    nonzero response, a strictly stable closed loop; if nothing qualifies
    an :class:`OptimizationError` is raised.
    """
    lo, hi = float(gain_box[0]), float(gain_box[1])
    if not (0.0 < lo < hi):
        raise ValueError(f"bad gain box {gain_box}")
    omega = np.asarray(grid, dtype=float).ravel()

    def score(ctrl: PIController) -> float:
        try:
            return eval_weighted_performance(plant, ctrl, w, omega)
        except LoopSingularityError:
            return math.inf

    start_gamma = score(start)
    if not math.isfinite(start_gamma):
        raise OptimizationError(
            f"start point kp={start.kp:g}, ki={start.ki:g} has no finite score"
        )

    plant_rlz = plant.realization
    zero_response = bool(np.all(np.asarray(plant(1j * omega)) == 0.0))
    check_stability = plant_rlz is not None and not zero_response

    def objective(x) -> float:
        return score(PIController(kp=10.0 ** x[0], ki=10.0 ** x[1]))

    llo, lhi = math.log10(lo), math.log10(hi)
    n_kp = max(1, int(round(math.sqrt(extra_starts))))
    n_ki = max(1, extra_starts // n_kp)
    seed_kp = np.linspace(llo, lhi, n_kp)
    seed_ki = np.linspace(llo, lhi, n_ki)
    seeds = [(a, b) for a in seed_kp for b in seed_ki]
    seeds.append(
        (
            min(max(math.log10(abs(start.kp)) if start.kp > 0 else llo, llo), lhi),
            min(max(math.log10(abs(start.ki)) if start.ki > 0 else llo, llo), lhi),
        )
    )

    def polish(seed) -> PIController:
        res = scipy.optimize.minimize(
            objective,
            x0=np.array(seed, dtype=float),
            method="Nelder-Mead",
            bounds=[(llo, lhi), (llo, lhi)],
            options={"xatol": 1e-6, "fatol": 1e-9, "maxiter": 400, "maxfev": 800},
        )
        return PIController(kp=10.0 ** res.x[0], ki=10.0 ** res.x[1])

    candidates = list(parallel_map(polish, seeds))
    candidates.append(start)

    best: Optional[tuple[float, PIController, bool]] = None
    feasible = 0
    for ctrl in candidates:
        gamma = score(ctrl)
        if not math.isfinite(gamma):
            continue
        stable = _loop_is_stable(plant_rlz, ctrl) if check_stability else None
        if check_stability and not stable:
            continue
        feasible += 1
        if best is None or gamma < best[0]:
            best = (gamma, ctrl, bool(stable) if stable is not None else True)
    if best is None:
        raise OptimizationError(
            "no candidate achieved a finite score with a stable closed loop"
        )
    gamma, ctrl, stable = best
    return SynthesisResult(
        controller=ctrl,
        gamma=gamma,
        stable=stable,
        stability_checked=check_stability,
        feasible_candidates=feasible,
    )
