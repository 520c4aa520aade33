"""Floating-point checks: RK4 trajectories, eps-sweeps and attractivity probes."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .core import ReactionNetwork, build_matrices, jacobian_eval, rate_vector
from .errors import NonFinite, NonNegativityBreach, NumericalError
from .exactlin import char_poly

CLIP_TOLERANCE = 1e-12
TRANSIENT_FRACTION = 0.2
DEFAULT_SEED = 20240229
SEED_ENV = "CRN_SEED"


def resolve_seed(seed: Optional[int] = None) -> int:
    if seed is not None:
        return int(seed)
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


class MassAction:
    """Vectorised mass-action field ``N (k * prod(x ** B))``."""

    def __init__(self, net: ReactionNetwork, k):
        mats = build_matrices(net)
        self.N = np.array([[float(v) for v in row] for row in mats.N.rows], dtype=float)
        # one row of exponents per reaction
        self.B = np.array([[float(v) for v in row] for row in mats.B.T.rows], dtype=float)
        if isinstance(k, np.ndarray) or (isinstance(k, Sequence) and not isinstance(k, str)):
            kv = np.asarray(k, dtype=float)
            if kv.shape != (net.m,):
                raise ValueError(f"expected {net.m} rate values, got {kv.shape}")
        else:
            kv = np.array([float(v) for v in rate_vector(net, k)])
        self.k = kv

    def __call__(self, x: np.ndarray) -> np.ndarray:
        # 0.0 ** 0 == 1.0 keeps absent species out of the monomial
        return self.N @ (self.k * np.prod(x[None, :] ** self.B, axis=1))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    species: Sequence[str]
    step: float
    method: str = "rk4"
    clip_tolerance: float = CLIP_TOLERANCE

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.species])
        for t, row in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return buf.getvalue()

    def to_dict(self):
        return {
            "method": self.method,
            "step": self.step,
            "clip_tolerance": self.clip_tolerance,
            "species": list(self.species),
            "t_end": float(self.times[-1]),
            "final": [float(v) for v in self.final],
        }


def _clip(x: np.ndarray, t: float) -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise NonFinite(f"non-finite state at t={t:g}")
    neg = x < 0
    if np.any(neg):
        worst = float(-x[neg].min())
        if worst >= CLIP_TOLERANCE:
            raise NonNegativityBreach(f"state component reached {-worst:.3e} at t={t:g}; reduce the step size")
        x = np.where(neg, 0.0, x)
    return x


def integrate(
    net: ReactionNetwork,
    k,
    x0,
    t_end: float,
    step: float,
    record_every: int = 1,
    field: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> Trajectory:
    """Fixed-step classical RK4 from ``x0`` up to ``t_end``."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x0, dtype=float)
    if x.shape != (net.n,):
        raise ValueError(f"expected {net.n} initial values")
    if np.any(x < 0):
        raise ValueError("initial state must be nonnegative")
    f = field or MassAction(net, k)
    nsteps = int(round(t_end / step))
    times = [0.0]
    states = [x.copy()]
    h = step
    # overflow surfaces as NonFinite from _clip
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, nsteps + 1):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = _clip(x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), i * h)
            if i % record_every == 0 or i == nsteps:
                times.append(i * h)
                states.append(x.copy())
    return Trajectory(np.array(times), np.array(states), tuple(net.species), step)


@dataclass(frozen=True)
class PerturbationCurve:
    base: tuple
    direction: tuple

    def __post_init__(self):
        if len(self.base) != len(self.direction):
            raise ValueError("base and direction must have the same length")

    def at(self, eps: float) -> np.ndarray:
        k = np.asarray(self.base, dtype=float) + eps * np.asarray(self.direction, dtype=float)
        if np.any(k < 0):
            raise ValueError(f"rate vector leaves the nonnegative orthant at eps={eps:g}")
        return k


@dataclass
class ReductionRow:
    eps: float
    scaled_max: Optional[float]
    distance: float
    order: Optional[float]

    def to_dict(self):
        return {"eps": self.eps, "scaled_max": self.scaled_max, "distance": self.distance, "order": self.order}


def reduction_error(
    net: ReactionNetwork,
    curve: PerturbationCurve,
    eps_list: Sequence[float],
    x0,
    t_window: float,
    step: float = 1e-2,
    scaled: Optional[Sequence[int]] = None,
    residual: Optional[Callable[[np.ndarray], float]] = None,
) -> List[ReductionRow]:
    """Integrate at ``k(eps)`` for each eps and measure closeness to the reduced picture.

    With ``scaled`` (an LTC species set) the initial values of those species
    are multiplied by eps and the error is their maximal magnitude over the
    window. Otherwise the error is the distance to the critical set of the
    base system, measured by ``residual`` or by ``|f(x, base)|_inf``.
    The first part of the window is treated as transient and skipped.
    """
    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list) or any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps values must be positive and decreasing")
    base_field = MassAction(net, np.asarray(curve.base, dtype=float))
    dist = residual or (lambda x: float(np.max(np.abs(base_field(x)))))
    rows: List[ReductionRow] = []
    for eps in eps_list:
        start = np.asarray(x0, dtype=float).copy()
        if scaled is not None:
            start[list(scaled)] *= eps
        traj = integrate(net, curve.at(eps), start, t_window, step)
        keep = traj.times >= TRANSIENT_FRACTION * t_window
        window = traj.states[keep]
        scaled_max = float(np.max(np.abs(window[:, list(scaled)]))) if scaled is not None else None
        distance = float(max(dist(x) for x in window))
        rows.append(ReductionRow(eps, scaled_max, distance, None))
    for prev, row in zip(rows, rows[1:]):
        a = prev.scaled_max if scaled is not None else prev.distance
        b = row.scaled_max if scaled is not None else row.distance
        if a > 0 and b > 0:
            row.order = math.log(a / b) / math.log(prev.eps / row.eps)
    return rows


@dataclass
class ProbeResult:
    samples: int
    converged: int
    fitted_rates: List[float]
    expected_rates: List[float]
    seed: int

    @property
    def fraction(self) -> float:
        return self.converged / self.samples if self.samples else 1.0

    @property
    def median_rate(self) -> Optional[float]:
        return float(np.median(self.fitted_rates)) if self.fitted_rates else None

    def to_dict(self):
        return {
            "samples": self.samples,
            "converged": self.converged,
            "fraction": self.fraction,
            "fitted_rates": self.fitted_rates,
            "median_rate": self.median_rate,
            "expected_rates": self.expected_rates,
            "seed": self.seed,
        }


def expected_rates(net: ReactionNetwork, k_hat, z) -> List[float]:
    """Decay rates ``-Re(root)`` of the nonzero Jacobian eigenvalues at ``z`` (exact char poly)."""
    chi = char_poly(jacobian_eval(net, k_hat, z))
    divided = chi.divide_tau(chi.trailing_zeros())
    if not divided.degree:
        return []
    roots = np.roots([1.0, *(float(c) for c in divided.coefficients)])
    return sorted(float(-r.real) for r in roots)


def _fit_rate(times: np.ndarray, residuals: np.ndarray) -> Optional[float]:
    ok = residuals > 1e-11
    if ok.sum() < 3:
        return None
    t, r = times[ok], np.log(residuals[ok])
    # drop the initial layer where nonlinear terms still matter
    cut = len(t) // 4
    t, r = t[cut:], r[cut:]
    if len(t) < 3:
        return None
    slope = np.polyfit(t, r, 1)[0]
    return float(-slope)


def attractivity_probe(
    net: ReactionNetwork,
    k_hat,
    z,
    radius: float,
    samples: int = 20,
    t_end: float = 10.0,
    step: float = 1e-2,
    seed: Optional[int] = None,
) -> ProbeResult:
    """Start near the stationary point ``z`` and check that trajectories settle nearby.

    A sample converges when its final residual ``|f|_inf`` is below
    ``max(1e-8, 1e-3 * initial)`` and it ends within ``10 * radius`` of ``z``.
    """
    seed = resolve_seed(seed)
    rng = np.random.default_rng(seed)
    f = MassAction(net, [float(v) for v in rate_vector(net, k_hat)])
    z_arr = np.asarray([float(v) for v in z])
    converged = 0
    rates: List[float] = []
    for _ in range(samples):
        x0 = np.maximum(z_arr + radius * rng.uniform(-1.0, 1.0, size=net.n), 0.0)
        r0 = float(np.max(np.abs(f(x0))))
        try:
            traj = integrate(net, f.k, x0, t_end, step, field=f)
        except NumericalError:
            continue
        res = np.array([np.max(np.abs(f(x))) for x in traj.states])
        drift = float(np.max(np.abs(traj.final - z_arr)))
        if res[-1] <= max(1e-8, 1e-3 * r0) and drift <= 10 * radius:
            converged += 1
            rate = _fit_rate(traj.times, res)
            if rate is not None:
                rates.append(rate)
    return ProbeResult(samples, converged, rates, expected_rates(net, k_hat, z), seed)
