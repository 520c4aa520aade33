"""Numerical reference helpers shared by the simulation and acceptance tests."""

import math

import numpy as np

from tfpvkit.exactlin import left_kernel_basis
from tfpvkit.core import build_matrices
from tfpvkit.sim import integrate


def rk4_order(net, k, x0, t_end=1.0, step=0.05, target=1e-7, min_step=1e-3):
    """log2 of the error ratio between steps h and h/2, against an h/4 reference run.

    The step is halved from ``step`` until the coarse error drops below
    ``target`` so the estimate is taken in the asymptotic regime. None when
    the coarse error is already at round-off level (e.g. a trajectory that
    RK4 integrates exactly), where the ratio carries no information.
    """

    def end(h):
        return integrate(net, k, x0, t_end, h).final

    h = step
    while True:
        ref = end(h / 4)
        e1 = float(np.max(np.abs(end(h) - ref)))
        if e1 < target or h / 2 < min_step:
            break
        h /= 2
    e2 = float(np.max(np.abs(end(h / 2) - ref)))
    if e1 < 1e-11 or e2 == 0:
        return None
    return math.log2(e1 / e2)


def integral_drift(net, k, x0, t_end, step, record_every=100):
    """Largest change of any left-kernel first integral along an RK4 trajectory."""
    basis = left_kernel_basis(build_matrices(net).N)
    if not basis:
        return 0.0
    W = np.array([[float(v) for v in w] for w in basis])
    traj = integrate(net, k, x0, t_end, step, record_every=record_every)
    values = traj.states @ W.T
    return float(np.max(np.abs(values - values[0])))
