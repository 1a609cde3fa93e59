"""Closed-loop simulation of the switched system and output-shape checks.

Two independent integration paths: exact modal propagation in the shared
eigenvector basis (the construction guarantees both closed-loop matrices are
diagonalized by V), and a classical fixed-step RK4 integrator used as a
cross-oracle.  Output detectors classify each error component as
overshooting / non-overshooting / monotonic on the sample grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numlin
from .design import Controller
from .sysmodel import SwitchedPlant


@dataclass(frozen=True)
class SwitchingSignal:
    """Piecewise-constant mode signal with finitely many switches."""

    breakpoints: tuple   # ascending, starts at 0.0
    modes: tuple         # one label in {1, 2} per interval
    horizon: float

    def __post_init__(self):
        bp = tuple(float(t) for t in self.breakpoints)
        if not bp or bp[0] != 0.0:
            raise ValueError("breakpoints must start at 0")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly ascending")
        if len(self.modes) != len(bp):
            raise ValueError("one mode per interval required")
        if any(m not in (1, 2) for m in self.modes):
            raise ValueError("modes must be 1 or 2")
        if self.horizon <= bp[-1] and len(bp) > 1:
            raise ValueError("horizon must exceed the last breakpoint")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        object.__setattr__(self, "horizon", float(self.horizon))

    def intervals(self):
        ends = self.breakpoints[1:] + (self.horizon,)
        return list(zip(self.breakpoints, ends, self.modes))

    def mode_at(self, t):
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        return self.modes[max(idx, 0)]


def periodic_signal(dur1, dur2, horizon) -> SwitchingSignal:
    """Alternate mode 1 for dur1 seconds and mode 2 for dur2, up to horizon."""
    if dur1 <= 0 or dur2 <= 0:
        raise ValueError("dwell times must be positive")
    breakpoints = [0.0]
    modes = [1]
    t = 0.0
    q = 1
    while True:
        t += dur1 if q == 1 else dur2
        if t >= horizon:
            break
        q = 2 if q == 1 else 1
        breakpoints.append(t)
        modes.append(q)
    return SwitchingSignal(tuple(breakpoints), tuple(modes), horizon)


def random_signal(rng: np.random.Generator, horizon, dwell_range=(0.05, 0.5)) -> SwitchingSignal:
    """Seeded random switching signal for stability spot checks."""
    lo, hi = dwell_range
    breakpoints = [0.0]
    modes = [int(rng.integers(1, 3))]
    t = float(rng.uniform(lo, hi))
    while t < horizon:
        breakpoints.append(t)
        modes.append(3 - modes[-1] if rng.random() < 0.7 else modes[-1])
        t += float(rng.uniform(lo, hi))
    return SwitchingSignal(tuple(breakpoints), tuple(modes), horizon)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray    # samples x n
    outputs: np.ndarray   # samples x p
    errors: np.ndarray    # samples x p, r - y
    modes: np.ndarray     # active subsystem per sample
    reference: np.ndarray


def _sample_grid(signal: SwitchingSignal, samples_per_interval):
    times = []
    for t0, t1, _ in signal.intervals():
        times.append(np.linspace(t0, t1, samples_per_interval, endpoint=False))
    times.append([signal.horizon])
    return np.concatenate(times)


def simulate_modal(controller: Controller, plant: SwitchedPlant, x0,
                   signal: SwitchingSignal, samples_per_interval=64,
                   sample_times=None) -> Trajectory:
    """Exact piecewise propagation in the shared modal basis.

    In coordinates xi = x - x_ss the closed loop is V diag(e^{lam_q dt}) V^{-1}
    on every dwell interval; the state is continuous across breakpoints.
    """
    x0 = np.asarray(x0, dtype=float)
    V = controller.V
    Vinv = numlin.solve(V, np.eye(V.shape[0]))
    alpha = Vinv @ (x0 - controller.ss.x_ss)
    grid = _sample_grid(signal, samples_per_interval) if sample_times is None \
        else np.asarray(sample_times, dtype=float)
    states = np.empty((grid.size, plant.n))
    modes = np.empty(grid.size, dtype=int)
    pos = 0
    for t0, t1, q in signal.intervals():
        lam = controller.col_eigs[q]
        end = np.searchsorted(grid, t1, side="left") if t1 < signal.horizon \
            else grid.size
        ts = grid[pos:end]
        if ts.size:
            E = np.exp(np.outer(ts - t0, lam))
            states[pos:end] = (E * alpha) @ V.T
            modes[pos:end] = q
        alpha = np.exp(lam * (t1 - t0)) * alpha
        pos = end
    states += controller.ss.x_ss
    outputs = states @ plant.C.T
    r = controller.ss.r
    return Trajectory(grid, states, outputs, r - outputs, modes, r.copy())


def simulate_rk4(controller: Controller, plant: SwitchedPlant, x0,
                 signal: SwitchingSignal, step=1e-3) -> Trajectory:
    """Classical fixed-step RK4 on the closed loop; steps land on breakpoints."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x0, dtype=float).copy()
    times = [0.0]
    states = [x.copy()]
    modes = [signal.modes[0]]
    for t0, t1, q in signal.intervals():
        sub = plant.subsystem(q)
        M = sub.A + sub.B @ controller.F(q)
        c = sub.B @ controller.G(q)
        span = t1 - t0
        nsteps = max(int(np.ceil(span / step)), 1)
        h = span / nsteps
        t = t0
        for _ in range(nsteps):
            k1 = M @ x + c
            k2 = M @ (x + 0.5 * h * k1) + c
            k3 = M @ (x + 0.5 * h * k2) + c
            k4 = M @ (x + h * k3) + c
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
            times.append(t)
            states.append(x.copy())
            modes.append(q)
    times = np.array(times)
    states = np.array(states)
    outputs = states @ plant.C.T
    r = controller.ss.r
    return Trajectory(times, states, outputs, r - outputs,
                      np.array(modes, dtype=int), r.copy())


def detect_overshoot(traj: Trajectory, tol=1e-6):
    """Per-output flag: True when the error takes both signs beyond slack."""
    out = []
    for k in range(traj.errors.shape[1]):
        e = traj.errors[:, k]
        slack = tol * max(1.0, abs(float(traj.reference[k])))
        out.append(bool(np.any(e > slack) and np.any(e < -slack)))
    return out


def detect_monotonic(traj: Trajectory, tol=1e-6):
    """Per-output flag: sign-constant error with non-increasing magnitude."""
    out = []
    for k in range(traj.errors.shape[1]):
        e = traj.errors[:, k]
        slack = tol * max(1.0, abs(float(traj.reference[k])))
        sign_const = not (np.any(e > slack) and np.any(e < -slack))
        mono = bool(np.all(np.diff(np.abs(e)) <= slack))
        out.append(sign_const and mono)
    return out


def output_slope(controller: Controller, plant: SwitchedPlant, x, q):
    """dy/dt under subsystem q at state x."""
    sub = plant.subsystem(q)
    xdot = (sub.A + sub.B @ controller.F(q)) @ np.asarray(x, dtype=float) \
        + sub.B @ controller.G(q)
    return plant.C @ xdot

def derivative_jumps(controller: Controller, plant: SwitchedPlant, x0,
                     signal: SwitchingSignal):
    """Output-derivative discontinuity at each breakpoint, per output.

    Returns (jumps, scale): jumps[j][k] = |dy_k/dt(+) - dy_k/dt(-)| at the
    j-th switch, and a per-output normalization (peak slope magnitude).
    """
    traj = simulate_modal(controller, plant, x0, signal, samples_per_interval=2)
    jumps = []
    scale = np.zeros(plant.p)
    for j in range(1, len(signal.breakpoints)):
        tb = signal.breakpoints[j]
        idx = int(np.searchsorted(traj.times, tb))
        x = traj.states[idx]
        before = output_slope(controller, plant, x, signal.modes[j - 1])
        after = output_slope(controller, plant, x, signal.modes[j])
        jumps.append(np.abs(after - before))
        scale = np.maximum(scale, np.maximum(np.abs(before), np.abs(after)))
    return np.array(jumps), np.maximum(scale, 1e-30)


CSV_FLOAT = "%.17g"


def trajectory_to_csv(traj: Trajectory) -> str:
    """Render as CSV: t, states, outputs, errors, active mode."""
    n = traj.states.shape[1]
    p = traj.outputs.shape[1]
    header = (["t"] + [f"x{i + 1}" for i in range(n)]
              + [f"y{k + 1}" for k in range(p)]
              + [f"e{k + 1}" for k in range(p)] + ["mode"])
    lines = [",".join(header)]
    for i in range(traj.times.size):
        vals = [CSV_FLOAT % traj.times[i]]
        vals += [CSV_FLOAT % v for v in traj.states[i]]
        vals += [CSV_FLOAT % v for v in traj.outputs[i]]
        vals += [CSV_FLOAT % v for v in traj.errors[i]]
        vals.append(str(int(traj.modes[i])))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
