"""Implicit-midpoint time integration of boundary nodes with exact ledgers.

A boundary node defines the index-1 linear DAE

    u(t) = G z~(t),    d/dt (iota z~)(t) = L_eff z~(t),

on extended coordinates z~.  One midpoint step solves the square system

    iota (z_{n+1} - z_n) = dt * L_eff (z_{n+1} + z_n) / 2,
    G (z_{n+1} + z_n) / 2 = u_mid,

so the constraint holds exactly at the midpoint state, where inputs are
sampled and outputs are read off.  Because the step is the midpoint rule,
the energy increment obeys the *identity*

    dH = dt * <iota z_mid, L_eff z_mid>_W,

which the Green identity converts into boundary supply minus dissipation
minus a nonnegative contraction slack; the ledger records all three and
their residual at machine precision.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    IncompatibleInitialData,
    SingularBoundaryBlock,
    SingularStepMatrix,
)
from .node import BoundaryNode, EnergyLedger, scattering_slack

__all__ = [
    "InputSignal",
    "Trajectory",
    "StepSolver",
    "consistent_initialization",
    "step_midpoint",
    "simulate",
    "balance_ledger",
]

INIT_RTOL = 1e-10
SINGULARITY_RTOL = 1e-13


@dataclass(frozen=True)
class InputSignal:
    """Twice continuously differentiable input with fixed channel weights.

    Kinds: ``zero``; ``sine`` with ``u(t) = amplitude sin(2 pi frequency t)
    * weights``; ``gauss_pulse`` with ``u(t) = amplitude
    exp(-((t - center)/width)^2) * weights``.
    """

    kind: str
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    amplitude: float = 0.0
    frequency: float = 1.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in ("zero", "sine", "gauss_pulse"):
            raise ValueError(f"unknown input kind {self.kind!r}")
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.kind == "gauss_pulse" and not self.width > 0.0:
            raise ValueError("gauss_pulse width must be positive")

    def __call__(self, t: float) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros_like(self.weights)
        if self.kind == "sine":
            return (self.amplitude
                    * np.sin(2.0 * np.pi * self.frequency * t)) * self.weights
        arg = (t - self.center) / self.width
        return (self.amplitude * np.exp(-arg * arg)) * self.weights

    @staticmethod
    def zero(m: int) -> "InputSignal":
        return InputSignal("zero", weights=np.zeros(m))


@dataclass(frozen=True)
class Trajectory:
    """Time grid, extended states and midpoint port samples of one run."""

    times: np.ndarray                # (n+1,)
    states_ext: np.ndarray           # (n+1, ext_dim)
    inputs: np.ndarray               # (n, m) at interval midpoints
    outputs: np.ndarray              # (n, m) at interval midpoints
    ledger: EnergyLedger | None = None

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def midpoint_states(self) -> np.ndarray:
        return 0.5 * (self.states_ext[:-1] + self.states_ext[1:])


class StepSolver:
    """LU-factored midpoint stepper for a fixed node and step size."""

    def __init__(self, node: BoundaryNode, dt: float):
        if not dt > 0.0:
            raise ValueError("dt must be positive")
        self.node = node
        self.dt = dt
        ncore, ext = node.op.iota.shape
        m = node.G_map.shape[0]
        if ncore + m != ext:
            raise SingularStepMatrix(
                f"step system is not square: core {ncore} + inputs {m} "
                f"!= extended dimension {ext}")
        self._ahead = np.vstack([node.op.iota - 0.5 * dt * node.L_eff,
                                 node.G_map])
        self._behind = np.vstack([node.op.iota + 0.5 * dt * node.L_eff,
                                  -node.G_map])
        self._lu = self._factor(self._ahead)
        self._lu_back = None
        self._ncore = ncore

    @staticmethod
    def _factor(matrix: np.ndarray):
        try:
            with warnings.catch_warnings():
                # zero pivots are reported through our own exception below
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                lu = scipy.linalg.lu_factor(matrix)
        except scipy.linalg.LinAlgError as exc:
            raise SingularStepMatrix(str(exc)) from exc
        diag = np.abs(np.diag(lu[0]))
        if diag.max() == 0.0 or diag.min() <= SINGULARITY_RTOL * diag.max():
            raise SingularStepMatrix(
                "midpoint step matrix is numerically singular "
                f"(pivot ratio {diag.min() / max(diag.max(), 1e-300):.3e})")
        return lu

    def step(self, z: np.ndarray, u_mid: np.ndarray) -> np.ndarray:
        rhs = self._behind @ z
        rhs[self._ncore:] += 2.0 * np.asarray(u_mid, dtype=float)
        return scipy.linalg.lu_solve(self._lu, rhs)

    def step_back(self, z: np.ndarray, u_mid: np.ndarray) -> np.ndarray:
        """Invert one midpoint step (the scheme is time-symmetric)."""
        if self._lu_back is None:
            self._lu_back = self._factor(self._behind)
        rhs = self._ahead @ z
        rhs[self._ncore:] -= 2.0 * np.asarray(u_mid, dtype=float)
        return scipy.linalg.lu_solve(self._lu_back, rhs)


def consistent_initialization(node: BoundaryNode, z_core: np.ndarray,
                              u0: np.ndarray) -> np.ndarray:
    """Complete a core state with boundary coordinates so that G z~ = u0.

    The boundary block of G must determine the extra coordinates; raises
    ``IncompatibleInitialData`` when no completion matches u0 and
    ``SingularBoundaryBlock`` when the block is rank deficient (the
    constraint then cannot involve the boundary coordinates).
    """
    z_core = np.asarray(z_core, dtype=float)
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    ncore = node.op.core.dim
    nb = node.op.ext_dim - ncore
    g_core = node.G_map[:, :ncore]
    g_tau = node.G_map[:, ncore:]
    rhs = u0 - g_core @ z_core
    if nb == 0:
        if np.linalg.norm(rhs) > INIT_RTOL * (1.0 + np.linalg.norm(u0)):
            raise IncompatibleInitialData(float(np.linalg.norm(rhs)))
        return z_core.copy()
    tau, *_ = np.linalg.lstsq(g_tau, rhs, rcond=None)
    gap = float(np.linalg.norm(g_tau @ tau - rhs))
    if gap > INIT_RTOL * (1.0 + np.linalg.norm(u0)):
        raise IncompatibleInitialData(gap)
    sigma = np.linalg.svd(g_tau, compute_uv=False)
    if sigma.size == 0 or sigma[-1] <= 1e-12 * max(sigma[0], 1.0):
        raise SingularBoundaryBlock(
            "boundary block of the input map is rank deficient")
    return np.concatenate([z_core, tau])


def step_midpoint(node: BoundaryNode, z: np.ndarray, u_mid: np.ndarray,
                  dt: float) -> np.ndarray:
    """Single midpoint step (factorize once via StepSolver for long runs)."""
    return StepSolver(node, dt).step(np.asarray(z, dtype=float), u_mid)


def simulate(node: BoundaryNode, z_core0: np.ndarray, signal: InputSignal,
             t_final: float, dt: float) -> Trajectory:
    """Integrate on a uniform grid and fill the energy ledger."""
    n_steps = max(1, int(round(t_final / dt)))
    times = dt * np.arange(n_steps + 1)
    z0 = consistent_initialization(node, z_core0, signal(0.0))
    solver = StepSolver(node, dt)

    ext = node.op.ext_dim
    m = node.G_map.shape[0]
    states = np.empty((n_steps + 1, ext))
    inputs = np.empty((n_steps, m))
    outputs = np.empty((n_steps, m))
    states[0] = z0
    for n in range(n_steps):
        u_mid = signal(times[n] + 0.5 * dt)
        inputs[n] = u_mid
        states[n + 1] = solver.step(states[n], u_mid)
        outputs[n] = node.K_map @ (0.5 * (states[n] + states[n + 1]))

    bare = Trajectory(times=times, states_ext=states, inputs=inputs,
                      outputs=outputs)
    return Trajectory(times=times, states_ext=states, inputs=inputs,
                      outputs=outputs, ledger=balance_ledger(node, bare))


def balance_ledger(node: BoundaryNode, trajectory: Trajectory) -> EnergyLedger:
    """Per-step energy balance of a midpoint trajectory.

    For the impedance flavor the supplied power is ``<u, y>`` in the dual
    boundary pairing, for scattering ``(||u||^2 - ||y||^2) / 2``; both are
    evaluated at the midpoint state, as is the dissipated power.  The
    residual ``dH - dt (supply - dissipation)`` equals minus half the
    recorded scattering slack up to roundoff.
    """
    n = trajectory.n_steps
    h = np.empty(n + 1)
    hp = np.empty(n + 1)
    hk = np.empty(n + 1)
    for i, z in enumerate(trajectory.states_ext):
        hp[i], hk[i] = node.energy_split(z)
        h[i] = hp[i] + hk[i]

    supplied = np.empty(n)
    dissipated = np.empty(n)
    residual = np.empty(n)
    slack = np.empty(n)
    wd = node.dual_gram()
    dt = float(trajectory.times[1] - trajectory.times[0]) if n else 0.0
    mids = trajectory.midpoint_states()
    for i in range(n):
        z_mid = mids[i]
        u = trajectory.inputs[i]
        y = trajectory.outputs[i]
        if node.flavor == "impedance":
            supplied[i] = float(u @ wd @ y)
        else:
            supplied[i] = 0.5 * (float(u @ wd @ u) - float(y @ wd @ y))
        dissipated[i] = node.dissipated_power(z_mid)
        residual[i] = (h[i + 1] - h[i]
                       - dt * (supplied[i] - dissipated[i]))
        slack[i] = dt * scattering_slack(node, z_mid)
    return EnergyLedger(H=h, H_p=hp, H_k=hk, supplied=supplied,
                        dissipated=dissipated, residual=residual,
                        slack=slack)
