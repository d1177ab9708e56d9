"""Boundary nodes: input/state/output colligations over a boundary operator.

Two flavors are built from the traces of a :class:`BoundaryOperator`, both
composed with the mass weight ``diag(I, M^{-1})`` on extended coordinates
(the boundary block is untouched):

scattering (contraction P on the dual boundary space):

    G = (W_G Gamma0 + Gamma1) / sqrt(2),
    K = -P (W_G Gamma0 - Gamma1) / sqrt(2),

impedance:

    G = ((I - P) W_G Gamma0 + (I + P) Gamma1) / 2,
    K = ((I + P) W_G Gamma0 + (I - P) Gamma1) / 2.

The interior action is ``L_eff = (L - diag(0, D) iota) diag(I, M^{-1})``
and the state energy is measured by ``W = blockdiag(W_1, W_2 M^{-1})``,
i.e. kinetic energy uses the inverse-mass inner product.  The external
Cayley transform at real beta > 0 recombines the port maps,

    G' = (beta G + K) / sqrt(2 beta),   K' = (beta G - K) / sqrt(2 beta),

and toggles the flavor; at beta = 1 it is an involution and carries the
scattering maps exactly onto the impedance maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DampingNotDissipative,
    IllPosedRestriction,
    InconsistentBoundaryData,
    MassNotSPD,
    NonPositiveBeta,
    NotAContraction,
    SingularCoreProjection,
)
from .hilbert import (
    ContractionParam,
    HilbertSpaceSpec,
    LinearMap,
    _frozen,
    check_dissipative,
    is_dual_unitary,
    make_space,
)
from .triplet import NULLSPACE_RCOND, BoundaryOperator

__all__ = [
    "BoundaryNode",
    "EnergyLedger",
    "scattering_node",
    "impedance_node",
    "external_cayley",
    "internal_wellposedness",
    "passivity_residual",
]

CONSISTENCY_RTOL = 1e-10
SCATTERING = "scattering"
IMPEDANCE = "impedance"


@dataclass(frozen=True)
class BoundaryNode:
    """Immutable colligation (G_map, L_eff, K_map) over extended coordinates."""

    op: BoundaryOperator
    flavor: str
    P: ContractionParam
    M: LinearMap
    D: LinearMap
    G_map: np.ndarray
    K_map: np.ndarray
    L_eff: np.ndarray
    state_space: HilbertSpaceSpec      # core with mass-weighted Gram
    weight_ext: np.ndarray             # diag(I, M^{-1}, I_tau)
    energy_preserving: bool
    internally_wellposed: bool = field(compare=False, default=False)
    main_generator: np.ndarray | None = field(compare=False, default=None)

    @property
    def n_inputs(self) -> int:
        return self.G_map.shape[0]

    def input_of(self, z_ext: np.ndarray) -> np.ndarray:
        return self.G_map @ z_ext

    def output_of(self, z_ext: np.ndarray) -> np.ndarray:
        return self.K_map @ z_ext

    def dual_gram(self) -> np.ndarray:
        """Gram of the dual boundary space (inputs/outputs live there)."""
        return np.linalg.inv(self.op.bspace.gram)

    def energy(self, z_ext: np.ndarray) -> float:
        zc = self.op.iota @ z_ext
        return 0.5 * float(zc @ self.state_space.gram @ zc)

    def energy_split(self, z_ext: np.ndarray) -> tuple[float, float]:
        """(potential, kinetic) energy of the core part of a state."""
        n1, _ = self.op.core_blocks
        zc = self.op.iota @ z_ext
        w = self.state_space.gram
        hp = 0.5 * float(zc[:n1] @ w[:n1, :n1] @ zc[:n1])
        hk = 0.5 * float(zc[n1:] @ w[n1:, n1:] @ zc[n1:])
        return hp, hk

    def dissipated_power(self, z_ext: np.ndarray) -> float:
        """Damping quadratic form <D M^{-1} z2, M^{-1} z2> at a state."""
        n1, _ = self.op.core_blocks
        v = self.weight_ext[n1:n1 + self.M.domain.dim, :] @ z_ext
        return float((self.D.matrix @ v) @ self.D.domain.gram @ v)


@dataclass(frozen=True)
class EnergyLedger:
    """Per-step energy bookkeeping along a trajectory.

    ``H = H_p + H_k`` is sampled on the time grid; supplied and dissipated
    power, the balance residual and the scattering slack are per step
    (evaluated at the midpoint state).  The residual is
    ``dH - dt*(supply - dissipation)`` and equals ``-slack/2`` up to
    roundoff; for unitary P and zero damping both vanish.
    """

    H: np.ndarray
    H_p: np.ndarray
    H_k: np.ndarray
    supplied: np.ndarray
    dissipated: np.ndarray
    residual: np.ndarray
    slack: np.ndarray


def _split_core_gram(op: BoundaryOperator) -> tuple[np.ndarray, np.ndarray]:
    n1, n2 = op.core_blocks
    w = op.core.gram
    if np.any(w[:n1, n1:]) or np.any(w[n1:, :n1]):
        raise ValueError("core Gram is not block diagonal over core_blocks")
    return w[:n1, :n1], w[n1:, n1:]


def _prepare_weights(op: BoundaryOperator, M: LinearMap, D: LinearMap):
    """Validate M, D and build weight matrices for the mass-weighted node."""
    n1, n2 = op.core_blocks
    if M.domain.dim != n2 or M.codomain.dim != n2:
        raise ValueError("mass map must be square on the momentum block")
    if D.domain.dim != n2 or D.codomain.dim != n2:
        raise ValueError("damping map must be square on the momentum block")

    w1, w2 = _split_core_gram(op)
    wm = w2 @ M.matrix
    if np.linalg.norm(wm - wm.T) > 1e-10 * (1.0 + np.linalg.norm(wm)):
        raise MassNotSPD("mass map is not self-adjoint on its space")
    if np.linalg.eigvalsh(0.5 * (wm + wm.T))[0] <= 0.0:
        raise MassNotSPD("mass quadratic form is not positive definite")
    ok, lam = check_dissipative(D)
    if not ok:
        raise DampingNotDissipative(
            f"damping symmetric part has eigenvalue {lam:.3e} below "
            f"-1e-10")

    msym = 0.5 * (M.matrix + M.matrix.T)
    if np.linalg.norm(M.matrix - msym) <= 1e-12 * (1.0 + np.linalg.norm(msym)):
        minv = scipy.linalg.cho_solve(scipy.linalg.cho_factor(msym),
                                      np.eye(n2))
    else:
        minv = np.linalg.solve(M.matrix, np.eye(n2))

    nb = op.ext_dim - op.core.dim
    weight_ext = scipy.linalg.block_diag(np.eye(n1), minv, np.eye(nb))
    w_state = scipy.linalg.block_diag(w1, 0.5 * ((w2 @ minv) + (w2 @ minv).T))
    state_space = make_space(op.core.dim, w_state,
                             op.core.label + "_M")
    return weight_ext, state_space, minv


def _effective_action(op: BoundaryOperator, D: LinearMap,
                      weight_ext: np.ndarray) -> np.ndarray:
    n1, n2 = op.core_blocks
    damping_rows = np.zeros((op.core.dim, op.ext_dim))
    damping_rows[n1:, :] = D.matrix @ op.iota[n1:, :]
    return (op.L - damping_rows) @ weight_ext


def _weighted_traces(op: BoundaryOperator, weight_ext: np.ndarray):
    a = op.bspace.gram @ op.Gamma0 @ weight_ext
    b = op.Gamma1 @ weight_ext
    return a, b


def _as_param(P, op: BoundaryOperator) -> ContractionParam:
    if isinstance(P, ContractionParam):
        return P
    return ContractionParam.from_matrix(P, op.bspace)


def _build_node(op: BoundaryOperator, P, M: LinearMap, D: LinearMap,
                flavor: str) -> BoundaryNode:
    param = _as_param(P, op)
    if not param.is_contraction:
        raise NotAContraction(param.dual_norm)
    weight_ext, state_space, _ = _prepare_weights(op, M, D)
    a, b = _weighted_traces(op, weight_ext)
    pmat = param.matrix
    m = op.n_boundary
    eye = np.eye(m)
    if flavor == SCATTERING:
        g = (a + b) / math.sqrt(2.0)
        k = -pmat @ (a - b) / math.sqrt(2.0)
    elif flavor == IMPEDANCE:
        g = 0.5 * ((eye - pmat) @ a + (eye + pmat) @ b)
        k = 0.5 * ((eye + pmat) @ a + (eye - pmat) @ b)
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    l_eff = _effective_action(op, D, weight_ext)

    wd = D.domain.gram @ D.matrix
    no_damping = np.linalg.norm(wd + wd.T) <= 1e-10 * (1.0 + np.linalg.norm(wd))
    preserving = no_damping and is_dual_unitary(pmat, op.bspace)

    node = BoundaryNode(op=op, flavor=flavor, P=param, M=M, D=D,
                        G_map=_frozen(g), K_map=_frozen(k),
                        L_eff=_frozen(l_eff), state_space=state_space,
                        weight_ext=_frozen(weight_ext),
                        energy_preserving=preserving)
    wellposed, gen = _try_wellposedness(node)
    object.__setattr__(node, "internally_wellposed", wellposed)
    object.__setattr__(node, "main_generator",
                       None if gen is None else _frozen(gen))
    return node


def scattering_node(op: BoundaryOperator, P, M: LinearMap,
                    D: LinearMap) -> BoundaryNode:
    """Scattering node; passivity requires a contraction P."""
    return _build_node(op, P, M, D, SCATTERING)


def impedance_node(op: BoundaryOperator, P, M: LinearMap,
                   D: LinearMap) -> BoundaryNode:
    """Impedance node; equals the beta=1 Cayley transform of the scattering one."""
    return _build_node(op, P, M, D, IMPEDANCE)


def external_cayley(node: BoundaryNode, beta: float) -> BoundaryNode:
    """Recombine the port maps, exchanging scattering and impedance forms."""
    if not beta > 0.0:
        raise NonPositiveBeta(f"beta must be positive, got {beta}")
    scale = 1.0 / math.sqrt(2.0 * beta)
    g = scale * (beta * node.G_map + node.K_map)
    k = scale * (beta * node.G_map - node.K_map)
    flavor = IMPEDANCE if node.flavor == SCATTERING else SCATTERING
    out = BoundaryNode(op=node.op, flavor=flavor, P=node.P, M=node.M,
                       D=node.D, G_map=_frozen(g), K_map=_frozen(k),
                       L_eff=node.L_eff, state_space=node.state_space,
                       weight_ext=node.weight_ext,
                       energy_preserving=node.energy_preserving)
    wellposed, gen = _try_wellposedness(out)
    object.__setattr__(out, "internally_wellposed", wellposed)
    object.__setattr__(out, "main_generator",
                       None if gen is None else _frozen(gen))
    return out


def _kernel_generator(node: BoundaryNode) -> np.ndarray:
    """Generator of the interior dynamics on ker G_map."""
    if node.G_map.shape[0] == 0:
        basis = np.eye(node.op.ext_dim)
    else:
        basis = scipy.linalg.null_space(node.G_map, rcond=NULLSPACE_RCOND)
    if basis.shape[1] != node.op.core.dim:
        raise IllPosedRestriction(
            f"ker G has dimension {basis.shape[1]}, expected "
            f"{node.op.core.dim}")
    core_proj = node.op.iota @ basis
    sigma = np.linalg.svd(core_proj, compute_uv=False)
    if sigma[-1] == 0.0 or sigma[0] / sigma[-1] > 1e12:
        raise SingularCoreProjection(
            "core projection on ker G is singular; the input map does "
            "not determine the boundary coordinates")
    return np.linalg.solve(core_proj.T, (node.L_eff @ basis).T).T


def _try_wellposedness(node: BoundaryNode):
    try:
        gen = _kernel_generator(node)
    except (IllPosedRestriction, SingularCoreProjection):
        return False, None
    wa = node.state_space.gram @ gen
    lam = np.linalg.eigvalsh(0.5 * (wa + wa.T))[-1]
    return bool(lam <= 1e-10), gen


def internal_wellposedness(node: BoundaryNode) -> tuple[bool, np.ndarray | None]:
    """Check surjectivity of G_map and dissipativity of its kernel restriction.

    Returns ``(False, None)`` when G_map is not surjective; raises
    ``IllPosedRestriction``/``SingularCoreProjection`` when the kernel
    restriction is not a square generator.
    """
    m = node.G_map.shape[0]
    if m > 0 and np.linalg.matrix_rank(node.G_map) < m:
        return False, None
    gen = _kernel_generator(node)
    wa = node.state_space.gram @ gen
    lam = np.linalg.eigvalsh(0.5 * (wa + wa.T))[-1]
    return bool(lam <= 1e-10), gen


def scattering_slack(node: BoundaryNode, z_ext: np.ndarray) -> float:
    """Nonnegative gap ``(||(a-b)z||^2 - ||P(a-b)z||^2)/2`` in the dual norm."""
    a, b = _weighted_traces(node.op, node.weight_ext)
    v = (a - b) @ z_ext
    pv = node.P.matrix @ v
    wd = node.dual_gram()
    return 0.5 * float(v @ wd @ v - pv @ wd @ pv)


def passivity_residual(node: BoundaryNode, z_ext: np.ndarray,
                       u: np.ndarray, y: np.ndarray) -> float:
    """Pointwise passivity defect at a consistent extended state.

    scattering:  ``2<iota z, L_eff z>_W + ||y||^2 - ||u||^2``
    impedance:   ``2<iota z, L_eff z>_W - 2<u, y>``

    (norms and pairing in the dual boundary space); nonpositive up to
    roundoff for every contraction P, zero for unitary P with no damping.
    Raises ``InconsistentBoundaryData`` unless ``G_map z = u``.
    """
    z_ext = np.asarray(z_ext, dtype=float)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    gap = np.linalg.norm(node.G_map @ z_ext - u)
    if gap > CONSISTENCY_RTOL * (1.0 + np.linalg.norm(u)):
        raise InconsistentBoundaryData(
            f"G z differs from u by {gap:.3e}")
    zc = node.op.iota @ z_ext
    power = 2.0 * float(zc @ node.state_space.gram @ (node.L_eff @ z_ext))
    wd = node.dual_gram()
    if node.flavor == SCATTERING:
        return power + float(y @ wd @ y) - float(u @ wd @ u)
    return power - 2.0 * float(u @ wd @ y)
