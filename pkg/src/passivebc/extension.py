"""Contraction-parameterized restrictions of a maximal boundary operator.

Every square generator realized here is a restriction of the maximal
operator to the kernel of the boundary constraint

    C = (P - I) W_G Gamma0 - (P + I) Gamma1,

with P acting on the covariant dual of the boundary space.  ``P = I`` gives
the kernel of Gamma1 (traction/Neumann type), ``P = -I`` the kernel of
W_G Gamma0 (Dirichlet type).  For contractions P the realized generator is
dissipative with respect to the core Gram; in finite dimensions that is
already the whole contraction-semigroup statement, so no separate resolvent
check is performed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import IllPosedRestriction, SingularCoreProjection
from .hilbert import ContractionParam, _frozen
from .triplet import NULLSPACE_RCOND, BoundaryOperator

__all__ = [
    "GeneratorRealization",
    "constraint_matrix",
    "generator_from_contraction",
    "dissipativity_residual",
]

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class GeneratorRealization:
    """Square generator on core coordinates with its defining data."""

    A_main: np.ndarray
    domain_basis: np.ndarray
    P: ContractionParam
    parent: BoundaryOperator
    condition: float = field(compare=False, default=0.0)


def constraint_matrix(op: BoundaryOperator, P) -> np.ndarray:
    """Boundary constraint ``(P - I) W_G Gamma0 - (P + I) Gamma1``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    m = op.n_boundary
    if P.shape != (m, m):
        raise ValueError(f"P must be {m}x{m}, got {P.shape}")
    eye = np.eye(m)
    return (P - eye) @ op.bspace.gram @ op.Gamma0 - (P + eye) @ op.Gamma1


def generator_from_contraction(op: BoundaryOperator, P) -> GeneratorRealization:
    """Realize the restriction of the maximal operator defined by P.

    With N spanning ker C, the generator is ``A_main = (L N)(iota N)^{-1}``.
    Raises ``IllPosedRestriction`` when the kernel dimension differs from
    the core dimension and ``SingularCoreProjection`` when the core
    projection on the kernel has condition number above 1e12.
    """
    c = constraint_matrix(op, P)
    basis = scipy.linalg.null_space(c, rcond=NULLSPACE_RCOND)
    if basis.shape[1] != op.core.dim:
        raise IllPosedRestriction(
            f"constraint kernel has dimension {basis.shape[1]}, "
            f"expected core dimension {op.core.dim}")
    core_proj = op.iota @ basis
    sigma = np.linalg.svd(core_proj, compute_uv=False)
    if sigma[-1] == 0.0 or sigma[0] / sigma[-1] > CONDITION_LIMIT:
        raise SingularCoreProjection(
            "core projection on the constraint kernel is singular "
            f"(condition {np.inf if sigma[-1] == 0 else sigma[0]/sigma[-1]:.3e})")
    a_main = np.linalg.solve(core_proj.T, (op.L @ basis).T).T
    param = ContractionParam.from_matrix(P, op.bspace)
    return GeneratorRealization(_frozen(a_main), _frozen(basis), param, op,
                                condition=float(sigma[0] / sigma[-1]))


def dissipativity_residual(g: GeneratorRealization) -> float:
    """Largest eigenvalue of sym(W_Z A_main); <= 1e-10 certifies dissipativity."""
    wa = g.parent.core.gram @ g.A_main
    return float(np.linalg.eigvalsh(0.5 * (wa + wa.T))[-1])
