"""Dual pairs with boundary maps and their lift to second-order triplets.

A dual pair here is a factor map ``A: X -> Y`` together with an extension
``B_ext`` of the negative adjoint acting on an extended space
``Y~ = Y (+) R^nb`` whose extra coordinates are boundary unknowns.  Trace
maps (Lambda_i on the X side, Pi_i on the Y~ side) tie the two together
through the Green identity

    -<B_ext y~, x>_X - <iota_Y y~, A x>_Y = <Pi1 y~, Lambda1 x> - <Pi2 y~, Lambda2 x>

which is checked exactly (as a matrix residual) at assembly.

The lift produces a maximal second-order operator on extended coordinates
``(z1, z2, tau)`` over the core space ``Z = X_h (+) X`` with
``W_Z = blockdiag(A^T W_Y A, W_X)``, action ``L(z1, z2, tau) =
(z2, B_ext[A z1; tau])`` and traces

    Gamma0 = (Lambda1 z2, Pi2 [A z1; tau]),
    Gamma1 = (-Pi1 [A z1; tau], Lambda2 z2),

for which the operator Green identity

    iota^T W_Z L + L^T W_Z iota = Gamma1^T Gamma0 + Gamma0^T Gamma1

holds exactly whenever the dual-pair identity does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateCoreProjection,
    GreenIdentityViolated,
    TraceNotSurjective,
)
from .hilbert import HilbertSpaceSpec, LinearMap, _frozen, make_space

__all__ = [
    "DualPairTriplet",
    "BoundaryOperator",
    "extend_adjoint",
    "assemble_dual_pair",
    "lift_second_order",
    "green_residual",
    "minimal_domain",
    "skew_on_minimal",
]

GREEN_TOL = 1e-12
NULLSPACE_RCOND = 1e-10


@dataclass(frozen=True)
class DualPairTriplet:
    """Validated dual pair with trace maps and one or two boundary blocks."""

    A: LinearMap                      # X -> Y
    B_ext: LinearMap                  # Y~ -> X
    iota_Y: np.ndarray                # Y~ -> Y coordinate projection
    Lambda1: np.ndarray               # X -> G1
    Pi1: np.ndarray                   # Y~ -> G1 dual coordinates
    G1: HilbertSpaceSpec
    Lambda2: np.ndarray | None = None  # X -> G2 dual coordinates
    Pi2: np.ndarray | None = None      # Y~ -> G2
    G2: HilbertSpaceSpec | None = None
    residual: float = field(compare=False, default=0.0)

    @property
    def ext_Y_dim(self) -> int:
        return self.B_ext.domain.dim

    @property
    def n_boundary_coords(self) -> int:
        return self.ext_Y_dim - self.A.codomain.dim


@dataclass(frozen=True)
class BoundaryOperator:
    """Maximal operator with traces on extended coordinates.

    ``core`` carries the energy Gram W_Z; ``iota`` projects extended
    coordinates onto the core, ``L`` is the action and ``Gamma0``/``Gamma1``
    map into the boundary space ``bspace`` and its covariant dual.
    ``core_blocks`` records the (z1, z2) split of the core coordinates,
    which downstream mass weighting needs.
    """

    core: HilbertSpaceSpec
    ext_dim: int
    iota: np.ndarray
    L: np.ndarray
    Gamma0: np.ndarray
    Gamma1: np.ndarray
    bspace: HilbertSpaceSpec
    core_blocks: tuple[int, int]
    pair: DualPairTriplet | None = field(compare=False, default=None)

    @property
    def n_boundary(self) -> int:
        return self.bspace.dim


def extend_adjoint(A: LinearMap, injection: np.ndarray,
                   label: str = "Y~") -> tuple[LinearMap, np.ndarray]:
    """Extension of -A* to ``Y (+) R^nb`` by a boundary injection.

    ``B_ext = W_X^{-1} [-A^T W_Y | E]`` where the columns of E are the
    covariant boundary functionals; the Green identity then holds by
    construction.  Returns the extension and the Y-coordinate projection.
    """
    w_x = A.domain.gram
    w_y = A.codomain.gram
    dim_y = A.codomain.dim
    injection = np.atleast_2d(np.asarray(injection, dtype=float))
    if injection.shape[0] != A.domain.dim:
        raise ValueError("injection must have one row per X coordinate")
    nb = injection.shape[1]
    b = np.linalg.solve(w_x, np.hstack([-A.matrix.T @ w_y, injection]))
    ext_gram = scipy.linalg.block_diag(w_y, np.eye(nb))
    ext_space = make_space(dim_y + nb, ext_gram, label)
    iota_y = np.hstack([np.eye(dim_y), np.zeros((dim_y, nb))])
    return LinearMap(b, domain=ext_space, codomain=A.domain), iota_y


def _empty_block(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols))


def assemble_dual_pair(A: LinearMap, B_ext: LinearMap, iota_Y: np.ndarray,
                       Lambda1: np.ndarray, Pi1: np.ndarray,
                       G1: HilbertSpaceSpec,
                       Lambda2: np.ndarray | None = None,
                       Pi2: np.ndarray | None = None,
                       G2: HilbertSpaceSpec | None = None) -> DualPairTriplet:
    """Validate traces against the dual-pair Green identity.

    The residual is the Frobenius norm of the bilinear defect of
    ``-<B_ext y~, x> - <iota_Y y~, A x> = <Pi1 y~, Lambda1 x> - <Pi2 y~, Lambda2 x>``
    normalized by ``1 + ||iota_Y^T W_Y A||_F``; assembly fails above 1e-12.
    """
    w_x = A.domain.gram
    w_y = A.codomain.gram
    ext_dim = B_ext.domain.dim
    iota_Y = np.asarray(iota_Y, dtype=float)
    Lambda1 = np.atleast_2d(np.asarray(Lambda1, dtype=float))
    Pi1 = np.atleast_2d(np.asarray(Pi1, dtype=float))
    if G2 is None:
        Lambda2 = _empty_block(0, A.domain.dim)
        Pi2 = _empty_block(0, ext_dim)
    else:
        Lambda2 = np.atleast_2d(np.asarray(Lambda2, dtype=float))
        Pi2 = np.atleast_2d(np.asarray(Pi2, dtype=float))

    # Bilinear defect in y~^T (.) x coordinates.
    pairing = iota_Y.T @ w_y @ A.matrix
    defect = (-B_ext.matrix.T @ w_x - pairing
              - Pi1.T @ Lambda1 + Pi2.T @ Lambda2)
    scale = 1.0 + np.linalg.norm(pairing)
    residual = float(np.linalg.norm(defect) / scale)
    if residual > GREEN_TOL:
        raise GreenIdentityViolated(residual,
                                    float(np.abs(defect).max()),
                                    "dual pair")

    m = G1.dim + (G2.dim if G2 is not None else 0)
    if m > 0:
        lam = np.vstack([Lambda1, Lambda2])
        pi = np.vstack([Pi1, Pi2])
        if np.linalg.matrix_rank(lam) < m:
            raise TraceNotSurjective("stacked Lambda traces are rank "
                                     "deficient")
        if np.linalg.matrix_rank(pi) < m:
            raise TraceNotSurjective("stacked Pi traces are rank deficient")

    return DualPairTriplet(A, B_ext, _frozen(iota_Y), _frozen(Lambda1),
                           _frozen(Pi1), G1,
                           _frozen(Lambda2), _frozen(Pi2), G2,
                           residual=residual)


def lift_second_order(dp: DualPairTriplet) -> BoundaryOperator:
    """Lift a dual pair to the maximal second-order boundary operator.

    Extended coordinates are ``(z1, z2, tau)`` with tau the boundary block
    of the extended Y side; the Y~ element fed to B_ext and the Pi traces
    is ``[A z1; tau]``.
    """
    nx = dp.A.domain.dim
    dim_y = dp.A.codomain.dim
    nb = dp.n_boundary_coords
    ext_dim = 2 * nx + nb
    m1 = dp.G1.dim
    m2 = dp.G2.dim if dp.G2 is not None else 0
    m = m1 + m2

    # Core Z = X_h (+) X with W_Z = blockdiag(A^T W_Y A, W_X).
    w_h = dp.A.matrix.T @ dp.A.codomain.gram @ dp.A.matrix
    w_z = scipy.linalg.block_diag(0.5 * (w_h + w_h.T), dp.A.domain.gram)
    core = make_space(2 * nx, w_z,
                      f"{dp.A.domain.label}_h(+){dp.A.domain.label}")

    iota = np.hstack([np.eye(2 * nx), np.zeros((2 * nx, nb))])

    # y~(z1, tau) = [A z1; tau] in Y~ coordinates.
    lift_y = np.zeros((dim_y + nb, ext_dim))
    lift_y[:dim_y, :nx] = dp.A.matrix
    lift_y[dim_y:, 2 * nx:] = np.eye(nb)

    L = np.zeros((2 * nx, ext_dim))
    L[:nx, nx:2 * nx] = np.eye(nx)
    L[nx:, :] = dp.B_ext.matrix @ lift_y

    gamma0 = np.zeros((m, ext_dim))
    gamma1 = np.zeros((m, ext_dim))
    gamma0[:m1, nx:2 * nx] = dp.Lambda1
    gamma0[m1:, :] = dp.Pi2 @ lift_y
    gamma1[:m1, :] = -dp.Pi1 @ lift_y
    gamma1[m1:, nx:2 * nx] = dp.Lambda2

    if m > 0:
        stacked = np.vstack([gamma0, gamma1])
        if np.linalg.matrix_rank(stacked) < 2 * m:
            raise TraceNotSurjective("lifted traces [Gamma0; Gamma1] are "
                                     "rank deficient")

    if dp.G2 is None:
        bgram = dp.G1.gram
    else:
        bgram = scipy.linalg.block_diag(dp.G1.gram, dp.G2.gram)
    bspace = make_space(m, bgram, "G")

    op = BoundaryOperator(core=core, ext_dim=ext_dim, iota=_frozen(iota),
                          L=_frozen(L), Gamma0=_frozen(gamma0),
                          Gamma1=_frozen(gamma1), bspace=bspace,
                          core_blocks=(nx, nx), pair=dp)
    res = green_residual(op)
    if res > GREEN_TOL:
        raise GreenIdentityViolated(res, res, "second-order lift")
    return op


def green_residual(op: BoundaryOperator) -> float:
    """Defect of the operator Green identity, relative to 1 + ||W_Z L||_F."""
    wl = op.core.gram @ op.L
    defect = (op.iota.T @ wl + wl.T @ op.iota
              - op.Gamma1.T @ op.Gamma0 - op.Gamma0.T @ op.Gamma1)
    return float(np.linalg.norm(defect) / (1.0 + np.linalg.norm(wl)))


def minimal_domain(op: BoundaryOperator) -> np.ndarray:
    """Orthonormal basis of ker Gamma0 ∩ ker Gamma1 in extended coordinates.

    For surjective traces the dimension is ``ext_dim - 2 m``.
    """
    stacked = np.vstack([op.Gamma0, op.Gamma1])
    if stacked.shape[0] == 0 or not stacked.any():
        return np.eye(op.ext_dim)
    return scipy.linalg.null_space(stacked, rcond=NULLSPACE_RCOND)


def skew_on_minimal(op: BoundaryOperator,
                    L: np.ndarray | None = None) -> float:
    """Symmetric defect ``||sym(V^T iota^T W_Z L V)||_F`` on the minimal domain.

    V is the minimal-domain basis; with no damping folded into L the value
    is at roundoff level because the Green identity kills the boundary
    terms on the kernel.  An alternative action (e.g. with damping folded
    in) may be supplied.
    """
    v = minimal_domain(op)
    if v.shape[1] == 0:
        return 0.0
    iv = op.iota @ v
    if np.linalg.matrix_rank(iv, tol=NULLSPACE_RCOND * max(
            1.0, float(np.abs(iv).max()))) < v.shape[1]:
        raise DegenerateCoreProjection(
            "core projection is not injective on the minimal domain")
    action = op.L if L is None else np.asarray(L, dtype=float)
    compressed = v.T @ op.iota.T @ op.core.gram @ action @ v
    return float(np.linalg.norm(0.5 * (compressed + compressed.T)))
