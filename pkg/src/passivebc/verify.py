"""Named property suites driven by a scenario (used by the CLI).

Each check returns its worst residual together with the tolerance it is
held to; a suite passes iff every check does.  The suites cover the Green
identities (``green``), the contraction parameterization of dissipative
restrictions (``extension``), the Cayley involution and the agreement of
the two node flavors (``cayley``), and the strain-momentum transport
(``jet``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import extension as ext
from . import node as node_mod
from .hilbert import contraction_norm
from .jet import push_state, state_injection
from .scenario import Scenario, build_system
from .triplet import BoundaryOperator, green_residual

__all__ = ["CheckResult", "run_suite", "SUITES", "random_contraction"]

SUITES = ("all", "green", "extension", "cayley", "jet")


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


def random_contraction(rng: np.random.Generator, bspace,
                       target_norm: float | None = None) -> np.ndarray:
    """Random matrix scaled to a dual-space norm (uniform in (0, 1] if None)."""
    m = bspace.dim
    raw = rng.standard_normal((m, m))
    nrm = contraction_norm(raw, bspace)
    scale = rng.uniform(0.05, 1.0) if target_norm is None else target_norm
    return raw * (scale / nrm)


def _subspace_gap(u: np.ndarray, v: np.ndarray) -> float:
    """Largest principal angle (in radians) between two column spans."""
    if u.shape[1] != v.shape[1]:
        return np.pi / 2.0
    angles = scipy.linalg.subspace_angles(u, v)
    return float(angles.max()) if angles.size else 0.0


def _green_checks(sys, corrupt_gamma1: bool) -> list[CheckResult]:
    op = sys.op_A
    if corrupt_gamma1:
        op = BoundaryOperator(core=op.core, ext_dim=op.ext_dim,
                              iota=op.iota, L=op.L, Gamma0=op.Gamma0,
                              Gamma1=2.0 * op.Gamma1, bspace=op.bspace,
                              core_blocks=op.core_blocks, pair=op.pair)
    return [
        CheckResult("green_identity_dual_pair", sys.dual_pair.residual,
                    1e-12),
        CheckResult("green_identity", green_residual(op), 1e-12),
        CheckResult("green_identity_jet_target",
                    green_residual(sys.jet.target), 1e-12),
    ]


def _extension_checks(sys, rng: np.random.Generator) -> list[CheckResult]:
    op = sys.op_A
    worst = 0.0
    for _ in range(50):
        p = random_contraction(rng, op.bspace)
        g = ext.generator_from_contraction(op, p)
        worst = max(worst, ext.dissipativity_residual(g))
    checks = [CheckResult("extension_dissipative_for_contractions",
                          worst, 1e-10)]

    m = op.bspace.dim
    dom_neumann = ext.generator_from_contraction(op, np.eye(m)).domain_basis
    ker_gamma1 = scipy.linalg.null_space(op.Gamma1, rcond=1e-10)
    checks.append(CheckResult("extension_neumann_domain",
                              _subspace_gap(dom_neumann, ker_gamma1),
                              1e-10))
    dirichlet = scipy.linalg.null_space(
        ext.constraint_matrix(op, -np.eye(m)), rcond=1e-10)
    ker_gamma0 = scipy.linalg.null_space(op.Gamma0, rcond=1e-10)
    checks.append(CheckResult("extension_dirichlet_domain",
                              _subspace_gap(dirichlet, ker_gamma0), 1e-10))

    # Expansive parameters must fail dissipativity: count the samples whose
    # residual does not clear 1e-12.
    undetected = 0
    for _ in range(10):
        p = random_contraction(rng, op.bspace,
                               target_norm=1.1 + rng.uniform(0.0, 0.9))
        g = ext.generator_from_contraction(op, p)
        if ext.dissipativity_residual(g) <= 1e-12:
            undetected += 1
    checks.append(CheckResult("extension_expansive_not_dissipative",
                              float(undetected), 0.0))
    return checks


def _cayley_checks(sc: Scenario, sys) -> list[CheckResult]:
    scat = node_mod.scattering_node(sys.op_A, sc.P, sys.M_map, sys.D_map)
    imp = node_mod.impedance_node(sys.op_A, sc.P, sys.M_map, sys.D_map)
    twice = node_mod.external_cayley(
        node_mod.external_cayley(scat, 1.0), 1.0)
    invol = max(np.abs(twice.G_map - scat.G_map).max(),
                np.abs(twice.K_map - scat.K_map).max())
    once = node_mod.external_cayley(scat, 1.0)
    agree = max(np.abs(once.G_map - imp.G_map).max(),
                np.abs(once.K_map - imp.K_map).max())
    return [CheckResult("cayley_involution", float(invol), 1e-14),
            CheckResult("cayley_matches_impedance", float(agree), 1e-14)]


def _jet_checks(sys, rng: np.random.Generator) -> list[CheckResult]:
    jt = sys.jet
    nx = jt.A_iso.domain.dim
    w_y = jt.A_iso.codomain.gram
    w_h = jt.A_iso.matrix.T @ w_y @ jt.A_iso.matrix

    iso = 0.0
    energy = 0.0
    for _ in range(20):
        z1 = rng.standard_normal(nx)
        az = jt.A_iso.matrix @ z1
        iso = max(iso, abs(float(az @ w_y @ az) - float(z1 @ w_h @ z1))
                  / (1.0 + abs(float(z1 @ w_h @ z1))))
        z = rng.standard_normal(2 * nx)
        w = push_state(jt, z)
        zc = jt.source.core.gram
        wc = jt.target.core.gram
        energy = max(energy, abs(float(w @ wc @ w) - float(z @ zc @ z))
                     / (1.0 + abs(float(z @ zc @ z))))

    dp = jt.source.pair
    dim_y = jt.A_iso.codomain.dim
    ker_rows = dp.B_ext.matrix[:, :dim_y] @ jt.P_ker
    kernel = float(np.linalg.norm(ker_rows)
                   / (1.0 + np.linalg.norm(dp.B_ext.matrix)))

    # Trace transport: Xi agrees with Gamma after injecting source states.
    inj = state_injection(jt)
    transport = max(
        float(np.abs(jt.target.Gamma0 @ inj - jt.source.Gamma0).max()),
        float(np.abs(jt.target.Gamma1 @ inj - jt.source.Gamma1).max()))

    return [CheckResult("jet_isometry", iso, 1e-12),
            CheckResult("jet_energy_push", energy, 1e-12),
            CheckResult("jet_kernel_annihilated", kernel, 1e-12),
            CheckResult("jet_trace_transport", transport, 1e-12)]


def run_suite(sc: Scenario, suite: str,
              corrupt_gamma1: bool = False) -> list[CheckResult]:
    """Run one named suite (or all) against the scenario's wave system."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    sys = build_system(sc)
    rng = np.random.default_rng(sc.seed)
    checks: list[CheckResult] = []
    if suite in ("all", "green"):
        checks += _green_checks(sys, corrupt_gamma1)
    if suite in ("all", "extension"):
        checks += _extension_checks(sys, rng)
    if suite in ("all", "cayley"):
        checks += _cayley_checks(sc, sys)
    if suite in ("all", "jet"):
        checks += _jet_checks(sys, rng)
    return checks
