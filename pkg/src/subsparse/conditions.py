"""Recovery certificates for an inlier/outlier split of a dictionary.

The principal condition compares the covering radius ``gamma0`` of ``±A0``
with the angle from the outliers to the whole inlier subspace; the dual
condition compares it with the angle to the finitely many dual points only.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResourceError
from .geometry import (
    VERTEX_BUDGET,
    Dictionary,
    DualPointSet,
    dual_points,
    subspace_basis,
)
from .solvers import bp_primal

MARGIN_TOL = 1e-9


def verdict(margin: float, tol: float = MARGIN_TOL) -> str:
    """``"holds"``, ``"fails"`` or ``"boundary"`` for a strict-inequality margin."""
    if margin > tol:
        return "holds"
    if margin < -tol:
        return "fails"
    return "boundary"


@dataclass
class ConditionReport:
    """Certificates for one ``(J0, Jc)`` split; all angles in radians.

    Distances to an empty outlier set are ``inf`` and both conditions hold.
    A margin within ``±1e-9`` gives verdict ``"boundary"`` and a false
    boolean.
    """

    gamma0: float
    dist_ac_s0: float
    dist_ac_d0: float
    max_dual_response: float
    mutual_coherence: float
    prc_holds: bool
    drc_holds: bool
    dual_response_holds: bool
    prc_margin: float
    drc_margin: float
    prc_verdict: str
    drc_verdict: str
    d0: int
    n_dual_points: int


def mutual_coherence(A) -> float:
    """Largest ``|<a_i, a_j>|`` over distinct atoms (0 for a single atom)."""
    A = A.atoms if isinstance(A, Dictionary) else np.asarray(A, dtype=float)
    if A.shape[1] < 2:
        return 0.0
    G = np.abs(A.T @ A)
    np.fill_diagonal(G, 0.0)
    return float(G.max())


def subspace_angle(Ac, basis) -> float:
    """``s(Ac, S0)``: smallest angle between an outlier and the subspace.

    The infimum over the subspace is attained at the normalized projection,
    so each outlier contributes ``arccos(||P^T a||)``.
    """
    Ac = np.asarray(Ac, dtype=float)
    if Ac.shape[1] == 0:
        return math.inf
    proj = np.linalg.norm(basis.coords(Ac), axis=0) / np.linalg.norm(Ac, axis=0)
    return math.acos(min(1.0, float(proj.max())))


def dual_angle(Ac, dual: DualPointSet) -> float:
    """``s(Ac, D0)`` against the (symmetric) dual point set."""
    Ac = np.asarray(Ac, dtype=float)
    if Ac.shape[1] == 0:
        return math.inf
    V = dual.points / np.linalg.norm(dual.points, axis=1, keepdims=True)
    An = Ac / np.linalg.norm(Ac, axis=0)
    return math.acos(min(1.0, max(-1.0, float((V @ An).max()))))


def certify(A0, Ac, *, dual: DualPointSet | None = None, coherence: float = math.nan,
            vertex_method: str = "enumerate", budget: int = VERTEX_BUDGET) -> tuple[ConditionReport, DualPointSet]:
    """Condition report for explicit inlier and outlier atom matrices."""
    A0 = np.asarray(A0, dtype=float)
    Ac = np.asarray(Ac, dtype=float).reshape(A0.shape[0], -1)
    if dual is None:
        dual = dual_points(A0, subspace_basis(A0), method=vertex_method, budget=budget)
    basis = dual.generating_basis
    gamma0 = dual.covering_radius
    dist_s0 = subspace_angle(Ac, basis)
    dist_d0 = dual_angle(Ac, dual)
    response = float(np.abs(dual.points @ Ac).max()) if Ac.shape[1] else 0.0
    prc_margin = dist_s0 - gamma0
    drc_margin = dist_d0 - gamma0
    prc_v, drc_v = verdict(prc_margin), verdict(drc_margin)
    report = ConditionReport(
        gamma0=gamma0,
        dist_ac_s0=dist_s0,
        dist_ac_d0=dist_d0,
        max_dual_response=response,
        mutual_coherence=coherence,
        prc_holds=prc_v == "holds",
        drc_holds=drc_v == "holds",
        dual_response_holds=response < 1.0,
        prc_margin=prc_margin,
        drc_margin=drc_margin,
        prc_verdict=prc_v,
        drc_verdict=drc_v,
        d0=basis.rank,
        n_dual_points=len(dual),
    )
    return report, dual


def analyze_conditions(A: Dictionary, *, vertex_method: str = "enumerate",
                       budget: int = VERTEX_BUDGET) -> ConditionReport:
    """Compute ``gamma0``, ``s(Ac, S0)``, ``s(Ac, D0)`` and the verdicts."""
    if A.partition is None:
        raise DomainError("analyze_conditions needs a dictionary with a (J0, Jc) partition")
    if not A.J0:
        raise DomainError("inlier set J0 is empty")
    report, _ = certify(A.inliers, A.outliers, coherence=mutual_coherence(A),
                        vertex_method=vertex_method, budget=budget)
    return report


def dual_points_independent(A0) -> DualPointSet:
    """Closed-form dual points ``A0 (A0^T A0)^{-1} u`` over all sign vectors ``u``."""
    A0 = np.asarray(A0, dtype=float)
    if A0.ndim == 1:
        A0 = A0[:, None]
    basis = subspace_basis(A0)
    s0 = A0.shape[1]
    if basis.rank != s0:
        raise DomainError(
            f"atoms have rank {basis.rank} < {s0}; use geometry.dual_points for dependent atoms"
        )
    W = A0 @ np.linalg.inv(A0.T @ A0)
    U = np.array(list(itertools.product((1.0, -1.0), repeat=s0))).T
    points = (W @ U).T
    return DualPointSet(points=points, coords=basis.coords(points.T).T, generating_basis=basis)


@dataclass
class PartitionVerdict:
    J0: tuple[int, ...]
    independent: bool
    prc_holds: bool
    drc_holds: bool
    status: str  # pass | fail | vacuous


@dataclass
class CoherenceReport:
    mutual_coherence: float
    threshold: float
    s0: int
    status: str  # applicable | not_applicable
    partitions: list[PartitionVerdict] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return self.status == "applicable" and all(p.status == "pass" for p in self.partitions)


def coherence_recovery_check(A: Dictionary, s0: int, exhaustive_cap: int = 100_000,
                             vertex_method: str = "enumerate") -> CoherenceReport:
    """Check that ``mu(A) < 1/(2 s0 - 1)`` yields independence, PRC and DRC.

    When the coherence condition holds, every ``s0``-subset of atoms is
    tested as ``J0``. Dependent subsets are flagged ``vacuous``.
    """
    if s0 < 1:
        raise DomainError("s0 must be at least 1")
    atoms = A.atoms if isinstance(A, Dictionary) else np.asarray(A, dtype=float)
    J = atoms.shape[1]
    mu = mutual_coherence(atoms)
    threshold = 1.0 / (2 * s0 - 1)
    report = CoherenceReport(mutual_coherence=mu, threshold=threshold, s0=s0, status="applicable")
    if not mu < threshold:
        report.status = "not_applicable"
        return report
    required = math.comb(J, s0)
    if required > exhaustive_cap:
        raise ResourceError(
            f"{required} partitions exceed the exhaustive cap of {exhaustive_cap}",
            cap=exhaustive_cap, required=required,
        )
    for J0 in itertools.combinations(range(J), s0):
        cols = list(J0)
        A0 = atoms[:, cols]
        if subspace_basis(A0).rank < s0:
            report.partitions.append(PartitionVerdict(J0, False, False, False, "vacuous"))
            continue
        Jc = [j for j in range(J) if j not in set(J0)]
        cert, _ = certify(A0, atoms[:, Jc], coherence=mu, vertex_method=vertex_method)
        ok = cert.prc_holds and cert.drc_holds
        report.partitions.append(
            PartitionVerdict(J0, True, cert.prc_holds, cert.drc_holds, "pass" if ok else "fail")
        )
    return report


@dataclass
class EquivalentConditionReport:
    method: str
    n_samples: int
    violations: int
    witnesses: list[np.ndarray] = field(default_factory=list)


def sample_unit_in_span(basis, n, rng) -> np.ndarray:
    """``n`` uniform unit vectors on the sphere of ``span(basis)``, as rows."""
    C = rng.standard_normal((n, basis.rank))
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    return C @ basis.basis.T


def _angle_to(atoms, b):
    if atoms.shape[1] == 0:
        return math.inf
    c = np.abs(atoms.T @ b) / (np.linalg.norm(atoms, axis=0) * np.linalg.norm(b))
    return math.acos(min(1.0, float(c.max())))


def equivalent_condition_sample(A: Dictionary, method: str, n_samples: int, seed=0,
                                probes=None, max_witnesses: int = 10) -> EquivalentConditionReport:
    """Test the per-signal equivalent condition on random signals in ``S0``.

    BP: ``p(A0, b) < p(Ac, b)`` (infeasible counts as ``inf``).
    OMP: ``s(±A0, {±b}) < s(Ac, {±b})``.
    Extra signals in ``probes`` are checked in addition to the samples.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be at least 1")
    method = method.lower()
    if method not in ("bp", "omp"):
        raise DomainError(f"unknown method {method!r}")
    A0, Ac = A.inliers, A.outliers
    basis = subspace_basis(A0)
    rng = np.random.default_rng(seed)
    signals = list(sample_unit_in_span(basis, n_samples, rng))
    if probes is not None:
        signals.extend(np.atleast_2d(np.asarray(probes, dtype=float)))
    report = EquivalentConditionReport(method=method, n_samples=len(signals), violations=0)
    for b in signals:
        if method == "bp":
            lhs = bp_primal(A0, b).objective
            rhs = bp_primal(Ac, b).objective
        else:
            lhs = _angle_to(A0, b)
            rhs = _angle_to(Ac, b)
        if not lhs < rhs:
            report.violations += 1
            if len(report.witnesses) < max_witnesses:
                report.witnesses.append(b)
    return report
