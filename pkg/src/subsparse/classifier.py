"""Sparse-representation classification over a union of subspaces.

A query is labeled by the group holding the largest l1 mass of its BP or
OMP coefficients. This is not the residual-based score of the original SRC
method; under subspace-sparse recovery both rules give the same label.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conditions import MARGIN_TOL, dual_angle, verdict
from .errors import DomainError
from .geometry import VERTEX_BUDGET, Dictionary, SubspaceBasis, dual_points, subspace_basis
from .randomized import covering_failure_term, outlier_failure_term, random_subspace, uniform_sphere
from .solvers import EPS_SUPPORT, RecoveryResult, bp_primal, omp, support_of


@dataclass(frozen=True, eq=False)
class UnionModel:
    """A grouped dictionary together with one subspace basis per group."""

    dictionary: Dictionary
    bases: tuple[SubspaceBasis, ...]

    @classmethod
    def from_dictionary(cls, dic: Dictionary, member_tol: float = 1e-10) -> "UnionModel":
        if dic.groups is None:
            raise DomainError("dictionary has no group labels")
        bases = []
        for i, g in enumerate(dic.groups):
            if not g:
                raise DomainError(f"group {i} is empty")
            A_i = dic.atoms[:, list(g)]
            basis = subspace_basis(A_i)
            if np.linalg.norm(basis.residual(A_i), axis=0).max() > member_tol:
                raise DomainError(f"group {i}: atoms do not lie in their span")
            bases.append(basis)
        return cls(dic, tuple(bases))

    @property
    def n_groups(self) -> int:
        return len(self.bases)

    def group_atoms(self, i) -> np.ndarray:
        return self.dictionary.atoms[:, list(self.dictionary.groups[i])]

    def other_atoms(self, i) -> np.ndarray:
        members = set(self.dictionary.groups[i])
        rest = [j for j in range(self.dictionary.J) if j not in members]
        return self.dictionary.atoms[:, rest]

    @property
    def counts(self) -> list[int]:
        return [len(g) for g in self.dictionary.groups]

    @property
    def dims(self) -> list[int]:
        return [b.rank for b in self.bases]

    @property
    def densities(self) -> list[float]:
        return [s / d for s, d in zip(self.counts, self.dims)]

    @property
    def proportions(self) -> list[float]:
        total = sum(self.counts)
        return [s / total for s in self.counts]


def sample_union_model(D: int, dims, counts, seed) -> UnionModel:
    """Independent uniform subspaces with uniform unit samples in each."""
    if len(dims) != len(counts) or not dims:
        raise DomainError("dims and counts must be nonempty and of equal length")
    rng = np.random.default_rng(seed)
    blocks, groups, start = [], [], 0
    for d, s in zip(dims, counts):
        basis = random_subspace(D, d, rng)
        X = basis @ uniform_sphere(d, s, rng)
        blocks.append(X / np.linalg.norm(X, axis=0))
        groups.append(tuple(range(start, start + s)))
        start += s
    return UnionModel.from_dictionary(Dictionary(np.hstack(blocks), groups=tuple(groups)))


@dataclass
class Classification:
    label: int | None
    single_group: bool
    group_mass: list[float]
    result: RecoveryResult
    status: str  # ok | solver_failure


def classify(model: UnionModel, b, method: str = "bp", **solver_kwargs) -> Classification:
    """Label ``b`` by the group with the largest l1 coefficient mass."""
    b = np.asarray(b, dtype=float)
    if not np.any(b):
        raise DomainError("query must be nonzero")
    method = method.lower()
    if method == "bp":
        result = bp_primal(model.dictionary, b, **solver_kwargs)
    elif method == "omp":
        result = omp(model.dictionary, b, **solver_kwargs)
    else:
        raise DomainError(f"unknown method {method!r}")
    if not result.converged:
        return Classification(None, False, [], result, "solver_failure")
    x = np.abs(result.coefficients)
    mass = [float(x[list(g)].sum()) for g in model.dictionary.groups]
    label = int(np.argmax(mass))
    support = set(support_of(result.coefficients, EPS_SUPPORT))
    touched = sum(1 for g in model.dictionary.groups if support & set(g))
    return Classification(label, touched <= 1, mass, result, "ok")


@dataclass
class GroupCondition:
    group: int
    gamma: float
    dist_to_others: float
    margin: float
    verdict: str


@dataclass
class ClassificationConditionReport:
    groups: list[GroupCondition] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(g.verdict == "holds" for g in self.groups)


def check_classification_condition(model: UnionModel, *, vertex_method: str = "enumerate",
                                   budget: int = VERTEX_BUDGET) -> ClassificationConditionReport:
    """Per group: covering radius ``gamma_i`` against ``s(D_i, A minus A_i)``."""
    report = ClassificationConditionReport()
    for i, basis in enumerate(model.bases):
        dual = dual_points(model.group_atoms(i), basis, method=vertex_method, budget=budget)
        gamma = dual.covering_radius
        dist = dual_angle(model.other_atoms(i), dual)
        margin = dist - gamma
        report.groups.append(GroupCondition(i, gamma, dist, margin, verdict(margin, MARGIN_TOL)))
    return report


def classification_probability_bound(D: int, dims, counts) -> float:
    """Lower bound on the probability that every query is classified correctly.

    Raw value; it may be nonpositive.
    """
    if len(dims) != len(counts) or not dims:
        raise DomainError("dims and counts must be nonempty and of equal length")
    total = float(sum(counts))
    loss = 0.0
    for i, (d, s) in enumerate(zip(dims, counts)):
        rho = s / d
        if d < 2:
            raise DomainError(f"group {i}: d = {d} violates 2 <= d")
        if not d < math.sqrt(D / 2):
            raise DomainError(f"group {i}: d = {d} violates d < sqrt(D/2)")
        if rho < 1:
            raise DomainError(f"group {i}: rho = {rho:.6g} violates rho >= 1")
        k = D / (2 * d) - d
        loss += covering_failure_term(D, d, rho) + outlier_failure_term(d, rho, k, total / s)
    return 1.0 - loss


@dataclass
class QueryRecord:
    query_id: int
    true_group: int
    method: str
    predicted: int | None
    single_group: bool


@dataclass
class ClassificationExperiment:
    queries_per_group: int
    methods: tuple[str, ...]
    seed: int
    correct: int
    total: int
    records: list[QueryRecord] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else math.nan

    @property
    def all_correct_single_group(self) -> bool:
        return all(r.predicted == r.true_group and r.single_group for r in self.records)


def run_classification_experiment(model: UnionModel, queries_per_group: int, seed=0,
                                  methods=("bp", "omp")) -> ClassificationExperiment:
    """Classify uniform unit queries drawn from every subspace with each method."""
    rng = np.random.default_rng(seed)
    exp = ClassificationExperiment(queries_per_group, tuple(methods), seed, 0, 0)
    qid = 0
    for i, basis in enumerate(model.bases):
        C = rng.standard_normal((queries_per_group, basis.rank))
        C /= np.linalg.norm(C, axis=1, keepdims=True)
        for b in C @ basis.basis.T:
            for method in methods:
                out = classify(model, b, method)
                exp.records.append(QueryRecord(qid, i, method, out.label, out.single_group))
                exp.total += 1
                exp.correct += out.label == i
            qid += 1
    return exp
