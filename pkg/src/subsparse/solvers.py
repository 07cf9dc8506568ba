"""Sparse solvers: OMP, basis pursuit (primal and dual) and an exhaustive l0 search."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog

from .errors import DomainError, SolverError
from .geometry import EPS_FEAS, Dictionary, subspace_basis
from .lp import solve_standard_form

EPS_SUPPORT = 1e-8
EPS_TIE = 1e-12
EPS_RES = 1e-9
L0_MAX_K = 12

CONVERGED = "converged"
INFEASIBLE = "infeasible"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class RecoveryResult:
    """Output of a sparse solver.

    ``objective`` is ``||x||_1`` for basis pursuit and the support size for
    OMP and the l0 search; infeasible problems report ``inf``.
    """

    coefficients: np.ndarray
    support: tuple[int, ...]
    residual_norm: float
    objective: float
    iterations: int
    status: str
    solver: str = ""
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def support_of(x, eps_support=EPS_SUPPORT) -> tuple[int, ...]:
    return tuple(int(j) for j in np.flatnonzero(np.abs(x) > eps_support))


def _matrix(A):
    if isinstance(A, Dictionary):
        return A.atoms
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DomainError("dictionary must be a (D, J) matrix")
    return A


def _check_dims(A, b):
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise DomainError(f"signal has shape {b.shape}, expected ({A.shape[0]},)")
    return b


def omp(A, b, eps_res: float = EPS_RES, max_iter: int | None = None) -> RecoveryResult:
    """Orthogonal matching pursuit.

    Each step adds the unselected atom with the largest ``|<a_j, r>|`` (the
    lowest index wins ties within ``1e-12``), re-fits all selected
    coefficients by least squares and stops once ``||r|| <= eps_res *
    max(1, ||b||)``. Running out of ``max_iter`` steps, or a step that fails
    to shrink the residual, ends with status ``budget_exceeded``.
    """
    A = _matrix(A)
    b = _check_dims(A, b)
    if eps_res <= 0:
        raise DomainError("eps_res must be positive")
    D, J = A.shape
    if max_iter is None:
        max_iter = min(D, J)
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    tol = eps_res * max(1.0, float(np.linalg.norm(b)))

    x = np.zeros(J)
    selected: list[int] = []
    residual = b.copy()
    rnorm = float(np.linalg.norm(residual))
    history = [rnorm]
    status = CONVERGED
    while rnorm > tol:
        if len(selected) >= max_iter:
            status = BUDGET_EXCEEDED
            break
        score = np.abs(A.T @ residual)
        score[selected] = -np.inf
        top = score.max()
        if not np.isfinite(top) or top <= 0.0:
            status = BUDGET_EXCEEDED
            break
        j = int(np.flatnonzero(score >= top - EPS_TIE)[0])
        trial = selected + [j]
        coef = np.linalg.lstsq(A[:, trial], b, rcond=None)[0]
        new_residual = b - A[:, trial] @ coef
        new_norm = float(np.linalg.norm(new_residual))
        if new_norm >= rnorm:
            status = BUDGET_EXCEEDED
            break
        selected, residual, rnorm = trial, new_residual, new_norm
        x[:] = 0.0
        x[selected] = coef
        history.append(rnorm)

    return RecoveryResult(
        coefficients=x,
        support=tuple(sorted(selected)),
        residual_norm=rnorm,
        objective=float(len(selected)),
        iterations=len(selected),
        status=status,
        solver="omp",
        history=history,
    )


def _infeasible(J, residual, solver):
    return RecoveryResult(
        coefficients=np.zeros(J),
        support=(),
        residual_norm=residual,
        objective=math.inf,
        iterations=0,
        status=INFEASIBLE,
        solver=solver,
    )


def bp_primal(A, b, eps_opt: float = 1e-8, feas_tol: float = EPS_FEAS) -> RecoveryResult:
    """Basis pursuit: minimize ``||x||_1`` subject to ``A x = b``.

    Solved exactly as a linear program over ``x = u - w`` with ``u, w >= 0``
    after projecting the constraints onto an orthonormal basis of
    ``range(A)``. A signal outside ``range(A)`` returns status
    ``infeasible`` with objective ``inf``.
    """
    A = _matrix(A)
    b = _check_dims(A, b)
    D, J = A.shape
    bnorm = float(np.linalg.norm(b))
    tol = feas_tol * max(1.0, bnorm)
    if bnorm == 0.0:
        return RecoveryResult(np.zeros(J), (), 0.0, 0.0, 0, CONVERGED, "bp")
    if J == 0 or not np.any(A):
        return _infeasible(J, bnorm, "bp")
    Q = subspace_basis(A).basis
    bt = Q.T @ b
    outside = float(np.linalg.norm(b - Q @ bt))
    if outside > tol:
        return _infeasible(J, outside, "bp")
    At = Q.T @ A
    sol = solve_standard_form(
        np.ones(2 * J), np.hstack([At, -At]), bt, opt_tol=min(eps_opt, 1e-10)
    )
    if sol.status == "infeasible":
        return _infeasible(J, outside, "bp")
    if sol.status != "optimal":
        raise SolverError("basis pursuit LP did not reach an optimum", {"status": sol.status})
    x = sol.x[:J] - sol.x[J:]
    residual = float(np.linalg.norm(A @ x - b))
    if residual > tol:
        raise SolverError(
            "basis pursuit solution violates A x = b",
            {"residual": residual, "tolerance": tol, "iterations": sol.iterations},
        )
    return RecoveryResult(
        coefficients=x,
        support=support_of(x),
        residual_norm=residual,
        objective=float(np.abs(x).sum()),
        iterations=sol.iterations,
        status=CONVERGED,
        solver="bp",
    )


class DualResult(NamedTuple):
    omega: np.ndarray | None
    value: float | None
    status: str  # optimal | unbounded


def bp_dual(A, b) -> DualResult:
    """Basis pursuit dual: maximize ``<omega, b>`` s.t. ``||A^T omega||_inf <= 1``.

    Solved with the HiGHS LP solver. An unbounded dual (the primal is
    infeasible) is reported through ``status`` with no value.
    """
    A = _matrix(A)
    b = _check_dims(A, b)
    D, J = A.shape
    res = linprog(
        -b,
        A_ub=np.vstack([A.T, -A.T]),
        b_ub=np.ones(2 * J),
        bounds=[(None, None)] * D,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 3:
        return DualResult(None, None, "unbounded")
    if res.status != 0:
        raise SolverError("dual LP failed", {"status": res.status, "message": res.message})
    return DualResult(res.x, float(b @ res.x), "optimal")


def l0_oracle(A, b, k_max: int | None = None, feas_tol: float = EPS_FEAS) -> RecoveryResult:
    """Exhaustive sparsest representation for small problems.

    Tries supports of size 0, 1, ..., ``k_max`` in lexicographic order and
    returns the first one whose least-squares residual is within
    ``feas_tol * max(1, ||b||)``. Linearly dependent supports are skipped
    since a smaller support spans the same space.
    """
    A = _matrix(A)
    b = _check_dims(A, b)
    D, J = A.shape
    if k_max is None:
        k_max = min(J, L0_MAX_K)
    if k_max > L0_MAX_K:
        raise DomainError(f"k_max = {k_max} exceeds the exhaustive-search limit {L0_MAX_K}")
    bnorm = float(np.linalg.norm(b))
    tol = feas_tol * max(1.0, bnorm)
    if bnorm <= tol:
        return RecoveryResult(np.zeros(J), (), bnorm, 0.0, 0, CONVERGED, "l0")
    tried = 1
    for k in range(1, min(k_max, J, D) + 1):
        combos = np.array(list(itertools.combinations(range(J), k)), dtype=np.intp)
        tried += len(combos)
        Q, R = np.linalg.qr(A[:, combos].transpose(1, 0, 2))
        diag = np.abs(np.diagonal(R, axis1=1, axis2=2)).min(axis=1)
        proj = np.einsum("mdk,d->mk", Q, b)
        res = np.linalg.norm(b - np.einsum("mdk,mk->md", Q, proj), axis=1)
        hits = np.flatnonzero((diag > 1e-10) & (res <= tol))
        for h in hits:
            S = [int(j) for j in combos[h]]
            coef = np.linalg.lstsq(A[:, S], b, rcond=None)[0]
            residual = float(np.linalg.norm(A[:, S] @ coef - b))
            if residual <= tol:
                x = np.zeros(J)
                x[S] = coef
                return RecoveryResult(x, tuple(S), residual, float(k), tried, CONVERGED, "l0")
    return _infeasible(J, bnorm, "l0")


def is_subspace_sparse(result: RecoveryResult, J0, eps_support: float = EPS_SUPPORT) -> bool:
    """True when every coefficient above ``eps_support`` indexes ``J0``."""
    if not result.converged:
        raise DomainError(f"result status is {result.status!r}, expected 'converged'")
    allowed = set(int(j) for j in J0)
    return all(j in allowed for j in support_of(result.coefficients, eps_support))


SOLVERS = {"omp": omp, "bp": bp_primal, "l0": l0_oracle}
