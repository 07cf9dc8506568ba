"""Dense two-phase tableau simplex for ``min c.x  s.t.  A x = b, x >= 0``.

Pricing is Dantzig's rule; after a run of degenerate pivots it switches to
Bland's smallest-index rule, which cannot cycle. On termination the basis is
re-factorized from the original data and optimality is re-checked, so
round-off accumulated in the tableau does not leak into the answer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError

PIVOT_TOL = 1e-9
DEGENERATE_RUN = 50


@dataclass
class LPSolution:
    x: np.ndarray | None
    basis: list[int]
    status: str  # optimal | infeasible | unbounded
    objective: float
    iterations: int
    multipliers: np.ndarray | None = None


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0


class _Tableau:
    def __init__(self, T, basis, ncols, opt_tol, max_iter):
        self.T = T
        self.basis = basis
        self.ncols = ncols
        self.opt_tol = opt_tol
        self.max_iter = max_iter
        self.iterations = 0
        self.bland = False
        self.degenerate = 0

    def run(self):
        T, m = self.T, self.T.shape[0] - 1
        while True:
            if self.iterations >= self.max_iter:
                raise SolverError(
                    "simplex iteration limit reached",
                    {"iterations": self.iterations, "bland": self.bland},
                )
            cost = T[m, : self.ncols]
            if self.bland:
                candidates = np.flatnonzero(cost < -self.opt_tol)
                if candidates.size == 0:
                    return "optimal"
                col = int(candidates[0])
            else:
                col = int(np.argmin(cost))
                if cost[col] >= -self.opt_tol:
                    return "optimal"
            column = T[:m, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12]
            row = int(min(ties, key=lambda r: self.basis[r]))
            if best <= 1e-12:
                self.degenerate += 1
                if self.degenerate >= DEGENERATE_RUN:
                    self.bland = True
            else:
                self.degenerate = 0
            _pivot(T, row, col)
            # round-off can push degenerate basics slightly negative, which
            # breaks the anti-cycling guarantee of the ratio test
            rhs = T[:m, -1]
            rhs[rhs < 0] = 0.0
            self.basis[row] = col
            self.iterations += 1


def solve_standard_form(c, A, b, opt_tol=1e-10, feas_tol=1e-9, max_iter=None) -> LPSolution:
    """Minimize ``c.x`` subject to ``A x = b`` and ``x >= 0``.

    Rows of ``A`` may be linearly dependent; redundant rows are dropped after
    phase one.
    """
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))

    # Phase one: artificial identity basis, minimize the artificial sum.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    tab = _Tableau(T, list(range(n, n + m)), n + m, opt_tol, max_iter)
    tab.run()
    if -T[m, -1] > feas_tol * scale * max(1, m):
        return LPSolution(None, tab.basis, "infeasible", np.inf, tab.iterations)

    # Drive remaining artificials out of the basis; drop rows where that fails.
    keep = []
    for row in range(m):
        if tab.basis[row] >= n:
            cols = np.flatnonzero(np.abs(T[row, :n]) > PIVOT_TOL)
            if cols.size:
                col = int(cols[np.argmax(np.abs(T[row, cols]))])
                _pivot(T, row, col)
                tab.basis[row] = col
            else:
                continue
        keep.append(row)
    basis = [tab.basis[r] for r in keep]
    A, b = A[keep], b[keep]
    iterations = tab.iterations

    for _ in range(4):
        T = _refactor(A, b, c, basis)
        tab = _Tableau(T, basis, n, opt_tol, max_iter - iterations)
        status = tab.run()
        iterations += tab.iterations
        basis = tab.basis
        if status == "unbounded":
            return LPSolution(None, basis, "unbounded", -np.inf, iterations)
        B = A[:, basis]
        xB = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, c[basis])
        reduced = c - A.T @ y
        if reduced.min(initial=0.0) >= -opt_tol and xB.min(initial=0.0) >= -feas_tol * scale:
            x = np.zeros(n)
            x[basis] = np.maximum(xB, 0.0)
            y_full = np.zeros(m)
            y_full[keep] = y
            y_full[neg] *= -1
            return LPSolution(x, list(basis), "optimal", float(c @ x), iterations, y_full)
    raise SolverError(
        "simplex failed to certify optimality after re-factorization",
        {"iterations": iterations, "min_reduced_cost": float(reduced.min()),
         "min_basic_value": float(xB.min())},
    )


def _refactor(A, b, c, basis):
    m, n = A.shape
    B = A[:, basis]
    T = np.zeros((m + 1, n + 1))
    try:
        T[:m, :n] = np.linalg.solve(B, A)
        T[:m, -1] = np.linalg.solve(B, b)
    except np.linalg.LinAlgError as exc:
        raise SolverError("singular simplex basis", {"basis": list(basis)}) from exc
    T[:m, -1] = np.maximum(T[:m, -1], 0.0)
    T[m, :n] = c - c[basis] @ T[:m, :n]
    T[m, -1] = -c[basis] @ T[:m, -1]
    return T
