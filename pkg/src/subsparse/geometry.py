"""Geometric primitives on the unit sphere.

Spherical distances, orthonormal bases of atom spans, the vertices of the
relative polar body ``K0° = {v in span(A0) : |<v, a_i>| <= 1}`` (the "dual
points"), covering radii and the Minkowski gauge of ``K0°``.

Atom matrices are ``(D, J)`` arrays holding one atom per column.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, cKDTree

from .errors import DomainError, ResourceError

EPS_NORM = 1e-10
EPS_ORTHO = 1e-10
EPS_FEAS = 1e-9
RANK_TOL = 1e-10
DEDUPE_TOL = 1e-8
MAX_CONDITION = 1e12
VERTEX_BUDGET = 2_000_000
LOAD_NORM_TOL = 1e-6

_CHUNK = 4096


def _as_matrix(atoms) -> np.ndarray:
    A = np.asarray(atoms, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise DomainError(f"atoms must be a 2-D (D, J) array, got shape {A.shape}")
    return A


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Unit-norm atoms with an optional inlier/outlier split or group labels.

    Parameters
    ----------
    atoms : ndarray, shape (D, J)
        One atom per column.
    partition : pair of index tuples, optional
        ``(J0, Jc)``; disjoint and covering ``range(J)``.
    groups : tuple of index tuples, optional
        Disjoint groups covering ``range(J)``.
    """

    atoms: np.ndarray
    partition: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    groups: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        A = _as_matrix(self.atoms)
        A.setflags(write=False)
        object.__setattr__(self, "atoms", A)
        norms = np.linalg.norm(A, axis=0)
        bad = np.flatnonzero(np.abs(norms - 1.0) > EPS_NORM)
        if bad.size:
            raise DomainError(
                f"atom {int(bad[0])} has norm {norms[bad[0]]!r}; atoms must be unit norm"
            )
        J = A.shape[1]
        if self.partition is not None:
            J0, Jc = (tuple(int(j) for j in part) for part in self.partition)
            _check_cover([J0, Jc], J, "partition")
            object.__setattr__(self, "partition", (J0, Jc))
        if self.groups is not None:
            groups = tuple(tuple(int(j) for j in g) for g in self.groups)
            _check_cover(groups, J, "groups")
            object.__setattr__(self, "groups", groups)

    @classmethod
    def from_columns(cls, atoms, normalize=True, **kwargs) -> "Dictionary":
        A = _as_matrix(atoms).copy()
        if normalize:
            norms = np.linalg.norm(A, axis=0)
            if np.any(norms == 0):
                raise DomainError("cannot normalize a zero atom")
            A = A / norms
        return cls(A, **kwargs)

    @property
    def D(self) -> int:
        return self.atoms.shape[0]

    @property
    def J(self) -> int:
        return self.atoms.shape[1]

    def _require_partition(self):
        if self.partition is None:
            raise DomainError("dictionary has no (J0, Jc) partition")
        return self.partition

    @property
    def J0(self) -> tuple[int, ...]:
        return self._require_partition()[0]

    @property
    def Jc(self) -> tuple[int, ...]:
        return self._require_partition()[1]

    @property
    def inliers(self) -> np.ndarray:
        return self.atoms[:, list(self.J0)]

    @property
    def outliers(self) -> np.ndarray:
        return self.atoms[:, list(self.Jc)]

    def with_partition(self, J0) -> "Dictionary":
        J0 = tuple(sorted(int(j) for j in J0))
        Jc = tuple(j for j in range(self.J) if j not in set(J0))
        return Dictionary(self.atoms, partition=(J0, Jc), groups=self.groups)


def _check_cover(parts, J, name):
    seen = set()
    for part in parts:
        for j in part:
            if not 0 <= j < J:
                raise DomainError(f"{name}: index {j} out of range for J = {J}")
            if j in seen:
                raise DomainError(f"{name}: index {j} appears more than once")
            seen.add(j)
    if len(seen) != J:
        missing = sorted(set(range(J)) - seen)
        raise DomainError(f"{name}: indices {missing[:5]} are not covered")


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis (columns of ``basis``) of a numerical column span."""

    basis: np.ndarray
    rank: int
    rank_tolerance: float = RANK_TOL

    @property
    def D(self) -> int:
        return self.basis.shape[0]

    def coords(self, x) -> np.ndarray:
        """Coordinates of ambient vector(s) ``x`` in this basis."""
        return self.basis.T @ np.asarray(x, dtype=float)

    def lift(self, c) -> np.ndarray:
        return self.basis @ np.asarray(c, dtype=float)

    def residual(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x - self.basis @ (self.basis.T @ x)

    def contains(self, x, tol=EPS_FEAS) -> bool:
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.linalg.norm(x)))
        return bool(np.linalg.norm(self.residual(x)) <= tol * scale)


@dataclass(frozen=True, eq=False)
class DualPointSet:
    """Vertices of the relative polar body of ``±A0``.

    ``points`` is ``(n, D)`` in ambient coordinates, ``coords`` the same
    points in the coordinates of ``generating_basis``.
    """

    points: np.ndarray
    coords: np.ndarray
    generating_basis: SubspaceBasis
    dedupe_tolerance: float = DEDUPE_TOL

    def __len__(self):
        return self.points.shape[0]

    @property
    def max_norm(self) -> float:
        return float(np.linalg.norm(self.coords, axis=1).max())

    @property
    def covering_radius(self) -> float:
        return _covering_radius_from_norm(self.max_norm)


def _covering_radius_from_norm(max_norm):
    return math.acos(min(1.0, 1.0 / max_norm))


def spherical_distance(v, w) -> float:
    """Angle in ``[0, pi]`` between two nonzero vectors."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    nv, nw = np.linalg.norm(v), np.linalg.norm(w)
    if nv == 0 or nw == 0:
        raise DomainError("spherical distance is undefined for the zero vector")
    c = float(np.dot(v, w) / (nv * nw))
    return math.acos(min(1.0, max(-1.0, c)))


def _unit_rows(X, name):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[0] == 0:
        raise DomainError(f"{name} is empty")
    n = np.linalg.norm(X, axis=1)
    if np.any(n == 0):
        raise DomainError(f"{name} contains a zero vector")
    return X / n[:, None]


def set_distance(V, W) -> float:
    """Minimum spherical distance over all pairs ``(v, w)``.

    ``V`` and ``W`` are finite point sets given as ``(n, D)`` arrays (one
    point per row).
    """
    Vn = _unit_rows(V, "V")
    Wn = _unit_rows(W, "W")
    c = float(np.max(Vn @ Wn.T))
    return math.acos(min(1.0, max(-1.0, c)))


def subspace_basis(atoms, rank_tol: float = RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the numerical column span of ``atoms``.

    The rank counts singular values above ``rank_tol`` times the largest.
    """
    A = _as_matrix(atoms)
    if A.size == 0:
        raise DomainError("atom list is empty")
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0:
        raise DomainError("all atoms are zero")
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    basis = U[:, :rank].copy()
    basis.setflags(write=False)
    return SubspaceBasis(basis=basis, rank=rank, rank_tolerance=rank_tol)


def candidate_count(s0: int, d0: int) -> int:
    """Number of (subset, sign pattern) candidates of the exhaustive search."""
    return 2**d0 * math.comb(s0, d0)


def _dedupe(P, tol):
    if P.shape[0] == 0:
        return P
    P = P[np.lexsort(P.T[::-1])]
    pairs = cKDTree(P).query_pairs(tol, output_type="ndarray")
    if pairs.size == 0:
        return P
    n = P.shape[0]
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    _, first = np.unique(labels, return_index=True)
    return P[np.sort(first)]


def _enumerate_vertices(M, feas_tol):
    # Solve S v = u for every d-subset S of atom rows and u with u_0 = +1;
    # the -u half is added by symmetry.
    d, s = M.shape
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=d - 1)), dtype=float)
    signs = signs.reshape(2 ** (d - 1), d - 1)
    U = np.hstack([np.ones((signs.shape[0], 1)), signs]).T
    combos = itertools.combinations(range(s), d)
    found = []
    while True:
        idx = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)), dtype=np.intp
        )
        if idx.size == 0:
            break
        S = M[:, idx.reshape(-1, d)].transpose(1, 2, 0)
        sv = np.linalg.svd(S, compute_uv=False)
        S = S[sv[:, -1] * MAX_CONDITION > sv[:, 0]]
        if S.shape[0] == 0:
            continue
        V = np.linalg.solve(S, np.broadcast_to(U, (S.shape[0],) + U.shape))
        V = V.transpose(0, 2, 1).reshape(-1, d)
        response = np.abs(V @ M).max(axis=1)
        found.append(V[response <= 1.0 + feas_tol])
    V = np.vstack(found) if found else np.empty((0, d))
    return np.vstack([V, -V])


def _hull_vertices(M, feas_tol):
    # Facets {x : n.x = c} of conv(±A0) are polar to vertices n / c of K0°.
    d, _ = M.shape
    P = np.hstack([M, -M]).T
    hull = ConvexHull(P)
    V = hull.equations[:, :-1] / -hull.equations[:, -1:]
    # Re-solve each vertex from the facet's own simplex for full accuracy.
    S = P[hull.simplices]
    sv = np.linalg.svd(S, compute_uv=False)
    ok = sv[:, -1] * MAX_CONDITION > sv[:, 0]
    V[ok] = np.linalg.solve(S[ok], np.ones((int(ok.sum()), d, 1)))[..., 0]
    V = V[np.abs(V @ M).max(axis=1) <= 1.0 + feas_tol]
    return np.vstack([V, -V])


def dual_points(
    A0,
    basis: SubspaceBasis | None = None,
    *,
    method: str = "enumerate",
    budget: int = VERTEX_BUDGET,
    feas_tol: float = EPS_FEAS,
    dedupe_tol: float = DEDUPE_TOL,
) -> DualPointSet:
    """Vertices of ``K0° = {v in span(A0) : ||A0^T v||_inf <= 1}``.

    Parameters
    ----------
    A0 : array_like, shape (D, s0)
        Atoms spanning the subspace.
    basis : SubspaceBasis, optional
        Basis of ``span(A0)``; computed when omitted.
    method : {"enumerate", "hull", "auto"}
        ``"enumerate"`` solves the square system of every ``d0``-subset of
        atoms against every sign pattern and keeps the feasible solutions;
        it raises :class:`ResourceError` when ``2**d0 * C(s0, d0)`` exceeds
        ``budget``. ``"hull"`` takes the facets of ``conv(±A0)`` from Qhull
        and maps each to its polar vertex. ``"auto"`` enumerates within
        budget and falls back to the hull otherwise.

    Returns
    -------
    DualPointSet
    """
    A0 = _as_matrix(A0)
    if basis is None:
        basis = subspace_basis(A0)
    d0 = basis.rank
    if d0 < 1:
        raise DomainError("subspace dimension must be at least 1")
    M = basis.coords(A0)
    if np.linalg.norm(A0 - basis.lift(M)) > feas_tol * max(1.0, math.sqrt(A0.shape[1])):
        raise DomainError("atoms do not lie in the span of the given basis")
    s0 = A0.shape[1]
    required = candidate_count(s0, d0)
    if method == "auto":
        method = "enumerate" if (required <= budget or d0 == 1) else "hull"
    if method == "enumerate":
        if required > budget:
            raise ResourceError(
                f"vertex enumeration needs {required} candidates, above the cap of {budget}",
                cap=budget,
                required=required,
            )
        V = _enumerate_vertices(M, feas_tol)
    elif method == "hull":
        if d0 == 1:
            V = _enumerate_vertices(M, feas_tol)
        else:
            V = _hull_vertices(M, feas_tol)
    else:
        raise DomainError(f"unknown vertex method {method!r}")
    V = _dedupe(V, dedupe_tol)
    return DualPointSet(
        points=basis.lift(V.T).T, coords=V, generating_basis=basis, dedupe_tolerance=dedupe_tol
    )


def covering_radius(
    A0,
    basis: SubspaceBasis | None = None,
    *,
    mode: str = "exact",
    n_samples: int | None = None,
    seed=None,
    **dual_kwargs,
) -> float:
    """Covering radius of ``±A0`` relative to the unit sphere of ``span(A0)``.

    ``mode="exact"`` uses the largest dual point norm: the radius is
    ``arccos(1 / max ||v||)``. ``mode="sampled"`` takes the worst of
    ``n_samples`` uniform directions in the span and is a lower bound.
    """
    A0 = _as_matrix(A0)
    if basis is None:
        basis = subspace_basis(A0)
    if mode == "exact":
        return dual_points(A0, basis, **dual_kwargs).covering_radius
    if mode != "sampled":
        raise DomainError(f"unknown covering radius mode {mode!r}")
    if n_samples is None or n_samples < 1:
        raise DomainError("sampled covering radius needs n_samples >= 1")
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((n_samples, basis.rank))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    M = basis.coords(A0)
    M = M / np.linalg.norm(M, axis=0)
    best = np.abs(W @ M).max(axis=1)
    return math.acos(min(1.0, float(best.min())))


def minkowski_gauge(A0, b, basis: SubspaceBasis | None = None, tol: float = EPS_FEAS) -> float:
    """Gauge of ``K0°`` at ``b``, which equals ``||A0^T b||_inf``."""
    A0 = _as_matrix(A0)
    b = np.asarray(b, dtype=float)
    if basis is None:
        basis = subspace_basis(A0)
    if not basis.contains(b, tol):
        raise DomainError("b is not in the span of the atoms")
    return float(np.abs(A0.T @ b).max())


def load_dictionary(source) -> Dictionary:
    """Read a dictionary from a JSON file path or an already-parsed mapping.

    Schema: ``{"D": int, "atoms": [[float] * D] * J, "partition":
    {"J0": [...], "Jc": [...]}?, "groups": [[...], ...]?}`` with 0-based
    indices. Atoms within ``1e-6`` of unit norm are renormalized.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"dictionary file is not valid JSON: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise DomainError("dictionary JSON must be an object")
    if "D" not in data or not isinstance(data["D"], int) or data["D"] < 1:
        raise DomainError("field 'D' must be a positive integer")
    D = data["D"]
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise DomainError("field 'atoms' must be a nonempty list of vectors")
    try:
        A = np.array(atoms, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"field 'atoms' is malformed: {exc}") from exc
    if A.ndim != 2 or A.shape[1] != D:
        raise DomainError(f"field 'atoms' must hold vectors of length D = {D}")
    norms = np.linalg.norm(A, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > LOAD_NORM_TOL)
    if bad.size:
        raise DomainError(f"field 'atoms': atom {int(bad[0])} has norm {norms[bad[0]]!r}")
    A = (A / norms[:, None]).T
    partition = None
    if data.get("partition") is not None:
        part = data["partition"]
        if not isinstance(part, dict) or "J0" not in part or "Jc" not in part:
            raise DomainError("field 'partition' must have keys 'J0' and 'Jc'")
        partition = (tuple(part["J0"]), tuple(part["Jc"]))
    groups = None
    if data.get("groups") is not None:
        if not isinstance(data["groups"], list):
            raise DomainError("field 'groups' must be a list of index lists")
        groups = tuple(tuple(g) for g in data["groups"])
    return Dictionary(A, partition=partition, groups=groups)


def dictionary_to_json(dic: Dictionary) -> dict:
    out = {"D": dic.D, "atoms": dic.atoms.T.tolist()}
    if dic.partition is not None:
        out["partition"] = {"J0": list(dic.J0), "Jc": list(dic.Jc)}
    if dic.groups is not None:
        out["groups"] = [list(g) for g in dic.groups]
    return out
