"""Probabilistic bounds under the uniform random model, and their Monte Carlo check.

Inliers are uniform on the unit sphere of a uniformly random ``d0``-dim
subspace of ``R^D``; outliers are uniform on the unit sphere of ``R^D``.
Every closed form is evaluated in the log domain.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .conditions import analyze_conditions
from .errors import DomainError, ResourceError
from .geometry import VERTEX_BUDGET, Dictionary


def log_unit_ball_volume(p: int) -> float:
    if p < 1:
        raise DomainError("unit ball volume needs p >= 1")
    return 0.5 * p * math.log(math.pi) - math.lgamma(0.5 * p + 1.0)


def unit_ball_volume(p: int) -> float:
    """Volume ``pi^(p/2) / Gamma(p/2 + 1)`` of the unit ball in ``R^p``."""
    return math.exp(log_unit_ball_volume(p))


def _log_volume_ratio(p):
    # log(v_{p-1} / v_p)
    return log_unit_ball_volume(p - 1) - log_unit_ball_volume(p)


def _log_sin_power(theta, k):
    s = math.sin(theta)
    return -math.inf if s <= 0 else k * math.log(s)


def cap_area_fraction_bounds(p: int, theta: float) -> tuple[float, float]:
    """Lower and upper bounds on the area fraction of a cap of angular radius ``theta``."""
    if p < 2:
        raise DomainError("cap bounds need p >= 2")
    if not 0.0 <= theta <= math.pi / 2:
        raise DomainError("theta must lie in [0, pi/2]")
    upper = math.exp(_log_volume_ratio(p) + _log_sin_power(theta, p - 1))
    return upper / p, upper


def cap_area_fraction_numeric(p: int, theta: float) -> float:
    """Cap area fraction by quadrature of ``sin^(p-2)``."""
    if p < 2:
        raise DomainError("cap fraction needs p >= 2")
    if not 0.0 <= theta <= math.pi:
        raise DomainError("theta must lie in [0, pi]")
    f = lambda t: math.sin(t) ** (p - 2)  # noqa: E731
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
    num = quad(f, 0.0, theta, **opts)[0]
    den = quad(f, 0.0, math.pi, **opts)[0]
    return num / den


def covering_number_bound(p: int, eps: float) -> float:
    """Upper bound on the number of ``eps``-caps needed to cover ``S^(p-1)``."""
    if p < 2:
        raise DomainError("covering number bound needs p >= 2")
    if not 0.0 < eps <= math.pi / 4:
        raise DomainError("eps must lie in (0, pi/4]")
    return math.exp(math.log(p) - _log_volume_ratio(p) - _log_sin_power(eps / 2, p - 1))


def covering_radius_tail_bound(p: int, K: int, gamma_star: float) -> float:
    """Lower bound on ``P(gamma(±P) < gamma_star)`` for ``K`` uniform points on ``S^(p-1)``.

    May be negative, in which case it is vacuous.
    """
    if p < 2 or K < 1:
        raise DomainError("tail bound needs p >= 2 and K >= 1")
    if not 0.0 < gamma_star <= math.pi / 2:
        raise DomainError("gamma_star must lie in (0, pi/2]")
    lr = _log_volume_ratio(p)
    log_prefactor = math.log(p) - lr - _log_sin_power(gamma_star / 4, p - 1)
    rate = math.exp(math.log(2.0 / p) + lr + _log_sin_power(gamma_star / 2, p - 1))
    return 1.0 - math.exp(log_prefactor - K * rate)


def log_c_constant(D: int, d: int) -> float:
    if D < 2 or d < 2:
        raise DomainError("C(D, d) needs D >= 2 and d >= 2")
    return (
        -(d - 2) * math.log(2.0)
        + _log_volume_ratio(d)
        - (d - 1) / (D - 1) * _log_volume_ratio(D)
    )


def c_constant(D: int, d: int) -> float:
    """``C(D, d) = 2^(2-d) (v_{d-1}/v_d) (v_D/v_{D-1})^((d-1)/(D-1))``."""
    return math.exp(log_c_constant(D, d))


@dataclass(frozen=True)
class RandomModelParams:
    """Random model parameters.

    ``s0`` may be fractional when only the density ``rho0 = s0/d0`` matters
    (bound evaluation); sampling needs an integer.
    """

    D: int
    d0: int
    s0: float
    lam: float = 1.0

    @classmethod
    def from_density(cls, D, d0, rho0, lam=1.0):
        s0 = rho0 * d0
        if float(s0).is_integer():
            s0 = int(s0)
        return cls(D, d0, s0, lam)

    @property
    def rho0(self) -> float:
        return self.s0 / self.d0

    @property
    def k0(self) -> float:
        return self.D / (2 * self.d0) - self.d0

    @property
    def n_outliers(self) -> int:
        return math.ceil(self.lam * self.s0 - 1e-12)

    def check_bound_domain(self):
        if self.d0 < 2:
            raise DomainError(f"d0 = {self.d0} violates 2 <= d0")
        if not self.d0 < math.sqrt(self.D / 2):
            raise DomainError(f"d0 = {self.d0} violates d0 < sqrt(D/2) = {math.sqrt(self.D / 2):.6g}")
        if self.rho0 < 1:
            raise DomainError(f"rho0 = {self.rho0:.6g} violates rho0 >= 1")
        if self.lam < 0:
            raise DomainError("lambda must be nonnegative")


def covering_failure_term(D, d, rho):
    # d 2^d / C(D,d) * sqrt(rho) * exp(-C(D,d) sqrt(rho))
    logc = log_c_constant(D, d)
    root = math.sqrt(rho)
    return math.exp(math.log(d) + d * math.log(2.0) - logc + math.log(root) - math.exp(logc) * root)


def outlier_failure_term(d, rho, k, weight):
    # weight * d (2e)^d / rho^k
    if weight == 0:
        return 0.0
    return math.exp(math.log(weight) + math.log(d) + d * (math.log(2.0) + 1.0) - k * math.log(rho))


def drc_probability_bound(params: RandomModelParams) -> float:
    """Lower bound on the probability that the dual condition holds.

    Raw value; it may be nonpositive. ``d0 = 1`` returns 1.
    """
    if params.d0 == 1 and params.D > 1 and params.s0 >= 1:
        return 1.0
    params.check_bound_domain()
    return (
        1.0
        - covering_failure_term(params.D, params.d0, params.rho0)
        - outlier_failure_term(params.d0, params.rho0, params.k0, params.lam)
    )


def random_subspace(D: int, d: int, rng) -> np.ndarray:
    """Orthonormal ``(D, d)`` frame of a uniformly random subspace."""
    Q, R = np.linalg.qr(rng.standard_normal((D, d)))
    return Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))


def uniform_sphere(D: int, n: int, rng) -> np.ndarray:
    """``n`` uniform points on ``S^(D-1)``, one per column."""
    X = rng.standard_normal((D, n))
    return X / np.linalg.norm(X, axis=0)


def sample_instance(params: RandomModelParams, seed) -> Dictionary:
    """Draw one dictionary from the random model (inliers first)."""
    if not float(params.s0).is_integer() or params.s0 < 1:
        raise DomainError("sampling needs a positive integer s0")
    if not 1 <= params.d0 <= params.D:
        raise DomainError("need 1 <= d0 <= D")
    s0 = int(params.s0)
    rng = np.random.default_rng(seed)
    basis = random_subspace(params.D, params.d0, rng)
    inliers = basis @ uniform_sphere(params.d0, s0, rng)
    outliers = uniform_sphere(params.D, params.n_outliers, rng)
    atoms = np.hstack([inliers, outliers])
    atoms /= np.linalg.norm(atoms, axis=0)
    J = atoms.shape[1]
    return Dictionary(atoms, partition=(tuple(range(s0)), tuple(range(s0, J))))


def trial_seeds(master_seed: int, trials: int) -> list[int]:
    """Independent per-trial seeds derived from the master seed by counter."""
    children = np.random.SeedSequence(master_seed).spawn(trials)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


@dataclass
class TrialRecord:
    index: int
    seed: int
    gamma0: float
    dist_ac_d0: float
    drc_holds: bool
    error: str | None = None


@dataclass
class MonteCarloReport:
    D: int
    d0: int
    s0: int
    lam: float
    trials: int
    master_seed: int
    drc_success_count: int
    empirical_frequency: float
    theoretical_lower_bound: float | None
    resource_failures: int
    per_trial: list[TrialRecord] = field(default_factory=list)

    @property
    def binomial_stderr(self) -> float:
        p = self.empirical_frequency
        return math.sqrt(p * (1 - p) / self.trials)


def _run_trial(args):
    params, index, seed, vertex_method, budget = args
    dic = sample_instance(params, seed)
    try:
        rep = analyze_conditions(dic, vertex_method=vertex_method, budget=budget)
    except ResourceError as exc:
        return TrialRecord(index, seed, math.nan, math.nan, False, str(exc))
    return TrialRecord(index, seed, rep.gamma0, rep.dist_ac_d0, rep.drc_holds)


def worker_count() -> int:
    env = os.environ.get("SUBSPARSE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def monte_carlo_drc(params: RandomModelParams, trials: int, seed: int = 0, *,
                    vertex_method: str = "enumerate", budget: int = VERTEX_BUDGET,
                    parallel: bool = False) -> MonteCarloReport:
    """Empirical frequency of the dual condition over independent instances.

    Each trial uses its own seed from :func:`trial_seeds`, so the report
    does not depend on execution order. Trials whose vertex enumeration
    exceeds ``budget`` count as failures and are tallied in
    ``resource_failures``.
    """
    if trials < 1:
        raise DomainError("trials must be at least 1")
    jobs = [(params, i, s, vertex_method, budget) for i, s in enumerate(trial_seeds(seed, trials))]
    if parallel and worker_count() > 1:
        with ProcessPoolExecutor(max_workers=worker_count()) as pool:
            records = list(pool.map(_run_trial, jobs, chunksize=8))
    else:
        records = [_run_trial(job) for job in jobs]
    success = sum(r.drc_holds for r in records)
    try:
        bound = drc_probability_bound(params)
    except DomainError:
        bound = None
    return MonteCarloReport(
        D=params.D,
        d0=params.d0,
        s0=int(params.s0),
        lam=params.lam,
        trials=trials,
        master_seed=seed,
        drc_success_count=success,
        empirical_frequency=success / trials,
        theoretical_lower_bound=bound,
        resource_failures=sum(r.error is not None for r in records),
        per_trial=records,
    )
