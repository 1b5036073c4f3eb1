"""End-to-end dimension-witness pipeline on a finite question set.

A net discretizes the sphere in R^n; the Bell functional weights each pair of
regions by the inner product of their vector moments.  Inner-product
correlations (realizable with local dimension 2^floor(n/2)) score close to
1/n, while any strategy of local dimension d embeds into real unit vectors of
dimension m = 2d^2 and is therefore capped by the analytic ratio bound.  The
chain of inequalities connecting the two is checked explicitly on every run;
a failure beyond the statistical slack is a theory violation and trips the
build.

Statistical slack is fixed at 4 standard errors (the inequalities are exact;
only the moment estimators fluctuate), with MC errors combined in quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .analytic_bounds import kg_lower_bound
from .embedding_opt import (
    SeparableKernel,
    aligned_full_dim_value,
    moment_value_std_error,
    seesaw_maximize,
)
from .errors import DomainError, NumericalIntegrityError
from .quantum import MAX_GENERATORS, correlation, tsirelson_strategy
from .seeding import derive_seed, make_rng
from .sphere import RegionMoments, SphereSampler, build_eps_net, region_moments

__all__ = [
    "WitnessConfig",
    "WitnessReport",
    "ChainCheck",
    "VERDICT_CERTIFIED",
    "VERDICT_CONSISTENT",
    "VERDICT_VIOLATION",
    "bell_value_infinite",
    "bell_value_finite",
    "eps_threshold",
    "run_witness",
]

VERDICT_CERTIFIED = "certified_separation"
VERDICT_CONSISTENT = "consistent_but_uncertified"
VERDICT_VIOLATION = "violation_of_theory"

SLACK_SIGMAS = 4.0


@dataclass(frozen=True)
class WitnessConfig:
    """One (n, d, eps) witness run with seeds and MC budgets.

    The pipeline needs n >= 2 d^2 + 1 for a separation to be possible at all;
    smaller n is allowed only with allow_small_n (useful as a null test).
    """

    n: int
    d: int
    eps: float
    seed: int = 0
    moment_samples_per_region: int = 100
    validation_pairs: int = 64
    seesaw_restarts: int = 16
    seesaw_max_iters: int = 10_000
    seesaw_tol: float = 1e-10
    max_net_points: int = 200_000
    allow_small_n: bool = False

    @property
    def m(self) -> int:
        return 2 * self.d * self.d

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise DomainError("n and d must be positive")
        if not (0.0 < self.eps < 1.0):
            raise DomainError("eps must lie in (0, 1)")
        if self.n < self.m + 1 and not self.allow_small_n:
            raise DomainError(
                f"need n >= 2*d^2 + 1 = {self.m + 1} (or allow_small_n=True)"
            )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "eps": self.eps,
            "m": self.m,
            "seed": self.seed,
            "moment_samples_per_region": self.moment_samples_per_region,
            "validation_pairs": self.validation_pairs,
            "seesaw_restarts": self.seesaw_restarts,
            "seesaw_max_iters": self.seesaw_max_iters,
            "seesaw_tol": self.seesaw_tol,
            "max_net_points": self.max_net_points,
            "allow_small_n": self.allow_small_n,
        }


@dataclass(frozen=True)
class ChainCheck:
    name: str
    holds: bool
    slack: float  # margin by which the inequality is satisfied (>= 0 iff holds)

    def to_dict(self) -> dict:
        return {"name": self.name, "holds": self.holds, "slack": self.slack}


@dataclass(frozen=True)
class WitnessReport:
    """All quantities of one witness run, with per-inequality verdicts."""

    config: WitnessConfig
    k_lower: float
    b_infinite_quantum: float
    b_finite_quantum: float
    b_finite_quantum_se: float
    b_finite_seesaw_d: float
    b_finite_seesaw_se: float
    full_dim_value: float
    full_dim_value_se: float
    eps_threshold: float
    net_size: int
    empty_regions: int
    tsirelson_validation_dev: Optional[float]
    seesaw_converged: bool
    chain_checks: List[ChainCheck]
    verdict: str

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "witness_report",
            "config": self.config.to_dict(),
            "k_lower": self.k_lower,
            "b_infinite_quantum": self.b_infinite_quantum,
            "b_finite_quantum": self.b_finite_quantum,
            "b_finite_quantum_se": self.b_finite_quantum_se,
            "b_finite_seesaw_d": self.b_finite_seesaw_d,
            "b_finite_seesaw_se": self.b_finite_seesaw_se,
            "full_dim_value": self.full_dim_value,
            "full_dim_value_se": self.full_dim_value_se,
            "eps_threshold": self.eps_threshold,
            "net_size": self.net_size,
            "empty_regions": self.empty_regions,
            "tsirelson_validation_dev": self.tsirelson_validation_dev,
            "seesaw_converged": self.seesaw_converged,
            "chain_checks": [c.to_dict() for c in self.chain_checks],
            "verdict": self.verdict,
        }

    def to_json(self, **extra) -> str:
        out = self.to_dict()
        out.update(extra)
        return json.dumps(out, indent=2)


# ----------------------------------------------------------------------
# Bell functionals
# ----------------------------------------------------------------------

def bell_value_infinite(
    n: int, correlation_fn, samples: int, sampler: SphereSampler
) -> Tuple[float, float]:
    """MC estimate of the integral of (a.b) E[ab] over independent uniform a, b.

    `correlation_fn` must be vectorized: (batch, n) x (batch, n) -> (batch,)
    with values in [-1, 1].
    """
    if sampler.dim != n:
        raise DomainError("sampler dimension mismatch")
    if samples < 1:
        raise DomainError("samples must be positive")
    total = total_sq = 0.0
    done = 0
    while done < samples:
        b = min(8192, samples - done)
        pair = sampler.sample(2 * b)
        a_pts, b_pts = pair[:b], pair[b:]
        corr = np.asarray(correlation_fn(a_pts, b_pts), dtype=float)
        if corr.shape != (b,):
            raise DomainError("correlation_fn must return one value per pair")
        if np.any(np.abs(corr) > 1.0 + 1e-9):
            raise DomainError("correlations must lie in [-1, 1]")
        vals = np.einsum("ij,ij->i", a_pts, b_pts) * corr
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += b
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples)


def bell_value_finite(net, moments: RegionMoments, correlations) -> float:
    """sum_uv (w_u . w_v) E[uv] over net regions.

    `correlations` is either a dense (size, size) array or a factored pair
    (L, R) with E = L R^T; the factored path runs in O(size * n) memory via
    the coordinate decomposition of w_u . w_v.
    """
    w = moments.moment_vectors
    if moments.net is not net and not np.array_equal(moments.net.points, net.points):
        raise DomainError("moments were built on a different net")
    if isinstance(correlations, tuple):
        left, right = (np.asarray(x, dtype=float) for x in correlations)
        if left.shape[0] != net.size or right.shape[0] != net.size:
            raise DomainError("factored correlations do not match the net size")
        if left.shape[1] != right.shape[1]:
            raise DomainError("factored correlations have mismatched inner dimension")
        return float(np.sum((w.T @ left) * (w.T @ right)))
    corr = np.asarray(correlations, dtype=float)
    if corr.shape != (net.size, net.size):
        raise DomainError("correlations must be a (size, size) matrix")
    if np.any(np.abs(corr) > 1.0 + 1e-9):
        raise DomainError("correlations must lie in [-1, 1]")
    return float(np.sum((w.T @ corr) * w.T))


def eps_threshold(n: int, d: int) -> float:
    """Largest eps for which (1/n - 2 eps) > (1/K) (1/n + 2 eps).

    Solving the strict inequality with K the analytic ratio bound at
    m = 2 d^2 gives eps* = (K - 1) / (2 n (K + 1)); the chain certifies a
    separation only below it.
    """
    m = 2 * d * d
    if n <= m:
        raise DomainError("eps_threshold requires n > 2*d^2")
    k = kg_lower_bound(n, m).bound
    assert k > 1.0, "ratio bound must exceed 1 for m < n"
    return (k - 1.0) / (2.0 * n * (k + 1.0))


# ----------------------------------------------------------------------
# pipeline
# ----------------------------------------------------------------------

def _validate_tsirelson_on_net(net, pairs: int, seed: int) -> Optional[float]:
    """Max |<A u x B v> - u.v| over sampled net pairs; None when n is too large
    to simulate densely."""
    if net.dim > MAX_GENERATORS or net.size < 1:
        return None
    strategy = tsirelson_strategy(net.dim)
    rng = make_rng(seed, 0)
    worst = 0.0
    for _ in range(pairs):
        u = net.points[int(rng.integers(net.size))]
        v = net.points[int(rng.integers(net.size))]
        dev = abs(correlation(strategy, u, v) - float(u @ v))
        worst = max(worst, dev)
    if worst > 1e-10:
        raise NumericalIntegrityError(
            f"inner-product strategy deviated by {worst:.3e} on net points"
        )
    return worst


def run_witness(config: WitnessConfig) -> WitnessReport:
    """Run net -> moments -> Bell values -> see-saw -> inequality chain.

    Chain checks (slack is the satisfied margin, 4-sigma statistical):
      c1: finite quantum value >= 1/n - 2 eps        (discretization loss)
      c2: see-saw at m = 2d^2 <= (1/K) (1/n)         (embedding cap)
      c3: see-saw <= (1/K) (finite quantum + 2 eps)  (combined chain)
      c4: see-saw <= aligned full-dimension value    (only for m < n)
    """
    n, eps, m = config.n, config.eps, config.m

    net = build_eps_net(
        n, eps, seed=derive_seed(config.seed, "net"), max_points=config.max_net_points
    )
    sampler = SphereSampler(n, derive_seed(config.seed, "moments"))
    moments = region_moments(
        net, samples=config.moment_samples_per_region * net.size, sampler=sampler
    )

    validation_dev = _validate_tsirelson_on_net(
        net, config.validation_pairs, derive_seed(config.seed, "validation")
    )

    w = moments.moment_vectors
    u = net.points

    # finite Bell value of the inner-product correlations, E = U U^T factored
    b_fq = bell_value_finite(net, moments, (u, u))
    b_fq_se = moment_value_std_error(moments, u, u)

    kernel = SeparableKernel(left_vectors=w, right_vectors=w)
    seesaw = seesaw_maximize(
        kernel,
        m,
        restarts=config.seesaw_restarts,
        max_iters=config.seesaw_max_iters,
        tol=config.seesaw_tol,
        seed=derive_seed(config.seed, "seesaw"),
    )
    b_fs = seesaw.value
    b_fs_se = moment_value_std_error(
        moments, seesaw.assignment.row_vectors, seesaw.assignment.col_vectors
    )

    full_dim = aligned_full_dim_value(moments)
    norms = np.linalg.norm(w, axis=1)
    safe = np.where(norms == 0, 1.0, norms)
    what = np.where(norms[:, None] > 0, w / safe[:, None], 0.0)
    full_dim_se = moment_value_std_error(moments, what, what)

    k_lower = kg_lower_bound(n, m).bound if m <= n else 1.0
    b_inf = 1.0 / n
    thr = eps_threshold(n, config.d) if m < n else 0.0

    checks: List[ChainCheck] = []

    slack1 = b_fq - (b_inf - 2.0 * eps - SLACK_SIGMAS * b_fq_se)
    checks.append(ChainCheck("c1_finite_quantum_floor", slack1 >= 0.0, slack1))

    slack2 = (b_inf / k_lower + SLACK_SIGMAS * b_fs_se) - b_fs
    checks.append(ChainCheck("c2_seesaw_embedding_cap", slack2 >= 0.0, slack2))

    se3 = math.sqrt((b_fq_se / k_lower) ** 2 + b_fs_se**2)
    slack3 = ((b_fq + 2.0 * eps) / k_lower + SLACK_SIGMAS * se3) - b_fs
    checks.append(ChainCheck("c3_seesaw_chain_cap", slack3 >= 0.0, slack3))

    if m < n:
        se4 = math.sqrt(full_dim_se**2 + b_fs_se**2)
        slack4 = (full_dim + SLACK_SIGMAS * se4 + 1e-9) - b_fs
        checks.append(ChainCheck("c4_seesaw_below_full_dim", slack4 >= 0.0, slack4))

    if not all(c.holds for c in checks):
        verdict = VERDICT_VIOLATION
    else:
        gap = b_fq - b_fs
        gap_se = math.sqrt(b_fq_se**2 + b_fs_se**2)
        if thr > 0.0 and eps <= thr and gap > SLACK_SIGMAS * gap_se:
            verdict = VERDICT_CERTIFIED
        else:
            verdict = VERDICT_CONSISTENT

    return WitnessReport(
        config=config,
        k_lower=k_lower,
        b_infinite_quantum=b_inf,
        b_finite_quantum=b_fq,
        b_finite_quantum_se=b_fq_se,
        b_finite_seesaw_d=b_fs,
        b_finite_seesaw_se=b_fs_se,
        full_dim_value=full_dim,
        full_dim_value_se=full_dim_se,
        eps_threshold=thr,
        net_size=net.size,
        empty_regions=int(moments.empty_regions.size),
        tsirelson_validation_dev=validation_dev,
        seesaw_converged=seesaw.converged,
        chain_checks=checks,
        verdict=verdict,
    )
