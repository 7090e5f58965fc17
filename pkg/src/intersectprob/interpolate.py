"""Approximate ln P(no bad event) from the truncated coefficient series of p(z).

p(z) = E prod_i (1 - z [A_i]) has p(0) = 1 and p(1) = P(no A_i).  Whenever
z lies in the closed disk |z - 1| <= 1 + delta, every factor satisfies
|1 - z [A_i]| <= 1 + delta, so the zero-freeness theorem for products of
such factors (delta = 1/(6 Delta)) keeps p free of zeros on that disk.  The
disk contains the delta-neighbourhood of [0, 1].

The map

    phi(z) = (1 - alpha) z / (1 - alpha z),   alpha = (1 + delta)^-2,

sends |z| <= rho = 1 + delta onto that disk with phi(0) = 0, phi(1) = 1.
For every root zeta of p, 1 - phi(z)/zeta = (1 - z/w)/(1 - alpha z) with
|w| > rho, so ln p(phi(z)) has at most 2 deg p singularities, all outside
|z| = rho, and its Taylor coefficients obey |b_k| <= 2n / (k rho^k).
Summing b_1..b_K gives ln p(1) up to a certified tail.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import mpmath
import numpy as np

from .errors import DegenerateProbabilityError, InputError, PlanConstructionError
from .jointprob import DEFAULT_ENUMERATION_BUDGET, DEFAULT_SUBSET_BUDGET, JointProbability, sigma_series
from .model import Event, ProductSpace, SmallnessReport, build_dependency_graph, check_smallness, normalize_support

VALIDATION_SAMPLES = 4096
VALIDATION_TOL = 1e-12
EXTENDED_PREC = 192  # bits of significand on the extended path
EXTENDED_ABOVE_K = 64
SINGULARITIES_PER_ROOT = 2  # one zero and one pole of 1 - phi(z)/zeta


def tail_bound(K: int, n: int, q: int, rho: float) -> float:
    """Bound on |sum_{k>K} b_k| when ln h has at most n*q singularities outside |z| = rho."""
    if n == 0:
        return 0.0
    if K < 1:
        return math.inf
    return n * q * rho ** (-K) * rho / (K * (rho - 1))


def choose_K(epsilon: float, n: int, q: int, rho: float, *, k_max: int = 10**7) -> int:
    """Smallest K with tail_bound(K) <= epsilon / 2."""
    if n == 0:
        return 0
    target = epsilon / 2
    lr = math.log(rho)
    # log of the bound is strictly decreasing in K, so bisect
    def ok(K):
        return math.log(n * q * rho / (rho - 1)) - K * lr - math.log(K) <= math.log(target)

    lo, hi = 1, 1
    while not ok(hi):
        hi *= 2
        if hi > k_max:
            raise PlanConstructionError(f"truncation order would exceed {k_max}")
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class InterpolationPlan:
    """A validated composition map together with the truncation order it implies.

    ``phi(z) = (1 - alpha) z / (1 - alpha z)``; ``alpha = 0`` is the identity.
    ``target_radius`` is the radius of the disk around 1 that the circle
    ``|z| = rho`` must land in.
    """

    delta: Fraction
    alpha: Fraction
    rho: Fraction
    K: int
    tail_bound: float
    validation_samples: int
    n: int
    epsilon: float
    q: int = SINGULARITIES_PER_ROOT
    target_radius: Fraction | None = None

    def phi(self, z):
        return _mobius(float(self.alpha), np.asarray(z, dtype=complex))

    def phi_exact(self, z: Fraction) -> Fraction:
        return (1 - self.alpha) * z / (1 - self.alpha * z)

    def phi_coeffs(self, K: int) -> list[Fraction]:
        """Taylor coefficients of phi up to z^K (constant term 0)."""
        return [Fraction(0)] + [(1 - self.alpha) * self.alpha ** (k - 1) for k in range(1, K + 1)]

    def summary(self) -> dict:
        return {
            "delta": float(self.delta),
            "alpha": float(self.alpha),
            "q": self.q,
            "rho": float(self.rho),
            "K": self.K,
            "tail_bound": self.tail_bound,
            "validation_samples": self.validation_samples,
            "map": "mobius",
            "delta_exact": str(self.delta),
            "alpha_exact": str(self.alpha),
            "rho_exact": str(self.rho),
            "target_radius_exact": str(self.radius),
            "n": self.n,
            "epsilon": self.epsilon,
        }

    @property
    def radius(self) -> Fraction:
        return self.target_radius if self.target_radius is not None else 1 + self.delta

    def with_K(self, K: int) -> "InterpolationPlan":
        return InterpolationPlan(self.delta, self.alpha, self.rho, K,
                                 tail_bound(K, self.n, self.q, float(self.rho)),
                                 self.validation_samples, self.n, self.epsilon, self.q, self.target_radius)


def boundary_samples(rho: float, count: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(count) / count
    return rho * np.exp(1j * theta)


def _mobius(alpha: float, z: np.ndarray) -> np.ndarray:
    return (1 - alpha) * z / (1 - alpha * z)


def disk_excess(alpha: Fraction, rho: Fraction, radius: Fraction, samples: int) -> float:
    """max over sampled |z| = rho of |phi(z) - 1| - radius (<= 0 means inside)."""
    w = _mobius(float(alpha), boundary_samples(float(rho), samples))
    return float(np.max(np.abs(w - 1)) - float(radius))


def segment_distance(w) -> np.ndarray:
    """Euclidean distance from complex points to the segment [0, 1]."""
    w = np.asarray(w, dtype=complex)
    x = np.clip(w.real, 0.0, 1.0)
    return np.abs(w - x)


def image_segment_distance(plan: InterpolationPlan, samples: int = VALIDATION_SAMPLES) -> float:
    """max over sampled |z| = rho of dist(phi(z), [0, 1])."""
    w = _mobius(float(plan.alpha), boundary_samples(float(plan.rho), samples))
    return float(np.max(segment_distance(w)))


def _validated_samples(alpha, rho, radius, start=VALIDATION_SAMPLES, rounds=3) -> tuple[int, float]:
    """Sample the boundary, densify x4 until the worst excess is stable."""
    count = start
    prev = disk_excess(alpha, rho, radius, count)
    for _ in range(rounds):
        if prev > VALIDATION_TOL:
            return count, prev
        nxt = disk_excess(alpha, rho, radius, count * 4)
        count *= 4
        if abs(nxt - prev) <= VALIDATION_TOL:
            return count, nxt
        prev = nxt
    return count, prev


def build_phi(delta, epsilon: float, n: int, *, max_retries: int = 8) -> InterpolationPlan:
    """Construct and validate the composition map for zero-free radius ``1 + delta``."""
    delta = Fraction(delta) if not isinstance(delta, Fraction) else delta
    if not 0 < delta < 1:
        raise InputError(f"delta must lie in (0, 1), got {delta}")
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    radius = 1 + delta
    alpha = 1 / radius**2
    rho = radius
    for _ in range(max_retries):
        samples, excess = _validated_samples(alpha, rho, radius)
        if excess <= VALIDATION_TOL and rho > 1:
            break
        rho = 1 + (rho - 1) * Fraction(7, 8)
    else:
        raise PlanConstructionError(
            f"no validated map after {max_retries} retries (alpha={float(alpha)}, q={SINGULARITIES_PER_ROOT}, rho={float(rho)})"
        )
    K = choose_K(epsilon, n, SINGULARITIES_PER_ROOT, float(rho))
    return InterpolationPlan(delta, alpha, rho, K, tail_bound(K, n, SINGULARITIES_PER_ROOT, float(rho)),
                             samples, n, epsilon, SINGULARITIES_PER_ROOT, radius)


def identity_plan(K: int, n: int = 0) -> InterpolationPlan:
    """phi(z) = z; only meaningful when p is zero-free on a disk of radius > 1."""
    return InterpolationPlan(Fraction(0), Fraction(0), Fraction(1), K, math.inf, 0, n, 0.0, 1, Fraction(1))


def save_plan(plan: InterpolationPlan, path) -> None:
    Path(path).write_text(json.dumps(plan.summary(), indent=2) + "\n")


def load_plan(source) -> InterpolationPlan:
    """Read a plan summary and re-validate the map before returning it."""
    data = json.loads(Path(source).read_text()) if not isinstance(source, dict) else source
    try:
        delta = Fraction(data["delta_exact"])
        alpha = Fraction(data["alpha_exact"])
        rho = Fraction(data["rho_exact"])
        radius = Fraction(data.get("target_radius_exact", str(1 + delta)))
        K, n = int(data["K"]), int(data["n"])
    except (KeyError, ValueError) as exc:
        raise InputError(f"malformed plan file: {exc}") from exc
    samples, excess = _validated_samples(alpha, rho, radius, start=max(VALIDATION_SAMPLES, int(data["validation_samples"]) // 16))
    if excess > VALIDATION_TOL or not rho > 1:
        raise PlanConstructionError(f"stored plan fails re-validation (excess {excess:.3e})")
    q = int(data.get("q", SINGULARITIES_PER_ROOT))
    plan = InterpolationPlan(delta, alpha, rho, K, tail_bound(K, n, q, float(rho)), samples, n,
                             float(data["epsilon"]), q, radius)
    if plan.phi_exact(Fraction(0)) != 0 or plan.phi_exact(Fraction(1)) != 1:
        raise PlanConstructionError("stored map does not fix 0 and 1")
    return plan


def shipped_plan(name: str = "delta_1_30.json") -> InterpolationPlan:
    return load_plan(json.loads(resources.files("intersectprob.plans").joinpath(name).read_text()))


class _Ctx:
    """Numeric type for a series computation."""

    def __init__(self, extended: bool):
        self.extended = extended

    def __enter__(self):
        if self.extended:
            self._wp = mpmath.workprec(EXTENDED_PREC)
            self._wp.__enter__()
        return self

    def __exit__(self, *exc):
        if self.extended:
            self._wp.__exit__(*exc)

    def num(self, x):
        if self.extended:
            if isinstance(x, Fraction):
                return mpmath.mpf(x.numerator) / x.denominator
            return mpmath.mpmathify(x)
        try:
            return float(x)
        except TypeError:
            return complex(x)

    def dot(self, xs, ys):
        if self.extended:
            return mpmath.fdot(xs, ys)
        if not len(xs):
            return 0.0
        v = np.dot(np.asarray(xs), np.asarray(ys))
        return complex(v) if np.iscomplexobj(v) else float(v)


def _use_extended(precision: str, K: int) -> bool:
    if precision not in ("double", "extended"):
        raise InputError(f"precision must be 'double' or 'extended', got {precision!r}")
    return precision == "extended" or K > EXTENDED_ABOVE_K


def compose_series(p_coeffs: Sequence, phi, K: int | None = None, *, precision: str = "double") -> list:
    """First K+1 Taylor coefficients of h(z) = p(phi(z)).

    ``phi`` is either an :class:`InterpolationPlan` (closed-form Mobius
    expansion) or the Taylor coefficients of phi with ``phi[0] == 0``
    (generic truncated composition).  Because phi(0) = 0, c_0..c_K depend
    on a_0..a_K only.
    """
    a = list(p_coeffs)
    if K is None:
        K = phi.K if isinstance(phi, InterpolationPlan) else len(a) - 1
    a = a[: K + 1] + [0] * max(0, K + 1 - len(a))
    d = max((k for k, x in enumerate(a) if x != 0), default=0)
    with _Ctx(_use_extended(precision, K)) as ctx:
        if isinstance(phi, InterpolationPlan):
            return _compose_mobius(a, d, phi.alpha, K, ctx)
        return _compose_generic(a, d, list(phi), K, ctx)


def _compose_mobius(a, d, alpha: Fraction, K: int, ctx: _Ctx) -> list:
    # phi^j = (1-alpha)^j z^j (1 - alpha z)^-j, and [z^k] z^j (1-alpha z)^-j = C(k-1, j-1) alpha^(k-j)
    al = ctx.num(alpha)
    beta = ctx.num(1 - alpha)
    aj = [ctx.num(x) * beta**j for j, x in enumerate(a[: d + 1])]
    apow = [ctx.num(1)]
    for _ in range(K):
        apow.append(apow[-1] * al)
    out = [ctx.num(a[0])]
    for k in range(1, K + 1):
        terms = [aj[j] * math.comb(k - 1, j - 1) for j in range(1, min(k, d) + 1)]
        out.append(ctx.dot(terms, [apow[k - j] for j in range(1, min(k, d) + 1)]) if terms else ctx.num(0))
    return out


def _compose_generic(a, d, phi, K: int, ctx: _Ctx) -> list:
    if phi and phi[0] != 0:
        raise InputError("phi must vanish at 0")
    f = [ctx.num(x) for x in (phi + [0] * (K + 1))[: K + 1]]
    acc = [ctx.num(0)] * (K + 1)
    acc[0] = ctx.num(a[d])
    # Horner: acc <- a_j + phi * acc, truncated at z^K
    for j in range(d - 1, -1, -1):
        prod = [ctx.num(0)] * (K + 1)
        for k in range(1, K + 1):
            prod[k] = ctx.dot(f[1 : k + 1], acc[k - 1 :: -1][:k])
        prod[0] = ctx.num(a[j])
        acc = prod
    return acc


def log_taylor(h_coeffs: Sequence, *, precision: str = "double") -> list:
    """b_1..b_K with ln h(z) = sum b_k z^k, from k c_k = sum_{j=1}^k j b_j c_{k-j}.

    Returned list is ``[b_1, ..., b_K]``.
    """
    c = list(h_coeffs)
    if not c or c[0] != 1:
        raise InputError("log series needs c_0 = 1")
    K = len(c) - 1
    with _Ctx(_use_extended(precision, K)) as ctx:
        c = [ctx.num(x) for x in c]
        jb = []  # j * b_j
        for k in range(1, K + 1):
            s = ctx.dot(jb, c[k - 1 : 0 : -1]) if jb else ctx.num(0)
            jb.append(k * c[k] - s)
        return [x / (j + 1) for j, x in enumerate(jb)]


def exp_taylor(b: Sequence, *, precision: str = "double") -> list:
    """Inverse of :func:`log_taylor`: coefficients c_0..c_K of exp(sum b_k z^k)."""
    K = len(b)
    with _Ctx(_use_extended(precision, K)) as ctx:
        jb = [ctx.num(x) * (j + 1) for j, x in enumerate(b)]
        c = [ctx.num(1)]
        for k in range(1, K + 1):
            c.append(ctx.dot(jb[:k], c[k - 1 :: -1][:k]) / k)
        return c


class Guarantee(str, Enum):
    CERTIFIED = "certified-by-assumption"
    VIOLATED = "conditions-violated"


@dataclass(frozen=True)
class Estimate:
    log_value: float
    value: float
    epsilon: float
    K_used: int
    guarantee: Guarantee
    conditions: SmallnessReport
    plan: InterpolationPlan | None
    b: tuple = field(default=(), repr=False)

    @property
    def diagnostics(self) -> dict:
        return {"conditions": self.conditions, "plan": self.plan.summary() if self.plan else None}


def estimate_log_intersection(space: ProductSpace, events: Sequence[Event], epsilon: float, *,
                              precision: str = "double", budget: int = DEFAULT_ENUMERATION_BUDGET,
                              subset_budget: int = DEFAULT_SUBSET_BUDGET, K: int | None = None) -> Estimate:
    """Estimate ln P(no event occurs) within ``epsilon`` (additively) when the
    smallness conditions hold.  ``K`` overrides the certified truncation order.
    """
    if not 0 < epsilon < 1:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    events = [normalize_support(space, e) for e in events]
    graph = build_dependency_graph(space, events)
    report = check_smallness(space, events, graph)
    for row in report.rows:
        if row.probability == 1:
            raise DegenerateProbabilityError(
                f"event {row.name!r} has probability 1; the target probability is 0 and has no logarithm"
            )
    guarantee = Guarantee.CERTIFIED if report.overall else Guarantee.VIOLATED
    n = len(events)
    if n == 0:
        return Estimate(0.0, 1.0, epsilon, 0, guarantee, report, None)
    plan = build_phi(Fraction(1, 6 * graph.Delta), epsilon, n)
    if K is not None:
        plan = plan.with_K(K)
    joint = JointProbability(space, events, graph, budget)
    series = sigma_series(space, events, graph, min(plan.K, n), subset_budget=subset_budget, joint=joint)
    c = compose_series(series.padded(plan.K), plan, plan.K, precision=precision)
    b = log_taylor(c, precision=precision)
    with _Ctx(_use_extended(precision, plan.K)) as ctx:
        total = ctx.dot(b, [1] * len(b)) if ctx.extended else math.fsum(b)
    log_value = float(total)
    return Estimate(log_value, math.exp(log_value), epsilon, plan.K, guarantee, report, plan,
                    tuple(float(x) for x in b))
