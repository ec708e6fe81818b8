"""Budget-feasible procurement under XOS valuations at desk scale.

The valuation is a pointwise maximum of additive clauses.  The randomized
mechanism draws an explicit coin tape from its seed (one branch coin, then
one split bit per element in id order), so a fixed seed pins every random
choice and the realized run is a deterministic mechanism that can be
replayed under bid deviations.

Optimal subsets inside the mechanism are found by exhaustive enumeration,
which is the only exact realization for general XOS valuations; instance
size is capped accordingly.
"""

import random
from dataclasses import dataclass
from typing import Optional

from .errors import CapExceeded, InputError
from .matroids import FreeMatroid
from .mechanisms import Instance, Outcome, run_matroid_mechanism
from .rationals import ZERO, mpq, rational_isqrt

XOS_ENUMERATION_CAP = 16


class XosValuation:
    """max over additive clauses; clause weights are nonnegative rationals."""

    def __init__(self, ground, functions):
        self.ground = tuple(ground)
        ground_set = set(self.ground)
        if not functions:
            raise InputError("an XOS valuation needs at least one additive clause")
        self.functions = []
        for k, f in enumerate(functions):
            if set(f) != ground_set:
                raise InputError(f"clause {k} must cover exactly the ground set")
            clause = {e: mpq(v) for e, v in f.items()}
            for e, v in clause.items():
                if v < 0:
                    raise InputError(f"clause {k} value for {e!r} is negative")
            self.functions.append(clause)
        self.functions = tuple(self.functions)

    @property
    def num_clauses(self):
        return len(self.functions)

    def clause_value(self, k, s):
        total = ZERO
        for e in s:
            total += self.functions[k][e]
        return total

    def value(self, s):
        """v(S): maximum clause value; 0 on the empty set."""
        unknown = set(s) - set(self.ground)
        if unknown:
            raise InputError(f"unknown element ids: {sorted(unknown)}")
        return max(self.clause_value(k, s) for k in range(self.num_clauses))

    def best_clause(self, s):
        """Index of the clause achieving v(S); ties to the lowest index."""
        best, best_value = 0, self.clause_value(0, s)
        for k in range(1, self.num_clauses):
            v = self.clause_value(k, s)
            if v > best_value:
                best, best_value = k, v
        return best


def xos_value(valuation, s):
    return valuation.value(s)


@dataclass(frozen=True)
class XosParams:
    """Tuning constants for the sampling mechanism.

    ``gamma`` is the certified approximation factor of the additive
    sub-mechanism (4 for the one shipped here); it only enters the
    ratio analysis, never the run itself.
    """

    alpha: object
    beta: object
    gamma: object
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", mpq(self.alpha))
        object.__setattr__(self, "beta", mpq(self.beta))
        object.__setattr__(self, "gamma", mpq(self.gamma))
        if self.alpha <= 1:
            raise InputError("alpha must exceed 1")
        if self.beta <= 0:
            raise InputError("beta must be positive")
        if self.gamma < 1:
            raise InputError("gamma must be at least 1")
        if self.alpha * self.beta - self.beta - 4 * self.alpha <= 0:
            raise InputError("alpha*beta - beta - 4*alpha must be positive (bound is vacuous)")


def partition_halves(valuation, opt, alpha):
    """Split ``opt`` into two disjoint halves each holding a constant share.

    Requires every element's clause-star value to be at most f*(opt)/alpha;
    then both returned halves carry at least ((alpha-1)/(2*alpha)) * f*(opt),
    where f* is the clause achieving v(opt).  Elements are consumed in id
    order, so the construction is deterministic.
    """
    alpha = mpq(alpha)
    if alpha <= 1:
        raise InputError("alpha must exceed 1")
    opt = frozenset(opt)
    star = valuation.best_clause(opt)
    total = valuation.clause_value(star, opt)
    cap = total / alpha
    for e in sorted(opt):
        if valuation.functions[star][e] > cap:
            raise InputError(
                f"element {e!r} violates the partition precondition "
                f"(clause value exceeds f*(opt)/alpha)"
            )
    bound = (alpha - 1) / (2 * alpha) * total
    s1 = set()
    s1_value = ZERO
    remaining = sorted(opt)
    while remaining and s1_value < bound:
        e = remaining.pop(0)
        s1.add(e)
        s1_value += valuation.functions[star][e]
    return frozenset(s1), frozenset(remaining)


def _split_with_rng(rng, ground):
    t1, t2 = set(), set()
    for e in sorted(ground):
        (t1 if rng.getrandbits(1) else t2).add(e)
    return frozenset(t1), frozenset(t2)


def random_split(ground, seed):
    """Independent fair-coin split of ``ground``; deterministic given ``seed``."""
    return _split_with_rng(random.Random(seed), ground)


@dataclass(frozen=True)
class XosOutcome:
    """Realized run of the sampling mechanism under one fixed coin tape."""

    branch: str  # "max-element", "sub-mechanism", or "empty"
    allocation: frozenset
    payments: dict
    budget: object
    t1: frozenset
    t2: frozenset
    threshold: Optional[object]
    s_star: Optional[frozenset]
    clause_index: Optional[int]
    inner: Optional[Outcome]

    def payment(self, e):
        return self.payments.get(e, ZERO)

    @property
    def total_payment(self):
        total = ZERO
        for p in self.payments.values():
            total += p
        return total


def _additive_subset_sums(ids, values):
    sums = [ZERO] * (1 << len(ids))
    for mask in range(1, 1 << len(ids)):
        low = mask & (-mask)
        sums[mask] = sums[mask ^ low] + values[low.bit_length() - 1]
    return sums


def _opt_value_under_budget(valuation, ids, bids, budget):
    """max v(S) over S within ``ids`` with bid total at most ``budget``."""
    if not ids:
        return ZERO
    cost = _additive_subset_sums(ids, [bids[e] for e in ids])
    clause_sums = [
        _additive_subset_sums(ids, [valuation.functions[k][e] for e in ids])
        for k in range(valuation.num_clauses)
    ]
    best = ZERO
    for mask in range(1 << len(ids)):
        if cost[mask] > budget:
            continue
        v = max(sums[mask] for sums in clause_sums)
        if v > best:
            best = v
    return best


def _argmax_surplus(valuation, ids, bids, threshold):
    """argmax over subsets of ``ids`` of v(S) - threshold * bids(S).

    Ties: smaller bid total, then lexicographically smallest id set.  The
    empty set (objective 0, cost 0) is always a candidate.
    """
    cost = _additive_subset_sums(ids, [bids[e] for e in ids])
    clause_sums = [
        _additive_subset_sums(ids, [valuation.functions[k][e] for e in ids])
        for k in range(valuation.num_clauses)
    ]
    best_mask, best_obj, best_cost = 0, ZERO, ZERO
    best_ids = ()
    for mask in range(1, 1 << len(ids)):
        v = max(sums[mask] for sums in clause_sums)
        obj = v - threshold * cost[mask]
        if obj < best_obj:
            continue
        mask_ids = tuple(ids[j] for j in range(len(ids)) if mask >> j & 1)
        if (
            obj > best_obj
            or cost[mask] < best_cost
            or (cost[mask] == best_cost and mask_ids < best_ids)
        ):
            best_mask, best_obj, best_cost, best_ids = mask, obj, cost[mask], mask_ids
    return frozenset(best_ids)


def xos_mechanism_main(valuation, true_costs, bids, budget, params, cap=XOS_ENUMERATION_CAP):
    """One seeded run of the random-sampling XOS mechanism.

    Coin tape: the first bit decides between buying the single most valuable
    element at the full budget and running the sampling pipeline; then one
    bit per element (id order) splits the ground set into T1/T2.  T1 is only
    used to calibrate the surplus threshold; the buyer then takes the best
    thresholded subset of T2 and hands it to the additive sub-mechanism
    (the matroid mechanism on a free matroid) under the clause achieving its
    value.  The mechanism reads declared bids, never true costs.
    """
    ground = tuple(valuation.ground)
    n = len(ground)
    if n == 0:
        raise InputError("mechanism needs a nonempty ground set")
    if n > cap:
        raise CapExceeded(
            f"XOS mechanism enumerates subsets exhaustively; reduce n to at most {cap}"
        )
    budget = mpq(budget)
    bids = {e: mpq(bids[e]) for e in ground}
    true_costs = {e: mpq(true_costs[e]) for e in ground}
    for e in ground:
        if bids[e] > budget or bids[e] <= 0:
            raise InputError(f"bid of {e!r} must lie in (0, budget]")

    rng = random.Random(params.seed)
    take_max_element = bool(rng.getrandbits(1))
    t1, t2 = _split_with_rng(rng, ground)

    if take_max_element:
        star = min(ground, key=lambda e: (-valuation.value(frozenset([e])), e))
        return XosOutcome(
            branch="max-element",
            allocation=frozenset([star]),
            payments={star: budget},
            budget=budget,
            t1=frozenset(),
            t2=frozenset(),
            threshold=None,
            s_star=None,
            clause_index=None,
            inner=None,
        )

    t1_ids = sorted(t1)
    t2_ids = sorted(t2)
    opt_t1_value = _opt_value_under_budget(valuation, t1_ids, bids, budget)
    threshold = opt_t1_value / (params.beta * budget)
    s_star = _argmax_surplus(valuation, t2_ids, bids, threshold)
    clause_index = valuation.best_clause(s_star) if s_star else None

    if not s_star:
        return XosOutcome(
            branch="empty",
            allocation=frozenset(),
            payments={},
            budget=budget,
            t1=t1,
            t2=t2,
            threshold=threshold,
            s_star=s_star,
            clause_index=clause_index,
            inner=None,
        )

    clause = valuation.functions[clause_index]
    # elements the chosen clause values at zero can never receive an
    # individually rational proportional payment; they are left out
    positive = sorted(e for e in s_star if clause[e] > 0)
    if not positive:
        return XosOutcome(
            branch="empty",
            allocation=frozenset(),
            payments={},
            budget=budget,
            t1=t1,
            t2=t2,
            threshold=threshold,
            s_star=s_star,
            clause_index=clause_index,
            inner=None,
        )

    sub_instance = Instance(
        FreeMatroid(positive),
        {e: clause[e] for e in positive},
        {e: true_costs[e] for e in positive},
        {e: bids[e] for e in positive},
        budget,
    )
    inner = run_matroid_mechanism(sub_instance)
    return XosOutcome(
        branch="sub-mechanism",
        allocation=inner.allocation,
        payments=dict(inner.payments),
        budget=budget,
        t1=t1,
        t2=t2,
        threshold=threshold,
        s_star=s_star,
        clause_index=clause_index,
        inner=inner,
    )


def xos_objective(alpha, beta, gamma):
    """Worst-case guarantee of the sampling mechanism as a function of its knobs.

    The three branches are the heavy-single-element case and the two
    threshold cases; gamma is the sub-mechanism's approximation factor.
    """
    alpha, beta, gamma = mpq(alpha), mpq(beta), mpq(gamma)
    a = 1 / (2 * alpha)
    b = (alpha - 1) / (32 * gamma * alpha * beta)
    c = (alpha * beta - beta - 4 * alpha) / (16 * gamma * alpha * beta)
    return min(a, b, c)


def optimize_constant(gamma):
    """Best (alpha, beta) for the sampling mechanism and the resulting ratio.

    Closed form: the three objective branches are monotone in opposite
    directions, so the optimum equalizes them; that reduces to one quadratic
    in alpha.  Returns exact rationals close to the (irrational) optimum and
    the reciprocal of the objective evaluated exactly at that point.
    """
    gamma = mpq(gamma)
    if gamma < 1:
        raise InputError("gamma must be at least 1")
    trace_coeff = 2 + 72 * gamma
    constant = 8 * gamma + 1
    disc = trace_coeff * trace_coeff - 4 * constant
    alpha = (trace_coeff + rational_isqrt(disc)) / 2
    beta = (alpha - 1) / (16 * gamma)
    ratio = 1 / xos_objective(alpha, beta, gamma)
    return alpha, beta, ratio
