"""Budget-feasible procurement mechanisms with proportional payments.

Both mechanisms share one control flow: set aside the heaviest element tau,
walk the remaining elements in non-increasing buck-per-bang order removing
unaffordable prefixes, then either buy the surviving max-weight (or blackbox)
set at a uniform per-weight rate or buy tau alone at the full budget.

The per-iteration rate refresh (r = bb of the element currently considered)
is deliberate: it is what makes the removal loop terminate and is the form
the truthfulness argument needs.  Bids enter only through the buck-per-bang
order and the budget test; the candidate sets themselves are computed from
public weights alone.
"""

from dataclasses import dataclass
from typing import Optional

from .errors import InputError
from .intersection import IntersectionSpec
from .matroids import Matroid, max_weight_independent_set, set_weight
from .rationals import ZERO, mpq


class Instance:
    """Ground elements with public weights, private costs, declared bids, budget."""

    def __init__(self, structure, weights, true_costs, bids, budget):
        if not isinstance(structure, (Matroid, IntersectionSpec)):
            raise InputError("structure must be a Matroid or an IntersectionSpec")
        ground = set(structure.ground)
        if not ground:
            raise InputError("instance needs a nonempty ground set")
        self.structure = structure
        self.budget = mpq(budget)
        if self.budget <= 0:
            raise InputError("budget must be positive")
        self.weights = {e: mpq(v) for e, v in weights.items()}
        self.true_costs = {e: mpq(v) for e, v in true_costs.items()}
        self.bids = {e: mpq(v) for e, v in bids.items()}
        for name, vec in (
            ("weights", self.weights),
            ("true_costs", self.true_costs),
            ("bids", self.bids),
        ):
            if set(vec) != ground:
                raise InputError(f"{name} must cover exactly the ground set")
            for e, v in vec.items():
                if v <= 0:
                    raise InputError(f"{name}[{e}] must be positive")
        # bids above the budget are rejected at the file-load boundary; the
        # in-memory type tolerates them so that above-budget declarations can
        # still be traced and tested (such elements can never be paid anyway)

    def buck_per_bang(self, e):
        return self.bids[e] / self.weights[e]

    def with_bid(self, e, bid):
        """Copy of the instance where element ``e`` declares ``bid``."""
        bids = dict(self.bids)
        bids[e] = mpq(bid)
        return Instance(self.structure, self.weights, self.true_costs, bids, self.budget)

    def truthful(self):
        """Copy where every element bids its true cost."""
        return Instance(
            self.structure, self.weights, self.true_costs, dict(self.true_costs), self.budget
        )

    @property
    def ground(self):
        return self.structure.ground


@dataclass(frozen=True)
class TraceStep:
    """One loop iteration: the rate tested, the set computed, the removal (if any).

    ``rate`` is None only on the exit iteration reached after every element
    has been removed (no candidate rate exists there).
    """

    iteration: int
    rate: Optional[object]
    removed: Optional[str]
    chosen: tuple
    value: object


@dataclass(frozen=True)
class Outcome:
    """Allocation plus payments; ``payments`` lists winners only (others pay 0)."""

    allocation: frozenset
    payments: dict
    tau: Optional[str]
    branch: str  # "set" or "tau"
    final_rate: Optional[object]  # None encodes +infinity
    trace: tuple
    budget: object

    def payment(self, e):
        return self.payments.get(e, ZERO)

    @property
    def total_payment(self):
        total = ZERO
        for p in self.payments.values():
            total += p
        return total

    def value(self, weights):
        return set_weight(weights, self.allocation)


def _pick_tau(ground, weights):
    # maximum weight, ties to the smallest element id
    return min(ground, key=lambda e: (-weights[e], e))


def _run_threshold_mechanism(inst, select):
    weights, bids, budget = inst.weights, inst.bids, inst.budget
    ground = list(inst.structure.ground)
    tau = _pick_tau(ground, weights)
    others = sorted(
        (e for e in ground if e != tau),
        key=lambda e: (-inst.buck_per_bang(e), e),
    )

    removed = set()
    trace = []
    i = 1
    while True:
        surviving = inst.structure.delete(removed | {tau})
        chosen = select(surviving)
        value = set_weight(weights, chosen)
        if i > len(others):
            trace.append(TraceStep(i, None, None, tuple(sorted(chosen)), value))
            break
        rate_i = inst.buck_per_bang(others[i - 1])
        if value * rate_i > budget:
            trace.append(
                TraceStep(i, rate_i, others[i - 1], tuple(sorted(chosen)), value)
            )
            removed.add(others[i - 1])
            i += 1
        else:
            trace.append(TraceStep(i, rate_i, None, tuple(sorted(chosen)), value))
            break

    bb_prev = None if i == 1 else inst.buck_per_bang(others[i - 2])  # None = +inf
    if value > 0:
        rate = budget / value if bb_prev is None else min(budget / value, bb_prev)
    else:
        rate = bb_prev

    if value > weights[tau]:
        payments = {e: rate * weights[e] for e in chosen}
        return Outcome(
            allocation=frozenset(chosen),
            payments=payments,
            tau=tau,
            branch="set",
            final_rate=rate,
            trace=tuple(trace),
            budget=budget,
        )
    return Outcome(
        allocation=frozenset([tau]),
        payments={tau: budget},
        tau=tau,
        branch="tau",
        final_rate=rate,
        trace=tuple(trace),
        budget=budget,
    )


def run_matroid_mechanism(inst, cache=None):
    """Budget-feasible mechanism for procuring an independent set of a matroid.

    ``cache`` optionally memoizes the greedy max-weight computation per
    surviving ground set (a pure speedup for repeated runs on one instance).
    """
    if not isinstance(inst.structure, Matroid):
        raise InputError("run_matroid_mechanism needs a single-matroid instance")

    def select(surviving):
        if cache is None:
            return max_weight_independent_set(surviving, inst.weights)
        key = surviving.ground
        if key not in cache:
            cache[key] = max_weight_independent_set(surviving, inst.weights)
        return cache[key]

    return _run_threshold_mechanism(inst, select)


def run_intersection_mechanism(inst, blackbox):
    """Same mechanism with the exact greedy step replaced by an APX blackbox."""
    if not isinstance(inst.structure, IntersectionSpec):
        raise InputError("run_intersection_mechanism needs an intersection instance")

    def select(surviving):
        return blackbox(surviving, inst.weights)

    return _run_threshold_mechanism(inst, select)


def utility(inst, outcome, e):
    """Quasi-linear utility: payment minus true cost if allocated, else payment."""
    if e not in inst.structure._ground_set:
        raise InputError(f"unknown element id {e!r}")
    p = outcome.payment(e)
    if e in outcome.allocation:
        return p - inst.true_costs[e]
    return p


def first_price_greedy(inst):
    """Deliberately manipulable control mechanism for harness sensitivity checks.

    Buys elements in cheapest buck-per-bang order while the budget lasts and
    pays each winner its own bid.  Individually rational, budget feasible and
    independent, but not truthful: a winner with slack in the budget gains by
    raising its bid.
    """
    order = sorted(inst.structure.ground, key=lambda e: (inst.buck_per_bang(e), e))
    chosen = set()
    spent = ZERO
    for e in order:
        if spent + inst.bids[e] > inst.budget:
            continue
        candidate = chosen | {e}
        if inst.structure.is_independent(candidate):
            chosen = candidate
            spent += inst.bids[e]
    return Outcome(
        allocation=frozenset(chosen),
        payments={e: inst.bids[e] for e in chosen},
        tau=None,
        branch="set",
        final_rate=None,
        trace=(),
        budget=inst.budget,
    )
