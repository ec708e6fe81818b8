"""Property-verification harness: mechanism guarantees as executable checks.

Every check compares a mechanism run against an independent brute-force
oracle or an exact inequality, on deterministic seeded instance streams.
Failures carry a replayable instance document so any violation can be
reproduced from the report file alone.
"""

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import InputError
from .instance_io import instance_to_json, load_instance, xos_instance_to_json
from .intersection import (
    IntersectionSpec,
    PartitionMatroid,
    get_blackbox,
    memoized_blackbox,
)
from .matroids import (
    DeadlineMatroid,
    FreeMatroid,
    GraphicMatroid,
    UniformMatroid,
    max_weight_independent_set,
    set_weight,
)
from .mechanisms import (
    Instance,
    first_price_greedy,
    run_intersection_mechanism,
    run_matroid_mechanism,
    utility,
)
from .oracle import brute_force_opt
from .rationals import ZERO, format_rational, mpq, parse_rational
from .xos import XosParams, XosValuation, xos_mechanism_main

EPSILON = mpq(1, 10**9)

PROPERTIES = (
    "Independence",
    "IR",
    "BudgetFeasible",
    "Truthful",
    "ApproxRatio",
    "Lemma1Bound",
    "BidIndependence",
)

MECHANISM_NAMES = (
    "matroid",
    "intersection-exact",
    "intersection-greedy",
    "broken-first-price",
)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Failure:
    property: str
    mechanism: str
    instance: dict
    element: str = None
    deviation: str = None
    observed: str = ""
    required: str = ""

    def to_json(self):
        return {
            "property": self.property,
            "mechanism": self.mechanism,
            "instance": self.instance,
            "element": self.element,
            "deviation": self.deviation,
            "observed": self.observed,
            "required": self.required,
        }

    @staticmethod
    def from_json(doc):
        return Failure(
            property=doc["property"],
            mechanism=doc["mechanism"],
            instance=doc["instance"],
            element=doc.get("element"),
            deviation=doc.get("deviation"),
            observed=doc.get("observed", ""),
            required=doc.get("required", ""),
        )


@dataclass
class VerificationReport:
    property: str
    mechanism: str
    instances_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def merge(self, other):
        self.instances_checked += other.instances_checked
        self.failures.extend(other.failures)

    def to_json(self):
        return {
            "property": self.property,
            "mechanism": self.mechanism,
            "instances_checked": self.instances_checked,
            "failures": [f.to_json() for f in self.failures],
        }


# ---------------------------------------------------------------------------
# instance generation (pure functions of (seed, stream, index))


@dataclass(frozen=True)
class GeneratorConfig:
    count: int
    seed: int = 0
    n_range: tuple = (3, 12)
    kinds: tuple = ("uniform", "partition", "graphic", "deadline")
    weight_dist: str = "uniform"  # uniform | heavy
    budget_regime: str = "mixed"  # tight | loose | mixed


def _rng(seed, stream, index):
    return random.Random(f"{seed}:{stream}:{index}")


def _draw_weight(rng, dist):
    if dist == "heavy":
        return mpq(min(int(rng.paretovariate(1.1)), 60))
    return mpq(rng.randint(1, 20))


def _draw_budget(rng, regime, index, costs):
    total = sum(int(c) for c in costs.values())
    biggest = max(int(c) for c in costs.values())
    if regime == "mixed":
        regime = "tight" if index % 2 == 0 else "loose"
    if regime == "tight":
        return mpq(max(biggest, (total + 3) // 4))
    return mpq(total)


def _element_ids(n):
    return [f"e{j:02d}" for j in range(1, n + 1)]


def _make_matroid(rng, kind, ids):
    n = len(ids)
    if kind == "uniform":
        return UniformMatroid(ids, rng.randint(1, n))
    if kind == "free":
        return FreeMatroid(ids)
    if kind == "partition":
        pool = list(ids)
        rng.shuffle(pool)
        blocks = []
        while pool:
            size = min(len(pool), rng.randint(1, 3))
            members, pool = pool[:size], pool[size:]
            blocks.append((frozenset(members), rng.randint(1, size)))
        return PartitionMatroid(ids, blocks)
    if kind == "graphic":
        nv = max(2, math.ceil(0.7 * n))
        edges = []
        for e in ids:
            u = rng.randrange(nv)
            v = rng.randrange(nv - 1)
            if v >= u:
                v += 1
            edges.append((e, f"v{u}", f"v{v}"))
        return GraphicMatroid(edges)
    if kind == "deadline":
        return DeadlineMatroid(ids, {e: rng.randint(1, n) for e in ids})
    raise InputError(f"unknown matroid kind {kind!r}")


def gen_matroid_instance(config, index):
    """Deterministic matroid instance number ``index`` of the stream."""
    rng = _rng(config.seed, "matroid", index)
    n = rng.randint(*config.n_range)
    ids = _element_ids(n)
    kind = config.kinds[index % len(config.kinds)]
    matroid = _make_matroid(rng, kind, ids)
    weights = {e: _draw_weight(rng, config.weight_dist) for e in ids}
    costs = {e: mpq(rng.randint(1, 10)) for e in ids}
    budget = _draw_budget(rng, config.budget_regime, index, costs)
    return Instance(matroid, weights, costs, dict(costs), budget)


def gen_bipartite_instance(config, index):
    """Bipartite-matching instance: edges constrained by two capacity-1
    partition matroids (left endpoints, right endpoints)."""
    rng = _rng(config.seed, "bipartite", index)
    n = rng.randint(*config.n_range)
    ids = _element_ids(n)
    nl = max(1, round(math.sqrt(n)))
    nr = max(2, round(math.sqrt(n)) + 1)
    left, right = {}, {}
    for e in ids:
        left[e] = rng.randrange(nl)
        right[e] = rng.randrange(nr)
    by_left, by_right = {}, {}
    for e in ids:
        by_left.setdefault(left[e], set()).add(e)
        by_right.setdefault(right[e], set()).add(e)
    m_left = PartitionMatroid(ids, [(s, 1) for s in by_left.values()])
    m_right = PartitionMatroid(ids, [(s, 1) for s in by_right.values()])
    spec = IntersectionSpec([m_left, m_right])
    weights = {e: _draw_weight(rng, config.weight_dist) for e in ids}
    costs = {e: mpq(rng.randint(1, 10)) for e in ids}
    budget = _draw_budget(rng, config.budget_regime, index, costs)
    return Instance(spec, weights, costs, dict(costs), budget)


def gen_xos_instance(seed, index, n=10, m_choices=(2, 3, 4), weight_range=(10, 20),
                     cost_range=(1, 10), budget=60):
    """Deterministic XOS instance: clause weights and costs are uniform
    integers, budget fixed.  Returns (valuation, costs, budget)."""
    rng = _rng(seed, "xos", index)
    ids = _element_ids(n)
    m = m_choices[index % len(m_choices)]
    functions = [
        {e: mpq(rng.randint(*weight_range)) for e in ids} for _ in range(m)
    ]
    valuation = XosValuation(ids, functions)
    costs = {e: mpq(rng.randint(*cost_range)) for e in ids}
    return valuation, costs, mpq(budget)


# ---------------------------------------------------------------------------
# mechanism runners


def make_runner(name, inst):
    """Closure running mechanism ``name`` on variations of ``inst``.

    The closure may be called with bid-deviated copies of the same instance;
    candidate-set computations are memoized per surviving ground set, which
    is sound because they read weights only.
    """
    if name == "matroid":
        cache = {}
        return lambda i: run_matroid_mechanism(i, cache)
    if name == "intersection-exact":
        blackbox = memoized_blackbox(get_blackbox("exact-bipartite", inst.structure))
        return lambda i: run_intersection_mechanism(i, blackbox)
    if name == "intersection-greedy":
        blackbox = memoized_blackbox(get_blackbox("greedy", inst.structure))
        return lambda i: run_intersection_mechanism(i, blackbox)
    if name == "broken-first-price":
        return first_price_greedy
    raise InputError(f"unknown mechanism {name!r}")


def ratio_denominator(name, inst):
    if name == "matroid":
        return mpq(4)
    if name == "intersection-exact":
        return mpq(4)  # 3 * 1 + 1
    if name == "intersection-greedy":
        return 3 * mpq(inst.structure.k) + 1  # 3 * alpha + 1 with alpha = k
    raise InputError(f"no certified ratio for mechanism {name!r}")


# ---------------------------------------------------------------------------
# property checks


def check_outcome_invariants(inst, outcome, mechanism, doc=None):
    """Independence, IR and exact budget feasibility of one outcome."""
    doc = doc or instance_to_json(inst)
    failures = []
    if not set(outcome.payments) <= set(outcome.allocation):
        failures.append(
            Failure("IR", mechanism, doc, observed="payment to unallocated element",
                    required="p_e = 0 whenever f_e = 0")
        )
    if not inst.structure.is_independent(outcome.allocation):
        failures.append(
            Failure("Independence", mechanism, doc,
                    observed=f"allocation {sorted(outcome.allocation)} dependent",
                    required="allocated set independent in every matroid")
        )
    for e in sorted(outcome.allocation):
        if outcome.payment(e) < inst.bids[e]:
            failures.append(
                Failure("IR", mechanism, doc, element=e,
                        observed=format_rational(outcome.payment(e)),
                        required=f">= bid {format_rational(inst.bids[e])}")
            )
    if outcome.total_payment > inst.budget:
        failures.append(
            Failure("BudgetFeasible", mechanism, doc,
                    observed=format_rational(outcome.total_payment),
                    required=f"<= budget {format_rational(inst.budget)}")
        )
    return failures


def truthful_deviation_bids(inst, e, truthful_outcome, rng, min_count):
    """Deviation bids for element ``e``: boundary probes plus uniform randoms.

    Boundary probes sit just above/below every other element's buck-per-bang
    breakpoint (scaled to e's weight) and at the truthful run's final rate
    times e's weight; threshold mechanisms hide violations exactly there.
    """
    budget = inst.budget
    w_e = inst.weights[e]
    probes = set()

    def add(d):
        if 0 < d <= budget:
            probes.add(d)

    for o in inst.structure.ground:
        if o == e:
            continue
        breakpoint = inst.buck_per_bang(o) * w_e
        add(breakpoint - EPSILON)
        add(breakpoint)
        add(breakpoint + EPSILON)
    if truthful_outcome is not None and truthful_outcome.final_rate is not None:
        at_rate = truthful_outcome.final_rate * w_e
        add(at_rate - EPSILON)
        add(at_rate)
        add(at_rate + EPSILON)
    add(budget)
    while len(probes) < min_count:
        add(budget * mpq(rng.randint(1, 10**6), 10**6))
    return sorted(probes)


def check_truthfulness(runner, inst, deviations_per_element=50, seed=0,
                       mechanism="matroid"):
    """No unilateral bid deviation may strictly improve an element's utility.

    The instance is evaluated at truthful bids first; every deviation re-runs
    the full mechanism with one bid changed and compares exact utilities.
    """
    report = VerificationReport("Truthful", mechanism, instances_checked=1)
    t_inst = inst.truthful()
    doc = instance_to_json(t_inst)
    truthful_outcome = runner(t_inst)
    rng = random.Random(f"dev:{seed}")
    for e in t_inst.structure.ground:
        u_truth = utility(t_inst, truthful_outcome, e)
        for d in truthful_deviation_bids(t_inst, e, truthful_outcome, rng,
                                         deviations_per_element):
            if d == t_inst.bids[e]:
                continue
            deviated = t_inst.with_bid(e, d)
            u_dev = utility(deviated, runner(deviated), e)
            if u_dev > u_truth:
                report.failures.append(
                    Failure("Truthful", mechanism, doc, element=e,
                            deviation=format_rational(d),
                            observed=format_rational(u_dev),
                            required=f"<= truthful utility {format_rational(u_truth)}")
                )
    return report


def check_ratio(runner, inst, denominator, mechanism="matroid"):
    """w(allocation) >= w(OPT) / denominator at truthful bids, OPT by oracle."""
    report = VerificationReport("ApproxRatio", mechanism, instances_checked=1)
    t_inst = inst.truthful()
    outcome = runner(t_inst)
    alloc_value = set_weight(t_inst.weights, outcome.allocation)
    opt = brute_force_opt(t_inst.structure, t_inst.weights, t_inst.true_costs,
                          t_inst.budget)
    opt_value = set_weight(t_inst.weights, opt)
    if alloc_value * denominator < opt_value:
        report.failures.append(
            Failure("ApproxRatio", mechanism, instance_to_json(t_inst),
                    observed=f"alloc {format_rational(alloc_value)} vs "
                             f"opt {format_rational(opt_value)}",
                    required=f"alloc >= opt / {format_rational(denominator)}")
        )
    return report


def check_lemma1(inst, outcome, mechanism="matroid"):
    """Trace-level bound: opt without tau <= 2 * final surviving max + w_tau."""
    report = VerificationReport("Lemma1Bound", mechanism, instances_checked=1)
    tau = outcome.tau
    final_value = outcome.trace[-1].value
    rest = inst.structure.delete({tau})
    if rest.ground:
        opt = brute_force_opt(rest, inst.weights, inst.bids, inst.budget)
        opt_value = set_weight(inst.weights, opt)
    else:
        opt_value = ZERO
    if opt_value > 2 * final_value + inst.weights[tau]:
        report.failures.append(
            Failure("Lemma1Bound", mechanism, instance_to_json(inst),
                    observed=format_rational(opt_value),
                    required=f"<= 2*{format_rational(final_value)} + w_tau")
        )
    return report


def check_bid_independence(inst, outcome, mechanism="matroid"):
    """Each trace step's candidate set must be recomputable from weights and
    the removal set alone (no bid can leak into the selection)."""
    report = VerificationReport("BidIndependence", mechanism, instances_checked=1)
    if mechanism == "matroid":
        select = lambda sub: max_weight_independent_set(sub, inst.weights)
    elif mechanism == "intersection-exact":
        select = lambda sub: get_blackbox("exact-bipartite", inst.structure)(sub, inst.weights)
    elif mechanism == "intersection-greedy":
        select = lambda sub: get_blackbox("greedy", inst.structure)(sub, inst.weights)
    else:
        return report
    removed = set()
    for step in outcome.trace:
        surviving = inst.structure.delete(removed | {outcome.tau})
        expected = tuple(sorted(select(surviving)))
        if expected != step.chosen:
            report.failures.append(
                Failure("BidIndependence", mechanism, instance_to_json(inst),
                        observed=f"iteration {step.iteration}: {list(step.chosen)}",
                        required=f"weight-only recomputation gives {list(expected)}")
            )
            break
        if step.removed is not None:
            removed.add(step.removed)
    return report


# ---------------------------------------------------------------------------
# XOS checks


def xos_utility(outcome, costs, e):
    p = outcome.payment(e)
    if e in outcome.allocation:
        return p - costs[e]
    return p


def _xos_failure_doc(valuation, costs, bids, budget, params):
    doc = xos_instance_to_json(valuation, costs, bids, budget)
    doc["xos"]["run"] = {
        "seed": params.seed,
        "alpha": format_rational(params.alpha),
        "beta": format_rational(params.beta),
        "gamma": format_rational(params.gamma),
    }
    return doc


def check_xos_outcome(valuation, costs, bids, budget, outcome, params, mechanism="xos"):
    """Budget feasibility and IR (against bids) of one realized XOS run."""
    doc = _xos_failure_doc(valuation, costs, bids, budget, params)
    failures = []
    if outcome.total_payment > budget:
        failures.append(
            Failure("BudgetFeasible", mechanism, doc,
                    observed=format_rational(outcome.total_payment),
                    required=f"<= budget {format_rational(budget)}")
        )
    for e in sorted(outcome.allocation):
        if outcome.payment(e) < bids[e]:
            failures.append(
                Failure("IR", mechanism, doc, element=e,
                        observed=format_rational(outcome.payment(e)),
                        required=f">= bid {format_rational(bids[e])}")
            )
    if not set(outcome.payments) <= set(outcome.allocation):
        failures.append(
            Failure("IR", mechanism, doc, observed="payment to unallocated element",
                    required="p_e = 0 whenever f_e = 0")
        )
    return failures


def _xos_membership_breakpoint(valuation, t2_ids, bids, threshold, e):
    """Bid level where ``e`` leaves the surplus argmax, if the threshold is
    positive: above it the argmax excludes e, below it the argmax keeps e."""
    if threshold <= 0 or e not in t2_ids:
        return None
    ids = sorted(t2_ids)
    best_in, best_out = None, ZERO  # empty set is an "out" candidate
    for mask in range(1, 1 << len(ids)):
        members = [ids[j] for j in range(len(ids)) if mask >> j & 1]
        value = valuation.value(frozenset(members))
        cost_rest = sum((bids[o] for o in members if o != e), ZERO)
        obj_rest = value - threshold * cost_rest
        if e in members:
            if best_in is None or obj_rest > best_in:
                best_in = obj_rest
        else:
            obj = value - threshold * sum((bids[o] for o in members), ZERO)
            if obj > best_out:
                best_out = obj
    if best_in is None:
        return None
    return (best_in - best_out) / threshold


def check_xos_truthfulness(valuation, costs, budget, params,
                           deviations_per_element=20, seed=0):
    """Fixed-seed truthfulness: re-runs the whole pipeline per deviation.

    The threshold and the surplus argmax both depend on bids, so nothing
    short of a full replay is sound.  Probes include each element's
    argmax-membership breakpoint, the inner proportional rate, and randoms.
    """
    report = VerificationReport("Truthful", "xos", instances_checked=1)
    doc = _xos_failure_doc(valuation, costs, costs, budget, params)
    truthful = xos_mechanism_main(valuation, costs, costs, budget, params)
    rng = random.Random(f"xosdev:{seed}:{params.seed}")
    for e in valuation.ground:
        u_truth = xos_utility(truthful, costs, e)
        probes = set()

        def add(d):
            if 0 < d <= budget:
                probes.add(d)

        add(budget)
        add(costs[e] - EPSILON)
        add(costs[e] + EPSILON)
        if truthful.branch != "max-element":
            bp = _xos_membership_breakpoint(
                valuation, truthful.t2, costs, truthful.threshold, e
            )
            if bp is not None:
                add(bp - EPSILON)
                add(bp)
                add(bp + EPSILON)
        if truthful.inner is not None and truthful.inner.final_rate is not None \
                and e in truthful.s_star:
            clause = valuation.functions[truthful.clause_index]
            add(truthful.inner.final_rate * clause[e])
        while len(probes) < deviations_per_element:
            add(budget * mpq(rng.randint(1, 10**6), 10**6))
        for d in sorted(probes):
            if d == costs[e]:
                continue
            bids = dict(costs)
            bids[e] = d
            deviated = xos_mechanism_main(valuation, costs, bids, budget, params)
            u_dev = xos_utility(deviated, costs, e)
            if u_dev > u_truth:
                report.failures.append(
                    Failure("Truthful", "xos", doc, element=e,
                            deviation=format_rational(d),
                            observed=format_rational(u_dev),
                            required=f"<= truthful utility {format_rational(u_truth)}")
                )
    return report


# ---------------------------------------------------------------------------
# verification driver (CLI `verify`)

DEFAULT_VERIFY_CONFIG = {
    "seed": 0,
    "count": 40,
    "n_range": [3, 9],
    "kinds": ["uniform", "partition", "graphic", "deadline"],
    "weight_dist": "uniform",
    "budget_regime": "mixed",
    "deviations_per_element": 12,
    "mechanisms": ["matroid", "intersection-exact", "intersection-greedy"],
    "include_broken": False,
    "threads": 1,
}


def _validate_verify_config(doc):
    from .errors import SchemaError

    if not isinstance(doc, dict):
        raise SchemaError("config", "must be a JSON object")
    cfg = dict(DEFAULT_VERIFY_CONFIG)
    cfg.update(doc)
    if not isinstance(cfg["count"], int) or cfg["count"] < 0:
        raise SchemaError("count", "must be a nonnegative integer")
    if (
        not isinstance(cfg["n_range"], (list, tuple))
        or len(cfg["n_range"]) != 2
        or not all(isinstance(v, int) and v >= 1 for v in cfg["n_range"])
        or cfg["n_range"][0] > cfg["n_range"][1]
    ):
        raise SchemaError("n_range", "must be [lo, hi] with 1 <= lo <= hi")
    for m in cfg["mechanisms"]:
        if m not in ("matroid", "intersection-exact", "intersection-greedy"):
            raise SchemaError("mechanisms", f"unknown mechanism {m!r}")
    for k in cfg["kinds"]:
        if k not in ("uniform", "partition", "graphic", "deadline", "free"):
            raise SchemaError("kinds", f"unknown matroid kind {k!r}")
    if cfg["weight_dist"] not in ("uniform", "heavy"):
        raise SchemaError("weight_dist", "must be 'uniform' or 'heavy'")
    if cfg["budget_regime"] not in ("tight", "loose", "mixed"):
        raise SchemaError("budget_regime", "must be tight, loose or mixed")
    if not isinstance(cfg["include_broken"], bool):
        raise SchemaError("include_broken", "must be a boolean")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise SchemaError("threads", "must be a positive integer")
    if not isinstance(cfg["deviations_per_element"], int) or cfg["deviations_per_element"] < 1:
        raise SchemaError("deviations_per_element", "must be a positive integer")
    return cfg


def _verify_one(cfg, mechanism, index):
    """All configured property reports for one (mechanism, instance) pair."""
    gconf = GeneratorConfig(
        count=cfg["count"],
        seed=cfg["seed"],
        n_range=tuple(cfg["n_range"]),
        kinds=tuple(cfg["kinds"]),
        weight_dist=cfg["weight_dist"],
        budget_regime=cfg["budget_regime"],
    )
    if mechanism == "matroid" or mechanism == "broken-first-price":
        inst = gen_matroid_instance(gconf, index)
    else:
        inst = gen_bipartite_instance(gconf, index)
    runner = make_runner(mechanism, inst)
    outcome = runner(inst)

    reports = {p: VerificationReport(p, mechanism) for p in PROPERTIES}
    for p in ("Independence", "IR", "BudgetFeasible"):
        reports[p].instances_checked = 1
    for f in check_outcome_invariants(inst, outcome, mechanism):
        reports[f.property].failures.append(f)

    reports["Truthful"].merge(
        check_truthfulness(runner, inst, cfg["deviations_per_element"],
                           seed=cfg["seed"] * 7919 + index, mechanism=mechanism)
    )
    if mechanism != "broken-first-price":
        reports["ApproxRatio"].merge(
            check_ratio(runner, inst, ratio_denominator(mechanism, inst), mechanism)
        )
        reports["BidIndependence"].merge(
            check_bid_independence(inst, outcome, mechanism)
        )
    if mechanism == "matroid":
        reports["Lemma1Bound"].merge(check_lemma1(inst, outcome, mechanism))
    return [r.to_json() for r in reports.values() if r.instances_checked]


def _verify_chunk(cfg, mechanism, indices):
    out = []
    for index in indices:
        out.append(_verify_one(cfg, mechanism, index))
    return out


def run_verification(config_doc):
    """Run the configured suites; returns (reports, total_failures)."""
    cfg = _validate_verify_config(config_doc)
    mechanisms = list(cfg["mechanisms"])
    if cfg["include_broken"]:
        mechanisms.append("broken-first-price")

    merged = {}

    def absorb(report_doc):
        key = (report_doc["property"], report_doc["mechanism"])
        if key not in merged:
            merged[key] = VerificationReport(*key)
        merged[key].instances_checked += report_doc["instances_checked"]
        merged[key].failures.extend(
            Failure.from_json(f) for f in report_doc["failures"]
        )

    for mechanism in mechanisms:
        indices = list(range(cfg["count"]))
        if cfg["threads"] > 1 and len(indices) > 1:
            chunk = max(1, len(indices) // (cfg["threads"] * 4))
            chunks = [indices[i:i + chunk] for i in range(0, len(indices), chunk)]
            with ProcessPoolExecutor(max_workers=cfg["threads"]) as pool:
                for result in pool.map(_verify_chunk, [cfg] * len(chunks),
                                       [mechanism] * len(chunks), chunks):
                    for docs in result:
                        for doc in docs:
                            absorb(doc)
        else:
            for docs in _verify_chunk(cfg, mechanism, indices):
                for doc in docs:
                    absorb(doc)

    reports = [merged[k] for k in sorted(merged)]
    total_failures = sum(len(r.failures) for r in reports)
    return reports, total_failures


# ---------------------------------------------------------------------------
# replay


def replay_failure(doc):
    """Re-derive a reported failure from its serialized instance.

    Returns True when the recorded violation reproduces exactly.
    """
    loaded = load_instance(doc["instance"])
    mechanism = doc["mechanism"]
    prop = doc["property"]

    if mechanism == "xos":
        return _replay_xos(doc, loaded)

    inst = loaded.mechanism_instance()
    runner = make_runner(mechanism, inst)
    if prop == "Truthful":
        t_inst = inst.truthful()
        truthful_outcome = runner(t_inst)
        e = doc["element"]
        d = parse_rational(doc["deviation"])
        deviated = t_inst.with_bid(e, d)
        u_truth = utility(t_inst, truthful_outcome, e)
        u_dev = utility(deviated, runner(deviated), e)
        return u_dev > u_truth
    if prop in ("Independence", "IR", "BudgetFeasible"):
        outcome = runner(inst)
        failures = check_outcome_invariants(inst, outcome, mechanism)
        return any(f.property == prop for f in failures)
    if prop == "ApproxRatio":
        return not check_ratio(runner, inst, ratio_denominator(mechanism, inst),
                               mechanism).passed
    if prop == "Lemma1Bound":
        return not check_lemma1(inst, runner(inst), mechanism).passed
    if prop == "BidIndependence":
        return not check_bid_independence(inst, runner(inst), mechanism).passed
    raise InputError(f"cannot replay property {prop!r}")


def _replay_xos(doc, loaded):
    run = doc["instance"].get("xos", {}).get("run")
    if run is None:
        raise InputError("XOS failure record is missing its run parameters")
    params = XosParams(
        alpha=parse_rational(run["alpha"]),
        beta=parse_rational(run["beta"]),
        gamma=parse_rational(run["gamma"]),
        seed=run["seed"],
    )
    valuation, costs, bids, budget = loaded.xos, loaded.costs, loaded.bids, loaded.budget
    prop = doc["property"]
    if prop == "Truthful":
        truthful = xos_mechanism_main(valuation, costs, costs, budget, params)
        e = doc["element"]
        d = parse_rational(doc["deviation"])
        deviated_bids = dict(costs)
        deviated_bids[e] = d
        deviated = xos_mechanism_main(valuation, costs, deviated_bids, budget, params)
        return xos_utility(deviated, costs, e) > xos_utility(truthful, costs, e)
    if prop in ("IR", "BudgetFeasible"):
        outcome = xos_mechanism_main(valuation, costs, bids, budget, params)
        failures = check_xos_outcome(valuation, costs, bids, budget, outcome, params)
        return any(f.property == prop for f in failures)
    raise InputError(f"cannot replay XOS property {prop!r}")
