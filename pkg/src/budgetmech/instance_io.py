"""Loading, validating and serializing instance files and outcomes.

Wire format (JSON):

    {
      "matroid": {"kind": "uniform", "rank": 2} |
                 {"intersection": [matroid, matroid, ...]},
      "elements": [{"id": "a", "weight": 6, "cost": 3, "bid": "7/2"}, ...],
      "budget": 10,
      "xos": {"functions": [[per-element values], ...]}      // optional
    }

Rationals travel as integers or "p/q" strings; floats are rejected.  "bid"
defaults to "cost".  "matroid" may be omitted only when "xos" is present.
"""

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

from .errors import SchemaError
from .intersection import IntersectionSpec
from .matroids import matroid_from_json
from .mechanisms import Instance, Outcome
from .rationals import format_rational, parse_rational, to_decimal
from .xos import XosOutcome, XosValuation


@dataclass
class LoadedInstance:
    elements: tuple
    weights: dict
    costs: dict
    bids: dict
    budget: object
    structure: object  # Matroid | IntersectionSpec | None
    xos: Optional[XosValuation]
    raw: dict

    def mechanism_instance(self):
        if self.structure is None:
            raise SchemaError("matroid", "missing (required unless running the XOS mechanism)")
        return Instance(self.structure, self.weights, self.costs, self.bids, self.budget)


def _parse_rational_field(value, field, positive=True):
    try:
        q = parse_rational(value, field)
    except ValueError as exc:
        raise SchemaError(field, str(exc)) from exc
    if positive and q <= 0:
        raise SchemaError(field, "must be positive")
    return q


def load_instance(obj):
    """Validate a parsed instance document; raises SchemaError naming the field."""
    if not isinstance(obj, dict):
        raise SchemaError("document", "instance file must be a JSON object")
    if "elements" not in obj:
        raise SchemaError("elements", "missing")
    elements = obj["elements"]
    if not isinstance(elements, list) or not elements:
        raise SchemaError("elements", "must be a nonempty list")

    ids, weights, costs, bids = [], {}, {}, {}
    for idx, entry in enumerate(elements):
        if not isinstance(entry, dict) or "id" not in entry:
            raise SchemaError(f"elements[{idx}]", "must be an object with an 'id'")
        e = entry["id"]
        if not isinstance(e, str) or not e:
            raise SchemaError(f"elements[{idx}].id", "must be a nonempty string")
        if e in weights:
            raise SchemaError(f"elements[{idx}].id", f"duplicate id {e!r}")
        if "weight" not in entry:
            raise SchemaError(f"elements[{idx}].weight", "missing")
        if "cost" not in entry:
            raise SchemaError(f"elements[{idx}].cost", "missing")
        ids.append(e)
        weights[e] = _parse_rational_field(entry["weight"], f"elements[{idx}].weight")
        costs[e] = _parse_rational_field(entry["cost"], f"elements[{idx}].cost")
        bids[e] = (
            _parse_rational_field(entry["bid"], f"elements[{idx}].bid")
            if "bid" in entry
            else costs[e]
        )

    if "budget" not in obj:
        raise SchemaError("budget", "missing")
    budget = _parse_rational_field(obj["budget"], "budget")
    for e in ids:
        if bids[e] > budget:
            raise SchemaError("elements", f"bid of {e!r} exceeds the budget")
        if costs[e] > budget:
            raise SchemaError("elements", f"cost of {e!r} exceeds the budget")

    structure = None
    if "matroid" in obj and obj["matroid"] is not None:
        spec = obj["matroid"]
        try:
            if isinstance(spec, dict) and "intersection" in spec:
                structure = IntersectionSpec(
                    [matroid_from_json(m, ids) for m in spec["intersection"]]
                )
            else:
                structure = matroid_from_json(spec, ids)
        except Exception as exc:
            raise SchemaError("matroid", str(exc)) from exc
    elif "xos" not in obj:
        raise SchemaError("matroid", "missing (required unless 'xos' is present)")

    valuation = None
    if "xos" in obj and obj["xos"] is not None:
        xspec = obj["xos"]
        if not isinstance(xspec, dict) or "functions" not in xspec:
            raise SchemaError("xos.functions", "missing")
        functions = []
        for k, row in enumerate(xspec["functions"]):
            if not isinstance(row, list) or len(row) != len(ids):
                raise SchemaError(
                    f"xos.functions[{k}]", f"must list one value per element ({len(ids)})"
                )
            functions.append(
                {
                    e: _parse_rational_field(v, f"xos.functions[{k}][{j}]", positive=False)
                    for j, (e, v) in enumerate(zip(ids, row))
                }
            )
        try:
            valuation = XosValuation(ids, functions)
        except Exception as exc:
            raise SchemaError("xos", str(exc)) from exc

    return LoadedInstance(
        elements=tuple(ids),
        weights=weights,
        costs=costs,
        bids=bids,
        budget=budget,
        structure=structure,
        xos=valuation,
        raw=obj,
    )


def load_instance_file(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("document", f"invalid JSON: {exc}") from exc
    return load_instance(obj)


def instance_to_json(inst):
    """Canonical replayable document for a mechanism Instance."""
    return {
        "matroid": inst.structure.to_json(),
        "elements": [
            {
                "id": e,
                "weight": format_rational(inst.weights[e]),
                "cost": format_rational(inst.true_costs[e]),
                "bid": format_rational(inst.bids[e]),
            }
            for e in inst.structure.ground
        ],
        "budget": format_rational(inst.budget),
    }


def xos_instance_to_json(valuation, costs, bids, budget):
    ids = list(valuation.ground)
    return {
        "elements": [
            {
                "id": e,
                "weight": "1",
                "cost": format_rational(costs[e]),
                "bid": format_rational(bids[e]),
            }
            for e in ids
        ],
        "budget": format_rational(budget),
        "xos": {
            "functions": [
                [format_rational(f[e]) for e in ids] for f in valuation.functions
            ]
        },
    }


def instance_hash(doc):
    """Short stable identifier of a canonical instance document."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _rate_to_json(rate):
    return "inf" if rate is None else format_rational(rate)


def outcome_to_json(outcome, include_trace=False):
    doc = {
        "allocation": sorted(outcome.allocation),
        "payments": {e: format_rational(p) for e, p in sorted(outcome.payments.items())},
        "payments_decimal": {e: to_decimal(p) for e, p in sorted(outcome.payments.items())},
        "total_payment": format_rational(outcome.total_payment),
        "total_payment_decimal": to_decimal(outcome.total_payment),
        "budget": format_rational(outcome.budget),
    }
    if isinstance(outcome, Outcome):
        doc["branch"] = outcome.branch
        doc["tau"] = outcome.tau
        doc["final_rate"] = _rate_to_json(outcome.final_rate)
        if include_trace:
            doc["trace"] = [
                {
                    "iteration": step.iteration,
                    "rate": None if step.rate is None else format_rational(step.rate),
                    "removed": step.removed,
                    "set": list(step.chosen),
                    "value": format_rational(step.value),
                }
                for step in outcome.trace
            ]
    elif isinstance(outcome, XosOutcome):
        doc["branch"] = outcome.branch
        doc["t1"] = sorted(outcome.t1)
        doc["t2"] = sorted(outcome.t2)
        doc["threshold"] = (
            None if outcome.threshold is None else format_rational(outcome.threshold)
        )
        doc["s_star"] = None if outcome.s_star is None else sorted(outcome.s_star)
        doc["clause_index"] = outcome.clause_index
        if include_trace and outcome.inner is not None:
            doc["inner"] = outcome_to_json(outcome.inner, include_trace=True)
    return doc
