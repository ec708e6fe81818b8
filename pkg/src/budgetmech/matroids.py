"""Matroid families behind a common independence oracle.

Every matroid here is described declaratively (kind plus parameters) and
evaluated through ``is_independent``.  Deletion and restriction stay within
the same family, so the derived matroids remain exact and cheap to query.

Element ids are opaque strings; every deterministic tie-break in the package
orders them by plain string comparison, which is public, bid-independent
information.
"""

from .errors import InputError
from .rationals import ZERO, mpq


class Matroid:
    """Base class: a ground list plus an independence oracle."""

    kind = "abstract"

    def __init__(self, ground):
        ground = tuple(ground)
        if len(set(ground)) != len(ground):
            raise InputError("duplicate element ids in ground set")
        self.ground = ground
        self._ground_set = frozenset(ground)

    def __contains__(self, element_id):
        return element_id in self._ground_set

    def __len__(self):
        return len(self.ground)

    def check_members(self, s):
        unknown = set(s) - self._ground_set
        if unknown:
            raise InputError(f"unknown element ids: {sorted(unknown)}")

    def is_independent(self, s):
        """True iff the element set ``s`` is independent."""
        self.check_members(s)
        return self._independent(frozenset(s))

    def _independent(self, s):
        raise NotImplementedError

    def _with_ground(self, new_ground):
        raise NotImplementedError

    def delete(self, t):
        """Matroid on ground minus ``t`` with the induced independent sets."""
        self.check_members(t)
        t = frozenset(t)
        return self._with_ground(tuple(e for e in self.ground if e not in t))

    def restrict(self, t):
        """Matroid on ``t`` with the independent sets of self contained in it."""
        self.check_members(t)
        t = frozenset(t)
        return self._with_ground(tuple(e for e in self.ground if e in t))

    def to_json(self):
        raise NotImplementedError

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.ground == other.ground
            and self.to_json() == other.to_json()
        )

    def __hash__(self):
        return hash((type(self).__name__, self.ground))

    def __repr__(self):
        return f"{type(self).__name__}(ground={list(self.ground)!r})"


class UniformMatroid(Matroid):
    """Independent iff the set has at most ``rank`` elements."""

    kind = "uniform"

    def __init__(self, ground, rank):
        super().__init__(ground)
        if rank < 0:
            raise InputError("uniform rank must be nonnegative")
        self.rank = int(rank)

    def _independent(self, s):
        return len(s) <= self.rank

    def _with_ground(self, new_ground):
        return UniformMatroid(new_ground, self.rank)

    def to_json(self):
        return {"kind": "uniform", "rank": self.rank}


class FreeMatroid(Matroid):
    """Every subset of the ground set is independent.

    Semantically the uniform matroid of full rank; kept as its own kind so
    instances can say "no structural constraint" directly.
    """

    kind = "free"

    def _independent(self, s):
        return True

    def _with_ground(self, new_ground):
        return FreeMatroid(new_ground)

    def to_json(self):
        return {"kind": "free"}


class PartitionMatroid(Matroid):
    """Disjoint blocks with per-block capacities covering the ground set."""

    kind = "partition"

    def __init__(self, ground, blocks):
        super().__init__(ground)
        self.blocks = tuple((frozenset(members), int(cap)) for members, cap in blocks)
        seen = set()
        for members, cap in self.blocks:
            if cap < 0:
                raise InputError("partition capacity must be nonnegative")
            if members & seen:
                raise InputError("partition blocks are not disjoint")
            seen |= members
        if seen != self._ground_set:
            raise InputError("partition blocks must cover the ground set exactly")
        self._block_of = {}
        for idx, (members, _) in enumerate(self.blocks):
            for e in members:
                self._block_of[e] = idx

    def _independent(self, s):
        counts = {}
        for e in s:
            idx = self._block_of[e]
            counts[idx] = counts.get(idx, 0) + 1
            if counts[idx] > self.blocks[idx][1]:
                return False
        return True

    def _with_ground(self, new_ground):
        keep = frozenset(new_ground)
        blocks = [
            (members & keep, cap) for members, cap in self.blocks if members & keep
        ]
        return PartitionMatroid(new_ground, blocks)

    def to_json(self):
        return {
            "kind": "partition",
            "blocks": [
                {"members": sorted(members), "capacity": cap}
                for members, cap in self.blocks
            ],
        }


class GraphicMatroid(Matroid):
    """Elements are labelled edges; independent sets are acyclic edge sets."""

    kind = "graphic"

    def __init__(self, edges):
        # edges: iterable of (element-id, endpoint, endpoint)
        edges = [(e, u, v) for e, u, v in edges]
        super().__init__([e for e, _, _ in edges])
        self.edges = {e: (u, v) for e, u, v in edges}

    def _independent(self, s):
        parent = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != x:
                parent[x], x = root, parent[x]
            return root

        for e in s:
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent.setdefault(u, u)
            parent.setdefault(v, v)
            parent[ru] = rv
        return True

    def _with_ground(self, new_ground):
        return GraphicMatroid([(e, *self.edges[e]) for e in new_ground])

    def to_json(self):
        return {
            "kind": "graphic",
            "edges": [[e, *self.edges[e]] for e in self.ground],
        }


class DeadlineMatroid(Matroid):
    """Unit jobs on one machine; a set is independent iff all deadlines are met.

    Equivalent prefix condition: with deadlines sorted ascending,
    the j-th smallest deadline must be at least j.
    """

    kind = "deadline"

    def __init__(self, ground, deadlines):
        super().__init__(ground)
        if set(deadlines) != self._ground_set:
            raise InputError("deadline map must cover the ground set exactly")
        self.deadlines = {e: int(deadlines[e]) for e in self.ground}
        for e, d in self.deadlines.items():
            if d < 1:
                raise InputError(f"deadline of {e!r} must be at least 1")

    def _independent(self, s):
        for j, d in enumerate(sorted(self.deadlines[e] for e in s), start=1):
            if d < j:
                return False
        return True

    def _with_ground(self, new_ground):
        return DeadlineMatroid(new_ground, {e: self.deadlines[e] for e in new_ground})

    def to_json(self):
        return {"kind": "deadline", "deadlines": dict(sorted(self.deadlines.items()))}


class ExplicitMatroid(Matroid):
    """Matroid given by listing every independent set (test plumbing).

    The matroid axioms are checked at construction, so a bad listing fails
    fast instead of corrupting downstream results.
    """

    kind = "explicit"

    def __init__(self, ground, independents):
        super().__init__(ground)
        sets = {frozenset(s) for s in independents}
        sets.add(frozenset())
        for s in sets:
            self.check_members(s)
        self.independents = frozenset(sets)
        self._check_axioms()

    def _check_axioms(self):
        for s in self.independents:
            for e in s:
                if s - {e} not in self.independents:
                    raise InputError("explicit matroid violates the hereditary property")
        for a in self.independents:
            for b in self.independents:
                if len(a) < len(b) and not any(
                    a | {e} in self.independents for e in b - a
                ):
                    raise InputError("explicit matroid violates the exchange property")

    def _independent(self, s):
        return s in self.independents

    def _with_ground(self, new_ground):
        keep = frozenset(new_ground)
        return ExplicitMatroid(
            new_ground, [s for s in self.independents if s <= keep]
        )

    def to_json(self):
        return {
            "kind": "explicit",
            "independents": sorted(sorted(s) for s in self.independents),
        }


def matroid_from_json(obj, ground):
    """Build a matroid over ``ground`` from its wire-format description."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("matroid spec must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "uniform":
        return UniformMatroid(ground, obj["rank"])
    if kind == "free":
        return FreeMatroid(ground)
    if kind == "partition":
        blocks = [(b["members"], b["capacity"]) for b in obj["blocks"]]
        m = PartitionMatroid(ground, blocks)
        return m
    if kind == "graphic":
        edges = [(e, u, v) for e, u, v in obj["edges"]]
        m = GraphicMatroid(edges)
        if m.ground != tuple(ground):
            raise InputError("graphic edge labels must match the element list exactly")
        return m
    if kind == "deadline":
        return DeadlineMatroid(ground, obj["deadlines"])
    if kind == "explicit":
        return ExplicitMatroid(ground, obj["independents"])
    raise InputError(f"unknown matroid kind {kind!r}")


def set_weight(weights, s):
    """Total weight of an element set (0 for the empty set)."""
    total = ZERO
    for e in s:
        total += weights[e]
    return total


def max_weight_independent_set(matroid, weights):
    """Maximum-weight independent set by the standard matroid greedy.

    Deterministic tie-break: weight descending, then element id ascending.
    Returns the empty set for an empty ground set.  Weights must be positive,
    so the optimum is also inclusion-maximal.
    """
    order = sorted(matroid.ground, key=lambda e: (-mpq(weights[e]), e))
    chosen = []
    current = set()
    for e in order:
        current.add(e)
        if matroid._independent(frozenset(current)):
            chosen.append(e)
        else:
            current.discard(e)
    return frozenset(chosen)
