"""Finite posets: construction from generators, Hasse diagrams, sums,
products, isomorphism testing, and JSON/DOT input-output.

Element identifiers are opaque strings. The element list's order is the
canonical enumeration order: every matrix built downstream indexes rows and
columns by it, so keeping it stable is what makes the whole pipeline
deterministic. Values are immutable after construction.
"""
from __future__ import annotations

import json

from .errors import CycleError, ParseError, SizeLimit, UnknownElement


class Poset:
    """A finite partially ordered set.

    `elements` is the canonical enumeration order; `leq` holds the full
    reflexive-transitive closure as a frozenset of ordered pairs. Construct
    via :func:`poset_from_generators` (or the JSON loader), which computes the
    closure and rejects cycles; the raw constructor trusts its input.
    """

    __slots__ = ("elements", "leq", "_index", "_up", "_down", "_height")

    def __init__(self, elements, leq):
        self.elements = tuple(elements)
        self.leq = frozenset(leq)
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ParseError("duplicate element identifiers")
        up = {e: [] for e in self.elements}
        down = {e: [] for e in self.elements}
        for a, b in self.leq:
            up[a].append(b)
            down[b].append(a)
        self._up = {e: frozenset(v) for e, v in up.items()}
        self._down = {e: frozenset(v) for e, v in down.items()}
        # Longest-chain height, used by DOT ranks and isomorphism pruning.
        heights = {}
        for e in sorted(self.elements, key=lambda e: len(self._down[e])):
            heights[e] = 1 + max(
                (heights[d] for d in self._down[e] if d != e), default=-1
            )
        self._height = heights

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, Poset)
            and self.elements == other.elements
            and self.leq == other.leq
        )

    def __hash__(self):
        return hash((self.elements, self.leq))

    def __repr__(self):
        return f"Poset({list(self.elements)}, {len(self.leq)} relations)"

    def index(self, e):
        try:
            return self._index[e]
        except KeyError:
            raise UnknownElement(e) from None

    def __contains__(self, e):
        return e in self._index

    def le(self, a, b) -> bool:
        self.index(a)
        self.index(b)
        return (a, b) in self.leq

    def lt(self, a, b) -> bool:
        return a != b and self.le(a, b)

    def up_set(self, e) -> frozenset:
        """All elements above or equal to e (the principal up-set)."""
        self.index(e)
        return self._up[e]

    def down_set(self, e) -> frozenset:
        """All elements below or equal to e (the principal down-set)."""
        self.index(e)
        return self._down[e]

    def height(self, e) -> int:
        self.index(e)
        return self._height[e]

    def same_order(self, other) -> bool:
        """Equality as orders: same element set and same relation, any enumeration."""
        return set(self.elements) == set(other.elements) and self.leq == other.leq


class HasseDiagram:
    """Covering relation of a poset: the transitive reduction of its strict order."""

    __slots__ = ("vertices", "edges")

    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        self.edges = frozenset(edges)

    def __eq__(self, other):
        return (
            isinstance(other, HasseDiagram)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"HasseDiagram({list(self.vertices)}, {sorted(self.edges)})"


def poset_from_generators(elements, generating_pairs) -> Poset:
    """Build a poset as the reflexive-transitive closure of generating pairs.

    Raises UnknownElement if a pair mentions an unlisted element, and
    CycleError (naming a violating cycle) if the closure is not antisymmetric.
    """
    elements = list(elements)
    index = {e: i for i, e in enumerate(elements)}
    if len(index) != len(elements):
        raise ParseError("duplicate element identifiers")
    pairs = [(a, b) for a, b in generating_pairs]
    for a, b in pairs:
        if a not in index:
            raise UnknownElement(a)
        if b not in index:
            raise UnknownElement(b)
    n = len(elements)
    # Reachability as bitmasks; Warshall closure.
    reach = [1 << i for i in range(n)]
    for a, b in pairs:
        reach[index[a]] |= 1 << index[b]
    for k in range(n):
        rk = reach[k]
        bit = 1 << k
        for i in range(n):
            if reach[i] & bit:
                reach[i] |= rk
    for i in range(n):
        for j in range(n):
            if i != j and reach[i] >> j & 1 and reach[j] >> i & 1:
                raise CycleError(_find_cycle(elements, index, pairs, i, j))
    leq = set()
    for i in range(n):
        ri = reach[i]
        for j in range(n):
            if ri >> j & 1:
                leq.add((elements[i], elements[j]))
    return Poset(elements, leq)


def _find_cycle(elements, index, pairs, i, j):
    """A concrete generator path i -> j -> i, for the CycleError message."""
    adj = {e: [] for e in elements}
    for a, b in pairs:
        adj[a].append(b)

    def path(src, dst):
        prev = {src: None}
        queue = [src]
        while queue:
            cur = queue.pop(0)
            if cur == dst:
                out = [cur]
                while prev[cur] is not None:
                    cur = prev[cur]
                    out.append(cur)
                return out[::-1]
            for nxt in adj[cur]:
                if nxt not in prev:
                    prev[nxt] = cur
                    queue.append(nxt)
        return None

    a, b = elements[i], elements[j]
    forward = path(a, b) or [a, b]
    back = path(b, a) or [b, a]
    return forward + back[1:]


def hasse(p: Poset) -> HasseDiagram:
    """Transitive reduction: edges (a, b) with a < b and nothing strictly between."""
    edges = set()
    for a in p.elements:
        for b in p.up_set(a):
            if a == b:
                continue
            if not any(c != a and c != b and p.le(c, b) for c in p.up_set(a)):
                edges.add((a, b))
    return HasseDiagram(p.elements, edges)


def _disjoint_labels(p: Poset, q: Poset):
    """Relabel with 'L.'/'R.' prefixes when the two element sets collide."""
    if set(p.elements) & set(q.elements):
        pm = {e: "L." + e for e in p.elements}
        qm = {e: "R." + e for e in q.elements}
        p = Poset([pm[e] for e in p.elements],
                  {(pm[a], pm[b]) for a, b in p.leq})
        q = Poset([qm[e] for e in q.elements],
                  {(qm[a], qm[b]) for a, b in q.leq})
    return p, q


def ordinal_sum(p: Poset, q: Poset) -> Poset:
    """Disjoint union with everything in p below everything in q."""
    p, q = _disjoint_labels(p, q)
    leq = set(p.leq) | set(q.leq)
    leq.update((a, b) for a in p.elements for b in q.elements)
    return Poset(p.elements + q.elements, leq)


def direct_sum(p: Poset, q: Poset) -> Poset:
    """Disjoint union with no cross relations."""
    p, q = _disjoint_labels(p, q)
    return Poset(p.elements + q.elements, set(p.leq) | set(q.leq))


def opposite(p: Poset) -> Poset:
    """Same elements, reversed order."""
    return Poset(p.elements, {(b, a) for a, b in p.leq})


def product(p: Poset, q: Poset) -> Poset:
    """Componentwise order on pairs; labels are '(a,b)' in p-major order."""
    label = {(a, b): f"({a},{b})" for a in p.elements for b in q.elements}
    elements = [label[(a, b)] for a in p.elements for b in q.elements]
    leq = set()
    for a in p.elements:
        for b in q.elements:
            for a2 in p.up_set(a):
                for b2 in q.up_set(b):
                    leq.add((label[(a, b)], label[(a2, b2)]))
    return Poset(elements, leq)


def point_poset(label="*") -> Poset:
    """The one-point poset."""
    return Poset([label], {(label, label)})


def up_set(p: Poset, y) -> frozenset:
    return p.up_set(y)


def down_set(p: Poset, y) -> frozenset:
    return p.down_set(y)


def is_isomorphic(p: Poset, q: Poset, max_size: int = 12):
    """An order-isomorphism p -> q as a dict, or None if none exists.

    Exact backtracking with iterated invariant refinement for pruning.
    Unequal sizes return None immediately; equal sizes above `max_size`
    raise SizeLimit.
    """
    if len(p) != len(q):
        return None
    if len(p) > max_size:
        raise SizeLimit(f"isomorphism search capped at {max_size} elements")
    if len(p) == 0:
        return {}

    cover_p = _cover_maps(p)
    cover_q = _cover_maps(q)

    def refine(poset, covers):
        color = {
            e: (len(poset.down_set(e)), len(poset.up_set(e)), poset.height(e))
            for e in poset.elements
        }
        for _ in range(len(poset)):
            ranks = {c: i for i, c in enumerate(sorted(set(color.values())))}
            new = {
                e: (
                    ranks[color[e]],
                    tuple(sorted(ranks[color[u]] for u in covers[0][e])),
                    tuple(sorted(ranks[color[d]] for d in covers[1][e])),
                )
                for e in poset.elements
            }
            if len(set(new.values())) == len(set(color.values())):
                color = new
                break
            color = new
        return color

    col_p = refine(p, cover_p)
    col_q = refine(q, cover_q)
    from collections import Counter

    if Counter(col_p.values()) != Counter(col_q.values()):
        return None

    # Match rarest color classes first.
    by_color_q = {}
    for e in q.elements:
        by_color_q.setdefault(col_q[e], []).append(e)
    order = sorted(p.elements, key=lambda e: (len(by_color_q[col_p[e]]), p.index(e)))

    mapping = {}
    used = set()

    def consistent(a, b):
        for a2, b2 in mapping.items():
            if p.le(a, a2) != q.le(b, b2) or p.le(a2, a) != q.le(b2, b):
                return False
        return True

    def backtrack(i):
        if i == len(order):
            return True
        a = order[i]
        for b in by_color_q[col_p[a]]:
            if b in used:
                continue
            if consistent(a, b):
                mapping[a] = b
                used.add(b)
                if backtrack(i + 1):
                    return True
                del mapping[a]
                used.discard(b)
        return False

    if backtrack(0):
        return dict(mapping)
    return None


def _cover_maps(p: Poset):
    h = hasse(p)
    up = {e: [] for e in p.elements}
    down = {e: [] for e in p.elements}
    for a, b in h.edges:
        up[a].append(b)
        down[b].append(a)
    return up, down


# --- JSON / DOT ------------------------------------------------------------

def poset_to_json(p: Poset) -> dict:
    """JSON form: elements plus generating relations (the Hasse edges)."""
    edges = sorted(hasse(p).edges, key=lambda ab: (p.index(ab[0]), p.index(ab[1])))
    return {"elements": list(p.elements), "relations": [list(e) for e in edges]}


def poset_from_json(doc) -> Poset:
    if not isinstance(doc, dict) or "elements" not in doc:
        raise ParseError("poset JSON needs an 'elements' list")
    elements = doc["elements"]
    relations = doc.get("relations", [])
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise ParseError("'elements' must be a list of strings")
    if not isinstance(relations, list) or not all(
        isinstance(r, list) and len(r) == 2 for r in relations
    ):
        raise ParseError("'relations' must be a list of [a, b] pairs")
    return poset_from_generators(elements, [tuple(r) for r in relations])


def poset_loads(text: str) -> Poset:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return poset_from_json(doc)


def poset_to_dot(p: Poset, name: str = "poset") -> str:
    """DOT drawing: one node per element, one arrow per Hasse edge,
    elements of equal longest-chain height share a rank, maxima on top."""
    def quote(s):
        return '"' + s.replace('"', '\\"') + '"'

    lines = [f"digraph {quote(name)} {{", "  rankdir=BT;"]
    for e in p.elements:
        lines.append(f"  {quote(e)};")
    edges = sorted(hasse(p).edges, key=lambda ab: (p.index(ab[0]), p.index(ab[1])))
    for a, b in edges:
        lines.append(f"  {quote(a)} -> {quote(b)};")
    by_height = {}
    for e in p.elements:
        by_height.setdefault(p.height(e), []).append(e)
    for h in sorted(by_height):
        group = " ".join(quote(e) for e in by_height[h])
        lines.append(f"  {{ rank=same; {group} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"
