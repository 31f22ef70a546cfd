"""Gluing data over a pair of posets and the two glued orders it induces.

The data consists of a poset X, a poset Y, and for each x in X a subset
Y_x of Y whose members have pairwise disjoint principal up-sets and pairwise
disjoint principal down-sets. Validation infers the connecting bijections
between the Y_x along relations of X, then :func:`build_plus` /
:func:`build_minus` produce the two orders on the disjoint union of X and Y:

* plus:  x lies below y whenever some witness w in Y_x has w <= y in Y;
* minus: y lies below x whenever some witness w in Y_x has y <= w in Y;

with no other cross relations. Both constructions re-verify the result is a
poset with exactly the predicted relations and a unique witness per cross
relation, raising InternalInconsistency if the algebra ever disagrees with
the prediction.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    AntichainViolation,
    CocycleViolation,
    InternalInconsistency,
    NotOrderPreserving,
    ParseError,
    PhiMissing,
    PhiNotBijective,
    UnknownElement,
)
from .poset_core import (
    Poset,
    direct_sum,
    ordinal_sum,
    point_poset,
    poset_from_generators,
    poset_from_json,
    poset_to_json,
)


@dataclass(frozen=True)
class GluingData:
    """Validated gluing data.

    `Yx` maps each element of X to an ordered tuple of Y-elements (the input
    order is kept: downstream matrix blocks index by it). `phi` maps each
    ordered pair (x, x2) with x <= x2 to the inferred bijection Y_x -> Y_x2,
    stored as a dict.
    """

    X: Poset
    Y: Poset
    Yx: dict
    phi: dict

    def witnesses(self, x):
        """The ordered tuple Y_x."""
        return self.Yx[x]


@dataclass(frozen=True)
class GluedOrder:
    """One of the two orders on X ⊔ Y induced by a gluing."""

    poset: Poset
    sign: str  # "plus" | "minus"
    provenance: GluingData


def _relabel_if_colliding(X: Poset, Y: Poset, Yx: dict):
    """Prefix X with 'L.' and Y with 'R.' when their element sets collide."""
    if not (set(X.elements) & set(Y.elements)):
        return X, Y, Yx
    xm = {e: "L." + e for e in X.elements}
    ym = {e: "R." + e for e in Y.elements}
    X2 = Poset([xm[e] for e in X.elements], {(xm[a], xm[b]) for a, b in X.leq})
    Y2 = Poset([ym[e] for e in Y.elements], {(ym[a], ym[b]) for a, b in Y.leq})
    Yx2 = {xm[x]: tuple(ym[y] for y in ys) for x, ys in Yx.items()}
    return X2, Y2, Yx2


def validate_gluing(X: Poset, Y: Poset, Yx) -> GluingData:
    """Check the gluing conditions and infer the connecting bijections.

    Raises AntichainViolation when two members of some Y_x share an element
    of their up-sets or down-sets (the witness is reported), PhiMissing /
    PhiNotBijective when the connecting maps cannot be inferred, and
    CocycleViolation if the inferred maps fail to compose (cannot happen
    when inference succeeded; checked anyway as an internal alarm).
    """
    Yx = {x: tuple(ys) for x, ys in Yx.items()}
    for x in X.elements:
        if x not in Yx:
            raise ParseError(f"no witness set given for element {x!r}")
    for x in Yx:
        X.index(x)
    for x, ys in Yx.items():
        seen = set()
        for y in ys:
            Y.index(y)
            if y in seen:
                raise ParseError(f"duplicate element {y!r} in the set at {x!r}")
            seen.add(y)
    X, Y, Yx = _relabel_if_colliding(X, Y, Yx)

    for x in X.elements:
        ys = Yx[x]
        for i in range(len(ys)):
            for j in range(i + 1, len(ys)):
                y, y2 = ys[i], ys[j]
                shared_up = Y.up_set(y) & Y.up_set(y2)
                if shared_up:
                    w = min(shared_up, key=Y.index)
                    raise AntichainViolation(x, y, y2, w, "up")
                shared_down = Y.down_set(y) & Y.down_set(y2)
                if shared_down:
                    w = min(shared_down, key=Y.index)
                    raise AntichainViolation(x, y, y2, w, "down")

    phi = {}
    for x, x2 in X.leq:
        fwd = {}
        for y in Yx[x]:
            candidates = [y2 for y2 in Yx[x2] if Y.le(y, y2)]
            if not candidates:
                raise PhiMissing(x, x2, y)
            if len(candidates) > 1:
                raise InternalInconsistency(
                    f"multiple admissible images for {y!r} under {x!r} <= {x2!r}; "
                    "the antichain check should have excluded this"
                )
            fwd[y] = candidates[0]
        if len(Yx[x]) != len(Yx[x2]) or len(set(fwd.values())) != len(fwd):
            raise PhiNotBijective(x, x2)
        phi[(x, x2)] = fwd

    for x, x2 in X.leq:
        if x == x2 and any(phi[(x, x)][y] != y for y in Yx[x]):
            raise InternalInconsistency(f"connecting map at {x!r} is not the identity")
        for x3 in X.up_set(x2):
            for y in Yx[x]:
                if phi[(x2, x3)][phi[(x, x2)][y]] != phi[(x, x3)][y]:
                    raise CocycleViolation(x, x2, x3, y)

    return GluingData(X=X, Y=Y, Yx=Yx, phi=phi)


def _build(g: GluingData, sign: str) -> GluedOrder:
    X, Y = g.X, g.Y
    cross = set()
    for x in X.elements:
        for w in g.Yx[x]:
            if sign == "plus":
                cross.update((x, y) for y in Y.up_set(w))
            else:
                cross.update((y, x) for y in Y.down_set(w))
    generators = list(X.leq) + list(Y.leq) + sorted(
        cross, key=lambda ab: (ab[0], ab[1])
    )
    elements = X.elements + Y.elements
    try:
        poset = poset_from_generators(elements, generators)
    except Exception as exc:
        raise InternalInconsistency(
            f"glued relation is not a partial order: {exc}"
        ) from exc

    expected = set(X.leq) | set(Y.leq) | cross
    expected.update((e, e) for e in elements)
    if poset.leq != frozenset(expected):
        raise InternalInconsistency(
            "transitive closure added relations beyond the predicted glued order"
        )
    for a, b in cross:
        x, y = (a, b) if sign == "plus" else (b, a)
        hits = [
            w
            for w in g.Yx[x]
            if (Y.le(w, y) if sign == "plus" else Y.le(y, w))
        ]
        if len(hits) != 1:
            raise InternalInconsistency(
                f"cross relation {a!r} <= {b!r} has {len(hits)} witnesses, expected 1"
            )
    return GluedOrder(poset=poset, sign=sign, provenance=g)


def build_plus(g: GluingData) -> GluedOrder:
    """The order on X ⊔ Y with X glued below Y through the witness sets."""
    return _build(g, "plus")


def build_minus(g: GluingData) -> GluedOrder:
    """The order on X ⊔ Y with Y glued below X through the witness sets."""
    return _build(g, "minus")


def cross_witness(order: GluedOrder, a, b):
    """For a cross relation a <= b of a glued order, its unique witness in Y."""
    g = order.provenance
    if order.sign == "plus":
        x, y = a, b
        hits = [w for w in g.Yx[x] if g.Y.le(w, y)]
    else:
        y, x = a, b
        hits = [w for w in g.Yx[x] if g.Y.le(y, w)]
    if len(hits) != 1:
        raise InternalInconsistency(f"{a!r} <= {b!r} is not a cross relation")
    return hits[0]


def from_function(X: Poset, Y: Poset, f) -> GluingData:
    """Gluing data of an order-preserving map f: X -> Y (all Y_x singletons)."""
    f = dict(f)
    for x in X.elements:
        if x not in f:
            raise ParseError(f"f gives no value for element {x!r}")
        Y.index(f[x])
    for x, x2 in X.leq:
        if not Y.le(f[x], f[x2]):
            raise NotOrderPreserving(x, x2)
    return validate_gluing(X, Y, {x: (f[x],) for x in X.elements})


def from_bgp(Y: Poset, Y0) -> GluingData:
    """Gluing of a single new point against the witness set Y0 ⊆ Y.

    In the plus order the new point '*' is a source Hasse-connected to Y0;
    in the minus order it is a sink.
    """
    Y0 = tuple(Y0)
    for y in Y0:
        Y.index(y)
    star = "*" if "*" not in Y else "**"
    X = point_poset(star)
    return validate_gluing(X, Y, {star: Y0})


def ordinal_witness(X: Poset, Z: Poset):
    """The constant gluing of X onto a new bottom point under Z, together
    with the two shapes the glued orders must realize.

    Returns (gluing, expected_plus, expected_minus) where expected_plus is
    the ordinal sum X then point then Z, and expected_minus is the ordinal
    sum of a point under the direct sum of X and Z. The caller compares via
    is_isomorphic.
    """
    bottom = point_poset("*")
    Y = ordinal_sum(bottom, Z)
    y0 = Y.elements[0]
    g = validate_gluing(X, Y, {x: (y0,) for x in X.elements})
    expected_plus = ordinal_sum(X, ordinal_sum(point_poset("*"), Z))
    expected_minus = ordinal_sum(point_poset("*"), direct_sum(X, Z))
    return g, expected_plus, expected_minus


# --- JSON -------------------------------------------------------------------

def gluing_to_json(g: GluingData) -> dict:
    return {
        "X": poset_to_json(g.X),
        "Y": poset_to_json(g.Y),
        "Yx": {x: list(g.Yx[x]) for x in g.X.elements},
    }


def gluing_from_json(doc) -> GluingData:
    """Accepts three input forms, detected by their keys:

    * `{"X": .., "Y": .., "Yx": {...}}` — explicit witness sets;
    * `{"X": .., "Y": .., "f": {...}}` — an order-preserving map;
    * `{"Y": .., "Y0": [...]}` — a single new point glued against Y0.
    """
    if not isinstance(doc, dict):
        raise ParseError("gluing JSON must be an object")
    if "Y0" in doc:
        if "Y" not in doc:
            raise ParseError("BGP form needs keys 'Y' and 'Y0'")
        Y = poset_from_json(doc["Y"])
        if not isinstance(doc["Y0"], list):
            raise ParseError("'Y0' must be a list of elements")
        return from_bgp(Y, doc["Y0"])
    if "X" not in doc or "Y" not in doc:
        raise ParseError("gluing JSON needs keys 'X' and 'Y'")
    X = poset_from_json(doc["X"])
    Y = poset_from_json(doc["Y"])
    if "f" in doc:
        if not isinstance(doc["f"], dict):
            raise ParseError("'f' must be an object mapping X elements to Y elements")
        return from_function(X, Y, doc["f"])
    if "Yx" in doc:
        if not isinstance(doc["Yx"], dict) or not all(
            isinstance(v, list) for v in doc["Yx"].values()
        ):
            raise ParseError("'Yx' must map each X element to a list of Y elements")
        return validate_gluing(X, Y, {x: tuple(v) for x, v in doc["Yx"].items()})
    raise ParseError("gluing JSON needs one of 'Yx', 'f', or 'Y0'")
