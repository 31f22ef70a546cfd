"""Exact integer-matrix calculus of graded poset words.

Objects are finite sequences of (element, degree) pairs over a fixed base
poset; morphisms are integer matrices supported on positions that respect
the order and raise degree by 0 or 1 (degree jumps of two or more are
quotiented away). On top of these live:

* FormulaToPoint — an object together with a square matrix D to its shift
  satisfying D*[1]·D = 0, lower triangularity, and unit diagonal;
* FormulaMorphism — a degree-preserving matrix intertwining two such D's;
* Formula — a poset-shaped diagram of FormulaToPoint values and
  FormulaMorphism restrictions.

Everything here is pure integer algebra with no choice of coefficients; the
abelian_eval module turns these values into actual complexes and chain maps.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BaseMismatch,
    DiagramAxiomFailure,
    IllegalSupport,
    InternalInconsistency,
    ParseError,
    ShapeMismatch,
)
from .intmat import Mat, block
from .poset_core import Poset, poset_from_generators, poset_from_json, poset_to_json


# --- objects and morphisms ---------------------------------------------------

class CObject:
    """A finite sequence of (element, degree) pairs over a base poset.

    Entries may repeat and their order is significant: it is the row/column
    order of every matrix attached to the object.
    """

    __slots__ = ("entries", "base")

    def __init__(self, entries, base: Poset):
        entries = tuple((x, int(m)) for x, m in entries)
        for x, _ in entries:
            base.index(x)
        self.entries = entries
        self.base = base

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, CObject)
            and self.entries == other.entries
            and self.base == other.base
        )

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"CObject({list(self.entries)})"

    def element(self, i):
        return self.entries[i][0]

    def degree(self, i):
        return self.entries[i][1]

    def shifted(self, n: int) -> "CObject":
        return CObject(((x, m + n) for x, m in self.entries), self.base)


def _canonical_rows(source: CObject, target: CObject, rows, strict: bool):
    """Zero forbidden positions (raise in strict mode for order violations)."""
    out = []
    for j in range(len(target)):
        xj, mj = target.entries[j]
        row = []
        for i in range(len(source)):
            c = rows[j][i]
            if c == 0:
                row.append(0)
                continue
            xi, mi = source.entries[i]
            if mj < mi or not source.base.le(xi, xj):
                if strict:
                    raise IllegalSupport(
                        j, i, f"({xi},{mi}) does not precede ({xj},{mj})"
                    )
                row.append(0)
            elif mj - mi >= 2:
                row.append(0)  # quotient: degree jumps of 2 or more vanish
            else:
                row.append(int(c))
        out.append(tuple(row))
    return tuple(out)


class CMorphism:
    """An integer matrix between two objects, stored in canonical form.

    Construction normalizes: entries at positions violating the order or
    degree conditions become zero (strict mode raises IllegalSupport for
    order violations instead; degree jumps >= 2 are silently quotiented in
    both modes). Equality is equality of canonical forms.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: CObject, target: CObject, matrix, strict: bool = False):
        if source.base != target.base:
            raise BaseMismatch("source and target live over different posets")
        rows = matrix.rows if isinstance(matrix, Mat) else tuple(
            tuple(int(c) for c in r) for r in matrix
        )
        if len(rows) != len(target) or any(len(r) != len(source) for r in rows):
            raise ShapeMismatch(
                f"matrix must be {len(target)}x{len(source)}, "
                f"got {len(rows)}x{len(rows[0]) if rows else 0}"
            )
        self.source = source
        self.target = target
        self.matrix = Mat.from_rows(_canonical_rows(source, target, rows, strict))

    def __eq__(self, other):
        return (
            isinstance(other, CMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    def __repr__(self):
        return f"CMorphism({self.matrix.tolist()})"

    def is_zero(self):
        return self.matrix.is_zero()


def identity_morphism(obj: CObject) -> CMorphism:
    return CMorphism(obj, obj, Mat.identity(len(obj)))


def normalize(source: CObject, target: CObject, rows, strict: bool = False) -> CMorphism:
    """Canonical form of a raw matrix as a morphism source -> target."""
    return CMorphism(source, target, rows, strict=strict)


def compose(g: CMorphism, f: CMorphism) -> CMorphism:
    """Matrix product followed by canonical normalization."""
    if f.source.base != g.source.base:
        raise BaseMismatch("cannot compose morphisms over different posets")
    if f.target != g.source:
        raise ShapeMismatch("compose: target of the first factor != source of the second")
    return CMorphism(f.source, g.target, g.matrix.mul(f.matrix))


def add(f: CMorphism, g: CMorphism) -> CMorphism:
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("can only add parallel morphisms")
    return CMorphism(f.source, f.target, f.matrix.add(g.matrix))


def star(m: CMorphism) -> CMorphism:
    """Entrywise sign twist by the parity of the degree difference."""
    rows = []
    for j in range(len(m.target)):
        mj = m.target.degree(j)
        rows.append(
            tuple(
                c if (mj - m.source.degree(i)) % 2 == 0 else -c
                for i, c in enumerate(m.matrix.rows[j])
            )
        )
    return CMorphism(m.source, m.target, rows)


def _twist(m: CMorphism, n: int) -> CMorphism:
    """Sign-flip the degree-preserving entries when n is odd; used by substitute."""
    if n % 2 == 0:
        return m
    rows = []
    for j in range(len(m.target)):
        mj = m.target.degree(j)
        rows.append(
            tuple(
                -c if mj == m.source.degree(i) else c
                for i, c in enumerate(m.matrix.rows[j])
            )
        )
    return CMorphism(m.source, m.target, rows)


# --- formulas to a point -----------------------------------------------------

class FormulaToPoint:
    """An object xi with a square matrix D: xi -> xi[1].

    Validity (checked by :func:`check_formula`, not by the constructor):
    the twisted-shifted square D*[1]·D vanishes, D is lower triangular, and
    every diagonal entry is 1.
    """

    __slots__ = ("xi", "D")

    def __init__(self, xi: CObject, D, strict: bool = False):
        if not isinstance(D, CMorphism):
            D = CMorphism(xi, xi.shifted(1), D, strict=strict)
        if D.source != xi or D.target != xi.shifted(1):
            raise ShapeMismatch("D must map the object to its shift by one")
        self.xi = xi
        self.D = D

    def __eq__(self, other):
        return (
            isinstance(other, FormulaToPoint)
            and self.xi == other.xi
            and self.D == other.D
        )

    def __hash__(self):
        return hash((self.xi, self.D))

    def __repr__(self):
        return f"FormulaToPoint({list(self.xi.entries)}, {self.D.matrix.tolist()})"


def shift(value, n: int):
    """Shift all degrees by n; matrices are carried over unchanged.

    Accepts a CObject, CMorphism, FormulaToPoint, or Formula.
    """
    if isinstance(value, CObject):
        return value.shifted(n)
    if isinstance(value, CMorphism):
        return CMorphism(value.source.shifted(n), value.target.shifted(n), value.matrix)
    if isinstance(value, FormulaToPoint):
        return FormulaToPoint(value.xi.shifted(n), value.D.matrix.rows)
    if isinstance(value, Formula):
        at = {y: shift(f, n) for y, f in value.at.items()}
        res = {
            key: FormulaMorphism(at[key[0]], at[key[1]], fm.phi.matrix.rows)
            for key, fm in value.res.items()
        }
        return Formula(value.target, at, res)
    raise TypeError(f"cannot shift {type(value).__name__}")


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a validity check: ok flag plus human-readable problems."""

    ok: bool
    problems: tuple

    def __bool__(self):
        return self.ok


def _report(problems) -> CheckReport:
    problems = tuple(problems)
    return CheckReport(ok=not problems, problems=problems)


def check_formula(f: FormulaToPoint) -> CheckReport:
    """Verify the three formula conditions; list every violation found."""
    problems = []
    n = len(f.xi)
    square = compose(shift(star(f.D), 1), f.D)
    if not square.is_zero():
        for j in range(n):
            for i in range(n):
                if square.matrix[j, i] != 0:
                    problems.append(
                        f"D*[1]·D has nonzero entry {square.matrix[j, i]} at ({j},{i})"
                    )
    for j in range(n):
        for i in range(j + 1, n):
            if f.D.matrix[j, i] != 0:
                problems.append(
                    f"D is not lower triangular: entry {f.D.matrix[j, i]} at ({j},{i})"
                )
    for i in range(n):
        if f.D.matrix[i, i] != 1:
            problems.append(f"diagonal entry at ({i},{i}) is {f.D.matrix[i, i]}, not 1")
    return _report(problems)


class FormulaMorphism:
    """A degree-preserving matrix phi intertwining two formulas to a point."""

    __slots__ = ("source", "target", "phi")

    def __init__(self, source: FormulaToPoint, target: FormulaToPoint, phi, strict=False):
        if not isinstance(phi, CMorphism):
            phi = CMorphism(source.xi, target.xi, phi, strict=strict)
        if phi.source != source.xi or phi.target != target.xi:
            raise ShapeMismatch("phi must map the source object to the target object")
        self.source = source
        self.target = target
        self.phi = phi

    def __eq__(self, other):
        return (
            isinstance(other, FormulaMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.phi == other.phi
        )

    def __hash__(self):
        return hash((self.source, self.target, self.phi))

    def __repr__(self):
        return f"FormulaMorphism({self.phi.matrix.tolist()})"


def check_formula_morphism(
    fm: FormulaMorphism, allow_any_intertwiner: bool = False
) -> CheckReport:
    """Verify the restriction property and the intertwining identity.

    With `allow_any_intertwiner` the restriction property (all nonzero
    components degree-preserving) is waived and only intertwining is checked.
    """
    problems = []
    if not allow_any_intertwiner:
        for j in range(len(fm.target.xi)):
            mj = fm.target.xi.degree(j)
            for i in range(len(fm.source.xi)):
                if fm.phi.matrix[j, i] != 0 and mj != fm.source.xi.degree(i):
                    problems.append(
                        f"component at ({j},{i}) raises degree; not a restriction"
                    )
    lhs = compose(shift(fm.phi, 1), fm.source.D)
    rhs = compose(fm.target.D, fm.phi)
    if lhs != rhs:
        diff = lhs.matrix.sub(rhs.matrix)
        for j in range(diff.nrows):
            for i in range(diff.ncols):
                if diff[j, i] != 0:
                    problems.append(
                        f"intertwining fails at ({j},{i}): "
                        f"phi[1]·D = {lhs.matrix[j, i]} but D'·phi = {rhs.matrix[j, i]}"
                    )
    return _report(problems)


def identity_formula_morphism(f: FormulaToPoint) -> FormulaMorphism:
    return FormulaMorphism(f, f, Mat.identity(len(f.xi)))


def compose_formula_morphisms(g: FormulaMorphism, f: FormulaMorphism) -> FormulaMorphism:
    if f.target != g.source:
        raise ShapeMismatch("formula morphisms do not compose")
    return FormulaMorphism(f.source, g.target, compose(g.phi, f.phi).matrix.rows)


def check_homotopy(
    alpha: CMorphism, beta: CMorphism, h: CMorphism, D: CMorphism
) -> CheckReport:
    """Verify that beta retracts alpha up to the homotopy h against D.

    Concretely: beta·alpha is the identity, and
    alpha·beta + h[1]·D + D*[-1]·h is the identity, all in canonical form.
    """
    problems = []
    xi = D.source
    xi_small = alpha.source
    if alpha.target != xi or beta.source != xi or beta.target != xi_small:
        raise ShapeMismatch("alpha and beta must connect D's object with a common one")
    if h.source != xi or h.target != xi.shifted(-1):
        raise ShapeMismatch("h must map D's object to its shift by -1")
    ba = compose(beta, alpha)
    if ba != identity_morphism(xi_small):
        problems.append(f"beta·alpha = {ba.matrix.tolist()} is not the identity")
    ab = compose(alpha, beta)
    hD = compose(shift(h, 1), D)
    Dh = compose(shift(star(D), -1), h)
    total = add(add(ab, hD), Dh)
    if total != identity_morphism(xi):
        problems.append(
            "alpha·beta + h[1]·D + D*[-1]·h = "
            f"{total.matrix.tolist()} is not the identity"
        )
    return _report(problems)


def negated_star_shift(f: FormulaToPoint) -> FormulaToPoint:
    """The formula (xi[1], -D*), isomorphic to the plain shift via i_xi."""
    return FormulaToPoint(f.xi.shifted(1), star(f.D).matrix.neg().rows)


def i_xi(f: FormulaToPoint) -> FormulaMorphism:
    """The diagonal sign isomorphism from shift(f, 1) to negated_star_shift(f).

    Its (i,i) entry is (-1)**m_i for the i-th degree m_i of f's object; it
    intertwines D with -D* exactly.
    """
    signs = [(-1) ** (m % 2) for _, m in f.xi.entries]
    return FormulaMorphism(shift(f, 1), negated_star_shift(f), Mat.diag(signs))


# --- poset-shaped formulas ---------------------------------------------------

class Formula:
    """A diagram over a target poset valued in formulas over a base poset.

    `at` maps each target element to a FormulaToPoint over the common base;
    `res` maps each pair (y, y2) with y <= y2 to a FormulaMorphism from
    at(y) to at(y2). The constructor verifies the diagram axioms: identity
    on diagonal pairs and closure under composition.
    """

    __slots__ = ("target", "base", "at", "res")

    def __init__(self, target: Poset, at: dict, res: dict):
        self.target = target
        self.at = dict(at)
        bases = {f.xi.base for f in self.at.values()}
        if len(bases) != 1:
            raise BaseMismatch("all values must live over one base poset")
        self.base = next(iter(bases))
        self.res = dict(res)
        for y in target.elements:
            if y not in self.at:
                raise ParseError(f"no value at element {y!r}")
        for y, y2 in target.leq:
            if (y, y2) not in self.res:
                if y == y2:
                    self.res[(y, y2)] = identity_formula_morphism(self.at[y])
                else:
                    raise ParseError(f"no restriction for {y!r} <= {y2!r}")
        for (y, y2), fm in self.res.items():
            if not target.le(y, y2):
                raise ParseError(f"restriction given for unrelated pair {y!r}, {y2!r}")
            if fm.source != self.at[y] or fm.target != self.at[y2]:
                raise ShapeMismatch(f"restriction for {y!r} <= {y2!r} has wrong ends")
            report = check_formula_morphism(fm)
            if not report:
                raise DiagramAxiomFailure(
                    f"restriction for {y!r} <= {y2!r} is invalid: {report.problems[0]}"
                )
        for y in target.elements:
            if self.res[(y, y)].phi != identity_morphism(self.at[y].xi):
                raise DiagramAxiomFailure(f"restriction at ({y!r}, {y!r}) is not the identity")
        for y, y2 in target.leq:
            for y3 in target.up_set(y2):
                left = compose(self.res[(y2, y3)].phi, self.res[(y, y2)].phi)
                if left != self.res[(y, y3)].phi:
                    raise DiagramAxiomFailure(
                        f"restrictions do not compose along {y!r} <= {y2!r} <= {y3!r}"
                    )

    def __eq__(self, other):
        return (
            isinstance(other, Formula)
            and self.target == other.target
            and self.at == other.at
            and self.res == other.res
        )

    def __repr__(self):
        return f"Formula(over {list(self.target.elements)})"


def identity_formula(X: Poset) -> Formula:
    """The formula whose evaluation is the identity functor."""
    return translation_formula(X, 0)


def translation_formula(X: Poset, n: int) -> Formula:
    """The formula whose evaluation shifts every complex by n."""
    at = {x: FormulaToPoint(CObject(((x, n),), X), Mat.identity(1)) for x in X.elements}
    res = {
        (x, x2): FormulaMorphism(at[x], at[x2], Mat.identity(1))
        for x, x2 in X.leq
    }
    return Formula(X, at, res)


def substitute(outer: FormulaToPoint, inner: Formula) -> FormulaToPoint:
    """Replace each entry (p, m) of the outer formula by the inner value at p.

    The result object concatenates the shifted inner objects in outer entry
    order. Its matrix has diagonal blocks given by the inner D's (with
    degree-preserving entries sign-twisted by the parity of the outer
    degree), and off-diagonal blocks given by inner restrictions — composed
    with the receiving D when the outer coefficient raises degree.
    """
    if outer.xi.base != inner.target:
        raise BaseMismatch("outer formula must live over the inner formula's target")
    entries = outer.xi.entries
    pieces = [shift(inner.at[p], m) for p, m in entries]
    sizes = [len(piece.xi) for piece in pieces]
    base = inner.base
    new_entries = []
    for piece in pieces:
        new_entries.extend(piece.xi.entries)
    xi = CObject(new_entries, base)

    blocks = {}
    for a, piece in enumerate(pieces):
        blocks[(a, a)] = _twist(piece.D, entries[a][1]).matrix
    for b in range(len(entries)):
        pb, mb = entries[b]
        for a in range(len(entries)):
            if a == b:
                continue
            c = outer.D.matrix[b, a]
            if c == 0:
                continue
            pa, ma = entries[a]
            rho = inner.res[(pa, pb)].phi
            if mb == ma - 1:
                blocks[(b, a)] = rho.matrix.scale(c)
            elif mb == ma:
                body = _twist(compose(inner.at[pb].D, rho), ma)
                blocks[(b, a)] = body.matrix.scale(c)
            else:
                raise InternalInconsistency(
                    f"outer coefficient at ({b},{a}) sits at an illegal position"
                )
    result = FormulaToPoint(xi, block(blocks, sizes, sizes).rows)
    report = check_formula(result)
    if not report:
        raise InternalInconsistency(
            f"substitution produced an invalid formula: {report.problems[0]}"
        )
    return result


def substitute_morphism(psi: FormulaMorphism, inner: Formula) -> FormulaMorphism:
    """Substitute the inner formula into both ends of a formula morphism."""
    src = substitute(psi.source, inner)
    tgt = substitute(psi.target, inner)
    s_entries = psi.source.xi.entries
    t_entries = psi.target.xi.entries
    col_sizes = [len(inner.at[p].xi) for p, _ in s_entries]
    row_sizes = [len(inner.at[p].xi) for p, _ in t_entries]
    blocks = {}
    for b in range(len(t_entries)):
        pb, mb = t_entries[b]
        for a in range(len(s_entries)):
            c = psi.phi.matrix[b, a]
            if c == 0:
                continue
            pa, ma = s_entries[a]
            if mb != ma:
                raise InternalInconsistency(
                    "restriction-type formula morphism expected during substitution"
                )
            blocks[(b, a)] = inner.res[(pa, pb)].phi.matrix.scale(c)
    fm = FormulaMorphism(src, tgt, block(blocks, row_sizes, col_sizes).rows)
    report = check_formula_morphism(fm)
    if not report:
        raise InternalInconsistency(
            f"substitution produced an invalid formula morphism: {report.problems[0]}"
        )
    return fm


def compose_formulas(outer: Formula, inner: Formula) -> Formula:
    """Compose two formulas: substitute the inner one into every value and
    restriction of the outer one. The result is a formula over the outer
    target valued over the inner base, and its evaluation is the composite
    of the two evaluations (outer applied after inner)."""
    if outer.base != inner.target:
        raise BaseMismatch("outer formula's base must equal inner formula's target")
    at = {q: substitute(outer.at[q], inner) for q in outer.target.elements}
    res = {}
    for (q, q2), psi in outer.res.items():
        fm = substitute_morphism(psi, inner)
        res[(q, q2)] = FormulaMorphism(at[q], at[q2], fm.phi.matrix.rows)
    return Formula(outer.target, at, res)


# --- named constants over the two-element chain ------------------------------

TWO_CHAIN = poset_from_generators(["1", "2"], [("1", "2")])

XI1 = FormulaToPoint(CObject((("1", 1),), TWO_CHAIN), [[1]])
XI2 = FormulaToPoint(CObject((("2", 0),), TWO_CHAIN), [[1]])
XI12 = FormulaToPoint(
    CObject((("1", 1), ("2", 0)), TWO_CHAIN), [[1, 0], [1, 1]]
)
XI121 = FormulaToPoint(
    CObject((("1", 2), ("2", 1), ("1", 1)), TWO_CHAIN),
    [[1, 0, 0], [-1, 1, 0], [1, 0, 1]],
)
XI212 = FormulaToPoint(
    CObject((("2", 1), ("1", 1), ("2", 0)), TWO_CHAIN),
    [[1, 0, 0], [0, 1, 0], [1, 1, 1]],
)

PHI1 = FormulaMorphism(XI12, XI1, [[1, 0]])
PHI2 = FormulaMorphism(XI2, XI12, [[0], [1]])

ALPHA1 = CMorphism(XI1.xi, XI212.xi, [[1], [-1], [0]])
BETA1 = CMorphism(XI212.xi, XI1.xi, [[0, -1, 0]])
ALPHA2 = CMorphism(XI2.xi.shifted(1), XI121.xi, [[0], [1], [0]])
BETA2 = CMorphism(XI121.xi, XI2.xi.shifted(1), [[0, 1, 1]])
H212 = CMorphism(XI212.xi, XI212.xi.shifted(-1), [[0, 0, 1], [0, 0, 0], [0, 0, 0]])
H121 = CMorphism(XI121.xi, XI121.xi.shifted(-1), [[0, 0, 1], [0, 0, 0], [0, 0, 0]])
NU = translation_formula(TWO_CHAIN, 1)

BUILTINS = {
    "xi1": XI1,
    "xi2": XI2,
    "xi12": XI12,
    "xi121": XI121,
    "xi212": XI212,
    "alpha1": ALPHA1,
    "alpha2": ALPHA2,
    "beta1": BETA1,
    "beta2": BETA2,
    "h": H212,
    "nu": NU,
}


# --- JSON --------------------------------------------------------------------

def cobject_to_json(obj: CObject) -> list:
    return [[x, m] for x, m in obj.entries]


def formula_to_point_to_json(f: FormulaToPoint) -> dict:
    return {
        "base": poset_to_json(f.xi.base),
        "xi": cobject_to_json(f.xi),
        "D": f.D.matrix.tolist(),
    }


def formula_to_point_from_json(doc) -> FormulaToPoint:
    if not isinstance(doc, dict):
        raise ParseError("formula JSON must be an object")
    if "builtin" in doc:
        name = doc["builtin"]
        if name not in BUILTINS:
            raise ParseError(
                f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}"
            )
        value = BUILTINS[name]
        if not isinstance(value, FormulaToPoint):
            raise ParseError(f"builtin {name!r} is not a formula to a point")
        return value
    for key in ("base", "xi", "D"):
        if key not in doc:
            raise ParseError(f"formula JSON needs key {key!r}")
    base = poset_from_json(doc["base"])
    if not isinstance(doc["xi"], list) or not all(
        isinstance(e, list) and len(e) == 2 for e in doc["xi"]
    ):
        raise ParseError("'xi' must be a list of [element, degree] pairs")
    xi = CObject(((x, m) for x, m in doc["xi"]), base)
    try:
        return FormulaToPoint(xi, doc["D"], strict=True)
    except (IllegalSupport, ShapeMismatch) as exc:
        raise ParseError(f"invalid formula matrix: {exc}") from exc
