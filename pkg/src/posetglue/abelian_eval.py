"""Bounded complexes of finite-dimensional vector spaces, poset diagrams of
them, and the evaluation functor that turns integer-matrix formulas into
actual complexes, chain maps, and diagram maps.

All matrices are integers; the field only enters through rank computations
(rationals via fraction-free elimination, prime fields via modular
elimination), so every construction is literally identical over every field
and any field-dependence in reported dimensions would expose a bug.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BaseMismatch,
    D2NotZero,
    DiagramAxiomFailure,
    InvalidChainMap,
    NaturalityFailure,
    ParseError,
    ShapeMismatch,
)
from .formula_cat import CMorphism, Formula, FormulaMorphism, FormulaToPoint
from .intmat import Mat, block, rank_exact, rank_mod
from .poset_core import Poset, poset_from_json, poset_to_json
from .rng import SplitMix64, derive_seed

# Modulus for the probabilistic acyclicity fast path over the rationals:
# ranks modulo a prime never exceed rational ranks, so a vanishing modular
# cohomology certifies vanishing rational cohomology.
_FAST_PRIME = 2**31 - 1


@dataclass(frozen=True)
class Field:
    """The rationals (p is None) or the prime field with p elements."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and (
            self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1))
        ):
            raise ParseError(f"{self.p} is not prime")

    @staticmethod
    def parse(text: str) -> "Field":
        if text == "q":
            return Field(None)
        if text.startswith("p:"):
            try:
                p = int(text[2:])
            except ValueError:
                raise ParseError(f"bad field spec {text!r}") from None
            return Field(p)
        raise ParseError(f"field must be 'q' or 'p:<prime>', got {text!r}")

    def rank(self, m: Mat) -> int:
        if self.p is None:
            return rank_exact(m)
        return rank_mod(m, self.p)

    def __str__(self):
        return "q" if self.p is None else f"p:{self.p}"


RATIONALS = Field(None)


class VectComplex:
    """A bounded complex: degree -> dimension, with integer differentials.

    Stored canonically: zero dimensions and zero matrices are dropped, so
    equality is equality of the honest data. The constructor checks that
    consecutive differentials compose to zero.
    """

    __slots__ = ("dims", "d")

    def __init__(self, dims, d, check: bool = True):
        self.dims = {int(i): int(n) for i, n in dims.items() if int(n) != 0}
        if any(n < 0 for n in self.dims.values()):
            raise ShapeMismatch("negative dimension")
        dd = {}
        for i, m in d.items():
            i = int(i)
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if m.nrows != self.dim(i + 1) or m.ncols != self.dim(i):
                raise ShapeMismatch(
                    f"differential at degree {i} must be {self.dim(i + 1)}x{self.dim(i)}"
                )
            if not m.is_zero():
                dd[i] = m
        self.d = dd
        if check:
            for i, m in self.d.items():
                nxt = self.d.get(i + 1)
                if nxt is not None and not nxt.mul(m).is_zero():
                    raise D2NotZero(f"d·d != 0 between degrees {i} and {i + 2}")

    def dim(self, i: int) -> int:
        return self.dims.get(i, 0)

    def diff(self, i: int) -> Mat:
        m = self.d.get(i)
        if m is None:
            return Mat.zero(self.dim(i + 1), self.dim(i))
        return m

    def support(self):
        return sorted(self.dims)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero_object(self) -> bool:
        return not self.dims

    def euler(self) -> int:
        return sum((-1) ** (i % 2) * n for i, n in self.dims.items())

    def __eq__(self, other):
        return (
            isinstance(other, VectComplex)
            and self.dims == other.dims
            and self.d == other.d
        )

    def __hash__(self):
        return hash(
            (tuple(sorted(self.dims.items())), tuple(sorted(self.d.items())))
        )

    def __repr__(self):
        return f"VectComplex(dims={dict(sorted(self.dims.items()))})"


ZERO_COMPLEX = VectComplex({}, {})


class ChainMap:
    """A degreewise integer map between complexes, commuting with d."""

    __slots__ = ("source", "target", "f")

    def __init__(self, source: VectComplex, target: VectComplex, f, check=True):
        self.source = source
        self.target = target
        ff = {}
        for i, m in f.items():
            i = int(i)
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if m.nrows != target.dim(i) or m.ncols != source.dim(i):
                raise ShapeMismatch(
                    f"component at degree {i} must be {target.dim(i)}x{source.dim(i)}"
                )
            if not m.is_zero():
                ff[i] = m
        self.f = ff
        if check:
            degrees = set(self.f) | set(source.d) | set(target.d)
            for i in degrees:
                lhs = self.at(i + 1).mul(source.diff(i))
                rhs = target.diff(i).mul(self.at(i))
                if lhs != rhs:
                    raise InvalidChainMap(f"does not commute with d at degree {i}")

    def at(self, i: int) -> Mat:
        m = self.f.get(i)
        if m is None:
            return Mat.zero(self.target.dim(i), self.source.dim(i))
        return m

    def __eq__(self, other):
        return (
            isinstance(other, ChainMap)
            and self.source == other.source
            and self.target == other.target
            and self.f == other.f
        )

    def __repr__(self):
        return f"ChainMap(degrees {sorted(self.f)})"


def identity_chain_map(K: VectComplex) -> ChainMap:
    return ChainMap(K, K, {i: Mat.identity(n) for i, n in K.dims.items()}, check=False)


def compose_chain_maps(g: ChainMap, f: ChainMap) -> ChainMap:
    if f.target != g.source:
        raise ShapeMismatch("chain maps do not compose")
    degrees = set(f.f) | set(g.f)
    return ChainMap(
        f.source,
        g.target,
        {i: g.at(i).mul(f.at(i)) for i in degrees},
        check=False,
    )


def add_chain_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("can only add parallel chain maps")
    degrees = set(f.f) | set(g.f)
    return ChainMap(
        f.source, f.target, {i: f.at(i).add(g.at(i)) for i in degrees}, check=False
    )


def shift_complex(K: VectComplex, n: int) -> VectComplex:
    """Reindex degrees by n and twist the differentials by (-1)**n."""
    sign = -1 if n % 2 else 1
    return VectComplex(
        {i - n: m for i, m in K.dims.items()},
        {i - n: (mat if sign == 1 else mat.neg()) for i, mat in K.d.items()},
        check=False,
    )


def shift_chain_map(f: ChainMap, n: int) -> ChainMap:
    return ChainMap(
        shift_complex(f.source, n),
        shift_complex(f.target, n),
        {i - n: m for i, m in f.f.items()},
        check=False,
    )


def cone(f: ChainMap) -> VectComplex:
    """The complex with degree-i part K^{i+1} ⊕ L^i and block differential
    [[d_K[1], 0], [f[1], d_L]]."""
    K, L = f.source, f.target
    dims = {}
    degrees = set(K.dims) | set(L.dims) | {i - 1 for i in K.dims}
    for i in degrees:
        dims[i] = K.dim(i + 1) + L.dim(i)
    d = {}
    for i in degrees:
        rows = [K.dim(i + 2), L.dim(i + 1)]
        cols = [K.dim(i + 1), L.dim(i)]
        d[i] = block(
            {
                (0, 0): K.diff(i + 1).neg(),
                (1, 0): f.at(i + 1),
                (1, 1): L.diff(i),
            },
            rows,
            cols,
        )
    return VectComplex(dims, d)


def direct_sum_complexes(parts) -> VectComplex:
    parts = list(parts)
    degrees = set()
    for p in parts:
        degrees |= set(p.dims)
    dims = {i: sum(p.dim(i) for p in parts) for i in degrees}
    d = {}
    for i in degrees:
        rows = [p.dim(i + 1) for p in parts]
        cols = [p.dim(i) for p in parts]
        d[i] = block(
            {(k, k): p.diff(i) for k, p in enumerate(parts)}, rows, cols
        )
    return VectComplex(dims, d, check=False)


def cohomology(K: VectComplex, field: Field = RATIONALS) -> dict:
    """Dimensions of kernel-mod-image in each degree, zeros omitted."""
    out = {}
    degrees = set(K.dims)
    for i in sorted(degrees):
        h = K.dim(i) - field.rank(K.diff(i)) - field.rank(K.diff(i - 1))
        if h:
            out[i] = h
    return out


def _is_acyclic(K: VectComplex, field: Field) -> bool:
    if field.p is not None:
        return not cohomology(K, field)
    # Fast path: modular ranks bound rational ranks from below, and
    # cohomology dimensions from above; a zero table is a certificate.
    degrees = set(K.dims)
    ranks = {i: rank_mod(K.diff(i), _FAST_PRIME) for i in degrees | {i - 1 for i in degrees}}
    if all(K.dim(i) - ranks[i] - ranks[i - 1] == 0 for i in degrees):
        return True
    return not cohomology(K, field)


def is_quasi_iso(f: ChainMap, field: Field = RATIONALS) -> bool:
    """True iff the cone of f is acyclic."""
    return _is_acyclic(cone(f), field)


class PosetDiagram:
    """One complex per poset element plus compatible restriction chain maps.

    Restrictions are stored for every related pair; the constructor checks
    identities on the diagonal and closure under composition (covering
    relations against arbitrary upper bounds, which implies the general
    case by induction along chains).
    """

    __slots__ = ("base", "K", "r")

    def __init__(self, base: Poset, K: dict, r: dict, check: bool = True):
        self.base = base
        self.K = dict(K)
        self.r = dict(r)
        for x in base.elements:
            if x not in self.K:
                raise ParseError(f"no complex at element {x!r}")
        for x, x2 in base.leq:
            if (x, x2) not in self.r:
                if x == x2:
                    self.r[(x, x2)] = identity_chain_map(self.K[x])
                else:
                    raise ParseError(f"no restriction for {x!r} <= {x2!r}")
        if check:
            for (x, x2), f in self.r.items():
                if not base.le(x, x2):
                    raise ParseError(f"restriction for unrelated pair {x!r}, {x2!r}")
                if f.source != self.K[x] or f.target != self.K[x2]:
                    raise ShapeMismatch(f"restriction for {x!r} <= {x2!r} has wrong ends")
            for x in base.elements:
                if self.r[(x, x)] != identity_chain_map(self.K[x]):
                    raise DiagramAxiomFailure(f"restriction at ({x!r},{x!r}) is not the identity")
            from .poset_core import hasse

            for x, x2 in hasse(base).edges:
                for x3 in base.up_set(x2):
                    left = compose_chain_maps(self.r[(x2, x3)], self.r[(x, x2)])
                    if left != self.r[(x, x3)]:
                        raise DiagramAxiomFailure(
                            f"restrictions do not compose along {x!r} <= {x2!r} <= {x3!r}"
                        )

    def stalk(self, x) -> VectComplex:
        return self.K[x]

    def __eq__(self, other):
        return (
            isinstance(other, PosetDiagram)
            and self.base == other.base
            and self.K == other.K
            and self.r == other.r
        )

    def __repr__(self):
        return f"PosetDiagram(over {list(self.base.elements)})"


class DiagramMap:
    """A family of chain maps, one per element, commuting with restrictions."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: PosetDiagram, target: PosetDiagram, components, check=True):
        if source.base != target.base:
            raise BaseMismatch("diagram maps need a common base poset")
        self.source = source
        self.target = target
        self.components = dict(components)
        for x in source.base.elements:
            if x not in self.components:
                raise ParseError(f"no component at element {x!r}")
            c = self.components[x]
            if c.source != source.K[x] or c.target != target.K[x]:
                raise ShapeMismatch(f"component at {x!r} has wrong ends")
        if check:
            from .poset_core import hasse

            for x, x2 in hasse(source.base).edges:
                left = compose_chain_maps(target.r[(x, x2)], self.components[x])
                right = compose_chain_maps(self.components[x2], source.r[(x, x2)])
                if left != right:
                    raise NaturalityFailure((x, x2))

    def component(self, x) -> ChainMap:
        return self.components[x]


def identity_diagram_map(K: PosetDiagram) -> DiagramMap:
    return DiagramMap(
        K, K, {x: identity_chain_map(K.K[x]) for x in K.base.elements}, check=False
    )


def compose_diagram_maps(g: DiagramMap, f: DiagramMap) -> DiagramMap:
    return DiagramMap(
        f.source,
        g.target,
        {
            x: compose_chain_maps(g.components[x], f.components[x])
            for x in f.source.base.elements
        },
        check=False,
    )


def shift_diagram(K: PosetDiagram, n: int) -> PosetDiagram:
    return PosetDiagram(
        K.base,
        {x: shift_complex(c, n) for x, c in K.K.items()},
        {key: shift_chain_map(f, n) for key, f in K.r.items()},
        check=False,
    )


def is_quasi_iso_diagram(f: DiagramMap, field: Field = RATIONALS) -> bool:
    """True iff every component is a quasi-isomorphism."""
    return all(
        is_quasi_iso(f.components[x], field) for x in f.source.base.elements
    )


def cohomology_table(K: PosetDiagram, field: Field = RATIONALS) -> dict:
    """Per-element cohomology dimension tables."""
    return {x: cohomology(K.K[x], field) for x in K.base.elements}


# --- evaluation of formulas ---------------------------------------------------

def _graded_support(obj, K: PosetDiagram):
    """Result degrees t for which some block of the evaluated object is nonzero."""
    degrees = set()
    for x, m in obj.entries:
        for i in K.K[x].dims:
            degrees.add(i - m)
    return degrees


def _eval_object_dims(obj, K: PosetDiagram) -> dict:
    dims = {}
    for t in _graded_support(obj, K):
        total = sum(K.K[x].dim(t + m) for x, m in obj.entries)
        if total:
            dims[t] = total
    return dims


def _eval_graded(phi: CMorphism, K: PosetDiagram) -> dict:
    """The degreewise matrices of the evaluated morphism.

    A degree-preserving entry c at (j, i) contributes c times the restriction
    map; a degree-raising entry contributes c times (-1)**m_i times the
    target differential composed with the restriction map.
    """
    src, tgt = phi.source, phi.target
    out = {}
    degrees = _graded_support(src, K) | _graded_support(tgt, K)
    for t in degrees:
        col_sizes = [K.K[x].dim(t + m) for x, m in src.entries]
        row_sizes = [K.K[x].dim(t + m) for x, m in tgt.entries]
        blocks = {}
        for j, (xj, mj) in enumerate(tgt.entries):
            for i, (xi, mi) in enumerate(src.entries):
                c = phi.matrix[j, i]
                if c == 0 or row_sizes[j] == 0 or col_sizes[i] == 0:
                    continue
                r = K.r[(xi, xj)].at(t + mi)
                if mj == mi:
                    piece = r
                else:  # mj == mi + 1 in canonical form
                    piece = K.K[xj].diff(t + mi).mul(r)
                    if mi % 2:
                        piece = piece.neg()
                if c != 1:
                    piece = piece.scale(c)
                if not piece.is_zero():
                    blocks[(j, i)] = piece
        m = block(blocks, row_sizes, col_sizes)
        if not m.is_zero():
            out[t] = m
    return out


def eval_point(f: FormulaToPoint, K: PosetDiagram) -> VectComplex:
    """Evaluate a formula to a point: the direct sum of shifted stalks with
    the differential assembled from D. The result's d·d = 0 is asserted."""
    if f.xi.base != K.base:
        raise BaseMismatch("formula and diagram live over different posets")
    dims = _eval_object_dims(f.xi, K)
    diff = _eval_graded(f.D, K)
    try:
        return VectComplex(dims, diff, check=True)
    except D2NotZero as exc:
        raise D2NotZero(f"evaluated differential fails to square to zero: {exc}") from exc


def eval_cmorphism(
    phi: CMorphism,
    K: PosetDiagram,
    source: FormulaToPoint | None = None,
    target: FormulaToPoint | None = None,
) -> ChainMap:
    """Evaluate a morphism of graded words on a diagram.

    When the source and target formulas are supplied, the result is checked
    to be a chain map between their evaluations; otherwise the carriers are
    the bare graded objects (zero differential) and no chain condition is
    imposed — that form exists for functor-law checks on raw morphisms.
    """
    if phi.source.base != K.base:
        raise BaseMismatch("morphism and diagram live over different posets")
    graded = _eval_graded(phi, K)
    if source is not None and target is not None:
        src = eval_point(source, K)
        tgt = eval_point(target, K)
        return ChainMap(src, tgt, graded, check=True)
    src = VectComplex(_eval_object_dims(phi.source, K), {}, check=False)
    tgt = VectComplex(_eval_object_dims(phi.target, K), {}, check=False)
    return ChainMap(src, tgt, graded, check=False)


def eval_formula_morphism(fm: FormulaMorphism, K: PosetDiagram) -> ChainMap:
    return eval_cmorphism(fm.phi, K, source=fm.source, target=fm.target)


def eval_point_map(f: FormulaToPoint, g: DiagramMap) -> ChainMap:
    """Apply the functor of a formula to a diagram map: the diagonal map of
    shifted components, verified to be a chain map."""
    src = eval_point(f, g.source)
    tgt = eval_point(f, g.target)
    out = {}
    for t in set(src.dims) | set(tgt.dims):
        col_sizes = [g.source.K[x].dim(t + m) for x, m in f.xi.entries]
        row_sizes = [g.target.K[x].dim(t + m) for x, m in f.xi.entries]
        blocks = {}
        for i, (x, m) in enumerate(f.xi.entries):
            piece = g.components[x].at(t + m)
            if not piece.is_zero():
                blocks[(i, i)] = piece
        out[t] = block(blocks, row_sizes, col_sizes)
    return ChainMap(src, tgt, out, check=True)


def eval_formula(F: Formula, K: PosetDiagram) -> PosetDiagram:
    """Evaluate a poset-shaped formula to a diagram over its target poset."""
    if F.base != K.base:
        raise BaseMismatch("formula and diagram live over different posets")
    stalks = {y: eval_point(F.at[y], K) for y in F.target.elements}
    restrictions = {}
    for (y, y2), fm in F.res.items():
        restrictions[(y, y2)] = ChainMap(
            stalks[y], stalks[y2], _eval_graded(fm.phi, K), check=True
        )
    return PosetDiagram(F.target, stalks, restrictions, check=True)


def eval_formula_map(F: Formula, g: DiagramMap) -> DiagramMap:
    """Apply the functor of a formula to a diagram map, elementwise."""
    src = eval_formula(F, g.source)
    tgt = eval_formula(F, g.target)
    comps = {y: eval_point_map(F.at[y], g) for y in F.target.elements}
    return DiagramMap(src, tgt, comps, check=True)


# --- random generators ---------------------------------------------------------

def _random_elementary(rng: SplitMix64, max_dim: int, window) -> list:
    """A list of elementary pieces ('stalk', i) or ('two', i), respecting the
    per-degree dimension cap inside the window."""
    lo, hi = window
    used = {}
    pieces = []
    for _ in range(rng.randrange(4)):
        if rng.randrange(2) and lo < hi:
            i = lo + rng.randrange(hi - lo)
            if used.get(i, 0) < max_dim and used.get(i + 1, 0) < max_dim:
                pieces.append(("two", i))
                used[i] = used.get(i, 0) + 1
                used[i + 1] = used.get(i + 1, 0) + 1
        else:
            i = lo + rng.randrange(hi - lo + 1)
            if used.get(i, 0) < max_dim:
                pieces.append(("stalk", i))
                used[i] = used.get(i, 0) + 1
    return pieces


def _complex_from_elementary(pieces) -> VectComplex:
    slots = {}
    for k, (kind, i) in enumerate(pieces):
        slots.setdefault(i, []).append((k, 0))
        if kind == "two":
            slots.setdefault(i + 1, []).append((k, 1))
    dims = {i: len(v) for i, v in slots.items()}
    d = {}
    for i in dims:
        if i + 1 not in dims:
            continue
        rows = []
        for kt, part_t in slots[i + 1]:
            row = []
            for ks, part_s in slots[i]:
                row.append(1 if (kt == ks and part_s == 0 and part_t == 1) else 0)
            rows.append(tuple(row))
        d[i] = Mat(dims[i + 1], dims[i], tuple(rows))
    return VectComplex(dims, d, check=False)


def _random_unimodular(rng: SplitMix64, n: int, steps: int = 3):
    """A random integer matrix with determinant ±1, plus its exact inverse."""
    U = Mat.identity(n)
    Uinv = Mat.identity(n)
    if n == 0:
        return U, Uinv
    for _ in range(steps):
        kind = rng.randrange(3)
        if kind == 0 and n >= 2:
            i = rng.randrange(n)
            j = rng.randrange(n)
            if i == j:
                continue
            c = rng.choice([-2, -1, 1, 2])
            E = _shear(n, i, j, c)
            Einv = _shear(n, i, j, -c)
        else:
            i = rng.randrange(n)
            E = Mat.diag([-1 if k == i else 1 for k in range(n)])
            Einv = E
        U = E.mul(U)
        Uinv = Uinv.mul(Einv)
    return U, Uinv


def _shear(n: int, i: int, j: int, c: int) -> Mat:
    rows = [
        tuple(
            1 if r == s else (c if (r == i and s == j) else 0) for s in range(n)
        )
        for r in range(n)
    ]
    return Mat(n, n, tuple(rows))


def _conjugate_complex(K: VectComplex, rng: SplitMix64) -> VectComplex:
    U = {}
    Uinv = {}
    for i, n in K.dims.items():
        U[i], Uinv[i] = _random_unimodular(rng, n)
    d = {}
    for i, m in K.d.items():
        left = U.get(i + 1, Mat.identity(K.dim(i + 1)))
        right = Uinv.get(i, Mat.identity(K.dim(i)))
        d[i] = left.mul(m).mul(right)
    return VectComplex(K.dims, d, check=True)


def random_complex(seed: int, max_dim: int = 3, window=(-2, 2)) -> VectComplex:
    """A deterministic random bounded complex: a sum of stalk and two-term
    identity pieces, conjugated by random unimodular basis changes."""
    rng = seed if isinstance(seed, SplitMix64) else SplitMix64(derive_seed(seed, "complex"))
    pieces = _random_elementary(rng, max_dim, window)
    return _conjugate_complex(_complex_from_elementary(pieces), rng)


class _PieceDiagram:
    """Internal: a diagram assembled from up-set extension pieces.

    Piece k is a complex S_k spread constantly over the up-set of an element
    u_k, with identity restrictions; the stalk at x is the direct sum of the
    pieces whose support contains x, and restrictions are the block
    inclusions. Twisting by unipotent piece-to-piece chain maps hides the
    block structure without breaking any axiom.
    """

    def __init__(self, X: Poset, pieces):
        self.X = X
        self.pieces = list(pieces)  # list of (u, VectComplex)

    def present(self, x):
        return [k for k, (u, _) in enumerate(self.pieces) if self.X.le(u, x)]

    def stalk(self, x) -> VectComplex:
        return direct_sum_complexes(self.pieces[k][1] for k in self.present(x))

    def _restriction(self, x, x2) -> ChainMap:
        src_pieces = self.present(x)
        tgt_pieces = self.present(x2)
        src = self.stalk(x)
        tgt = self.stalk(x2)
        f = {}
        for t in set(src.dims) | set(tgt.dims):
            rows = [self.pieces[k][1].dim(t) for k in tgt_pieces]
            cols = [self.pieces[k][1].dim(t) for k in src_pieces]
            blocks = {}
            for ci, k in enumerate(src_pieces):
                ri = tgt_pieces.index(k)
                n = self.pieces[k][1].dim(t)
                if n:
                    blocks[(ri, ci)] = Mat.identity(n)
            f[t] = block(blocks, rows, cols)
        return ChainMap(src, tgt, f, check=False)

    def diagram(self) -> PosetDiagram:
        stalks = {x: self.stalk(x) for x in self.X.elements}
        r = {
            (x, x2): self._restriction(x, x2)
            for x, x2 in self.X.leq
        }
        return PosetDiagram(self.X, stalks, r, check=False)

    def random_twist_factors(self, rng: SplitMix64, count: int) -> list:
        """Unipotent diagram automorphism factors: null-homotopic constant
        chain maps from piece k into a piece l supported on a larger up-set."""
        factors = []
        pairs = [
            (k, l)
            for k in range(len(self.pieces))
            for l in range(len(self.pieces))
            if k != l and self.X.le(self.pieces[l][0], self.pieces[k][0])
        ]
        if not pairs:
            return factors
        for _ in range(count):
            k, l = rng.choice(pairs)
            Sk, Sl = self.pieces[k][1], self.pieces[l][1]
            h = {
                t: Mat.from_rows(
                    [
                        [rng.randint(-1, 1) for _ in range(Sk.dim(t))]
                        for _ in range(Sl.dim(t - 1))
                    ]
                )
                for t in set(Sk.dims) | {i + 1 for i in Sl.dims}
                if Sk.dim(t) and Sl.dim(t - 1)
            }
            n = {}
            for t in set(Sk.dims) | set(Sl.dims):
                ht = h.get(t, Mat.zero(Sl.dim(t - 1), Sk.dim(t)))
                ht1 = h.get(t + 1, Mat.zero(Sl.dim(t), Sk.dim(t + 1)))
                piece = Sl.diff(t - 1).mul(ht).add(ht1.mul(Sk.diff(t)))
                if not piece.is_zero():
                    n[t] = piece
            if n:
                factors.append((k, l, n))
        return factors

    def twist_matrix(self, x, t, factors, invert: bool = False) -> Mat:
        """The degree-t component at x of the product of (I + N) factors."""
        present = self.present(x)
        sizes = [self.pieces[k][1].dim(t) for k in present]
        total = Mat.identity(sum(sizes))
        for k, l, n in factors:
            if k not in present or t not in n:
                continue
            ri = present.index(l)
            ci = present.index(k)
            blocks = {(i, i): Mat.identity(s) for i, s in enumerate(sizes) if s}
            body = n[t] if not invert else n[t].neg()
            if body.nrows and body.ncols:
                blocks[(ri, ci)] = (
                    body if ri != ci else body.add(Mat.identity(sizes[ri]))
                )
            factor = block(blocks, sizes, sizes)
            total = factor.mul(total) if not invert else total.mul(factor)
        return total

    def twisted_diagram(self, factors) -> PosetDiagram:
        base = self.diagram()
        if not factors:
            return base
        r = {}
        for (x, x2), f in base.r.items():
            if x == x2:
                r[(x, x2)] = f
                continue
            g = {}
            for t in set(f.source.dims) | set(f.target.dims):
                left = self.twist_matrix(x2, t, factors)
                right = self.twist_matrix(x, t, factors, invert=True)
                m = left.mul(f.at(t)).mul(right)
                if not m.is_zero():
                    g[t] = m
            r[(x, x2)] = ChainMap(f.source, f.target, g, check=False)
        return PosetDiagram(self.X, base.K, r, check=True)


def _random_pieces(X: Poset, rng: SplitMix64, max_dim: int, window) -> list:
    budget = {}
    pieces = []
    for _ in range(1 + rng.randrange(3)):
        u = rng.choice(X.elements)
        elem = _random_elementary(rng, max_dim, window)
        S = _conjugate_complex(_complex_from_elementary(elem), rng)
        fits = True
        for x in X.up_set(u):
            for t, n in S.dims.items():
                if budget.get((x, t), 0) + n > max_dim:
                    fits = False
        if not fits or S.is_zero_object():
            continue
        for x in X.up_set(u):
            for t, n in S.dims.items():
                budget[(x, t)] = budget.get((x, t), 0) + n
        pieces.append((u, S))
    if not pieces:
        lo, _hi = window
        pieces.append((rng.choice(X.elements), VectComplex({lo: 1}, {})))
    return pieces


def random_diagram(X: Poset, seed: int, max_dim: int = 3, window=(-2, 2)) -> PosetDiagram:
    """A deterministic random diagram over X: a twisted sum of up-set pieces.

    The same seed yields the same diagram regardless of the field in use —
    all entries are integers; fields only enter when ranks are computed.
    """
    rng = SplitMix64(derive_seed(seed, "diagram"))
    pd = _PieceDiagram(X, _random_pieces(X, rng, max_dim, window))
    factors = pd.random_twist_factors(rng, count=2)
    return pd.twisted_diagram(factors)


def random_qis_map(X: Poset, seed: int, max_dim: int = 3, window=(-2, 2)) -> DiagramMap:
    """A deterministic random quasi-isomorphism of diagrams over X: the
    inclusion into a sum with extra acyclic pieces, plus null-homotopic
    noise, conjugated by independent twists on both sides."""
    rng = SplitMix64(derive_seed(seed, "qis"))
    src_pieces = _random_pieces(X, rng, max_dim, window)
    lo, hi = window
    extra = []
    for _ in range(1 + rng.randrange(2)):
        u = rng.choice(X.elements)
        i = lo + rng.randrange(max(hi - lo, 1))
        extra.append((u, VectComplex({i: 1, i + 1: 1}, {i: [[1]]})))
    src_pd = _PieceDiagram(X, src_pieces)
    tgt_pd = _PieceDiagram(X, src_pieces + extra)
    src_factors = src_pd.random_twist_factors(rng, count=1)
    tgt_factors = tgt_pd.random_twist_factors(rng, count=1)
    source = src_pd.twisted_diagram(src_factors)
    target = tgt_pd.twisted_diagram(tgt_factors)
    # Null-homotopic noise on the block inclusion, built piece-constantly so
    # it commutes with the untwisted restrictions.
    noise_pairs = [
        (k, l)
        for k in range(len(src_pieces))
        for l in range(len(src_pieces) + len(extra))
        if X.le((src_pieces + extra)[l][0], src_pieces[k][0])
    ]
    noise = []
    if noise_pairs:
        for _ in range(rng.randrange(3)):
            k, l = rng.choice(noise_pairs)
            Sk = src_pieces[k][1]
            Tl = (src_pieces + extra)[l][1]
            h = {
                t: Mat.from_rows(
                    [
                        [rng.randint(-1, 1) for _ in range(Sk.dim(t))]
                        for _ in range(Tl.dim(t - 1))
                    ]
                )
                for t in set(Sk.dims) | {i + 1 for i in Tl.dims}
                if Sk.dim(t) and Tl.dim(t - 1)
            }
            n = {}
            for t in set(Sk.dims) | set(Tl.dims):
                ht = h.get(t, Mat.zero(Tl.dim(t - 1), Sk.dim(t)))
                ht1 = h.get(t + 1, Mat.zero(Tl.dim(t), Sk.dim(t + 1)))
                piece = Tl.diff(t - 1).mul(ht).add(ht1.mul(Sk.diff(t)))
                if not piece.is_zero():
                    n[t] = piece
            if n:
                noise.append((k, l, n))
    components = {}
    for x in X.elements:
        src_present = src_pd.present(x)
        tgt_present = tgt_pd.present(x)
        f = {}
        for t in set(source.K[x].dims) | set(target.K[x].dims):
            rows = [tgt_pd.pieces[k][1].dim(t) for k in tgt_present]
            cols = [src_pd.pieces[k][1].dim(t) for k in src_present]
            blocks = {}
            for ci, k in enumerate(src_present):
                n = src_pd.pieces[k][1].dim(t)
                if n:
                    blocks[(tgt_present.index(k), ci)] = Mat.identity(n)
            for k, l, n in noise:
                if k in src_present and t in n:
                    ri, ci = tgt_present.index(l), src_present.index(k)
                    prev = blocks.get((ri, ci), Mat.zero(rows[ri], cols[ci]))
                    blocks[(ri, ci)] = prev.add(n[t])
            raw = block(blocks, rows, cols)
            left = tgt_pd.twist_matrix(x, t, tgt_factors)
            right = src_pd.twist_matrix(x, t, src_factors, invert=True)
            m = left.mul(raw).mul(right)
            if not m.is_zero():
                f[t] = m
        components[x] = ChainMap(source.K[x], target.K[x], f, check=True)
    return DiagramMap(source, target, components, check=True)


def random_ses(X: Poset, seed: int, max_dim: int = 2, window=(-2, 2)):
    """A deterministic random degreewise-split short exact sequence of
    diagrams: returns (inclusion, projection) with a twisted extension in
    the middle."""
    rng = SplitMix64(derive_seed(seed, "ses"))
    left_pieces = _random_pieces(X, rng, max_dim, window)
    right_pieces = _random_pieces(X, rng, max_dim, window)
    left_pd = _PieceDiagram(X, left_pieces)
    right_pd = _PieceDiagram(X, right_pieces)
    left = left_pd.diagram()
    right = right_pd.diagram()
    # Extension datum: a piece-constant graded map from the right part into
    # the left part, bent into an off-diagonal differential block.
    pairs = [
        (k, l)
        for k in range(len(right_pieces))
        for l in range(len(left_pieces))
        if X.le(left_pieces[l][0], right_pieces[k][0])
    ]
    bends = []
    for _ in range(rng.randrange(3) if pairs else 0):
        k, l = rng.choice(pairs)
        Rk, Ll = right_pieces[k][1], left_pieces[l][1]
        h = {
            t: Mat.from_rows(
                [
                    [rng.randint(-1, 1) for _ in range(Rk.dim(t))]
                    for _ in range(Ll.dim(t))
                ]
            )
            for t in set(Rk.dims)
            if Rk.dim(t) and Ll.dim(t)
        }
        tmat = {}
        for t in set(Rk.dims) | set(Ll.dims):
            ht = h.get(t, Mat.zero(Ll.dim(t), Rk.dim(t)))
            ht1 = h.get(t + 1, Mat.zero(Ll.dim(t + 1), Rk.dim(t + 1)))
            piece = Ll.diff(t).mul(ht).sub(ht1.mul(Rk.diff(t)))
            if not piece.is_zero():
                tmat[t] = piece
        if tmat:
            bends.append((k, l, tmat))
    middle_K = {}
    middle_r = {}
    for x in X.elements:
        lp = left_pd.present(x)
        rp = right_pd.present(x)
        Lx, Rx = left.K[x], right.K[x]
        dims = {
            t: Lx.dim(t) + Rx.dim(t)
            for t in set(Lx.dims) | set(Rx.dims)
        }
        d = {}
        for t in set(dims) | {t - 1 for t in dims}:
            rows = [Lx.dim(t + 1), Rx.dim(t + 1)]
            cols = [Lx.dim(t), Rx.dim(t)]
            bend_block = Mat.zero(Lx.dim(t + 1), Rx.dim(t))
            for k, l, tmat in bends:
                if k in rp and t in tmat:
                    row_sizes = [left_pd.pieces[i][1].dim(t + 1) for i in lp]
                    col_sizes = [right_pd.pieces[i][1].dim(t) for i in rp]
                    bend_block = bend_block.add(
                        block(
                            {(lp.index(l), rp.index(k)): tmat[t]},
                            row_sizes,
                            col_sizes,
                        )
                    )
            d[t] = block(
                {
                    (0, 0): Lx.diff(t),
                    (0, 1): bend_block,
                    (1, 1): Rx.diff(t),
                },
                rows,
                cols,
            )
        middle_K[x] = VectComplex(dims, d, check=True)
    for x, x2 in X.leq:
        f = {}
        src, tgt = middle_K[x], middle_K[x2]
        for t in set(src.dims) | set(tgt.dims):
            rows = [left.K[x2].dim(t), right.K[x2].dim(t)]
            cols = [left.K[x].dim(t), right.K[x].dim(t)]
            f[t] = block(
                {
                    (0, 0): left.r[(x, x2)].at(t),
                    (1, 1): right.r[(x, x2)].at(t),
                },
                rows,
                cols,
            )
        middle_r[(x, x2)] = ChainMap(src, tgt, f, check=True)
    middle = PosetDiagram(X, middle_K, middle_r, check=True)
    incl_components = {}
    proj_components = {}
    for x in X.elements:
        Lx, Rx, Mx = left.K[x], right.K[x], middle.K[x]
        fi = {}
        fp = {}
        for t in set(Mx.dims):
            fi[t] = block(
                {(0, 0): Mat.identity(Lx.dim(t))},
                [Lx.dim(t), Rx.dim(t)],
                [Lx.dim(t)],
            )
            fp[t] = block(
                {(0, 1): Mat.identity(Rx.dim(t))},
                [Rx.dim(t)],
                [Lx.dim(t), Rx.dim(t)],
            )
        incl_components[x] = ChainMap(Lx, Mx, fi, check=True)
        proj_components[x] = ChainMap(Mx, Rx, fp, check=True)
    incl = DiagramMap(left, middle, incl_components, check=True)
    proj = DiagramMap(middle, right, proj_components, check=True)
    return incl, proj


# --- JSON ----------------------------------------------------------------------

def complex_to_json(K: VectComplex) -> dict:
    return {
        "dims": {str(i): n for i, n in sorted(K.dims.items())},
        "d": {str(i): m.tolist() for i, m in sorted(K.d.items())},
    }


def complex_from_json(doc) -> VectComplex:
    if not isinstance(doc, dict) or "dims" not in doc:
        raise ParseError("complex JSON needs a 'dims' object")
    try:
        dims = {int(i): int(n) for i, n in doc["dims"].items()}
        d = {int(i): m for i, m in doc.get("d", {}).items()}
    except (TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad complex JSON: {exc}") from exc
    try:
        return VectComplex(dims, d, check=True)
    except (ShapeMismatch, D2NotZero) as exc:
        raise ParseError(f"invalid complex: {exc}") from exc


def chain_map_degrees_to_json(f: ChainMap) -> dict:
    return {str(i): m.tolist() for i, m in sorted(f.f.items())}


def diagram_to_json(K: PosetDiagram) -> dict:
    from .poset_core import hasse

    edges = sorted(hasse(K.base).edges, key=lambda e: (K.base.index(e[0]), K.base.index(e[1])))
    return {
        "poset": poset_to_json(K.base),
        "stalks": {x: complex_to_json(K.K[x]) for x in K.base.elements},
        "maps": [
            {"from": a, "to": b, "f": chain_map_degrees_to_json(K.r[(a, b)])}
            for a, b in edges
        ],
    }


def diagram_from_json(doc) -> PosetDiagram:
    from .poset_core import hasse

    if not isinstance(doc, dict) or "poset" not in doc or "stalks" not in doc:
        raise ParseError("diagram JSON needs 'poset' and 'stalks'")
    base = poset_from_json(doc["poset"])
    stalks = {}
    for x in base.elements:
        if x not in doc["stalks"]:
            raise ParseError(f"no stalk for element {x!r}")
        stalks[x] = complex_from_json(doc["stalks"][x])
    cover_maps = {}
    for entry in doc.get("maps", []):
        a, b = entry.get("from"), entry.get("to")
        if not base.lt(a, b):
            raise ParseError(f"map for non-edge {a!r} -> {b!r}")
        f = {int(i): m for i, m in entry.get("f", {}).items()}
        try:
            cover_maps[(a, b)] = ChainMap(stalks[a], stalks[b], f, check=True)
        except (ShapeMismatch, InvalidChainMap) as exc:
            raise ParseError(f"invalid map {a!r} -> {b!r}: {exc}") from exc
    edges = hasse(base).edges
    for a, b in edges:
        if (a, b) not in cover_maps:
            cover_maps[(a, b)] = ChainMap(
                stalks[a], stalks[b], {}, check=False
            )
    # Infer all composite restrictions along covering chains, then let the
    # diagram constructor check path-independence.
    r = {(x, x): identity_chain_map(stalks[x]) for x in base.elements}
    r.update(cover_maps)
    order = sorted(base.elements, key=lambda e: base.height(e))
    for a in base.elements:
        for b in order:
            if (a, b) in r or not base.lt(a, b):
                continue
            for c in base.elements:
                if (a, c) in r and (c, b) in cover_maps:
                    r[(a, b)] = compose_chain_maps(cover_maps[(c, b)], r[(a, c)])
                    break
    try:
        return PosetDiagram(base, stalks, r, check=True)
    except (DiagramAxiomFailure, ShapeMismatch, ParseError) as exc:
        raise ParseError(f"invalid diagram: {exc}") from exc
