"""Shared oracle helpers: independent exact linear algebra over the rationals.

The library computes ranks and quasi-isomorphism verdicts its own way (integer
pivoting, mapping cones).  These helpers redo the same questions from scratch
with fractions.Fraction row reduction and induced maps on cohomology, so the
tests compare two genuinely different computations.
"""

from __future__ import annotations

from fractions import Fraction


def rref(rows: list[list]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form; returns (matrix, pivot column indices)."""
    m = [[Fraction(v) for v in row] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def frac_rank(rows: list[list]) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: list[list], ncols: int) -> list[list[Fraction]]:
    """A basis of the kernel, as column vectors of length ncols."""
    if ncols == 0:
        return []
    if not rows:
        rows = [[0] * ncols]
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(v)
    return basis


def matvec(rows: list[list], v: list) -> list[Fraction]:
    return [sum(Fraction(a) * b for a, b in zip(row, v)) for row in rows]


def matmul(a: list[list], b: list[list]) -> list[list[Fraction]]:
    if not a:
        return []
    inner = len(a[0])
    assert inner == len(b), f"shape mismatch: {len(a)}x{inner} times {len(b)}x?"
    bw = len(b[0]) if b else 0
    return [
        [sum(Fraction(row[k]) * Fraction(b[k][j]) for k in range(inner)) for j in range(bw)]
        for row in a
    ]


def columns_rank(cols: list[list]) -> int:
    """Rank of the matrix whose columns are the given vectors."""
    if not cols:
        return 0
    rows = [[col[r] for col in cols] for r in range(len(cols[0]))]
    return frac_rank(rows)


def nonzeros(rows: list[list]) -> dict:
    """Positions of nonzero entries; shape-degenerate zero matrices compare equal."""
    return {
        (i, j): v
        for i, row in enumerate(rows)
        for j, v in enumerate(row)
        if v != 0
    }


def induced_qis(f) -> bool:
    """Independent quasi-isomorphism oracle for a chain map over the rationals.

    Checks, degree by degree, that the cohomology dimensions agree and that
    the induced map on cohomology is surjective (hence bijective): the image
    of the kernel of d_K under f, together with the image of d_L, must span
    the kernel of d_L.
    """
    K, L = f.source, f.target
    for n in sorted(set(K.dims) | set(L.dims) | {d + 1 for d in set(K.dims) | set(L.dims)}):
        dK, dKprev = K.diff(n).tolist(), K.diff(n - 1).tolist()
        dL, dLprev = L.diff(n).tolist(), L.diff(n - 1).tolist()
        hK = K.dim(n) - frac_rank(dK) - frac_rank(dKprev)
        hL = L.dim(n) - frac_rank(dL) - frac_rank(dLprev)
        if hK != hL:
            return False
        if hL == 0:
            continue
        zK = nullspace(dK, K.dim(n))
        fn = f.at(n).tolist()
        image_cols = [matvec(fn, v) for v in zK]
        if dLprev and dLprev[0]:
            image_cols += [[row[j] for row in dLprev] for j in range(len(dLprev[0]))]
        dim_zL = L.dim(n) - frac_rank(dL)
        if columns_rank(image_cols) != dim_zL:
            return False
    return True


def frac_cohomology(K) -> dict:
    """Independent cohomology-dimension table of a complex, zeros omitted."""
    out = {}
    for n in sorted(K.dims):
        h = K.dim(n) - frac_rank(K.diff(n).tolist()) - frac_rank(K.diff(n - 1).tolist())
        if h:
            out[n] = h
    return out


def brute_closure(elements, pairs) -> frozenset:
    """Reflexive-transitive closure of generating pairs, via Warshall."""
    le = {(e, e) for e in elements}
    le.update(pairs)
    changed = True
    while changed:
        changed = False
        for a, b in list(le):
            for c, d in list(le):
                if b == c and (a, d) not in le:
                    le.add((a, d))
                    changed = True
    return frozenset(le)


def modp_rank(rows: list[list], p: int) -> int:
    """Rank over the prime field with p elements, by plain elimination."""
    m = [[v % p for v in row] for row in rows]
    if not m or not m[0]:
        return 0
    rank = 0
    ncols = len(m[0])
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def modp_cohomology(K, p: int) -> dict:
    out = {}
    for n in sorted(K.dims):
        h = (
            K.dim(n)
            - modp_rank(K.diff(n).tolist(), p)
            - modp_rank(K.diff(n - 1).tolist(), p)
        )
        if h:
            out[n] = h
    return out


# --- random words and functor-law instances -------------------------------------

def random_cobject(rng, base, max_len: int = 3, degrees=(-1, 0, 1)):
    from posetglue.formula_cat import CObject

    n = 1 + rng.randrange(max_len)
    entries = tuple(
        (rng.choice(base.elements), rng.choice(degrees)) for _ in range(n)
    )
    return CObject(entries, base)


def random_cmorphism(rng, src, tgt):
    from posetglue.formula_cat import CMorphism

    rows = [[rng.randint(-2, 2) for _ in range(len(src))] for _ in range(len(tgt))]
    return CMorphism(src, tgt, rows)


def _law_xi(seed: int):
    from posetglue.formula_cat import XI1, XI2, XI12, XI121, XI212

    return (XI1, XI2, XI12, XI121, XI212)[seed % 5]


def _carrier_degrees(obj, K) -> set:
    return {i - m for x, m in obj.entries for i in K.K[x].dims}


def _diagonal_eval(obj, g, t: int) -> list[list]:
    """The degree-t block-diagonal matrix of a diagram map on a word carrier."""
    row_sizes = [g.target.K[x].dim(t + m) for x, m in obj.entries]
    col_sizes = [g.source.K[x].dim(t + m) for x, m in obj.entries]
    out = [[0] * sum(col_sizes) for _ in range(sum(row_sizes))]
    r0 = 0
    c0 = 0
    for (x, m), nr, nc in zip(obj.entries, row_sizes, col_sizes):
        piece = g.components[x].at(t + m).tolist()
        for i in range(nr):
            for j in range(nc):
                out[r0 + i][c0 + j] = piece[i][j]
        r0 += nr
        c0 += nc
    return out


def eta_composition_holds(seed: int) -> bool:
    """Evaluating a composite of word morphisms equals composing evaluations."""
    from posetglue.abelian_eval import eval_cmorphism, random_diagram
    from posetglue.formula_cat import TWO_CHAIN, compose
    from posetglue.rng import SplitMix64, derive_seed

    rng = SplitMix64(derive_seed(seed, "etafunc"))
    K = random_diagram(TWO_CHAIN, derive_seed(seed, "K"), max_dim=2, window=(-1, 1))
    a = random_cobject(rng, TWO_CHAIN)
    b = random_cobject(rng, TWO_CHAIN)
    c = random_cobject(rng, TWO_CHAIN)
    phi = random_cmorphism(rng, a, b)
    psi = random_cmorphism(rng, b, c)
    lhs = eval_cmorphism(compose(psi, phi), K)
    ephi = eval_cmorphism(phi, K)
    epsi = eval_cmorphism(psi, K)
    for t in set(lhs.f) | set(ephi.f) | set(epsi.f):
        want = matmul(epsi.at(t).tolist(), ephi.at(t).tolist())
        if nonzeros(lhs.at(t).tolist()) != nonzeros(want):
            return False
    return True


def eta_naturality_holds(seed: int) -> bool:
    """Evaluated word morphisms commute with diagram maps on the carriers."""
    from posetglue.abelian_eval import eval_cmorphism, random_qis_map
    from posetglue.formula_cat import TWO_CHAIN
    from posetglue.rng import SplitMix64, derive_seed

    rng = SplitMix64(derive_seed(seed, "etanat"))
    g = random_qis_map(TWO_CHAIN, derive_seed(seed, "g"), max_dim=2, window=(-1, 1))
    a = random_cobject(rng, TWO_CHAIN)
    b = random_cobject(rng, TWO_CHAIN)
    phi = random_cmorphism(rng, a, b)
    at_src = eval_cmorphism(phi, g.source)
    at_tgt = eval_cmorphism(phi, g.target)
    degrees = (
        set(at_src.f)
        | set(at_tgt.f)
        | _carrier_degrees(a, g.source)
        | _carrier_degrees(a, g.target)
        | _carrier_degrees(b, g.source)
        | _carrier_degrees(b, g.target)
    )
    for t in degrees:
        left = matmul(_diagonal_eval(b, g, t), at_src.at(t).tolist())
        right = matmul(at_tgt.at(t).tolist(), _diagonal_eval(a, g, t))
        if nonzeros(left) != nonzeros(right):
            return False
    return True


def ses_preservation_holds(seed: int) -> bool:
    """A formula to a point sends a short exact sequence to one, degreewise."""
    from posetglue.abelian_eval import eval_point_map, random_ses
    from posetglue.formula_cat import TWO_CHAIN
    from posetglue.rng import derive_seed

    incl, proj = random_ses(TWO_CHAIN, derive_seed(seed, "ses"), max_dim=2, window=(-1, 1))
    xi = _law_xi(seed)
    Fi = eval_point_map(xi, incl)
    Fp = eval_point_map(xi, proj)
    for t in set(Fi.source.dims) | set(Fi.target.dims) | set(Fp.target.dims):
        A = Fi.at(t).tolist()
        B = Fp.at(t).tolist()
        if frac_rank(A) != Fi.source.dim(t):
            return False
        if frac_rank(B) != Fp.target.dim(t):
            return False
        if any(v != 0 for row in matmul(B, A) for v in row):
            return False
        if frac_rank(A) + frac_rank(B) != Fi.target.dim(t):
            return False
    return True


def qis_preservation_holds(seed: int) -> bool:
    """A formula to a point sends quasi-isomorphisms to quasi-isomorphisms."""
    from posetglue.abelian_eval import eval_point_map, is_quasi_iso, random_qis_map
    from posetglue.formula_cat import TWO_CHAIN
    from posetglue.rng import derive_seed

    g = random_qis_map(TWO_CHAIN, derive_seed(seed, "qis"), max_dim=2, window=(-1, 1))
    return is_quasi_iso(eval_point_map(_law_xi(seed), g))
