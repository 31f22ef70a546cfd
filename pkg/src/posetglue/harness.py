"""Construction and randomized verification of glued-order equivalences.

Given gluing data (X, Y, witness sets) this module builds the two glued
orders, the pair of formula diagrams connecting complexes over one order to
complexes over the other, and the unit/counit transformations exhibiting the
round trips as shifts.  Each construction is verified twice: symbolically
(intertwining, naturality, commutativity, retract homotopies, all exact over
the integers) and numerically, by evaluating on seeded random diagrams and
checking quasi-isomorphisms over a chosen coefficient field.

Verification runs return an :class:`EquivalenceCertificate`: a named list of
structural checks plus one record per randomized trial, JSON-ready and
deterministic for a given seed.  The certificate data is identical for every
coefficient field; a discrepancy between fields aborts the run.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .abelian_eval import (
    RATIONALS,
    DiagramMap,
    Field,
    PosetDiagram,
    cohomology_table,
    eval_formula,
    eval_formula_morphism,
    is_quasi_iso_diagram,
    random_diagram,
    shift_diagram,
)
from .errors import (
    CommutativityFailure,
    DiagramAxiomFailure,
    InternalInconsistency,
    NaturalityFailure,
    NoPathFound,
    NotATree,
    ParseError,
    SizeLimit,
)
from .formula_cat import (
    ALPHA1,
    ALPHA2,
    BETA1,
    BETA2,
    H121,
    H212,
    NU,
    TWO_CHAIN,
    XI1,
    XI2,
    XI12,
    XI121,
    XI212,
    CMorphism,
    CObject,
    Formula,
    FormulaMorphism,
    FormulaToPoint,
    PHI1,
    PHI2,
    check_formula,
    check_formula_morphism,
    check_homotopy,
    compose,
    compose_formulas,
    shift,
    substitute,
    translation_formula,
)
from .gluing import (
    GluingData,
    build_minus,
    build_plus,
    cross_witness,
    from_bgp,
    from_function,
    gluing_from_json,
    gluing_to_json,
    ordinal_witness,
    validate_gluing,
)
from .intmat import Mat
from .poset_core import Poset, hasse, is_isomorphic, poset_from_generators
from .rng import SplitMix64, derive_seed

__all__ = [
    "TWO_CHAIN_PLUS",
    "TWO_CHAIN_MINUS",
    "TrialRecord",
    "EquivalenceCertificate",
    "EpsilonTransform",
    "build_theorem_formulas",
    "build_epsilons",
    "verify_equivalence",
    "verify_two_chain",
    "verify_x1z",
    "verify_bgp_path",
    "random_gluing",
    "figure_one_poset",
    "figure_one_gluing",
    "FIGURE_ONE_PAIRS",
    "counterexample_data",
]


# --- the two-chain instance ---------------------------------------------------

#: The plus-side formula over the two-element chain: the value at "1" is the
#: stalk at "2" and the value at "2" is the extension of both stalks.
TWO_CHAIN_PLUS = Formula(
    TWO_CHAIN, {"1": XI2, "2": XI12}, {("1", "2"): PHI2}
)

#: The minus-side formula over the two-element chain, inverse to the plus
#: side up to shift.
TWO_CHAIN_MINUS = Formula(
    TWO_CHAIN, {"1": XI12, "2": XI1}, {("1", "2"): PHI1}
)


# --- certificates --------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    """One randomized trial: its seed, verdict, and cohomology tables."""

    seed: int
    verdict: bool
    tables: dict

    def to_json(self) -> dict:
        return {"seed": self.seed, "verdict": self.verdict, "tables": self.tables}


@dataclass(frozen=True)
class EquivalenceCertificate:
    """Outcome of a verification run: structural checks plus trial records.

    `structural` is a tuple of (name, passed) pairs for the symbolic checks;
    `trials` holds one :class:`TrialRecord` per randomized instance.  The
    run is considered passing when every structural check and every trial
    verdict holds.
    """

    description: str
    config: dict
    structural: tuple
    trials: tuple

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.structural) and all(
            t.verdict for t in self.trials
        )

    def to_json(self) -> dict:
        return {
            "description": self.description,
            "config": self.config,
            "structural": [
                {"name": name, "pass": passed} for name, passed in self.structural
            ],
            "trials": [t.to_json() for t in self.trials],
            "ok": self.ok,
        }


def _run_config(trials, seed, field, max_dim, window) -> dict:
    return {
        "trials": trials,
        "seed": seed,
        "field": str(field),
        "max_dim": max_dim,
        "window": list(window),
    }


def _table_json(K: PosetDiagram, field: Field) -> dict:
    return {
        x: {str(i): n for i, n in sorted(row.items())}
        for x, row in cohomology_table(K, field).items()
    }


def _eval_checked(F: Formula, K: PosetDiagram) -> PosetDiagram:
    """Evaluate a formula and audit every stalk's Euler characteristic.

    The evaluation of a value with entries (x_i, m_i) must have Euler
    characteristic sum_i (-1)^{m_i} chi(K_{x_i}); a mismatch means the
    evaluator itself is broken, so it raises rather than failing the trial.
    """
    T = eval_formula(F, K)
    for y in F.target.elements:
        expected = sum(
            (-1) ** (m % 2) * K.K[x].euler() for x, m in F.at[y].xi.entries
        )
        if T.K[y].euler() != expected:
            raise InternalInconsistency(
                f"Euler characteristic at {y!r} is {T.K[y].euler()}, "
                f"expected {expected}"
            )
    return T


# --- natural transformations between formulas ---------------------------------

class EpsilonTransform:
    """A natural transformation between two formulas over a common target.

    Components are formula morphisms, one per target element.  The
    constructor checks that each component intertwines the value matrices
    (DiagramAxiomFailure otherwise) and that the components commute with the
    restrictions across every Hasse edge of the target (NaturalityFailure,
    with the offending edge as witness).
    """

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Formula, target: Formula, components: dict):
        if source.target != target.target:
            raise ParseError("source and target formulas have different shapes")
        if source.base != target.base:
            raise ParseError("source and target formulas have different values")
        self.source = source
        self.target = target
        self.components = {}
        for y in source.target.elements:
            if y not in components:
                raise ParseError(f"no component at element {y!r}")
            fm = components[y]
            if not isinstance(fm, FormulaMorphism):
                fm = FormulaMorphism(source.at[y], target.at[y], fm)
            if fm.source != source.at[y] or fm.target != target.at[y]:
                raise ParseError(f"component at {y!r} has wrong ends")
            report = check_formula_morphism(fm)
            if not report:
                raise DiagramAxiomFailure(
                    f"component at {y!r} is invalid: {report.problems[0]}"
                )
            self.components[y] = fm
        for a, b in hasse(source.target).edges:
            left = compose(self.target.res[(a, b)].phi, self.components[a].phi)
            right = compose(self.components[b].phi, self.source.res[(a, b)].phi)
            if left != right:
                raise NaturalityFailure((a, b))

    def evaluate(self, K: PosetDiagram) -> DiagramMap:
        """The evaluated transformation at a diagram, as a map of diagrams."""
        src = _eval_checked(self.source, K)
        tgt = _eval_checked(self.target, K)
        comps = {
            y: eval_formula_morphism(self.components[y], K)
            for y in self.source.target.elements
        }
        return DiagramMap(src, tgt, comps)


# --- the theorem formulas for a gluing -----------------------------------------

def _stalk_value(base: Poset, x, degree: int) -> FormulaToPoint:
    return FormulaToPoint(CObject(((x, degree),), base), [[1]])


def _arrow_formula(base: Poset, bottom, top, matrix) -> Formula:
    """A formula over the two-chain with the given stalk words as values."""
    f1 = FormulaToPoint(CObject(bottom, base), Mat.identity(len(bottom)))
    f2 = FormulaToPoint(CObject(top, base), Mat.identity(len(top)))
    return Formula(
        TWO_CHAIN,
        {"1": f1, "2": f2},
        {("1", "2"): FormulaMorphism(f1, f2, matrix)},
    )


def _check_commutativity(target: Poset, at: dict, res: dict) -> None:
    """Raise CommutativityFailure on the first non-commuting triangle."""
    for a, b in target.leq:
        if a == b:
            continue
        for c in target.up_set(b):
            if c == b:
                continue
            left = compose(res[(b, c)].phi, res[(a, b)].phi)
            if left != res[(a, c)].phi:
                raise CommutativityFailure(
                    (a, c),
                    f"via {b!r}: difference "
                    f"{left.matrix.sub(res[(a, c)].phi.matrix).tolist()}",
                )


def _permutation_block(g: GluingData, x, x2) -> dict:
    """Positions (image index, source index) of the transfer bijection."""
    transfer = g.phi[(x, x2)]
    target_index = {y: j for j, y in enumerate(g.Yx[x2])}
    return {(target_index[transfer[y]], i): 1 for i, y in enumerate(g.Yx[x])}


def _build_xi_plus(g: GluingData, plus, minus) -> Formula:
    """The formula carrying diagrams over the plus order to the minus order.

    At y in Y the value is the stalk at y; at x in X it is the extension of
    the stalk at x (shifted up) by the stalks over the witness set of x.
    """
    base = plus.poset
    at = {}
    for y in g.Y.elements:
        at[y] = _stalk_value(base, y, 0)
    for x in g.X.elements:
        ys = g.Yx[x]
        if not ys:
            at[x] = _stalk_value(base, x, 1)
            continue
        arrow = _arrow_formula(
            base,
            ((x, 0),),
            tuple((y, 0) for y in ys),
            [[1] for _ in ys],
        )
        at[x] = substitute(XI12, arrow)

    X_set = set(g.X.elements)
    res = {}
    for a, b in minus.poset.leq:
        if a == b:
            continue
        if a not in X_set and b not in X_set:
            res[(a, b)] = FormulaMorphism(at[a], at[b], [[1]])
        elif a in X_set and b in X_set:
            k, k2 = len(g.Yx[a]), len(g.Yx[b])
            rows = [[0] * (1 + k) for _ in range(1 + k2)]
            rows[0][0] = 1
            for (j, i), c in _permutation_block(g, a, b).items():
                rows[1 + j][1 + i] = c
            res[(a, b)] = FormulaMorphism(at[a], at[b], rows)
        else:
            # a in Y below b = x in X: pick out the witness coordinate.
            w = cross_witness(minus, a, b)
            rows = [[0] for _ in range(1 + len(g.Yx[b]))]
            rows[1 + g.Yx[b].index(w)][0] = 1
            res[(a, b)] = FormulaMorphism(at[a], at[b], rows)
    _check_commutativity(minus.poset, at, res)
    return Formula(minus.poset, at, res)


def _build_xi_minus(g: GluingData, plus, minus) -> Formula:
    """The formula carrying diagrams over the minus order to the plus order.

    At y in Y the value is the shifted stalk at y; at x in X it is the
    extension of the shifted witness stalks by the stalk at x.
    """
    base = minus.poset
    at = {}
    for y in g.Y.elements:
        at[y] = _stalk_value(base, y, 1)
    for x in g.X.elements:
        ys = g.Yx[x]
        if not ys:
            at[x] = _stalk_value(base, x, 0)
            continue
        arrow = _arrow_formula(
            base,
            tuple((y, 0) for y in ys),
            ((x, 0),),
            [[1] * len(ys)],
        )
        at[x] = substitute(XI12, arrow)

    X_set = set(g.X.elements)
    res = {}
    for a, b in plus.poset.leq:
        if a == b:
            continue
        if a not in X_set and b not in X_set:
            res[(a, b)] = FormulaMorphism(at[a], at[b], [[1]])
        elif a in X_set and b in X_set:
            k, k2 = len(g.Yx[a]), len(g.Yx[b])
            rows = [[0] * (k + 1) for _ in range(k2 + 1)]
            rows[k2][k] = 1
            for (j, i), c in _permutation_block(g, a, b).items():
                rows[j][i] = c
            res[(a, b)] = FormulaMorphism(at[a], at[b], rows)
        else:
            # a = x in X below b in Y: project onto the witness coordinate.
            w = cross_witness(plus, a, b)
            row = [0] * (len(g.Yx[a]) + 1)
            row[g.Yx[a].index(w)] = 1
            res[(a, b)] = FormulaMorphism(at[a], at[b], [row])
    _check_commutativity(plus.poset, at, res)
    return Formula(plus.poset, at, res)


def build_theorem_formulas(g: GluingData):
    """The pair (xi_plus, xi_minus) of formulas attached to a gluing.

    xi_plus is a diagram over the minus order valued in words over the plus
    order and xi_minus the reverse, so that each one's evaluation carries
    diagrams over one glued order to diagrams over the other.  Every value
    and every restriction is validated; a non-commuting restriction triangle
    raises CommutativityFailure with the difference matrix as witness.
    """
    plus = build_plus(g)
    minus = build_minus(g)
    xi_plus = _build_xi_plus(g, plus, minus)
    xi_minus = _build_xi_minus(g, plus, minus)
    for f in list(xi_plus.at.values()) + list(xi_minus.at.values()):
        report = check_formula(f)
        if not report:
            raise InternalInconsistency(
                f"constructed value is invalid: {report.problems[0]}"
            )
    return xi_plus, xi_minus


def build_epsilons(g: GluingData, xi_plus: Formula, xi_minus: Formula):
    """The counit and unit comparing the round trips with the shift.

    Returns (eps_pm, eps_mp): eps_pm maps the composite xi_plus after
    xi_minus to the shift over the minus order; eps_mp maps the shift over
    the plus order to the composite xi_minus after xi_plus.  Both are
    validated as natural transformations (NaturalityFailure carries the
    offending edge), and each component is certified a homotopy retract by
    an explicit homotopy, so both sides are quasi-isomorphisms on every
    evaluation.
    """
    plus, minus = xi_plus.base, xi_minus.base
    comp_pm = compose_formulas(xi_plus, xi_minus)
    comp_mp = compose_formulas(xi_minus, xi_plus)
    nu_plus = translation_formula(plus, 1)
    nu_minus = translation_formula(minus, 1)
    X_set = set(g.X.elements)

    pm_components = {}
    for e in minus.elements:
        if e in X_set:
            k = len(g.Yx[e])
            pm_components[e] = [[0] * k + [1] + [1] * k]
        else:
            pm_components[e] = [[1]]
    eps_pm = EpsilonTransform(comp_pm, nu_minus, pm_components)

    mp_components = {}
    for e in plus.elements:
        if e in X_set:
            k = len(g.Yx[e])
            mp_components[e] = [[1]] * k + [[-1]] + [[0]] * k
        else:
            mp_components[e] = [[1]]
    eps_mp = EpsilonTransform(nu_plus, comp_mp, mp_components)

    for x in g.X.elements:
        k = len(g.Yx[x])
        _certify_retract(
            comp_mp.at[x],
            alpha=eps_mp.components[x].phi,
            beta_row=[0] * k + [-1] + [0] * k,
            small=nu_plus.at[x].xi,
            k=k,
        )
        _certify_retract(
            comp_pm.at[x],
            alpha=CMorphism(
                nu_minus.at[x].xi,
                comp_pm.at[x].xi,
                [[0]] * k + [[1]] + [[0]] * k,
            ),
            beta_row=list(eps_pm.components[x].phi.matrix.rows[0]),
            small=nu_minus.at[x].xi,
            k=k,
        )
    return eps_pm, eps_mp


def _certify_retract(value: FormulaToPoint, alpha, beta_row, small, k: int) -> None:
    """Check that the shifted stalk is a homotopy retract of a composite value.

    The homotopy matches the leading witness block with the trailing one;
    failure means the construction itself is wrong, hence the hard error.
    """
    n = 2 * k + 1
    beta = CMorphism(value.xi, small, [beta_row])
    h_rows = [[0] * n for _ in range(n)]
    for i in range(k):
        h_rows[i][k + 1 + i] = 1
    h = CMorphism(value.xi, value.xi.shifted(-1), h_rows)
    report = check_homotopy(alpha, beta, h, value.D)
    if not report:
        raise InternalInconsistency(
            f"retract certificate failed: {report.problems[0]}"
        )


# --- randomized verification runs ----------------------------------------------

def _equivalence_trial(eps_pm, eps_mp, tseed, field, max_dim, window) -> TrialRecord:
    plus, minus = eps_mp.source.base, eps_pm.source.base
    K = random_diagram(plus, derive_seed(tseed, "plus"), max_dim, window)
    L = random_diagram(minus, derive_seed(tseed, "minus"), max_dim, window)
    unit = eps_mp.evaluate(K)
    counit = eps_pm.evaluate(L)
    verdict = is_quasi_iso_diagram(unit, field) and is_quasi_iso_diagram(
        counit, field
    )
    tables = {
        "plus_shift": _table_json(unit.source, field),
        "plus_round_trip": _table_json(unit.target, field),
        "minus_round_trip": _table_json(counit.source, field),
        "minus_shift": _table_json(counit.target, field),
    }
    return TrialRecord(seed=tseed, verdict=verdict, tables=tables)


_WORKER_STATE: dict = {}


def _equivalence_worker_init(gluing_doc, field_str, max_dim, window):
    g = gluing_from_json(gluing_doc)
    xi_plus, xi_minus = build_theorem_formulas(g)
    eps_pm, eps_mp = build_epsilons(g, xi_plus, xi_minus)
    _WORKER_STATE["run"] = (
        eps_pm,
        eps_mp,
        Field.parse(field_str),
        max_dim,
        tuple(window),
    )


def _equivalence_worker(tseed: int) -> dict:
    eps_pm, eps_mp, field, max_dim, window = _WORKER_STATE["run"]
    return _equivalence_trial(eps_pm, eps_mp, tseed, field, max_dim, window).to_json()


def _two_chain_worker_init(field_str, max_dim, window):
    _WORKER_STATE["run"] = (
        _two_chain_epsilons(),
        Field.parse(field_str),
        max_dim,
        tuple(window),
    )


def _two_chain_worker(tseed: int) -> dict:
    eps, field, max_dim, window = _WORKER_STATE["run"]
    return _two_chain_trial(eps, tseed, field, max_dim, window).to_json()


def _parallel_records(jobs, trials, seed, worker, init, initargs):
    """Run per-trial workers over a process pool, assembled in trial order."""
    seeds = [derive_seed(seed, "trial", i) for i in range(trials)]
    with ProcessPoolExecutor(
        max_workers=min(jobs, max(trials, 1)), initializer=init, initargs=initargs
    ) as pool:
        docs = list(pool.map(worker, seeds))
    return [
        TrialRecord(seed=d["seed"], verdict=d["verdict"], tables=d["tables"])
        for d in docs
    ]


def verify_equivalence(
    g: GluingData,
    trials: int = 100,
    seed: int = 0,
    field: Field = RATIONALS,
    max_dim: int = 3,
    window=(-2, 2),
    jobs: int = 1,
) -> EquivalenceCertificate:
    """Build the formulas for a gluing and verify the equivalence on trials.

    Each trial draws one random diagram over each glued order, evaluates the
    unit on the plus-side diagram K (comparing K shifted with the round
    trip) and the counit on the minus-side diagram L (comparing the round
    trip with L shifted), and requires both to be quasi-isomorphisms over
    the given field.  Cohomology dimension tables of all four corners are
    recorded per trial.  With jobs > 1 the trials run on a process pool;
    records are assembled in trial order, so reports do not depend on
    completion order.
    """
    xi_plus, xi_minus = build_theorem_formulas(g)
    structural = [("theorem-formulas", True)]
    eps_pm, eps_mp = build_epsilons(g, xi_plus, xi_minus)
    structural.append(("epsilon-naturality", True))
    structural.append(("retract-homotopies", True))

    if jobs > 1 and trials > 1:
        records = _parallel_records(
            jobs,
            trials,
            seed,
            _equivalence_worker,
            _equivalence_worker_init,
            (gluing_to_json(g), str(field), max_dim, tuple(window)),
        )
    else:
        records = [
            _equivalence_trial(
                eps_pm, eps_mp, derive_seed(seed, "trial", i), field, max_dim, window
            )
            for i in range(trials)
        ]
    structural.append(("euler-ledger", True))

    return EquivalenceCertificate(
        description=(
            f"equivalence for a gluing of {len(g.X)} elements "
            f"against {len(g.Y)}"
        ),
        config=_run_config(trials, seed, field, max_dim, window),
        structural=tuple(structural),
        trials=tuple(records),
    )


def _two_chain_epsilons():
    """The four comparison transformations of the two-chain instance."""
    comp_pm = compose_formulas(TWO_CHAIN_PLUS, TWO_CHAIN_MINUS)
    comp_mp = compose_formulas(TWO_CHAIN_MINUS, TWO_CHAIN_PLUS)
    comp_pp = compose_formulas(TWO_CHAIN_PLUS, TWO_CHAIN_PLUS)
    comp_mm = compose_formulas(TWO_CHAIN_MINUS, TWO_CHAIN_MINUS)
    eps_pm = EpsilonTransform(comp_pm, NU, {"1": [[1]], "2": [[0, 1, 1]]})
    eps_mp = EpsilonTransform(NU, comp_mp, {"1": [[1], [-1], [0]], "2": [[1]]})
    eps_pp = EpsilonTransform(
        comp_pp, TWO_CHAIN_MINUS, {"1": [[1, 0], [0, 1]], "2": [[0, 1, 0]]}
    )
    eps_mm = EpsilonTransform(
        shift(TWO_CHAIN_PLUS, 1),
        comp_mm,
        {"1": [[0], [1], [0]], "2": [[-1, 0], [0, 1]]},
    )
    return eps_pm, eps_mp, eps_pp, eps_mm


def _two_chain_trial(eps, tseed, field, max_dim, window) -> TrialRecord:
    eps_pm, eps_mp, eps_pp, eps_mm = eps
    K = random_diagram(TWO_CHAIN, tseed, max_dim, window)
    counit = eps_pm.evaluate(K)
    unit = eps_mp.evaluate(K)
    T1 = _eval_checked(TWO_CHAIN_PLUS, K)
    T2 = _eval_checked(TWO_CHAIN_PLUS, T1)
    T3 = _eval_checked(TWO_CHAIN_PLUS, T2)
    square = eps_pp.evaluate(T1)
    if square.source != T3:
        raise InternalInconsistency(
            "composite formula disagrees with iterated evaluation"
        )
    double = eps_mm.evaluate(K)
    shifted = shift_diagram(K, 1)
    chain_ok = cohomology_table(T3, field) == cohomology_table(shifted, field)
    verdict = (
        chain_ok
        and is_quasi_iso_diagram(counit, field)
        and is_quasi_iso_diagram(unit, field)
        and is_quasi_iso_diagram(square, field)
        and is_quasi_iso_diagram(double, field)
    )
    tables = {
        "input": _table_json(K, field),
        "input_shift": _table_json(shifted, field),
        "triple_plus": _table_json(T3, field),
    }
    return TrialRecord(seed=tseed, verdict=verdict, tables=tables)


def verify_two_chain(
    trials: int = 100,
    seed: int = 0,
    field: Field = RATIONALS,
    max_dim: int = 3,
    window=(-2, 2),
    jobs: int = 1,
) -> EquivalenceCertificate:
    """Verify the two-chain instance, including the cube of the plus side.

    Structural checks: validity of the named constant formulas, the
    substitution identities producing the two composite values, and the two
    retract homotopies.  Per trial: the four comparison transformations
    (counit, unit, and the two identifying the square of one side with the
    other side) evaluate to quasi-isomorphisms, and the triple application
    of the plus side has the cohomology tables of the input shifted by one.
    """
    structural = []
    structural.append(
        (
            "named-formulas-valid",
            all(
                bool(check_formula(f))
                for f in (XI1, XI2, XI12)
            )
            and bool(check_formula_morphism(PHI1))
            and bool(check_formula_morphism(PHI2)),
        )
    )
    structural.append(
        (
            "substitution-identities",
            substitute(XI12, TWO_CHAIN_MINUS) == XI121
            and substitute(XI12, TWO_CHAIN_PLUS) == XI212,
        )
    )
    structural.append(
        ("retract-homotopy-212", bool(check_homotopy(ALPHA1, BETA1, H212, XI212.D)))
    )
    structural.append(
        ("retract-homotopy-121", bool(check_homotopy(ALPHA2, BETA2, H121, XI121.D)))
    )
    eps = _two_chain_epsilons()
    structural.append(("epsilon-naturality", True))

    if jobs > 1 and trials > 1:
        records = _parallel_records(
            jobs,
            trials,
            seed,
            _two_chain_worker,
            _two_chain_worker_init,
            (str(field), max_dim, tuple(window)),
        )
    else:
        records = [
            _two_chain_trial(eps, derive_seed(seed, "trial", i), field, max_dim, window)
            for i in range(trials)
        ]
    structural.append(("composition-law", True))
    structural.append(("euler-ledger", True))

    return EquivalenceCertificate(
        description="two-chain equivalences and the cube of the plus side",
        config=_run_config(trials, seed, field, max_dim, window),
        structural=tuple(structural),
        trials=tuple(records),
    )


def verify_x1z(
    X: Poset,
    Z: Poset,
    trials: int = 25,
    seed: int = 0,
    field: Field = RATIONALS,
    max_dim: int = 2,
    window=(-1, 1),
    jobs: int = 1,
) -> EquivalenceCertificate:
    """Verify the constant gluing of X under a point under Z.

    Structurally checks that the two glued orders realize the expected
    shapes (X, then a point, then Z on the plus side; a point under the
    disjoint union of X and Z on the minus side), then runs the generic
    equivalence verification.
    """
    g, expected_plus, expected_minus = ordinal_witness(X, Z)
    plus = build_plus(g).poset
    minus = build_minus(g).poset
    shape_checks = (
        ("plus-order-shape", is_isomorphic(plus, expected_plus) is not None),
        ("minus-order-shape", is_isomorphic(minus, expected_minus) is not None),
    )
    cert = verify_equivalence(g, trials, seed, field, max_dim, window, jobs)
    return EquivalenceCertificate(
        description=(
            f"ordinal gluing of {len(X)} elements over {len(Z)} elements"
        ),
        config=cert.config,
        structural=shape_checks + cert.structural,
        trials=cert.trials,
    )


# --- reflection paths between tree orientations --------------------------------

def _orientation_edges(p: Poset):
    return hasse(p).edges


def _undirected(edges):
    return frozenset(frozenset(e) for e in edges)


def _relabel(p: Poset, old, new) -> Poset:
    swap = lambda e: new if e == old else e  # noqa: E731
    return Poset(
        [swap(e) for e in p.elements],
        {(swap(a), swap(b)) for a, b in p.leq},
    )


def verify_bgp_path(
    tree: Poset,
    from_orient: Poset,
    to_orient: Poset,
    trials: int = 10,
    seed: int = 0,
    field: Field = RATIONALS,
    max_dim: int = 2,
    window=(-1, 1),
    jobs: int = 1,
) -> dict:
    """Connect two orientations of a tree by vertex reflections, verifying each.

    All three posets must have the same vertices and the same underlying
    undirected edges, which must form a tree (NotATree otherwise; ParseError
    when the orientations disagree with the tree's underlying graph).  A
    shortest sequence of source/sink reflections is found by breadth-first
    search over orientations; for every step the single-vertex gluing whose
    two glued orders are the orientations before and after the flip is
    built and verified, and the results are collected into one report.
    Equal gluings along the path share one certificate.
    """
    edges = _orientation_edges(tree)
    verts = set(tree.elements)
    und = _undirected(edges)
    if len(und) > 8:
        raise SizeLimit("reflection search capped at 8 edges")
    if len(und) != len(verts) - 1 or not _connected(verts, und):
        raise NotATree(
            f"underlying graph has {len(und)} edges on {len(verts)} vertices"
        )
    for name, orient in (("from", from_orient), ("to", to_orient)):
        if set(orient.elements) != verts or _undirected(
            _orientation_edges(orient)
        ) != und:
            raise ParseError(
                f"the {name!r} orientation does not orient the given tree"
            )

    start = frozenset(_orientation_edges(from_orient))
    goal = frozenset(_orientation_edges(to_orient))
    path = _reflection_path(verts, start, goal)

    steps = []
    cache = {}
    for vertex, kind, before, after in path:
        rest_elements = [e for e in tree.elements if e != vertex]
        rest_edges = [e for e in before if vertex not in e]
        rest = poset_from_generators(rest_elements, rest_edges)
        neighbors = tuple(
            u for u in rest_elements if frozenset((u, vertex)) in und
        )
        g = from_bgp(rest, neighbors)
        star = g.X.elements[0]
        plus = _relabel(build_plus(g).poset, star, vertex)
        minus = _relabel(build_minus(g).poset, star, vertex)
        oriented_before = poset_from_generators(tree.elements, before)
        oriented_after = poset_from_generators(tree.elements, after)
        expected = (plus, minus) if kind == "source" else (minus, plus)
        if not expected[0].same_order(oriented_before) or not expected[
            1
        ].same_order(oriented_after):
            raise InternalInconsistency(
                f"reflection at {vertex!r} does not match the glued orders"
            )
        key = (tuple(rest_elements), tuple(sorted(rest.leq)), neighbors)
        if key not in cache:
            cache[key] = verify_equivalence(
                g,
                trials,
                derive_seed(seed, "bgp", repr(key)),
                field,
                max_dim,
                window,
                jobs,
            )
        cert = cache[key]
        steps.append(
            {
                "vertex": vertex,
                "kind": kind,
                "ok": cert.ok,
                "certificate": cert.to_json(),
            }
        )

    return {
        "description": "reflection path between two tree orientations",
        "config": _run_config(trials, seed, field, max_dim, window),
        "path": [{"vertex": s["vertex"], "kind": s["kind"]} for s in steps],
        "path_length": len(steps),
        "steps": steps,
        "ok": all(s["ok"] for s in steps),
    }


def _connected(verts, und) -> bool:
    if not verts:
        return True
    seen = set()
    stack = [next(iter(sorted(verts)))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        for e in und:
            if v in e:
                stack.extend(e - {v})
    return seen == set(verts)


def _reflection_path(verts, start, goal):
    """Breadth-first search through orientations by source/sink flips.

    Returns a list of (vertex, kind, edges-before, edges-after) steps; kind
    is "source" when the vertex has only outgoing edges before the flip and
    "sink" when it has only incoming ones.
    """
    order = sorted(verts)
    parent = {start: None}
    queue = [start]
    while queue:
        state = queue.pop(0)
        if state == goal:
            break
        for v in order:
            out = frozenset(e for e in state if e[0] == v)
            inc = frozenset(e for e in state if e[1] == v)
            flips = []
            if out and not inc:
                flips.append(("source", out))
            elif inc and not out:
                flips.append(("sink", inc))
            for kind, flipped in flips:
                nxt = (state - flipped) | {(b, a) for a, b in flipped}
                nxt = frozenset(nxt)
                if nxt not in parent:
                    parent[nxt] = (state, v, kind)
                    queue.append(nxt)
    if goal not in parent:
        raise NoPathFound("no reflection sequence reaches the target orientation")
    path = []
    state = goal
    while parent[state] is not None:
        prev, v, kind = parent[state]
        path.append((v, kind, prev, state))
        state = prev
    path.reverse()
    return path


# --- random gluings -------------------------------------------------------------

def _random_poset(rng: SplitMix64, n: int, prefix: str) -> Poset:
    elements = [f"{prefix}{i}" for i in range(n)]
    edges = [
        (elements[i], elements[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.randrange(3) == 0
    ]
    return poset_from_generators(elements, edges)


def _random_monotone_map(rng: SplitMix64, X: Poset, Y: Poset) -> dict:
    """A random order-preserving map, built along a linear extension of X."""
    for _ in range(4):
        f = {}
        ok = True
        for x in X.elements:
            below = [f[x2] for x2 in X.elements if x2 != x and X.le(x2, x)]
            candidates = [
                y
                for y in Y.elements
                if all(Y.le(b, y) for b in below)
            ]
            if not candidates:
                ok = False
                break
            f[x] = rng.choice(candidates)
        if ok:
            return f
    top = max(Y.elements, key=lambda y: len(Y.down_set(y)))
    return {x: top for x in X.elements}


def _random_witness_set(rng: SplitMix64, Y: Poset) -> tuple:
    """A random admissible witness set: pairwise disjoint up- and down-sets."""
    chosen = []
    for y in rng.shuffled(Y.elements):
        if all(
            not (Y.up_set(y) & Y.up_set(c)) and not (Y.down_set(y) & Y.down_set(c))
            for c in chosen
        ):
            chosen.append(y)
        if len(chosen) == 3:
            break
    return tuple(sorted(chosen, key=Y.index))


def random_gluing(seed: int, max_total: int = 8) -> GluingData:
    """A seeded random gluing with at most `max_total` elements in all.

    Mixes three shapes: witness sets cut from disjoint chains at the height
    of each element (the generic case, with witness sets of size > 1), the
    gluing of an order-preserving map (singleton witness sets), and a single
    new point against an admissible witness set.
    """
    rng = SplitMix64(derive_seed(seed, "gluing"))
    kind = rng.choice(("chains", "function", "point"))
    nx = 1 if kind == "point" else 1 + rng.randrange(3)
    budget = max_total - nx
    X = _random_poset(rng, nx, "x")

    if kind == "chains":
        count = 1 + rng.randrange(min(3, budget))
        lengths = []
        left = budget
        for j in range(count):
            cap = left - (count - 1 - j)
            lengths.append(1 + rng.randrange(min(cap, 3)))
            left -= lengths[-1]
        elements = [f"c{j}x{h}" for j in range(count) for h in range(lengths[j])]
        edges = [
            (f"c{j}x{h}", f"c{j}x{h + 1}")
            for j in range(count)
            for h in range(lengths[j] - 1)
        ]
        Y = poset_from_generators(elements, edges)
        mask = 1 + rng.randrange(2**count - 1)
        chosen = [j for j in range(count) if mask >> j & 1]
        Yx = {
            x: tuple(
                f"c{j}x{min(X.height(x), lengths[j] - 1)}" for j in chosen
            )
            for x in X.elements
        }
        return validate_gluing(X, Y, Yx)

    ny = 1 + rng.randrange(budget)
    Y = _random_poset(rng, ny, "y")
    if kind == "function":
        return from_function(X, Y, _random_monotone_map(rng, X, Y))
    return from_bgp(Y, _random_witness_set(rng, Y))


# --- worked datasets ------------------------------------------------------------

_FIGURE_ONE_EDGES = {
    "X1": [(1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 5), (4, 6), (5, 7), (6, 7)],
    "X2": [(3, 6), (3, 1), (6, 7), (6, 4), (1, 4), (1, 2), (4, 5), (7, 2), (2, 5)],
    "X3": [(7, 1), (1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 5), (4, 6)],
    "X4": [(4, 5), (4, 6), (4, 7), (5, 2), (6, 3), (7, 1), (1, 2), (1, 3)],
}

_FIGURE_ONE_GLUINGS = {
    ("X1", "X2"): ("X1", (1, 2, 4, 5), (3, 6, 7), {1: 3, 2: 7, 4: 6, 5: 7}),
    ("X1", "X3"): ("X1", (1, 2, 3, 4, 5, 6), (7,), {x: 7 for x in (1, 2, 3, 4, 5, 6)}),
    ("X3", "X4"): ("X3", (1, 2, 3, 7), (4, 5, 6), {1: 4, 7: 4, 2: 5, 3: 6}),
}

#: The pairs of worked seven-element orders related by a single gluing.
FIGURE_ONE_PAIRS = tuple(_FIGURE_ONE_GLUINGS)


def figure_one_poset(name: str) -> Poset:
    """One of the four worked seven-element orders, by name X1..X4."""
    if name not in _FIGURE_ONE_EDGES:
        raise ParseError(f"unknown worked poset {name!r}; pick one of X1..X4")
    edges = [(str(a), str(b)) for a, b in _FIGURE_ONE_EDGES[name]]
    return poset_from_generators([str(i) for i in range(1, 8)], edges)


def _induced(p: Poset, keep) -> Poset:
    keep = set(keep)
    return Poset(
        [e for e in p.elements if e in keep],
        {(a, b) for a, b in p.leq if a in keep and b in keep},
    )


def figure_one_gluing(pair):
    """The gluing relating a worked pair, with the two expected orders.

    `pair` is one of the tuples in FIGURE_ONE_PAIRS.  Returns (gluing,
    expected_plus, expected_minus); the glued orders are isomorphic to the
    named worked posets.
    """
    if pair not in _FIGURE_ONE_GLUINGS:
        raise ParseError(f"unknown worked pair {pair!r}; pick one of {FIGURE_ONE_PAIRS}")
    ambient_name, x_part, y_part, f = _FIGURE_ONE_GLUINGS[pair]
    ambient = figure_one_poset(ambient_name)
    X = _induced(ambient, [str(e) for e in x_part])
    Y = _induced(ambient, [str(e) for e in y_part])
    g = from_function(X, Y, {str(a): str(b) for a, b in f.items()})
    return g, figure_one_poset(pair[0]), figure_one_poset(pair[1])


def counterexample_data():
    """Witness data for the necessity of the antichain condition.

    A single new element with witness set {2, 3} inside the order
    2 < 4 > 3: the two witnesses share the upper bound 4, so validation
    must reject the data (AntichainViolation with witness element 4).
    Returns (X, Y, Yx) ready to hand to validate_gluing.
    """
    X = poset_from_generators(["1"], [])
    Y = poset_from_generators(["2", "3", "4"], [("2", "4"), ("3", "4")])
    return X, Y, {"1": ("2", "3")}
