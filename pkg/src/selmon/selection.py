"""Selection functions parametrised by a strong monad, and their quantifiers.

A T-selection over X with outcome algebra R is a total map from contexts
(tables X -> R) to T-values over X.  The selection monad structure is

    unit(x)        = lam p. eta(x)
    bind(d, e)     = lam p. (b_p)+(e(p* . b_p))   with b_p(x) = d(x)(p)

and its binary product applied to an outcome table q : XxY -> R unfolds to

    (e (x) d)(q) = a (x)_T f   with f(x) = d_x(q_x),  a = e(lam x. (q_x)*(f x)).

Selections embed into quantifiers (X -> R) -> R by e |-> (lam p. p*(e p));
the embedding turns selection products into quantifier products, which the
checkers verify extensionally.

Materialized selections share a per-(X, R) context space and store their
bodies as output tuples aligned with it, so extensional equality and
memoization reduce to tuple comparison.  Selections produced by the
infinite-sequence transform in :mod:`selmon.recursion` use callable bodies
instead; their contexts range over monadic sequence values that no finite
table could index.

Coverage note.  Every checker reads its selection argument through exactly
one context per case (visible in the plan/apply split of bind and product),
so checkers quantify selections by quantifying the value read at that
context over all of T(X); family arguments are enumerated outright when the
family space is small and otherwise covered by all constant families plus
seeded samples, with a direct (unfactored) route run alongside.  Reports
record the mode per law.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from .errors import CardinalityExceeded, TypeMismatch
from .monads import (
    AlgebraWitness,
    StrongMonadInstance,
    _bind,
    _product,
    _star,
    identity_algebra,
    m_eta,
    powerset_algebra,
    type_action,
)
from .reporting import Report
from .universe import (
    DEFAULT_CAP,
    FinType,
    FunTable,
    Pair,
    Pow,
    Prod,
    Value,
    enum_functions,
    enum_values,
    value_to_json,
)


class ContextSpace:
    """All contexts X -> R for one element type and outcome carrier.

    Holds the enumerated context tables, an index for O(1) lookup, and an
    interner that turns an output row back into its canonical table.
    """

    def __init__(self, x_type: FinType, r_type: FinType, cap: int):
        self.x_type = x_type
        self.r_type = r_type
        self.xs = enum_values(x_type, cap)
        self.contexts = enum_functions(x_type, r_type, cap)
        self.index = {p: i for i, p in enumerate(self.contexts)}
        self._by_row = {
            tuple(p.apply(x) for x in self.xs): p for p in self.contexts
        }

    def table_for_row(self, row: tuple) -> FunTable:
        """Canonical context whose outputs on the enumerated domain are ``row``."""
        t = self._by_row.get(row)
        if t is None:
            t = FunTable(self.x_type, self.r_type, list(zip(self.xs, row)))
            self._by_row[row] = t
        return t

    def __len__(self):
        return len(self.contexts)


@lru_cache(maxsize=None)
def context_space(x_type: FinType, r_type: FinType, cap: int = DEFAULT_CAP) -> ContextSpace:
    return ContextSpace(x_type, r_type, cap)


class TSelection:
    """A T-selection function; body is a materialized row or a callable."""

    __slots__ = ("x_type", "monad", "algebra", "space", "outputs", "fn", "_lookup")

    def __init__(self, x_type, monad, algebra, *, space=None, outputs=None, fn=None):
        self.x_type = x_type
        self.monad = monad
        self.algebra = algebra
        self.space = space
        self.outputs = outputs
        self.fn = fn
        if outputs is not None:
            self._lookup = dict(zip(space.contexts, outputs))
        else:
            self._lookup = None

    @property
    def materialized(self) -> bool:
        return self.outputs is not None

    def apply(self, p):
        if self._lookup is not None:
            try:
                return self._lookup[p]
            except KeyError:
                raise TypeMismatch(f"context {p!r} not in selection domain") from None
        return self.fn(p)

    __call__ = apply

    def row(self) -> tuple:
        if self.outputs is None:
            raise TypeMismatch("selection has a callable body; no materialized row")
        return self.outputs


def selection_from_table(x_type, monad, algebra, mapping, cap=DEFAULT_CAP) -> TSelection:
    """Materialize a selection from a {context: T-value} mapping."""
    space = context_space(x_type, algebra.carrier, cap)
    outputs = tuple(mapping[p] for p in space.contexts)
    return TSelection(x_type, monad, algebra, space=space, outputs=outputs)


def selection_from_fn(x_type, monad, algebra, fn) -> TSelection:
    return TSelection(x_type, monad, algebra, fn=fn)


def selections_equal(a: TSelection, b: TSelection) -> bool:
    """Extensional equality of materialized selections."""
    return a.row() == b.row() and a.space.contexts == b.space.contexts


def enumerate_selections(x_type, monad, algebra, cap=DEFAULT_CAP) -> list[TSelection]:
    """Every selection over the context space, in deterministic order."""
    space = context_space(x_type, algebra.carrier, cap)
    tvals = enum_values(type_action(monad, x_type), cap)
    total = len(tvals) ** len(space.contexts)
    if total > cap * cap:
        raise CardinalityExceeded(f"selections over {x_type!r}", total, cap * cap)
    return [
        TSelection(x_type, monad, algebra, space=space, outputs=row)
        for row in itertools.product(tvals, repeat=len(space.contexts))
    ]


class Quantifier:
    """An outcome-valued player: total map from contexts to outcomes."""

    __slots__ = ("x_type", "r_type", "space", "outputs", "fn", "_lookup")

    def __init__(self, x_type, r_type, *, space=None, outputs=None, fn=None):
        self.x_type = x_type
        self.r_type = r_type
        self.space = space
        self.outputs = outputs
        self.fn = fn
        self._lookup = dict(zip(space.contexts, outputs)) if outputs is not None else None

    def apply(self, p):
        if self._lookup is not None:
            try:
                return self._lookup[p]
            except KeyError:
                raise TypeMismatch(f"context {p!r} not in quantifier domain") from None
        return self.fn(p)

    __call__ = apply

    def row(self) -> tuple:
        if self.outputs is None:
            raise TypeMismatch("quantifier has a callable body; no materialized row")
        return self.outputs


def k_eta(x_type, r_type, x: Value, cap=DEFAULT_CAP) -> Quantifier:
    """Quantifier unit: p |-> p(x)."""
    space = context_space(x_type, r_type, cap)
    return Quantifier(
        x_type, r_type, space=space, outputs=tuple(p.apply(x) for p in space.contexts)
    )


def k_product_apply(phi: Quantifier, psi_of, q: FunTable, cap=DEFAULT_CAP) -> Value:
    """Quantifier product applied to an outcome table: phi(lam x. psi_x(q_x))."""
    space = context_space(phi.x_type, phi.r_type, cap)
    row = tuple(
        psi_of(x).apply(_section(q, x, space.r_type)) for x in space.xs
    )
    return phi.apply(space.table_for_row(row))


@lru_cache(maxsize=None)
def _section_space(q: FunTable, r_type: FinType):
    """Split a table on a product domain into its per-first-component sections."""
    dom = q.dom
    if not isinstance(dom, Prod):
        raise TypeMismatch(f"outcome table domain {dom!r} is not a product")
    xs = enum_values(dom.left)
    ys = enum_values(dom.right)
    return {
        x: FunTable(dom.right, r_type, [(y, q.apply(Pair(x, y))) for y in ys])
        for x in xs
    }


def _section(q: FunTable, x: Value, r_type: FinType) -> FunTable:
    return _section_space(q, r_type)[x]


def _as_family(delta):
    if isinstance(delta, dict):
        return delta.__getitem__
    if callable(delta):
        return delta
    raise TypeMismatch(f"selection family must be a mapping or callable: {delta!r}")


def jt_eta(x_type, monad, algebra, x: Value, cap=DEFAULT_CAP) -> TSelection:
    """Selection unit: the constant selection p |-> eta(x)."""
    space = context_space(x_type, algebra.carrier, cap)
    v = m_eta(monad, x_type, x, cap)
    return TSelection(
        x_type, monad, algebra, space=space, outputs=(v,) * len(space.contexts)
    )


def _bind_plan(algebra, xs, delta_of, p, space_x: ContextSpace):
    """The selection-independent half of bind at one context: b_p and p* . b_p."""
    b = tuple(delta_of(x).apply(p) for x in xs)
    papply = p.apply if isinstance(p, FunTable) else p
    ctx = space_x.table_for_row(tuple(_star(algebra, papply, v) for v in b))
    return b, ctx


def _bind_apply(monad, x_type, y_type, xs, b, a, cap):
    lookup = dict(zip(xs, b))
    return _bind(monad, x_type, y_type, lookup.__getitem__, a, cap)


def jt_bind(delta, eps: TSelection, y_type: FinType, cap=DEFAULT_CAP) -> TSelection:
    """Selection-monad bind of a family delta : X -> J(Y) along eps : J(X)."""
    monad, algebra = eps.monad, eps.algebra
    delta_of = _as_family(delta)
    space_x = context_space(eps.x_type, algebra.carrier, cap)
    space_y = context_space(y_type, algebra.carrier, cap)
    xs = space_x.xs
    outputs = []
    for p in space_y.contexts:
        b, ctx = _bind_plan(algebra, xs, delta_of, p, space_x)
        outputs.append(_bind_apply(monad, eps.x_type, y_type, xs, b, eps.apply(ctx), cap))
    return TSelection(y_type, monad, algebra, space=space_y, outputs=tuple(outputs))


def _product_plan(algebra, xs, delta_of, q, space_x: ContextSpace):
    """The selection-independent half of the product at one outcome table."""
    sections = [_section(q, x, algebra.carrier) for x in xs]
    f = tuple(delta_of(x).apply(qx) for x, qx in zip(xs, sections))
    ctx = space_x.table_for_row(
        tuple(_star(algebra, qx.apply, fx) for qx, fx in zip(sections, f))
    )
    return f, ctx


def _product_apply(monad, x_type, y_type, xs, f, a, cap):
    lookup = dict(zip(xs, f))
    return _product(monad, x_type, y_type, a, lookup.__getitem__, cap)


def jt_product(eps: TSelection, delta, q: FunTable, cap=DEFAULT_CAP) -> Value:
    """Explicit product at one outcome table: a (x)_T f with

    f(x) = d_x(q_x) and a = e(lam x. (q_x)*(f x)).
    """
    monad, algebra = eps.monad, eps.algebra
    delta_of = _as_family(delta)
    space_x = context_space(eps.x_type, algebra.carrier, cap)
    y_type = _delta_elem_type(delta_of, space_x)
    f, ctx = _product_plan(algebra, space_x.xs, delta_of, q, space_x)
    return _product_apply(monad, eps.x_type, y_type, space_x.xs, f, eps.apply(ctx), cap)


def _delta_elem_type(delta_of, space_x):
    return delta_of(space_x.xs[0]).x_type


def jt_product_selection(eps: TSelection, delta, cap=DEFAULT_CAP) -> TSelection:
    """The product as a selection over XxY, each context via :func:`jt_product`."""
    monad, algebra = eps.monad, eps.algebra
    delta_of = _as_family(delta)
    space_x = context_space(eps.x_type, algebra.carrier, cap)
    y_type = _delta_elem_type(delta_of, space_x)
    prod = Prod(eps.x_type, y_type)
    space_p = context_space(prod, algebra.carrier, cap)
    outputs = tuple(jt_product(eps, delta_of, q, cap) for q in space_p.contexts)
    return TSelection(prod, monad, algebra, space=space_p, outputs=outputs)


def jt_product_generic(eps: TSelection, delta, cap=DEFAULT_CAP) -> TSelection:
    """The product derived from unit and bind alone; the independent route."""
    monad, algebra = eps.monad, eps.algebra
    delta_of = _as_family(delta)
    space_x = context_space(eps.x_type, algebra.carrier, cap)
    y_type = _delta_elem_type(delta_of, space_x)
    prod = Prod(eps.x_type, y_type)

    def inner(x):
        return jt_bind(
            lambda y: jt_eta(prod, monad, algebra, Pair(x, y), cap),
            delta_of(x),
            prod,
            cap,
        )

    inners = {x: inner(x) for x in space_x.xs}
    return jt_bind(inners, eps, prod, cap)


def bar(eps: TSelection, cap=DEFAULT_CAP) -> Quantifier:
    """The embedding into quantifiers: p |-> p*(e(p))."""
    algebra = eps.algebra
    if eps.materialized:
        return Quantifier(
            eps.x_type,
            algebra.carrier,
            space=eps.space,
            outputs=tuple(
                _star(algebra, p.apply, v)
                for p, v in zip(eps.space.contexts, eps.outputs)
            ),
        )
    return Quantifier(
        eps.x_type,
        algebra.carrier,
        fn=lambda p: _star(algebra, _ctx_apply(p), eps.apply(p)),
    )


def _ctx_apply(p):
    if isinstance(p, FunTable):
        return p.apply
    if isinstance(p, dict):
        return p.__getitem__
    return p


# ---------------------------------------------------------------------------
# Checkers


def _algebra_for(monad: StrongMonadInstance, r_prime: FinType) -> AlgebraWitness:
    if monad.tag == "powerset":
        return powerset_algebra(r_prime)
    if monad.tag == "identity":
        return identity_algebra(Pow(r_prime))
    raise TypeMismatch(f"no canonical selection algebra for {monad!r}")


def _sel_ce(**kv):
    out = {}
    for k, v in kv.items():
        if isinstance(v, (TSelection, Quantifier)):
            out[k] = [value_to_json(o) for o in v.row()]
        elif isinstance(v, Value):
            out[k] = value_to_json(v)
        elif isinstance(v, FunTable):
            out[k] = [[value_to_json(a), value_to_json(b)] for a, b in v.entries]
        elif isinstance(v, tuple):
            out[k] = [value_to_json(o) if isinstance(o, Value) else repr(o) for o in v]
        else:
            out[k] = repr(v)
    return out


FAMILY_EXHAUSTIVE_LIMIT = 4096


def _family_combos(n_sels: int, arity: int, rng, samples: int):
    """Index combos covering families X -> J(Y).

    Fully exhaustive when the family space is small; otherwise all constant
    families plus seeded samples.  Returns (combos, mode).
    """
    total = n_sels**arity
    if total <= FAMILY_EXHAUSTIVE_LIMIT:
        return list(itertools.product(range(n_sels), repeat=arity)), "exhaustive"
    combos = [(i,) * arity for i in range(n_sels)]
    seen = set(combos)
    for _ in range(samples):
        c = tuple(rng.randrange(n_sels) for _ in range(arity))
        if c not in seen:
            seen.add(c)
            combos.append(c)
    return combos, "constants+sampled"


def check_jt_laws(
    monad: StrongMonadInstance,
    x_type: FinType,
    y_type: FinType,
    z_type: FinType,
    r_prime: FinType,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    samples: int = 2000,
) -> Report:
    """Monad laws for the selection monad, checked extensionally.

    Unit laws are exhaustive over selections and families.  Associativity
    quantifies the outer selection through the single context each side
    reads it at (the plan/apply split makes that context explicit), so the
    selection argument is covered completely; the two family arguments
    follow :func:`_family_combos` coverage.  A direct, unfactored route is
    run on seeded triples as well.
    """
    algebra = _algebra_for(monad, r_prime)
    rep = Report(
        f"selection_monad_laws.{monad.tag}",
        {
            "X": repr(x_type),
            "Y": repr(y_type),
            "Z": repr(z_type),
            "R'": repr(r_prime),
            "seed": seed,
        },
    )
    rng = random.Random(f"jt-laws:{seed}")
    sel_x = enumerate_selections(x_type, monad, algebra, cap)
    sel_y = enumerate_selections(y_type, monad, algebra, cap)
    sel_z = enumerate_selections(z_type, monad, algebra, cap)
    space_x = context_space(x_type, algebra.carrier, cap)
    space_y = context_space(y_type, algebra.carrier, cap)
    space_z = context_space(z_type, algebra.carrier, cap)
    xs, ys = space_x.xs, space_y.xs
    txs = enum_values(type_action(monad, x_type), cap)

    # unit lifted along bind is the identity
    eta_fam = {x: jt_eta(x_type, monad, algebra, x, cap) for x in xs}
    cases = 0
    bad = None
    for e in sel_x:
        cases += 1
        got = jt_bind(eta_fam, e, x_type, cap)
        if got.row() != e.row():
            bad = _sel_ce(eps=e, got=got)
            break
    rep.add("unit_lift_identity", cases, bad)

    # bind after unit recovers the family member
    combos, mode = _family_combos(len(sel_y), len(xs), rng, samples)
    cases = 0
    bad = None
    for combo in combos:
        delta = {x: sel_y[i] for x, i in zip(xs, combo)}
        for x in xs:
            cases += 1
            got = jt_bind(delta, eta_fam[x], y_type, cap)
            if got.row() != delta[x].row():
                bad = _sel_ce(x=x, got=got, want=delta[x])
                break
        if bad:
            break
    rep.add("lift_after_unit", cases, bad, mode=mode)

    # associativity, selection argument factored through its read context:
    # at each context p, the composite's bind reads eps at comp_ctx and the
    # two-step side reads it at fctx; those agree (the algebra's composite
    # law), after which sweeping the read value over T(X) covers all eps
    f_combos, mode_f = _family_combos(len(sel_y), len(xs), rng, samples // 8)
    g_combos, mode_g = _family_combos(len(sel_z), len(ys), rng, samples // 8)
    mode = "exhaustive" if mode_f == mode_g == "exhaustive" else "constants+sampled"
    cases = 0
    bad = None

    def assoc_verdict(gb, gctx, fb, p):
        """Both sides at one context, swept over the value read from eps."""
        fctx = space_x.table_for_row(
            tuple(_star(algebra, gctx.apply, v) for v in fb)
        )
        comp_b = tuple(
            _bind_apply(monad, y_type, z_type, ys, gb, v, cap) for v in fb
        )
        comp_ctx = space_x.table_for_row(
            tuple(_star(algebra, p.apply, v) for v in comp_b)
        )
        if comp_ctx != fctx:
            return _sel_ce(p=p, ctx_lhs=comp_ctx, ctx_rhs=fctx)
        for a in txs:
            lhs = _bind_apply(monad, x_type, z_type, xs, comp_b, a, cap)
            u = _bind_apply(monad, x_type, y_type, xs, fb, a, cap)
            rhs = _bind_apply(monad, y_type, z_type, ys, gb, u, cap)
            if lhs != rhs:
                return _sel_ce(p=p, a=a, lhs=lhs, rhs=rhs)
        return None

    g_plans: dict[tuple, list] = {}
    for combo_g in g_combos:
        g_fam = {y: sel_z[i] for y, i in zip(ys, combo_g)}
        g_plans[combo_g] = [
            _bind_plan(algebra, ys, g_fam.__getitem__, p, space_y)
            for p in space_z.contexts
        ]
    # the verdict at (g-family, context) depends on the f-family only
    # through its values at gctx, so identical reads share one sweep
    verdict_memo: dict = {}
    _missing = object()
    n_sweep = len(txs)
    for combo_f in f_combos:
        f_sels = [sel_y[i] for i in combo_f]
        for combo_g in g_combos:
            plans = g_plans[combo_g]
            for pi, p in enumerate(space_z.contexts):
                cases += n_sweep
                gb, gctx = plans[pi]
                fb = tuple(s.apply(gctx) for s in f_sels)
                key = (combo_g, pi, fb)
                verdict = verdict_memo.get(key, _missing)
                if verdict is _missing:
                    verdict = assoc_verdict(gb, gctx, fb, p)
                    verdict_memo[key] = verdict
                if verdict is not None:
                    bad = verdict
                    break
            if bad:
                break
        if bad:
            break
    rep.add("lift_composition", cases, bad, mode=mode)

    # direct route on seeded triples, no factoring
    cases = 0
    bad = None
    for _ in range(min(samples, 400)):
        e = rng.choice(sel_x)
        f_fam = {x: rng.choice(sel_y) for x in xs}
        g_fam = {y: rng.choice(sel_z) for y in ys}
        comp = {x: jt_bind(g_fam, f_fam[x], z_type, cap) for x in xs}
        lhs = jt_bind(comp, e, z_type, cap)
        rhs = jt_bind(g_fam, jt_bind(f_fam, e, y_type, cap), z_type, cap)
        cases += 1
        if lhs.row() != rhs.row():
            bad = _sel_ce(eps=e, lhs=lhs, rhs=rhs)
            break
    rep.add("lift_composition_direct", cases, bad, mode=f"sampled(seed={seed})")
    return rep


def check_jt_product_agreement(
    monad: StrongMonadInstance,
    x_type: FinType,
    y_type: FinType,
    r_prime: FinType,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    samples: int = 2000,
) -> Report:
    """Explicit product versus the unit/bind-derived product, extensionally."""
    algebra = _algebra_for(monad, r_prime)
    rep = Report(
        f"selection_product_agreement.{monad.tag}",
        {"X": repr(x_type), "Y": repr(y_type), "R'": repr(r_prime), "seed": seed},
    )
    rng = random.Random(f"jt-product:{seed}")
    sel_x = enumerate_selections(x_type, monad, algebra, cap)
    sel_y = enumerate_selections(y_type, monad, algebra, cap)
    space_x = context_space(x_type, algebra.carrier, cap)
    xs = space_x.xs
    prod = Prod(x_type, y_type)
    space_p = context_space(prod, algebra.carrier, cap)
    txs = enum_values(type_action(monad, x_type), cap)

    combos, mode = _family_combos(len(sel_y), len(xs), rng, samples)
    cases = 0
    bad = None
    explicit_memo: dict = {}
    generic_memo: dict = {}
    inner_memo: dict = {}
    for combo in combos:
        delta = {x: sel_y[i] for x, i in zip(xs, combo)}
        inners = {}
        for x, i in zip(xs, combo):
            sel = inner_memo.get((i, x))
            if sel is None:
                sel = jt_bind(
                    lambda y, x=x: jt_eta(prod, monad, algebra, Pair(x, y), cap),
                    sel_y[i],
                    prod,
                    cap,
                )
                inner_memo[(i, x)] = sel
            inners[x] = sel
        for q in space_p.contexts:
            f, actx = _product_plan(algebra, xs, delta.__getitem__, q, space_x)
            b, gctx = _bind_plan(algebra, xs, inners.__getitem__, q, space_x)
            agreeing = actx == gctx
            for a in txs:
                cases += 1
                lhs = explicit_memo.get((a, f))
                if lhs is None:
                    lhs = _product_apply(monad, x_type, y_type, xs, f, a, cap)
                    explicit_memo[(a, f)] = lhs
                rhs = generic_memo.get((a, b))
                if rhs is None:
                    rhs = _bind_apply(monad, x_type, prod, xs, b, a, cap)
                    generic_memo[(a, b)] = rhs
                if lhs != rhs or not agreeing:
                    if agreeing:
                        bad = _sel_ce(q=q, a=a, explicit=lhs, generic=rhs)
                    else:
                        bad = _sel_ce(q=q, ctx_explicit=actx, ctx_generic=gctx)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("explicit_vs_generic", cases, bad, mode=mode)

    # direct route: whole selections compared, no factoring
    cases = 0
    bad = None
    for _ in range(min(samples, 200)):
        e = rng.choice(sel_x)
        delta = {x: rng.choice(sel_y) for x in xs}
        lhs = jt_product_selection(e, delta, cap)
        rhs = jt_product_generic(e, delta, cap)
        cases += 1
        if lhs.row() != rhs.row():
            bad = _sel_ce(eps=e, lhs=lhs, rhs=rhs)
            break
    rep.add("explicit_vs_generic_direct", cases, bad, mode=f"sampled(seed={seed})")
    return rep


def check_bar_binary(
    monad: StrongMonadInstance,
    x_type: FinType,
    y_type: FinType,
    r_prime: FinType,
    cap: int = DEFAULT_CAP,
    seed: int = 0,
    samples: int = 2000,
    bar_fn=None,
) -> Report:
    """The embedding into quantifiers respects units and binary products."""
    algebra = _algebra_for(monad, r_prime)
    bar_ = bar_fn if bar_fn is not None else bar
    rep = Report(
        f"bar_morphism.{monad.tag}",
        {"X": repr(x_type), "Y": repr(y_type), "R'": repr(r_prime), "seed": seed},
    )
    rng = random.Random(f"bar-binary:{seed}")
    sel_x = enumerate_selections(x_type, monad, algebra, cap)
    sel_y = enumerate_selections(y_type, monad, algebra, cap)
    space_x = context_space(x_type, algebra.carrier, cap)
    xs = space_x.xs
    prod = Prod(x_type, y_type)
    space_p = context_space(prod, algebra.carrier, cap)
    txs = enum_values(type_action(monad, x_type), cap)

    # unit preservation
    cases = 0
    bad = None
    for x in xs:
        cases += 1
        lhs = bar_(jt_eta(x_type, monad, algebra, x, cap))
        rhs = k_eta(x_type, algebra.carrier, x, cap)
        if lhs.row() != rhs.row():
            bad = _sel_ce(x=x, lhs=lhs, rhs=rhs)
            break
    rep.add("unit_preserved", cases, bad)

    # product preservation: the product side reads the selection at the
    # product-plan context, the quantifier side at the quantifier-product
    # context; both are built and the read value is quantified over T(X)
    bar_y = [bar_(s) for s in sel_y]
    combos, mode = _family_combos(len(sel_y), len(xs), rng, samples)
    cases = 0
    bad = None
    lhs_memo: dict = {}
    for combo in combos:
        delta = {x: sel_y[i] for x, i in zip(xs, combo)}
        for q in space_p.contexts:
            f, actx = _product_plan(algebra, xs, delta.__getitem__, q, space_x)
            sections = [_section(q, x, algebra.carrier) for x in xs]
            kctx = space_x.table_for_row(
                tuple(bar_y[i].apply(qx) for i, qx in zip(combo, sections))
            )
            agreeing = actx == kctx
            for a in txs:
                cases += 1
                key = (a, f, q)
                lhs = lhs_memo.get(key)
                if lhs is None:
                    prod_v = _product_apply(monad, x_type, y_type, xs, f, a, cap)
                    lhs = _star(algebra, q.apply, prod_v)
                    lhs_memo[key] = lhs
                rhs = _star(algebra, kctx.apply, a)
                if lhs != rhs or not agreeing:
                    if agreeing:
                        bad = _sel_ce(q=q, a=a, lhs=lhs, rhs=rhs)
                    else:
                        bad = _sel_ce(q=q, ctx_product=actx, ctx_quantifier=kctx)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("product_preserved", cases, bad, mode=mode)

    # direct route: bar of the product selection vs quantifier product
    cases = 0
    bad = None
    for _ in range(min(samples, 200)):
        e = rng.choice(sel_x)
        combo = tuple(rng.randrange(len(sel_y)) for _ in xs)
        delta = {x: sel_y[i] for x, i in zip(xs, combo)}
        lhs = bar_(jt_product_selection(e, delta, cap))
        rhs_row = tuple(
            k_product_apply(bar_(e), lambda x: bar_y[combo[xs.index(x)]], q, cap)
            for q in space_p.contexts
        )
        cases += 1
        if lhs.row() != rhs_row:
            bad = _sel_ce(eps=e, lhs=lhs, rhs=rhs_row)
            break
    rep.add("product_preserved_direct", cases, bad, mode=f"sampled(seed={seed})")
    return rep
