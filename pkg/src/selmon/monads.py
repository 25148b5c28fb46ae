"""Strong monads as a closed set of instances, with algebras and law checkers.

Three instances: identity, finite powerset, and continuation into a fixed
result type.  Continuation values are materialized as finite tables over
enumerated contexts so that extensional equality stays decidable.  The
binary product is the generic one definable on any strong monad,

    a (x) f = (lam x. (lam y. eta(x, y))+(f x))+(a)

written with + for the uniform lifting; the powerset instance must agree
with the comprehension {(a, b) : a in S, b in f(a)}, which the checkers
verify as an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TypeMismatch
from .reporting import Report
from .universe import (
    DEFAULT_CAP,
    FinType,
    Fun,
    FunTable,
    FunVal,
    Pair,
    Pow,
    Prod,
    SetVal,
    Value,
    enum_functions,
    enum_values,
    value_to_json,
)


@dataclass(frozen=True)
class StrongMonadInstance:
    """One of the closed set of monads: identity, powerset, continuation(R)."""

    tag: str
    result_type: FinType | None = None

    def __repr__(self):
        if self.tag == "continuation":
            return f"Continuation({self.result_type!r})"
        return self.tag.capitalize()


IDENTITY = StrongMonadInstance("identity")
POWERSET = StrongMonadInstance("powerset")


def continuation(result_type: FinType) -> StrongMonadInstance:
    return StrongMonadInstance("continuation", result_type)


def type_action(m: StrongMonadInstance, x: FinType) -> FinType:
    if m.tag == "identity":
        return x
    if m.tag == "powerset":
        return Pow(x)
    if m.tag == "continuation":
        return Fun(Fun(x, m.result_type), m.result_type)
    raise TypeMismatch(f"unknown monad {m!r}")


def _as_fn(f):
    """Accept a FunTable, mapping, or callable as a total function."""
    if isinstance(f, FunTable):
        return f.apply
    if isinstance(f, dict):
        return f.__getitem__
    if callable(f):
        return f
    raise TypeMismatch(f"not a function-like argument: {f!r}")


def m_eta(m: StrongMonadInstance, x_type: FinType, x: Value, cap: int = DEFAULT_CAP) -> Value:
    """Monad unit.  For continuation: the table p |-> p(x) over all contexts."""
    if m.tag == "identity":
        return x
    if m.tag == "powerset":
        return SetVal(frozenset((x,)))
    if m.tag == "continuation":
        r = m.result_type
        contexts = enum_functions(x_type, r, cap)
        return FunVal(
            FunTable(Fun(x_type, r), r, [(FunVal(p), p.apply(x)) for p in contexts])
        )
    raise TypeMismatch(f"unknown monad {m!r}")


def _bind(m, x_type, y_type, fn, t, cap):
    if m.tag == "identity":
        return fn(t)
    if m.tag == "powerset":
        if not isinstance(t, SetVal):
            raise TypeMismatch(f"powerset bind needs a set value, got {t!r}")
        acc = frozenset()
        for x in t.members:
            fx = fn(x)
            if not isinstance(fx, SetVal):
                raise TypeMismatch(f"powerset bind image is not a set: {fx!r}")
            acc |= fx.members
        return SetVal(acc)
    if m.tag == "continuation":
        r = m.result_type
        if not isinstance(t, FunVal):
            raise TypeMismatch(f"continuation bind needs a table value, got {t!r}")
        xs = enum_values(x_type, cap)
        dom_y = Fun(y_type, r)
        fx_tables = {x: fn(x).table for x in xs}
        t_apply = t.table.apply
        entries = []
        for q in enum_functions(y_type, r, cap):
            qv = FunVal(q)
            composite = FunTable(
                x_type, r, [(x, fx_tables[x].apply(qv)) for x in xs]
            )
            entries.append((qv, t_apply(FunVal(composite))))
        return FunVal(FunTable(dom_y, r, entries))
    raise TypeMismatch(f"unknown monad {m!r}")


def m_bind(m: StrongMonadInstance, f: FunTable, t: Value, cap: int = DEFAULT_CAP) -> Value:
    """Uniform lifting of f : X -> M(Y) to M(X) -> M(Y), applied to t."""
    x_type, y_type = _bind_types(m, f)
    return _bind(m, x_type, y_type, _as_fn(f), t, cap)


def _bind_types(m, f: FunTable):
    if not isinstance(f, FunTable):
        raise TypeMismatch("m_bind/m_product take the family as a FunTable")
    x_type = f.dom
    my = f.cod
    if m.tag == "identity":
        return x_type, my
    if m.tag == "powerset":
        if not isinstance(my, Pow):
            raise TypeMismatch(f"family codomain {my!r} is not a powerset type")
        return x_type, my.elem
    if m.tag == "continuation":
        if not (isinstance(my, Fun) and isinstance(my.dom, Fun)):
            raise TypeMismatch(f"family codomain {my!r} is not a continuation type")
        return x_type, my.dom.dom
    raise TypeMismatch(f"unknown monad {m!r}")


def m_map(m: StrongMonadInstance, g: FunTable, t: Value, cap: int = DEFAULT_CAP) -> Value:
    """Functorial action: (eta . g) lifted."""
    x_type, y_type = g.dom, g.cod
    gfn = g.apply
    return _bind(m, x_type, y_type, lambda x: m_eta(m, y_type, gfn(x), cap), t, cap)


def _product(m, x_type, y_type, a, fn, cap):
    prod = Prod(x_type, y_type)

    def inner(x):
        return _bind(
            m, y_type, prod, lambda y: m_eta(m, prod, Pair(x, y), cap), fn(x), cap
        )

    return _bind(m, x_type, prod, inner, a, cap)


def m_product(m: StrongMonadInstance, a: Value, f: FunTable, cap: int = DEFAULT_CAP) -> Value:
    """Binary product M(X) x (X -> M(Y)) -> M(X x Y), generic over the instance."""
    x_type, y_type = _bind_types(m, f)
    return _product(m, x_type, y_type, a, _as_fn(f), cap)


def powerset_product(a: SetVal, f) -> SetVal:
    """The comprehension {(x, y) : x in a, y in f(x)}; independent of m_product."""
    fn = _as_fn(f)
    out = set()
    for x in a.members:
        for y in fn(x).members:
            out.add(Pair(x, y))
    return SetVal(frozenset(out))


# ---------------------------------------------------------------------------
# Algebras


@dataclass(frozen=True)
class AlgebraWitness:
    """A carrier type with a star map compatible with unit and lifting.

    kind 'powerset_union': carrier Pow(R'), star g*(S) = union of g-images.
    kind 'identity_apply': any carrier for the identity monad, star = apply.
    """

    monad: StrongMonadInstance
    carrier: FinType
    kind: str


def powerset_algebra(r_prime: FinType) -> AlgebraWitness:
    return AlgebraWitness(POWERSET, Pow(r_prime), "powerset_union")


def identity_algebra(carrier: FinType) -> AlgebraWitness:
    return AlgebraWitness(IDENTITY, carrier, "identity_apply")


def _star(alg: AlgebraWitness, gfn, t: Value) -> Value:
    if alg.kind == "identity_apply":
        return gfn(t)
    if alg.kind == "powerset_union":
        if not isinstance(t, SetVal):
            raise TypeMismatch(f"powerset algebra star needs a set, got {t!r}")
        acc = frozenset()
        for y in t.members:
            gy = gfn(y)
            if not isinstance(gy, SetVal):
                raise TypeMismatch(f"algebra image is not a set: {gy!r}")
            acc |= gy.members
        return SetVal(acc)
    raise TypeMismatch(f"unknown algebra kind {alg.kind!r}")


def alg_star(alg: AlgebraWitness, g, t: Value) -> Value:
    """Algebra map g* applied to a monadic value."""
    return _star(alg, _as_fn(g), t)


def union_r(s: Value) -> SetVal:
    """Union of a finite set of finite sets."""
    if not isinstance(s, SetVal):
        raise TypeMismatch(f"union needs a set of sets, got {s!r}")
    acc = frozenset()
    for member in s.members:
        if not isinstance(member, SetVal):
            raise TypeMismatch(f"union member is not a set: {member!r}")
        acc |= member.members
    return SetVal(acc)


# ---------------------------------------------------------------------------
# Law checkers


def _ce(**kv) -> dict:
    """Render a counterexample with canonical value encodings where possible."""
    out = {}
    for k, v in kv.items():
        if isinstance(v, Value):
            out[k] = value_to_json(v)
        elif isinstance(v, FunTable):
            out[k] = [[value_to_json(a), value_to_json(b)] for a, b in v.entries]
        else:
            out[k] = repr(v)
    return out


def check_monad_laws(
    m: StrongMonadInstance,
    x_type: FinType,
    y_type: FinType,
    z_type: FinType,
    cap: int = DEFAULT_CAP,
    bind_fn=None,
) -> Report:
    """Exhaustively verify unit, lifting, and associativity laws.

    ``bind_fn`` substitutes the bind under test (negative-control hook);
    it defaults to the real one.
    """
    rep = Report(
        f"monad_laws.{m.tag}",
        {"X": repr(x_type), "Y": repr(y_type), "Z": repr(z_type), "cap": cap},
    )
    tx = type_action(m, x_type)
    ty = type_action(m, y_type)
    tz = type_action(m, z_type)
    txs = enum_values(tx, cap)
    xs = enum_values(x_type, cap)

    def bind(xt, yt, fn, t):
        if bind_fn is not None:
            return bind_fn(m, xt, yt, fn, t, cap)
        return _bind(m, xt, yt, fn, t, cap)

    # (i) lifting the unit is the identity
    eta_x = {x: m_eta(m, x_type, x, cap) for x in xs}
    cases = 0
    bad = None
    for t in txs:
        cases += 1
        got = bind(x_type, x_type, eta_x.__getitem__, t)
        if got != t:
            bad = _ce(t=t, got=got)
            break
    rep.add("unit_lift_identity", cases, bad)

    # (ii) lifted family after unit recovers the family
    fams_xy = enum_functions(x_type, ty, cap)
    cases = 0
    bad = None
    for f in fams_xy:
        for x in xs:
            cases += 1
            got = bind(x_type, y_type, f.apply, eta_x[x])
            want = f.apply(x)
            if got != want:
                bad = _ce(f=f, x=x, got=got, want=want)
                break
        if bad:
            break
    rep.add("lift_after_unit", cases, bad)

    # (iii) lifting distributes over Kleisli composition.  Lifted tables are
    # precomputed per family, the composite lift is memoized by its graph,
    # and results are interned so the cross product of families reduces to
    # identity comparisons.
    fams_yz = enum_functions(y_type, tz, cap)
    tys = enum_values(ty, cap)
    canon_ty: dict[Value, Value] = {}
    canon_tz: dict[Value, Value] = {}

    def canon(intern, v):
        return intern.setdefault(v, v)

    f_lift = [
        {t: canon(canon_ty, bind(x_type, y_type, f.apply, t)) for t in txs}
        for f in fams_xy
    ]
    g_lift = [
        {u: canon(canon_tz, bind(y_type, z_type, g.apply, u)) for u in tys}
        for g in fams_yz
    ]
    cases = 0
    bad = None
    comp_lift_memo: dict[tuple, dict] = {}
    for fi, f in enumerate(fams_xy):
        fxs = [f.apply(x) for x in xs]
        fl = f_lift[fi]
        for gi, g in enumerate(fams_yz):
            gl = g_lift[gi]
            comp_vals = tuple(gl[fx] for fx in fxs)
            lhs_by_t = comp_lift_memo.get(comp_vals)
            if lhs_by_t is None:
                comp = dict(zip(xs, comp_vals))
                lhs_by_t = {
                    t: canon(canon_tz, bind(x_type, z_type, comp.__getitem__, t))
                    for t in txs
                }
                comp_lift_memo[comp_vals] = lhs_by_t
            for t in txs:
                cases += 1
                lhs = lhs_by_t[t]
                rhs = gl[fl[t]]
                if lhs is not rhs and lhs != rhs:
                    bad = _ce(f=f, g=g, t=t, lhs=lhs, rhs=rhs)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("lift_composition", cases, bad)

    # functor identity: mapping the identity table changes nothing
    id_tab = FunTable(x_type, x_type, [(x, x) for x in xs])
    cases = 0
    bad = None
    for t in txs:
        cases += 1
        got = m_map(m, id_tab, t, cap)
        if got != t:
            bad = _ce(t=t, got=got)
            break
    rep.add("functor_identity", cases, bad)
    return rep


def check_algebra_laws(
    alg: AlgebraWitness,
    x_type: FinType,
    y_type: FinType,
    cap: int = DEFAULT_CAP,
) -> Report:
    """Exhaustively verify both algebra laws for the canonical instances."""
    m = alg.monad
    rep = Report(
        f"algebra_laws.{alg.kind}",
        {"X": repr(x_type), "Y": repr(y_type), "carrier": repr(alg.carrier), "cap": cap},
    )
    ys = enum_values(y_type, cap)
    gs = enum_functions(y_type, alg.carrier, cap)

    # (i) star after unit recovers the map
    cases = 0
    bad = None
    for g in gs:
        for y in ys:
            cases += 1
            got = alg_star(alg, g, m_eta(m, y_type, y, cap))
            if got != g.apply(y):
                bad = _ce(g=g, y=y, got=got, want=g.apply(y))
                break
        if bad:
            break
    rep.add("star_after_unit", cases, bad)

    # (ii) star of a starred composite equals star after lift
    ty = type_action(m, y_type)
    fams = enum_functions(x_type, ty, cap)
    txs = enum_values(type_action(m, x_type), cap)
    cases = 0
    bad = None
    for g in gs:
        for f in fams:
            comp = {x: alg_star(alg, g, f.apply(x)) for x in enum_values(x_type, cap)}
            for t in txs:
                cases += 1
                lhs = _star(alg, comp.__getitem__, t)
                rhs = alg_star(alg, g, _bind(m, x_type, y_type, f.apply, t, cap))
                if lhs != rhs:
                    bad = _ce(g=g, f=f, t=t, lhs=lhs, rhs=rhs)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("star_of_composite", cases, bad)
    return rep


def check_product_identity(
    m: StrongMonadInstance,
    x_type: FinType,
    y_type: FinType,
    w_type: FinType,
    cap: int = DEFAULT_CAP,
    algebra: AlgebraWitness | None = None,
) -> Report:
    """The product's defining identity, in both the lifted and starred forms.

    Lifted: q+(a (x) f) = (lam x. (q_x)+(f x))+(a) for q : XxY -> M(W).
    Starred: same with an algebra carrier in place of M(W).
    """
    rep = Report(
        f"product_identity.{m.tag}",
        {"X": repr(x_type), "Y": repr(y_type), "W": repr(w_type), "cap": cap},
    )
    prod = Prod(x_type, y_type)
    xs = enum_values(x_type, cap)
    ys = enum_values(y_type, cap)
    tw = type_action(m, w_type)
    tas = enum_values(type_action(m, x_type), cap)
    fams = enum_functions(x_type, type_action(m, y_type), cap)
    qs = enum_functions(prod, tw, cap)

    cases = 0
    bad = None
    prod_memo = {}
    for f in fams:
        for a in tas:
            key = (f, a)
            ab = prod_memo.get(key)
            if ab is None:
                ab = _product(m, x_type, y_type, a, f.apply, cap)
                prod_memo[key] = ab
            for q in qs:
                cases += 1
                lhs = _bind(m, prod, w_type, q.apply, ab, cap)
                inner = {
                    x: _bind(
                        m,
                        y_type,
                        w_type,
                        lambda y, x=x: q.apply(Pair(x, y)),
                        f.apply(x),
                        cap,
                    )
                    for x in xs
                }
                rhs = _bind(m, x_type, w_type, inner.__getitem__, a, cap)
                if lhs != rhs:
                    bad = _ce(f=f, a=a, q=q, lhs=lhs, rhs=rhs)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("lifted_outcome", cases, bad)

    if algebra is not None:
        qs_star = enum_functions(prod, algebra.carrier, cap)
        cases = 0
        bad = None
        for f in fams:
            for a in tas:
                ab = prod_memo.get((f, a))
                if ab is None:
                    ab = _product(m, x_type, y_type, a, f.apply, cap)
                    prod_memo[(f, a)] = ab
                for q in qs_star:
                    cases += 1
                    lhs = alg_star(algebra, q, ab)
                    inner = {
                        x: _star(
                            algebra,
                            lambda y, x=x: q.apply(Pair(x, y)),
                            f.apply(x),
                        )
                        for x in xs
                    }
                    rhs = _star(algebra, inner.__getitem__, a)
                    if lhs != rhs:
                        bad = _ce(f=f, a=a, q=q, lhs=lhs, rhs=rhs)
                        break
                if bad:
                    break
            if bad:
                break
        rep.add("starred_outcome", cases, bad)

    if m.tag == "powerset":
        cases = 0
        bad = None
        for f in fams:
            for a in tas:
                cases += 1
                generic = prod_memo.get((f, a))
                if generic is None:
                    generic = _product(m, x_type, y_type, a, f.apply, cap)
                direct = powerset_product(a, f)
                if generic != direct:
                    bad = _ce(f=f, a=a, generic=generic, direct=direct)
                    break
            if bad:
                break
        rep.add("comprehension_agreement", cases, bad)
    return rep
