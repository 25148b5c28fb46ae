"""Explicitly controlled iterated products over sequences of selections.

The recursions here unfold the binary product of a strong monad along
finite play sequences, stopped by the bar condition ``omega(s^+) < |s|``:

* :func:`epq`  - the quantifier recursion
      EPQ_s(phi)(q) = q(<>)                        if the bar has been hit
                    = phi_s(lam x. EPQ_{s*x}(phi)(q_x))   otherwise

* :func:`teps` - the selection recursion, returning a monadic set of plays
      TEPS_s(e)(q) = unit(<>)                      if the bar has been hit
                   = a (x)_T f                     otherwise
      with f(x) = TEPS_{s*x}(e)(q_x) and a = e_s(lam x. (q_x)*(f x)),
      pairs identified with extended sequences.

A stopping function must declare a bound; the recursion depth is guarded
at bound + 2 and a violation raises DepthExceeded, which converts the
usual semantic termination assumption into a checkable contract.

:func:`transform_selection` rebuilds a selection family so that outcomes
are monadic infinite sequences (the play itself), and
:func:`teps_via_epq` uses it to compute the selection recursion purely
from the quantifier recursion; :func:`check_equivalence` verifies all
three equalities (quantifier embedding, sequence simulation,
definability) on seeded samples.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable

from .errors import DepthExceeded, TypeMismatch
from .monads import (
    StrongMonadInstance,
    identity_algebra,
    powerset_algebra,
    type_action,
)
from .reporting import Report
from .selection import Quantifier, TSelection, bar, context_space
from .universe import (
    DEFAULT_CAP,
    EvSeq,
    FinSeq,
    FinType,
    Pow,
    SetVal,
    Value,
    drop_prefix,
    empty_seq,
    enum_values,
    ev_prefix_seq,
    extend_plus,
)

# re-exported for callers building finite types of monadic results
__all__ = [
    "IdentityKernel",
    "PowersetKernel",
    "kernel_for",
    "OutcomeFunction",
    "StoppingFunction",
    "SelectionFamily",
    "ValueStar",
    "FreeStar",
    "epq",
    "teps",
    "transform_selection",
    "teps_via_epq",
    "check_equivalence",
    "finseqs_upto",
    "sample_selection_family",
    "sample_outcome_function",
    "sample_stopping_function",
]


class IdentityKernel:
    """Identity monad on plain Python objects."""

    tag = "identity"

    @staticmethod
    def unit(x):
        return x

    @staticmethod
    def bind(fn, t):
        return fn(t)

    @staticmethod
    def map(fn, t):
        return fn(t)

    @classmethod
    def product(cls, a, fn):
        return cls.bind(lambda x: cls.bind(lambda y: cls.unit((x, y)), fn(x)), a)


class PowersetKernel:
    """Finite powerset monad on plain Python objects (frozensets)."""

    tag = "powerset"

    @staticmethod
    def unit(x):
        return frozenset((x,))

    @staticmethod
    def bind(fn, t):
        out = frozenset()
        for x in t:
            out |= fn(x)
        return out

    @staticmethod
    def map(fn, t):
        return frozenset(fn(x) for x in t)

    @classmethod
    def product(cls, a, fn):
        return cls.bind(lambda x: cls.bind(lambda y: cls.unit((x, y)), fn(x)), a)


def kernel_for(monad: StrongMonadInstance):
    if monad.tag == "identity":
        return IdentityKernel
    if monad.tag == "powerset":
        return PowersetKernel
    raise TypeMismatch(f"no sequence-recursion kernel for {monad!r}")


def tvalue_to_obj(monad: StrongMonadInstance, v: Value):
    """A monadic Value as a kernel object: sets become frozensets of members."""
    if monad.tag == "powerset":
        if not isinstance(v, SetVal):
            raise TypeMismatch(f"expected a set value, got {v!r}")
        return v.members
    return v


@dataclass
class OutcomeFunction:
    """Total outcome rule on finite plays; outputs are values or kernel objects."""

    elem_type: FinType
    fn: Callable[[FinSeq], object]
    r_type: FinType | None = None

    def at(self, s: FinSeq):
        return self.fn(s)

    def at_ev(self, b: EvSeq):
        """Outcome of an eventually-default sequence, read off its prefix."""
        return self.fn(ev_prefix_seq(b))

    def shifted(self, s: FinSeq) -> "OutcomeFunction":
        return OutcomeFunction(self.elem_type, lambda t: self.fn(s.concat(t)), self.r_type)


@dataclass
class StoppingFunction:
    """Stopping rule on infinite plays with a declared bound."""

    elem_type: FinType
    fn: Callable[[EvSeq], int]
    bound: int

    def at(self, b: EvSeq) -> int:
        return self.fn(b)

    def validate_on(self, samples) -> None:
        """Spot-check the declared bound on the given sequences."""
        for b in samples:
            v = self.fn(b)
            if not isinstance(v, int) or v < 0:
                raise TypeMismatch(f"stopping value {v!r} is not a natural number")
            if v > self.bound:
                raise TypeMismatch(
                    f"stopping value {v} exceeds declared bound {self.bound}"
                )


class ValueStar:
    """Star of outcome maps over monadic values living in a finite carrier."""

    def __init__(self, monad: StrongMonadInstance, r_type: FinType):
        self.monad = monad
        self.r_type = r_type

    def star(self, fn, t_obj):
        if self.monad.tag == "identity":
            return fn(t_obj)
        acc = frozenset()
        for x in t_obj:
            v = fn(x)
            if not isinstance(v, SetVal):
                raise TypeMismatch(f"outcome {v!r} is not a set value")
            acc |= v.members
        return SetVal(acc)


class FreeStar:
    """Star for outcomes that are themselves monadic objects: plain bind."""

    r_type = None

    def __init__(self, kernel):
        self.kernel = kernel

    def star(self, fn, t_obj):
        if self.kernel is IdentityKernel:
            return fn(t_obj)
        return self.kernel.bind(fn, t_obj)


@dataclass
class SelectionFamily:
    """Selections indexed by finite plays, with their outcome star."""

    x_type: FinType
    monad: StrongMonadInstance
    rstar: object
    rule: Callable[[FinSeq], TSelection]

    def at(self, s: FinSeq) -> TSelection:
        return self.rule(s)


def _guard(omega: StoppingFunction, depth_guard: int | None) -> int:
    g = depth_guard if depth_guard is not None else omega.bound + 2
    if g < omega.bound + 2:
        raise TypeMismatch(
            f"depth guard {g} below declared stopping bound {omega.bound} + 2"
        )
    return g


def _quant_eval(phi, row_map, x_type, cap=DEFAULT_CAP):
    """Apply a quantifier to a context given as an {x: outcome} mapping."""
    if isinstance(phi, Quantifier) and phi.outputs is not None:
        space = context_space(x_type, phi.r_type, cap)
        return phi.apply(space.table_for_row(tuple(row_map[x] for x in space.xs)))
    return phi.apply(row_map)


def epq(
    omega: StoppingFunction,
    phi_of: Callable[[FinSeq], Quantifier],
    q: OutcomeFunction,
    s: FinSeq | None = None,
    depth_guard: int | None = None,
    cap: int = DEFAULT_CAP,
):
    """Controlled iterated product of quantifiers, started at play ``s``."""
    x_type = omega.elem_type
    root = s if s is not None else empty_seq(x_type)
    guard = _guard(omega, depth_guard)
    xs = enum_values(x_type, cap)
    memo: dict[FinSeq, object] = {}

    def val(node: FinSeq):
        got = memo.get(node)
        if got is not None:
            return got
        if len(node) - len(root) > guard:
            raise DepthExceeded(
                f"recursion below {len(node)} plays exceeds guard {guard}"
            )
        if omega.at(extend_plus(node)) < len(node):
            out = q.at(node.drop(len(root)))
        else:
            row = {x: val(node.append(x)) for x in xs}
            out = _quant_eval(phi_of(node), row, x_type, cap)
        memo[node] = out
        return out

    return val(root)


def teps(
    monad: StrongMonadInstance,
    omega: StoppingFunction,
    eps: SelectionFamily,
    q: OutcomeFunction,
    s: FinSeq | None = None,
    depth_guard: int | None = None,
    cap: int = DEFAULT_CAP,
):
    """Controlled iterated product of selections; returns plays under the monad."""
    x_type = eps.x_type
    kernel = kernel_for(monad)
    root = s if s is not None else empty_seq(x_type)
    guard = _guard(omega, depth_guard)
    xs = enum_values(x_type, cap)
    rstar = eps.rstar
    memo: dict[FinSeq, object] = {}

    def q_from(node: FinSeq):
        return lambda t: q.at(node.drop(len(root)).concat(t))

    def val(node: FinSeq):
        got = memo.get(node)
        if got is not None:
            return got
        if len(node) - len(root) > guard:
            raise DepthExceeded(
                f"recursion below {len(node)} plays exceeds guard {guard}"
            )
        if omega.at(extend_plus(node)) < len(node):
            out = kernel.unit(empty_seq(x_type))
        else:
            f = {x: val(node.append(x)) for x in xs}
            row = {x: rstar.star(q_from(node.append(x)), f[x]) for x in xs}
            sel = eps.at(node)
            if rstar.r_type is not None:
                space = context_space(x_type, rstar.r_type, cap)
                a_val = sel.apply(space.table_for_row(tuple(row[x] for x in xs)))
            else:
                a_val = sel.apply(row)
            pairs = kernel.product(tvalue_to_obj(monad, a_val), f.__getitem__)
            out = kernel.map(lambda xr: _cons(xr[0], xr[1]), pairs)
        memo[node] = out
        return out

    return val(root)


def _cons(x: Value, rest: FinSeq) -> FinSeq:
    return FinSeq(rest.elem_type, (x,) + rest.items)


def transform_selection(eps: SelectionFamily, q: OutcomeFunction) -> SelectionFamily:
    """Rebuild the family so outcomes are monadic infinite plays.

    The transformed selection at play s, applied to a context p sending
    moves to monadic sequences, evaluates the original selection at

        lam x. ((q after s*x) star . map(drop_{|s*x|}))(p x)

    so the original outcome is recovered from the simulated one.  Bodies
    are callable: contexts range over monadic sequence objects, which no
    finite table could index.
    """
    kernel = kernel_for(eps.monad)
    x_type = eps.x_type
    xs = enum_values(x_type)
    value_star = eps.rstar
    if value_star.r_type is None:
        raise TypeMismatch("transform needs a family with carrier-valued outcomes")
    space = context_space(x_type, value_star.r_type)

    def rule(s: FinSeq) -> TSelection:
        base = eps.at(s)

        def body(p):
            getter = p.__getitem__ if isinstance(p, dict) else p
            row = []
            for x in xs:
                node = s.append(x)
                dropped = kernel.map(lambda b: drop_prefix(len(node), b), getter(x))
                row.append(
                    value_star.star(lambda b: q.at(node.concat(ev_prefix_seq(b))), dropped)
                )
            return base.apply(space.table_for_row(tuple(row)))

        return TSelection(x_type, eps.monad, None, fn=body)

    return SelectionFamily(x_type, eps.monad, FreeStar(kernel), rule)


def _free_star(kernel, ctx_get, chi: Value, monad):
    """Algebra star for monadic-sequence outcomes: bind the context through chi."""
    if monad.tag == "identity":
        return ctx_get(chi)
    return kernel.bind(ctx_get, tvalue_to_obj(monad, chi))


def teps_via_epq(
    monad: StrongMonadInstance,
    omega: StoppingFunction,
    eps: SelectionFamily,
    q: OutcomeFunction,
    depth_guard: int | None = None,
    cap: int = DEFAULT_CAP,
    transformed: SelectionFamily | None = None,
):
    """The selection recursion computed from the quantifier recursion alone.

    Runs the quantifier recursion on the embedded transformed family with
    the unit outcome, then reads finite plays back off the resulting
    monadic sequences.  Must agree with :func:`teps` on the same inputs.
    """
    kernel = kernel_for(monad)
    x_type = eps.x_type
    eq_fam = transformed if transformed is not None else transform_selection(eps, q)

    def phi_of(s: FinSeq) -> Quantifier:
        sel = eq_fam.at(s)

        def body(ctx):
            getter = ctx.__getitem__ if isinstance(ctx, dict) else ctx
            return _free_star(kernel, getter, sel.apply(ctx), monad)

        return Quantifier(x_type, None, fn=body)

    unit_outcome = OutcomeFunction(
        x_type, lambda t: kernel.unit(extend_plus(t)), None
    )
    res = epq(omega, phi_of, unit_outcome, None, depth_guard, cap)
    return kernel.map(ev_prefix_seq, res)


# ---------------------------------------------------------------------------
# Sampling


def finseqs_upto(x_type: FinType, max_len: int, cap: int = DEFAULT_CAP) -> list[FinSeq]:
    """All plays of length <= max_len, shortest first, deterministic order."""
    xs = enum_values(x_type, cap)
    out = []
    for n in range(max_len + 1):
        out.extend(FinSeq(x_type, items) for items in itertools.product(xs, repeat=n))
    return out


def sample_selection_family(
    rng: random.Random,
    x_type: FinType,
    monad: StrongMonadInstance,
    r_prime: FinType,
    depth: int,
    cap: int = DEFAULT_CAP,
) -> SelectionFamily:
    """Uniform family: an independent selection at every play up to ``depth``."""
    algebra = (
        powerset_algebra(r_prime)
        if monad.tag == "powerset"
        else identity_algebra(Pow(r_prime))
    )
    space = context_space(x_type, algebra.carrier, cap)
    tvals = enum_values(type_action(monad, x_type), cap)
    table = {
        s: TSelection(
            x_type,
            monad,
            algebra,
            space=space,
            outputs=tuple(rng.choice(tvals) for _ in space.contexts),
        )
        for s in finseqs_upto(x_type, depth, cap)
    }

    def rule(s: FinSeq) -> TSelection:
        try:
            return table[s]
        except KeyError:
            raise TypeMismatch(f"family sampled to depth {depth}, asked at {s!r}") from None

    return SelectionFamily(x_type, monad, ValueStar(monad, algebra.carrier), rule)


def sample_outcome_function(
    rng: random.Random,
    x_type: FinType,
    r_type: FinType,
    max_len: int,
    cap: int = DEFAULT_CAP,
) -> OutcomeFunction:
    """Uniform outcome table on plays up to ``max_len``."""
    rvals = enum_values(r_type, cap)
    table = {s: rng.choice(rvals) for s in finseqs_upto(x_type, max_len, cap)}

    def fn(s: FinSeq):
        try:
            return table[s]
        except KeyError:
            raise TypeMismatch(
                f"outcome sampled to length {max_len}, asked at {s!r}"
            ) from None

    return OutcomeFunction(x_type, fn, r_type)


def sample_stopping_function(
    rng: random.Random,
    x_type: FinType,
    bound: int,
    lookahead: int | None = None,
    cap: int = DEFAULT_CAP,
) -> StoppingFunction:
    """Uniform continuous stopping rule reading a fixed number of positions."""
    la = lookahead if lookahead is not None else bound + 1
    xs = enum_values(x_type, cap)
    table = {
        key: rng.randint(0, bound) for key in itertools.product(xs, repeat=la)
    }

    def fn(b: EvSeq) -> int:
        return table[tuple(b.at(i) for i in range(la))]

    return StoppingFunction(x_type, fn, bound)


# ---------------------------------------------------------------------------
# Equivalence checkers


EQUIV_KINDS = ("bar_full", "spector_sim", "definability")


@dataclass
class EquivBounds:
    x_card: int = 2
    r_prime_card: int = 1
    omega_max: int = 2
    monads: tuple[str, ...] = ("identity", "powerset")

    def to_dict(self):
        return {
            "x_card": self.x_card,
            "r_prime_card": self.r_prime_card,
            "omega_max": self.omega_max,
            "monads": list(self.monads),
        }


def check_equivalence(
    which: str,
    bounds: EquivBounds | None = None,
    seed: int = 0,
    cases: int = 200,
    cap: int = DEFAULT_CAP,
    transform_fn=None,
) -> Report:
    """Seeded equality checks between the recursion routes.

    ``bar_full``: star of the selection recursion equals the quantifier
    recursion on the embedded family.  ``spector_sim``: the recursion on
    the transformed family with the unit outcome equals the original.
    ``definability``: the quantifier-only route equals the direct one.
    """
    from .monads import IDENTITY, POWERSET
    from .universe import Base

    if which not in EQUIV_KINDS:
        raise TypeMismatch(f"unknown equivalence check {which!r}")
    b = bounds if bounds is not None else EquivBounds()
    rep = Report(
        f"controlled_product.{which}",
        {"seed": seed, "cases": cases, **b.to_dict()},
    )
    x_type = Base(b.x_card)
    r_prime = Base(b.r_prime_card)
    transform = transform_fn if transform_fn is not None else transform_selection

    for tag in b.monads:
        monad = IDENTITY if tag == "identity" else POWERSET
        n_checked = 0
        bad = None
        for i in range(cases):
            rng = random.Random(f"equiv:{which}:{seed}:{tag}:{i}")
            wmax = rng.randint(0, b.omega_max)
            omega = sample_stopping_function(rng, x_type, wmax)
            fam = sample_selection_family(rng, x_type, monad, r_prime, wmax + 2, cap)
            q = sample_outcome_function(rng, x_type, Pow(r_prime), 2 * wmax + 4, cap)
            n_checked += 1
            if which == "bar_full":
                direct = teps(monad, omega, fam, q, cap=cap)
                lhs = fam.rstar.star(q.at, direct)
                rhs = epq(omega, lambda s: bar(fam.at(s), cap), q, cap=cap)
                if lhs != rhs:
                    bad = {"case": i, "lhs": repr(lhs), "rhs": repr(rhs)}
                    break
            elif which == "spector_sim":
                lhs = teps(monad, omega, fam, q, cap=cap)
                kernel = kernel_for(monad)
                primed = transform(fam, q)
                unit_outcome = OutcomeFunction(
                    x_type, lambda t: kernel.unit(extend_plus(t)), None
                )
                rhs = teps(monad, omega, primed, unit_outcome, cap=cap)
                if lhs != rhs:
                    bad = {"case": i, "lhs": repr(lhs), "rhs": repr(rhs)}
                    break
            else:
                lhs = teps(monad, omega, fam, q, cap=cap)
                rhs = teps_via_epq(
                    monad, omega, fam, q, cap=cap, transformed=transform(fam, q)
                )
                if lhs != rhs:
                    bad = {"case": i, "lhs": repr(lhs), "rhs": repr(rhs)}
                    break
        rep.add(tag, n_checked, bad, mode=f"sampled(seed={seed})")
    return rep
