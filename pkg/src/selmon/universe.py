"""Closed universe of enumerable finite types and values.

Types are built from a fixed descriptor grammar: base types of a given
cardinality, binary products, bounded finite sequences, total function
tables, and finite power sets.  Every type is inhabited by a canonical
default value, every type within the configured cap can be enumerated in
a deterministic default-first order, and equality of values is
structural and decidable (extensional for function tables).

Infinite sequences are modelled by :class:`EvSeq`: a finite prefix
followed by a constant tail.  The canonical form (the prefix never ends
with the tail value) makes structural equality coincide with pointwise
equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import CardinalityExceeded, SchemaError, TypeMismatch

DEFAULT_CAP = 4096


# ---------------------------------------------------------------------------
# Type descriptors


class FinType:
    """Base class of the closed type-descriptor grammar."""

    __slots__ = ()


@dataclass(frozen=True)
class Base(FinType):
    """Base type with elements 0 .. size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise TypeMismatch(f"base type needs positive cardinality, got {self.size}")


@dataclass(frozen=True)
class Prod(FinType):
    left: FinType
    right: FinType


@dataclass(frozen=True)
class Seq(FinType):
    """Sequences over ``elem`` of length 0 .. max_len."""

    elem: FinType
    max_len: int

    def __post_init__(self):
        if self.max_len < 0:
            raise TypeMismatch(f"sequence length bound must be >= 0, got {self.max_len}")


@dataclass(frozen=True)
class Fun(FinType):
    dom: FinType
    cod: FinType


@dataclass(frozen=True)
class Pow(FinType):
    elem: FinType


@lru_cache(maxsize=None)
def cardinality(t: FinType) -> int:
    if isinstance(t, Base):
        return t.size
    if isinstance(t, Prod):
        return cardinality(t.left) * cardinality(t.right)
    if isinstance(t, Seq):
        n = cardinality(t.elem)
        return sum(n**i for i in range(t.max_len + 1))
    if isinstance(t, Fun):
        return cardinality(t.cod) ** cardinality(t.dom)
    if isinstance(t, Pow):
        return 2 ** cardinality(t.elem)
    raise TypeMismatch(f"not a type descriptor: {t!r}")


# ---------------------------------------------------------------------------
# Values


class Value:
    """Base class of tagged values; subclasses are immutable and hashable."""

    __slots__ = ()


_BASE_CACHE: dict[int, "BaseVal"] = {}


@dataclass(frozen=True)
class BaseVal(Value):
    index: int


def base_val(index: int) -> BaseVal:
    """Interned base values; identity makes hot comparisons cheap."""
    v = _BASE_CACHE.get(index)
    if v is None:
        v = _BASE_CACHE[index] = BaseVal(index)
    return v


@dataclass(frozen=True)
class Pair(Value):
    first: Value
    second: Value


@dataclass(frozen=True)
class SeqVal(Value):
    items: tuple[Value, ...]


@dataclass(frozen=True)
class SetVal(Value):
    members: frozenset[Value]

    @staticmethod
    def of(items) -> "SetVal":
        return SetVal(frozenset(items))


EMPTY_SET = SetVal(frozenset())


class FunTable:
    """Total function table with extensional equality.

    Entries are stored sorted by the canonical key order of the domain
    value, so two tables with the same graph are equal and serialize
    identically.  The hash is computed once at construction; tables are
    heavily used as dictionary keys.
    """

    __slots__ = ("dom", "cod", "entries", "_map", "_hash")

    def __init__(self, dom: FinType, cod: FinType, mapping, *, _presorted=False):
        self.dom = dom
        self.cod = cod
        if isinstance(mapping, dict):
            pairs = list(mapping.items())
        else:
            pairs = list(mapping)
        if not _presorted:
            pairs.sort(key=lambda kv: value_key(kv[0]))
        self.entries = tuple(pairs)
        self._map = dict(self.entries)
        if len(self._map) != len(self.entries):
            raise TypeMismatch("duplicate keys in function table")
        self._hash = hash((dom, cod, self.entries))

    @classmethod
    def from_mapping(cls, dom, cod, mapping, *, cap=DEFAULT_CAP) -> "FunTable":
        """Build a table and check totality and output types against the domain."""
        table = cls(dom, cod, mapping)
        domain = set(enum_values(dom, cap))
        if len(table.entries) != len(domain):
            raise TypeMismatch(
                f"table has {len(table.entries)} entries, domain has {len(domain)}"
            )
        for k, v in table.entries:
            if k not in domain:
                raise TypeMismatch(f"key {k!r} not in domain")
            if not type_check(v, cod):
                raise TypeMismatch(f"output {v!r} does not inhabit codomain")
        return table

    def apply(self, v: Value) -> Value:
        try:
            return self._map[v]
        except KeyError:
            raise TypeMismatch(f"value {v!r} not in table domain") from None

    __call__ = apply

    def get(self, v, default=None):
        return self._map.get(v, default)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FunTable):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.dom == other.dom
            and self.cod == other.cod
            and self.entries == other.entries
        )

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{k!r}->{v!r}" for k, v in self.entries)
        return f"FunTable({body})"


@dataclass(frozen=True)
class FunVal(Value):
    """A function table regarded as an element of a Fun type."""

    table: FunTable


def value_key(v: Value):
    """Canonical sort key; total order within values of one type."""
    if isinstance(v, BaseVal):
        return (0, v.index)
    if isinstance(v, Pair):
        return (1, value_key(v.first), value_key(v.second))
    if isinstance(v, SeqVal):
        return (2, len(v.items), tuple(value_key(x) for x in v.items))
    if isinstance(v, FunVal):
        return (3, tuple(value_key(out) for _, out in v.table.entries))
    if isinstance(v, SetVal):
        return (4, len(v.members), tuple(sorted(value_key(x) for x in v.members)))
    if isinstance(v, FunTable):
        return (3, tuple(value_key(out) for _, out in v.entries))
    raise TypeMismatch(f"not a value: {v!r}")


def sorted_members(s: SetVal) -> list[Value]:
    return sorted(s.members, key=value_key)


def type_check(v: Value, t: FinType) -> bool:
    """True iff ``v`` inhabits ``t``."""
    if isinstance(t, Base):
        return isinstance(v, BaseVal) and 0 <= v.index < t.size
    if isinstance(t, Prod):
        return (
            isinstance(v, Pair)
            and type_check(v.first, t.left)
            and type_check(v.second, t.right)
        )
    if isinstance(t, Seq):
        return (
            isinstance(v, SeqVal)
            and len(v.items) <= t.max_len
            and all(type_check(x, t.elem) for x in v.items)
        )
    if isinstance(t, Fun):
        if not isinstance(v, FunVal):
            return False
        tab = v.table
        if tab.dom != t.dom or tab.cod != t.cod:
            return False
        domain = enum_values(t.dom)
        return len(tab.entries) == len(domain) and all(
            type_check(k, t.dom) and type_check(out, t.cod) for k, out in tab.entries
        )
    if isinstance(t, Pow):
        return isinstance(v, SetVal) and all(type_check(x, t.elem) for x in v.members)
    raise TypeMismatch(f"not a type descriptor: {t!r}")


def default(t: FinType) -> Value:
    """Canonical inhabitant: index 0, pairs/tables of defaults, empty seq/set."""
    if isinstance(t, Base):
        return base_val(0)
    if isinstance(t, Prod):
        return Pair(default(t.left), default(t.right))
    if isinstance(t, Seq):
        return SeqVal(())
    if isinstance(t, Fun):
        d = default(t.cod)
        domain = _enum(t.dom, None)
        return FunVal(FunTable(t.dom, t.cod, [(k, d) for k in domain], _presorted=True))
    if isinstance(t, Pow):
        return EMPTY_SET
    raise TypeMismatch(f"not a type descriptor: {t!r}")


@lru_cache(maxsize=None)
def _enum(t: FinType, cap: int | None) -> tuple[Value, ...]:
    card = cardinality(t)
    if cap is not None and card > cap:
        raise CardinalityExceeded(repr(t), card, cap)
    if isinstance(t, Base):
        return tuple(base_val(i) for i in range(t.size))
    if isinstance(t, Prod):
        return tuple(
            Pair(a, b) for a in _enum(t.left, cap) for b in _enum(t.right, cap)
        )
    if isinstance(t, Seq):
        elems = _enum(t.elem, cap)
        out = []
        for n in range(t.max_len + 1):
            out.extend(SeqVal(items) for items in itertools.product(elems, repeat=n))
        return tuple(out)
    if isinstance(t, Fun):
        return tuple(FunVal(tab) for tab in _enum_functions(t.dom, t.cod, cap))
    if isinstance(t, Pow):
        elems = _enum(t.elem, cap)
        n = len(elems)
        return tuple(
            SetVal(frozenset(elems[i] for i in range(n) if mask >> i & 1))
            for mask in range(1 << n)
        )
    raise TypeMismatch(f"not a type descriptor: {t!r}")


@lru_cache(maxsize=None)
def _enum_functions(dom: FinType, cod: FinType, cap: int | None) -> tuple[FunTable, ...]:
    card = cardinality(cod) ** cardinality(dom)
    if cap is not None and card > cap:
        raise CardinalityExceeded(f"Fun({dom!r},{cod!r})", card, cap)
    keys = _enum(dom, cap)
    outs = _enum(cod, cap)
    return tuple(
        FunTable(dom, cod, list(zip(keys, choice)), _presorted=True)
        for choice in itertools.product(outs, repeat=len(keys))
    )


def enum_values(t: FinType, cap: int | None = DEFAULT_CAP) -> tuple[Value, ...]:
    """Every value of ``t`` exactly once, default first, deterministic order."""
    return _enum(t, cap)


def enumerate_values(t: FinType, cap: int = DEFAULT_CAP) -> list[Value]:
    return list(_enum(t, cap))


def enumerate_functions(dom: FinType, cod: FinType, cap: int = DEFAULT_CAP) -> list[FunTable]:
    """All total tables dom -> cod, each exactly once."""
    return list(_enum_functions(dom, cod, cap))


def enum_functions(dom: FinType, cod: FinType, cap: int | None = DEFAULT_CAP) -> tuple[FunTable, ...]:
    return _enum_functions(dom, cod, cap)


# ---------------------------------------------------------------------------
# Finite and eventually-constant sequences


@dataclass(frozen=True)
class FinSeq:
    """Finite sequence of values of one element type."""

    elem_type: FinType
    items: tuple[Value, ...] = ()

    def __len__(self):
        return len(self.items)

    def append(self, x: Value) -> "FinSeq":
        return FinSeq(self.elem_type, self.items + (x,))

    def concat(self, other: "FinSeq") -> "FinSeq":
        if other.elem_type != self.elem_type:
            raise TypeMismatch("concat across element types")
        return FinSeq(self.elem_type, self.items + other.items)

    def take(self, n: int) -> "FinSeq":
        return FinSeq(self.elem_type, self.items[:n])

    def drop(self, n: int) -> "FinSeq":
        return FinSeq(self.elem_type, self.items[n:])

    def prefixes(self):
        """All prefixes including the empty sequence and the full one."""
        return [self.take(i) for i in range(len(self.items) + 1)]


def empty_seq(elem_type: FinType) -> FinSeq:
    return FinSeq(elem_type, ())


def seq_key(s: FinSeq):
    return (len(s.items), tuple(value_key(x) for x in s.items))


def prefix_of(r: FinSeq, s: FinSeq) -> bool:
    """True iff r is an initial segment of s."""
    if r.elem_type != s.elem_type:
        raise TypeMismatch("prefix test across element types")
    return len(r) <= len(s) and s.items[: len(r)] == r.items


@dataclass(frozen=True)
class EvSeq:
    """Eventually-constant infinite sequence: finite prefix, constant tail.

    Canonical: the prefix never ends with a value equal to the tail, so
    structural equality is pointwise equality.
    """

    elem_type: FinType
    prefix: tuple[Value, ...]
    tail: Value

    def __post_init__(self):
        if self.prefix and self.prefix[-1] == self.tail:
            raise TypeMismatch("EvSeq not canonical: prefix ends with tail value")

    def at(self, i: int) -> Value:
        return self.prefix[i] if i < len(self.prefix) else self.tail


def make_evseq(elem_type: FinType, prefix, tail: Value) -> EvSeq:
    """Canonicalizing constructor: trailing tail-equal values are absorbed."""
    items = tuple(prefix)
    while items and items[-1] == tail:
        items = items[:-1]
    return EvSeq(elem_type, items, tail)


def extend_plus(s: FinSeq) -> EvSeq:
    """The sequence followed by defaults; trailing defaults fold into the tail."""
    return make_evseq(s.elem_type, s.items, default(s.elem_type))


def ev_at(b: EvSeq, i: int) -> Value:
    return b.at(i)


def ev_prefix_seq(b: EvSeq) -> FinSeq:
    """Shortest finite sequence whose canonical extension is ``b``.

    Only meaningful when the tail is the default value of the element type.
    """
    if b.tail != default(b.elem_type):
        raise TypeMismatch("EvSeq tail is not the default value")
    return FinSeq(b.elem_type, b.prefix)


def add_prefix(s: FinSeq, b: EvSeq) -> EvSeq:
    if s.elem_type != b.elem_type:
        raise TypeMismatch("add_prefix across element types")
    return make_evseq(b.elem_type, s.items + b.prefix, b.tail)


def drop_prefix(n: int, b: EvSeq) -> EvSeq:
    if n < 0:
        raise TypeMismatch("drop_prefix needs n >= 0")
    return make_evseq(b.elem_type, b.prefix[n:], b.tail)


def ev_key(b: EvSeq):
    return (len(b.prefix), tuple(value_key(x) for x in b.prefix), value_key(b.tail))


def enumerate_evseqs(
    elem_type: FinType,
    max_prefix: int,
    tail: Value | None = None,
    cap: int = DEFAULT_CAP,
) -> list[EvSeq]:
    """All canonical EvSeqs with prefix length <= max_prefix and the given tail."""
    t = tail if tail is not None else default(elem_type)
    elems = enum_values(elem_type, cap)
    out = []
    for n in range(max_prefix + 1):
        for items in itertools.product(elems, repeat=n):
            if items and items[-1] == t:
                continue
            out.append(EvSeq(elem_type, items, t))
    return out


# ---------------------------------------------------------------------------
# Canonical JSON encoding


def value_to_json(v: Value):
    """Canonical JSON form; sets and tables are sorted by canonical key."""
    if isinstance(v, BaseVal):
        return v.index
    if isinstance(v, Pair):
        return [value_to_json(v.first), value_to_json(v.second)]
    if isinstance(v, SeqVal):
        return [value_to_json(x) for x in v.items]
    if isinstance(v, SetVal):
        return {"set": [value_to_json(x) for x in sorted_members(v)]}
    if isinstance(v, FunVal):
        return [[value_to_json(k), value_to_json(out)] for k, out in v.table.entries]
    raise TypeMismatch(f"not a serializable value: {v!r}")


def value_from_json(obj, t: FinType, where: str = "value") -> Value:
    """Type-directed decoding of the canonical JSON form."""
    if isinstance(t, Base):
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise SchemaError(f"expected integer, got {obj!r}", where)
        if not 0 <= obj < t.size:
            raise SchemaError(f"index {obj} out of range for base({t.size})", where)
        return base_val(obj)
    if isinstance(t, Prod):
        if not isinstance(obj, list) or len(obj) != 2:
            raise SchemaError(f"expected 2-element array, got {obj!r}", where)
        return Pair(
            value_from_json(obj[0], t.left, where + "[0]"),
            value_from_json(obj[1], t.right, where + "[1]"),
        )
    if isinstance(t, Seq):
        if not isinstance(obj, list):
            raise SchemaError(f"expected array, got {obj!r}", where)
        if len(obj) > t.max_len:
            raise SchemaError(f"sequence longer than bound {t.max_len}", where)
        return SeqVal(
            tuple(
                value_from_json(x, t.elem, f"{where}[{i}]") for i, x in enumerate(obj)
            )
        )
    if isinstance(t, Pow):
        if not isinstance(obj, dict) or set(obj) != {"set"} or not isinstance(obj["set"], list):
            raise SchemaError(f'expected {{"set": [...]}}, got {obj!r}', where)
        members = [
            value_from_json(x, t.elem, f"{where}.set[{i}]")
            for i, x in enumerate(obj["set"])
        ]
        s = SetVal(frozenset(members))
        if len(s.members) != len(members):
            raise SchemaError("duplicate members in set", where)
        return s
    if isinstance(t, Fun):
        if not isinstance(obj, list):
            raise SchemaError(f"expected array of [key, value] pairs, got {obj!r}", where)
        pairs = []
        for i, kv in enumerate(obj):
            if not isinstance(kv, list) or len(kv) != 2:
                raise SchemaError(f"expected [key, value] pair, got {kv!r}", f"{where}[{i}]")
            pairs.append(
                (
                    value_from_json(kv[0], t.dom, f"{where}[{i}].key"),
                    value_from_json(kv[1], t.cod, f"{where}[{i}].value"),
                )
            )
        tab = FunTable(t.dom, t.cod, pairs)
        if len(tab.entries) != cardinality(t.dom):
            raise SchemaError("table is not total on its domain", where)
        return FunVal(tab)
    raise TypeMismatch(f"not a type descriptor: {t!r}")
