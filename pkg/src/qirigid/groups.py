"""Concrete group models used as element-arithmetic oracles.

Every element is its own canonical key: a tuple of ints whose Python tuple
ordering is the single total order used for tie-breaking downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .errors import ForeignElement, InvalidSpec

Key = tuple

KINDS = (
    "int_gens",
    "grid_d",
    "dihedral_inf",
    "product_int_cyclic",
    "free",
    "cyclic",
    "bs12",
)

_ALIASES = {"grid": "grid_d", "dihedral": "dihedral_inf", "bs": "bs12"}

# JSON field carrying each kind's parameter(s)
_FIELDS = {
    "int_gens": "gens",
    "grid_d": "d",
    "product_int_cyclic": "m",
    "free": "rank",
    "cyclic": "m",
}


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    params: tuple = ()

    def __post_init__(self):
        _validate(self.kind, self.params)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse the flat ``kind:param,param`` syntax (``grid_2`` is also accepted)."""
        text = text.strip()
        if ":" in text:
            kind, _, rest = text.partition(":")
            raw = [p for p in rest.split(",") if p.strip()]
        else:
            kind, raw = text, []
            head, _, tail = text.rpartition("_")
            if head in ("grid", "grid_d") and tail.isdigit():
                kind, raw = "grid_d", [tail]
        kind = _ALIASES.get(kind.strip(), kind.strip())
        try:
            params = tuple(int(p) for p in raw)
        except ValueError as exc:
            raise InvalidSpec(f"non-integer parameter in {text!r}") from exc
        return cls(kind, params)

    @classmethod
    def from_dict(cls, doc: dict) -> "GroupSpec":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise InvalidSpec("group spec must be an object with a 'kind' field")
        kind = _ALIASES.get(doc["kind"], doc["kind"])
        field = _FIELDS.get(kind)
        if field is None:
            return cls(kind, ())
        if field not in doc:
            raise InvalidSpec(f"group kind {kind!r} requires field {field!r}")
        value = doc[field]
        if kind == "int_gens":
            if not isinstance(value, list):
                raise InvalidSpec("'gens' must be a list of integers")
            params = tuple(value)
        else:
            params = (value,)
        if not all(isinstance(p, int) and not isinstance(p, bool) for p in params):
            raise InvalidSpec(f"field {field!r} must hold integers")
        return cls(kind, params)

    @classmethod
    def from_json(cls, text: str) -> "GroupSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        field = _FIELDS.get(self.kind)
        if field is None:
            return {"kind": self.kind}
        if self.kind == "int_gens":
            return {"kind": self.kind, field: list(self.params)}
        return {"kind": self.kind, field: self.params[0]}

    def __str__(self):
        if not self.params:
            return self.kind
        return f"{self.kind}:{','.join(map(str, self.params))}"


def _validate(kind, params):
    if kind not in KINDS:
        raise InvalidSpec(f"unknown group kind {kind!r}")
    if kind == "int_gens":
        if not params or any(p == 0 for p in params):
            raise InvalidSpec("int_gens needs a nonempty list of nonzero integers")
        return
    if kind in ("dihedral_inf", "bs12"):
        if params:
            raise InvalidSpec(f"{kind} takes no parameters")
        return
    if len(params) != 1:
        raise InvalidSpec(f"{kind} takes exactly one parameter")
    (p,) = params
    lower = {"grid_d": 1, "product_int_cyclic": 2, "free": 2, "cyclic": 1}[kind]
    if p < lower:
        raise InvalidSpec(f"{kind} parameter must be >= {lower}, got {p}")


class GroupModel:
    """Base class: subclasses supply ``_mul``, ``_inv``, ``_valid`` and raw generators.

    ``multiply``/``inverse`` validate their inputs; the underscored versions
    skip validation and are what the ball builder calls in its hot loop.
    """

    kind = "abstract"
    exact_forward = True

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        gens: list = []
        for g in self._raw_generators():
            for h in (g, self._inv(g)):
                if h != self.identity() and h not in gens:
                    gens.append(h)
        if not gens:
            raise InvalidSpec(f"{spec} has an empty generating set")
        self._gens = tuple(gens)

    def identity(self) -> Key:
        raise NotImplementedError

    def generating_set(self) -> tuple:
        return self._gens

    def _check(self, a):
        if not (isinstance(a, tuple) and self._valid(a)):
            raise ForeignElement(f"{a!r} is not an element of {self.spec}")

    def multiply(self, a: Key, b: Key) -> Key:
        self._check(a)
        self._check(b)
        return self._mul(a, b)

    def inverse(self, a: Key) -> Key:
        self._check(a)
        return self._inv(a)

    def power(self, a: Key, z: int) -> Key:
        base = a if z >= 0 else self._inv(a)
        result = self.identity()
        for _ in range(abs(z)):
            result = self._mul(result, base)
        return result

    def encode(self, a: Key) -> str:
        self._check(a)
        if not a:
            return "e"
        return ";".join(str(c) for c in a)

    def decode(self, text: str) -> Key:
        if text == "e":
            key: tuple = ()
        else:
            try:
                key = tuple(int(c) for c in text.split(";"))
            except ValueError as exc:
                raise ForeignElement(f"undecodable key {text!r}") from exc
        self._check(key)
        return key

    def __repr__(self):
        return f"{type(self).__name__}({self.spec})"


class IntGens(GroupModel):
    """The integers with an arbitrary finite generating set."""

    kind = "int_gens"

    def _raw_generators(self):
        return [(g,) for g in self.spec.params]

    def identity(self):
        return (0,)

    def _valid(self, a):
        return len(a) == 1 and type(a[0]) is int

    def _mul(self, a, b):
        return (a[0] + b[0],)

    def _inv(self, a):
        return (-a[0],)


class Grid(GroupModel):
    kind = "grid_d"

    def _raw_generators(self):
        d = self.spec.params[0]
        return [tuple(1 if j == i else 0 for j in range(d)) for i in range(d)]

    def identity(self):
        return (0,) * self.spec.params[0]

    def _valid(self, a):
        return len(a) == self.spec.params[0] and all(type(c) is int for c in a)

    def _mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _inv(self, a):
        return tuple(-x for x in a)


class DihedralInf(GroupModel):
    """Infinite dihedral group; key ``(n, i)`` is r^n s^i with s r s = r^-1."""

    kind = "dihedral_inf"

    def _raw_generators(self):
        return [(1, 0), (0, 1)]

    def identity(self):
        return (0, 0)

    def _valid(self, a):
        return len(a) == 2 and type(a[0]) is int and a[1] in (0, 1)

    def _mul(self, a, b):
        n1, i1 = a
        n2, i2 = b
        return (n1 - n2 if i1 else n1 + n2, i1 ^ i2)

    def _inv(self, a):
        n, i = a
        return (n, 1) if i else (-n, 0)


class ProductIntCyclic(GroupModel):
    kind = "product_int_cyclic"

    def _raw_generators(self):
        return [(1, 0), (0, 1)]

    def identity(self):
        return (0, 0)

    def _valid(self, a):
        m = self.spec.params[0]
        return len(a) == 2 and type(a[0]) is int and type(a[1]) is int and 0 <= a[1] < m

    def _mul(self, a, b):
        return (a[0] + b[0], (a[1] + b[1]) % self.spec.params[0])

    def _inv(self, a):
        return (-a[0], (-a[1]) % self.spec.params[0])


class Cyclic(GroupModel):
    kind = "cyclic"

    def _raw_generators(self):
        return [(1 % self.spec.params[0],)]

    def identity(self):
        return (0,)

    def _valid(self, a):
        return len(a) == 1 and type(a[0]) is int and 0 <= a[0] < self.spec.params[0]

    def _mul(self, a, b):
        return ((a[0] + b[0]) % self.spec.params[0],)

    def _inv(self, a):
        return ((-a[0]) % self.spec.params[0],)


class Free(GroupModel):
    """Free group; keys are freely reduced words over letters ±1..±rank."""

    kind = "free"

    def _raw_generators(self):
        return [(i,) for i in range(1, self.spec.params[0] + 1)]

    def identity(self):
        return ()

    def _valid(self, a):
        rank = self.spec.params[0]
        for j, c in enumerate(a):
            if type(c) is not int or c == 0 or abs(c) > rank:
                return False
            if j and a[j - 1] == -c:
                return False
        return True

    def _mul(self, a, b):
        k = 0
        n = min(len(a), len(b))
        while k < n and a[-1 - k] == -b[k]:
            k += 1
        return a[: len(a) - k] + b[k:]

    def _inv(self, a):
        return tuple(-c for c in reversed(a))

    def exponent_sum(self, a, letter=1):
        return sum(1 if c == letter else -1 if c == -letter else 0 for c in a)


class BS12(GroupModel):
    """Baumslag-Solitar BS(1,2) as affine maps x -> 2^n x + q.

    Key ``(n, p, t)`` encodes q = p / 2^t in lowest terms (t >= 0).
    Composition is ``(f . g)(x) = f(g(x))``, so with a = x+1 and b = 2x the
    relation b a b^-1 = a^2 holds.
    """

    kind = "bs12"

    def _raw_generators(self):
        return [(0, 1, 0), (1, 0, 0)]

    def identity(self):
        return (0, 0, 0)

    @staticmethod
    def _q(a):
        return Fraction(a[1], 1 << a[2])

    @staticmethod
    def _key(n, q: Fraction):
        den = q.denominator
        t = den.bit_length() - 1
        return (n, q.numerator, t)

    def _valid(self, a):
        if len(a) != 3 or not all(type(c) is int for c in a) or a[2] < 0:
            return False
        return a[2] == 0 or a[1] % 2 == 1

    def _mul(self, a, b):
        n1, n2 = a[0], b[0]
        scale = Fraction(2) ** n1
        return self._key(n1 + n2, scale * self._q(b) + self._q(a))

    def _inv(self, a):
        n = a[0]
        return self._key(-n, -self._q(a) * Fraction(2) ** (-n))


_MODELS = {
    "int_gens": IntGens,
    "grid_d": Grid,
    "dihedral_inf": DihedralInf,
    "product_int_cyclic": ProductIntCyclic,
    "free": Free,
    "cyclic": Cyclic,
    "bs12": BS12,
}


def make_model(spec: GroupSpec | str | dict) -> GroupModel:
    if isinstance(spec, str):
        spec = GroupSpec.parse(spec)
    elif isinstance(spec, dict):
        spec = GroupSpec.from_dict(spec)
    return _MODELS[spec.kind](spec)


def multiply(model: GroupModel, a: Key, b: Key) -> Key:
    return model.multiply(a, b)


def inverse(model: GroupModel, a: Key) -> Key:
    return model.inverse(a)


def identity(model: GroupModel) -> Key:
    return model.identity()


def check_axioms(model: GroupModel, elements: Sequence[Key]) -> list[tuple[str, Any]]:
    """Exhaustively test the group laws on ``elements``; returns failures."""
    e = model.identity()
    bad = []
    for a in elements:
        if model.multiply(e, a) != a or model.multiply(a, e) != a:
            bad.append(("identity", a))
        if model.multiply(a, model.inverse(a)) != e:
            bad.append(("inverse", a))
        for b in elements:
            ab = model.multiply(a, b)
            for c in elements:
                if model.multiply(ab, c) != model.multiply(a, model.multiply(b, c)):
                    bad.append(("associativity", (a, b, c)))
    return bad
