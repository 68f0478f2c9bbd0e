"""Text format for finite categories, presheaves, maps and universes.

::

    # the arrow category 0 -> 1
    objects a b
    morphism f : a -> b
    compose f id:a = f          # optional; identities are id:<object>

    presheaf X
    at a : x0 x1
    at b : y
    act f : y->x0               # X(f) sends elements at b to elements at a

    map p : X -> Y
    at a : x0->u x1->u

    universe p                  # p: U~ -> U with canonical chosen pullbacks

Shorthands for the built-in finite-set universes over the one-object index::

    sets 3                      # fibers of size < 3
    setmodel 4                  # same universe with verified product, sum and identity classifiers
    setmodel 4 reverse          # the alternate presentation

Values for axiom constants used by ``interpret``::

    type Two 2                  # the axiom Two : U0 denotes the code 2
    point tt 0                  # the axiom tt denotes the first point of its type

Element and object names are whitespace-free tokens.  Composites with
identities are implied; every other composable pair needs a ``compose`` line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .fincat import DomainError, FinCategory, FinPresheaf, PresheafMap, UniverseStructure, finite_set_universe
from .textio import FormatError, logical_lines, parse_int


@dataclass
class ModelFile:
    """Everything declared in a model file, by name."""

    category: FinCategory | None = None
    presheaves: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    universe: UniverseStructure | None = None
    structured: object = None  # a StructuredModel for ``setmodel``
    types: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)


def _arrow_pairs(tokens, number, source):
    out = {}
    for tok in tokens:
        if "->" not in tok:
            raise FormatError(f"expected 'x->y', got {tok!r}", number, source)
        a, b = tok.split("->", 1)
        if not a or not b:
            raise FormatError(f"expected 'x->y', got {tok!r}", number, source)
        if a in out:
            raise FormatError(f"{a!r} assigned twice", number, source)
        out[a] = b
    return out


def _split_colon(rest, number, source, what):
    if ":" not in rest:
        raise FormatError(f"expected '{what}'", number, source)
    k = rest.index(":")
    return rest[:k], rest[k + 1 :]


class _Loader:
    def __init__(self, source: str):
        self.source = source
        self.objects: list = []
        self.morphisms: dict = {}
        self.composites: dict = {}
        self.cat_line = 0
        self.cat: FinCategory | None = None
        self.out = ModelFile()
        self.pending = None  # (kind, name, line, data)

    def err(self, msg, number):
        return FormatError(msg, number, self.source)

    def category(self, number) -> FinCategory:
        if self.cat is None:
            if not self.objects:
                raise self.err("declare 'objects' before presheaves", number)
            idents = {o: f"id:{o}" for o in self.objects}
            try:
                cat = FinCategory(self.objects, self.morphisms, idents, self.composites)
            except KeyError as exc:
                raise self.err(f"unknown object {exc.args[0]!r}", self.cat_line) from None
            probs = cat.problems()
            if probs:
                raise self.err(f"not a category: {probs[0]}", self.cat_line)
            self.cat = self.out.category = cat
        return self.cat

    def flush(self):
        if self.pending is None:
            return
        kind, name, number, data = self.pending
        self.pending = None
        cat = self.cat
        if kind == "presheaf":
            at, act = data
            for m in cat.morphisms:
                if not cat.is_identity(m) and m not in act:
                    act[m] = {}
            try:
                x = FinPresheaf(cat, at, {m: tab for m, tab in act.items()}, name=name)
            except (DomainError, KeyError) as exc:
                raise self.err(f"presheaf {name}: {exc}", number) from None
            for m in cat.morphisms:
                if cat.is_identity(m):
                    continue
                for e in x.at[cat.tgt[m]]:
                    v = x.act[m].get(e)
                    if v is None:
                        raise self.err(f"presheaf {name}: no action of {m} on {e}", number)
            probs = x.problems()
            if probs:
                raise self.err(f"presheaf {name}: {probs[0]}", number)
            self.out.presheaves[name] = x
        else:
            src, tgt, comps = data
            for j in cat.objects:
                for e in src.at[j]:
                    if e not in comps.get(j, {}):
                        raise self.err(f"map {name}: no value at {j} for {e}", number)
            f = PresheafMap(src, tgt, comps, name=name)
            probs = f.problems()
            if probs:
                raise self.err(f"map {name}: {probs[0]}", number)
            self.out.maps[name] = f

    def line(self, number, head, rest):
        if head == "objects":
            if self.cat is not None or self.objects:
                raise self.err("objects declared twice or after use", number)
            if not rest or len(set(rest)) != len(rest):
                raise self.err("objects must be a non-empty list of distinct names", number)
            self.objects = rest
            self.cat_line = number
        elif head == "morphism":
            if len(rest) != 5 or rest[1] != ":" or rest[3] != "->":
                raise self.err("expected 'morphism NAME : SRC -> TGT'", number)
            name, s, t = rest[0], rest[2], rest[4]
            if self.cat is not None:
                raise self.err("morphisms must precede presheaves", number)
            if name in self.morphisms or name.startswith("id:"):
                raise self.err(f"morphism {name!r} redeclared", number)
            for o in (s, t):
                if o not in self.objects:
                    raise self.err(f"unknown object {o!r}", number)
            self.morphisms[name] = (s, t)
            self.cat_line = number
        elif head == "compose":
            if len(rest) != 4 or rest[2] != "=":
                raise self.err("expected 'compose G F = H'", number)
            g, f, h = rest[0], rest[1], rest[3]
            known = set(self.morphisms) | {f"id:{o}" for o in self.objects}
            for m in (g, f, h):
                if m not in known:
                    raise self.err(f"unknown morphism {m!r}", number)
            self.composites[(g, f)] = h
            self.cat_line = number
        elif head == "presheaf":
            self.flush()
            if len(rest) != 1:
                raise self.err("expected 'presheaf NAME'", number)
            self.category(number)
            if rest[0] in self.out.presheaves:
                raise self.err(f"presheaf {rest[0]!r} redeclared", number)
            self.pending = ("presheaf", rest[0], number, ({}, {}))
        elif head == "map":
            self.flush()
            if len(rest) != 5 or rest[1] != ":" or rest[3] != "->":
                raise self.err("expected 'map NAME : SRC -> TGT'", number)
            self.category(number)
            src, tgt = self.out.presheaves.get(rest[2]), self.out.presheaves.get(rest[4])
            if src is None or tgt is None:
                raise self.err("map between undeclared presheaves", number)
            self.pending = ("map", rest[0], number, (src, tgt, {}))
        elif head == "at":
            self.at(number, rest)
        elif head == "act":
            if self.pending is None or self.pending[0] != "presheaf":
                raise self.err("'act' outside a presheaf block", number)
            name, values = _split_colon(rest, number, self.source, "act MOR : x->y ...")
            if len(name) != 1 or name[0] not in self.cat.src or self.cat.is_identity(name[0]):
                raise self.err(f"unknown morphism {' '.join(name)!r}", number)
            act = self.pending[3][1]
            if name[0] in act:
                raise self.err(f"action of {name[0]} given twice", number)
            table = _arrow_pairs(values, number, self.source)
            at = self.pending[3][0]
            m = name[0]
            for a, b in table.items():
                if a not in at.get(self.cat.tgt[m], ()):
                    raise self.err(f"{a!r} is not an element at {self.cat.tgt[m]}", number)
                if b not in at.get(self.cat.src[m], ()):
                    raise self.err(f"{b!r} is not an element at {self.cat.src[m]}", number)
            act[m] = table
        elif head == "universe":
            self.flush()
            if len(rest) != 1 or rest[0] not in self.out.maps:
                raise self.err("expected 'universe MAP' naming a declared map", number)
            self._set_universe(UniverseStructure(self.out.maps[rest[0]], name=rest[0]), number)
        elif head == "sets":
            if len(rest) != 1:
                raise self.err("expected 'sets BOUND'", number)
            bound = parse_int(rest[0], number, "fiber bound")
            if bound < 1:
                raise self.err("fiber bound must be positive", number)
            self._set_universe(finite_set_universe(bound), number)
        elif head == "setmodel":
            from .cc.setmodel import set_model

            if len(rest) not in (1, 2) or (len(rest) == 2 and rest[1] != "reverse"):
                raise self.err("expected 'setmodel WINDOW [reverse]'", number)
            window = parse_int(rest[0], number, "window")
            if not 1 <= window <= 5:
                raise self.err("window must be between 1 and 5", number)
            model = set_model(window, reverse=len(rest) == 2)
            self.out.structured = model
            self._set_universe(model.universe, number)
        elif head in ("type", "point"):
            if len(rest) != 2:
                raise self.err(f"expected '{head} NAME {'CODE' if head == 'type' else 'INDEX'}'", number)
            name, value = rest[0], parse_int(rest[1], number, "code" if head == "type" else "index")
            if name in self.out.types or name in self.out.points:
                raise self.err(f"constant {name!r} given twice", number)
            if value < 0:
                raise self.err("codes and indices are non-negative", number)
            (self.out.types if head == "type" else self.out.points)[name] = value
        else:
            raise self.err(f"unknown directive {head!r}", number)

    def _set_universe(self, u, number):
        if self.out.universe is not None:
            raise self.err("a model file declares one universe", number)
        self.out.universe = u

    def at(self, number, rest):
        if self.pending is None:
            raise self.err("'at' outside a presheaf or map block", number)
        kind, name, _, data = self.pending
        head, values = _split_colon(rest, number, self.source, "at OBJ : ...")
        if len(head) != 1 or head[0] not in self.cat.objects:
            raise self.err(f"unknown object {' '.join(head)!r}", number)
        j = head[0]
        if kind == "presheaf":
            at = data[0]
            if j in at:
                raise self.err(f"elements at {j} given twice", number)
            if len(set(values)) != len(values):
                raise self.err(f"duplicate elements at {j}", number)
            at[j] = values
        else:
            src, tgt, comps = data
            if j in comps:
                raise self.err(f"values at {j} given twice", number)
            table = _arrow_pairs(values, number, self.source)
            for a, b in table.items():
                if a not in src.index[j]:
                    raise self.err(f"{a!r} is not an element of {src.name} at {j}", number)
                if b not in tgt.index[j]:
                    raise self.err(f"{b!r} is not an element of {tgt.name} at {j}", number)
            comps[j] = table


def loads(text: str, source: str = "") -> ModelFile:
    loader = _Loader(source)
    for number, line in logical_lines(text):
        head, *rest = line.split()
        loader.line(number, head, rest)
    loader.flush()
    if loader.objects and loader.cat is None:
        loader.category(loader.cat_line)
    return loader.out


def load(path) -> ModelFile:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), source=str(path))
