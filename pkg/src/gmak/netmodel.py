"""Generalized chemical reaction networks: data model, text format, JSON export.

A network has species, complexes, one kinetic complex per complex (the
exponent vector of the power-law rate of reactions leaving that complex)
and reactions between complexes, optionally carrying rate constants.

Text format, one statement per line, ``#`` comments::

    species A B C                  # optional, fixes the species order
    A + 2 B <=> B + C              # two reactions; '->' for one
    A + 2 B ~ A + B                # kinetic complex of A + 2 B
    rate A + 2 B -> B + C = 3/2    # rate constant
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .rational import RationalMatrix, format_fraction


class NetworkError(Exception):
    """Base class for problems with network input."""


class NetworkSyntaxError(NetworkError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NetworkValidationError(NetworkError):
    pass


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Complex:
    """Sparse nonnegative combination of species; ``coefficients`` is sorted by index."""

    coefficients: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        cleaned = {}
        for idx, coeff in self.coefficients:
            coeff = Fraction(coeff)
            if coeff < 0:
                raise NetworkValidationError(f"negative coefficient {coeff} for species index {idx}")
            if coeff != 0:
                cleaned[int(idx)] = cleaned.get(int(idx), Fraction(0)) + coeff
        object.__setattr__(self, "coefficients", tuple(sorted(cleaned.items())))

    @classmethod
    def from_mapping(cls, mapping: dict[int, Fraction]) -> Complex:
        return cls(tuple(mapping.items()))

    @classmethod
    def from_vector(cls, vec: Sequence) -> Complex:
        return cls(tuple((i, Fraction(v)) for i, v in enumerate(vec) if v != 0))

    def coefficient(self, index: int) -> Fraction:
        return dict(self.coefficients).get(index, Fraction(0))

    def vector(self, n: int) -> list[Fraction]:
        v = [Fraction(0)] * n
        for i, c in self.coefficients:
            v[i] = c
        return v

    def is_empty(self) -> bool:
        return not self.coefficients

    def format(self, names: Sequence[str]) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for i, c in self.coefficients:
            parts.append(names[i] if c == 1 else f"{format_fraction(c)} {names[i]}")
        return " + ".join(parts)


@dataclass(frozen=True)
class Reaction:
    source: int
    target: int
    rate: Fraction | None = None

    def __post_init__(self):
        if self.source == self.target:
            raise NetworkValidationError(f"self-loop reaction on complex {self.source}")
        if self.rate is not None:
            rate = Fraction(self.rate)
            if rate <= 0:
                raise NetworkValidationError(f"nonpositive rate {rate}")
            object.__setattr__(self, "rate", rate)


@dataclass(frozen=True)
class GeneralizedNetwork:
    species: tuple[Species, ...]
    complexes: tuple[Complex, ...]
    kinetic_complexes: tuple[Complex, ...]
    reactions: tuple[Reaction, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        for name in ("species", "complexes", "kinetic_complexes", "reactions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        validate(self)
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.complexes)})

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def m(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @property
    def species_names(self) -> list[str]:
        return [s.name for s in self.species]

    def complex_index(self, c: Complex) -> int:
        return self._index[c]

    def reaction_vector(self, j: int) -> list[Fraction]:
        rx = self.reactions[j]
        y, y2 = self.complexes[rx.source].vector(self.n), self.complexes[rx.target].vector(self.n)
        return [b - a for a, b in zip(y, y2)]

    def kinetic_reaction_vector(self, j: int) -> list[Fraction]:
        rx = self.reactions[j]
        y = self.kinetic_complexes[rx.source].vector(self.n)
        y2 = self.kinetic_complexes[rx.target].vector(self.n)
        return [b - a for a, b in zip(y, y2)]

    def rates(self) -> list[Fraction] | None:
        if any(rx.rate is None for rx in self.reactions):
            return None
        return [rx.rate for rx in self.reactions]

    def with_rates(self, rates: Sequence) -> GeneralizedNetwork:
        if len(rates) != self.r:
            raise NetworkValidationError(f"expected {self.r} rates, got {len(rates)}")
        reactions = [Reaction(rx.source, rx.target, Fraction(k)) for rx, k in zip(self.reactions, rates)]
        return GeneralizedNetwork(self.species, self.complexes, self.kinetic_complexes, reactions)

    def structurally_equal(self, other: GeneralizedNetwork) -> bool:
        """Equality up to the numbering of complexes (reaction order still matters)."""

        def key(net):
            return (
                net.species,
                tuple((net.complexes[rx.source], net.complexes[rx.target], rx.rate) for rx in net.reactions),
                dict(zip(net.complexes, net.kinetic_complexes)),
            )

        return key(self) == key(other)

    def describe_reaction(self, j: int) -> str:
        rx = self.reactions[j]
        names = self.species_names
        return f"{self.complexes[rx.source].format(names)} -> {self.complexes[rx.target].format(names)}"


def validate(net: GeneralizedNetwork) -> None:
    names = [s.name for s in net.species]
    if any(not n for n in names):
        raise NetworkValidationError("empty species name")
    if len(set(names)) != len(names):
        raise NetworkValidationError("duplicate species name")
    if [s.index for s in net.species] != list(range(len(names))):
        raise NetworkValidationError("species indices must be contiguous from 0")
    n = len(names)
    if len(net.complexes) != len(net.kinetic_complexes):
        raise NetworkValidationError("complexes and kinetic complexes differ in length")
    for c in (*net.complexes, *net.kinetic_complexes):
        if any(i < 0 or i >= n for i, _ in c.coefficients):
            raise NetworkValidationError("complex refers to an unknown species")
    if len(set(net.complexes)) != len(net.complexes):
        raise NetworkValidationError("duplicate complex")
    if len(set(net.kinetic_complexes)) != len(net.kinetic_complexes):
        raise NetworkValidationError("duplicate kinetic complex: kinetic complexes must be pairwise distinct")
    m = len(net.complexes)
    used = set()
    pairs = set()
    for rx in net.reactions:
        if not (0 <= rx.source < m and 0 <= rx.target < m):
            raise NetworkValidationError("reaction refers to an unknown complex")
        if (rx.source, rx.target) in pairs:
            raise NetworkValidationError(f"duplicate reaction {rx.source} -> {rx.target}")
        pairs.add((rx.source, rx.target))
        used.update((rx.source, rx.target))
    if len(used) != m:
        orphan = min(set(range(m)) - used)
        raise NetworkValidationError(
            f"orphan complex {net.complexes[orphan].format(names)} appears in no reaction"
        )


def complex_matrix(net: GeneralizedNetwork) -> RationalMatrix:
    """Species-by-complex matrix whose column y holds the coefficients of complex y."""
    return RationalMatrix.from_columns([c.vector(net.n) for c in net.complexes], net.n)


def kinetic_matrix(net: GeneralizedNetwork) -> RationalMatrix:
    """Like :func:`complex_matrix`, over the kinetic complexes."""
    return RationalMatrix.from_columns([c.vector(net.n) for c in net.kinetic_complexes], net.n)


# --- text format -----------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[+-]?\d+(?:/\d+)?")


class _Parser:
    def __init__(self):
        self.names: list[str] = []
        self.lookup: dict[str, int] = {}

    def species(self, name: str) -> int:
        if name not in self.lookup:
            self.lookup[name] = len(self.names)
            self.names.append(name)
        return self.lookup[name]

    def complex(self, text: str, lineno: int, col0: int) -> dict[int, Fraction]:
        """Parse ``text`` (a slice of the line starting at column ``col0``)."""
        stripped = text.strip()
        if not stripped:
            raise NetworkSyntaxError("empty complex (write 0 for the empty complex)", lineno, col0 + 1)
        if stripped == "0":
            return {}
        coeffs: dict[int, Fraction] = {}
        pos = 0
        for term in text.split("+"):
            col = col0 + pos + (len(term) - len(term.lstrip())) + 1
            pos += len(term) + 1
            t = term.strip()
            if not t:
                raise NetworkSyntaxError("missing term", lineno, col)
            coeff = Fraction(1)
            num = _NUMBER.match(t)
            if num:
                tok = num.group(0)
                try:
                    coeff = Fraction(tok)
                except ZeroDivisionError:
                    raise NetworkSyntaxError(f"zero denominator in {tok!r}", lineno, col) from None
                if coeff < 0:
                    raise NetworkValidationError(f"line {lineno}: negative coefficient {tok}")
                t = t[num.end():].strip()
                if t.startswith("-") or t.startswith("."):
                    raise NetworkSyntaxError(f"bad coefficient in {term.strip()!r}", lineno, col)
            name = _NAME.fullmatch(t)
            if not name:
                raise NetworkSyntaxError(f"expected species name in {term.strip()!r}", lineno, col)
            idx = self.species(t)
            coeffs[idx] = coeffs.get(idx, Fraction(0)) + coeff
        return coeffs


def parse_network(text: str) -> GeneralizedNetwork:
    """Parse the line-oriented network format into a validated network."""
    p = _Parser()
    reaction_specs: list[tuple[dict, dict, int]] = []
    kinetic_specs: list[tuple[dict, dict, int]] = []
    rate_specs: list[tuple[dict, dict, Fraction, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        lead = len(line) - len(line.lstrip())
        body = line.strip()
        if body.startswith("species ") or body == "species":
            for name in body.split()[1:]:
                if not _NAME.fullmatch(name):
                    raise NetworkSyntaxError(f"bad species name {name!r}", lineno, line.index(name) + 1)
                p.species(name)
            continue
        if body.startswith("rate ") or body.startswith("rate\t"):
            rest_start = line.index("rate") + 4
            rest = line[rest_start:]
            if "=" not in rest:
                raise NetworkSyntaxError("rate line needs '= value'", lineno, len(line.rstrip()) + 1)
            lhs, value = rest.rsplit("=", 1)
            if "->" not in lhs:
                raise NetworkSyntaxError("rate line needs 'source -> target'", lineno, rest_start + 1)
            src_txt, tgt_txt = lhs.split("->", 1)
            src = p.complex(src_txt, lineno, rest_start)
            tgt = p.complex(tgt_txt, lineno, rest_start + len(src_txt) + 2)
            val_col = rest_start + len(lhs) + 2
            try:
                rate = Fraction(value.strip())
            except (ValueError, ZeroDivisionError):
                raise NetworkSyntaxError(f"bad rate value {value.strip()!r}", lineno, val_col) from None
            if rate <= 0:
                raise NetworkValidationError(f"line {lineno}: rate must be positive, got {value.strip()}")
            rate_specs.append((src, tgt, rate, lineno))
            continue
        if "<=>" in line:
            a, b = line.split("<=>", 1)
            left = p.complex(a, lineno, 0)
            right = p.complex(b, lineno, len(a) + 3)
            reaction_specs.append((left, right, lineno))
            reaction_specs.append((right, left, lineno))
        elif "->" in line:
            a, b = line.split("->", 1)
            reaction_specs.append((p.complex(a, lineno, 0), p.complex(b, lineno, len(a) + 2), lineno))
        elif "~" in line:
            a, b = line.split("~", 1)
            kinetic_specs.append((p.complex(a, lineno, 0), p.complex(b, lineno, len(a) + 1), lineno))
        else:
            raise NetworkSyntaxError("expected '->', '<=>', '~', 'rate' or 'species'", lineno, lead + 1)

    if not reaction_specs:
        raise NetworkValidationError("network has no reactions")

    complexes: list[Complex] = []
    index: dict[Complex, int] = {}

    def intern(c: Complex) -> int:
        if c not in index:
            index[c] = len(complexes)
            complexes.append(c)
        return index[c]

    pairs: list[tuple[int, int]] = []
    for left, right, lineno in reaction_specs:
        s, t = intern(Complex.from_mapping(left)), intern(Complex.from_mapping(right))
        if s == t:
            raise NetworkValidationError(f"line {lineno}: self-loop reaction (source equals target)")
        if (s, t) in pairs:
            raise NetworkValidationError(f"line {lineno}: duplicate reaction")
        pairs.append((s, t))

    kinetic = list(complexes)
    assigned: set[int] = set()
    for left, right, lineno in kinetic_specs:
        c = Complex.from_mapping(left)
        if c not in index:
            raise NetworkValidationError(f"line {lineno}: orphan complex in kinetic association (no reaction uses it)")
        i = index[c]
        if i in assigned:
            raise NetworkValidationError(f"line {lineno}: kinetic complex assigned twice")
        assigned.add(i)
        kinetic[i] = Complex.from_mapping(right)

    rates: list[Fraction | None] = [None] * len(pairs)
    for left, right, rate, lineno in rate_specs:
        c1, c2 = Complex.from_mapping(left), Complex.from_mapping(right)
        key = (index.get(c1), index.get(c2))
        if key not in pairs:
            raise NetworkValidationError(f"line {lineno}: rate given for unknown reaction")
        j = pairs.index(key)
        if rates[j] is not None:
            raise NetworkValidationError(f"line {lineno}: rate given twice")
        rates[j] = rate

    species = tuple(Species(name, i) for i, name in enumerate(p.names))
    reactions = tuple(Reaction(s, t, k) for (s, t), k in zip(pairs, rates))
    return GeneralizedNetwork(species, tuple(complexes), tuple(kinetic), reactions)


def serialize(net: GeneralizedNetwork) -> str:
    names = net.species_names
    lines = ["species " + " ".join(names)]
    for rx in net.reactions:
        lines.append(f"{net.complexes[rx.source].format(names)} -> {net.complexes[rx.target].format(names)}")
    for c, kc in zip(net.complexes, net.kinetic_complexes):
        if c != kc:
            lines.append(f"{c.format(names)} ~ {kc.format(names)}")
    for rx in net.reactions:
        if rx.rate is not None:
            lines.append(
                f"rate {net.complexes[rx.source].format(names)} -> "
                f"{net.complexes[rx.target].format(names)} = {format_fraction(rx.rate)}"
            )
    return "\n".join(lines) + "\n"


def _complex_json(c: Complex, names: Sequence[str]) -> dict[str, str]:
    return {names[i]: format_fraction(v) for i, v in c.coefficients}


def to_json(net: GeneralizedNetwork) -> dict:
    names = net.species_names
    return {
        "species": names,
        "complexes": [_complex_json(c, names) for c in net.complexes],
        "kinetic_complexes": [_complex_json(c, names) for c in net.kinetic_complexes],
        "reactions": [
            {
                "source": rx.source,
                "target": rx.target,
                "rate": None if rx.rate is None else format_fraction(rx.rate),
            }
            for rx in net.reactions
        ],
    }


def from_json(obj: dict) -> GeneralizedNetwork:
    names = list(obj["species"])
    lookup = {n: i for i, n in enumerate(names)}

    def cx(d: dict) -> Complex:
        try:
            return Complex(tuple((lookup[k], Fraction(v)) for k, v in d.items()))
        except KeyError as exc:
            raise NetworkValidationError(f"unknown species {exc.args[0]!r}") from None

    reactions = [
        Reaction(int(r["source"]), int(r["target"]), None if r.get("rate") is None else Fraction(r["rate"]))
        for r in obj["reactions"]
    ]
    return GeneralizedNetwork(
        tuple(Species(n, i) for i, n in enumerate(names)),
        tuple(cx(d) for d in obj["complexes"]),
        tuple(cx(d) for d in obj["kinetic_complexes"]),
        tuple(reactions),
    )


def build_network(
    species: Iterable[str],
    reactions: Iterable[tuple[Sequence, Sequence]],
    kinetic: dict[int, Sequence] | None = None,
    rates: Sequence | None = None,
) -> GeneralizedNetwork:
    """Construct a network from dense coefficient vectors.

    ``reactions`` holds (source vector, target vector) pairs; ``kinetic`` maps
    a complex's position in first-appearance order to its kinetic vector.
    """
    names = list(species)
    complexes: list[Complex] = []
    index: dict[Complex, int] = {}
    pairs = []
    for src, tgt in reactions:
        ids = []
        for vec in (src, tgt):
            c = Complex.from_vector(vec)
            if c not in index:
                index[c] = len(complexes)
                complexes.append(c)
            ids.append(index[c])
        pairs.append(tuple(ids))
    kin = list(complexes)
    for i, vec in (kinetic or {}).items():
        kin[i] = Complex.from_vector(vec)
    rates = list(rates) if rates is not None else [None] * len(pairs)
    return GeneralizedNetwork(
        tuple(Species(n, i) for i, n in enumerate(names)),
        tuple(complexes),
        tuple(kin),
        tuple(Reaction(s, t, k) for (s, t), k in zip(pairs, rates)),
    )
