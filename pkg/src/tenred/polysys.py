"""Multivariate polynomials in canonical form, plus the 3-SAT encoder.

Polynomials are kept as tuples of monomials sorted in graded-lexicographic
descending order (higher total degree first; ties broken by the exponent
vector with x1 heaviest).  Canonical form makes equality, hashing, and the
printed representation all agree, and printing round-trips through the
parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError, RingMismatchError
from .rings import INTEGERS, PRIME_FIELD, RATIONALS, RingDescriptor, Scalar, ZZ, one, zero

Exponents = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Monomial:
    """coefficient * product of x_i^e_i; exponents sparse, sorted, >= 1."""

    coefficient: Scalar
    exponents: Exponents

    def __post_init__(self) -> None:
        if self.coefficient.is_zero:
            raise ValueError("monomial with zero coefficient")
        last = -1
        for var, exp in self.exponents:
            if var <= last:
                raise ValueError("exponents not sorted by variable")
            if exp < 1:
                raise ValueError("exponent must be >= 1")
            last = var

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exponents)


def _grlex_key(exponents: Exponents, num_vars: int) -> tuple:
    dense = [0] * num_vars
    for var, exp in exponents:
        dense[var] = exp
    return (sum(dense), tuple(dense))


class Polynomial:
    """A canonical multivariate polynomial over Z, Q, or GF(p)."""

    __slots__ = ("ring", "num_vars", "terms", "_hash", "_sort_key")

    def __init__(self, ring: RingDescriptor, num_vars: int, terms: Sequence[Monomial]):
        if num_vars < 0:
            raise ValueError("negative variable count")
        prev_key = None
        for t in terms:
            if t.coefficient.ring != ring:
                raise RingMismatchError("monomial over a different ring")
            if t.exponents and t.exponents[-1][0] >= num_vars:
                raise ValueError("variable index out of range")
            key = _grlex_key(t.exponents, num_vars)
            if prev_key is not None and key >= prev_key:
                raise ValueError("terms not in graded-lex descending order")
            prev_key = key
        self.ring = ring
        self.num_vars = num_vars
        self.terms = tuple(terms)
        self._hash = None
        self._sort_key = None

    @classmethod
    def from_term_map(
        cls, ring: RingDescriptor, num_vars: int, term_map: dict[Exponents, Scalar]
    ) -> "Polynomial":
        items = [
            (exps, coeff)
            for exps, coeff in term_map.items()
            if not coeff.is_zero
        ]
        items.sort(key=lambda it: _grlex_key(it[0], num_vars), reverse=True)
        return cls(ring, num_vars, [Monomial(c, e) for e, c in items])

    @classmethod
    def zero(cls, ring: RingDescriptor, num_vars: int) -> "Polynomial":
        return cls(ring, num_vars, [])

    @classmethod
    def constant(cls, ring: RingDescriptor, num_vars: int, value: Scalar) -> "Polynomial":
        if value.is_zero:
            return cls.zero(ring, num_vars)
        return cls(ring, num_vars, [Monomial(value, ())])

    @classmethod
    def variable(cls, ring: RingDescriptor, num_vars: int, var: int) -> "Polynomial":
        return cls(ring, num_vars, [Monomial(one(ring), ((var, 1),))])

    def _term_map(self) -> dict[Exponents, Scalar]:
        return {t.exponents: t.coefficient for t in self.terms}

    def _compatible(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise RingMismatchError("polynomials over different rings")
        if self.num_vars != other.num_vars:
            raise ValueError("polynomials over different variable counts")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._compatible(other)
        out = self._term_map()
        for t in other.terms:
            cur = out.get(t.exponents)
            out[t.exponents] = t.coefficient if cur is None else cur + t.coefficient
        return Polynomial.from_term_map(self.ring, self.num_vars, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(
            self.ring,
            self.num_vars,
            [Monomial(-t.coefficient, t.exponents) for t in self.terms],
        )

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._compatible(other)
        out: dict[Exponents, Scalar] = {}
        for s in self.terms:
            for t in other.terms:
                merged = dict(s.exponents)
                for var, exp in t.exponents:
                    merged[var] = merged.get(var, 0) + exp
                key = tuple(sorted(merged.items()))
                coeff = s.coefficient * t.coefficient
                cur = out.get(key)
                out[key] = coeff if cur is None else cur + coeff
        return Polynomial.from_term_map(self.ring, self.num_vars, out)

    def scale(self, s: Scalar) -> "Polynomial":
        if s.ring != self.ring:
            raise RingMismatchError("scalar over a different ring")
        out = {t.exponents: t.coefficient * s for t in self.terms}
        return Polynomial.from_term_map(self.ring, self.num_vars, out)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0].exponents)

    def constant_value(self) -> Scalar:
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return self.terms[0].coefficient if self.terms else zero(self.ring)

    @property
    def degree(self) -> int:
        """Total degree; zero polynomial reports 0."""
        return self.terms[0].degree if self.terms else 0

    def evaluate(self, values: Sequence[Scalar]) -> Scalar:
        if len(values) != self.num_vars:
            raise ValueError("assignment length mismatch")
        for v in values:
            if v.ring != self.ring:
                raise RingMismatchError("assignment over a different ring")
        total = zero(self.ring)
        for t in self.terms:
            acc = t.coefficient
            for var, exp in t.exponents:
                acc = acc * values[var].power(exp)
            total = total + acc
        return total

    def change_ring(self, ring: RingDescriptor) -> "Polynomial":
        """Map coefficients through Z -> Q or Z -> GF(p); identity otherwise."""
        if ring == self.ring:
            return self
        if self.ring != ZZ:
            raise ValueError(f"no coefficient map from {self.ring} to {ring}")
        out = {t.exponents: Scalar(ring, t.coefficient.value) for t in self.terms}
        return Polynomial.from_term_map(ring, self.num_vars, out)

    def sort_key(self):
        """Deterministic total order on canonical polynomials.

        Compares term sequences graded-lexicographically, breaking ties by
        coefficient; the zero polynomial sorts first.
        """
        if self._sort_key is None:
            self._sort_key = tuple(
                (_grlex_key(t.exponents, self.num_vars), t.coefficient.sort_key())
                for t in self.terms
            )
        return self._sort_key

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.num_vars, self.terms))
        return self._hash

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for idx, t in enumerate(self.terms):
            coeff = t.coefficient
            negative = self.ring.kind != PRIME_FIELD and coeff.sort_key() < 0
            mag = -coeff if negative else coeff
            body = "*".join(
                f"x{var + 1}" + (f"^{exp}" if exp > 1 else "")
                for var, exp in t.exponents
            )
            if not body:
                text = str(mag)
            elif mag.is_one:
                text = body
            else:
                text = f"{mag}*{body}"
            if idx == 0:
                parts.append(f"-{text}" if negative else text)
            else:
                parts.append(f"- {text}" if negative else f"+ {text}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.ring}, {self})"


_TOKEN_RE = re.compile(r"\s*(?:(?P<var>x\d+)|(?P<int>\d+)|(?P<op>[-+*/^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].strip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup == "var":
            tokens.append(("var", m.group("var"), m.start("var")))
        elif m.lastgroup == "int":
            tokens.append(("int", m.group("int"), m.start("int")))
        else:
            tokens.append((m.group("op"), m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, num_vars: int, ring: RingDescriptor) -> Polynomial:
    """Parse ``['-'] term (('+'|'-') term)*`` into canonical form.

    A term is a coefficient, a power product, or ``coeff '*' powprod``; a
    power product is ``var ('*' var)*`` with ``var := 'x'INT ['^'INT]``.
    """
    tokens = _tokenize(text)
    n = len(tokens)
    i = 0
    terms: dict[Exponents, Scalar] = {}

    def peek() -> tuple[str, str, int] | None:
        return tokens[i] if i < n else None

    def parse_coefficient() -> Scalar:
        nonlocal i
        kind, val, pos = tokens[i]
        i += 1
        num = int(val)
        nxt = peek()
        if nxt is not None and nxt[0] == "/":
            if ring.kind != RATIONALS:
                raise ParseError(f"fractional coefficient not in ring {ring}", nxt[2])
            i += 1
            d = peek()
            if d is None or d[0] != "int":
                raise ParseError("expected denominator after '/'", pos)
            i += 1
            if int(d[1]) == 0:
                raise ParseError("zero denominator", d[2])
            from fractions import Fraction

            return Scalar(ring, Fraction(num, int(d[1])))
        return Scalar(ring, num)

    def parse_var_power() -> tuple[int, int]:
        nonlocal i
        kind, val, pos = tokens[i]
        i += 1
        var = int(val[1:])
        if var < 1 or var > num_vars:
            raise ParseError(f"variable {val} out of range (1..{num_vars})", pos)
        exp = 1
        nxt = peek()
        if nxt is not None and nxt[0] == "^":
            i += 1
            e = peek()
            if e is None or e[0] != "int":
                raise ParseError("expected integer exponent after '^'", pos)
            i += 1
            exp = int(e[1])
            if exp < 1:
                raise ParseError("exponent must be >= 1", e[2])
        return var - 1, exp

    def parse_term(sign: int) -> None:
        nonlocal i
        tok = peek()
        if tok is None:
            raise ParseError("expected a term", len(text))
        coeff = one(ring)
        exps: dict[int, int] = {}
        if tok[0] == "int":
            coeff = parse_coefficient()
            nxt = peek()
            if nxt is not None and nxt[0] == "*":
                i += 1
                follow = peek()
                if follow is None or follow[0] != "var":
                    raise ParseError("expected variable after '*'", nxt[2])
                var, exp = parse_var_power()
                exps[var] = exps.get(var, 0) + exp
            else:
                _accumulate(sign, coeff, exps)
                return
        elif tok[0] == "var":
            var, exp = parse_var_power()
            exps[var] = exps.get(var, 0) + exp
        else:
            raise ParseError(f"expected a term, found {tok[1]!r}", tok[2])
        while True:
            nxt = peek()
            if nxt is None or nxt[0] != "*":
                break
            i += 1
            follow = peek()
            if follow is None or follow[0] != "var":
                pos = follow[2] if follow else len(text)
                raise ParseError("expected variable after '*'", pos)
            var, exp = parse_var_power()
            exps[var] = exps.get(var, 0) + exp
        _accumulate(sign, coeff, exps)

    def _accumulate(sign: int, coeff: Scalar, exps: dict[int, int]) -> None:
        if sign < 0:
            coeff = -coeff
        key = tuple(sorted(exps.items()))
        cur = terms.get(key)
        terms[key] = coeff if cur is None else cur + coeff

    sign = 1
    tok = peek()
    if tok is not None and tok[0] == "-":
        sign = -1
        i += 1
    parse_term(sign)
    while True:
        tok = peek()
        if tok is None:
            break
        if tok[0] not in ("+", "-"):
            raise ParseError(f"expected '+' or '-', found {tok[1]!r}", tok[2])
        sign = 1 if tok[0] == "+" else -1
        i += 1
        parse_term(sign)
    return Polynomial.from_term_map(ring, num_vars, terms)


def prefix_sums(f: Polynomial) -> list[Polynomial]:
    """Partial sums p1, p1+p2, ..., f of the canonical term sequence."""
    out = []
    for k in range(1, len(f.terms) + 1):
        out.append(Polynomial(f.ring, f.num_vars, f.terms[:k]))
    return out


class PolySystem:
    """A finite list of nonconstant polynomials over one ring.

    Constant zero polynomials are dropped at construction; constant nonzero
    polynomials are rejected (the system would be trivially unsolvable in a
    way the downstream constructions do not model).
    """

    __slots__ = ("ring", "num_vars", "polynomials")

    def __init__(self, ring: RingDescriptor, num_vars: int, polynomials: Iterable[Polynomial]):
        kept = []
        for f in polynomials:
            if f.ring != ring:
                raise RingMismatchError("system polynomial over a different ring")
            if f.num_vars != num_vars:
                raise ValueError("system polynomial over a different variable count")
            if f.is_zero:
                continue
            if f.is_constant:
                raise ValueError(f"constant nonzero polynomial not admitted: {f}")
            kept.append(f)
        self.ring = ring
        self.num_vars = num_vars
        self.polynomials = tuple(kept)

    def change_ring(self, ring: RingDescriptor) -> "PolySystem":
        return PolySystem(ring, self.num_vars, [f.change_ring(ring) for f in self.polynomials])

    def first_violation(self, values: Sequence[Scalar]) -> tuple[Polynomial, Scalar] | None:
        """First polynomial not vanishing at the point, with its value."""
        for f in self.polynomials:
            v = f.evaluate(values)
            if not v.is_zero:
                return f, v
        return None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolySystem)
            and self.ring == other.ring
            and self.num_vars == other.num_vars
            and self.polynomials == other.polynomials
        )

    def __repr__(self) -> str:
        return f"PolySystem({self.ring}, n={self.num_vars}, {len(self.polynomials)} polynomials)"


@dataclass(frozen=True)
class Assignment:
    """A point in ring^n, one scalar per variable."""

    values: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        rings = {v.ring for v in self.values}
        if len(rings) > 1:
            raise RingMismatchError("assignment mixes rings")

    @classmethod
    def from_ints(cls, ring: RingDescriptor, values: Iterable[int]) -> "Assignment":
        return cls(tuple(Scalar(ring, v) for v in values))

    @property
    def ring(self) -> RingDescriptor | None:
        return self.values[0].ring if self.values else None

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CnfFormula:
    """Positive 3-CNF plus disequality pairs; variables are 0-based."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    disequalities: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for clause in self.clauses:
            if not 1 <= len(clause) <= 3:
                raise ValueError("clauses carry between 1 and 3 literals")
            for v in clause:
                if not 0 <= v < self.num_vars:
                    raise ValueError(f"literal variable {v + 1} out of range")
        for u, v in self.disequalities:
            if not (0 <= u < self.num_vars and 0 <= v < self.num_vars):
                raise ValueError("disequality variable out of range")


def parse_dimacs(text: str) -> CnfFormula:
    """Simplified DIMACS: positive clauses ending in 0, plus ``neq u v`` lines."""
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    neqs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad problem line on line {lineno}: {line!r}")
            try:
                num_vars = int(parts[2])
                int(parts[3])
            except ValueError:
                raise ParseError(f"bad problem line on line {lineno}: {line!r}") from None
            if num_vars < 0:
                raise ParseError(f"negative variable count on line {lineno}")
            continue
        if num_vars is None:
            raise ParseError(f"clause before problem line on line {lineno}")
        if line.startswith("neq"):
            parts = line.split()[1:]
            if parts and parts[-1] == "0":
                parts = parts[:-1]
            if len(parts) != 2:
                raise ParseError(f"neq expects two variables on line {lineno}")
            try:
                u, v = (int(x) for x in parts)
            except ValueError:
                raise ParseError(f"bad neq line on line {lineno}") from None
            if not (1 <= u <= num_vars and 1 <= v <= num_vars):
                raise ParseError(f"neq variable out of range on line {lineno}")
            neqs.append((u - 1, v - 1))
            continue
        try:
            lits = [int(x) for x in line.split()]
        except ValueError:
            raise ParseError(f"bad clause line on line {lineno}: {line!r}") from None
        if not lits or lits[-1] != 0:
            raise ParseError(f"clause not terminated by 0 on line {lineno}")
        lits = lits[:-1]
        if not lits:
            raise ParseError(f"empty clause on line {lineno}")
        if len(lits) > 3:
            raise ParseError(f"clause with more than 3 literals on line {lineno}")
        for lit in lits:
            if lit < 0:
                raise ParseError(f"negative literal {lit} unsupported on line {lineno}")
            if not 1 <= lit <= num_vars:
                raise ParseError(f"literal {lit} out of range on line {lineno}")
        clauses.append(tuple(lit - 1 for lit in lits))
    if num_vars is None:
        raise ParseError("missing problem line")
    return CnfFormula(num_vars, tuple(clauses), tuple(neqs))


def _clause_polynomial(num_vars: int, i: int, j: int, k: int) -> Polynomial:
    """y_i + y_j + y_k - y_i y_j - y_i y_k - y_j y_k + y_i y_j y_k - 1."""
    yi = Polynomial.variable(ZZ, num_vars, i)
    yj = Polynomial.variable(ZZ, num_vars, j)
    yk = Polynomial.variable(ZZ, num_vars, k)
    cone = Polynomial.constant(ZZ, num_vars, one(ZZ))
    return yi + yj + yk - yi * yj - yi * yk - yj * yk + yi * yj * yk - cone


def encode_3sat(formula: CnfFormula) -> PolySystem:
    """Encode a positive 3-CNF with disequalities as a system over Z.

    0/1 points satisfying every polynomial correspond exactly to satisfying
    boolean assignments: booleanity pins each variable to {0, 1}, the clause
    polynomial vanishes exactly on satisfying rows of its truth table, and
    x_u != x_v becomes y_u + y_v - 1.  Short clauses duplicate their first
    literal up to length 3 before expansion.
    """
    n = formula.num_vars
    cone = Polynomial.constant(ZZ, n, one(ZZ))
    polys: list[Polynomial] = []
    for i in range(n):
        yi = Polynomial.variable(ZZ, n, i)
        polys.append(yi * yi - yi)
    for clause in formula.clauses:
        lits = list(clause)
        while len(lits) < 3:
            lits.insert(0, lits[0])
        polys.append(_clause_polynomial(n, *lits))
    for u, v in formula.disequalities:
        yu = Polynomial.variable(ZZ, n, u)
        yv = Polynomial.variable(ZZ, n, v)
        polys.append(yu + yv - cone)
    return PolySystem(ZZ, n, polys)
