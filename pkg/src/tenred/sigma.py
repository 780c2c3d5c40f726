"""Subexpression closure sets and the rank-3 completion gadget.

The reduction from polynomial solvability to low-rank matrix completion
works over a closure set sigma(F) of subexpressions of the system F:
prefix products of each monomial, prefix sums of each polynomial, the
variables, and all constants involved, closed under negation.  Triples of
closure elements with a +-1 coordinate index an incomplete matrix B(F)
whose rank-3 completions correspond exactly to solutions of F.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    GuardExceededError,
    RingMismatchError,
    StructureError,
    VerificationError,
)
from .linalg import DenseMatrix, inverse_3x3
from .polysys import Assignment, Monomial, Polynomial, PolySystem, prefix_sums
from .rings import PRIME_FIELD, QQ, RingDescriptor, Scalar, ZZ, one, zero


def is_plus_minus_one(f: Polynomial) -> bool:
    if not f.is_constant or f.is_zero:
        return False
    v = f.constant_value()
    return v.is_one or (-v).is_one


class SigmaSet:
    """Deduplicated, canonically ordered, negation-closed set of polynomials.

    Canonical order is the polynomial sort key (graded-lex on term
    sequences, coefficients breaking ties), so two runs over the same
    system produce identical element sequences.
    """

    __slots__ = ("ring", "num_vars", "elements", "_positions")

    def __init__(self, ring: RingDescriptor, num_vars: int, elements: Iterable[Polynomial]):
        dedup: dict[Polynomial, None] = {}
        for f in elements:
            if f.ring != ring:
                raise RingMismatchError("closure element over a different ring")
            if f.num_vars != num_vars:
                raise ValueError("closure element over a different variable count")
            dedup[f] = None
        ordered = sorted(dedup, key=Polynomial.sort_key)
        members = set(ordered)
        for f in ordered:
            if -f not in members:
                raise ValueError(f"set not closed under negation: missing -({f})")
        if not any(is_plus_minus_one(f) for f in ordered):
            raise ValueError("closure set must contain 1 and -1")
        self.ring = ring
        self.num_vars = num_vars
        self.elements = tuple(ordered)
        self._positions: dict[Polynomial, int] | None = None

    def position(self, f: Polynomial) -> int:
        if self._positions is None:
            self._positions = {e: i for i, e in enumerate(self.elements)}
        return self._positions[f]

    def __contains__(self, f: Polynomial) -> bool:
        if self._positions is None:
            self._positions = {e: i for i, e in enumerate(self.elements)}
        return f in self._positions

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SigmaSet)
            and self.ring == other.ring
            and self.num_vars == other.num_vars
            and self.elements == other.elements
        )

    def __repr__(self) -> str:
        return f"SigmaSet({self.ring}, n={self.num_vars}, {len(self.elements)} elements)"


def sigma_monomial(p: Monomial, num_vars: int) -> SigmaSet:
    """Closure contribution of one monomial.

    Contains +-1, the coefficient with both signs, every prefix product of
    the monomial's variables (with multiplicity, in variable order), and
    the monomial itself with both signs.
    """
    ring = p.coefficient.ring
    unit = Polynomial.constant(ring, num_vars, one(ring))
    out = {unit, Polynomial.constant(ring, num_vars, p.coefficient)}
    prefix = unit
    for var, exp in p.exponents:
        x = Polynomial.variable(ring, num_vars, var)
        for _ in range(exp):
            prefix = prefix * x
            out.add(prefix)
    out.add(prefix.scale(p.coefficient))
    out.update([-f for f in out])
    return SigmaSet(ring, num_vars, out)


def sigma_system(F: PolySystem) -> SigmaSet:
    """Closure set of a whole system.

    Union over every polynomial of its monomial closures and signed prefix
    sums, together with the base 0, +-1, +-x_i.  The result always passes
    the reachability check: every non-base element is a sum or product of
    two set elements (this is what the solution-extraction argument
    chains on).
    """
    ring, n = F.ring, F.num_vars
    out: set[Polynomial] = {Polynomial.zero(ring, n)}
    unit = Polynomial.constant(ring, n, one(ring))
    out.update({unit, -unit})
    for i in range(n):
        x = Polynomial.variable(ring, n, i)
        out.update({x, -x})
    for f in F.polynomials:
        for t in f.terms:
            out.update(sigma_monomial(t, n).elements)
        for g in prefix_sums(f):
            out.add(g)
            out.add(-g)
    sigma = SigmaSet(ring, n, out)
    unreachable = verify_reachability(sigma)
    if unreachable:
        shown = ", ".join(str(f) for f in unreachable[:5])
        raise StructureError(
            f"{len(unreachable)} closure element(s) unreachable from the base: {shown}"
        )
    return sigma


def verify_reachability(sigma: SigmaSet) -> tuple[Polynomial, ...]:
    """Elements not derivable inside the set from constants and variables.

    Derivable means: in the base (constants, or +-x_i), or equal to a sum
    or product of two already-derivable elements of the set.  Returns the
    non-derivable elements (empty when the closure property holds).
    """

    def in_base(f: Polynomial) -> bool:
        if f.is_constant:
            return True
        if len(f.terms) == 1:
            t = f.terms[0]
            return t.degree == 1 and (t.coefficient.is_one or (-t.coefficient).is_one)
        return False

    members = set(sigma.elements)
    reached = {f for f in sigma.elements if in_base(f)}
    grew = True
    while grew:
        grew = False
        pool = list(reached)
        for idx, a in enumerate(pool):
            for b in pool[idx:]:
                for cand in (a + b, a * b):
                    if cand in members and cand not in reached:
                        reached.add(cand)
                        grew = True
    return tuple(f for f in sigma.elements if f not in reached)


@dataclass(frozen=True)
class Label:
    """A triple of closure elements with at least one +-1 coordinate."""

    coords: tuple[Polynomial, Polynomial, Polynomial]

    def __post_init__(self) -> None:
        if len(self.coords) != 3:
            raise ValueError("label needs exactly three coordinates")
        if not any(is_plus_minus_one(f) for f in self.coords):
            raise ValueError("label needs a constant +-1 coordinate")


def count_labels(sigma: SigmaSet) -> int:
    """|H| by inclusion-exclusion on 'no coordinate is +-1'.

    Equals m^3 - (m-2)^3 whenever 1 != -1 in the ring; over GF(2) the two
    units coincide and the subtracted cube shrinks accordingly.
    """
    m = len(sigma.elements)
    units = sum(1 for f in sigma.elements if is_plus_minus_one(f))
    return m**3 - (m - units) ** 3


def build_H(sigma: SigmaSet, guard: int | None = 5000) -> list[Label]:
    """All coordinate triples with a +-1 entry, in lexicographic closure order."""
    size = count_labels(sigma)
    if guard is not None and size > guard:
        raise GuardExceededError(size, guard, "label count")
    elems = sigma.elements
    pm = [is_plus_minus_one(f) for f in elems]
    labels = []
    for ia, a in enumerate(elems):
        for ib, b in enumerate(elems):
            ab = pm[ia] or pm[ib]
            for ic, c in enumerate(elems):
                if ab or pm[ic]:
                    labels.append(Label((a, b, c)))
    if len(labels) != size:
        raise StructureError(f"label count {len(labels)} != predicted {size}")
    return labels


def _eval_raw(f: Polynomial, values, kind: str, p: int | None):
    acc = None
    for t in f.terms:
        term = t.coefficient.value
        for var, exp in t.exponents:
            term = term * values[var] ** exp
        acc = term if acc is None else acc + term
    if acc is None:
        return zero(f.ring).value
    return acc % p if kind == PRIME_FIELD else acc


@dataclass(frozen=True)
class SymbolicU:
    """3 x |H| matrix of polynomials; column u holds u's own coordinates."""

    labels: tuple[Label, ...]

    def evaluate(self, point: Assignment, ring: RingDescriptor) -> DenseMatrix:
        """Plug a point into every coordinate polynomial."""
        if not self.labels:
            raise ValueError("no labels")
        values = [v.value for v in point.values]
        for v in point.values:
            if v.ring != ring:
                raise RingMismatchError("point over a different ring")
        kind, p = ring.kind, ring.modulus
        cache: dict[Polynomial, object] = {}
        rows: list[list[Scalar]] = [[], [], []]
        for lab in self.labels:
            for axis in range(3):
                f = lab.coords[axis]
                raw = cache.get(f)
                if raw is None:
                    raw = _eval_raw(f, values, kind, p)
                    cache[f] = raw
                rows[axis].append(Scalar(ring, raw))
        return DenseMatrix(ring, rows)


class IncompleteMatrix:
    """A matrix over a ring with unspecified (star) entries.

    Stars are represented as None.  star_positions lists them in row-major
    order; this ordering is what downstream constructions enumerate by.
    Gadget matrices built from a system carry their labels and the system
    itself so solutions can be extracted later; pass-through matrices may
    omit both.
    """

    __slots__ = (
        "ring",
        "nrows",
        "ncols",
        "raw_grid",
        "star_positions",
        "row_labels",
        "col_labels",
        "system",
        "_label_pos",
    )

    def __init__(
        self,
        ring: RingDescriptor,
        entries: Sequence[Sequence[Scalar | None]],
        row_labels: Sequence[Label] | None = None,
        col_labels: Sequence[Label] | None = None,
        system: PolySystem | None = None,
    ):
        grid = []
        for row in entries:
            raw_row = []
            for cell in row:
                if cell is None:
                    raw_row.append(None)
                else:
                    if cell.ring != ring:
                        raise RingMismatchError("entry over a different ring")
                    raw_row.append(cell.value)
            grid.append(tuple(raw_row))
        self._init_from_raw(ring, grid, row_labels, col_labels, system)

    @classmethod
    def _from_raw(cls, ring, raw_grid, row_labels=None, col_labels=None, system=None):
        obj = cls.__new__(cls)
        obj._init_from_raw(ring, [tuple(r) for r in raw_grid], row_labels, col_labels, system)
        return obj

    def _init_from_raw(self, ring, grid, row_labels, col_labels, system) -> None:
        if not grid or not grid[0]:
            raise ValueError("matrix needs positive dimensions")
        ncols = len(grid[0])
        for row in grid:
            if len(row) != ncols:
                raise ValueError("ragged rows")
        if row_labels is not None and len(row_labels) != len(grid):
            raise ValueError("row label count mismatch")
        if col_labels is not None and len(col_labels) != ncols:
            raise ValueError("column label count mismatch")
        self.ring = ring
        self.nrows = len(grid)
        self.ncols = ncols
        self.raw_grid = tuple(grid)
        self.star_positions = tuple(
            (i, j) for i in range(self.nrows) for j in range(ncols) if grid[i][j] is None
        )
        self.row_labels = tuple(row_labels) if row_labels is not None else None
        self.col_labels = tuple(col_labels) if col_labels is not None else None
        self.system = system
        self._label_pos = None

    @property
    def tau(self) -> int:
        return len(self.star_positions)

    def is_star(self, i: int, j: int) -> bool:
        return self.raw_grid[i][j] is None

    def entry(self, i: int, j: int) -> Scalar | None:
        raw = self.raw_grid[i][j]
        return None if raw is None else Scalar(self.ring, raw)

    def is_symmetric(self) -> bool:
        if self.nrows != self.ncols:
            return False
        g = self.raw_grid
        return all(g[i][j] == g[j][i] for i in range(self.nrows) for j in range(i + 1, self.ncols))

    def label_position(self, coords: tuple[Polynomial, Polynomial, Polynomial]) -> int:
        if self.row_labels is None:
            raise ValueError("matrix carries no labels")
        if self._label_pos is None:
            self._label_pos = {lab.coords: i for i, lab in enumerate(self.row_labels)}
        return self._label_pos[coords]

    def change_ring(self, ring: RingDescriptor) -> "IncompleteMatrix":
        """Embed an integer matrix into Q or GF(p); identity otherwise."""
        if ring == self.ring:
            return self
        if self.ring != ZZ:
            raise ValueError(f"no entry map from {self.ring} to {ring}")
        conv = (lambda v: v % ring.modulus) if ring.kind == PRIME_FIELD else Fraction
        grid = [
            [None if cell is None else conv(cell) for cell in row] for row in self.raw_grid
        ]
        labels = None
        system = self.system.change_ring(ring) if self.system is not None else None
        if self.row_labels is not None:
            labels = [
                Label(tuple(f.change_ring(ring) for f in lab.coords)) for lab in self.row_labels
            ]
        return IncompleteMatrix._from_raw(ring, grid, labels, labels, system)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IncompleteMatrix)
            and self.ring == other.ring
            and self.raw_grid == other.raw_grid
            and self.row_labels == other.row_labels
        )

    def __repr__(self) -> str:
        return (
            f"IncompleteMatrix({self.ring}, {self.nrows}x{self.ncols}, "
            f"{self.tau} stars)"
        )


def _raw_term_map(f: Polynomial) -> dict:
    return {t.exponents: t.coefficient.value for t in f.terms}


def _multiply_term_maps(fa: dict, fb: dict, kind: str, p: int | None) -> dict:
    out: dict = {}
    for ea, va in fa.items():
        for eb, vb in fb.items():
            if eb:
                merged = dict(ea)
                for var, exp in eb:
                    merged[var] = merged.get(var, 0) + exp
                key = tuple(sorted(merged.items()))
            else:
                key = ea
            prod = va * vb
            cur = out.get(key)
            out[key] = prod if cur is None else cur + prod
    if kind == PRIME_FIELD:
        return {k: v % p for k, v in out.items() if v % p}
    return {k: v for k, v in out.items() if v}


def build_B(F: PolySystem, guard: int | None = 5000) -> IncompleteMatrix:
    """The incomplete gadget matrix of a system.

    Entry (u, v) is the coordinatewise dot product delta = u . v: a
    constant delta gives that constant, delta equal (in canonical form) to
    a member of F gives 0, anything else is a star.  Symmetric because
    delta is; the submatrix at the unit labels E is the identity.
    """
    sigma = sigma_system(F)
    labels = build_H(sigma, guard=guard)
    ring = F.ring
    kind, p = ring.kind, ring.modulus
    elems = sigma.elements
    m = len(elems)
    tms = [_raw_term_map(f) for f in elems]
    prod: dict[tuple[int, int], dict] = {}
    for i in range(m):
        for j in range(i, m):
            prod[(i, j)] = _multiply_term_maps(tms[i], tms[j], kind, p)
    coord_idx = [
        (sigma.position(lab.coords[0]), sigma.position(lab.coords[1]), sigma.position(lab.coords[2]))
        for lab in labels
    ]
    f_maps = [_raw_term_map(f) for f in F.polynomials]
    zero_raw = zero(ring).value
    n_lab = len(labels)
    grid: list[list] = [[None] * n_lab for _ in range(n_lab)]
    for u in range(n_lab):
        au, bu, cu = coord_idx[u]
        row_u = grid[u]
        for v in range(u, n_lab):
            av, bv, cv = coord_idx[v]
            merged: dict = {}
            for x, y in ((au, av), (bu, bv), (cu, cv)):
                tm = prod[(x, y)] if x <= y else prod[(y, x)]
                for key, val in tm.items():
                    cur = merged.get(key)
                    merged[key] = val if cur is None else cur + val
            if kind == PRIME_FIELD:
                nz = {k: v % p for k, v in merged.items() if v % p}
            else:
                nz = {k: v for k, v in merged.items() if v}
            if not nz:
                cell = zero_raw
            elif len(nz) == 1 and () in nz:
                cell = nz[()]
            elif any(nz == fm for fm in f_maps):
                cell = zero_raw
            else:
                cell = None
            row_u[v] = cell
            if v != u:
                grid[v][u] = cell
    B = IncompleteMatrix._from_raw(ring, grid, labels, labels, F)
    unit = Polynomial.constant(ring, F.num_vars, one(ring))
    z = Polynomial.zero(ring, F.num_vars)
    e_cols = [
        B.label_position((unit, z, z)),
        B.label_position((z, unit, z)),
        B.label_position((z, z, unit)),
    ]
    one_raw = one(ring).value
    for a, i in enumerate(e_cols):
        for b, j in enumerate(e_cols):
            expect = one_raw if a == b else zero_raw
            if B.raw_grid[i][j] != expect:
                raise StructureError(f"unit-label submatrix broken at ({i},{j})")
    return B


def _resolve_field(point: Assignment, F: PolySystem) -> RingDescriptor:
    pr = point.ring
    if pr is None:
        pr = F.ring
    if pr == ZZ:
        pr = QQ
    if not pr.is_field:
        raise ValueError(f"completions are certified over fields, not {pr}")
    return pr


def completion_witness(
    F: PolySystem,
    point: Assignment,
    B: IncompleteMatrix | None = None,
    guard: int | None = 5000,
) -> DenseMatrix:
    """Rank-at-most-3 completion of B(F) induced by a solution.

    Evaluates the label coordinates at the point and returns the Gram
    matrix W = U(point)^T U(point).  Rejects non-solutions up front; the
    output is checked against every specified entry of B(F) before return.
    Integer inputs are certified over Q.
    """
    field = _resolve_field(point, F)
    if len(point) != F.num_vars:
        raise ValueError("solution length does not match the variable count")
    Ff = F.change_ring(field)
    vals = tuple(Scalar(field, v.value) for v in point.values)
    bad = Ff.first_violation(vals)
    if bad is not None:
        raise VerificationError(f"not a solution: {bad[0]} evaluates to {bad[1]}")
    if B is None:
        B = build_B(Ff, guard=guard)
    elif B.ring != field:
        B = B.change_ring(field)
    if B.row_labels is None:
        raise ValueError("matrix carries no labels")
    u = SymbolicU(B.row_labels).evaluate(Assignment(vals), field)
    ur = u.raw_rows()
    r0, r1, r2 = ur[0], ur[1], ur[2]
    n = B.ncols
    kind, p = field.kind, field.modulus
    grid: list[list] = [[None] * n for _ in range(n)]
    for i in range(n):
        a0, a1, a2 = r0[i], r1[i], r2[i]
        row = grid[i]
        for j in range(i, n):
            val = a0 * r0[j] + a1 * r1[j] + a2 * r2[j]
            if kind == PRIME_FIELD:
                val %= p
            row[j] = val
            if j != i:
                grid[j][i] = val
    braw = B.raw_grid
    for i in range(n):
        gi, bi = grid[i], braw[i]
        for j in range(n):
            expect = bi[j]
            if expect is not None and gi[j] != expect:
                raise StructureError(
                    f"completion disagrees with the gadget matrix at ({i},{j}): "
                    f"{gi[j]} != {expect}"
                )
    rows = [[Scalar(field, v) for v in row] for row in grid]
    return DenseMatrix(field, rows)


def extract_solution(P: DenseMatrix, L: DenseMatrix, B: IncompleteMatrix) -> Assignment:
    """Recover the solution encoded by a rank-3 factorization.

    P and L are 3 x |H| factors whose product P^T L completes B.  The
    unit-label columns of L form an invertible 3x3 matrix C, and the third
    coordinates of C^{-1} L at the (1, 0, x_i) columns are the solution.
    The extracted point is checked against the system before return.
    """
    if B.row_labels is None or B.system is None:
        raise ValueError("extraction needs the gadget's labels and system")
    ring = B.ring
    if not ring.is_field:
        raise ValueError(f"extraction runs over fields, not {ring}")
    if P.ring != ring or L.ring != ring:
        raise RingMismatchError("factors over a different ring")
    if P.nrows != 3 or L.nrows != 3 or P.ncols != B.nrows or L.ncols != B.ncols:
        raise ValueError("factors must be 3 x |H|")
    kind, p = ring.kind, ring.modulus
    p0, p1, p2 = P.raw_rows()
    l0, l1, l2 = L.raw_rows()
    braw = B.raw_grid
    for i in range(B.nrows):
        a0, a1, a2 = p0[i], p1[i], p2[i]
        bi = braw[i]
        for j in range(B.ncols):
            expect = bi[j]
            if expect is None:
                continue
            val = a0 * l0[j] + a1 * l1[j] + a2 * l2[j]
            if kind == PRIME_FIELD:
                val %= p
            if val != expect:
                raise VerificationError(
                    f"factors do not complete the matrix at ({i},{j}): "
                    f"{val} != {expect}"
                )
    F = B.system
    unit = Polynomial.constant(ring, F.num_vars, one(ring))
    z = Polynomial.zero(ring, F.num_vars)
    e_cols = [
        B.label_position((unit, z, z)),
        B.label_position((z, unit, z)),
        B.label_position((z, z, unit)),
    ]
    c = DenseMatrix(ring, [[L.entry(r, c_) for c_ in e_cols] for r in range(3)])
    cinv = inverse_3x3(c)
    w0, w1, w2 = cinv.raw_rows()[2]
    values = []
    for i in range(F.num_vars):
        col = B.label_position((unit, z, Polynomial.variable(ring, F.num_vars, i)))
        y = w0 * l0[col] + w1 * l1[col] + w2 * l2[col]
        if kind == PRIME_FIELD:
            y %= p
        values.append(Scalar(ring, y))
    point = tuple(values)
    bad = F.first_violation(point)
    if bad is not None:
        raise VerificationError(
            f"extracted point is not a solution: {bad[0]} evaluates to {bad[1]}"
        )
    return Assignment(point)
