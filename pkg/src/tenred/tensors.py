"""Order-3 tensors, rank-1 decompositions, and the star-slice construction.

Tensors are stored sparsely (zero entries are absent).  The constructions
here are dense in at most one slice, while the auxiliary star slices are
matrix units, so sparse storage is what makes instance-scale objects
(hundreds of labels, tens of thousands of stars) fit in memory.  All
arithmetic is exact; verification means literal entrywise equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import RingMismatchError, StructureError, VerificationError
from .linalg import DenseMatrix, Vec
from .rings import PRIME_FIELD, RingDescriptor, Scalar, ZZ, one, zero
from .sigma import IncompleteMatrix

Key = tuple[int, int, int]


class Tensor3:
    """An immutable order-3 tensor over one ring, sparse by entry."""

    __slots__ = ("ring", "dims", "entries")

    def __init__(self, ring: RingDescriptor, dims: tuple[int, int, int], entries: dict[Key, Scalar]):
        if len(dims) != 3 or any(d < 1 for d in dims):
            raise ValueError("dimensions must be three positive counts")
        raw: dict[Key, object] = {}
        for (i, j, k), s in entries.items():
            if not (0 <= i < dims[0] and 0 <= j < dims[1] and 0 <= k < dims[2]):
                raise ValueError(f"entry ({i},{j},{k}) outside {dims}")
            if s.ring != ring:
                raise RingMismatchError("entry over a different ring")
            if not s.is_zero:
                raw[(i, j, k)] = s.value
        self.ring = ring
        self.dims = (dims[0], dims[1], dims[2])
        self.entries = raw

    @classmethod
    def _from_raw(cls, ring: RingDescriptor, dims: tuple[int, int, int], raw: dict[Key, object]) -> "Tensor3":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.dims = dims
        obj.entries = raw
        return obj

    @classmethod
    def zeros(cls, ring: RingDescriptor, dims: tuple[int, int, int]) -> "Tensor3":
        return cls(ring, dims, {})

    @classmethod
    def from_nested(cls, ring: RingDescriptor, grid: Sequence[Sequence[Sequence[Scalar]]]) -> "Tensor3":
        dims = (len(grid), len(grid[0]), len(grid[0][0]))
        entries = {
            (i, j, k): grid[i][j][k]
            for i in range(dims[0])
            for j in range(dims[1])
            for k in range(dims[2])
        }
        return cls(ring, dims, entries)

    def entry(self, i: int, j: int, k: int) -> Scalar:
        raw = self.entries.get((i, j, k))
        return zero(self.ring) if raw is None else Scalar(self.ring, raw)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def items(self) -> list[tuple[Key, Scalar]]:
        return [(key, Scalar(self.ring, v)) for key, v in sorted(self.entries.items())]

    def change_ring(self, ring: RingDescriptor) -> "Tensor3":
        """Embed an integer tensor into Q or GF(p); identity otherwise."""
        if ring == self.ring:
            return self
        if self.ring != ZZ:
            raise ValueError(f"no entry map from {self.ring} to {ring}")
        if ring.kind == PRIME_FIELD:
            p = ring.modulus
            raw = {k: v % p for k, v in self.entries.items() if v % p}
        else:
            raw = {k: Fraction(v) for k, v in self.entries.items()}
        return Tensor3._from_raw(ring, self.dims, raw)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Tensor3)
            and self.ring == other.ring
            and self.dims == other.dims
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"Tensor3({self.ring}, dims={self.dims}, nnz={self.nnz})"


def slice_matrix(T: Tensor3, axis: int, index: int) -> DenseMatrix:
    """The matrix obtained by fixing one coordinate of the tensor."""
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2, or 3")
    if not 0 <= index < T.dims[axis - 1]:
        raise ValueError(f"index {index} outside axis of size {T.dims[axis - 1]}")
    keep = [d for a, d in enumerate(T.dims) if a != axis - 1]
    z = zero(T.ring).value
    grid = [[z] * keep[1] for _ in range(keep[0])]
    for (i, j, k), v in T.entries.items():
        if axis == 1 and i == index:
            grid[j][k] = v
        elif axis == 2 and j == index:
            grid[i][k] = v
        elif axis == 3 and k == index:
            grid[i][j] = v
    return DenseMatrix(T.ring, [[Scalar(T.ring, v) for v in row] for row in grid])


@dataclass(frozen=True)
class Rank1Term:
    """The simple tensor a (x) b (x) c."""

    a: Vec
    b: Vec
    c: Vec

    def __post_init__(self) -> None:
        if not (self.a.ring == self.b.ring == self.c.ring):
            raise RingMismatchError("term factors over different rings")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.a.n, self.b.n, self.c.n)


class Decomposition:
    """An ordered list of rank-1 terms with uniform shape."""

    __slots__ = ("ring", "dims", "terms")

    def __init__(self, ring: RingDescriptor, dims: tuple[int, int, int], terms: Iterable[Rank1Term]):
        terms = tuple(terms)
        for t in terms:
            if t.a.ring != ring:
                raise RingMismatchError("term over a different ring")
            if t.dims != tuple(dims):
                raise ValueError(f"term shape {t.dims} != {tuple(dims)}")
        self.ring = ring
        self.dims = (dims[0], dims[1], dims[2])
        self.terms = terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Decomposition)
            and self.ring == other.ring
            and self.dims == other.dims
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"Decomposition({self.ring}, dims={self.dims}, {len(self.terms)} terms)"


def sum_decomposition_raw(D: Decomposition) -> dict[Key, object]:
    """Exact entrywise sum of all terms, as a sparse raw-value map."""
    kind = D.ring.kind
    p = D.ring.modulus
    acc: dict[Key, object] = {}
    for t in D.terms:
        for i, va in t.a.items():
            ra = va.value
            for j, vb in t.b.items():
                rab = ra * vb.value
                for k, vc in t.c.items():
                    key = (i, j, k)
                    cur = acc.get(key)
                    val = rab * vc.value
                    acc[key] = val if cur is None else cur + val
    if kind == PRIME_FIELD:
        return {k: v % p for k, v in acc.items() if v % p}
    return {k: v for k, v in acc.items() if v}


def verify_decomposition(T: Tensor3, D: Decomposition):
    """Exact check that the terms sum to T; returns (ok, first mismatch).

    The mismatch, when present, is ((i, j, k), expected, actual) at the
    smallest disagreeing coordinate triple.
    """
    if D.ring != T.ring:
        raise RingMismatchError("decomposition ring differs from tensor ring")
    if D.dims != T.dims:
        raise ValueError(f"decomposition shape {D.dims} != tensor shape {T.dims}")
    total = sum_decomposition_raw(D)
    if total == T.entries:
        return True, None
    for key in sorted(set(total) | set(T.entries)):
        want = T.entries.get(key)
        got = total.get(key)
        if want != got:
            z = zero(T.ring)
            return False, (
                key,
                z if want is None else Scalar(T.ring, want),
                z if got is None else Scalar(T.ring, got),
            )
    return True, None


@dataclass(frozen=True)
class DerksenInstance:
    """Star-slice tensor of an incomplete matrix.

    Slice 0 is the matrix with stars replaced by zeros; slice t >= 1 is
    the matrix unit at the t-th star (row-major star order).  Rank tau+3
    is achievable exactly when the matrix admits a rank-3 completion.
    """

    tensor: Tensor3
    tau: int
    star_map: tuple[tuple[int, int], ...]
    source: IncompleteMatrix | None

    @property
    def target_rank(self) -> int:
        return self.tau + 3


def build_derksen(B: IncompleteMatrix) -> DerksenInstance:
    """Adjoin one matrix-unit slice per star to the zero-filled matrix.

    The sizes in play are bounded by the label-count guard applied when B
    was built, so no separate guard is needed here.
    """
    stars = B.star_positions
    if len(set(stars)) != len(stars):
        raise StructureError("duplicate star positions")
    tau = len(stars)
    raw: dict[Key, object] = {}
    for i, row in enumerate(B.raw_grid):
        for j, v in enumerate(row):
            if v is not None and v != 0:
                raw[(i, j, 0)] = v
    one_raw = one(B.ring).value
    for t, (i, j) in enumerate(stars, start=1):
        raw[(i, j, t)] = one_raw
    tensor = Tensor3._from_raw(B.ring, (B.nrows, B.ncols, tau + 1), raw)
    return DerksenInstance(tensor, tau, stars, B)


def instance_source(
    tensor: Tensor3,
    star_map,
    row_labels=None,
    col_labels=None,
    system=None,
) -> IncompleteMatrix:
    """Rebuild the incomplete matrix a star-slice tensor came from.

    Slice 0 holds every specified value (stars were zeroed there), and
    star_map says which positions were stars, so the reconstruction is
    exact.
    """
    n1, n2, _ = tensor.dims
    grid: list[list[object]] = [[0] * n2 for _ in range(n1)]
    for (i, j, z), v in tensor.entries.items():
        if z == 0:
            grid[i][j] = v
    for i, j in star_map:
        if grid[i][j] != 0:
            raise StructureError(f"star position ({i},{j}) holds a value in slice 0")
        grid[i][j] = None
    return IncompleteMatrix._from_raw(tensor.ring, grid, row_labels, col_labels, system)


def derksen_witness(
    inst: DerksenInstance,
    completion: DenseMatrix,
    P: DenseMatrix,
    L: DenseMatrix,
) -> Decomposition:
    """The tau+3 term decomposition induced by a rank-3 completion.

    Three terms carry the Gram factorization of the completion into slice
    0; each star then gets one term that cancels the completed value at
    its position in slice 0 and plants the unit in its own slice.  The
    result is checked entrywise against the instance tensor.
    """
    ring = inst.tensor.ring
    B = inst.source
    if completion.ring != ring or P.ring != ring or L.ring != ring:
        raise RingMismatchError("completion or factors over a different ring")
    if P.nrows != 3 or L.nrows != 3 or P.ncols != B.nrows or L.ncols != B.ncols:
        raise ValueError("factors must be 3 x |H|")
    if completion.nrows != B.nrows or completion.ncols != B.ncols:
        raise ValueError("completion shape differs from the matrix")
    kind, p = ring.kind, ring.modulus
    p0, p1, p2 = P.raw_rows()
    l0, l1, l2 = L.raw_rows()
    craw = completion.raw_rows()
    braw = B.raw_grid
    for i in range(B.nrows):
        ci, bi = craw[i], braw[i]
        a0, a1, a2 = p0[i], p1[i], p2[i]
        for j in range(B.ncols):
            val = a0 * l0[j] + a1 * l1[j] + a2 * l2[j]
            if kind == PRIME_FIELD:
                val %= p
            if val != ci[j]:
                raise VerificationError(
                    f"factors do not reproduce the completion at ({i},{j})"
                )
            if bi[j] is not None and ci[j] != bi[j]:
                raise VerificationError(
                    f"completion disagrees with the matrix at ({i},{j}): "
                    f"{ci[j]} != {bi[j]}"
                )
    width = inst.tau + 1
    e0 = Vec.unit(ring, width, 0)
    terms = [
        Rank1Term(
            Vec.from_dense(ring, P.row(m)),
            Vec.from_dense(ring, L.row(m)),
            e0,
        )
        for m in range(3)
    ]
    for t, (i, j) in enumerate(inst.star_map, start=1):
        c = Vec(
            ring,
            width,
            {0: -Scalar(ring, craw[i][j]), t: one(ring)},
        )
        terms.append(
            Rank1Term(
                Vec.unit(ring, B.nrows, i),
                Vec.unit(ring, B.ncols, j),
                c,
            )
        )
    D = Decomposition(ring, inst.tensor.dims, terms)
    ok, mismatch = verify_decomposition(inst.tensor, D)
    if not ok:
        raise StructureError(f"witness fails to sum to the tensor at {mismatch[0]}")
    return D


def slice_reduce(T: Tensor3, k: int, lam: DenseMatrix) -> Tensor3:
    """Subtract lam-combinations of the trailing slices from the first k.

    The 3-slices of T split into k payload slices followed by tau' gadget
    slices; the result has k slices V_i = S_i - sum_j lam(i,j) S'_j.
    """
    tau2 = T.dims[2] - k
    if k < 1 or tau2 < 0:
        raise ValueError("payload count out of range")
    if lam.nrows != k or lam.ncols != tau2:
        raise ValueError(f"coefficient matrix must be {k}x{tau2}")
    if lam.ring != T.ring:
        raise RingMismatchError("coefficients over a different ring")
    kind, p = T.ring.kind, T.ring.modulus
    lraw = lam.raw_rows()
    acc: dict[Key, object] = {}
    for (i, j, z), v in T.entries.items():
        if z < k:
            key = (i, j, z)
            cur = acc.get(key)
            acc[key] = v if cur is None else cur + v
        else:
            g = z - k
            for t in range(k):
                c = lraw[t][g]
                if c == 0:
                    continue
                key = (i, j, t)
                cur = acc.get(key)
                delta = c * v
                acc[key] = -delta if cur is None else cur - delta
    if kind == PRIME_FIELD:
        acc = {key: v % p for key, v in acc.items() if v % p}
    else:
        acc = {key: v for key, v in acc.items() if v}
    return Tensor3._from_raw(T.ring, (T.dims[0], T.dims[1], k), acc)


def pad_cubical(T: Tensor3) -> Tensor3:
    """Zero-pad all axes to the largest dimension (rank is unchanged)."""
    m = max(T.dims)
    if T.dims == (m, m, m):
        return T
    return Tensor3._from_raw(T.ring, (m, m, m), dict(T.entries))
