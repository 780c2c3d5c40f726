import random

import pytest

from tenred.errors import RingMismatchError, StructureError, VerificationError
from tenred.linalg import DenseMatrix, Vec
from tenred.polysys import Assignment, PolySystem, parse_polynomial
from tenred.rings import GF, QQ, ZZ, Scalar, one
from tenred.sigma import IncompleteMatrix, SymbolicU, build_B, completion_witness
from tenred.tensors import (
    Decomposition,
    Rank1Term,
    Tensor3,
    build_derksen,
    derksen_witness,
    instance_source,
    pad_cubical,
    slice_matrix,
    slice_reduce,
    sum_decomposition_raw,
    verify_decomposition,
)


def _t(ring, dims, triples):
    return Tensor3(ring, dims, {k: Scalar(ring, v) for k, v in triples.items()})


def test_tensor3_basics():
    T = _t(ZZ, (2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 0, (0, 1, 1): -2})
    assert T.nnz == 2
    assert not T.is_zero
    assert T.entry(0, 1, 1).value == -2
    assert T.entry(1, 1, 1).is_zero
    assert Tensor3.zeros(ZZ, (1, 1, 1)).is_zero
    assert T.items() == [((0, 0, 0), Scalar(ZZ, 1)), ((0, 1, 1), Scalar(ZZ, -2))]
    with pytest.raises(ValueError):
        _t(ZZ, (2, 2, 2), {(0, 0, 2): 1})
    with pytest.raises(RingMismatchError):
        Tensor3(ZZ, (1, 1, 1), {(0, 0, 0): Scalar(QQ, 1)})


def test_tensor3_from_nested_and_change_ring():
    grid = [[[Scalar(ZZ, 13), Scalar(ZZ, 0)], [Scalar(ZZ, -1), Scalar(ZZ, 2)]]]
    T = Tensor3.from_nested(ZZ, grid)
    assert T.dims == (1, 2, 2)
    assert T.entry(0, 1, 0).value == -1
    f = T.change_ring(GF(11))
    assert f.entry(0, 0, 0).value == 2
    assert f.entry(0, 1, 0).value == 10
    assert T.change_ring(ZZ) is T
    with pytest.raises(ValueError):
        f.change_ring(QQ)


def test_slice_matrix():
    T = _t(ZZ, (2, 3, 2), {(0, 1, 0): 5, (1, 2, 1): 7, (0, 0, 1): 2})
    s3 = slice_matrix(T, 3, 0)
    assert s3.nrows == 2 and s3.ncols == 3
    assert s3.entry(0, 1).value == 5
    assert s3.entry(1, 2).is_zero
    s1 = slice_matrix(T, 1, 0)
    assert s1.nrows == 3 and s1.ncols == 2
    assert s1.entry(1, 0).value == 5
    assert s1.entry(0, 1).value == 2
    s2 = slice_matrix(T, 2, 2)
    assert s2.entry(1, 1).value == 7
    with pytest.raises(ValueError):
        slice_matrix(T, 0, 0)
    with pytest.raises(ValueError):
        slice_matrix(T, 3, 5)


def _term(ring, a, b, c):
    def mk(vals):
        return Vec.from_dense(ring, [Scalar(ring, v) for v in vals])

    return Rank1Term(mk(a), mk(b), mk(c))


def test_rank1term_and_decomposition_validation():
    t = _term(QQ, [1, 0], [0, 1], [1, 1])
    assert t.dims == (2, 2, 2)
    with pytest.raises(RingMismatchError):
        Rank1Term(Vec.unit(QQ, 2, 0), Vec.unit(ZZ, 2, 0), Vec.unit(QQ, 2, 0))
    with pytest.raises(ValueError):
        Decomposition(QQ, (2, 2, 3), [t])
    with pytest.raises(RingMismatchError):
        Decomposition(ZZ, (2, 2, 2), [t])
    d = Decomposition(QQ, (2, 2, 2), [t, t])
    assert len(d) == 2 and list(d) == [t, t]


def test_sum_and_verify_decomposition():
    ring = GF(5)
    t1 = _term(ring, [1, 0], [1, 0], [1, 0])
    t2 = _term(ring, [0, 1], [0, 1], [0, 1])
    D = Decomposition(ring, (2, 2, 2), [t1, t2])
    total = sum_decomposition_raw(D)
    assert total == {(0, 0, 0): 1, (1, 1, 1): 1}
    T = _t(ring, (2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 1})
    ok, mismatch = verify_decomposition(T, D)
    assert ok and mismatch is None

    T2 = _t(ring, (2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 2})
    ok2, mismatch2 = verify_decomposition(T2, D)
    assert not ok2
    key, want, got = mismatch2
    assert key == (1, 1, 1) and want.value == 2 and got.value == 1

    with pytest.raises(ValueError):
        verify_decomposition(_t(ring, (2, 2, 3), {}), D)
    with pytest.raises(RingMismatchError):
        verify_decomposition(_t(GF(7), (2, 2, 2), {}), D)


def test_cancelling_terms_sum_to_zero():
    t = _term(QQ, [1, 2], [3, 1], [1, 1])
    neg = Rank1Term(t.a.scale(Scalar(QQ, -1)), t.b, t.c)
    D = Decomposition(QQ, (2, 2, 2), [t, neg])
    assert sum_decomposition_raw(D) == {}
    ok, _ = verify_decomposition(Tensor3.zeros(QQ, (2, 2, 2)), D)
    assert ok


def test_build_derksen_shape():
    ring = GF(2)
    B = IncompleteMatrix(
        ring,
        [[Scalar(ring, 1), None], [Scalar(ring, 0), Scalar(ring, 1)]],
    )
    inst = build_derksen(B)
    assert inst.tau == 1
    assert inst.star_map == ((0, 1),)
    assert inst.target_rank == 4
    assert inst.tensor.dims == (2, 2, 2)
    assert inst.tensor.entry(0, 0, 0).is_one
    assert inst.tensor.entry(1, 1, 0).is_one
    assert inst.tensor.entry(0, 1, 0).is_zero
    assert inst.tensor.entry(0, 1, 1).is_one
    assert inst.source is B


def test_build_derksen_star_order_row_major():
    ring = QQ
    B = IncompleteMatrix(
        ring,
        [[None, Scalar(ring, 2)], [Scalar(ring, 3), None]],
    )
    inst = build_derksen(B)
    assert inst.star_map == ((0, 0), (1, 1))
    assert inst.tensor.entry(0, 0, 1).is_one
    assert inst.tensor.entry(1, 1, 2).is_one
    assert inst.tensor.dims == (2, 2, 3)


def test_instance_source_round_trip():
    ring = GF(7)
    B = IncompleteMatrix(
        ring,
        [[Scalar(ring, 4), None, Scalar(ring, 0)], [None, Scalar(ring, 1), Scalar(ring, 6)]],
    )
    inst = build_derksen(B)
    back = instance_source(inst.tensor, inst.star_map)
    assert back.raw_grid == B.raw_grid
    assert back.star_positions == B.star_positions

    broken = Tensor3(
        ring,
        inst.tensor.dims,
        dict(
            list({k: Scalar(ring, v) for k, v in inst.tensor.entries.items()}.items())
            + [((0, 1, 0), Scalar(ring, 5))]
        ),
    )
    with pytest.raises(StructureError):
        instance_source(broken, inst.star_map)


def _gadget_pipeline(ring, poly, solution):
    F = PolySystem(ring, 1, [parse_polynomial(poly, 1, ring)])
    B = build_B(F)
    inst = build_derksen(B)
    pt = Assignment.from_ints(ring, [solution])
    W = completion_witness(F, pt, B=B)
    U = SymbolicU(B.row_labels).evaluate(pt, ring)
    return inst, W, U


def test_derksen_witness_pipeline():
    inst, W, U = _gadget_pipeline(GF(11), "x1", 0)
    D = derksen_witness(inst, W, U, U)
    assert len(D) == inst.target_rank == inst.tau + 3
    ok, _ = verify_decomposition(inst.tensor, D)
    assert ok


def test_derksen_witness_rejects_bad_completion():
    inst, W, U = _gadget_pipeline(GF(11), "x1", 0)
    ring = GF(11)
    bumped = [list(row) for row in W.rows]
    bumped[0][0] = bumped[0][0] + one(ring)
    with pytest.raises(VerificationError):
        derksen_witness(inst, DenseMatrix(ring, bumped), U, U)
    two = Scalar(ring, 2)
    badU = DenseMatrix(ring, [[v * two for v in row] for row in U.rows])
    with pytest.raises(VerificationError):
        derksen_witness(inst, W, badU, U)


def test_slice_reduce_algebra():
    ring = GF(7)
    T = _t(
        ring,
        (2, 2, 3),
        {(0, 0, 0): 1, (1, 1, 0): 2, (0, 1, 1): 3, (1, 0, 2): 4},
    )
    lam = DenseMatrix.from_ints(ring, [[2, 5]])
    R = slice_reduce(T, 1, lam)
    assert R.dims == (2, 2, 1)
    # V_0 = S_0 - 2*S'_0 - 5*S'_1
    assert R.entry(0, 0, 0).value == 1
    assert R.entry(1, 1, 0).value == 2
    assert R.entry(0, 1, 0).value == (-2 * 3) % 7
    assert R.entry(1, 0, 0).value == (-5 * 4) % 7

    zerolam = DenseMatrix.zeros(ring, 1, 2)
    Z = slice_reduce(T, 1, zerolam)
    assert Z.entries == {(0, 0, 0): 1, (1, 1, 0): 2}

    with pytest.raises(ValueError):
        slice_reduce(T, 0, lam)
    with pytest.raises(ValueError):
        slice_reduce(T, 1, DenseMatrix.from_ints(ring, [[1]]))
    with pytest.raises(RingMismatchError):
        slice_reduce(T, 1, DenseMatrix.from_ints(GF(5), [[1, 1]]))


def test_slice_reduce_multiple_payload():
    ring = QQ
    T = _t(ring, (2, 2, 4), {(0, 0, 0): 1, (1, 1, 1): 1, (0, 1, 2): 1, (1, 0, 3): 1})
    lam = DenseMatrix.from_ints(ring, [[1, 0], [0, 2]])
    R = slice_reduce(T, 2, lam)
    assert R.dims == (2, 2, 2)
    assert R.entry(0, 0, 0).value == 1
    assert R.entry(0, 1, 0).value == -1
    assert R.entry(1, 1, 1).value == 1
    assert R.entry(1, 0, 1).value == -2


def test_pad_cubical():
    T = _t(ZZ, (2, 3, 1), {(1, 2, 0): 5})
    P = pad_cubical(T)
    assert P.dims == (3, 3, 3)
    assert P.entry(1, 2, 0).value == 5
    assert P.nnz == 1
    cube = _t(ZZ, (2, 2, 2), {(0, 0, 0): 1})
    assert pad_cubical(cube) is cube


def test_random_decompositions_round_trip():
    rng = random.Random(3)
    ring = QQ
    for _ in range(10):
        terms = []
        for _ in range(rng.randint(1, 4)):
            vecs = []
            for n in (2, 3, 2):
                vecs.append(
                    Vec.from_dense(ring, [Scalar(ring, rng.randint(-2, 2)) for _ in range(n)])
                )
            terms.append(Rank1Term(*vecs))
        D = Decomposition(ring, (2, 3, 2), terms)
        T = Tensor3._from_raw(ring, (2, 3, 2), sum_decomposition_raw(D))
        ok, _ = verify_decomposition(T, D)
        assert ok
