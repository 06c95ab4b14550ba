import random

import pytest

from supertroesch.linalg import FpMatrix, invert, matmul
from supertroesch.pcomplex import (
    PComplex,
    PDifferentialError,
    build_from_blocks,
    cohomology,
    cohomology_table,
    contract,
    contraction_degree,
    contraction_prediction,
    decompose_cyclic,
    decompose_cyclic_oracle,
    is_normal,
    kunneth_check,
    tensor_pcomplex,
)
from supertroesch.superspace import EVEN, ODD, k_super
from supertroesch.troesch import build_B


def random_block_complex(rng, p, max_blocks=4, max_shift=3):
    blocks = []
    total = 0
    for _ in range(rng.randrange(1, max_blocks + 1)):
        length = rng.randrange(1, p + 1)
        if total + length > 12:
            break
        blocks.append((rng.randrange(0, max_shift + 1), length, rng.randrange(2)))
        total += length
    if not blocks:
        blocks = [(0, 1, 0)]
    return blocks, build_from_blocks(p, rng.choice((1, 2)), blocks)


def scramble_basis(rng, cx):
    """Conjugate the differential by random parity-preserving isomorphisms."""
    p = cx.p
    mats = {}
    for i, sp in cx.terms.items():
        n = sp.dim
        while True:
            m = FpMatrix.zeros(p, n, n)
            for a in range(n):
                for b in range(n):
                    if sp.basis[a].parity == sp.basis[b].parity:
                        m.set(a, b, rng.randrange(p))
            if invert(m) is not None:
                mats[i] = m
                break
    diffs = {}
    for i in cx.degrees():
        d = cx.diff(i)
        if d.is_zero():
            continue
        tgt = mats.get(i + cx.alpha)
        src_inv = invert(mats[i])
        nd = d
        if tgt is not None:
            nd = matmul(tgt, nd)
        nd = matmul(nd, src_inv)
        if not nd.is_zero():
            diffs[i] = nd
    return PComplex(p, cx.alpha, dict(cx.terms), diffs)


def test_cohomology_zero_complex():
    cx = PComplex(3, 1, {}, {})
    assert cohomology(cx, 1) == {}


def test_cohomology_trivial_summand():
    cx = build_from_blocks(3, 1, [(3, 1, ODD)])
    row = cohomology(cx, 1)
    assert row == {3: (0, 1)}


def test_free_block_is_acyclic():
    for p in (3, 5):
        cx = build_from_blocks(p, 1, [(0, p, EVEN)])
        for s in range(1, p):
            assert all(v == (0, 0) for v in cohomology(cx, s).values())


def test_decompose_examples():
    # length-3 odd block at 0: B_1(1)(k^{0|1})
    data = build_B(1, 1, k_super(0, 1), 3)
    dec = decompose_cyclic(data.complex)
    assert dec.blocks == {(0, 3, ODD): 1}
    assert dec.is_normal()
    # a block of length 2 at p=3 is not normal
    cx = build_from_blocks(3, 1, [(0, 2, EVEN)])
    assert not is_normal(cx)


def test_decompose_rejects_bad_differential():
    sp = k_super(1, 0)
    terms = {i: sp for i in range(4)}
    diffs = {i: FpMatrix.from_rows(3, [[1]]) for i in range(3)}
    cx = PComplex(3, 1, terms, diffs)
    with pytest.raises(PDifferentialError):
        decompose_cyclic(cx)


def test_decompose_matches_ground_truth_and_oracle():
    rng = random.Random(101)
    for case in range(200):
        p = rng.choice((3, 5))
        blocks, cx = random_block_complex(rng, p)
        scrambled = scramble_basis(rng, cx)
        want = {}
        for (shift, length, parity) in blocks:
            key = (shift, length, parity)
            want[key] = want.get(key, 0) + 1
        got = decompose_cyclic(scrambled)
        assert got.blocks == want, f"case {case}"
        oracle = decompose_cyclic_oracle(scrambled)
        assert oracle.blocks == want, f"case {case} (oracle)"
        # dimension reconstruction
        dims = got.reconstructed_dims()
        for (deg, parity), d in dims.items():
            assert d == scrambled.dim(deg, parity)


def test_normal_slices_agree():
    rng = random.Random(103)
    for _ in range(60):
        p = rng.choice((3, 5))
        blocks = []
        for _ in range(rng.randrange(1, 4)):
            blocks.append((rng.randrange(3), rng.choice((1, p)), rng.randrange(2)))
        cx = scramble_basis(rng, build_from_blocks(p, 1, blocks))
        table = cohomology_table(cx)
        assert table.rows_equal()
        assert is_normal(cx)


def test_contract_examples():
    # contraction of a p-acyclic complex with t=0 is exact
    cx = build_from_blocks(3, 1, [(0, 3, EVEN), (1, 3, ODD)])
    con = contract(cx, 1, 0)
    con.validate()
    for i in con.degrees():
        assert con.cohomology_dims(i) == (0, 0)
    # contraction of the zero complex
    z = PComplex(3, 1, {}, {})
    assert contract(z, 1, 0).terms == {}
    with pytest.raises(ValueError):
        contract(cx, 0, 0)
    with pytest.raises(ValueError):
        contract(cx, 1, 5)


def test_contract_matches_prediction():
    rng = random.Random(107)
    checked = 0
    while checked < 200:
        p = rng.choice((3, 5))
        blocks, cx = random_block_complex(rng, p)
        cx = scramble_basis(rng, cx)
        s = rng.randrange(1, p)
        t = rng.randrange(0, (p - s) * cx.alpha)
        con = contract(cx, s, t)
        con.validate()
        top = max(con.degrees(), default=0) + 2
        for ell in range(top):
            assert con.cohomology_dims(ell) == contraction_prediction(cx, s, t, ell)
        checked += 1


def test_tensor_examples():
    # free tensor anything is acyclic
    free = build_from_blocks(3, 1, [(0, 3, EVEN)])
    triv = build_from_blocks(3, 1, [(2, 1, ODD)])
    t = tensor_pcomplex(free, triv)
    for s in range(1, 3):
        assert all(v == (0, 0) for v in cohomology(t, s).values())
    # trivial k<i> tensor trivial k<j> = trivial k<i+j>
    t2 = tensor_pcomplex(build_from_blocks(3, 1, [(1, 1, EVEN)]), triv)
    assert decompose_cyclic(t2).blocks == {(3, 1, ODD): 1}
    # alpha mismatch
    with pytest.raises(ValueError):
        tensor_pcomplex(free, build_from_blocks(3, 2, [(0, 1, EVEN)]))


def test_tensor_b1_with_itself_is_acyclic():
    data = build_B(1, 1, k_super(0, 1), 3)
    t = tensor_pcomplex(data.complex, data.complex)
    t.validate_p_differential()
    for s in range(1, 3):
        assert all(v == (0, 0) for v in cohomology(t, s).values())


def test_kunneth_on_power_complexes():
    built = [
        build_B(1, 1, k_super(1, 0), 3).complex,
        build_B(1, 1, k_super(0, 1), 3).complex,
        build_B(3, 1, k_super(0, 1), 3).complex,
    ]
    for c1 in built:
        for c2 in built:
            ok, msg = kunneth_check(c1, c2)
            assert ok, msg


def test_kunneth_random_normal_complexes():
    rng = random.Random(109)
    for _ in range(40):
        p = 3
        mk = lambda: scramble_basis(
            rng,
            build_from_blocks(
                p, 1, [(rng.randrange(3), rng.choice((1, p)), rng.randrange(2)) for _ in range(2)]
            ),
        )
        ok, msg = kunneth_check(mk(), mk())
        assert ok, msg


def test_contraction_degree_layout():
    cx = build_from_blocks(3, 2, [(0, 3, EVEN)])
    assert contraction_degree(cx, 1, 0, 0) == 0
    assert contraction_degree(cx, 1, 0, 1) == 2
    assert contraction_degree(cx, 1, 0, 2) == 6
    assert contraction_degree(cx, 2, 1, 1) == 5
