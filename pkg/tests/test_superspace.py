import pytest

from supertroesch.linalg import FpMatrix, matmul, matpow
from supertroesch.superspace import (
    EVEN,
    ODD,
    LinearMapSS,
    ZERO_SPACE,
    build_Sh,
    dual_space,
    frobenius_twist_space,
    hom_space,
    k_super,
    parity_shift,
    parse_space,
    rho,
    tensor,
)


def test_tensor_even_odd():
    v = tensor(k_super(1, 0), k_super(0, 1))
    assert v.dim == 1
    assert v.basis[0].parity == ODD


def test_tensor_sh_with_k11():
    w = tensor(build_Sh(3, 1), k_super(1, 1))
    assert w.dim == 6
    assert [b.zdeg for b in w.basis] == [0, 0, 1, 1, 2, 2]
    assert [b.parity for b in w.basis] == [0, 1, 0, 1, 0, 1]


def test_tensor_with_zero():
    assert tensor(k_super(2, 1), ZERO_SPACE).dim == 0


def test_parity_shift_involution_on_parities():
    v = k_super(2, 1)
    w = parity_shift(parity_shift(v))
    assert [b.parity for b in w.basis] == [b.parity for b in v.basis]
    assert parity_shift(k_super(1, 0)).dims_by_parity() == (0, 1)


def test_parity_shift_of_sh():
    shbar = parity_shift(build_Sh(3, 1))
    assert shbar.dims_by_parity() == (0, 3)
    assert [b.zdeg for b in shbar.basis] == [0, 1, 2]


def test_frobenius_twist_space():
    sh = build_Sh(3, 1)
    assert frobenius_twist_space(sh, 0, 3) == sh
    tw = frobenius_twist_space(sh, 1, 3)
    assert [b.zdeg for b in tw.basis] == [0, 3, 6]
    v = frobenius_twist_space(k_super(1, 1), 1, 3)
    assert v.dims_by_parity() == (1, 1)


def test_build_sh_and_rho():
    sh = build_Sh(3, 2)
    assert sh.dim == 9
    assert all(b.parity == EVEN for b in sh.basis)
    assert [b.zdeg for b in sh.basis] == list(range(9))
    r0 = rho(3, 1, 0)
    assert r0.apply_index(0) == {1: 1}
    assert r0.apply_index(1) == {2: 1}
    assert r0.apply_index(2) == {}
    # digit arithmetic: rho_1(sh_2) = sh_5 at p=3, r=2
    r1 = rho(3, 2, 1)
    assert r1.apply_index(2) == {5: 1}
    with pytest.raises(ValueError):
        rho(3, 1, 1)


def test_rho_commute_and_nilpotent():
    for p, r in ((3, 1), (3, 2), (5, 1), (5, 2)):
        maps = [rho(p, r, s) for s in range(r)]
        for a in maps:
            assert matpow(a.matrix, p).is_zero()
            for b in maps:
                assert matmul(a.matrix, b.matrix) == matmul(b.matrix, a.matrix)


def test_dual_and_hom_spaces():
    assert dual_space(k_super(1, 0)).dims_by_parity() == (1, 0)
    h = hom_space(build_Sh(3, 1), parity_shift(build_Sh(3, 1)))
    assert h.dim == 9
    assert h.dims_by_parity() == (0, 9)
    hv = hom_space(k_super(1, 1), k_super(1, 1))
    # the identity occupies even zdeg-0 units
    diag = [hv.basis[i * 2 + i] for i in range(2)]
    assert all(b.parity == EVEN and b.zdeg == 0 for b in diag)


def test_linear_map_validation():
    sh = build_Sh(3, 1)
    bad = FpMatrix.zeros(3, 3, 3)
    bad.set(0, 0, 1)  # zdeg shift 0, but declared shift 1
    with pytest.raises(ValueError):
        LinearMapSS(sh, sh, bad, EVEN, 1)


def test_tensor_associative_up_to_reindexing():
    spaces = [k_super(1, 1), k_super(2, 0), k_super(0, 1)]
    for a in spaces:
        for b in spaces:
            for c in spaces:
                left = tensor(tensor(a, b), c)
                right = tensor(a, tensor(b, c))
                # same dimensions, degrees and parities in the same order
                assert [x.zdeg for x in left.basis] == [x.zdeg for x in right.basis]
                assert [x.parity for x in left.basis] == [x.parity for x in right.basis]


def test_parse_space():
    assert parse_space("k^{2|1}", 3).dims_by_parity() == (2, 1)
    assert parse_space("Sh(1)", 3).dim == 3
    assert parse_space("PiSh(1)", 3).dims_by_parity() == (0, 3)
    with pytest.raises(ValueError):
        parse_space("bogus", 3)
