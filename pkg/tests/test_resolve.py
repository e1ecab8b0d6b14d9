import pytest

from sqzlift.algebra import AlgebraMap, check_square_zero, trunc_poly, zmod
from sqzlift.exactlin import AbGroup
from sqzlift.modcx import (
    ChainComplex,
    FinModule,
    ModuleMap,
    free_module,
    homology,
    module_as_complex,
    quasi_iso,
    quotient_module,
)
from sqzlift.resolve import (
    NeedLongerResolution,
    compare_lift,
    ext_group,
    free_resolution,
    hyper_ext,
    lift_homotopy,
    tor_group,
)

Z4 = zmod(4)
Z2 = zmod(2)


def z2_over_z4():
    return quotient_module(Z4, [(2,)], name="Z/2")


def free_rank_one(A, name="A"):
    return FinModule(A, list(A.orders), [[A.mul[p][j] for j in range(A.ngens)]
                                         for p in range(A.ngens)], name=name)


def test_resolution_of_free_module_is_immediate():
    A = free_rank_one(Z4)
    res = free_resolution(A, 4)
    assert res.complete
    assert res.length == 0 or res.rank(1) == 0
    assert quasi_iso_aug(res)


def quasi_iso_aug(res):
    # H_0(F) = target through the augmentation (module targets)
    h0 = homology(res.complex, 0)
    return h0.group == res.target.group()


def test_periodic_resolution_z2_over_z4():
    M = z2_over_z4()
    res = free_resolution(M, 4)
    assert not res.complete
    assert res.periodic is not None
    assert all(res.rank(k) == 1 for k in range(5))
    # differentials are multiplication by 2 throughout
    for k in range(1, 5):
        assert res.sdiff(k)[0][0] == (2,)
    assert res.certified_length() is None


def test_resolution_over_field_terminates():
    k = quotient_module(Z2, [], name="k")
    res = free_resolution(k, 5)
    assert res.complete
    assert res.rank(0) == 1


def test_resolution_exactness_verified():
    S = trunc_poly(2, 2)
    k = quotient_module(S, [S.gen(1)], name="k")
    res = free_resolution(k, 4)
    assert res.periodic is not None
    for kk in range(1, 4):
        assert res.sdiff(kk)[0][0] == S.gen(1)


def test_compare_lift_identity():
    M = z2_over_z4()
    res = free_resolution(M, 3)
    lift = compare_lift(ModuleMap.identity(M), res, res)
    for k in range(0, 3):
        # identity lift is the identity matrix in each degree here
        assert lift.comp(k).apply((1,) * res.free(k).module.ngens) is not None


def test_compare_lift_zero_and_homotopy():
    M = z2_over_z4()
    res = free_resolution(M, 3)
    zlift = compare_lift(ModuleMap.zero(M, M), res, res)
    # some lift of zero is homotopic to the actual zero chain map
    from sqzlift.modcx import ChainMap
    zero_map = ChainMap.zero(res.complex, res.complex)
    comps = lift_homotopy(zlift, zero_map)
    assert comps is not None


def test_compare_lift_inclusion():
    M = z2_over_z4()
    N = free_rank_one(Z4, name="Z/4")
    res_m = free_resolution(M, 3)
    res_n = free_resolution(N, 3)
    inc = ModuleMap(M, N, [[2]])
    lift = compare_lift(inc, res_m, res_n)
    # degree-0 component composed with augmentation recovers the inclusion
    got = res_n.augmentation.compose(lift.comp(0))
    want = inc.compose(res_m.augmentation)
    assert got.add(want.negate()).is_zero()


def test_ext_groups_over_z4():
    M = z2_over_z4()
    e1 = ext_group(M, M, 1)
    e2 = ext_group(M, M, 2)
    assert e1.group == AbGroup((2,))
    assert e2.group == AbGroup((2,))
    # representatives are honest cocycles: chain-map conversion validates
    for el in e1.elements():
        el.as_chain_map()
    # Z/4 is self-injective, so Ext^1(Z/2, Z/4) vanishes
    N4 = free_rank_one(Z4, name="Z/4")
    assert ext_group(M, N4, 1).group.is_trivial()


def test_ext_over_field_vanishes_positively():
    k = quotient_module(Z2, [], name="k")
    assert ext_group(k, k, 0).group == AbGroup((2,))
    assert ext_group(k, k, 1).group.is_trivial()
    assert ext_group(k, k, 2).group.is_trivial()


def test_ext_zero_is_hom():
    M = z2_over_z4()
    N4 = free_rank_one(Z4, name="Z/4")
    from sqzlift.modcx import hom_group
    assert ext_group(M, N4, 0).group == hom_group(M, N4).group


def test_ext_trunc_poly():
    S = trunc_poly(2, 2)
    k = quotient_module(S, [S.gen(1)], name="k")
    assert ext_group(k, k, 1).group == AbGroup((2,))
    assert ext_group(k, k, 2).group == AbGroup((2,))


def test_need_longer_resolution():
    M = z2_over_z4()
    res = free_resolution(M, 2)
    res.periodic = None  # simulate an uncertified truncation
    with pytest.raises(NeedLongerResolution):
        res.require_length(5)


def test_ext_independent_of_resolution_choice():
    M = z2_over_z4()
    r1 = free_resolution(M, 3)
    r2 = free_resolution(M, 5)
    g1 = ext_group(M, M, 1, resolution=r1)
    g2 = ext_group(M, M, 1, resolution=r2)
    assert g1.group == g2.group
    # transport a representative along the comparison lift and compare class
    lift = compare_lift(ModuleMap.identity(M), r1, r2)
    el = g1.elements()[1] if len(g1.elements()) > 1 else g1.elements()[0]
    # transported cocycle: f o lift in each degree
    comps = el.as_chain_map()
    # pairing down to class comparison: both classes have matching order
    assert g1.group.order() == g2.group.order()


def test_dimension_shifting():
    # Ext^(i+1)(M, N) = Ext^i(Omega M, N) with Omega = first syzygy
    M = z2_over_z4()
    res = free_resolution(M, 4)
    # syzygy = kernel of the augmentation = image of d_1, here Z/2 again (2Z/4)
    syz = z2_over_z4()
    N = z2_over_z4()
    for i in range(0, 3):
        a = ext_group(M, N, i + 1).group
        b = ext_group(syz, N, i).group
        assert a == b


def test_tor_groups():
    M = z2_over_z4()
    assert tor_group(M, M, 0) == AbGroup((2,))
    assert tor_group(M, M, 1) == AbGroup((2,))
    A = free_rank_one(Z4, name="A")
    assert tor_group(A, M, 1).is_trivial()
    assert tor_group(A, M, 2).is_trivial()


def test_tor_zero_matches_tensor():
    from sqzlift.modcx import tensor_over
    M = z2_over_z4()
    t = tensor_over(M, M)
    assert tor_group(M, M, 0) == t.module.group()


def test_hyper_ext_concentrated_matches_ext():
    M = z2_over_z4()
    N = z2_over_z4()
    for i in range(0, 3):
        he = hyper_ext(module_as_complex(M), N, i, length=i + 2)
        e = ext_group(M, N, i)
        assert he.group == e.group


def test_hyper_ext_split_complex():
    # X = [S --0--> S]: hyper-Ext^i(X, N) = Ext^i(S,N) (+) Ext^(i-1)(S,N)
    S = Z4
    F = free_rank_one(S, name="S")
    F1 = free_rank_one(S, name="S'")
    X = ChainComplex(S, {0: F, 1: F1},
                     {1: ModuleMap(F1, F, [[0]])})
    N = free_rank_one(S, name="N")
    assert hyper_ext(X, N, 0, length=2).group == AbGroup((4,))
    assert hyper_ext(X, N, 1, length=2).group == AbGroup((4,))
    assert hyper_ext(X, N, -1, length=2).group.is_trivial()


def test_free_replacement_of_complex():
    # replace [Z/4 --2--> Z/4] by a levelwise-free complex (already free,
    # but the construction must reproduce the homology)
    S = Z4
    F1 = free_rank_one(S, "F1")
    F0 = free_rank_one(S, "F0")
    X = ChainComplex(S, {0: F0, 1: F1}, {1: ModuleMap(F1, F0, [[2]])})
    res = free_resolution(X, 3)
    for k in range(0, 4):
        assert homology(res.complex, k).group == homology(X, k).group
    # and of a non-free complex: Z/2 in two degrees with zero differential
    M = z2_over_z4()
    M2 = z2_over_z4()
    Y = ChainComplex(S, {0: M, 1: M2},
                     {1: ModuleMap(M2, M, [[0]])})
    resy = free_resolution(Y, 3)
    for k in range(0, 3):
        assert homology(resy.complex, k).group == homology(Y, k).group
