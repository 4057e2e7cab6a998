import random

import pytest
from hypothesis import given, settings, strategies as st

from logmod import generators as G
from logmod.lattice import IntMatrix, add, sub
from logmod.monoid import (
    MonoidError,
    extend_fs,
    faces,
    ideal_normalize,
    ideal_product,
    ideal_sharpen,
    localize,
    monoid_new,
    saturate,
    sharpen,
)

import oracle

N2 = monoid_new(2, [(1, 0), (0, 1)])
seeds = st.integers(0, 10**6)


def test_monoid_new_examples():
    assert monoid_new(2, [(1, 0), (0, 1), (1, 1)]).gens == ((0, 1), (1, 0))
    Z0 = monoid_new(1, [])
    assert Z0.gens == () and Z0.is_sharp and Z0.is_saturated
    M = monoid_new(2, [(2, 0), (0, 2), (1, 1)])
    assert set(M.gens) == {(2, 0), (0, 2), (1, 1)}
    with pytest.raises(ValueError):
        monoid_new(2, [(1, 0, 0)])


def test_flags():
    M = monoid_new(1, [(2,), (3,)])
    assert M.is_sharp and not M.is_saturated and M.is_fine
    assert (5,) in M and (1,) not in M
    assert not monoid_new(2, [(1, 0), (-1, 0), (0, 1)]).is_sharp


def test_saturate_examples():
    assert saturate(monoid_new(1, [(2,), (3,)])) == monoid_new(1, [(1,)])
    assert saturate(N2) == N2
    M = monoid_new(2, [(2, 0), (0, 2), (1, 1)])
    assert saturate(M) == M and M.is_saturated


def test_sharpen_examples():
    ZN = monoid_new(2, [(1, 0), (-1, 0), (0, 1)])
    Ms, proj = sharpen(ZN)
    assert Ms.rank == 1 and Ms.is_sharp
    assert [proj.apply(g) for g in [(1, 0), (0, 1)]] in ([(0,), (1,)], [(0,), (-1,)])
    assert sharpen(N2) == (N2, IntMatrix.identity(2))
    Ms, _ = sharpen(monoid_new(1, [(1,), (-1,)]))
    assert Ms.gens == ()


def test_faces_examples():
    fs = faces(N2)
    assert [F.gens for F in fs] == [(), ((1, 0),), ((0, 1),), ((0, 1), (1, 0))] or \
        sorted(F.gens for F in fs) == sorted([(), ((1, 0),), ((0, 1),), ((0, 1), (1, 0))])
    assert len(faces(monoid_new(1, [(1,)]))) == 2
    half = saturate(monoid_new(2, [(1, -1), (-1, 1), (0, 1)]))
    fs = faces(half)
    assert len(fs) == 2
    assert fs[0].cone.dim == 1 and fs[1] == half
    with pytest.raises(MonoidError):
        faces(monoid_new(1, [(2,), (3,)]))


def test_localize_examples():
    e1 = next(F for F in faces(N2) if F.gens == ((1, 0),))
    assert localize(N2, e1) == monoid_new(2, [(1, 0), (-1, 0), (0, 1)])
    assert localize(N2, faces(N2)[0]) == N2
    assert localize(N2, N2) == monoid_new(2, [(1, 0), (0, 1), (-1, 0), (0, -1)])
    with pytest.raises(MonoidError):
        localize(N2, monoid_new(2, [(1, 1)]))


def test_extend_fs_examples():
    M = extend_fs(N2, [(1, -1)])
    assert M.gens == ((0, 1), (1, -1))
    assert (1, 0) in M and (0, -1) not in M
    assert extend_fs(N2, [(2, 3)]) == N2
    assert extend_fs(monoid_new(1, [(1,)]), [(-1,)]) == monoid_new(1, [(1,), (-1,)])
    with pytest.raises(MonoidError):
        extend_fs(monoid_new(2, [(2, 0), (0, 2), (1, 1)]), [(1, 0)])


def test_ideal_examples():
    assert ideal_normalize(N2, [(1, 0), (0, 1), (1, 1)]).gens == ((0, 1), (1, 0))
    assert ideal_normalize(N2, []).is_empty
    # in N the generator 3 lies in 2 + N; in <2, 3> it does not
    assert ideal_normalize(monoid_new(1, [(1,)]), [(2,), (3,)]).gens == ((2,),)
    assert ideal_normalize(monoid_new(1, [(2,), (3,)]), [(2,), (3,)]).gens == ((2,), (3,))
    with pytest.raises(MonoidError):
        ideal_normalize(N2, [(-1, 0)])


def test_ideal_product_and_sharpen_examples():
    a = ideal_normalize(N2, [(1, 0)])
    b = ideal_normalize(N2, [(0, 1)])
    assert ideal_product(a, b).gens == ((1, 1),)
    assert ideal_product(a, ideal_normalize(N2, [])).is_empty
    ZN = monoid_new(2, [(1, 0), (-1, 0), (0, 1)])
    K = ideal_normalize(ZN, [(1, 0), (0, 1)])
    assert ideal_sharpen(K).gens == ((0,),)
    with pytest.raises(MonoidError):
        ideal_product(a, ideal_normalize(ZN, [(0, 1)]))


# -- properties ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seeds)
def test_saturate_is_closure(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    gens = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(rng.randint(1, 4))]
    M = monoid_new(n, gens)
    S = saturate(M)
    assert saturate(S) == S and S.is_saturated
    assert all(g in S for g in M.gens)
    assert extend_fs(M, []) == S
    bigger = monoid_new(n, gens + [tuple(rng.randint(-3, 3) for _ in range(n))])
    assert all(g in saturate(bigger) for g in S.gens)
    O = oracle.SaturatedOracle(gens, n)
    for x in oracle.box(n, 3):
        assert (x in S) == (x in O)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_faces_and_localization(seed):
    rng = random.Random(seed)
    M = G.saturated_monoid(rng)
    fs = faces(M)
    for F in fs:
        for F2 in fs:
            common = monoid_new(M.rank, [g for g in F.gens if g in F2.gens])
            assert common in fs or saturate(common) in fs
        L = localize(M, F)
        assert L.lattice == M.lattice
        assert set(L.units) == set(monoid_new(M.rank, list(F.gens) + [tuple(-c for c in g) for g in F.gens]).lattice)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_ideal_membership_in_box(seed):
    rng = random.Random(seed)
    Q = G.sharp_monoid(rng, rng.randint(1, 2))
    K = G.ideal(rng, Q)
    O = oracle.SaturatedOracle(Q.gens, Q.rank)
    gens = list(K.gens)
    for x in oracle.box(Q.rank, 8):
        if x not in O:
            continue
        in_K = any(sub(x, g) in O for g in gens)
        assert (x in K) == in_K
    for g in gens:  # minimality
        assert not any(h != g and sub(g, h) in O for h in gens)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_sharpen_and_ideal_bijection(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    Q = G.sharp_monoid(rng, n - 1, entry=2)
    # Q x Z, so the units are exactly the last coordinate
    gens = [g + (0,) for g in Q.gens] + [(0,) * (n - 1) + (1,), (0,) * (n - 1) + (-1,)]
    M = monoid_new(n, gens)
    Ms, proj = sharpen(M)
    assert Ms.is_sharp and Ms.units == ()
    K1 = G.ideal(rng, M)
    K2 = G.ideal(rng, M)
    if K1.gens != K2.gens:
        assert ideal_sharpen(K1).gens != ideal_sharpen(K2).gens
    for x in K1.gens:
        assert proj.apply(x) in Ms
        shifted = add(x, (0,) * (n - 1) + (rng.randint(-3, 3),))
        assert shifted in K1
