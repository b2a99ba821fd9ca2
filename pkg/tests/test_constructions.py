import itertools

import pytest
from hypothesis import given, strategies as st

from fischer.constructions import (
    AxiomError,
    affine_as_fs,
    affine_reflection,
    affine_space,
    check_3_transpositions,
    compose,
    conjugacy_closure,
    conjugate,
    dual_affine_plane,
    fischer_from_involutions,
    hall_loop_product,
    hall_triple_81,
    index_vec,
    inverse,
    noncommuting_components,
    perm_order,
    sym_fischer,
    transposition,
    vec_index,
)
from fischer.incidence import is_fischer, isomorphic


perms5 = st.permutations(list(range(5))).map(tuple)


@given(perms5, perms5, perms5)
def test_compose_associative(f, g, h):
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    assert compose(f, inverse(f)) == tuple(range(5))


@given(perms5)
def test_perm_order(f):
    k = perm_order(f)
    ident = tuple(range(5))
    g = ident
    for i in range(1, k + 1):
        g = compose(g, f)
        assert (g == ident) == (i == k)


def test_conjugate_is_involution():
    t = transposition(4, 0, 1)
    g = (1, 2, 3, 0)
    c = conjugate(t, g)
    assert perm_order(c) == 2


@given(st.integers(1, 4), st.data())
def test_vec_index_roundtrip(n, data):
    k = data.draw(st.integers(0, 3 ** n - 1))
    assert vec_index(index_vec(k, n)) == k


def test_sym4_from_transpositions():
    gens = [transposition(4, i, i + 1) for i in range(3)]
    D = conjugacy_closure(gens)
    assert len(D) == 6
    fs = fischer_from_involutions(gens)
    assert isomorphic(fs, sym_fischer(4)) is not None
    assert isomorphic(fs, dual_affine_plane()) is not None


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_sym_from_transpositions(n):
    gens = [transposition(n, i, i + 1) for i in range(n - 1)]
    assert isomorphic(fischer_from_involutions(gens), sym_fischer(n)) is not None


def test_not_3_transpositions():
    # (0 1) and (1 2 3 4)-conjugates: two transpositions in Sym(n) always have order <= 3,
    # so use double transpositions whose product has order 4
    a = (1, 0, 3, 2, 4)
    b = (0, 2, 1, 4, 3)
    with pytest.raises(AxiomError):
        check_3_transpositions([a, b])
    with pytest.raises(AxiomError):
        check_3_transpositions([(1, 2, 0)])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_affine_as_fs(n):
    fs = affine_as_fs(n)
    assert fs.n_points == 3 ** n


def test_affine_reflections_generate_all():
    n = 2
    gens = [affine_reflection(n, (0, 0)), affine_reflection(n, (1, 0)), affine_reflection(n, (0, 1))]
    assert len(conjugacy_closure(gens)) == 9


def test_noncommuting_components():
    gens = [transposition(5, 0, 1), transposition(5, 2, 3)]
    assert noncommuting_components(gens) == [[0], [1]]
    D = conjugacy_closure([transposition(4, i, i + 1) for i in range(3)])
    assert len(noncommuting_components(D)) == 1


def test_affine_lines_are_x_y_minus_sum():
    s = affine_space(2)
    for a, b in itertools.combinations(range(9), 2):
        x, y = index_vec(a, 2), index_vec(b, 2)
        assert s.third_point(a, b) == vec_index([(-u - v) % 3 for u, v in zip(x, y)])


def test_affine_space_bounds():
    with pytest.raises(ValueError):
        affine_space(9)
    assert affine_space(0).n_points == 1


def loop_oracle_checks():
    els = list(itertools.product(range(3), repeat=4))
    zero = (0, 0, 0, 0)
    return els, zero


def test_hall_loop_is_commutative_moufang_exponent_3():
    els, zero = loop_oracle_checks()
    m = hall_loop_product
    for x in els:
        assert m(x, zero) == x
        assert m(x, m(x, x)) == zero
        inv = tuple((-t) % 3 for t in x)
        assert m(x, inv) == zero
    import random
    rng = random.Random(3)
    for _ in range(2000):
        x, y, z = (rng.choice(els) for _ in range(3))
        assert m(x, y) == m(y, x)
        # Moufang: (xy)(zx) = (x(yz))x
        assert m(m(x, y), m(z, x)) == m(m(x, m(y, z)), x)


def test_hall_loop_not_associative():
    m = hall_loop_product
    e1, e2, e3 = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)
    assert m(m(e1, e2), e3) != m(e1, m(e2, e3))


def test_hall_81():
    s = hall_triple_81()
    assert s.n_points == 81 and len(s.lines) == 1080
    assert is_fischer(s)
    assert isomorphic(s, affine_space(4)) is None
