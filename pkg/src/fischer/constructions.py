"""Builders for the Fischer spaces used throughout the package.

Vectors of F_3^n are indexed little-endian in base 3 (``v[0] + 3 v[1] + ...``);
transpositions ``(i, j)`` of Sym(n), ``i < j``, are ordered lexicographically.
"""

from __future__ import annotations

import itertools
import math
from functools import cache
from typing import Iterable, Sequence

from .incidence import (
    TripleSystem,
    affine_tau_commutation,
    is_affine_type,
    is_connected,
    is_fischer,
)


class AxiomError(ValueError):
    """Involution generators that violate the 3-transposition axioms."""


# --- permutations as tuples -------------------------------------------------------

def compose(f: Sequence[int], g: Sequence[int]) -> tuple:
    """``f o g``: apply ``g`` first."""
    return tuple(f[x] for x in g)


def inverse(f: Sequence[int]) -> tuple:
    out = [0] * len(f)
    for i, fi in enumerate(f):
        out[fi] = i
    return tuple(out)


def perm_order(f: Sequence[int]) -> int:
    seen = [False] * len(f)
    order = 1
    for i in range(len(f)):
        if seen[i]:
            continue
        length, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = f[j]
            length += 1
        order = order * length // math.gcd(order, length)
    return order


def conjugate(d: Sequence[int], g: Sequence[int]) -> tuple:
    """``g^-1 o d o g``; for involutions this is ``g d g`` in either convention."""
    return compose(inverse(g), compose(d, g))


def transposition(n: int, i: int, j: int) -> tuple:
    """The transposition swapping ``i`` and ``j`` on ``0 .. n-1``."""
    f = list(range(n))
    f[i], f[j] = j, i
    return tuple(f)


# --- F_3^n ---------------------------------------------------------------------------

def vec_index(v: Sequence[int]) -> int:
    return sum((x % 3) * 3 ** i for i, x in enumerate(v))


def index_vec(k: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        out.append(k % 3)
        k //= 3
    return tuple(out)


def affine_space(n: int, max_points: int = 3 ** 8) -> TripleSystem:
    """AG(n, 3): points F_3^n, lines ``{x, y, -x-y}``."""
    if n < 0:
        raise ValueError("dimension must be non-negative")
    size = 3 ** n
    if size > max_points:
        raise ValueError(f"AG({n},3) has {size} points, over the {max_points} limit")
    vecs = [index_vec(k, n) for k in range(size)]
    lines = set()
    for a in range(size):
        for b in range(a + 1, size):
            c = vec_index([-x - y for x, y in zip(vecs[a], vecs[b])])
            lines.add(tuple(sorted((a, b, c))))
    return TripleSystem(size, lines)


def dual_affine_plane() -> TripleSystem:
    """DA(2,2) on points p, q, r, s, t, u = 0 .. 5."""
    p, q, r, s, t, u = range(6)
    return TripleSystem(6, [(p, r, s), (p, t, u), (q, r, t), (q, s, u)])


def fano_plane() -> TripleSystem:
    """PG(2,2); a Steiner triple system that is not a Fischer space."""
    return TripleSystem(7, [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)])


def sym_transpositions(n: int) -> list:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def sym_fischer(n: int) -> TripleSystem:
    """FS(Sym(n), (1,2)^Sym(n)): one line per 3-subset {a, b, c}."""
    if n < 2:
        raise ValueError("sym_fischer needs n >= 2")
    index = {t: k for k, t in enumerate(sym_transpositions(n))}
    lines = []
    for a, b, c in itertools.combinations(range(1, n + 1), 3):
        lines.append((index[a, b], index[a, c], index[b, c]))
    return TripleSystem(len(index), lines)


def disjoint_union(*systems: TripleSystem) -> TripleSystem:
    lines, offset = [], 0
    for s in systems:
        lines.extend(tuple(x + offset for x in line) for line in s.lines)
        offset += s.n_points
    return TripleSystem(offset, lines)


# --- FS(G, D) from involutions ----------------------------------------------------

def conjugacy_closure(gens: Iterable[Sequence[int]]) -> list:
    """The normal closure ``D`` of the generators under conjugation by ``<gens>``.

    Conjugating by the generators alone suffices because they generate G.
    Elements are listed in discovery order.
    """
    gens = [tuple(g) for g in gens]
    if not gens:
        return []
    size = len(gens[0])
    if any(len(g) != size for g in gens):
        raise AxiomError("generators act on domains of different sizes")
    found = list(dict.fromkeys(gens))
    seen = set(found)
    i = 0
    while i < len(found):
        d = found[i]
        for g in gens:
            e = conjugate(d, g)
            if e not in seen:
                seen.add(e)
                found.append(e)
        i += 1
    return found


def check_3_transpositions(D: Sequence[Sequence[int]]) -> None:
    """Raise :class:`AxiomError` unless every element has order 2 and every product order <= 3."""
    for d in D:
        if perm_order(d) != 2:
            raise AxiomError(f"{d} is not an involution")
    for c, d in itertools.combinations(D, 2):
        k = perm_order(compose(c, d))
        if k > 3:
            raise AxiomError(f"product of {c} and {d} has order {k}")


def fischer_from_involutions(gens: Iterable[Sequence[int]]) -> TripleSystem:
    """FS(G, D): points D, lines ``{c, d, c^d}`` whenever ``cd`` has order 3."""
    D = conjugacy_closure(gens)
    check_3_transpositions(D)
    index = {d: k for k, d in enumerate(D)}
    lines = set()
    for c, d in itertools.combinations(D, 2):
        if perm_order(compose(c, d)) == 3:
            lines.add(tuple(sorted((index[c], index[d], index[conjugate(c, d)]))))
    return TripleSystem(len(D), lines)


def noncommuting_components(D: Sequence[Sequence[int]]) -> list:
    """Connected components (as index lists) of the noncommuting graph on ``D``."""
    D = [tuple(d) for d in D]
    parent = list(range(len(D)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in itertools.combinations(range(len(D)), 2):
        if compose(D[i], D[j]) != compose(D[j], D[i]):
            parent[find(i)] = find(j)
    groups = {}
    for i in range(len(D)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def affine_reflection(n: int, v: Sequence[int]) -> tuple:
    """The involution ``x -> v - x`` of F_3^n, i.e. the element (v, -1) of F_3^n x| F_3^*."""
    return tuple(vec_index([a - b for a, b in zip(v, index_vec(k, n))])
                 for k in range(3 ** n))


def affine_as_fs(n: int) -> TripleSystem:
    """FS(F_3^n x| F_3^*, {(v,-1)}) built from the reflections in 0, e_1, ..., e_n."""
    from .incidence import isomorphic

    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    gens = [affine_reflection(n, (0,) * n)] + [affine_reflection(n, e) for e in basis]
    fs = fischer_from_involutions(gens)
    if isomorphic(fs, affine_space(n)) is None:
        raise AssertionError(f"FS of F_3^{n} x| F_3^* is not isomorphic to AG({n},3)")
    return fs


# --- the 81-point Hall triple system --------------------------------------------

def hall_loop_product(x: Sequence[int], y: Sequence[int]) -> tuple:
    """Commutative Moufang loop on F_3^4 with a cubic correction in the last coordinate."""
    x1, x2, x3, x4 = x
    y1, y2, y3, y4 = y
    return ((x1 + y1) % 3, (x2 + y2) % 3, (x3 + y3) % 3,
            (x4 + y4 + (x1 - y1) * (x2 * y3 - x3 * y2)) % 3)


def _build_hall_81() -> TripleSystem:
    lines = set()
    for a in range(81):
        x = index_vec(a, 4)
        for b in range(a + 1, 81):
            y = index_vec(b, 4)
            c = vec_index([-t for t in hall_loop_product(x, y)])
            lines.add(tuple(sorted((a, b, c))))
    return TripleSystem(81, lines)


@cache
def hall_triple_81() -> TripleSystem:
    """The smallest non-affine Hall triple system, with lines ``{x, y, -(x o y)}``.

    Validated on construction: connected, all planes AG(2,3), and the tau
    triple identity fails (so it is not AG(4,3)).
    """
    s = _build_hall_81()
    if len(s.lines) != 81 * 80 // 6:
        raise AssertionError("Hall system: some pair is not collinear")
    if not is_connected(s):
        raise AssertionError("Hall system is disconnected")
    if not is_affine_type(s) or not is_fischer(s, verify=False):
        raise AssertionError("Hall system has a plane other than AG(2,3)")
    if affine_tau_commutation(s) is None:
        raise AssertionError("Hall system satisfies the tau triple identity")
    return s
