"""Words over {1..n} presenting AG(n-1, 3), and their reduction to normal form.

A word ``(i_-1, i_1, ..., i_m)`` stands for the point ``q_{i_-1}`` moved in
turn by the transpositions of ``q_{i_1}``, ..., ``q_{i_m}``. Words are stored
as tuples with the head symbol ``i_-1`` at index 0 and ``i_k`` at index ``k``.
Index 0 therefore has odd parity, and indices 0 and 1 are "two apart"; the
odd chain is ``0, 1, 3, 5, ...`` and the even chain ``2, 4, 6, ...``.
Equivalence moves only ever swap neighbours within a chain.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .incidence import TripleSystem, is_isomorphism, tau_table
from .constructions import affine_space, vec_index


class ReductionError(RuntimeError):
    """The staged reduction did not reach a normal form within its step bound."""


Word = tuple


def rho_apply(y: Sequence[int], x: Sequence[int]) -> Word:
    """``rho(y)(x)``: x, then the tail of y reversed, the head of y, the tail of y."""
    y = tuple(y)
    tail = y[1:]
    return tuple(x) + tail[::-1] + y[:1] + tail


def apply_rhos(ys: Iterable[Sequence[int]], x: Sequence[int]) -> Word:
    """Apply ``rho(y)`` for each ``y`` in order (the first one acts first)."""
    w = tuple(x)
    for y in ys:
        w = rho_apply(y, w)
    return w


def elementary_equivalence(kind: int, xs: Sequence[Sequence[int]]) -> tuple:
    """The pair of words related by generating equivalence ``kind`` (1-4) for ``x_1..x_k``.

    1: rho(x_k)..rho(x_1)(x_1) ~ rho(x_k)..rho(x_2)(x_1)
    2: rho(x_k)..rho(x_2)rho(x_2)(x_1) ~ rho(x_k)..rho(x_3)(x_1)
    3: rho(x_k)..rho(x_2)(x_1) ~ rho(x_k)..rho(x_3)rho(x_1)(x_2)
    4: rho(x_k)..rho(x_2)(x_1) ~ rho(x_k)..rho(x_5)rho(x_2)rho(x_3)rho(x_4)(x_1)
    """
    xs = [tuple(x) for x in xs]
    k = len(xs)
    if kind == 1:
        return apply_rhos(xs, xs[0]), apply_rhos(xs[1:], xs[0])
    if kind == 2 and k >= 2:
        return apply_rhos([xs[1]] + xs[1:], xs[0]), apply_rhos(xs[2:], xs[0])
    if kind == 3 and k >= 2:
        return apply_rhos(xs[1:], xs[0]), apply_rhos([xs[0]] + xs[2:], xs[1])
    if kind == 4 and k >= 4:
        return (apply_rhos(xs[1:], xs[0]),
                apply_rhos([xs[3], xs[2], xs[1]] + xs[4:], xs[0]))
    raise ValueError(f"equivalence {kind} needs more words than {k}")


# --- chains and membership ---------------------------------------------------------

def odd_chain(length: int) -> list:
    return [i for i in range(length) if i == 0 or i % 2 == 1]


def even_chain(length: int) -> list:
    return list(range(2, length, 2))


def is_normal(w: Sequence[int]) -> bool:
    """Membership in the normal-form set S_n (for any n >= max symbol)."""
    w = tuple(w)
    if not w or min(w) < 1:
        return False
    odd = [w[i] for i in odd_chain(len(w))]
    even = [w[i] for i in even_chain(len(w))]
    if odd != sorted(odd) or even != sorted(even):
        return False
    counts = {}
    for s in w:
        counts[s] = counts.get(s, 0) + 1
    if max(counts.values()) > 2:
        return False
    top = max(odd)
    for s, c in counts.items():
        if c == 2:
            # both copies in the even chain (sorted, hence adjacent), above all odd symbols
            if even.count(s) != 2 or s <= top:
                return False
    return True


# --- the four invariance moves -------------------------------------------------------

def _move_swap(w: list, a: int, b: int) -> None:
    """Move (1): swap entries two apart within a chain."""
    pa = -1 if a == 0 else a
    pb = -1 if b == 0 else b
    assert pb == pa + 2, (a, b)
    w[a], w[b] = w[b], w[a]


def _move_head(w: list) -> None:
    """Move (2): ``(s, s, ...) -> (s, ...)``."""
    assert len(w) >= 2 and w[0] == w[1]
    del w[1]


def _move_cancel(w: list, j: int) -> None:
    """Move (3): drop an adjacent equal pair at indices ``j, j+1`` (``j >= 1``)."""
    assert j >= 1 and w[j] == w[j + 1]
    del w[j:j + 2]


def _move_braid(w: list, j: int) -> None:
    """Move (4): ``(a, b, a) -> (b, a, b)`` at indices ``j, j+1, j+2`` (``j >= 1``)."""
    assert j >= 1 and w[j] == w[j + 2]
    a, b = w[j], w[j + 1]
    w[j:j + 3] = [b, a, b]


def _bubble(w: list, chain: list, src: int, dst: int) -> int:
    """Shift the entry at chain slot ``src`` to slot ``dst`` with move (1); returns steps."""
    step = 1 if dst > src else -1
    for k in range(src, dst, step):
        _move_swap(w, chain[min(k, k + step)], chain[max(k, k + step)])
    return abs(dst - src)


def _slots(w: list, chain: list, s: int) -> list:
    return [k for k, i in enumerate(chain) if w[i] == s]


def reduce(word: Sequence[int], max_steps: int | None = None) -> Word:
    """Reduce ``word`` to the equivalent member of S_n using only moves (1)-(4).

    Stages: shorten while some symbol repeats illegally (three copies, a
    copy in each chain, or two copies in the odd chain); then lift every
    doubled even symbol above the odd symbols by braiding; finally sort
    both chains.
    """
    w = list(word)
    if not w:
        raise ValueError("empty word")
    if max_steps is None:
        max_steps = 50 * (len(w) + 1) ** 2 + 1000
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise ReductionError(f"no normal form for {tuple(word)} within {max_steps} steps")
        odd, even = odd_chain(len(w)), even_chain(len(w))
        odd_syms = [w[i] for i in odd]
        even_syms = [w[i] for i in even]
        counts = {}
        for s in w:
            counts[s] = counts.get(s, 0) + 1
        # prefer moves that shorten; within a move kind, symbols seen three times first
        order = sorted(counts, key=lambda s: (counts[s] < 3, s))
        done = False
        for kind in ("cancel", "head", "braid"):
            for s in order:
                in_odd, in_even = odd_syms.count(s), even_syms.count(s)
                if kind == "cancel" and in_odd and in_even:
                    # odd copy to index 1, even copy to index 2
                    _bubble(w, odd, _slots(w, odd, s)[0], 1)
                    _bubble(w, even, _slots(w, even, s)[0], 0)
                    _move_cancel(w, 1)
                elif kind == "head" and in_odd >= 2:
                    _bubble(w, odd, _slots(w, odd, s)[0], 0)
                    _bubble(w, odd, _slots(w, odd, s)[1], 1)
                    _move_head(w)
                elif kind == "braid" and in_even >= 3:
                    # moves s into the odd chain; the next round cancels it
                    _bubble(w, even, _slots(w, even, s)[0], 0)
                    _bubble(w, even, _slots(w, even, s)[1], 1)
                    _move_braid(w, 2)
                else:
                    continue
                done = True
                break
            if done:
                break
        if done:
            continue
        top = max(odd_syms)
        low = sorted(s for s in set(even_syms) if even_syms.count(s) == 2 and s < top)
        if low:
            s = low[0]
            _bubble(w, even, _slots(w, even, s)[0], 0)
            _bubble(w, even, _slots(w, even, s)[1], 1)
            _bubble(w, odd, _slots(w, odd, top)[0], 2)
            _move_braid(w, 2)
            continue
        break
    for chain in (odd_chain(len(w)), even_chain(len(w))):
        for i in range(len(chain)):
            for k in range(len(chain) - 1 - i):
                if w[chain[k]] > w[chain[k + 1]]:
                    _move_swap(w, chain[k], chain[k + 1])
    out = tuple(w)
    if not is_normal(out):
        raise ReductionError(f"reduction of {tuple(word)} ended at non-normal {out}")
    return out


# --- normal forms and counting --------------------------------------------------------

def _assemble(odd: list, even: list) -> Word:
    length = len(odd) + len(even)
    w = [0] * length
    for i, s in zip(odd_chain(length), odd):
        w[i] = s
    for i, s in zip(even_chain(length), even):
        w[i] = s
    return tuple(w)


def enumerate_normal(n: int) -> list:
    """All of S_n, generated directly: each symbol is absent, odd, even once or even twice.

    Sorted by length, then lexicographically.
    """
    if not 1 <= n <= 8:
        raise ValueError("enumerate_normal supports 1 <= n <= 8")
    out = []
    for states in itertools.product(range(4), repeat=n):
        odd = [s for s, st in zip(range(1, n + 1), states) if st == 1]
        if not odd:
            continue
        once = [s for s, st in zip(range(1, n + 1), states) if st == 2]
        twice = [s for s, st in zip(range(1, n + 1), states) if st == 3]
        if twice and min(twice) <= max(odd):
            continue
        even = sorted(once + twice + twice)
        if len(odd) - len(even) not in (1, 2):
            continue
        out.append(_assemble(odd, even))
    out.sort(key=lambda w: (len(w), w))
    return out


def count_T(n: int, k: int) -> int:
    """Number of S_n members whose symbol set is exactly {1..k}."""
    if not 1 <= k <= n:
        raise ValueError("count_T needs 1 <= k <= n")
    target = set(range(1, k + 1))
    return sum(1 for w in enumerate_normal(n) if set(w) == target)


def T_closed_form(k: int) -> int:
    return (2 ** k - (-1) ** k) // 3


# --- the point a word stands for in F_3^(n-1) ------------------------------------------

def basis_vector(i: int, n: int) -> tuple:
    """``e_i`` in F_3^(n-1), with ``e_n = 0``."""
    return tuple(int(j == i - 1) for j in range(n - 1))


def word_vector(w: Sequence[int], n: int) -> tuple:
    """Image of ``w`` in AG(n-1,3): start at ``e_{i_-1}``, reflect ``v -> -v - e_s`` per symbol."""
    v = basis_vector(w[0], n)
    for s in w[1:]:
        e = basis_vector(s, n)
        v = tuple((-a - b) % 3 for a, b in zip(v, e))
    return v


# --- (Q_n, M_n) ----------------------------------------------------------------------------

@dataclass
class QSpace:
    n: int
    words: list          # normal-form representatives, point k is words[k]
    index: dict          # word -> point id
    sigma: np.ndarray    # sigma[q, p] = point id of p^sigma(q)
    system: TripleSystem


def build_q(n: int) -> QSpace:
    """Points: normal forms; ``sigma(q)(p) = reduce(rho(q)(p))``; lines ``{p, q, p^sigma(q)}``."""
    if not 1 <= n <= 6:
        raise ValueError("build_q supports 1 <= n <= 6")
    words = enumerate_normal(n)
    index = {w: k for k, w in enumerate(words)}
    size = len(words)
    sigma = np.zeros((size, size), dtype=np.int64)
    for q, wq in enumerate(words):
        for p, wp in enumerate(words):
            r = reduce(rho_apply(wq, wp))
            if r not in index:
                raise ReductionError(f"reduced word {r} is not an enumerated normal form")
            sigma[q, p] = index[r]
    lines = set()
    for q in range(size):
        for p in range(size):
            r = int(sigma[q, p])
            if p != q and r not in (p, q):
                lines.add(tuple(sorted((p, q, r))))
    sigma.setflags(write=False)
    return QSpace(n, words, index, sigma, TripleSystem(size, lines))


@dataclass
class Prop1Report:
    n: int
    bijective: bool
    lines_preserved: bool
    generators_consistent: bool
    generator_images: dict   # symbol i -> AG point id of q_i
    mapping: list            # Q point id -> AG point id

    @property
    def ok(self) -> bool:
        return self.bijective and self.lines_preserved and self.generators_consistent


def prop1_check(n: int, q: QSpace | None = None) -> Prop1Report:
    """Check the generator map ``q_i -> e_i`` (``e_n = 0``) extends to an isomorphism Q_n -> AG(n-1,3).

    Every normal word ``(i_-1, i_1, ..., i_m)`` is rebuilt in Q_n from
    ``q_{i_-1}`` by the sigma table of the generators, and sent to
    ``e_{i_-1}`` moved by tau(e_{i_1}), ..., tau(e_{i_m}) in AG(n-1,3).
    """
    if not 1 <= n <= 5:
        raise ValueError("prop1_check supports 1 <= n <= 5")
    q = q or build_q(n)
    ag = affine_space(n - 1)
    T = tau_table(ag)
    gen_q = {i: q.index[(i,)] for i in range(1, n + 1)}
    gen_ag = {i: vec_index(basis_vector(i, n)) for i in range(1, n + 1)}
    mapping = []
    consistent = True
    for k, w in enumerate(q.words):
        pq, pa = gen_q[w[0]], gen_ag[w[0]]
        for s in w[1:]:
            pq = int(q.sigma[gen_q[s], pq])
            pa = int(T[gen_ag[s], pa])
        consistent &= pq == k
        mapping.append(pa)
    bijective = sorted(mapping) == list(range(ag.n_points))
    preserved = bijective and is_isomorphism(q.system, ag, mapping)
    return Prop1Report(n, bijective, preserved, consistent, gen_ag, mapping)


def S_size(n: int) -> int:
    return 3 ** (n - 1)


def S_size_from_T(n: int) -> int:
    """Sum over k of C(n, k) |T_k| using the closed form for |T_k|."""
    return sum(math.comb(n, k) * T_closed_form(k) for k in range(1, n + 1))
