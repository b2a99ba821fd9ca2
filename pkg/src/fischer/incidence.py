"""Partial triple systems and the transposition map of a Fischer space.

Points are the integers ``0 .. n_points-1``. Lines are sorted 3-tuples. Every
system keeps an ``n x n`` table ``third[p, q]`` holding the third point of the
line through ``p`` and ``q`` (``-1`` when they are not collinear), so closure,
tau and isomorphism searches never scan the line list.

Permutations (automorphisms, ``tau(p)``) are numpy int arrays ``perm`` with
``perm[x]`` the image of ``x``; ``f[g]`` is "apply ``g`` then ``f``".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np


class TripleSystemError(ValueError):
    """Invalid line data, or a point id out of range."""


class NotFischerError(ValueError):
    """An operation that needs a Fischer space was given something else."""


class TripleSystem:
    """An immutable partial triple system on points ``0 .. n_points-1``."""

    def __init__(self, n_points: int, lines: Iterable[Iterable[int]]):
        n = int(n_points)
        if n < 0:
            raise TripleSystemError("negative point count")
        third = np.full((n, n), -1, dtype=np.int64)
        clean = set()
        for line in lines:
            tri = tuple(sorted(int(p) for p in line))
            if len(tri) != 3 or len(set(tri)) != 3:
                raise TripleSystemError(f"line {tri} does not have 3 distinct points")
            if tri[0] < 0 or tri[2] >= n:
                raise TripleSystemError(f"line {tri} has a point outside 0..{n - 1}")
            if tri in clean:
                raise TripleSystemError(f"duplicate line {tri}")
            for a, b, c in itertools.permutations(tri):
                if third[a, b] != -1:
                    raise TripleSystemError(
                        f"points {a} and {b} lie on two lines ({tri} and a previous one)")
                third[a, b] = c
            clean.add(tri)
        third.setflags(write=False)
        self.n_points = n
        self.lines = tuple(sorted(clean))
        self._third = third
        self._rows = third.tolist()
        self._lines_through = None

    @property
    def third(self) -> np.ndarray:
        """Read-only ``n x n`` third-point table (``-1`` for non-collinear pairs)."""
        return self._third

    def _check_point(self, p):
        if not 0 <= p < self.n_points:
            raise TripleSystemError(f"invalid point id {p}")

    def third_point(self, p: int, q: int) -> Optional[int]:
        self._check_point(p)
        self._check_point(q)
        if p == q:
            raise TripleSystemError("third_point needs two distinct points")
        r = int(self._third[p, q])
        return None if r < 0 else r

    def collinear(self, p: int, q: int) -> bool:
        return p != q and self._third[p, q] >= 0

    def lines_through(self, p: int) -> list:
        if self._lines_through is None:
            acc = [[] for _ in range(self.n_points)]
            for line in self.lines:
                for x in line:
                    acc[x].append(line)
            self._lines_through = acc
        return self._lines_through[p]

    def degrees(self) -> np.ndarray:
        return (self._third >= 0).sum(axis=1) // 2

    def __eq__(self, other):
        if not isinstance(other, TripleSystem):
            return NotImplemented
        return self.n_points == other.n_points and self.lines == other.lines

    def __hash__(self):
        return hash((self.n_points, self.lines))

    def __repr__(self):
        return f"TripleSystem(n_points={self.n_points}, n_lines={len(self.lines)})"


def induced(s: TripleSystem, points: Iterable[int]) -> TripleSystem:
    """The subsystem on ``points`` (relabelled in ascending order) with every line inside it."""
    pts = sorted(set(points))
    index = {p: i for i, p in enumerate(pts)}
    lines = [tuple(index[x] for x in line) for line in s.lines
             if all(x in index for x in line)]
    return TripleSystem(len(pts), lines)


def closure(s: TripleSystem, seed: Iterable[int]) -> frozenset:
    """Smallest point set containing ``seed`` and closed under completing lines."""
    third = s._rows
    members = []
    inside = [False] * s.n_points
    for p in seed:
        s._check_point(p)
        if not inside[p]:
            inside[p] = True
            members.append(p)
    i = 1
    # members[:i] are pairwise closed; extend with members[i]
    while i < len(members):
        p = members[i]
        row = third[p]
        for q in members[:i]:
            r = row[q]
            if r >= 0 and not inside[r]:
                inside[r] = True
                members.append(r)
        i += 1
    return frozenset(members)


def generate_subsystem(s: TripleSystem, seed: Iterable[int]) -> TripleSystem:
    """The subsystem generated by ``seed``, relabelled by ascending original id."""
    return induced(s, closure(s, seed))


@dataclass(frozen=True)
class PlaneClass:
    tag: str  # "DA22", "AG23" or "Other"
    n_points: int
    n_lines: int

    @classmethod
    def of(cls, n_points: int, n_lines: int) -> "PlaneClass":
        if (n_points, n_lines) == (6, 4):
            return cls("DA22", 6, 4)
        if (n_points, n_lines) == (9, 12):
            return cls("AG23", 9, 12)
        return cls("Other", n_points, n_lines)

    def __str__(self):
        if self.tag == "Other":
            return f"Other({self.n_points},{self.n_lines})"
        return self.tag


class Plane(NamedTuple):
    line_pair: tuple
    points: frozenset
    system: TripleSystem
    cls: PlaneClass


def planes(s: TripleSystem) -> list:
    """One entry per unordered pair of distinct lines meeting in a point."""
    out = []
    cache = {}
    for p in range(s.n_points):
        through = s.lines_through(p)
        for l1, l2 in itertools.combinations(through, 2):
            pts = closure(s, set(l1) | set(l2))
            if pts not in cache:
                sub = induced(s, pts)
                cache[pts] = (sub, PlaneClass.of(sub.n_points, len(sub.lines)))
            sub, cls = cache[pts]
            out.append(Plane((l1, l2), pts, sub, cls))
    return out


def is_fischer(s: TripleSystem, verify: bool = True) -> bool:
    """True iff every plane is DA(2,2) or AG(2,3).

    Planes are tagged by their point/line counts; with ``verify`` every
    distinct plane is also matched against a reference copy by a full
    isomorphism search.
    """
    from .constructions import affine_space, dual_affine_plane

    refs = {"DA22": dual_affine_plane(), "AG23": affine_space(2)}
    seen = set()
    for plane in planes(s):
        if plane.cls.tag == "Other":
            return False
        if verify and plane.points not in seen:
            seen.add(plane.points)
            if isomorphic(plane.system, refs[plane.cls.tag]) is None:
                return False
    return True


def is_affine_type(s: TripleSystem) -> bool:
    return all(plane.cls.tag == "AG23" for plane in planes(s))


def connected_components(s: TripleSystem) -> list:
    """Classes of the equivalence relation generated by collinearity."""
    seen = np.zeros(s.n_points, dtype=bool)
    comps = []
    third = s.third
    for start in range(s.n_points):
        if seen[start]:
            continue
        seen[start] = True
        comp, stack = [start], [start]
        while stack:
            p = stack.pop()
            for q in np.flatnonzero(third[p] >= 0):
                if not seen[q]:
                    seen[q] = True
                    comp.append(int(q))
                    stack.append(int(q))
        comps.append(sorted(comp))
    return comps


def is_connected(s: TripleSystem) -> bool:
    return len(connected_components(s)) <= 1


# --- rank ---------------------------------------------------------------------

@dataclass(frozen=True)
class Rank:
    """Minimum generating-set size: ``exact`` or a bracket ``[value, upper]``."""

    kind: str  # "exact", "at_least" or "unknown"
    value: int
    upper: Optional[int] = None

    def __str__(self):
        if self.kind == "exact":
            return str(self.value)
        return f">={self.value} (<= {self.upper})"


def greedy_generators(s: TripleSystem, first: int = 0) -> list:
    """A generating sequence built by repeatedly adding the least point outside the closure."""
    if s.n_points == 0:
        return []
    gens = [first]
    got = closure(s, gens)
    while len(got) < s.n_points:
        p = min(set(range(s.n_points)) - got)
        gens.append(p)
        got = closure(s, gens)
    return gens


def _tau_transitive(s: TripleSystem) -> bool:
    if not is_connected(s):
        return False
    return all(is_automorphism(s, tau(s, p)) for p in range(s.n_points))


def rank(s: TripleSystem, cap: int = 10**7) -> Rank:
    """Minimum size of a generating point set.

    Search is iterative deepening on the set size over increasing point
    sequences in which every point lies outside the closure of the earlier
    ones. When tau acts by automorphisms on a connected system the group it
    generates is point-transitive, so the first point is fixed to 0.
    ``cap`` bounds the number of closures; on exhaustion the answer is the
    certified lower bound with a greedy upper bound.
    """
    if s.n_points == 0:
        return Rank("exact", 0)
    comps = connected_components(s)
    if len(comps) > 1:
        parts = [rank(induced(s, c), cap) for c in comps]
        total = sum(r.value for r in parts)
        if all(r.kind == "exact" for r in parts):
            return Rank("exact", total)
        upper = sum(r.upper if r.upper is not None else r.value for r in parts)
        return Rank("at_least", total, upper)

    n = s.n_points
    upper = len(greedy_generators(s))
    starts = [0] if _tau_transitive(s) else range(n)
    budget = [cap]

    def search(gens, got, k):
        if len(gens) == k:
            return len(got) == n
        lo = gens[-1] + 1
        for p in range(lo, n):
            if p in got:
                continue
            if budget[0] <= 0:
                raise _CapHit
            budget[0] -= 1
            if search(gens + [p], closure(s, gens + [p]), k):
                return True
        return False

    for k in range(1, upper):
        try:
            for p0 in starts:
                if search([p0], closure(s, [p0]), k):
                    return Rank("exact", k)
        except _CapHit:
            return Rank("at_least", k, upper)
    return Rank("exact", upper)


class _CapHit(Exception):
    pass


# --- tau ------------------------------------------------------------------------

def tau(s: TripleSystem, p: int, check: bool = False) -> np.ndarray:
    """The transposition of ``p``: fixes points off the lines through ``p``, swaps the rest in pairs."""
    s._check_point(p)
    row = s.third[p]
    perm = np.where(row >= 0, row, np.arange(s.n_points))
    if check and not is_automorphism(s, perm):
        raise NotFischerError(f"tau({p}) is not an automorphism")
    return perm


def tau_table(s: TripleSystem) -> np.ndarray:
    """Row ``p`` is ``tau(p)``."""
    idx = np.arange(s.n_points)
    return np.where(s.third >= 0, s.third, idx[None, :])


def is_automorphism(s: TripleSystem, perm: Sequence[int]) -> bool:
    perm = np.asarray(perm)
    if sorted(perm.tolist()) != list(range(s.n_points)):
        return False
    if not s.lines:
        return True
    lines = np.asarray(s.lines)
    img = perm[lines]
    return bool(np.all(s.third[img[:, 0], img[:, 1]] == img[:, 2]))


@dataclass
class TauAxiomReport:
    ok: bool
    automorphisms: bool
    involutions: bool
    noncollinear_commute: bool
    collinear_braid: bool
    equivariance: bool
    failure: Optional[tuple] = None  # (axiom name, p, q)


def tau_axiom_check(s: TripleSystem) -> TauAxiomReport:
    """Check tau(p) is an involutive automorphism and the three pairwise tau identities."""
    n = s.n_points
    T = tau_table(s)
    flags = dict(automorphisms=True, involutions=True, noncollinear_commute=True,
                 collinear_braid=True, equivariance=True)
    failure = None

    def fail(name, p, q=None):
        nonlocal failure
        flags[name] = False
        if failure is None:
            failure = (name, p, q)

    idx = np.arange(n)
    for p in range(n):
        if not is_automorphism(s, T[p]):
            fail("automorphisms", p)
        if not np.array_equal(T[p][T[p]], idx):
            fail("involutions", p)
    collinear = s.third >= 0
    for q in range(n):
        tq = T[q]
        # conj[p] = tau(q) tau(p) tau(q), i.e. tau(p)^tau(q)
        conj = tq[T[:, tq]]
        # braid[p] = tau(p) tau(q) tau(p)
        braid = np.take_along_axis(T, tq[T], axis=1)
        # tp_tq[p] = tau(p) tau(q); tq_tp[p] = tau(q) tau(p)
        commute_ok = np.all(T[:, tq] == tq[T], axis=1)
        braid_ok = np.all(conj == braid, axis=1)
        equi_ok = np.all(T[tq] == conj, axis=1)
        for p in range(n):
            if p == q:
                continue
            if collinear[p, q]:
                if not braid_ok[p]:
                    fail("collinear_braid", p, q)
            elif not commute_ok[p]:
                fail("noncollinear_commute", p, q)
            if not equi_ok[p]:
                fail("equivariance", p, q)
    return TauAxiomReport(ok=all(flags.values()), failure=failure, **flags)


def affine_tau_commutation(s: TripleSystem) -> Optional[tuple]:
    """First triple ``(x, y, z)`` (lexicographic) with tau(x)tau(y)tau(z) != tau(z)tau(y)tau(x).

    Returns ``None`` when the identity holds for all triples.
    """
    T = tau_table(s)
    n = s.n_points
    for x in range(n):
        for y in range(n):
            xy = T[x][T[y]]          # tau(x) tau(y)
            yx = T[y][T[x]]          # tau(y) tau(x)
            left = xy[T]             # row z: tau(x) tau(y) tau(z)
            right = T[:, yx]         # row z: tau(z) tau(y) tau(x)
            bad = np.flatnonzero(np.any(left != right, axis=1))
            if bad.size:
                return (x, y, int(bad[0]))
    return None


# --- isomorphism -----------------------------------------------------------------

ISOMORPHISM_LIMIT = 100


def invariants(s: TripleSystem) -> tuple:
    """Cheap isomorphism invariants, including whether the tau triple identity holds."""
    comps = sorted(len(c) for c in connected_components(s))
    degs = tuple(sorted(s.degrees().tolist()))
    return (s.n_points, len(s.lines), degs, tuple(comps),
            affine_tau_commutation(s) is None)


def isomorphic(s1: TripleSystem, s2: TripleSystem,
               limit: int = ISOMORPHISM_LIMIT) -> Optional[np.ndarray]:
    """A bijection ``f`` (``f[p]`` = image of p) carrying lines onto lines, or ``None``.

    Backtracking over a generating sequence of ``s1``; each choice is
    propagated through the third-point table, so only generator images
    branch. Candidates must match degree.
    """
    if s1.n_points > limit or s2.n_points > limit:
        raise ValueError(f"isomorphism search limited to {limit} points")
    if (s1.n_points, len(s1.lines)) != (s2.n_points, len(s2.lines)):
        return None
    if invariants(s1) != invariants(s2):
        return None
    n = s1.n_points
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    t1, t2 = s1.third, s2.third
    d1, d2 = s1.degrees(), s2.degrees()

    # generators in decreasing-degree order, each outside the closure of the previous
    order = sorted(range(n), key=lambda p: (-d1[p], p))
    gens, got = [], frozenset()
    for p in order:
        if p not in got:
            gens.append(p)
            got = closure(s1, gens)
    f = np.full(n, -1, dtype=np.int64)
    finv = np.full(n, -1, dtype=np.int64)
    mapped = []

    def assign(p, c, trail):
        if finv[c] != -1 or d1[p] != d2[c]:
            return False
        f[p], finv[c] = c, p
        trail.append(p)
        mapped.append(p)
        queue = [p]
        while queue:
            a = queue.pop()
            fa = f[a]
            for b in list(mapped):
                if b == a:
                    continue
                t = t1[a, b]
                u = t2[fa, f[b]]
                if (t < 0) != (u < 0):
                    return False
                if t < 0:
                    continue
                if f[t] >= 0:
                    if f[t] != u:
                        return False
                elif finv[u] >= 0 or d1[t] != d2[u]:
                    return False
                else:
                    f[t], finv[u] = u, t
                    trail.append(int(t))
                    mapped.append(int(t))
                    queue.append(int(t))
        return True

    def undo(trail):
        for p in trail:
            finv[f[p]] = -1
            f[p] = -1
        del mapped[len(mapped) - len(trail):]

    def search(i):
        if i == len(gens):
            return True
        p = gens[i]
        if f[p] >= 0:
            return search(i + 1)
        for c in range(n):
            if finv[c] >= 0 or d1[p] != d2[c]:
                continue
            trail = []
            if assign(p, c, trail) and search(i + 1):
                return True
            undo(trail)
        return False

    # the recursion depth equals the number of generators, so no stack concern
    if not search(0):
        return None
    if not is_isomorphism(s1, s2, f):
        raise AssertionError("isomorphism search produced an invalid map")
    return f.copy()


def is_isomorphism(s1: TripleSystem, s2: TripleSystem, f: Sequence[int]) -> bool:
    f = np.asarray(f)
    if s1.n_points != s2.n_points or len(s1.lines) != len(s2.lines):
        return False
    if sorted(f.tolist()) != list(range(s2.n_points)):
        return False
    image = {tuple(sorted(int(f[x]) for x in line)) for line in s1.lines}
    return image == set(s2.lines)
