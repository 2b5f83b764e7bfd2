"""Contractibility by lazily building the relevant region in the universal cover.

The lifted radial graph is stored through its dual: one arena slot per face
of the region, each with three uninitialised tables of ``r`` integers
(``index``, ``rev``, ``nbr``).  A ``count`` per vertex plus the round-trip
check makes whatever garbage the tables hold harmless, so allocating a vertex
costs O(1).  The arena is ``np.empty`` memory and is never cleared.

Edge labels are the radial edge ids ``0..r-1``.  The face of the radial graph
between labels ``W`` and ``W+1`` at a ``t``-vertex ``T`` is the quadrilateral

    T -W- Sa -Pa- T' -Pb- Sb -(W+1)- T,   Pa = a_next[W], Pb = b_next[W]

where opposite sides are siblings.  Seen from ``T'`` the same face sits
between ``partner[W]`` and ``partner[W] + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .oracle import klein_normal_form
from .reduction import Preprocessed, RadialGraph, RadialWalk, expand_terms, encode_walk

__all__ = [
    "NONE",
    "S_TYPE",
    "T_TYPE",
    "RegionBoundError",
    "LazyLiftedGraph",
    "RelevantRegion",
    "build_region",
    "boundary_profile",
    "lift_walk",
    "is_contractible",
    "special_small",
    "small_surface_form",
]

NONE = -1
S_TYPE = 0
T_TYPE = 1

# kernel status codes
_DONE = 0
_GROW = 1
_BOUND = 2


class RegionBoundError(AssertionError):
    """The relevant region outgrew ``max(5 * crossings, 1)`` faces."""


# -- O(1) table primitives ---------------------------------------------------


@njit(cache=True, inline="always")
def _next(r, count, index, rev, nbr, v, e):
    k = rev[v * r + e]
    if 0 <= k < count[v] and index[v * r + k] == e:
        return nbr[v * r + k]
    return NONE


@njit(cache=True, inline="always")
def _half_join(r, count, index, rev, nbr, v, w, e):
    c = count[v]
    index[v * r + c] = e
    rev[v * r + e] = c
    nbr[v * r + c] = w
    count[v] = c + 1


@njit(cache=True, inline="always")
def _new(vtype, count, n_used, x):
    vtype[n_used] = x
    count[n_used] = 0
    return n_used


@njit(cache=True)
def _mirror(r, a_next, b_next, partner, same, vtype, count, index, rev, nbr, n_used, v, e):
    """Reflect the chain of boundary faces across the line crossed by ``(v, e)``.

    Returns the new number of used arena slots.
    """
    w = _new(vtype, count, n_used, 1 - vtype[v])
    n_used += 1
    _half_join(r, count, index, rev, nbr, v, w, e)
    _half_join(r, count, index, rev, nbr, w, v, e)
    for side in range(2):
        # quad W in the frame of e's t-endpoint; e is its side W (is_a) or W+1
        if side == 0:
            W = e
            is_a = True
        else:
            W = (e - 1) % r
            is_a = False
        cv = v
        cw = w
        while True:
            ta = W
            tb = (W + 1) % r
            pa = a_next[W]
            pb = b_next[W]
            at_t = vtype[cv] == 1
            if is_a:
                if at_t:
                    e0, e1, e2 = tb, pb, pa
                else:
                    e0, e1, e2 = pa, pb, tb
            else:
                if at_t:
                    e0, e1, e2 = ta, pa, pb
                else:
                    e0, e1, e2 = pb, pa, ta
            v1 = _next(r, count, index, rev, nbr, cv, e0)
            if v1 == NONE:
                break
            w1 = _new(vtype, count, n_used, vtype[cv])
            n_used += 1
            _half_join(r, count, index, rev, nbr, v1, w1, e1)
            _half_join(r, count, index, rev, nbr, w1, v1, e1)
            _half_join(r, count, index, rev, nbr, w1, cw, e2)
            _half_join(r, count, index, rev, nbr, cw, w1, e2)
            # re-express the far side of the quad from the frame of T'
            e1_is_a = is_a != same[W]
            wp = partner[W]
            if e1_is_a:
                W = (wp - 1) % r
                is_a = False
            else:
                W = (wp + 1) % r
                is_a = True
            cv = v1
            cw = w1
    return n_used


@njit(cache=True)
def _lift_kernel(
    labels, pos, cur, a_next, b_next, partner, same, r,
    vtype, count, index, rev, nbr, n_used, path, check_bound, bound_offset,
):
    """Lift ``labels[pos:]`` starting at vertex ``cur``.

    Stops early with ``_GROW`` when the arena might not hold the next mirror.
    ``path[i + 1]`` receives the lift endpoint after step ``i``.
    """
    cap = vtype.shape[0]
    n = labels.shape[0]
    while pos < n:
        e = labels[pos]
        nv = _next(r, count, index, rev, nbr, cur, e)
        if nv == NONE:
            # a mirror adds at most as many faces as the region already has
            if 2 * n_used + 2 > cap:
                return _GROW, pos, cur, n_used
            n_used = _mirror(r, a_next, b_next, partner, same, vtype, count, index, rev, nbr, n_used, cur, e)
            nv = _next(r, count, index, rev, nbr, cur, e)
        cur = nv
        pos += 1
        path[pos] = cur
        if check_bound:
            crossings = pos + bound_offset
            if n_used > max(5 * crossings, 1):
                return _BOUND, pos, cur, n_used
    return _DONE, pos, cur, n_used


# -- Python-facing structure ---------------------------------------------


class LazyLiftedGraph:
    """Arena of lifted vertices with O(1) ``new``/``type``/``join``/``next``."""

    def __init__(self, r: int, capacity: int = 16):
        self.r = r
        self.n_used = 0
        self._alloc(max(capacity, 2))

    def _alloc(self, cap: int) -> None:
        # labels and slots fit a byte for every practical face degree
        small = np.int8 if self.r <= 127 else np.int32
        self.vtype = np.empty(cap, dtype=np.int8)
        self.count = np.empty(cap, dtype=small)
        self.index = np.empty(cap * self.r, dtype=small)
        self.rev = np.empty(cap * self.r, dtype=small)
        self.nbr = np.empty(cap * self.r, dtype=np.int32)

    @property
    def capacity(self) -> int:
        return self.vtype.shape[0]

    def grow(self, need: int) -> None:
        cap = self.capacity
        while cap < need:
            cap *= 2
        if cap == self.capacity:
            return
        old = (self.vtype, self.count, self.index, self.rev, self.nbr)
        self._alloc(cap)
        n, nr = self.n_used, self.n_used * self.r
        self.vtype[:n] = old[0][:n]
        self.count[:n] = old[1][:n]
        self.index[:nr] = old[2][:nr]
        self.rev[:nr] = old[3][:nr]
        self.nbr[:nr] = old[4][:nr]

    def reset(self) -> None:
        """Forget every vertex; table contents are left as garbage."""
        self.n_used = 0

    def __len__(self) -> int:
        return self.n_used

    def new_vertex(self, x: int) -> int:
        if self.n_used == self.capacity:
            self.grow(self.n_used + 1)
        v = self.n_used
        self.vtype[v] = x
        self.count[v] = 0
        self.n_used += 1
        return v

    def type(self, v: int) -> int:
        return int(self.vtype[v])

    def next(self, v: int, e: int) -> int:
        return int(_next(self.r, self.count, self.index, self.rev, self.nbr, v, e))

    def join(self, v: int, w: int, e: int) -> None:
        if self.vtype[v] == self.vtype[w]:
            raise ValueError("join needs vertices of different type")
        if self.next(v, e) != NONE or self.next(w, e) != NONE:
            raise ValueError(f"edge {e} already joined at one endpoint")
        _half_join(self.r, self.count, self.index, self.rev, self.nbr, v, w, e)
        _half_join(self.r, self.count, self.index, self.rev, self.nbr, w, v, e)

    def neighbours(self, v: int) -> list[tuple[int, int]]:
        """``(label, neighbour)`` pairs of every edge joined at ``v``."""
        base = v * self.r
        return [
            (int(self.index[base + k]), int(self.nbr[base + k])) for k in range(self.count[v])
        ]

    def mirror(self, rad: RadialGraph, v: int, e: int) -> None:
        if self.next(v, e) != NONE:
            raise ValueError("mirror needs an edge leaving the region")
        self.grow(2 * self.n_used + 2)
        self.n_used = int(_mirror(
            self.r, _arr(rad.a_next), _arr(rad.b_next), _arr(rad.partner),
            np.asarray(rad.same, dtype=np.bool_),
            self.vtype, self.count, self.index, self.rev, self.nbr, self.n_used, v, e,
        ))


_ARR_CACHE: dict[int, tuple] = {}


def _arr(seq) -> np.ndarray:
    return np.asarray(seq, dtype=np.int32)


def _radial_arrays(rad: RadialGraph):
    key = id(rad)
    hit = _ARR_CACHE.get(key)
    if hit is None or hit[0] is not rad:
        hit = (
            rad,
            _arr(rad.a_next), _arr(rad.b_next), _arr(rad.partner),
            np.asarray(rad.same, dtype=np.bool_),
        )
        _ARR_CACHE[key] = hit
    return hit[1:]


@dataclass
class RelevantRegion:
    """Dual graph of the relevant region of a lifted radial walk.

    ``path[i]`` is the lift endpoint after ``i`` steps; ``path[0]`` is the
    start.  ``face_count`` is the number of faces of the universal cover in
    the region, one per arena vertex.
    """

    graph: LazyLiftedGraph
    start: int
    end: int
    steps: int
    path: np.ndarray

    @property
    def face_count(self) -> int:
        return self.graph.n_used

    @property
    def closed(self) -> bool:
        return self.start == self.end


def lift_walk(
    labels,
    rad: RadialGraph,
    graph: LazyLiftedGraph | None = None,
    start: int | None = None,
    check_bound: bool = True,
    prior_crossings: int = 0,
) -> RelevantRegion:
    """Lift a radial walk, growing the region as lines are crossed.

    With ``graph`` and ``start`` given, the lift continues inside an existing
    region built by ``prior_crossings`` earlier steps; the face bound counts
    those steps too.
    """
    r = rad.r
    if r < 6:
        raise ValueError("the tiling engine needs r >= 6; use special_small")
    labels = np.ascontiguousarray(labels, dtype=np.int32)
    n = labels.shape[0]
    if graph is None:
        graph = LazyLiftedGraph(r, capacity=max(16, 4 * n + 2))
    if start is None:
        start = graph.new_vertex(S_TYPE)
    a_next, b_next, partner, same = _radial_arrays(rad)
    path = np.empty(n + 1, dtype=np.int32)
    path[0] = start
    pos, cur = 0, start
    while True:
        status, pos, cur, n_used = _lift_kernel(
            labels, pos, cur, a_next, b_next, partner, same, r,
            graph.vtype, graph.count, graph.index, graph.rev, graph.nbr,
            graph.n_used, path, check_bound, prior_crossings,
        )
        graph.n_used = int(n_used)
        if status == _GROW:
            graph.grow(2 * graph.n_used + 2)
            continue
        if status == _BOUND:
            raise RegionBoundError(
                f"region has {graph.n_used} faces after {pos} crossings"
            )
        break
    return RelevantRegion(graph, int(start), int(cur), n, path)


def build_region(walk: RadialWalk, rad: RadialGraph, check_bound: bool = True) -> RelevantRegion:
    return lift_walk(walk.labels, rad, check_bound=check_bound)


def boundary_profile(region: RelevantRegion, rad: RadialGraph) -> tuple[int, int]:
    """``(longest run of boundary edges on one face, convex boundary vertices)``.

    A face's boundary edges are the labels with no neighbour in the region.
    A boundary vertex is convex when both edges of a corner are boundary
    edges, i.e. the corner touches no other face of the region.
    """
    g = region.graph
    orders = {S_TYPE: rad.s_rotation(), T_TYPE: list(range(rad.r))}
    best = 0
    convex = 0
    for v in range(g.n_used):
        order = orders[g.type(v)]
        out = [g.next(v, e) == NONE for e in order]
        if all(out):
            return rad.r, rad.r
        # rotate so the cyclic runs do not wrap
        k = out.index(False)
        out = out[k:] + out[:k]
        run = 0
        for flag in out:
            run = run + 1 if flag else 0
            if run > best:
                best = run
            if flag and run >= 2:
                convex += 1
    return best, convex


# -- small surfaces ----------------------------------------------------------


def small_surface_form(word, relator) -> tuple:
    """Invariant of a word over a presentation with relator length at most 4.

    Returns ``()`` (sphere), ``(n mod 2,)`` (projective plane), exponent sums
    (torus) or the Klein bottle normal form ``(u, v)`` of ``a^u b^v``.
    The word is trivial iff every entry is zero.
    """
    rel = tuple(relator)
    if not rel:
        return ()
    gens = sorted({abs(x) for x in rel})
    if len(rel) == 2:
        return (sum(1 if x > 0 else -1 for x in word) % 2,)
    orientable = all(-x in rel for x in rel)
    if orientable:
        return tuple(sum((1 if x > 0 else -1) for x in word if abs(x) == g) for g in gens)
    sub = _klein_substitution(rel)
    a_b = []
    for x in word:
        a_b.extend(sub[x])
    return klein_normal_form(a_b)


def _klein_substitution(rel) -> dict[int, tuple[int, ...]]:
    """Rewrite generators so the relator becomes ``a b a b^-1`` (a=1, b=2)."""
    n = len(rel)
    variants = []
    for k in range(n):
        rot = rel[k:] + rel[:k]
        variants.append(rot)
        variants.append(tuple(-x for x in reversed(rot)))
    for w in variants:
        p, q, p2, q2 = w
        if p2 == p and q2 == -q and abs(p) != abs(q):
            # p q p q^-1 : a = p, b = q
            sub = {p: (1,), -p: (-1,), q: (2,), -q: (-2,)}
            return sub
    for w in variants:
        p, p2, q, q2 = w
        if p2 == p and q2 == q and abs(p) != abs(q):
            # p p q q = 1 with p = a b, q = b^-1
            return {p: (1, 2), -p: (-2, -1), q: (-2,), -q: (2,)}
    raise ValueError(f"relator {rel} is not a Klein bottle relator")


def special_small(word, relator) -> bool:
    return not any(small_surface_form(word, relator))


def is_contractible(walk: list[int], pre: Preprocessed) -> bool:
    """Decide whether a closed walk of the embedded graph is null-homotopic."""
    tp = encode_walk(walk, pre.index, pre.embedding)
    rad = pre.radial
    if rad.r < 6:
        from .oracle import word_from_darts

        return special_small(
            word_from_darts(expand_terms(tp, pre.cut.word_A)), word_from_darts(rad.word)
        )
    if not tp.terms:
        return True
    labels = []
    for a, b in tp.terms:
        labels.append(a)
        labels.append((b + 1) % rad.r)
    return lift_walk(labels, rad).closed
