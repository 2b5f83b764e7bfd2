"""Free homotopy on orientable surfaces of genus at least two.

The canonical generator of the cyclic cover of ``c`` is read off the relevant
region of six consecutive lifts of ``c``.  Lines are tagged by chasing
siblings through the region's dual graph, classified with the translation
``tau`` (lift ``i`` of ``c`` maps to lift ``i + 1``), and the canonical belt is
cut out of the band between a transversal ``ell`` and ``tau(ell)``.  The
result is a cyclic sequence of oriented radial edges; two closed walks are
freely homotopic iff their sequences agree up to rotation.

Tokens encode an oriented radial edge as ``2 * label + from_type`` where
``from_type`` is 0 for an ``s``-vertex and 1 for a ``t``-vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .oracle import klein_conjugate, word_from_darts
from .reduction import Preprocessed, RadialGraph, encode_walk, expand_terms
from .surface_model import classify_surface
from .tiling import NONE, _next, _radial_arrays, is_contractible, lift_walk, small_surface_form

__all__ = [
    "UnsupportedSurface",
    "CanonicalCycle",
    "BeltStats",
    "LineTables",
    "canonical_generator",
    "canonical_from_labels",
    "cyclic_equal",
    "prefix_function",
    "free_homotopic",
    "homotopic_fixed",
]

POWER = 6

# line classes
_K = 0
_TRANSVERSAL = 1
_INVARIANT = 2


class UnsupportedSurface(ValueError):
    """Free homotopy is not available on this surface."""


# -- edge indexing ---------------------------------------------------------


@njit(cache=True)
def _edge_tables(n, r, vtype, count, index, nbr):
    """Number the edges of the region by their t-endpoint's table slots."""
    eoff = np.empty(n, dtype=np.int32)
    total = 0
    for v in range(n):
        eoff[v] = total
        if vtype[v] == 1:
            total += count[v]
    et = np.empty(total, dtype=np.int32)
    es = np.empty(total, dtype=np.int32)
    el = np.empty(total, dtype=np.int16)
    for v in range(n):
        if vtype[v] == 1:
            for k in range(count[v]):
                i = eoff[v] + k
                et[i] = v
                el[i] = index[v * r + k]
                es[i] = nbr[v * r + k]
    return eoff, et, es, el


@njit(cache=True, inline="always")
def _eid(r, count, index, rev, eoff, t, e):
    k = rev[t * r + e]
    if 0 <= k < count[t] and index[t * r + k] == e:
        return eoff[t] + k
    return -1


@njit(cache=True, inline="always")
def _sibling(r, count, index, rev, nbr, eoff, a_next, b_next, t, e, is_a, W):
    """Sibling of edge ``(t, e)`` across quad ``W``; -1 if outside the region."""
    s = _next(r, count, index, rev, nbr, t, e)
    if is_a:
        t2 = _next(r, count, index, rev, nbr, s, a_next[W])
        lab = b_next[W]
    else:
        t2 = _next(r, count, index, rev, nbr, s, b_next[W])
        lab = a_next[W]
    if t2 == NONE:
        return -1
    return _eid(r, count, index, rev, eoff, t2, lab)


@njit(cache=True, inline="always")
def _far_quad(partner, same, W, is_a, r):
    """Quad on the other side of the sibling reached across quad ``W``."""
    wp = partner[W]
    if is_a != same[W]:
        return (wp - 1) % r, False
    return (wp + 1) % r, True


@njit(cache=True)
def _tag_lines(r, count, index, rev, nbr, eoff, et, el, a_next, b_next, partner, same):
    """Tag maximal sibling chains; returns tags, positions and + directions."""
    E = et.shape[0]
    tag = np.full(E, -1, dtype=np.int32)
    pos = np.empty(E, dtype=np.int32)
    plus_a = np.empty(E, dtype=np.bool_)
    ntag = 0
    for i in range(E):
        if tag[i] != -1:
            continue
        tag[i] = ntag
        pos[i] = 0
        plus_a[i] = True
        for d in range(2):
            cur = i
            if d == 0:
                W = el[i]
                is_a = True
                step = 1
            else:
                W = (el[i] - 1) % r
                is_a = False
                step = -1
            p = 0
            while True:
                j = _sibling(r, count, index, rev, nbr, eoff, a_next, b_next, et[cur], el[cur], is_a, W)
                if j == -1:
                    break
                if tag[j] != -1:
                    raise AssertionError("a line meets the region in more than one segment")
                nW, n_is_a = _far_quad(partner, same, W, is_a, r)
                p += step
                tag[j] = ntag
                pos[j] = p
                plus_a[j] = n_is_a if d == 0 else not n_is_a
                cur = j
                W = nW
                is_a = n_is_a
        ntag += 1
    return tag, pos, plus_a, ntag


@njit(cache=True)
def _walk_edge_ids(r, count, index, rev, eoff, vtype, path, labels, m):
    n = path.shape[0] - 1
    out = np.empty(n, dtype=np.int32)
    for q in range(n):
        u = path[q]
        t = u if vtype[u] == 1 else path[q + 1]
        out[q] = _eid(r, count, index, rev, eoff, t, labels[q % m])
        if out[q] < 0:
            raise AssertionError("lifted walk edge missing from the region")
    return out


@njit(cache=True)
def _classify(
    r, count, index, rev, nbr, eoff, et, el, a_next, b_next,
    tag, plus_a, ntag, walk_ids, path, vtype, m, power,
):
    """Translation map, crossing table C, parities P and transversal selection.

    Returns ``(tau, cls, line_dir, ell, anchor_j, n_trans)``.
    """
    tau = np.full(ntag, -1, dtype=np.int32)
    for i in range(power - 1):
        for j in range(m):
            a = tag[walk_ids[i * m + j]]
            b = tag[walk_ids[(i + 1) * m + j]]
            if tau[a] == -1:
                tau[a] = b
            elif tau[a] != b:
                raise AssertionError("inconsistent translation of a line")
    # C: does a line cross its translate inside the region
    C = np.zeros(ntag, dtype=np.bool_)
    E = et.shape[0]
    for i in range(E):
        t = et[i]
        W = el[i]
        i2 = _eid(r, count, index, rev, eoff, t, (W + 1) % r)
        if i2 < 0:
            continue
        if _sibling(r, count, index, rev, nbr, eoff, a_next, b_next, t, W, True, W) < 0:
            continue
        x = tag[i]
        y = tag[i2]
        if tau[x] == y:
            C[x] = True
        if tau[y] == x:
            C[y] = True
    # parities of crossings with lifts 2, 3, 4 (1-based)
    P = np.zeros((3, ntag), dtype=np.int8)
    for k in range(3):
        for j in range(m):
            x = tag[walk_ids[(k + 1) * m + j]]
            P[k, x] ^= 1
    cls = np.zeros(ntag, dtype=np.int8)
    line_dir = np.zeros(ntag, dtype=np.int8)
    ell = -1
    anchor_j = -1
    n_trans = 0
    seen = np.zeros(ntag, dtype=np.bool_)
    for j in range(m):
        x = tag[walk_ids[2 * m + j]]
        if seen[x]:
            continue
        seen[x] = True
        if C[x] or P[1, x] == 0 or P[0, x] == 1 or P[2, x] == 1:
            continue
        n_trans += 1
        if ell == -1:
            ell = x
            anchor_j = j
        # orient this transversal and its translates by their first crossing
        for i in range(power):
            q = i * m + j
            eid = walk_ids[q]
            y = tag[eid]
            right_is_a = vtype[path[q]] == 0
            d = 1 if plus_a[eid] == right_is_a else -1
            if line_dir[y] != 0 and line_dir[y] != d:
                raise AssertionError("transversal oriented both ways")
            line_dir[y] = d
            cls[y] = _TRANSVERSAL
    for i in range((power - 1) * m):
        x = tag[walk_ids[i]]
        if tau[x] == x:
            cls[x] = _INVARIANT
    return tau, cls, line_dir, ell, anchor_j, n_trans


@njit(cache=True, inline="always")
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nx = parent[x]
        parent[x] = root
        x = nx
    return root


@njit(cache=True)
def _band_and_sigma(
    n, r, count, index, rev, nbr, eoff, et, es, el, vtype,
    tag, pos, cls, line_dir, ell, tau_ell, anchor3, anchor4, x3,
):
    """Faces of the band between ``ell`` and ``tau(ell)``, and the belt slice.

    Returns ``(in_band, in_sigma)``.
    """
    E = et.shape[0]
    in_band = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int32)
    top = 0
    in_band[x3] = True
    stack[top] = x3
    top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        base = v * r
        for k in range(count[v]):
            w = nbr[base + k]
            if in_band[w]:
                continue
            lab = index[base + k]
            t = v if vtype[v] == 1 else w
            i = _eid(r, count, index, rev, eoff, t, lab)
            g = tag[i]
            if g == ell or g == tau_ell:
                continue
            in_band[w] = True
            stack[top] = w
            top += 1
    # edges of the closed band minus K, merged by union-find
    in_c = np.zeros(E, dtype=np.bool_)
    parent = np.arange(n).astype(np.int32)
    for i in range(E):
        g = tag[i]
        bt = in_band[et[i]]
        bs = in_band[es[i]]
        if (bt and bs) or ((g == ell or g == tau_ell) and (bt or bs)):
            if cls[g] != _K:
                in_c[i] = True
                a = _find(parent, et[i])
                b = _find(parent, es[i])
                if a != b:
                    parent[a] = b
    # the component holding some ell-edge together with its translate
    lo = 1 << 30
    hi = -(1 << 30)
    for i in range(E):
        if tag[i] == tau_ell:
            lo = min(lo, pos[i])
            hi = max(hi, pos[i])
    by_pos = np.full(hi - lo + 1, -1, dtype=np.int64)
    for i in range(E):
        if tag[i] == tau_ell:
            by_pos[pos[i] - lo] = i
    root = -1
    n_roots = 0
    for i in range(E):
        if tag[i] != ell or not in_c[i]:
            continue
        delta = (pos[i] - pos[anchor3]) * line_dir[ell]
        p = pos[anchor4] + delta * line_dir[tau_ell]
        if p < lo or p > hi:
            continue
        j = by_pos[p - lo]
        if j < 0 or not in_c[j]:
            continue
        a = _find(parent, et[i])
        if a == _find(parent, et[j]):
            if root == -1:
                root = a
                n_roots = 1
            elif a != root:
                n_roots += 1
    if root == -1:
        raise AssertionError("no band component contains an edge with its translate")
    if n_roots != 1:
        raise AssertionError("several band components contain an edge with its translate")
    in_sigma = np.zeros(E, dtype=np.bool_)
    for i in range(E):
        if in_c[i] and _find(parent, et[i]) == root:
            in_sigma[i] = True
    return in_band, in_sigma


@njit(cache=True, inline="always")
def _right_quad(plus_a, line_dir, tag, el, i, r):
    right_is_a = plus_a[i] if line_dir[tag[i]] == 1 else not plus_a[i]
    W = el[i] if right_is_a else (el[i] - 1) % r
    return W, right_is_a


@njit(cache=True)
def _order_path(n, et, es, in_band, sel, first):
    """Order selected edges into a path starting at ``first``'s outer end.

    Returns ``(edge order, from-vertex per edge)`` or empty arrays when the
    selection is not a simple path.
    """
    E = et.shape[0]
    slot0 = np.full(n, -1, dtype=np.int32)
    slot1 = np.full(n, -1, dtype=np.int32)
    k = 0
    for i in range(E):
        if not sel[i]:
            continue
        k += 1
        for v in (et[i], es[i]):
            if slot0[v] == -1:
                slot0[v] = i
            elif slot1[v] == -1:
                slot1[v] = i
            else:
                return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int32)
    order = np.empty(k, dtype=np.int64)
    frm = np.empty(k, dtype=np.int32)
    u = es[first] if in_band[et[first]] else et[first]
    cur = first
    for q in range(k):
        order[q] = cur
        frm[q] = u
        w = es[cur] if et[cur] == u else et[cur]
        u = w
        if q == k - 1:
            break
        nxt = slot0[u] if slot0[u] != cur else slot1[u]
        if nxt == -1:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int32)
        cur = nxt
    return order, frm


@njit(cache=True)
def _wedge_third(vtype, el, a_next, b_next, r, v, lab, W, is_a):
    """The label sharing quad ``W`` with edge ``lab`` around vertex ``v``."""
    if vtype[v] == 1:
        return (W + 1) % r if lab == W else W
    if is_a:
        return a_next[W]
    return b_next[W]


@njit(cache=True)
def _extract(
    n, r, count, index, rev, nbr, eoff, et, es, el, vtype, a_next, b_next,
    tag, pos, plus_a, cls, line_dir, ell, tau_ell, in_band, in_sigma, n_trans,
):
    """Canonical generator tokens from the belt slice.

    Returns ``(tokens, situation, v_inner, e_inner)``; situation is 1 for
    the full belt or its right half and 2 for the left half.
    """
    E = et.shape[0]
    # situation 2(i): one edge per transversal, right ends chained along a line
    ntag_max = 0
    for i in range(E):
        if tag[i] + 1 > ntag_max:
            ntag_max = tag[i] + 1
    used = np.zeros(ntag_max, dtype=np.bool_)
    distinct = True
    first = -1
    for i in range(E):
        if not in_sigma[i]:
            continue
        g = tag[i]
        if used[g] or cls[g] != _TRANSVERSAL:
            distinct = False
        used[g] = True
        if g == ell and first == -1:
            first = i
    situation = 1
    order = np.empty(0, dtype=np.int64)
    frm = np.empty(0, dtype=np.int32)
    if distinct and first >= 0:
        order, frm = _order_path(n, et, es, in_band, in_sigma, first)
        chained = order.shape[0] >= 2 and tag[order[order.shape[0] - 1]] == tau_ell
        for q in range(order.shape[0] - 1):
            if not chained:
                break
            x = order[q]
            y = order[q + 1]
            b = frm[q + 1]
            Wx, ax = _right_quad(plus_a, line_dir, tag, el, x, r)
            Wy, ay = _right_quad(plus_a, line_dir, tag, el, y, r)
            dx = _wedge_third(vtype, el, a_next, b_next, r, b, el[x], Wx, ax)
            dy = _wedge_third(vtype, el, a_next, b_next, r, b, el[y], Wy, ay)
            if dx != dy:
                chained = False
        if chained:
            situation = 2
    if situation == 2:
        k = order.shape[0] - 1
        tokens = np.empty(k, dtype=np.int64)
        for q in range(k):
            x = order[q]
            u = frm[q]
            e = el[x]
            if vtype[u] == 1:
                lab = a_next[(e - 1) % r]
            else:
                lab = b_next[e]
            tokens[q] = 2 * lab + (1 - vtype[u])
    else:
        sel = np.zeros(E, dtype=np.bool_)
        first = -1
        for i in range(E):
            if not in_sigma[i] or cls[tag[i]] != _TRANSVERSAL:
                continue
            W, is_a = _right_quad(plus_a, line_dir, tag, el, i, r)
            t = et[i]
            # the other line through the right quad
            if is_a:
                other = _eid(r, count, index, rev, eoff, t, (W + 1) % r)
            else:
                other = _eid(r, count, index, rev, eoff, t, W)
            if other < 0:
                s = es[i]
                t2 = _next(r, count, index, rev, nbr, s, a_next[W] if is_a else b_next[W])
                if t2 != NONE:
                    other = _eid(r, count, index, rev, eoff, t2, a_next[W] if is_a else b_next[W])
            if other >= 0 and cls[tag[other]] != _K:
                continue
            sel[i] = True
            if tag[i] == ell:
                if first != -1:
                    raise AssertionError("two rightmost edges on the chosen transversal")
                first = i
        if first == -1:
            raise AssertionError("no rightmost edge on the chosen transversal")
        order, frm = _order_path(n, et, es, in_band, sel, first)
        if order.shape[0] == 0:
            raise AssertionError("rightmost short edges do not form a path")
        last = order[order.shape[0] - 1]
        if tag[last] != tau_ell:
            raise AssertionError("canonical path does not end on the translated transversal")
        k = order.shape[0] - 1
        tokens = np.empty(k, dtype=np.int64)
        for q in range(k):
            x = order[q]
            u = frm[q]
            tokens[q] = 2 * el[x] + vtype[u]
    # belt size: crossings inside the slice and its edges modulo tau
    v_inner = 0
    e_inner = 0
    for i in range(E):
        if not in_sigma[i]:
            continue
        if tag[i] != tau_ell:
            e_inner += 1
        t = et[i]
        W = el[i]
        i2 = _eid(r, count, index, rev, eoff, t, (W + 1) % r)
        if i2 < 0 or not in_sigma[i2]:
            continue
        j = _sibling(r, count, index, rev, nbr, eoff, a_next, b_next, t, W, True, W)
        if j < 0 or not in_sigma[j]:
            continue
        j2 = _sibling(r, count, index, rev, nbr, eoff, a_next, b_next, t, (W + 1) % r, False, W)
        if j2 < 0 or not in_sigma[j2]:
            continue
        v_inner += 1
    # each quad was seen from both of its t-vertices
    return tokens, situation, v_inner // 2, e_inner


# -- public API ------------------------------------------------------------


@dataclass(frozen=True)
class BeltStats:
    transversals: int
    v_inner: int
    e_inner: int
    situation: int
    region_faces: int


@dataclass(frozen=True)
class LineTables:
    """Line classification for one canonicalisation (kept for inspection)."""

    n_lines: int
    tau: np.ndarray
    kind: np.ndarray
    direction: np.ndarray
    ell: int


@dataclass(frozen=True)
class CanonicalCycle:
    """Cyclic sequence of oriented radial edges (``2 * label + from_type``)."""

    tokens: tuple[int, ...]
    stats: BeltStats | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def labels_from_s(self) -> list[int]:
        """The cycle as a radial walk starting at an ``s``-vertex."""
        toks = list(self.tokens)
        k = next(i for i, x in enumerate(toks) if x & 1 == 0)
        toks = toks[k:] + toks[:k]
        return [x >> 1 for x in toks]

    def normalized(self) -> tuple[int, ...]:
        """Lexicographically least rotation."""
        t = self.tokens
        if not t:
            return t
        return min(t[i:] + t[:i] for i in range(len(t)))


def canonical_from_labels(labels, rad: RadialGraph, keep_tables: bool = False):
    """Canonical generator of a non-contractible radial walk (``r >= 8``)."""
    r = rad.r
    m = len(labels)
    base = np.ascontiguousarray(labels, dtype=np.int32)
    power = np.tile(base, POWER)
    region = lift_walk(power, rad)
    if region.path[m] == region.path[0]:
        raise ValueError("contractible walk has no canonical generator")
    g = region.graph
    n = g.n_used
    a_next, b_next, partner, same = _radial_arrays(rad)
    eoff, et, es, el = _edge_tables(n, r, g.vtype, g.count, g.index, g.nbr)
    tag, pos, plus_a, ntag = _tag_lines(
        r, g.count, g.index, g.rev, g.nbr, eoff, et, el, a_next, b_next, partner, same
    )
    walk_ids = _walk_edge_ids(r, g.count, g.index, g.rev, eoff, g.vtype, region.path, base, m)
    tau, cls, line_dir, ell, anchor_j, n_trans = _classify(
        r, g.count, g.index, g.rev, g.nbr, eoff, et, el, a_next, b_next,
        tag, plus_a, ntag, walk_ids, region.path, g.vtype, m, POWER,
    )
    if ell < 0:
        raise AssertionError("no transversal separates consecutive lifts")
    anchor3 = walk_ids[2 * m + anchor_j]
    anchor4 = walk_ids[3 * m + anchor_j]
    tau_ell = tag[anchor4]
    x3 = region.path[3 * m]
    in_band, in_sigma = _band_and_sigma(
        n, r, g.count, g.index, g.rev, g.nbr, eoff, et, es, el, g.vtype,
        tag, pos, cls, line_dir, ell, tau_ell, anchor3, anchor4, x3,
    )
    tokens, situation, v_inner, e_inner = _extract(
        n, r, g.count, g.index, g.rev, g.nbr, eoff, et, es, el, g.vtype, a_next, b_next,
        tag, pos, plus_a, cls, line_dir, ell, tau_ell, in_band, in_sigma, n_trans,
    )
    if len(tokens) != n_trans:
        raise AssertionError(
            f"canonical generator has {len(tokens)} edges for {n_trans} transversals"
        )
    if v_inner > n_trans or e_inner > 3 * n_trans:
        raise AssertionError(
            f"belt too large: {v_inner} inner vertices, {e_inner} edges for length {n_trans}"
        )
    stats = BeltStats(int(n_trans), int(v_inner), int(e_inner), int(situation), n)
    cyc = CanonicalCycle(tuple(int(x) for x in tokens), stats)
    if keep_tables:
        return cyc, LineTables(int(ntag), tau, cls, line_dir, int(ell))
    return cyc


def canonical_generator(walk: list[int], pre: Preprocessed) -> CanonicalCycle:
    rad = pre.radial
    sc = classify_surface(pre.embedding)
    if not sc.orientable or sc.genus < 2:
        raise UnsupportedSurface("canonical generators need an orientable surface of genus >= 2")
    tp = encode_walk(walk, pre.index, pre.embedding)
    labels = []
    for a, b in tp.terms:
        labels.append(a)
        labels.append((b + 1) % rad.r)
    return canonical_from_labels(labels, rad)


def prefix_function(pattern) -> list[int]:
    pi = [0] * len(pattern)
    k = 0
    for i in range(1, len(pattern)):
        while k and pattern[i] != pattern[k]:
            k = pi[k - 1]
        if pattern[i] == pattern[k]:
            k += 1
        pi[i] = k
    return pi


def cyclic_equal(a, b) -> bool:
    """Whether ``a`` is a rotation of ``b`` (Knuth-Morris-Pratt on ``b + b``)."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    if a == b:
        return True
    pi = prefix_function(a)
    k = 0
    for x in b + b:
        while k and x != a[k]:
            k = pi[k - 1]
        if x == a[k]:
            k += 1
            if k == len(a):
                return True
    return False


def free_homotopic(c: list[int], d: list[int], pre: Preprocessed) -> bool:
    """Decide whether two closed walks are freely homotopic."""
    if c == d:
        return True
    sc = classify_surface(pre.embedding)
    rel = word_from_darts(pre.radial.word)
    if pre.radial.r < 6 or not sc.orientable:
        wc = word_from_darts(expand_terms(encode_walk(c, pre.index, pre.embedding), pre.cut.word_A))
        wd = word_from_darts(expand_terms(encode_walk(d, pre.index, pre.embedding), pre.cut.word_A))
        if sc.orientable or sc.genus == 1:
            # sphere, torus and projective plane have abelian groups
            return small_surface_form(wc, rel) == small_surface_form(wd, rel)
        if sc.genus == 2:
            u, v = small_surface_form(wc, rel)
            u2, v2 = small_surface_form(wd, rel)
            return klein_conjugate(u, v, u2, v2)
        raise UnsupportedSurface(
            "free homotopy on non-orientable surfaces of genus >= 3 is not supported"
        )
    cc = is_contractible(c, pre)
    dc = is_contractible(d, pre)
    if cc or dc:
        return cc and dc
    gc = canonical_generator(c, pre)
    gd = canonical_generator(d, pre)
    return cyclic_equal(gc.tokens, gd.tokens)


def homotopic_fixed(c: list[int], d: list[int], pre: Preprocessed) -> bool:
    """Homotopy with fixed basepoint: ``c . d^-1`` is contractible."""
    if c and d and pre.embedding.origin[c[0]] != pre.embedding.origin[d[0]]:
        raise ValueError("walks do not share a basepoint")
    return is_contractible(list(c) + [x ^ 1 for x in reversed(d)], pre)
