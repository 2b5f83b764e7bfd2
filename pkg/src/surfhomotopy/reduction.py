"""Reduce an embedded graph to a one-vertex, one-face system of loops.

The pipeline is tree-cotree cut graph -> single facial walk of the cut graph
-> term products for closed walks -> two-vertex radial graph.  Nothing here
rebuilds words: terms are pairs of positions into the reduced facial word.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .surface_model import CellularEmbedding, EmbeddingError, classify_surface, parse_letters

__all__ = [
    "WalkError",
    "CutGraph",
    "EnterExitIndex",
    "TermProduct",
    "RadialGraph",
    "RadialWalk",
    "compute_cut_graph",
    "build_enter_exit",
    "encode_walk",
    "build_radial",
    "terms_to_radial_walk",
    "expand_terms",
    "parse_walk",
    "Preprocessed",
    "preprocess",
]

NONE = -1


class WalkError(ValueError):
    """Raised for walks that are not closed or reference unknown darts."""


@dataclass(frozen=True)
class CutGraph:
    """Cut graph ``H = T + A`` with the facial walk of its unique face.

    ``face`` lists the H-darts of the walk, ``signs`` the traversal signs, and
    ``corner_of[d]`` the walk position ``i`` whose preceding corner holds the
    non-H dart ``d`` (``NONE`` for darts of H).  ``word_A`` is the facial walk
    restricted to A and ``a_pos[i]`` gives, for walk position ``i``, the index
    of the first A-position at or after ``i``.
    """

    in_tree: tuple[bool, ...]
    in_cut: tuple[bool, ...]
    face: tuple[int, ...]
    signs: tuple[int, ...]
    corner_of: tuple[int, ...]
    word_A: tuple[int, ...]
    a_pos: tuple[int, ...]

    @property
    def cotree_edges(self) -> list[int]:
        return sorted({d >> 1 for d in self.word_A})


def compute_cut_graph(emb: CellularEmbedding) -> CutGraph:
    n_e = emb.n_edges
    # BFS spanning tree of the whole graph
    in_tree = [False] * n_e
    seen = [False] * emb.n_vertices
    darts_at: list[list[int]] = [[] for _ in range(emb.n_vertices)]
    for d, v in enumerate(emb.origin):
        darts_at[v].append(d)
    seen[0] = True
    q = deque([0])
    while q:
        u = q.popleft()
        for d in darts_at[u]:
            w = emb.origin[d ^ 1]
            if not seen[w]:
                seen[w] = True
                in_tree[d >> 1] = True
                q.append(w)
    # BFS spanning tree of the dual avoiding tree edges
    face_nb: list[list[tuple[int, int]]] = [[] for _ in range(emb.n_faces)]
    for f, walk in enumerate(emb.faces):
        for d, s in walk:
            if not in_tree[d >> 1]:
                g = emb.across(d, s)
                face_nb[f].append((g, d >> 1))
    in_dual = [False] * n_e
    fseen = [False] * emb.n_faces
    fseen[0] = True
    q = deque([0])
    while q:
        f = q.popleft()
        for g, e in face_nb[f]:
            if not fseen[g]:
                fseen[g] = True
                in_dual[e] = True
                q.append(g)
    in_cut = [in_tree[e] or not in_dual[e] for e in range(n_e)]

    face, signs, corner_of = _trace_cut_face(emb, in_cut)
    word_A = tuple(d for d in face if not in_tree[d >> 1])
    # first A-position at or after each walk position, wrapping to 0
    a_index = []
    k = 0
    for d in face:
        a_index.append(k)
        if not in_tree[d >> 1]:
            k += 1
    a_pos = [0] * len(face)
    nxt = 0
    for i in range(len(face) - 1, -1, -1):
        if not in_tree[face[i] >> 1]:
            nxt = a_index[i]
        a_pos[i] = nxt
    cut = CutGraph(
        tuple(in_tree), tuple(in_cut), tuple(face), tuple(signs),
        tuple(corner_of), word_A, tuple(a_pos),
    )
    sc = classify_surface(emb)
    expect = 2 * sc.genus if sc.orientable else sc.genus
    assert len(cut.cotree_edges) == expect, "cut graph has the wrong number of cotree edges"
    return cut


def _trace_cut_face(emb: CellularEmbedding, in_cut: list[bool]):
    n_darts = 2 * emb.n_edges
    corner_of = [NONE] * n_darts
    h_darts = [d for d in range(n_darts) if in_cut[d >> 1]]
    if not h_darts:
        # a single vertex with nothing cut: every dart sits in the only corner
        return [], [], [0] * n_darts
    start = h_darts[0]
    face: list[int] = []
    signs: list[int] = []
    d, s = start, 1
    skipped: list[int] = []
    while True:
        face.append(d)
        signs.append(s)
        if emb.twist[d >> 1]:
            s = -s
        x = d ^ 1
        skipped = []
        while True:
            x = emb.rot[x] if s > 0 else emb.rot_inv[x]
            if in_cut[x >> 1]:
                break
            skipped.append(x)
        for y in skipped:
            corner_of[y] = len(face)
        d = x
        if (d, s) == (start, 1):
            break
        if len(face) > 2 * len(h_darts):
            raise EmbeddingError("cut graph face walk did not close")
    if len(face) != len(h_darts):
        raise EmbeddingError("cut graph has more than one face")
    m = len(face)
    corner_of = [c % m if c != NONE else NONE for c in corner_of]
    return face, signs, corner_of


@dataclass(frozen=True)
class EnterExitIndex:
    """Per-dart handles into the reduced word.

    For a dart of G outside the cut graph, ``enter[d]`` is the A-position of the
    first A-dart after its tail corner and ``exit[d]`` the A-position of the
    last A-dart before its head corner.  A-darts carry their own positions;
    tree darts carry ``NONE``.
    """

    kind: tuple[int, ...]  # 0 tree, 1 cotree, 2 chord
    enter: tuple[int, ...]
    exit: tuple[int, ...]
    r: int


def build_enter_exit(cut: CutGraph, emb: CellularEmbedding) -> EnterExitIndex:
    n_darts = 2 * emb.n_edges
    r = len(cut.word_A)
    fwd_at = [NONE] * n_darts
    for i, d in enumerate(cut.word_A):
        fwd_at[d] = i
    kind = [0] * n_darts
    enter = [NONE] * n_darts
    exit_ = [NONE] * n_darts
    for d in range(n_darts):
        e = d >> 1
        if cut.in_tree[e]:
            continue
        if cut.in_cut[e]:
            kind[d] = 1
            i = fwd_at[d]
            if i != NONE:
                enter[d], exit_[d] = i, i
            else:
                # only the reverse occurs: go the long way round the relator
                i = fwd_at[d ^ 1]
                enter[d], exit_[d] = (i + 1) % r, (i - 1) % r
            continue
        kind[d] = 2
        enter[d] = cut.a_pos[cut.corner_of[d]] if r else 0
        exit_[d] = (cut.a_pos[cut.corner_of[d ^ 1]] - 1) % r if r else 0
    return EnterExitIndex(tuple(kind), tuple(enter), tuple(exit_), r)


@dataclass(frozen=True)
class TermProduct:
    """Closed walk as a product of arcs ``word_A[first..last]`` (cyclic, inclusive)."""

    terms: tuple[tuple[int, int], ...]
    r: int

    @property
    def height(self) -> int:
        return len(self.terms)


def encode_walk(walk: list[int], idx: EnterExitIndex, emb: CellularEmbedding) -> TermProduct:
    _check_closed(walk, emb)
    terms = []
    r = idx.r
    if r == 0:
        return TermProduct((), 0)  # sphere: every closed walk is trivial
    for d in walk:
        k = idx.kind[d]
        if k == 0:
            continue
        a, b = idx.enter[d], idx.exit[d]
        if k == 2 and (b + 1) % r == a:
            continue  # chord between corners with no A-dart in between
        terms.append((a, b))
    return TermProduct(tuple(terms), r)


def _check_closed(walk: list[int], emb: CellularEmbedding) -> None:
    n_darts = 2 * emb.n_edges
    for d in walk:
        if not 0 <= d < n_darts:
            raise WalkError(f"dart {d} out of range")
    for i, d in enumerate(walk):
        nd = walk[(i + 1) % len(walk)]
        if emb.origin[d ^ 1] != emb.origin[nd]:
            raise WalkError(f"walk not closed: dart {d} does not end where dart {nd} starts")


def expand_terms(tp: TermProduct, word_A) -> list[int]:
    """The word over A-darts spelled by a term product (linear in its length)."""
    out = []
    r = tp.r
    for a, b in tp.terms:
        n = (b - a) % r + 1
        out.extend(word_A[(a + j) % r] for j in range(n))
    return out


@dataclass(frozen=True)
class RadialGraph:
    """Two-vertex quadrangulation ``s``/``t`` with ``r`` edges.

    Radial edge ``k`` joins ``t`` to the polygon corner preceding side
    ``word[k]``.  ``partner[k]`` is the other side glued to side ``k`` and
    ``same[k]`` tells whether the gluing preserves direction.  Around ``t`` the
    labels come in order ``0..r-1``; around ``s`` the neighbours of label
    ``k`` are ``a_next[k]`` and ``b_prev[k - 1]``.
    """

    word: tuple[int, ...]
    partner: tuple[int, ...]
    same: tuple[bool, ...]
    a_next: tuple[int, ...]
    b_next: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.word)

    @property
    def n_faces(self) -> int:
        return self.r // 2

    def s_rotation(self) -> list[int]:
        """Labels around ``s`` in cyclic order."""
        if not self.r:
            return []
        out = [0]
        k = self.a_next[0]
        while k != 0:
            out.append(k)
            k = self.a_next[k]
        return out


def build_radial(word_A) -> RadialGraph:
    word = tuple(word_A)
    r = len(word)
    where: dict[int, list[int]] = {}
    for i, d in enumerate(word):
        where.setdefault(d >> 1, []).append(i)
    partner = [0] * r
    same = [False] * r
    for e, pos in where.items():
        if len(pos) != 2:
            raise EmbeddingError(f"edge {e} does not occur twice in the reduced word")
        i, j = pos
        partner[i], partner[j] = j, i
        same[i] = same[j] = word[i] == word[j]
    a_next = [0] * r
    b_next = [0] * r
    for w in range(r):
        p = partner[w]
        if same[w]:
            a_next[w], b_next[w] = p, (p + 1) % r
        else:
            a_next[w], b_next[w] = (p + 1) % r, p
    return RadialGraph(word, tuple(partner), tuple(same), tuple(a_next), tuple(b_next))


@dataclass(frozen=True)
class RadialWalk:
    """Closed walk in the radial graph starting at ``s``, as edge labels.

    Even steps leave an ``s``-vertex, odd steps leave a ``t``-vertex.
    """

    labels: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.labels)


def terms_to_radial_walk(tp: TermProduct, rad: RadialGraph) -> RadialWalk:
    out = []
    r = rad.r
    for a, b in tp.terms:
        out.append(a)
        out.append((b + 1) % r)
    return RadialWalk(tuple(out))


def parse_walk(text: str, n_edges: int | None = None) -> list[int]:
    """Signed edge tokens (``+3 -7``) or generator letters (``abAB``)."""
    toks = text.split()
    if toks and all(t[0] in "+-" or t.isdigit() for t in toks):
        out = []
        for t in toks:
            try:
                e = int(t)
            except ValueError:
                raise WalkError(f"bad walk token {t!r}") from None
            idx = abs(e)
            if n_edges is not None and idx >= n_edges:
                raise WalkError(f"edge {idx} out of range")
            out.append(2 * idx + (1 if t.startswith("-") else 0))
        return out
    try:
        out = parse_letters(text)
    except EmbeddingError as exc:
        raise WalkError(str(exc)) from None
    if n_edges is not None and any((d >> 1) >= n_edges for d in out):
        raise WalkError("generator letter beyond the embedding's edges")
    return out


@dataclass(frozen=True)
class Preprocessed:
    """Everything computed once per embedding."""

    embedding: CellularEmbedding
    cut: CutGraph
    index: EnterExitIndex
    radial: RadialGraph

    def radial_walk(self, walk: list[int]) -> RadialWalk:
        return terms_to_radial_walk(encode_walk(walk, self.index, self.embedding), self.radial)

    def reduced_word(self, walk: list[int]) -> list[int]:
        return expand_terms(encode_walk(walk, self.index, self.embedding), self.cut.word_A)


def preprocess(emb: CellularEmbedding) -> Preprocessed:
    cut = compute_cut_graph(emb)
    return Preprocessed(emb, cut, build_enter_exit(cut, emb), build_radial(cut.word_A))
