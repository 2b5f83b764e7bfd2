"""Cellular embeddings of graphs on closed surfaces, encoded by rotation systems.

Darts are numbered ``0 .. 2E-1``; edge ``e`` owns the forward dart ``2e`` and
the backward dart ``2e+1``, so ``opposite(d) == d ^ 1``.  The rotation is a
permutation of darts giving, for every dart, the next dart counterclockwise
around its origin.  Edges may carry a twist (signature -1); an embedding with
no twisted edge, or one switching-equivalent to it, is orientable.

Facial walks follow the usual face traversal procedure.  A traversal state is
a pair ``(dart, sign)`` where ``sign`` tells whether the local orientation at
the dart's origin agrees with the rotation (+1) or is reversed (-1).
"""

from __future__ import annotations

import string
from collections import deque
from dataclasses import dataclass, field

__all__ = [
    "EmbeddingError",
    "CellularEmbedding",
    "SurfaceClass",
    "DualEmbedding",
    "load_embedding",
    "dump_embedding",
    "classify_surface",
    "gen_canonical",
    "from_relator",
    "parse_letters",
    "letters_of",
    "canonical_relator",
    "dual",
    "subdivide_edge",
    "split_face",
    "random_refinement",
]


class EmbeddingError(ValueError):
    """Raised for malformed embedding files or invalid rotation systems."""


def opposite(d: int) -> int:
    return d ^ 1


@dataclass(frozen=True)
class SurfaceClass:
    orientable: bool
    genus: int
    euler_char: int

    def __str__(self) -> str:
        kind = "orientable" if self.orientable else "non-orientable"
        return f"{kind} genus {self.genus}, χ={self.euler_char}"


@dataclass(eq=False)
class CellularEmbedding:
    """A connected graph with a rotation system (and optional twists).

    ``faces`` holds one traversal per face, each a list of ``(dart, sign)``
    states, and ``face_of`` maps every state to its face index.
    """

    n_vertices: int
    n_edges: int
    rot: list[int]
    twist: tuple[bool, ...] = ()
    name: str = ""
    origin: list[int] = field(init=False)
    rot_inv: list[int] = field(init=False)
    faces: list[list[tuple[int, int]]] = field(init=False)
    face_of: dict[tuple[int, int], int] = field(init=False)

    def __post_init__(self) -> None:
        if not self.twist:
            self.twist = (False,) * self.n_edges
        self.twist = tuple(bool(t) for t in self.twist)
        n_darts = 2 * self.n_edges
        if len(self.rot) != n_darts or sorted(self.rot) != list(range(n_darts)):
            raise EmbeddingError("rotation not a permutation")
        if len(self.twist) != self.n_edges:
            raise EmbeddingError("twist flags do not match edge count")
        self.rot_inv = [0] * n_darts
        for d, nd in enumerate(self.rot):
            self.rot_inv[nd] = d
        self._assign_origins()
        self._check_connected()
        self._trace_faces()

    # -- construction helpers -------------------------------------------

    def _assign_origins(self) -> None:
        n_darts = 2 * self.n_edges
        origin = [-1] * n_darts
        v = 0
        for d in range(n_darts):
            if origin[d] != -1:
                continue
            x = d
            while origin[x] == -1:
                origin[x] = v
                x = self.rot[x]
            v += 1
        # isolated vertices have no darts; only the single-vertex sphere allows that
        if n_darts == 0:
            v = 1
        if v != self.n_vertices:
            raise EmbeddingError(
                f"rotation has {v} cycles but {self.n_vertices} vertices declared"
            )
        self.origin = origin

    def _check_connected(self) -> None:
        if self.n_vertices <= 1:
            return
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for e in range(self.n_edges):
            u, w = self.origin[2 * e], self.origin[2 * e + 1]
            adj[u].append(w)
            adj[w].append(u)
        seen = [False] * self.n_vertices
        seen[0] = True
        todo = [0]
        while todo:
            u = todo.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    todo.append(w)
        if not all(seen):
            raise EmbeddingError("disconnected graph")

    def step(self, d: int, s: int) -> tuple[int, int]:
        """Face traversal successor of state ``(d, s)``."""
        if self.twist[d >> 1]:
            s = -s
        o = d ^ 1
        return (self.rot[o] if s > 0 else self.rot_inv[o]), s

    def reverse_state(self, d: int, s: int) -> tuple[int, int]:
        """The state traversing the same side of the edge backwards."""
        return d ^ 1, (s if self.twist[d >> 1] else -s)

    def _trace_faces(self) -> None:
        faces: list[list[tuple[int, int]]] = []
        face_of: dict[tuple[int, int], int] = {}
        for s0 in (1, -1):
            for d in range(2 * self.n_edges):
                if (d, s0) in face_of:
                    continue
                walk = []
                st = (d, s0)
                f = len(faces)
                while st not in face_of:
                    face_of[st] = f
                    face_of[self.reverse_state(*st)] = ~f
                    walk.append(st)
                    st = self.step(*st)
                if st != (d, s0):
                    raise EmbeddingError("face traversal did not close")
                faces.append(walk)
        # reverse states were tagged with ~f; normalise them to f
        self.face_of = {k: (v if v >= 0 else ~v) for k, v in face_of.items()}
        self.faces = faces
        if self.n_edges == 0:
            self.faces = [[]]
        total = sum(len(w) for w in faces)
        if total != 2 * self.n_edges:
            raise EmbeddingError("face walks do not cover every edge twice")

    # -- accessors -------------------------------------------------------

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_char(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def across(self, d: int, s: int) -> int:
        """Face on the other side of the edge from state ``(d, s)``."""
        return self.face_of[(d, -s)]

    def face_darts(self, f: int) -> list[int]:
        return [d for d, _ in self.faces[f]]

    def vertex_darts(self, v: int) -> list[int]:
        start = self.origin.index(v)
        out = [start]
        d = self.rot[start]
        while d != start:
            out.append(d)
            d = self.rot[d]
        return out


def classify_surface(emb: CellularEmbedding) -> SurfaceClass:
    chi = emb.euler_char
    orientable = _is_orientable(emb)
    genus = (2 - chi) // 2 if orientable else 2 - chi
    return SurfaceClass(orientable, genus, chi)


def _is_orientable(emb: CellularEmbedding) -> bool:
    # switching signs: orientable iff vertex signs lam exist with
    # twist(e) == (lam(u) != lam(v)) on every edge
    lam = [0] * emb.n_vertices
    if emb.n_vertices == 0:
        return True
    lam[0] = 1
    stack = [0]
    darts_at: list[list[int]] = [[] for _ in range(emb.n_vertices)]
    for d, v in enumerate(emb.origin):
        darts_at[v].append(d)
    while stack:
        u = stack.pop()
        for d in darts_at[u]:
            w = emb.origin[d ^ 1]
            want = -lam[u] if emb.twist[d >> 1] else lam[u]
            if lam[w] == 0:
                lam[w] = want
                stack.append(w)
            elif lam[w] != want:
                return False
    return True


# -- text format ---------------------------------------------------------


def load_embedding(text: str) -> CellularEmbedding:
    """Parse the line-oriented embedding format.

    ``twist <e> ...`` lines are optional and mark edges with signature -1.
    """
    name = ""
    n_v = n_e = None
    rot_lines: dict[int, tuple[int, list[int]]] = {}
    twisted: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "surface":
                name = rest.strip()
            elif key == "vertices":
                n_v = int(rest)
            elif key == "edges":
                n_e = int(rest)
            elif key == "rot":
                head, sep, darts = rest.partition(":")
                if not sep:
                    raise ValueError("expected ':'")
                v = int(head)
                if v in rot_lines:
                    raise EmbeddingError(f"line {lineno}: vertex {v} listed twice")
                rot_lines[v] = (lineno, [int(x) for x in darts.split()])
            elif key == "twist":
                twisted.update(int(x) for x in rest.split())
            else:
                raise ValueError(f"unknown keyword {key!r}")
        except EmbeddingError:
            raise
        except ValueError as exc:
            raise EmbeddingError(f"line {lineno}: malformed line: {exc}") from None
    if n_v is None or n_e is None:
        raise EmbeddingError("line 0: missing 'vertices' or 'edges' header")
    rot = [-1] * (2 * n_e)
    seen_at: dict[int, int] = {}
    for v in range(n_v):
        if v not in rot_lines:
            if n_e == 0 and n_v == 1:
                continue
            raise EmbeddingError(f"line 0: no rotation given for vertex {v}")
    for v, (lineno, darts) in sorted(rot_lines.items()):
        if not 0 <= v < n_v:
            raise EmbeddingError(f"line {lineno}: vertex {v} out of range")
        for d in darts:
            if not 0 <= d < 2 * n_e:
                raise EmbeddingError(f"line {lineno}: dart {d} out of range")
            if d in seen_at:
                raise EmbeddingError(f"line {lineno}: rotation not a permutation (dart {d} repeated)")
            seen_at[d] = lineno
        for i, d in enumerate(darts):
            rot[d] = darts[(i + 1) % len(darts)]
    missing = [d for d in range(2 * n_e) if rot[d] == -1]
    if missing:
        raise EmbeddingError(f"line 0: rotation not a permutation (dart {missing[0]} missing)")
    for e in twisted:
        if not 0 <= e < n_e:
            raise EmbeddingError(f"line 0: twisted edge {e} out of range")
    twist = tuple(e in twisted for e in range(n_e))
    emb = CellularEmbedding(n_v, n_e, rot, twist, name=name)
    # vertex numbering must follow the rot lines, not the discovery order
    return _renumber_vertices(emb, rot_lines)


def _renumber_vertices(emb: CellularEmbedding, rot_lines: dict) -> CellularEmbedding:
    for v, (_, darts) in rot_lines.items():
        for d in darts:
            emb.origin[d] = v
    return emb


def dump_embedding(emb: CellularEmbedding) -> str:
    lines = [f"surface {emb.name or 'unnamed'}", f"vertices {emb.n_vertices}", f"edges {emb.n_edges}"]
    for v in range(emb.n_vertices):
        if emb.n_edges:
            lines.append(f"rot {v}: " + " ".join(map(str, emb.vertex_darts(v))))
    tw = [str(e) for e in range(emb.n_edges) if emb.twist[e]]
    if tw:
        lines.append("twist " + " ".join(tw))
    return "\n".join(lines) + "\n"


# -- one-vertex systems from relators --------------------------------------

_LETTERS = string.ascii_lowercase


def parse_letters(word: str) -> list[int]:
    """Letters ``a..z`` (uppercase = inverse) to darts of edges ``0..25``."""
    out = []
    for ch in word:
        if ch.isspace() or ch in "·.*":
            continue
        if ch.lower() not in _LETTERS:
            raise EmbeddingError(f"bad generator letter {ch!r}")
        e = _LETTERS.index(ch.lower())
        out.append(2 * e + (1 if ch.isupper() else 0))
    return out


def letters_of(darts: list[int]) -> str:
    return "".join(
        _LETTERS[d >> 1].upper() if d & 1 else _LETTERS[d >> 1] for d in darts
    )


def canonical_relator(genus: int, orientable: bool) -> list[int]:
    if orientable:
        out = []
        for i in range(genus):
            a, b = 2 * (2 * i), 2 * (2 * i + 1)
            out += [a, b, a ^ 1, b ^ 1]
        return out
    return [d for i in range(genus) for d in (2 * i, 2 * i)]


def _relator_twists(rel: list[int], n_e: int):
    """Twist vectors compatible with a one-face relator, particular solution first.

    An untwisted edge repeats its sign iff an odd number of twisted
    traversals separate its occurrences; a twisted edge needs an even number.
    This is a linear system over GF(2), solved with bitmask rows.
    """
    pos = [[] for _ in range(n_e)]
    for i, d in enumerate(rel):
        pos[d >> 1].append(i)
    rows = []
    for e in range(n_e):
        i, j = pos[e]
        same = rel[i] == rel[j]
        mask = 0
        for k in range(i + 1, j):
            mask ^= 1 << (rel[k] >> 1)
        mask &= ~(1 << e)
        if same:
            mask ^= 1 << e
        rows.append((mask, int(same)))
    pivots: dict[int, tuple[int, int]] = {}
    for mask, rhs in rows:
        for bit, (pm, pr) in pivots.items():
            if mask >> bit & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            if rhs:
                return
            continue
        bit = mask.bit_length() - 1
        for b2, (pm, pr) in list(pivots.items()):
            if pm >> bit & 1:
                pivots[b2] = (pm ^ mask, pr ^ rhs)
        pivots[bit] = (mask, rhs)
    free = [e for e in range(n_e) if e not in pivots]
    for combo in range(1 << min(len(free), 12)):
        val = 0
        for k, e in enumerate(free):
            if combo >> k & 1:
                val |= 1 << e
        for bit, (pm, pr) in pivots.items():
            rest = pm & ~(1 << bit)
            if (bin(rest & val).count("1") + pr) & 1:
                val |= 1 << bit
        yield tuple(bool(val >> e & 1) for e in range(n_e))


def _replay(rel: list[int], twist: tuple[bool, ...]):
    n_e = len(twist)
    rot = [-1] * (2 * n_e)
    rot_inv = [-1] * (2 * n_e)
    s = 1
    m = len(rel)
    for i, d in enumerate(rel):
        if twist[d >> 1]:
            s = -s
        nxt = rel[(i + 1) % m]
        a, b = (d ^ 1, nxt) if s > 0 else (nxt, d ^ 1)
        if rot[a] not in (-1, b) or rot_inv[b] not in (-1, a):
            return None
        rot[a], rot_inv[b] = b, a
    if -1 in rot:
        return None
    return rot


def from_relator(relator: list[int] | str, name: str = "") -> CellularEmbedding:
    """One-vertex, one-face embedding whose facial walk spells ``relator``.

    Twists are solved first, then the rotation by replaying the face
    traversal; the result is re-traversed and checked.
    """
    if isinstance(relator, str):
        relator = parse_letters(relator)
    rel = list(relator)
    n_e = (max(rel) >> 1) + 1 if rel else 0
    occ = [0] * n_e
    for d in rel:
        occ[d >> 1] += 1
    if any(k != 2 for k in occ):
        raise EmbeddingError("every generator must occur exactly twice in the relator")
    for twist in _relator_twists(rel, n_e):
        rot = _replay(rel, twist)
        if rot is None:
            continue
        try:
            emb = CellularEmbedding(1, n_e, rot, twist, name=name or letters_of(rel))
        except EmbeddingError:
            continue
        if emb.n_faces == 1:
            return emb
    raise EmbeddingError("relator does not describe a one-vertex surface")


def gen_canonical(genus: int, orientable: bool = True) -> CellularEmbedding:
    if genus < 0 or (not orientable and genus < 1):
        raise EmbeddingError("non-orientable surfaces have genus >= 1")
    if genus == 0:
        return CellularEmbedding(1, 0, [], (), name="sphere")
    rel = canonical_relator(genus, orientable)
    kind = "orientable" if orientable else "nonorientable"
    return from_relator(rel, name=f"canonical-{kind}-{genus}")


# -- duality -----------------------------------------------------------


@dataclass(frozen=True)
class DualEmbedding:
    """The dual graph with its induced rotation system.

    Dual edge ``e`` crosses primal edge ``e``; dual vertex ``f`` sits in
    primal face ``f``.  ``left_face[d]`` / ``right_face[d]`` give the faces on
    either side of primal dart ``d``; for orientable embeddings the dual dart
    ``dual_dart[d]`` runs from the left face to the right face.
    """

    embedding: CellularEmbedding
    left_face: tuple[int, ...]
    right_face: tuple[int, ...]
    dual_dart: tuple[int, ...]

    def dual_edge(self, e: int) -> int:
        return e

    def primal_edge(self, e: int) -> int:
        return e


def dual(emb: CellularEmbedding) -> DualEmbedding:
    n_e = emb.n_edges
    first_seen: dict[int, tuple[int, int]] = {}
    slot: dict[tuple[int, int], int] = {}
    twist = [False] * n_e
    for f, walk in enumerate(emb.faces):
        for d, s in walk:
            e = d >> 1
            # face orientation expressed in the frame of the edge's tail
            key = -s if (d & 1 and emb.twist[e]) else s
            if e not in first_seen:
                first_seen[e] = (f, key)
                slot[(d, s)] = 2 * e
            else:
                slot[(d, s)] = 2 * e + 1
                twist[e] = first_seen[e][1] != key
    rot = [0] * (2 * n_e)
    for walk in emb.faces:
        ds = [slot[st] for st in walk]
        for i, x in enumerate(ds):
            rot[x] = ds[(i + 1) % len(ds)]
    n_f = emb.n_faces
    if n_e == 0:
        demb = CellularEmbedding(1, 0, [], (), name="dual")
    else:
        demb = CellularEmbedding(n_f, n_e, rot, tuple(twist), name="dual")
    left = [0] * (2 * n_e)
    right = [0] * (2 * n_e)
    ddart = [0] * (2 * n_e)
    for d in range(2 * n_e):
        left[d] = emb.face_of[(d, 1)]
        right[d] = emb.face_of[(d ^ 1, 1)]
        st = (d, 1)
        ddart[d] = slot[st] if st in slot else slot[emb.reverse_state(*st)]
    return DualEmbedding(demb, tuple(left), tuple(right), tuple(ddart))


# -- refinements (same surface, more cells) ------------------------------


def subdivide_edge(emb: CellularEmbedding, e: int) -> CellularEmbedding:
    """Insert a degree-2 vertex in the middle of edge ``e``.

    The new edge takes over the second half; any twist stays on ``e``.
    """
    n = emb.n_edges
    rot = list(emb.rot) + [0, 0]
    fwd, bwd = 2 * n, 2 * n + 1
    # e's backward dart now leaves the new vertex; new edge runs new vertex -> old head
    head_dart = 2 * e + 1
    # the old head's rotation slot is taken over by the new backward dart
    prev = emb.rot_inv[head_dart]
    nxt = emb.rot[head_dart]
    if prev == head_dart:
        rot[bwd] = bwd
    else:
        rot[prev] = bwd
        rot[bwd] = nxt
    rot[head_dart] = fwd
    rot[fwd] = head_dart
    twist = tuple(emb.twist) + (False,)
    return CellularEmbedding(emb.n_vertices + 1, n + 1, rot, twist, name=emb.name)


def split_face(emb: CellularEmbedding, f: int, i: int, j: int) -> CellularEmbedding:
    """Add an edge across face ``f`` joining the corners before states ``i`` and ``j``."""
    walk = emb.faces[f]
    m = len(walk)
    n = emb.n_edges
    rot = list(emb.rot) + [0, 0]
    inv = list(emb.rot_inv) + [0, 0]
    new = (2 * n, 2 * n + 1)
    signs = []
    for k, x in zip((i % m, j % m), new):
        d, s = walk[k]
        pd, ps = walk[k - 1]
        back = pd ^ 1
        # the corner sits between back and d in the rotation (in order s)
        a, b = (back, d) if s > 0 else (d, back)
        if rot[a] == b:
            rot[a], rot[x], inv[x], inv[b] = x, b, a, x
        else:
            # corner already split by the first insertion at the same vertex
            raise EmbeddingError("corner is not a rotation gap")
        signs.append(s)
    twist = tuple(emb.twist) + (signs[0] != signs[1],)
    return CellularEmbedding(emb.n_vertices, n + 1, rot, twist, name=emb.name)


def random_refinement(
    emb: CellularEmbedding, steps: int, rng, paths: dict[int, list[int]] | None = None
) -> CellularEmbedding:
    """Randomly subdivide edges and split faces; the surface type is preserved.

    If ``paths`` maps darts of the original embedding to walks, those walks
    are rewritten in place so they keep tracing the same curves.
    """
    for _ in range(steps):
        if emb.n_edges and rng.random() < 0.4:
            e = rng.randrange(emb.n_edges)
            n = emb.n_edges
            emb = subdivide_edge(emb, e)
            if paths is not None:
                for walk in paths.values():
                    out = []
                    for d in walk:
                        if d == 2 * e:
                            out += [d, 2 * n]
                        elif d == 2 * e + 1:
                            out += [2 * n + 1, d]
                        else:
                            out.append(d)
                    walk[:] = out
            continue
        f = rng.randrange(emb.n_faces)
        m = len(emb.faces[f])
        if m < 2:
            continue
        i, j = rng.randrange(m), rng.randrange(m)
        if i == j:
            continue
        emb = split_face(emb, f, i, j)
    return emb
