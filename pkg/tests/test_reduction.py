import random

import pytest
from hypothesis import assume, given, strategies as st

from surfhomotopy.oracle import Presentation, dehn_trivial, word_from_darts
from surfhomotopy.reduction import (
    WalkError,
    build_radial,
    compute_cut_graph,
    encode_walk,
    expand_terms,
    parse_walk,
    preprocess,
)
from surfhomotopy.surface_model import classify_surface, gen_canonical, random_refinement

from conftest import random_walk


def refined(genus, orientable, steps, seed):
    base = gen_canonical(genus, orientable)
    paths = {d: [d] for d in range(2 * base.n_edges)}
    emb = random_refinement(base, steps, random.Random(seed), paths)
    return base, emb, paths


@pytest.mark.parametrize("genus, orientable", [(1, True), (2, True), (3, True), (1, False), (2, False), (4, False)])
def test_cut_graph_structure(genus, orientable):
    _, emb, _ = refined(genus, orientable, 30, genus)
    cut = compute_cut_graph(emb)
    assert sum(cut.in_tree) == emb.n_vertices - 1
    sc = classify_surface(emb)
    assert len(cut.cotree_edges) == (2 * genus if orientable else genus)
    # every loop of the system appears twice along the single face
    counts = {}
    for d in cut.word_A:
        counts[d >> 1] = counts.get(d >> 1, 0) + 1
    assert set(counts.values()) == {2}
    assert len(cut.word_A) == (4 * sc.genus if orientable else 2 * sc.genus)


def test_radial_graph_permutations():
    rad = preprocess(gen_canonical(3)).radial
    r = rad.r
    assert sorted(rad.partner) == list(range(r))
    assert all(rad.partner[rad.partner[i]] == i and rad.partner[i] != i for i in range(r))
    assert sorted(rad.a_next) == list(range(r))
    assert sorted(rad.s_rotation()) == list(range(r))


def test_radial_graph_of_projective_plane():
    rad = build_radial((0, 0))
    assert rad.r == 2 and rad.same == (True, True)


def test_parse_walk_forms():
    assert parse_walk("+0 -1 +2", 3) == [0, 3, 4]
    assert parse_walk("aB") == [0, 3]
    with pytest.raises(WalkError):
        parse_walk("+7", 3)
    with pytest.raises(WalkError):
        parse_walk("+x", 3)
    with pytest.raises(WalkError):
        parse_walk("e", 3)


def test_open_walk_rejected():
    _, emb, _ = refined(2, True, 5, 3)
    pre = preprocess(emb)
    non_loop = next(d for d in range(2 * emb.n_edges) if emb.origin[d] != emb.origin[d ^ 1])
    with pytest.raises(WalkError, match="not closed"):
        encode_walk([non_loop], pre.index, emb)
    with pytest.raises(WalkError, match="out of range"):
        encode_walk([2 * emb.n_edges], pre.index, emb)


@pytest.mark.parametrize("genus, orientable", [(2, True), (3, True), (4, False)])
def test_face_walks_reduce_to_trivial(genus, orientable):
    _, emb, _ = refined(genus, orientable, 40, 7)
    pre = preprocess(emb)
    pres = Presentation.from_relator(word_from_darts(pre.cut.word_A))
    for f in range(emb.n_faces):
        word = word_from_darts(pre.reduced_word(emb.face_darts(f)))
        if pres.dehn_supported():
            assert dehn_trivial(word, pres)


def test_term_product_shape():
    pre = preprocess(gen_canonical(2))
    tp = encode_walk([0, 2, 1, 3], pre.index, pre.embedding)
    assert tp.height == 4
    assert len(pre.radial_walk([0, 2, 1, 3])) == 2 * tp.height
    assert expand_terms(tp, pre.cut.word_A)


@given(
    st.sampled_from([(2, True), (3, True), (4, False), (5, False)]),
    st.integers(0, 30),
    st.integers(0, 2**32 - 1),
)
def test_reduced_word_is_a_homotopy_invariant(surface, steps, seed):
    genus, orientable = surface
    base, emb, paths = refined(genus, orientable, steps, seed)
    pre = preprocess(emb)
    pres_A = Presentation.from_relator(word_from_darts(pre.cut.word_A))
    assume(pres_A.dehn_supported())
    pres = Presentation.canonical(genus, orientable)
    rng = random.Random(seed)
    for _ in range(5):
        w = random_walk(rng, base.n_edges, rng.randint(0, 16))
        walk = [x for d in w for x in paths[d]]
        reduced = word_from_darts(pre.reduced_word(walk))
        assert dehn_trivial(reduced, pres_A) == dehn_trivial(word_from_darts(w), pres)


def test_sphere_walks_are_trivial():
    pre = preprocess(gen_canonical(0))
    assert pre.reduced_word([]) == []
