import random

import pytest
from hypothesis import assume, given, strategies as st

from surfhomotopy.cyclic import (
    UnsupportedSurface,
    canonical_from_labels,
    canonical_generator,
    cyclic_equal,
    free_homotopic,
    homotopic_fixed,
    prefix_function,
)
from surfhomotopy.oracle import abelianize, word_from_darts
from surfhomotopy.reduction import preprocess
from surfhomotopy.surface_model import from_relator, gen_canonical, parse_letters, random_refinement
from surfhomotopy.tiling import is_contractible

from conftest import canonical_pre, conjugate, random_walk

seeds = st.integers(0, 2**32 - 1)
genera = st.sampled_from([2, 3])


def nontrivial(rng, pre, k_max):
    while True:
        c = random_walk(rng, pre.embedding.n_edges, rng.randint(1, k_max))
        if not is_contractible(c, pre):
            return c


@given(st.lists(st.integers(0, 3), max_size=12), st.lists(st.integers(0, 3), max_size=12))
def test_cyclic_equal_matches_naive(a, b):
    naive = len(a) == len(b) and any(a[i:] + a[:i] == b for i in range(max(len(a), 1)))
    assert cyclic_equal(a, b) == naive


def test_prefix_function():
    assert prefix_function("abcabd") == [0, 0, 0, 1, 2, 0]
    assert prefix_function("aaaa") == [0, 1, 2, 3]


@given(seeds, genera)
def test_conjugates_share_a_canonical_cycle(seed, genus):
    pre = canonical_pre(genus)
    rng = random.Random(seed)
    c = nontrivial(rng, pre, 16)
    g = random_walk(rng, 2 * genus, rng.randint(0, 8))
    a = canonical_generator(c, pre)
    b = canonical_generator(conjugate(g, c), pre)
    assert cyclic_equal(a.tokens, b.tokens)
    assert free_homotopic(c, conjugate(g, c), pre)


@given(seeds, genera)
def test_relator_insertion_is_invisible(seed, genus):
    pre = canonical_pre(genus)
    rng = random.Random(seed)
    c = nontrivial(rng, pre, 12)
    rel = list(pre.cut.word_A)
    k = rng.randrange(len(rel))
    rel = rel[k:] + rel[:k]
    i = rng.randint(0, len(c))
    assert free_homotopic(c, c[:i] + rel + c[i:], pre)


@given(seeds, genera)
def test_distinct_homology_is_never_homotopic(seed, genus):
    pre = canonical_pre(genus)
    rng = random.Random(seed)
    c = nontrivial(rng, pre, 12)
    d = nontrivial(rng, pre, 12)
    n = 2 * genus
    assume(abelianize(word_from_darts(c), n) != abelianize(word_from_darts(d), n))
    assert not free_homotopic(c, d, pre)


@given(seeds, genera)
def test_canonical_cycle_properties(seed, genus):
    pre = canonical_pre(genus)
    rng = random.Random(seed)
    c = nontrivial(rng, pre, 24)
    gamma = canonical_generator(c, pre)
    s = gamma.stats
    # belt bounds and length bound
    assert s.v_inner <= len(gamma) and s.e_inner <= 3 * len(gamma)
    assert len(gamma) <= len(pre.radial_walk(c))
    # a closed walk in a bipartite graph alternates vertex types
    types = [t & 1 for t in gamma.tokens]
    assert all(types[i] != types[(i + 1) % len(types)] for i in range(len(types)))
    again = canonical_from_labels(gamma.labels_from_s(), pre.radial)
    assert cyclic_equal(gamma.tokens, again.tokens)


@given(seeds, st.integers(2, 3))
def test_powers_repeat_the_canonical_cycle(seed, k):
    pre = canonical_pre(2)
    rng = random.Random(seed)
    c = nontrivial(rng, pre, 10)
    assert cyclic_equal(canonical_generator(c * k, pre).tokens, canonical_generator(c, pre).tokens * k)
    assert not free_homotopic(c, c * k, pre)


def test_rotation_and_inverse():
    pre = canonical_pre(2)
    c = parse_letters("aabcD")
    assert free_homotopic(c, c[2:] + c[:2], pre)
    assert not free_homotopic(c, [x ^ 1 for x in reversed(c)], pre)


def test_refined_surface_agrees_with_canonical():
    base = gen_canonical(2)
    paths = {d: [d] for d in range(8)}
    emb = random_refinement(base, 50, random.Random(4), paths)
    pre, pre0 = preprocess(emb), canonical_pre(2)
    rng = random.Random(5)
    lift = lambda w: [x for d in w for x in paths[d]]
    for _ in range(40):
        c = random_walk(rng, 4, rng.randint(1, 8))
        d = conjugate(random_walk(rng, 4, 3), c) if rng.random() < 0.5 else random_walk(rng, 4, 6)
        assert free_homotopic(lift(c), lift(d), pre) == free_homotopic(c, d, pre0)


def test_contractible_inputs():
    pre = canonical_pre(2)
    rel = list(pre.cut.word_A)
    assert free_homotopic([], rel, pre)
    assert not free_homotopic([], [0], pre)
    with pytest.raises(ValueError):
        canonical_from_labels([0, 0], pre.radial)


def test_fixed_basepoint():
    pre = canonical_pre(2)
    ab, ba = parse_letters("ab"), parse_letters("ba")
    assert homotopic_fixed(ab, ab, pre)
    assert not homotopic_fixed(ab, ba, pre)
    assert free_homotopic(ab, ba, pre)


@given(st.lists(st.integers(0, 3), max_size=10), st.lists(st.integers(0, 3), max_size=10))
def test_torus_free_homotopy_is_homology(c, d):
    pre = canonical_pre(1)
    same = abelianize(word_from_darts(c), 2) == abelianize(word_from_darts(d), 2)
    assert free_homotopic(c, d, pre) == same


def test_projective_plane():
    pre = canonical_pre(1, False)
    assert free_homotopic([0], [0, 0, 0], pre)
    assert not free_homotopic([0], [0, 0], pre)


def test_klein_bottle_sign_flip():
    pre = preprocess(from_relator("abaB"))
    a, b = parse_letters("a"), parse_letters("b")
    assert free_homotopic(a, parse_letters("A"), pre)
    assert free_homotopic(parse_letters("aab"), parse_letters("b"), pre)
    assert not free_homotopic(parse_letters("ab"), parse_letters("b"), pre)
    assert not free_homotopic(a, b, pre)


def test_higher_nonorientable_unsupported():
    pre = canonical_pre(3, False)
    with pytest.raises(UnsupportedSurface):
        free_homotopic([0], [2], pre)
    with pytest.raises(UnsupportedSurface):
        canonical_generator([0], pre)
