"""Acceptance criteria, one printed PASS/FAIL line each."""

import contextlib
import io
import itertools
import random

import pytest

from surfhomotopy.cli import bench, run
from surfhomotopy.cyclic import canonical_from_labels, canonical_generator, cyclic_equal, free_homotopic
from surfhomotopy.oracle import Presentation, abelianize, dehn_trivial, word_from_darts
from surfhomotopy.tiling import RegionBoundError, boundary_profile, is_contractible, lift_walk

from conftest import canonical_pre, conjugate, random_walk


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, text: str) -> None:
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {text}")
        assert ok, text

    return emit


def trivial_word(rng, pre, max_len=64):
    """Product of conjugated relator rotations, freely cancelled, at most ``max_len`` long."""
    rel = list(pre.cut.word_A)
    w: list[int] = []
    while True:
        k = rng.randrange(len(rel))
        piece = rel[k:] + rel[:k]
        if rng.random() < 0.5:
            piece = [x ^ 1 for x in reversed(piece)]
        g = random_walk(rng, pre.embedding.n_edges, rng.randint(0, 8))
        nxt = w + conjugate(g, piece)
        if len(nxt) > max_len:
            return w
        w = nxt
        if rng.random() < 0.4:
            return w


def test_criterion_1_oracle_agreement(report):
    total = agree = 0
    for genus in (2, 3, 4):
        pre = canonical_pre(genus)
        pres = Presentation.canonical(genus)
        rng = random.Random(1000 + genus)
        for i in range(2000):
            if i % 2:
                w = random_walk(rng, 2 * genus, rng.randint(0, 64))
            else:
                w = trivial_word(rng, pre)
            total += 1
            agree += is_contractible(w, pre) == dehn_trivial(word_from_darts(w), pres)
    report(1, agree == total, f"word problem: {agree}/{total} words agree with Dehn (genus 2, 3, 4)")


def test_criterion_2_appendix_identities(report):
    cases = {
        "w1 w2^-1": "dcbdcb" + "aDCBDCBA",
        "u v' (2,5)": "bcd" + "Adc" + "CD" + "aDCB",
    }
    out = {}
    for name, word in cases.items():
        with contextlib.redirect_stdout(io.StringIO()):
            out[name] = run(["contractible", "--relator", "abcdABCD", word]) == 0
    ok = all(out.values())
    report(2, ok, "appendix identities contractible: " + ", ".join(f"{k}={v}" for k, v in out.items()))


def test_criterion_3_region_bound(report):
    fired = 0
    worst = 0.0
    runs = 0
    for genus in (2, 3):
        pre = canonical_pre(genus)
        rng = random.Random(3000 + genus)
        for _ in range(500):
            w = random_walk(rng, 2 * genus, rng.randint(1, 64))
            if rng.random() < 0.5:
                w = w * 6  # the cyclic module lifts sixth powers
            labels = pre.radial_walk(w).labels
            try:
                region = lift_walk(labels, pre.radial)
            except RegionBoundError:
                fired += 1
                continue
            runs += 1
            worst = max(worst, region.face_count / max(5 * len(labels), 1))
    report(3, fired == 0, f"region bound fired {fired} times in {runs + fired} lifts; max faces/(5|p|) = {worst:.3f}")


def test_criterion_4_small_region_structure(report):
    failures = []
    sampled = {}
    for genus in (2, 3):
        pre = canonical_pre(genus)
        r = pre.radial.r
        rng = random.Random(4000 + genus)
        count = 0
        while count < 60:
            w = random_walk(rng, 2 * genus, rng.randint(1, 24))
            labels = pre.radial_walk(w).labels
            region = lift_walk(labels, pre.radial)
            if region.face_count > 200:
                continue
            count += 1
            run_len, convex = boundary_profile(region, pre.radial)
            if run_len < r - 2 or convex < r:
                failures.append((genus, region.face_count, run_len, convex))
        sampled[genus] = count
    report(
        4, not failures,
        f"small regions {sampled}: {len(failures)} lack an (r-2)-run face or r convex vertices",
    )


def test_criterion_5_canonicity(report):
    yes_ok = same_cycle = no_ok = 0
    for i in range(500):
        genus = 2 + i % 2
        pre = canonical_pre(genus)
        rng = random.Random(5000 + i)
        while True:
            c = random_walk(rng, 2 * genus, rng.randint(1, 32))
            if not is_contractible(c, pre):
                break
        g = random_walk(rng, 2 * genus, rng.randint(0, 8))
        d = conjugate(g, c)
        yes_ok += free_homotopic(c, d, pre)
        same_cycle += cyclic_equal(canonical_generator(c, pre).tokens, canonical_generator(d, pre).tokens)
    n_no = 0
    i = 0
    while n_no < 500:
        genus = 2 + i % 2
        pre = canonical_pre(genus)
        rng = random.Random(50000 + i)
        i += 1
        c = random_walk(rng, 2 * genus, rng.randint(1, 32))
        d = random_walk(rng, 2 * genus, rng.randint(1, 32))
        if abelianize(word_from_darts(c), 2 * genus) == abelianize(word_from_darts(d), 2 * genus):
            continue
        n_no += 1
        no_ok += not free_homotopic(c, d, pre)
    ok = yes_ok == 500 and same_cycle == 500 and no_ok == 500
    report(5, ok, f"conjugate pairs homotopic {yes_ok}/500, same canonical cycle {same_cycle}/500, "
                  f"distinct homology apart {no_ok}/500")


def test_criterion_6_belt_bounds(report):
    n = 0
    worst_v = worst_e = 0.0
    violations = 0
    for i in range(300):
        genus = 2 + i % 2
        pre = canonical_pre(genus)
        rng = random.Random(6000 + i)
        c = random_walk(rng, 2 * genus, rng.randint(1, 48))
        if is_contractible(c, pre):
            continue
        try:
            gamma = canonical_generator(c, pre)
        except AssertionError:
            violations += 1
            continue
        s = gamma.stats
        n += 1
        worst_v = max(worst_v, s.v_inner / len(gamma))
        worst_e = max(worst_e, s.e_inner / len(gamma))
        violations += s.v_inner > len(gamma) or s.e_inner > 3 * len(gamma)
    report(6, violations == 0,
           f"{n} belts, {violations} violations; max V_I/|g| = {worst_v:.2f}, max E_I/|g| = {worst_e:.2f}")


def _klein_word(u, v):
    return ("a" * u if u >= 0 else "A" * -u) + ("b" * v if v >= 0 else "B" * -v)


def test_criterion_7_klein_bottle_rule(report):
    grid = range(-5, 6)
    mismatches = []
    total = 0
    for u, v, u2, v2 in itertools.product(grid, repeat=4):
        stated = v == v2 and ((v % 2 == 0 and u == u2) or (v % 2 == 1 and (u - u2) % 2 == 0))
        with contextlib.redirect_stdout(io.StringIO()):
            code = run(["conjugate", "--relator", "abaB", _klein_word(u, v), _klein_word(u2, v2)])
        total += 1
        if (code == 0) != stated:
            mismatches.append((u, v, u2, v2))
    example = ""
    if mismatches:
        u, v, u2, v2 = mismatches[0]
        example = f"; first: a^{u} b^{v} vs a^{u2} b^{v2} (conjugate by b, since b a b^-1 = a^-1)"
    report(7, not mismatches, f"stated rule reproduced on {total - len(mismatches)}/{total} grid points{example}")


def test_criterion_8_torus(report):
    pre = canonical_pre(1)
    rng = random.Random(8000)
    agree = 0
    for i in range(1000):
        c = random_walk(rng, 2, rng.randint(0, 20))
        if i % 2:
            d = c[:]
            rng.shuffle(d)
        else:
            d = random_walk(rng, 2, rng.randint(0, 20))
        same = abelianize(word_from_darts(c), 2) == abelianize(word_from_darts(d), 2)
        agree += free_homotopic(c, d, pre) == same
    report(8, agree == 1000, f"torus: {agree}/1000 pairs match homology equality")


def test_criterion_9_linearity(report):
    lengths = [2 ** e for e in range(10, 21, 2)]
    recs = list(bench(2, lengths, trials=1, seed=9))
    lines = []
    ok = True
    for query in ("contractible", "free"):
        ns = [r["ns_per_edge"] for r in recs if r["query"] == query]
        ratio = max(ns) / min(ns)
        ok &= ratio <= 3
        lines.append(f"{query} ns/edge {min(ns):.0f}..{max(ns):.0f} (ratio {ratio:.2f})")
    pre_t = sorted({r["k"]: r["preprocess_seconds"] for r in recs}.values())
    pre_ratio = pre_t[-1] / pre_t[0]
    ok &= pre_ratio <= 3
    lines.append(f"preprocessing ratio {pre_ratio:.2f}")
    free_ok = all(r["answer"] == "yes" for r in recs if r["query"] == "free")
    ok &= free_ok
    report(9, ok, "; ".join(lines) + " over k=2^10..2^20")


def test_criterion_10_idempotence(report):
    same = 0
    for i in range(200):
        genus = 2 + i % 2
        pre = canonical_pre(genus)
        rng = random.Random(10000 + i)
        while True:
            c = random_walk(rng, 2 * genus, rng.randint(1, 32))
            if not is_contractible(c, pre):
                break
        gamma = canonical_generator(c, pre)
        again = canonical_from_labels(gamma.labels_from_s(), pre.radial)
        same += cyclic_equal(gamma.tokens, again.tokens)
    report(10, same == 200, f"re-canonicalisation fixed {same}/200 canonical generators")
