"""Command-line front end.

Exit codes: 0 yes, 1 no, 2 error.  ``--json`` switches every command to
line-delimited JSON records.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .cyclic import UnsupportedSurface, canonical_generator, free_homotopic, homotopic_fixed
from .oracle import (
    Presentation,
    Verdict,
    abelianize,
    brute_conjugate,
    dehn_reduce,
    dehn_trivial,
    inverse,
    klein_conjugate,
    letters,
    word_from_darts,
    word_from_letters,
)
from .reduction import WalkError, parse_walk, preprocess
from .surface_model import (
    EmbeddingError,
    classify_surface,
    dump_embedding,
    from_relator,
    gen_canonical,
    letters_of,
    load_embedding,
)
from .tiling import is_contractible

YES, NO, ERROR = 0, 1, 2

APPENDIX_RELATOR = "abcdABCD"


class CheckFailure(RuntimeError):
    """The algorithm and the oracle disagree."""


@dataclass
class QueryConfig:
    command: str
    file: str | None = None
    genus: int | None = None
    non_orientable: bool = False
    relator: str | None = None
    walks: list[str] = field(default_factory=list)
    json: bool = False
    check: bool = False

    def __post_init__(self):
        sources = sum(x is not None for x in (self.file, self.genus, self.relator))
        if sources > 1:
            raise ValueError("give exactly one of FILE, --genus, --relator")

    def embedding(self):
        if self.file is not None:
            return load_embedding(Path(self.file).read_text())
        if self.relator is not None:
            return from_relator(self.relator)
        if self.genus is not None:
            return gen_canonical(self.genus, not self.non_orientable)
        raise ValueError("no embedding given (FILE, --genus or --relator)")


def _emit(cfg, record: dict, text: str) -> None:
    if cfg.json:
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def _answer(flag: bool) -> str:
    return "yes" if flag else "no"


# -- oracle cross-checks -----------------------------------------------------


def _check_contractible(pre, walk, answer: bool) -> None:
    word = word_from_darts(pre.reduced_word(walk))
    pres = Presentation.from_relator(word_from_darts(pre.radial.word))
    if not pres.relator or not pres.dehn_supported():
        return
    if dehn_trivial(word, pres) != answer:
        raise CheckFailure(f"oracle disagrees on {letters(word) or '1'}")


def _check_free(pre, c, d, answer: bool, bound: int = 3) -> None:
    wc = word_from_darts(pre.reduced_word(c))
    wd = word_from_darts(pre.reduced_word(d))
    pres = Presentation.from_relator(word_from_darts(pre.radial.word))
    if not pres.relator or not pres.dehn_supported():
        return
    if answer and abelianize(wc, pres) != abelianize(wd, pres):
        raise CheckFailure("homotopic walks with different homology classes")
    if not answer and brute_conjugate(wc, wd, pres, bound) == Verdict.YES:
        raise CheckFailure("oracle found a conjugator")


# -- commands ----------------------------------------------------------------


def cmd_info(cfg: QueryConfig) -> int:
    emb = cfg.embedding()
    sc = classify_surface(emb)
    rec = {
        "command": "info",
        "name": emb.name,
        "V": emb.n_vertices,
        "E": emb.n_edges,
        "F": emb.n_faces,
        "euler_char": sc.euler_char,
        "orientable": sc.orientable,
        "genus": sc.genus,
    }
    text = f"{emb.name or 'surface'}: V={emb.n_vertices} E={emb.n_edges} F={emb.n_faces}\n{sc}"
    _emit(cfg, rec, text)
    return YES


_WORKER_PRE = None


def _init_worker(pre) -> None:
    global _WORKER_PRE
    _WORKER_PRE = pre


def _contractible_one(walk) -> bool:
    return is_contractible(walk, _WORKER_PRE)


def cmd_contractible(cfg: QueryConfig, jobs: int = 1) -> int:
    pre = preprocess(cfg.embedding())
    walks = [parse_walk(w, pre.embedding.n_edges) for w in cfg.walks]
    if jobs > 1 and len(walks) > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(pre,)) as ex:
            answers = list(ex.map(_contractible_one, walks))
    else:
        answers = [is_contractible(w, pre) for w in walks]
    for text, walk, ans in zip(cfg.walks, walks, answers):
        if cfg.check:
            _check_contractible(pre, walk, ans)
        _emit(cfg, {"command": "contractible", "walk": text, "answer": _answer(ans)}, _answer(ans))
    return YES if all(answers) else NO


def cmd_homotopic(cfg: QueryConfig, fixed: bool) -> int:
    if len(cfg.walks) != 2:
        raise ValueError("homotopic needs exactly two walks")
    pre = preprocess(cfg.embedding())
    c, d = (parse_walk(w, pre.embedding.n_edges) for w in cfg.walks)
    if fixed:
        ans = homotopic_fixed(c, d, pre)
        if cfg.check:
            _check_contractible(pre, list(c) + [x ^ 1 for x in reversed(d)], ans)
    else:
        ans = free_homotopic(c, d, pre)
        if cfg.check:
            _check_free(pre, c, d, ans)
    mode = "fixed" if fixed else "free"
    rec = {"command": "homotopic", "mode": mode, "walks": cfg.walks, "answer": _answer(ans)}
    _emit(cfg, rec, _answer(ans))
    return YES if ans else NO


def cmd_word(cfg: QueryConfig) -> int:
    """Reduced word of each walk over the system of loops, with its canonical cycle."""
    pre = preprocess(cfg.embedding())
    rel = word_from_darts(pre.radial.word)
    pres = Presentation.from_relator(rel)
    for text in cfg.walks:
        walk = parse_walk(text, pre.embedding.n_edges)
        word = word_from_darts(pre.reduced_word(walk))
        rec = {"command": "word", "walk": text, "relator": letters(rel), "word": letters(word)}
        if pres.relator and pres.dehn_supported():
            rec["dehn"] = letters(dehn_reduce(word, pres))
        sc = classify_surface(pre.embedding)
        if sc.orientable and sc.genus >= 2 and not is_contractible(walk, pre):
            rec["canonical"] = list(canonical_generator(walk, pre).tokens)
        text_out = f"relator {letters(rel)}\nword {letters(word) or '1'}"
        if "dehn" in rec:
            text_out += f"\ndehn {rec['dehn'] or '1'}"
        if "canonical" in rec:
            text_out += f"\ncanonical {' '.join(map(str, rec['canonical']))}"
        _emit(cfg, rec, text_out)
    return YES


def cmd_conjugate(cfg: QueryConfig) -> int:
    """Conjugacy of two words in a one-relator surface group."""
    if len(cfg.walks) != 2:
        raise ValueError("conjugate needs exactly two words")
    if cfg.relator is None and cfg.genus is None:
        raise ValueError("conjugate needs --relator or --genus")
    return cmd_homotopic(cfg, fixed=False)


def cmd_gen_canonical(cfg: QueryConfig, out: str | None) -> int:
    if cfg.genus is None:
        raise ValueError("gen-canonical needs --genus")
    text = dump_embedding(cfg.embedding())
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return YES


def random_word(rng: random.Random, n_gens: int, k: int, reduced: bool = True) -> list[int]:
    """Uniform word over generators and inverses, as darts."""
    w: list[int] = []
    while len(w) < k:
        d = rng.randrange(2 * n_gens)
        if reduced and w and d == w[-1] ^ 1:
            continue
        w.append(d)
    return w


def parse_lengths(text: str) -> list[int]:
    out = []
    for tok in text.replace(",", " ").split():
        if tok.startswith("2^"):
            out.append(2 ** int(tok[2:]))
        else:
            out.append(int(tok))
    return out


def _median_time(fn, reps: int) -> float:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[reps // 2]


def bench(genus: int, lengths: list[int], trials: int, seed: int, queries=("contractible", "free")):
    """Yield timing records; preprocessing is timed on its own."""
    emb = gen_canonical(genus)
    pre = preprocess(emb)
    rng = random.Random(seed)
    # compile the kernels outside the timed region
    warm = random_word(random.Random(seed + 1), emb.n_edges, max(64, min(lengths)))
    is_contractible(warm, pre)
    free_homotopic(warm, warm[1:] + warm[:1], pre)
    for k in lengths:
        t_pre_k = _median_time(lambda: preprocess(emb), 5)
        for trial in range(trials):
            c = random_word(rng, emb.n_edges, k)
            if "contractible" in queries:
                t0 = time.perf_counter()
                ans = is_contractible(c, pre)
                dt = time.perf_counter() - t0
                yield {
                    "command": "bench", "query": "contractible", "answer": _answer(ans),
                    "k": k, "trial": trial, "seconds": dt, "ns_per_edge": dt * 1e9 / k,
                    "preprocess_seconds": t_pre_k, "genus": genus, "seed": seed,
                }
            if "free" in queries:
                d = c[k // 2:] + c[:k // 2]
                t0 = time.perf_counter()
                ans = free_homotopic(c, d, pre)
                dt = time.perf_counter() - t0
                yield {
                    "command": "bench", "query": "free", "answer": _answer(ans),
                    "k": k, "trial": trial, "seconds": dt, "ns_per_edge": dt * 1e9 / (2 * k),
                    "preprocess_seconds": t_pre_k, "genus": genus, "seed": seed,
                }



def cmd_bench(cfg: QueryConfig, lengths: str, trials: int, seed: int) -> int:
    genus = cfg.genus if cfg.genus is not None else 2
    if not cfg.json:
        print(f"# genus {genus}, seed {seed}")
        print(f"{'query':<13}{'k':>10}{'seconds':>12}{'ns/edge':>12}{'prep s':>10}")
    for rec in bench(genus, parse_lengths(lengths), trials, seed):
        _emit(
            cfg, rec,
            f"{rec['query']:<13}{rec['k']:>10}{rec['seconds']:>12.4f}"
            f"{rec['ns_per_edge']:>12.1f}{rec['preprocess_seconds']:>10.5f}",
        )
    return YES


# -- fixtures ------------------------------------------------------------------


def appendix_fixtures() -> dict:
    """Words over the genus-2 relator abcdABCD used as regression cases."""
    return {
        "relator": APPENDIX_RELATOR,
        "reactions": [
            {"u": "bcd", "v": "Adc", "w": "CD", "v_prime": "A", "u_v_prime": "bcdA"},
            {"u": "bcd", "v": "Ad", "w": "DCB", "v_prime": "A", "w_prime": "CB", "u_v_prime": "bcdA"},
        ],
        "stable_product": "cba" + "bcd" + "Adc",
        "w1": "dcbdcb",
        "w2": "abcdbcdA",
        "contractible": [
            "dcbdcb" + letters(inverse(word_from_letters("abcdbcdA"))),
            "bcd" + "Adc" + "CD" + letters(inverse(word_from_letters("bcdA"))),
        ],
    }


def random_fixtures(seed: int, n: int = 50, genus: int = 2) -> list[dict]:
    rng = random.Random(seed)
    emb = gen_canonical(genus)
    pre = preprocess(emb)
    out = []
    while len(out) < n:
        c = random_word(rng, emb.n_edges, rng.randint(1, 16))
        if is_contractible(c, pre):
            continue
        if len(out) % 2 == 0:
            g = random_word(rng, emb.n_edges, rng.randint(1, 6))
            d = g + c + [x ^ 1 for x in reversed(g)]
            label = "yes"
        else:
            d = random_word(rng, emb.n_edges, rng.randint(1, 16))
            wc, wd = word_from_darts(c), word_from_darts(d)
            if abelianize(wc, 2 * genus) == abelianize(wd, 2 * genus):
                continue
            label = "no"
        out.append({"genus": genus, "c": letters_of(c), "d": letters_of(d), "homotopic": label})
    return out


def klein_fixtures(bound: int = 5) -> list[dict]:
    rows = []
    for u in range(-bound, bound + 1):
        for v in range(-bound, bound + 1):
            for u2 in range(-bound, bound + 1):
                for v2 in range(-bound, bound + 1):
                    stated = v == v2 and ((v % 2 == 0 and u == u2) or (v % 2 == 1 and (u - u2) % 2 == 0))
                    rows.append({
                        "u": u, "v": v, "u2": u2, "v2": v2,
                        "stated_rule": stated, "conjugate": klein_conjugate(u, v, u2, v2),
                    })
    return rows


def cmd_fixtures(suite: str, out_dir: str, seed: int) -> int:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    if suite == "appendix":
        (path / "appendix.json").write_text(json.dumps(appendix_fixtures(), indent=2) + "\n")
        (path / "appendix_surface.txt").write_text(dump_embedding(from_relator(APPENDIX_RELATOR)))
    elif suite == "random":
        with open(path / "random_pairs.jsonl", "w") as fh:
            for rec in random_fixtures(seed):
                fh.write(json.dumps(rec) + "\n")
    elif suite == "klein":
        with open(path / "klein_table.jsonl", "w") as fh:
            for rec in klein_fixtures():
                fh.write(json.dumps(rec) + "\n")
    else:
        raise ValueError(f"unknown suite {suite!r}")
    print(f"wrote {suite} fixtures to {path}")
    return YES


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="surfhomotopy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp, walks: str | None = None):
        sp.add_argument("--file", "-f", help="embedding file")
        sp.add_argument("--genus", "-g", type=int, help="use the canonical surface of this genus")
        sp.add_argument("--non-orientable", action="store_true")
        sp.add_argument("--relator", help="one-vertex surface with this relator, e.g. abcdABCD")
        sp.add_argument("--json", action="store_true", help="line-delimited JSON output")
        if walks:
            sp.add_argument("walks", nargs=walks, help="letters (abAB) or signed edges ('+0 -3')")

    sp = sub.add_parser("info", help="report V, E, F, Euler characteristic and genus")
    sp.add_argument("path", nargs="?", help="embedding file")
    source(sp)

    sp = sub.add_parser("contractible", help="is each walk null-homotopic")
    source(sp, "+")
    sp.add_argument("--check", action="store_true", help="cross-check with the Dehn oracle")
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("homotopic", help="are two closed walks homotopic")
    source(sp, 2)
    sp.add_argument("--fixed-basepoint", action="store_true")
    sp.add_argument("--check", action="store_true")

    sp = sub.add_parser("word", help="reduced word and canonical cycle of each walk")
    source(sp, "+")

    sp = sub.add_parser("conjugate", help="conjugacy of two words in a surface group")
    source(sp, 2)
    sp.add_argument("--check", action="store_true")

    sp = sub.add_parser("gen-canonical", help="write the canonical one-vertex embedding")
    source(sp)
    sp.add_argument("--out", "-o")

    sp = sub.add_parser("bench", help="time queries on random words")
    source(sp)
    sp.add_argument("--lengths", default="2^10,2^12,2^14,2^16")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("fixtures", help="write regression fixtures")
    sp.add_argument("--suite", choices=["appendix", "random", "klein"], required=True)
    sp.add_argument("--out", "-o", default="fixtures")
    sp.add_argument("--seed", type=int, default=0)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fixtures":
            return cmd_fixtures(args.suite, args.out, args.seed)
        file = args.file
        if args.command == "info" and args.path:
            if file:
                raise ValueError("give the embedding file once")
            file = args.path
        cfg = QueryConfig(
            command=args.command,
            file=file,
            genus=args.genus,
            non_orientable=args.non_orientable,
            relator=args.relator,
            walks=list(getattr(args, "walks", []) or []),
            json=args.json,
            check=getattr(args, "check", False),
        )
        if args.command == "info":
            return cmd_info(cfg)
        if args.command == "contractible":
            return cmd_contractible(cfg, args.jobs)
        if args.command == "homotopic":
            return cmd_homotopic(cfg, args.fixed_basepoint)
        if args.command == "word":
            return cmd_word(cfg)
        if args.command == "conjugate":
            return cmd_conjugate(cfg)
        if args.command == "gen-canonical":
            return cmd_gen_canonical(cfg, args.out)
        if args.command == "bench":
            return cmd_bench(cfg, args.lengths, args.trials, args.seed)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return ERROR
    except (EmbeddingError, WalkError, UnsupportedSurface, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    return ERROR


def main() -> None:
    sys.exit(run())
