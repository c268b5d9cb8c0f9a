"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines.  Every tolerance here is exact equality -- the package does no
floating-point arithmetic anywhere.
"""

import itertools
import json
import random
import warnings
from fractions import Fraction
from pathlib import Path

import pytest

from thompsonf.cli import main as cli_main
from thompsonf.folding import (
    bouquet,
    build_core,
    build_core_from_pairs,
    core_from_dot,
    core_from_json,
    fold_to_fixpoint,
)
from thompsonf.plmaps import (
    IDENTITY,
    components,
    fixed_set,
    oplus,
    pair_to_prefix,
    plmap_to_pair,
    stabilizes,
    word_to_plmap,
)
from thompsonf.subgroups import (
    JONES_GENERATOR_WORDS,
    SQUARE_BRIDGE_WORD,
    augmentation_witness,
    classify_jones_extension,
    g_witness,
    jones_member,
    stabilizer_generators,
    stabilizer_member,
)
from thompsonf.treepairs import reduce_dipoles, word_to_diagram
from thompsonf.words import (
    NormalForm,
    Word,
    coset_minimize,
    find_blocks,
    multiply_normal,
    normalize,
    normalize_stepwise,
    parse_word,
    parity_in_G,
    word,
)

GOLDEN = Path(__file__).parent / "golden"


def report(number: int, name: str) -> None:
    print(f"criterion {number:02d} {name}: PASS")


def rand_word(rng: random.Random, max_len: int, max_index: int) -> Word:
    return word(
        [(rng.randrange(max_index + 1), rng.choice([1, -1]))
         for _ in range(rng.randrange(max_len + 1))]
    )


def test_criterion_01_rewriting_confluence():
    rng = random.Random(101)
    strategies = ["leftmost", "rightmost"] + [random.Random(s) for s in (1, 2, 3)]
    for _ in range(1000):
        w = rand_word(rng, 20, 6)
        results = {normalize_stepwise(w, s) for s in strategies}
        results.add(normalize(w))
        assert len(results) == 1
        nf = results.pop()
        assert normalize(nf.to_word()) == nf
    report(1, "rewriting confluence, 1000 words x 5 strategies")


def test_criterion_02_presentation_relations():
    a = parse_word("x0 x1^-1")
    for power in (1, 2):
        b = parse_word(f"x0^-{power}") * parse_word("x1") * parse_word(f"x0^{power}")
        commutator = a.inverse() * b.inverse() * a * b
        assert normalize(commutator) == NormalForm()
    for j in range(0, 7):
        for i in range(j + 1, 7):
            relator = (
                parse_word(f"x{j}^-1 x{i} x{j}") * parse_word(f"x{i+1}").inverse()
            )
            assert normalize(relator) == NormalForm()
    report(2, "finite and infinite presentation relations hold")


def test_criterion_03_three_way_oracle():
    rng = random.Random(103)
    for _ in range(500):
        w1, w2 = rand_word(rng, 10, 4), rand_word(rng, 10, 4)
        by_nf = normalize(w1) == normalize(w2)
        by_pair = word_to_diagram(w1) == word_to_diagram(w2)
        by_plmap = word_to_plmap(w1) == word_to_plmap(w2)
        assert by_nf == by_pair == by_plmap
    report(3, "normal form / tree pair / PL map verdicts agree on 500 pairs")


def test_criterion_04_prefix_tables_and_fixed_set():
    assert pair_to_prefix(word_to_diagram("x0")).pairs == (
        ("00", "0"), ("01", "10"), ("1", "11")
    )
    assert pair_to_prefix(word_to_diagram("x1")).pairs == (
        ("0", "0"), ("100", "10"), ("101", "110"), ("11", "111")
    )
    assert pair_to_prefix(word_to_diagram("x0 x1 x2^-1")).pairs == (
        ("00", "0"), ("010", "10"), ("011", "1100"), ("10", "1101"), ("11", "111")
    )
    assert fixed_set(word_to_plmap("x0 x1 x2^-1")) == (
        (Fraction(0), Fraction(0)), (Fraction(1), Fraction(1))
    )
    report(4, "binary substitution tables and fixed set reproduced exactly")


def test_criterion_05_worked_two_generator_core():
    auto = bouquet([word_to_diagram("x0"), word_to_diagram("x1 x2 x1^-1")])
    assert auto.edges_allocated == 20 and auto.cells_allocated == 12
    assert auto.trace[0].edge_classes[0] == frozenset({1, 7, 8, 20})
    core = fold_to_fixpoint(auto)
    folds = [ev for ev in core.trace if ev.kind == "fold"]
    assert folds[0].cells == frozenset({1, 4, 5, 12})
    assert core.edge_count == 6 and core.cell_count == 5
    assert not core.accepts(word_to_diagram("x1"))
    rng = random.Random(105)
    gens = [parse_word("x0"), parse_word("x1 x2 x1^-1")]
    for _ in range(100):
        prod = Word()
        for _ in range(rng.randrange(1, 7)):
            g = rng.choice(gens)
            prod = prod * (g if rng.random() < 0.5 else g.inverse())
        assert core.accepts(word_to_diagram(prod))
    from thompsonf.words import multiply

    alt = build_core(["x0", str(multiply("x0", "x1 x2 x1^-1"))])
    assert alt.canonical() == core.canonical()
    report(5, "worked 2-core: trace, figure counts, rejection, acceptance")


def test_criterion_06_jones_core():
    for n in range(9):
        assert jones_member(f"x{n} x{n+1}")
    for text in ("x0", "x1", "x2", "x0^2"):
        assert not jones_member(text)
    rng = random.Random(106)
    checked = 0
    while checked < 200:
        w = rand_word(rng, 10, 5)
        if jones_member(w):
            continue
        assert classify_jones_extension(w) == ("G" if parity_in_G(w) else "F")
        checked += 1
    for _ in range(200):
        prod = Word()
        for _ in range(rng.randrange(1, 9)):
            g = parse_word(rng.choice(JONES_GENERATOR_WORDS))
            prod = prod * (g if rng.random() < 0.5 else g.inverse())
        assert classify_jones_extension(prod) == "JONES"
    report(6, "consecutive-pair core membership and classification")


def _all_normal_forms(max_len: int, max_index: int):
    """Every normal form over indices <= max_index with length <= max_len."""
    for p in range(max_len + 1):
        for pos in itertools.combinations_with_replacement(range(max_index + 1), p):
            for n in range(max_len - p + 1):
                for neg_sorted in itertools.combinations_with_replacement(
                    range(max_index + 1), n
                ):
                    candidate = NormalForm(pos, tuple(reversed(neg_sorted)))
                    if normalize(candidate.to_word()) == candidate:
                        yield candidate


def test_criterion_07_witness_engines():
    checked = 0
    for nf in _all_normal_forms(6, 4):
        if len(nf) % 2:
            continue
        assert g_witness(nf).verify(nf), str(nf)
        checked += 1
    assert checked > 500
    for i in range(6):
        for j in range(6):
            if j == i + 1:
                continue
            assert augmentation_witness(f"x{i} x{j}").verify("x0 x2")
    rng = random.Random(107)
    done = 0
    while done < 100:
        w = rand_word(rng, 9, 4)
        if len(normalize(w)) <= 2 or jones_member(w):
            continue
        assert augmentation_witness(w).verify("x0 x2")
        done += 1
    # the two pinned identities, replayed letter by letter
    y0, y1 = parse_word("x0 x2"), parse_word("x1 x2")
    assert normalize(y0 * y1 * y0.inverse() * y1.inverse() * y0) == normalize("x0 x1")
    bridge = parse_word("x0^-2") * parse_word(SQUARE_BRIDGE_WORD) * parse_word("x0^2 x2 x3")
    assert jones_member(SQUARE_BRIDGE_WORD)
    assert normalize(bridge) == normalize("x0 x2")
    report(7, f"witness engines: {checked} exhaustive G-witnesses, grids, identities")


def _raw_multiply(a: tuple, b: tuple) -> tuple:
    """Product of normal forms as bare (positive, negative) index tuples."""
    from thompsonf.words import _eliminate_cancellable, _push_negative, _push_positive

    pos, neg = list(a[0]), list(a[1])
    for i in b[0]:
        _push_positive(pos, neg, i)
    for j in b[1]:
        _push_negative(pos, neg, j)
    _eliminate_cancellable(pos, neg)
    return tuple(pos), tuple(neg)


def _jones_products_up_to_three_factors() -> list[tuple]:
    gens = [normalize(s) for s in JONES_GENERATOR_WORDS]
    gens += [g.inverse() for g in gens]
    raw_gens = [(g.pos, g.neg) for g in gens]
    layer = {((), ())}
    elements = {((), ())}
    for _ in range(3):
        layer = {_raw_multiply(a, g) for a in layer for g in raw_gens} - elements
        elements |= layer
    return sorted(elements, key=lambda t: (len(t[0]) + len(t[1]), t))


def test_criterion_08_coset_minimization_against_brute_force():
    # The independent oracle: enumerate l * w * r with l, r running over all
    # products of at most 6 letters (3 factors) of the three generator pairs
    # and their inverses, and take the minimum normal-form length.  Built
    # from raw normal-form arithmetic only; the minimizer never enters.
    multipliers = _jones_products_up_to_three_factors()

    def length(t: tuple) -> int:
        return len(t[0]) + len(t[1])

    right_min_cache: dict[tuple, int] = {}

    def right_min(a: tuple) -> int:
        got = right_min_cache.get(a)
        if got is None:
            best = length(a)
            floor = best & 1  # multipliers have even length, parity is fixed
            for r in multipliers:
                if best == floor:
                    break
                value = length(_raw_multiply(a, r))
                if value < best:
                    best = value
            right_min_cache[a] = got = best
        return got

    letters = [(i, s) for i in range(3) for s in (1, -1)]
    inputs = {
        normalize(word(combo))
        for n in range(4)
        for combo in itertools.product(letters, repeat=n)
    }
    assert len(inputs) > 100
    for nf in inputs:
        raw = (nf.pos, nf.neg)
        floor = len(nf) & 1
        best = len(nf)
        for l in multipliers:
            if best == floor:
                break
            a = _raw_multiply(l, raw)
            if length(a) - 6 >= best:  # a right multiplier removes at most 6 letters
                continue
            best = min(best, right_min(a))
        cert = coset_minimize(nf)
        assert cert.matches(nf)
        assert cert.representative.is_positive
        assert not find_blocks(cert.representative)
        assert len(cert.representative) == best, (str(nf), best)
    report(8, f"coset minimization matches brute force on {len(inputs)} elements")


def test_criterion_09_stabilizers():
    rng = random.Random(109)
    for points in ([Fraction(1, 2)], [Fraction(1, 4), Fraction(1, 2)]):
        gens = stabilizer_generators(points)
        assert len(gens) == 2 * len(points) + 2
        for g in gens:
            assert stabilizes(word_to_plmap(g), points)
        assert not stabilizer_member("x0", points)
        for _ in range(200):
            stabilizer_member(rand_word(rng, 8, 4), points)  # raises on route mismatch
    report(9, "stabilizer generators, counts, and double-route agreement")


def test_criterion_10_components_and_closure():
    rng = random.Random(110)
    for _ in range(100):
        f = word_to_plmap(rand_word(rng, 5, 3))
        g = word_to_plmap(rand_word(rng, 5, 3))
        h = oplus(f, g)
        core = build_core_from_pairs([plmap_to_pair(h)])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            parts = components(h)
        prod = IDENTITY
        for part in parts:
            prod = prod * part
        assert prod == h
        for part in parts:
            assert core.accepts(reduce_dipoles(plmap_to_pair(part)))
    report(10, "components multiply back and land in the closure, 100 sums")


SPEC_CLI_EXAMPLES = [
    (["nf", "x1 x0"], 0, "x0 x2"),
    (["member", "--subgroup", "jones", "x0 x0"], 1, "false"),
    (["act", "x0", ".0(10)"], 0, ".10(01)"),
]


def test_criterion_11_cli_golden(tmp_path, capsys):
    for argv, want_code, want_out in SPEC_CLI_EXAMPLES:
        code = cli_main(argv)
        out = capsys.readouterr().out.strip()
        assert (code, out) == (want_code, want_out), argv
    # golden cores replay byte for byte
    code = cli_main(["core", "x0 x1", "x1 x2", "x2 x3"])
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert out == (GOLDEN / "jones_core.json").read_text().strip()
    code = cli_main(["core", "x0", "x1 x2 x1^-1"])
    out = capsys.readouterr().out.strip()
    assert code == 0
    assert out == (GOLDEN / "two_generator_core.json").read_text().strip()
    # exports parse back to canonical-equal objects
    out_json = tmp_path / "core.json"
    out_dot = tmp_path / "core.dot"
    code = cli_main(
        ["export", "x0", "x1 x2 x1^-1", "--out-json", str(out_json), "--dot", str(out_dot)]
    )
    capsys.readouterr()
    assert code == 0
    reference = build_core(["x0", "x1 x2 x1^-1"])
    assert core_from_json(out_json.read_text()).canonical() == reference.canonical()
    assert core_from_dot(out_dot.read_text()).canonical() == reference.canonical()
    assert core_from_dot((GOLDEN / "two_generator_core.dot").read_text()).canonical() == reference.canonical()
    report(11, "CLI examples, golden cores, and export round trips")
