import random
from fractions import Fraction

import pytest

from conftest import random_word
from thompsonf.folding import build_core
from thompsonf.plmaps import (
    IDENTITY,
    X0_MAP,
    X1_MAP,
    evaluate_exact,
    fixed_set,
    oplus,
    stabilizes,
    word_to_plmap,
)
from thompsonf.subgroups import (
    JONES_GENERATOR_WORDS,
    SQUARE_BRIDGE_WORD,
    ConditionViolation,
    NamedSubgroup,
    WitnessExpr,
    augmentation_witness,
    classify_jones_extension,
    g_witness,
    jones_core,
    jones_member,
    psi_inverse,
    psi_map,
    savchuk_member,
    stabilizer_generators,
    stabilizer_member,
)
from thompsonf.words import (
    NormalForm,
    Word,
    multiply,
    normalize,
    parity_in_G,
    parse_word,
    word,
)

F = Fraction


def jones_product(rng, factors=8) -> Word:
    out = Word()
    for _ in range(rng.randrange(1, factors + 1)):
        g = parse_word(rng.choice(JONES_GENERATOR_WORDS))
        out = out * (g if rng.random() < 0.5 else g.inverse())
    return out


# --- membership and classification ---------------------------------------------


def test_jones_member_examples():
    assert jones_member("x4 x5")
    assert not jones_member("x0")
    assert not jones_member("x0^2")
    assert jones_member("")


def test_consecutive_pairs_are_members():
    for n in range(9):
        assert jones_member(f"x{n} x{n+1}")


def test_classify_examples():
    assert classify_jones_extension("x0 x1") == "JONES"
    assert classify_jones_extension("x0^2") == "G"
    assert classify_jones_extension("x0") == "F"


def test_classify_respects_parity(rng):
    for _ in range(100):
        w = random_word(rng, 10, 5)
        label = classify_jones_extension(w)
        if label == "JONES":
            assert jones_member(w)
        elif label == "G":
            assert parity_in_G(w) and not jones_member(w)
        else:
            assert not parity_in_G(w)


def test_jones_products_classify_as_jones(rng):
    for _ in range(100):
        assert classify_jones_extension(jones_product(rng)) == "JONES"


# --- witness machinery -----------------------------------------------------------


def test_witness_expr_evaluation():
    w = WitnessExpr.leaf("INPUT_W", "x0")
    j = WitnessExpr.leaf("JONES_CERTIFIED", "x0 x1")
    expr = WitnessExpr.mul(w.inv(), j)
    assert normalize(expr.evaluate()) == normalize("x0^-1 x0 x1")
    conj = w.conj(j)
    assert normalize(conj.evaluate()) == multiply(
        multiply(parse_word("x0 x1").inverse(), "x0"), "x0 x1"
    )


def test_witness_verify_checks_certified_leaves():
    bogus = WitnessExpr.leaf("JONES_CERTIFIED", "x0")
    assert not bogus.verify("x0")
    honest = WitnessExpr.leaf("JONES_CERTIFIED", "x0 x1")
    assert honest.verify("x0 x1")


def test_square_bridge_is_certified():
    assert jones_member(SQUARE_BRIDGE_WORD)
    identity = multiply(
        multiply(multiply("x0^-2", SQUARE_BRIDGE_WORD), "x0^2"), "x2 x3"
    )
    assert identity == normalize("x0 x2")


def test_g_witness_structure_for_the_first_square():
    expr = g_witness("x0^2")
    flat = str(expr).replace("(", "").replace(")", "").split()
    assert flat == ["y0", "y1^-1", "y0"]


def test_g_witness_generators_are_single_leaves():
    assert str(g_witness("x0 x2")) == "(y0)"
    assert str(g_witness("x1 x2")) == "(y1)"


def test_coset_certificate_multipliers_lie_in_the_subgroup(rng):
    from thompsonf.words import coset_minimize, coset_positivize

    for _ in range(60):
        w = random_word(rng, 8, 4)
        cert = coset_minimize(w)
        assert jones_member(cert.left)
        assert jones_member(cert.right)
        partial = coset_positivize(w)
        assert jones_member(partial.right)


@pytest.mark.parametrize(
    "text",
    ["x0 x2", "x0^2", "x1^2", "x5^2", "x0 x1", "x1 x2", "x2 x3", "x6 x7",
     "x0 x4", "x2 x7", "x3^-1 x1^-1", "x0^-1 x3", "x2 x4^-1",
     "x0 x1 x2 x2", "x0 x2 x4 x6^-1 x3^-1 x0^-1"],
)
def test_g_witness_verifies(text):
    assert g_witness(text).verify(text)


def test_g_witness_rejects_odd_length():
    with pytest.raises(ValueError):
        g_witness("x0")


def test_g_witness_random(rng):
    for _ in range(60):
        w = random_word(rng, 8, 4)
        if parity_in_G(w):
            assert g_witness(w).verify(w)


def test_even_words_lie_in_G_constructively(rng):
    # parity True exactly when a y-word evaluates back to w
    for _ in range(40):
        w = random_word(rng, 6, 3)
        if parity_in_G(w):
            expr = g_witness(w)
            for leaf in expr.leaves():
                assert leaf.tag == "G_GEN"


# --- the isomorphism and its pullback --------------------------------------------


def test_psi_examples():
    assert psi_map("x0") == normalize("x0 x2")
    assert psi_map("x1") == normalize("x1 x2")
    assert psi_map("x0 x1 x2^-1") == normalize("x0 x1")
    assert psi_map("") == NormalForm()


def test_psi_is_a_homomorphism(rng):
    for _ in range(80):
        a, b = random_word(rng, 7, 4), random_word(rng, 7, 4)
        assert psi_map(a * b) == multiply(psi_map(a), psi_map(b))
        assert parity_in_G(psi_map(a))


def test_psi_inverse_examples():
    assert psi_inverse("x0 x2") == normalize("x0")
    assert psi_inverse("x0 x1") == normalize("x0 x1 x2^-1")
    assert psi_inverse("x0^2") == normalize("x0 x1^-1 x0")


def test_psi_round_trip(rng):
    for _ in range(60):
        g = psi_map(random_word(rng, 7, 4))
        assert psi_map(psi_inverse(g)) == g
    with pytest.raises(ValueError):
        psi_inverse("x0")


def test_savchuk_examples():
    assert savchuk_member("x0 x1 x2^-1")
    assert savchuk_member("")
    assert not savchuk_member("x0")


def test_savchuk_fixes_nothing_inside():
    g = word_to_plmap("x0 x1 x2^-1")
    assert fixed_set(g) == ((F(0), F(0)), (F(1), F(1)))


def test_savchuk_members_share_no_interior_fixed_point(rng):
    h_gens = [psi_inverse(w) for w in JONES_GENERATOR_WORDS]
    common = None
    for _ in range(200):
        prod = Word()
        for _ in range(rng.randrange(1, 6)):
            g = rng.choice(h_gens).to_word()
            prod = prod * (g if rng.random() < 0.5 else g.inverse())
        assert savchuk_member(prod)
        points = {
            q for lo, hi in fixed_set(word_to_plmap(prod))
            for q in (lo, hi)
        }
        fixed_region = fixed_set(word_to_plmap(prod))
        probes = {F(n, 64) for n in range(0, 65)}
        fixed_probes = {
            q for q in probes
            if any(lo <= q <= hi for lo, hi in fixed_region)
        }
        common = fixed_probes if common is None else common & fixed_probes
    assert common == {F(0), F(1)}


# --- the augmentation engine ------------------------------------------------------


def test_augmentation_examples():
    expr = augmentation_witness("x0 x2")
    assert expr.verify("x0 x2")
    assert [leaf.tag for leaf in expr.leaves()] == ["INPUT_W"]
    assert augmentation_witness("x0 x3").verify("x0 x2")
    assert augmentation_witness("x2 x7").verify("x0 x2")


def test_augmentation_rejects_members():
    with pytest.raises(ValueError):
        augmentation_witness("x0 x1")


@pytest.mark.parametrize("i", range(6))
def test_augmentation_single_letters(i):
    assert augmentation_witness(f"x{i}").verify("x0 x2")


def test_augmentation_two_letter_grid():
    for i in range(6):
        for j in range(6):
            if j == i + 1:
                continue
            text = f"x{i} x{j}"
            assert augmentation_witness(text).verify("x0 x2"), text


def test_augmentation_random_longer_words(rng):
    done = 0
    while done < 60:
        w = random_word(rng, 9, 4)
        if len(w) < 3 or jones_member(w):
            continue
        assert augmentation_witness(w).verify("x0 x2"), str(w)
        done += 1


def test_augmentation_leaves_are_input_or_certified(rng):
    done = 0
    while done < 20:
        w = random_word(rng, 7, 3)
        if jones_member(w):
            continue
        expr = augmentation_witness(w)
        tags = {leaf.tag for leaf in expr.leaves()}
        assert tags <= {"INPUT_W", "JONES_CERTIFIED"}
        done += 1


# --- stabilizers -------------------------------------------------------------------


def test_stabilizer_generators_half():
    gens = stabilizer_generators([F(1, 2)])
    assert len(gens) == 4
    maps = [word_to_plmap(g) for g in gens]
    assert maps == [
        oplus(X0_MAP, IDENTITY),
        oplus(X1_MAP, IDENTITY),
        oplus(IDENTITY, X0_MAP),
        oplus(IDENTITY, X1_MAP),
    ]
    assert normalize(gens[2]) == normalize("x1")
    for g in gens:
        assert evaluate_exact(word_to_plmap(g), F(1, 2)) == F(1, 2)


def test_stabilizer_generators_quarter_half():
    points = [F(1, 4), F(1, 2)]
    gens = stabilizer_generators(points)
    assert len(gens) == 6
    for g in gens:
        assert stabilizes(word_to_plmap(g), points)


def test_stabilizer_generator_count_formula(rng):
    for pts in ([F(1, 2)], [F(1, 4), F(1, 2)], [F(1, 8), F(3, 8), F(3, 4)]):
        assert len(stabilizer_generators(pts)) == 2 * len(pts) + 2


def test_stabilizer_rejects_bad_points():
    with pytest.raises(ValueError):
        stabilizer_generators([])
    with pytest.raises(ValueError):
        stabilizer_generators([F(1, 3)])
    with pytest.raises(ValueError):
        stabilizer_generators([F(3, 2)])
    with pytest.raises(ValueError):
        stabilizer_generators([F(1, 2), F(1, 2)])


def test_stabilizer_member_examples():
    assert stabilizer_member("x1", [F(1, 2)])
    assert not stabilizer_member("x0", [F(1, 2)])
    assert not stabilizer_member("x0", [F(1, 4), F(1, 2)])


def test_stabilizer_member_routes_agree(rng):
    for points in ([F(1, 2)], [F(1, 4), F(1, 2)]):
        for _ in range(60):
            stabilizer_member(random_word(rng, 7, 3), points)  # raises on mismatch


def test_stabilizer_products_are_members(rng):
    points = [F(1, 4), F(1, 2)]
    gens = stabilizer_generators(points)
    for _ in range(40):
        prod = Word()
        for _ in range(rng.randrange(1, 5)):
            g = rng.choice(gens)
            prod = prod * (g if rng.random() < 0.5 else g.inverse())
        assert stabilizer_member(prod, points)


def test_stabilizer_monotone_under_inclusion(rng):
    small = [F(1, 2)]
    large = [F(1, 4), F(1, 2)]
    for _ in range(60):
        w = random_word(rng, 7, 3)
        if stabilizer_member(w, large):
            assert stabilizer_member(w, small)


# --- named subgroup front door ------------------------------------------------------


def test_named_subgroups():
    assert NamedSubgroup.from_name("jones").member("x2 x3")
    assert NamedSubgroup.from_name("g").member("x0^2")
    assert NamedSubgroup.from_name("savchuk").member("x0 x1 x2^-1")
    stab = NamedSubgroup.from_name("stab:1/2^1")
    assert stab.member("x1") and not stab.member("x0")
    assert str(stab) == "stab:1/2^1"
    assert NamedSubgroup.from_name("stab:1/4,1/2").points == (F(1, 4), F(1, 2))
    with pytest.raises(ValueError):
        NamedSubgroup.from_name("mystery")
    with pytest.raises(ValueError):
        NamedSubgroup.from_name("stab:1/3")
