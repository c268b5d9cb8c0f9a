"""Named subgroups of F and certifying witnesses.

Four families of subgroups are decidable here:

* the subgroup A = <x_0x_1, x_1x_2, x_2x_3> (all consecutive pairs
  x_n x_{n+1} lie in it); it is closed, so acceptance by its 2-core is exact
  membership;
* the index-2 subgroup G = <x_0x_2, x_1x_2> of all elements with
  even-length normal form;
* H = Psi^{-1}(A), the pullback of A under the isomorphism
  Psi: F -> G, x_0 -> x_0x_2, x_1 -> x_1x_2 -- a maximal subgroup of
  infinite index that fixes no point of (0,1);
* stabilizers H_U of finite sets U of dyadic points, decided both through
  exact PL evaluation and through the 2-core of an explicit generating set
  (the two routes are cross-checked on every query).

Adding any non-member w to A generates at least G, and exactly G or F
according to the parity of w.  The witness engines below make such facts
checkable: they output expression trees over certified leaves that evaluate,
letter by letter, to the claimed element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Literal

from . import plmaps
from .folding import FoldedCore, build_core
from .plmaps import PLMap, is_dyadic, plmap_to_pair, stabilizes
from .treepairs import word_to_diagram, diagram_to_word
from .words import (
    NormalForm,
    Word,
    WordLike,
    _to_word,
    coset_minimize,
    normalize,
    parity_in_G,
    parse_word,
    skips,
    word,
)

JONES_GENERATOR_WORDS = ("x0 x1", "x1 x2", "x2 x3")

#: x_0^2 x_1 (x_0 x_1 x_2)^{-1} lies in A; it certifies <A, x_0^2> >= G.
SQUARE_BRIDGE_WORD = "x0^2 x1 x2^-1 x1^-1 x0^-1"


@lru_cache(maxsize=1)
def jones_core() -> FoldedCore:
    return build_core([parse_word(w) for w in JONES_GENERATOR_WORDS])


def jones_member(w: WordLike) -> bool:
    """Exact membership in <x_0x_1, x_1x_2, x_2x_3> (a closed subgroup)."""
    return jones_core().accepts(word_to_diagram(w))


def classify_jones_extension(w: WordLike) -> Literal["JONES", "G", "F"]:
    """What <A, w> is: A itself, the index-2 subgroup G, or all of F.

    Any non-member of A pushes the subgroup up to at least G, and parity
    decides between G and F.
    """
    if jones_member(w):
        return "JONES"
    return "G" if parity_in_G(w) else "F"


# --- witness expressions ------------------------------------------------------

Tag = Literal["INPUT_W", "JONES_CERTIFIED", "G_GEN", "F_GEN"]


@dataclass(frozen=True)
class WitnessExpr:
    """An expression tree certifying a membership identity.

    ``op`` is one of ``leaf``, ``mul``, ``inv``, ``conj`` (``conj`` means
    args[0] conjugated by args[1], i.e. b^{-1} a b).  Leaves carry a tag and
    a word; JONES_CERTIFIED leaves must be accepted by the core of A, which
    :meth:`verify` checks along with the evaluation.
    """

    op: str
    args: tuple = ()
    tag: Tag | None = None
    payload: Word | None = None
    name: str = ""

    @staticmethod
    def leaf(tag: Tag, payload: WordLike, name: str = "") -> WitnessExpr:
        return WitnessExpr("leaf", tag=tag, payload=_to_word(payload), name=name)

    @staticmethod
    def mul(*args: WitnessExpr) -> WitnessExpr:
        return WitnessExpr("mul", tuple(args))

    def inv(self) -> WitnessExpr:
        return WitnessExpr("inv", (self,))

    def conj(self, by: WitnessExpr) -> WitnessExpr:
        return WitnessExpr("conj", (self, by))

    def evaluate(self) -> Word:
        # expressions share subtrees heavily, so memoize per node
        cached = getattr(self, "_value", None)
        if cached is not None:
            return cached
        if self.op == "leaf":
            value = self.payload
        elif self.op == "mul":
            value = Word()
            for a in self.args:
                value = value * a.evaluate()
        elif self.op == "inv":
            value = self.args[0].evaluate().inverse()
        elif self.op == "conj":
            base, by = self.args[0].evaluate(), self.args[1].evaluate()
            value = by.inverse() * base * by
        else:
            raise ValueError(f"unknown op {self.op!r}")
        object.__setattr__(self, "_value", value)
        return value

    def leaves(self) -> Iterable[WitnessExpr]:
        if self.op == "leaf":
            yield self
        else:
            for a in self.args:
                yield from a.leaves()

    def substitute(self, tag: Tag, replacement: Word) -> WitnessExpr:
        if self.op == "leaf":
            if self.tag == tag:
                return WitnessExpr.leaf(tag, replacement, self.name)
            return self
        return WitnessExpr(self.op, tuple(a.substitute(tag, replacement) for a in self.args))

    def verify(self, target: WordLike) -> bool:
        """Evaluation normalizes to the target and all certified leaves check out."""
        if normalize(self.evaluate()) != normalize(target):
            return False
        seen: set[int] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:  # shared subtrees are checked once
                continue
            seen.add(id(node))
            if node.op == "leaf":
                if node.tag == "JONES_CERTIFIED" and not jones_member(node.payload):
                    return False
            else:
                stack.extend(node.args)
        return True

    def __str__(self) -> str:
        if self.op == "leaf":
            if self.tag == "INPUT_W":
                return "W"
            if self.tag == "JONES_CERTIFIED":
                return f"J[{self.payload}]"
            return self.name or f"[{self.payload}]"
        if self.op == "mul":
            return "(" + " ".join(str(a) for a in self.args) + ")"
        if self.op == "inv":
            return f"{self.args[0]}^-1"
        return f"{self.args[0]}^({self.args[1]})"


def _jones(w: WordLike, name: str = "") -> WitnessExpr:
    return WitnessExpr.leaf("JONES_CERTIFIED", w, name)


Y0 = WitnessExpr.leaf("G_GEN", "x0 x2", "y0")
Y1 = WitnessExpr.leaf("G_GEN", "x1 x2", "y1")


def _power(e: WitnessExpr, n: int) -> WitnessExpr:
    if n == 0:
        return WitnessExpr.mul()
    if n < 0:
        return _power(e, -n).inv()
    return WitnessExpr.mul(*([e] * n))


# The chain of two-letter identities behind "even length implies membership
# in G".  Each entry evaluates to the element named on the left; all are in
# terms of y0 = x_0x_2 and y1 = x_1x_2.

@lru_cache(maxsize=1)
def _g_chain() -> dict[str, WitnessExpr]:
    e: dict[str, WitnessExpr] = {}
    e["x0^2"] = WitnessExpr.mul(Y0, Y1.inv(), Y0)
    e["x0 x3^-1"] = WitnessExpr.mul(Y0.inv(), e["x0^2"])  # (x0x2)^{-1} x0^2
    e["x0 x4"] = WitnessExpr.mul(e["x0 x3^-1"].inv(), e["x0^2"])
    e["x0 x5^-1"] = WitnessExpr.mul(e["x0 x4"].inv(), e["x0^2"])
    e["x2 x5^-1"] = WitnessExpr.mul(e["x0^2"].inv(), e["x0^2"].conj(Y0))
    e["x0 x2^-1"] = WitnessExpr.mul(e["x0 x5^-1"], e["x2 x5^-1"].inv())
    e["x0 x1"] = WitnessExpr.mul(e["x0^2"], e["x0 x2^-1"].inv())
    # x1 x0 = x0 x2 as elements, so x1^2 = (x1x0) x0^{-2} (x0x1)
    e["x1^2"] = WitnessExpr.mul(Y0, e["x0^2"].inv(), e["x0 x1"])
    e["x3^2"] = e["x1^2"].conj(e["x0^2"])
    e["x0 x3"] = WitnessExpr.mul(e["x0 x3^-1"], e["x3^2"])
    # x2 x0 = x0 x3 as elements, so x2^2 = (x2x0) x0^{-2} (x0x2)
    e["x2^2"] = WitnessExpr.mul(e["x0 x3"], e["x0^2"].inv(), Y0)
    e["x2 x3"] = WitnessExpr.mul(e["x0 x3"], e["x0^2"].inv(), e["x0 x3"])
    return e


@lru_cache(maxsize=None)
def _square(n: int) -> WitnessExpr:
    """x_n^2 as a product of y0, y1."""
    chain = _g_chain()
    if n == 0:
        return chain["x0^2"]
    if n == 1:
        return chain["x1^2"]
    if n == 2:
        return chain["x2^2"]
    base = chain["x1^2"] if n % 2 else chain["x2^2"]
    shift = (n - 1) // 2 if n % 2 else (n - 2) // 2
    return base.conj(_power(chain["x0^2"], shift))


@lru_cache(maxsize=None)
def _consecutive(i: int) -> WitnessExpr:
    """x_i x_{i+1} as a product of y0, y1."""
    chain = _g_chain()
    if i == 0:
        return chain["x0 x1"]
    if i == 1:
        return Y1
    if i == 2:
        return chain["x2 x3"]
    base = Y1 if i % 2 else chain["x2 x3"]
    shift = (i - 1) // 2 if i % 2 else (i - 2) // 2
    return base.conj(_power(chain["x0^2"], shift))


@lru_cache(maxsize=None)
def _positive_pair(i: int, j: int) -> WitnessExpr:
    """x_i x_j (i <= j) as a product of y0, y1, by induction on the gap."""
    if j - i == 0:
        return _square(i)
    if j - i == 1:
        return _consecutive(i)
    return WitnessExpr.mul(_consecutive(i), _square(i + 1).inv(), _positive_pair(i + 1, j))


@lru_cache(maxsize=None)
def _signed_pair(i: int, si: int, j: int, sj: int) -> WitnessExpr:
    """x_i^{si} x_j^{sj} as a product of y0, y1 (signs +-1)."""
    if (i, si, j, sj) == (0, 1, 2, 1):
        return Y0
    factors: list[WitnessExpr] = []
    if si < 0:
        factors.append(_square(i).inv())
    factors.append(_positive_pair(i, j) if i <= j else _positive_pair(j, i + 1))
    if sj < 0:
        factors.append(_square(j).inv())
    if len(factors) == 1:
        return factors[0]
    return WitnessExpr.mul(*factors)


def g_witness(w: WordLike) -> WitnessExpr:
    """Express an even-length element through y0 = x_0x_2 and y1 = x_1x_2.

    The normal form is split into consecutive letter pairs and each pair is
    expanded by the two-letter identity chains.  The returned expression
    evaluates back to w; a failure to do so raises.
    """
    nf = normalize(w)
    if len(nf) % 2:
        raise ValueError(f"{nf} has odd length and lies outside G")
    letters = [(let.index, let.sign) for let in nf.to_word()]
    parts = [
        _signed_pair(letters[k][0], letters[k][1], letters[k + 1][0], letters[k + 1][1])
        for k in range(0, len(letters), 2)
    ]
    expr = WitnessExpr.mul(*parts)
    if normalize(expr.evaluate()) != nf:
        raise AssertionError(f"pair-chain witness failed to evaluate to {nf}")
    return expr


# --- the isomorphism x_i -> y_i and the pulled-back subgroup ------------------


def psi_map(w: WordLike) -> NormalForm:
    """Image under the injective endomorphism x_0 -> x_0x_2, x_1 -> x_1x_2.

    Letters x_i with i >= 2 are first expanded through
    x_i = x_0^{-(i-1)} x_1 x_0^{i-1}; the image lands in G.
    """
    two_letter: list[tuple[int, int]] = []
    for let in _to_word(w):
        if let.index < 2:
            two_letter.append((let.index, let.sign))
        else:
            k = let.index - 1
            two_letter.extend([(0, -1)] * k)
            two_letter.append((1, let.sign))
            two_letter.extend([(0, 1)] * k)
    image: list[tuple[int, int]] = []
    for index, sign in two_letter:
        pair = [(index, 1), (2, 1)]
        if sign < 0:
            pair = [(2, -1), (index, -1)]
        image.extend(pair)
    return normalize(word(image))


def _flatten_to_y_letters(expr: WitnessExpr) -> list[tuple[int, int]]:
    if expr.op == "leaf":
        if expr.tag != "G_GEN":
            raise ValueError("expected an expression over the G generators only")
        return [(0 if expr.name == "y0" else 1, 1)]
    if expr.op == "mul":
        out: list[tuple[int, int]] = []
        for a in expr.args:
            out.extend(_flatten_to_y_letters(a))
        return out
    if expr.op == "inv":
        return [(i, -s) for i, s in reversed(_flatten_to_y_letters(expr.args[0]))]
    base = _flatten_to_y_letters(expr.args[0])
    by = _flatten_to_y_letters(expr.args[1])
    return [(i, -s) for i, s in reversed(by)] + base + by


def psi_inverse(g: WordLike) -> NormalForm:
    """The unique element mapping to g (g must have even length).

    A witness expression of g over y0, y1 is flattened to a word in the
    y-letters and reinterpreted with y_i -> x_i.
    """
    nf = normalize(g)
    if len(nf) % 2:
        raise ValueError(f"{nf} has odd length and lies outside G")
    y_word = _flatten_to_y_letters(g_witness(nf))
    return normalize(word(y_word))


def savchuk_member(w: WordLike) -> bool:
    """Membership in H = Psi^{-1}(<x_0x_1, x_1x_2, x_2x_3>)."""
    return jones_member(psi_map(w))


# --- the augmentation witness: x_0 x_2 from any non-member -------------------


class ConditionViolation(AssertionError):
    """The skip condition failed on a minimized word; indicates a bug."""


def augmentation_witness(w: WordLike) -> WitnessExpr:
    """A product evaluating to x_0 x_2 over w and certified A-members.

    This is the constructive content of "adding any non-member to A yields
    at least G": reduce w to a positive block-free double coset
    representative, then run the two-letter reduction chains; every leaf is
    either w itself or a word accepted by the core of A.
    """
    if jones_member(w):
        raise ValueError(f"{normalize(w)} already lies in the subgroup")
    cert = coset_minimize(w)
    factors = [WitnessExpr.leaf("INPUT_W", w)]
    if len(cert.left):
        factors.insert(0, _jones(cert.left))
    if len(cert.right):
        factors.append(_jones(cert.right))
    expr = WitnessExpr.mul(*factors)
    rep = cert.representative
    if len(rep) == 0:
        raise AssertionError("minimization produced the identity for a non-member")
    if len(rep) == 1:
        return _ladder_witness(rep.pos[0], expr)
    if len(rep) == 2:
        return _two_letter_witness(rep.pos[0], rep.pos[1], expr)
    return _long_witness(rep, expr)


def _ladder_witness(i: int, expr: WitnessExpr) -> WitnessExpr:
    """From the single letter x_i, climb to x_0 and x_2 one index at a time."""
    ladder: dict[int, WitnessExpr] = {i: expr}

    def get(k: int) -> WitnessExpr:
        if k not in ladder:
            if k > i:
                # x_k = x_{k-1}^{-1} (x_{k-1} x_k)
                ladder[k] = WitnessExpr.mul(get(k - 1).inv(), _jones(f"x{k-1} x{k}"))
            else:
                # x_k = (x_k x_{k+1}) x_{k+1}^{-1}
                ladder[k] = WitnessExpr.mul(_jones(f"x{k} x{k+1}"), get(k + 1).inv())
        return ladder[k]

    return WitnessExpr.mul(get(0), get(2))


def _two_letter_witness(i: int, j: int, expr: WitnessExpr) -> WitnessExpr:
    """Reduce x_i x_j (j != i+1) to the target x_0 x_2 by the identity chains."""
    while True:
        if (i, j) == (0, 2):
            return expr
        if (i, j) == (0, 0):
            # x_0 x_2 = x_0^{-2} B x_0^2 (x_2 x_3) with B in A
            return WitnessExpr.mul(
                expr.inv(),
                _jones(SQUARE_BRIDGE_WORD),
                expr,
                _jones("x2 x3"),
            )
        if i == 0 and j == 3:
            # x_0^2 = (x_0x_1)(x_0x_3)(x_2x_3)^{-1}
            expr = WitnessExpr.mul(_jones("x0 x1"), expr, _jones("x2 x3").inv())
            i, j = 0, 0
        elif i == 0 and j > 3:
            # x_0 x_{j-2} = (x_{j-3}x_{j-2})(x_0x_j)(x_{j-1}x_j)^{-1}
            expr = WitnessExpr.mul(
                _jones(f"x{j-3} x{j-2}"), expr, _jones(f"x{j-1} x{j}").inv()
            )
            j -= 2
        elif i == j:
            # x_{i-1} x_{i+1} = (x_{i-1}x_i) x_i^{-2} (x_ix_{i+1})
            expr = WitnessExpr.mul(
                _jones(f"x{i-1} x{i}"), expr.inv(), _jones(f"x{i} x{i+1}")
            )
            i, j = i - 1, i + 1
        elif i == 2:
            # x_0 x_{j-2} = (x_0x_1)(x_2x_j)(x_1x_2)^{-1}
            expr = WitnessExpr.mul(_jones("x0 x1"), expr, _jones("x1 x2").inv())
            i, j = 0, j - 2
        elif i % 2 == 0:
            # (x_i x_j)^{(x_0x_1)^{-1}} = x_{i-2} x_{j-2}
            expr = expr.conj(_jones("x0 x1").inv())
            i, j = i - 2, j - 2
        else:
            # x_{i+1} x_{j+2} = (x_ix_j)^{-1}(x_ix_{i+1})(x_{j+1}x_{j+2})
            expr = WitnessExpr.mul(
                expr.inv(), _jones(f"x{i} x{i+1}"), _jones(f"x{j+1} x{j+2}")
            )
            i, j = i + 1, j + 2


def _long_witness(rep: NormalForm, expr: WitnessExpr) -> WitnessExpr:
    """Reduce a representative of length > 2 to the two-letter case."""
    pos = rep.pos
    j = pos[-1]
    n = 0
    while n < len(pos) and pos[len(pos) - 1 - n] == j:
        n += 1
    prefix = pos[: len(pos) - n]
    if not prefix:
        # (x_j x_{j+1}) conjugated by x_j^n is x_j x_{j+1+n}
        expr = _jones(f"x{j} x{j+1}").conj(expr)
        return _two_letter_witness(j, j + 1 + n, expr)
    k = len(prefix)
    prefix_nf = NormalForm(prefix, ())
    if j < k or not skips(j - k, prefix_nf):
        raise ConditionViolation(
            f"trailing letter x_{j} does not skip over {prefix_nf} in {rep}"
        )
    # (x_{j-k} x_{j-k+1})^w = x_j x_{j+n+1}
    expr = _jones(f"x{j-k} x{j-k+1}").conj(expr)
    return _two_letter_witness(j, j + n + 1, expr)


# --- stabilizers of finite dyadic sets ----------------------------------------


def _maximal_standard_intervals(a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Greedy partition of [a, b] into maximal standard dyadic intervals."""
    out = []
    t = a
    while t < b:
        width = b - t
        # largest power of two <= width that also aligns t
        w = Fraction(1)
        while w > width:
            w /= 2
        if t:
            while t % w:
                w /= 2
        out.append((t, t + w))
        t += w
    return out


def _transport_map(a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Breakpoints of the canonical dyadic homeomorphism [0,1] -> [a,b].

    The right comb partition of the source (halving at 1/2, 3/4, ...) is
    matched to the maximal standard dyadic intervals of the target, left to
    right.
    """
    targets = _maximal_standard_intervals(a, b)
    m = len(targets)
    pts = [(Fraction(0), a)]
    source_right = Fraction(0)
    for k, (_, hi) in enumerate(targets):
        source_right = Fraction(1) if k == m - 1 else source_right + Fraction(1, 2 ** (k + 1))
        pts.append((source_right, hi))
    return pts


def _transport(f: PLMap, a: Fraction, b: Fraction) -> PLMap:
    """Copy f onto [a, b] through the canonical homeomorphism, identity outside."""
    theta = _transport_map(a, b)
    inner = plmaps._compose_breakpoints(
        tuple((y, x) for x, y in theta),  # theta^{-1} scaled into the interval
        plmaps._compose_breakpoints(f.breakpoints, theta),
    )
    pts: list[tuple[Fraction, Fraction]] = []
    if a > 0:
        pts.append((Fraction(0), Fraction(0)))
    pts.extend(inner)
    if b < 1:
        pts.append((Fraction(1), Fraction(1)))
    return PLMap(tuple(pts))


def _validated_points(points: Iterable[Fraction]) -> tuple[Fraction, ...]:
    pts = tuple(sorted(Fraction(p) for p in points))
    if not pts:
        raise ValueError("the point set must be nonempty")
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    for p in pts:
        if not Fraction(0) < p < Fraction(1):
            raise ValueError(f"{p} is outside (0,1)")
        if not is_dyadic(p):
            raise ValueError(f"{p} is not dyadic; such stabilizers are out of scope")
    return pts


def stabilizer_generators(points: Iterable[Fraction]) -> list[Word]:
    """2|U|+2 generators of the stabilizer of a dyadic set U.

    Each of the |U|+1 intervals between consecutive cut points carries a
    transported copy of x_0 and of x_1, extended by the identity; together
    these generate the full stabilizer.
    """
    pts = _validated_points(points)
    cuts = (Fraction(0),) + pts + (Fraction(1),)
    out: list[Word] = []
    for a, b in zip(cuts, cuts[1:]):
        for f in (plmaps.X0_MAP, plmaps.X1_MAP):
            out.append(diagram_to_word(plmap_to_pair(_transport(f, a, b))).to_word())
    return out


@lru_cache(maxsize=None)
def _stabilizer_core(points: tuple[Fraction, ...]) -> FoldedCore:
    return build_core(stabilizer_generators(points))


def stabilizer_member(w: WordLike, points: Iterable[Fraction]) -> bool:
    """Does w fix every point of U?  Decided twice and cross-checked.

    The PL route evaluates w at each point; the core route runs acceptance
    by the 2-core of the stabilizer generators (stabilizers are closed, so
    this is exact).  Disagreement raises, since it would mean a bug.
    """
    pts = _validated_points(points)
    by_plmap = stabilizes(plmaps.word_to_plmap(w), pts)
    by_core = _stabilizer_core(pts).accepts(word_to_diagram(w))
    if by_plmap != by_core:
        raise AssertionError(
            f"stabilizer routes disagree on {normalize(w)} at {pts}:"
            f" plmap={by_plmap} core={by_core}"
        )
    return by_plmap


# --- a uniform front door -----------------------------------------------------


@dataclass(frozen=True)
class NamedSubgroup:
    """A subgroup the package can decide membership in, by name.

    Kinds: ``jones``, ``g``, ``savchuk``, ``stabilizer`` (the latter carries
    its dyadic point set).
    """

    kind: str
    points: tuple[Fraction, ...] = ()

    @staticmethod
    def from_name(name: str) -> NamedSubgroup:
        if name in ("jones", "g", "savchuk"):
            return NamedSubgroup(name)
        if name.startswith("stab:"):
            points = tuple(_parse_dyadic(p) for p in name[5:].split(","))
            return NamedSubgroup("stabilizer", _validated_points(points))
        raise ValueError(f"unknown subgroup {name!r}")

    def member(self, w: WordLike) -> bool:
        if self.kind == "jones":
            return jones_member(w)
        if self.kind == "g":
            return parity_in_G(w)
        if self.kind == "savchuk":
            return savchuk_member(w)
        return stabilizer_member(w, self.points)

    def __str__(self) -> str:
        if self.kind == "stabilizer":
            return "stab:" + ",".join(_format_dyadic(p) for p in self.points)
        return self.kind


def _parse_dyadic(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if den.startswith("2^"):
        value = Fraction(int(num), 2 ** int(den[2:]))
    else:
        value = Fraction(text)
    if not is_dyadic(value):
        raise ValueError(f"{text} is not dyadic")
    return value


def _format_dyadic(q: Fraction) -> str:
    num, exp = plmaps.dyadic_parts(q)
    return f"{num}/2^{exp}"
