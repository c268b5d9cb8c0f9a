"""Reduced diagrams over the one-edge, one-cell complex x -> x x, as tree pairs.

A group element is a pair of finite binary trees with the same number of
leaves: the domain tree cuts [0,1] into standard dyadic intervals, the range
tree does the same, and the element maps the k-th domain leaf affinely onto
the k-th range leaf.  Every caret (internal node) of either tree is one cell
of the corresponding plane diagram; the domain tree hangs below the common
top edge and the range tree is glued on upside down.

A pair is *reduced* when no position j has leaves j, j+1 as siblings in both
trees simultaneously; such a sibling pair is a dipole and can be cancelled.
Dipole removal is confluent, so the reduced pair of an element is unique.
Multiplication is "concatenation + reduction": refine the first range tree
and the second domain tree to their common expansion, transport the
refinements outward, and reduce.

Trees are nested tuples: ``LEAF = ()`` and a caret is ``(left, right)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .words import NormalForm, WordLike, _as_letters, normalize

BinTree = tuple  # LEAF or (BinTree, BinTree)

LEAF: BinTree = ()


def caret(left: BinTree, right: BinTree) -> BinTree:
    return (left, right)


def leaf_count(t: BinTree) -> int:
    if t == LEAF:
        return 1
    return leaf_count(t[0]) + leaf_count(t[1])


def caret_count(t: BinTree) -> int:
    return leaf_count(t) - 1


def tree_leaf_addresses(t: BinTree, prefix: str = "") -> list[str]:
    """Binary addresses of the leaves in left-to-right order ('' for a lone leaf)."""
    if t == LEAF:
        return [prefix]
    return tree_leaf_addresses(t[0], prefix + "0") + tree_leaf_addresses(t[1], prefix + "1")


def tree_from_addresses(addresses: list[str]) -> BinTree:
    """Rebuild the tree whose leaves are the given complete prefix code."""
    if addresses == [""]:
        return LEAF
    left = [a[1:] for a in addresses if a.startswith("0")]
    right = [a[1:] for a in addresses if a.startswith("1")]
    if not left or not right or len(left) + len(right) != len(addresses):
        raise ValueError(f"{addresses} is not a complete prefix code")
    return (tree_from_addresses(left), tree_from_addresses(right))


def tree_to_string(t: BinTree) -> str:
    if t == LEAF:
        return "()"
    return "(" + tree_to_string(t[0]) + tree_to_string(t[1]) + ")"


def tree_from_string(text: str) -> BinTree:
    pos = 0

    def parse() -> BinTree:
        nonlocal pos
        if pos >= len(text) or text[pos] != "(":
            raise ValueError(f"expected '(' at {pos} in {text!r}")
        pos += 1
        if pos < len(text) and text[pos] == ")":
            pos += 1
            return LEAF
        left = parse()
        right = parse()
        if pos >= len(text) or text[pos] != ")":
            raise ValueError(f"expected ')' at {pos} in {text!r}")
        pos += 1
        return (left, right)

    t = parse()
    if pos != len(text):
        raise ValueError(f"trailing input at {pos} in {text!r}")
    return t


@dataclass(frozen=True)
class TreePair:
    """A diagram: domain and range trees with equal leaf counts."""

    domain: BinTree
    range: BinTree
    reduced: bool = field(default=False, compare=False)

    def __post_init__(self):
        if leaf_count(self.domain) != leaf_count(self.range):
            raise ValueError("domain and range trees must have equal leaf counts")

    @property
    def carets(self) -> int:
        return caret_count(self.domain) + caret_count(self.range)

    def is_trivial(self) -> bool:
        return self.domain == LEAF and self.range == LEAF

    def __str__(self) -> str:
        return tree_to_string(self.domain) + " | " + tree_to_string(self.range)


TRIVIAL_PAIR = TreePair(LEAF, LEAF, reduced=True)


def pair_from_string(text: str) -> TreePair:
    left, _, right = text.partition("|")
    return TreePair(tree_from_string(left.strip()), tree_from_string(right.strip()))


def invert_pair(d: TreePair) -> TreePair:
    return TreePair(d.range, d.domain, reduced=d.reduced)


# --- dipole reduction --------------------------------------------------------


def _sibling_leaf_starts(t: BinTree) -> set[int]:
    """Leaf positions j such that leaves j, j+1 hang off one caret."""
    out: set[int] = set()

    def walk(node: BinTree, start: int) -> int:
        if node == LEAF:
            return 1
        n_left = walk(node[0], start)
        n_right = walk(node[1], start + n_left)
        if node == (LEAF, LEAF):
            out.add(start)
        return n_left + n_right

    walk(t, 0)
    return out


def _contract_at(t: BinTree, target: int) -> BinTree:
    def walk(node: BinTree, start: int) -> BinTree:
        if node == (LEAF, LEAF) and start == target:
            return LEAF
        if node == LEAF:
            return node
        n_left = leaf_count(node[0])
        return (walk(node[0], start), walk(node[1], start + n_left))

    return walk(t, 0)


def reduce_dipoles(d: TreePair, rng: random.Random | None = None) -> TreePair:
    """Cancel sibling-leaf pairs common to both trees until none remain.

    The removal order is irrelevant to the result; passing an ``rng``
    randomizes it (used by the confluence tests).
    """
    dom, ran = d.domain, d.range
    while True:
        common = sorted(_sibling_leaf_starts(dom) & _sibling_leaf_starts(ran))
        if not common:
            return TreePair(dom, ran, reduced=True)
        j = common[0] if rng is None else rng.choice(common)
        dom = _contract_at(dom, j)
        ran = _contract_at(ran, j)


# --- multiplication ----------------------------------------------------------


def _union(a: BinTree, b: BinTree) -> BinTree:
    if a == LEAF:
        return b
    if b == LEAF:
        return a
    return (_union(a[0], b[0]), _union(a[1], b[1]))


def _decompose(guide: BinTree, refined: BinTree) -> list[BinTree]:
    """Subtrees of ``refined`` hanging at each leaf of ``guide`` in order."""
    if guide == LEAF:
        return [refined]
    return _decompose(guide[0], refined[0]) + _decompose(guide[1], refined[1])


def _graft(t: BinTree, grafts: Iterator[BinTree]) -> BinTree:
    if t == LEAF:
        return next(grafts)
    left = _graft(t[0], grafts)
    right = _graft(t[1], grafts)
    return (left, right)


def concat(a: TreePair, b: TreePair) -> TreePair:
    """Unreduced product: refine range(a) and domain(b) to their union."""
    union = _union(a.range, b.domain)
    dom = _graft(a.domain, iter(_decompose(a.range, union)))
    ran = _graft(b.range, iter(_decompose(b.domain, union)))
    return TreePair(dom, ran)


def concat_reduce(a: TreePair, b: TreePair) -> TreePair:
    """Group multiplication of diagrams (a acts first)."""
    return reduce_dipoles(concat(a, b))


# --- words <-> diagrams -------------------------------------------------------


_X0 = TreePair(((LEAF, LEAF), LEAF), (LEAF, (LEAF, LEAF)), reduced=True)


@lru_cache(maxsize=None)
def generator_diagram(i: int) -> TreePair:
    """The reduced pair of x_i; x_i for i >= 2 is x_{i-1} conjugated by x_0."""
    if i < 0:
        raise ValueError("generator index must be >= 0")
    if i == 0:
        return _X0
    if i == 1:
        return TreePair((LEAF, _X0.domain), (LEAF, _X0.range), reduced=True)
    prev = generator_diagram(i - 1)
    return concat_reduce(concat_reduce(invert_pair(_X0), prev), _X0)


def word_to_diagram(w: WordLike) -> TreePair:
    """Reduced tree pair of a word (fold of concatenation + reduction)."""
    out = TRIVIAL_PAIR
    for let in _as_letters(w):
        d = generator_diagram(let.index)
        if let.sign < 0:
            d = invert_pair(d)
        out = concat_reduce(out, d)
    return out


def _leaf_exponents(t: BinTree) -> list[int]:
    """Per leaf: length of the maximal chain of left edges going up from the
    leaf whose top vertex stays off the right spine of the tree.

    A leaf at binary address u can climb past position j exactly when
    u[j] == '0' (it is a left child there) and the ancestor u[:j] is not an
    all-ones address (the right spine).
    """
    out = []
    for u in tree_leaf_addresses(t):
        a, j = 0, len(u) - 1
        while j >= 0 and u[j] == "0" and "0" in u[:j]:
            a += 1
            j -= 1
        out.append(a)
    return out


def diagram_to_word(d: TreePair) -> NormalForm:
    """Word of a reduced pair, read off from the leaf exponents of its trees.

    The domain tree's exponents (a_0, a_1, ...) give the positive letters
    x_0^{a_0} x_1^{a_1} ... and the range tree's give the inverse letters in
    descending index order.  The result of a reduced pair is already the
    normal form; we normalize anyway so unreduced inputs only cost a
    reduction pass.
    """
    if not d.reduced:
        d = reduce_dipoles(d)
    letters: list[tuple[int, int]] = []
    for k, a in enumerate(_leaf_exponents(d.domain)):
        letters.extend([(k, 1)] * a)
    trailing = []
    for k, b in enumerate(_leaf_exponents(d.range)):
        trailing.extend([(k, -1)] * b)
    letters.extend(reversed(trailing))
    from .words import word

    return normalize(word(letters))


def to_dot(d: TreePair) -> str:
    """DOT drawing of the plane diagram: domain carets above, range carets below."""
    lines = ["digraph diagram {", "  rankdir=TB;", '  node [shape=point];']
    counter = [0]

    def walk(t: BinTree, name: str, upside_down: bool) -> None:
        if t == LEAF:
            return
        for tag, child in (("0", t[0]), ("1", t[1])):
            counter[0] += 1
            child_name = f"{name}_{tag}"
            if upside_down:
                lines.append(f'  "{child_name}" -> "{name}";')
            else:
                lines.append(f'  "{name}" -> "{child_name}";')
            walk(child, child_name, upside_down)

    walk(d.domain, "top", False)
    walk(d.range, "bottom", True)
    lines.append("}")
    return "\n".join(lines)
