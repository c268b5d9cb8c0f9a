"""Word calculus for Thompson's group F over the generators x_0, x_1, x_2, ...

An element of F is written uniquely as a normal form

    x_{i_1} ... x_{i_m} x_{j_n}^{-1} ... x_{j_1}^{-1}

where i_1 <= ... <= i_m, j_n >= ... >= j_1, the two indices meeting in the
middle are distinct, and whenever x_i and x_i^{-1} both occur some x_{i+1}
or x_{i+1}^{-1} occurs as well.  Normalization runs the two-letter rewriting
rules

    x_i x_j           ->  x_j x_{i+1}            for i > j
    x_i^{-1} x_j      ->  x_j x_{i+1}^{-1}       for i > j
    x_i^{-1} x_j      ->  x_{j+1} x_i^{-1}       for j > i
    x_i^{-1} x_j^{-1} ->  x_{j+1}^{-1} x_i^{-1}  for j > i
    x_i^{-1} x_i      ->  1
    x_i x_i^{-1}      ->  1

to exhaustion (giving the semi-normal form, all positive letters sorted in
front of all negative ones), then repeatedly cancels a pair x_i, x_i^{-1}
whose index occurs on both sides while i+1 occurs on neither, shifting every
index above i down by one.  The cancellation is the conjugation identity
x_i x_m x_i^{-1} = x_{m-1} for m >= i+2 applied to everything between the
innermost such pair.

Composition is left to right throughout: in the word ``a b`` the element
``a`` acts first.

The module also implements the combinatorics used by the subgroup machinery:
parity (even-length normal forms form the index-2 subgroup generated by
x_0 x_2 and x_1 x_2), letters skipping over positive words, blocks, and the
reduction of a word to a shortest positive block-free representative of its
double coset under the subgroup generated by x_0 x_1, x_1 x_2, x_2 x_3.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


class WordParseError(ValueError):
    """Malformed word text; ``position`` is the offset of the bad token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Letter:
    """One generator occurrence x_index^sign with sign +1 or -1."""

    index: int
    sign: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"letter index must be >= 0, got {self.index}")
        if self.sign not in (1, -1):
            raise ValueError(f"letter sign must be +1 or -1, got {self.sign}")

    def inverse(self) -> Letter:
        return Letter(self.index, -self.sign)


@dataclass(frozen=True)
class Word:
    """A finite product of letters; arbitrary words are allowed as input."""

    letters: tuple[Letter, ...] = ()

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word(tuple(let.inverse() for let in reversed(self.letters)))

    def __str__(self) -> str:
        return format_word(self)


def word(letters: Iterable[tuple[int, int]]) -> Word:
    """Build a Word from (index, sign) pairs."""
    return Word(tuple(Letter(i, s) for i, s in letters))


WordLike = Union[Word, "NormalForm", str]


_TOKEN = re.compile(r"x(\d+)(?:\^(-?\d+))?")
_SEPARATOR = frozenset(" \t\r\n*")


def parse_word(text: str) -> Word:
    """Parse ``x<i>`` tokens with optional ``^<exp>``, separated by blanks or '*'.

    The empty string is the identity.  Exponents expand letter by letter, so
    ``x2^3`` gives three letters and ``x0^-2`` two inverse letters.
    """
    letters: list[Letter] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos] in _SEPARATOR:
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None:
            raise WordParseError(f"expected a generator token, found {text[pos]!r}", pos)
        index = int(match.group(1))
        exponent = 1 if match.group(2) is None else int(match.group(2))
        sign = 1 if exponent >= 0 else -1
        letters.extend(Letter(index, sign) for _ in range(abs(exponent)))
        pos = match.end()
    return Word(tuple(letters))


def format_word(w: Word | NormalForm) -> str:
    """Print a word with runs folded into minimal exponents, e.g. ``x0 x1^-1``."""
    if isinstance(w, NormalForm):
        w = w.to_word()
    parts = []
    run: list[Letter] = []
    for let in list(w) + [None]:
        if run and (let is None or let != run[0]):
            exp = len(run) * run[0].sign
            parts.append(f"x{run[0].index}" if exp == 1 else f"x{run[0].index}^{exp}")
            run = []
        if let is not None:
            run.append(let)
    return " ".join(parts)


# --- normal forms -----------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    """The canonical representation of a group element.

    ``pos`` holds the indices of the positive letters in non-decreasing
    order; ``neg`` holds the indices of the inverse letters in word order,
    i.e. non-increasing.  Two normal forms are equal exactly when they
    represent the same element of F.
    """

    pos: tuple[int, ...] = ()
    neg: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.pos) + len(self.neg)

    @property
    def is_positive(self) -> bool:
        return not self.neg

    def to_word(self) -> Word:
        return Word(
            tuple(Letter(i, 1) for i in self.pos)
            + tuple(Letter(j, -1) for j in self.neg)
        )

    def inverse(self) -> NormalForm:
        return NormalForm(tuple(reversed(self.neg)), tuple(reversed(self.pos)))

    def __str__(self) -> str:
        return format_word(self.to_word())

    def check(self) -> None:
        """Validate the normal-form invariants; used by the test suite."""
        if any(a > b for a, b in zip(self.pos, self.pos[1:])):
            raise AssertionError(f"positive part not sorted: {self.pos}")
        if any(a < b for a, b in zip(self.neg, self.neg[1:])):
            raise AssertionError(f"negative part not sorted: {self.neg}")
        if self.pos and self.neg and self.pos[-1] == self.neg[0]:
            raise AssertionError(f"junction letters cancel: {self}")
        both = set(self.pos) & set(self.neg)
        occurring = set(self.pos) | set(self.neg)
        for i in both:
            if i + 1 not in occurring:
                raise AssertionError(f"index {i} violates the cancellation condition: {self}")


def _as_letters(w: WordLike) -> Iterable[Letter]:
    if isinstance(w, str):
        w = parse_word(w)
    if isinstance(w, NormalForm):
        w = w.to_word()
    return w.letters


# The incremental normalizer.  State is a pair of lists (pos, neg) holding a
# semi-normal form; each incoming letter is pushed through the negative part
# using the two-letter rules, after which only the junction pair can cancel.


def _push_positive(pos: list[int], neg: list[int], k: int) -> None:
    idx = len(neg)
    while idx > 0:
        i = neg[idx - 1]
        if i == k:  # x_i^{-1} x_i -> 1
            neg.pop(idx - 1)
            return
        if i > k:  # x_i^{-1} x_k -> x_k x_{i+1}^{-1}
            neg[idx - 1] = i + 1
        else:  # x_i^{-1} x_k -> x_{k+1} x_i^{-1}
            k += 1
        idx -= 1
    m = len(pos)
    while m > 0 and pos[m - 1] > k:  # x_i x_k -> x_k x_{i+1}
        pos[m - 1] += 1
        m -= 1
    pos.insert(m, k)
    while pos and neg and pos[-1] == neg[0]:  # x_i x_i^{-1} -> 1
        pos.pop()
        neg.pop(0)


def _push_negative(pos: list[int], neg: list[int], k: int) -> None:
    idx = len(neg)
    while idx > 0 and neg[idx - 1] < k:  # x_i^{-1} x_k^{-1} -> x_{k+1}^{-1} x_i^{-1}
        k += 1
        idx -= 1
    if idx == 0 and pos and pos[-1] == k:  # x_k x_k^{-1} -> 1
        pos.pop()
        while pos and neg and pos[-1] == neg[0]:
            pos.pop()
            neg.pop(0)
        return
    neg.insert(idx, k)


def _push_letter(pos: list[int], neg: list[int], index: int, sign: int) -> None:
    if sign > 0:
        _push_positive(pos, neg, index)
    else:
        _push_negative(pos, neg, index)


def _eliminate_cancellable(pos: list[int], neg: list[int]) -> None:
    """Apply the index-shifting cancellation until the normal form condition holds.

    If index i sits in both parts and i+1 in neither, all letters with index
    above i lie between the innermost x_i ... x_i^{-1} pair, so deleting that
    pair and decrementing every larger index performs the conjugation
    x_i x_m x_i^{-1} = x_{m-1} exactly.
    """
    while True:
        pset = set(pos)
        nset = set(neg)
        occurring = pset | nset
        victim = -1
        for i in sorted(pset & nset):
            if i + 1 not in occurring:
                victim = i
                break
        if victim < 0:
            return
        pos.remove(victim)
        neg.remove(victim)
        for t, v in enumerate(pos):
            if v > victim:
                pos[t] = v - 1
        for t, v in enumerate(neg):
            if v > victim:
                neg[t] = v - 1


def normalize(w: WordLike) -> NormalForm:
    """Return the unique normal form of the element represented by ``w``."""
    if isinstance(w, NormalForm):
        return w
    pos: list[int] = []
    neg: list[int] = []
    for let in _as_letters(w):
        _push_letter(pos, neg, let.index, let.sign)
    _eliminate_cancellable(pos, neg)
    return NormalForm(tuple(pos), tuple(neg))


def multiply_normal(a: NormalForm, b: NormalForm) -> NormalForm:
    """Normal form of the product a . b (a acts first)."""
    pos = list(a.pos)
    neg = list(a.neg)
    for i in b.pos:
        _push_positive(pos, neg, i)
    for j in b.neg:
        _push_negative(pos, neg, j)
    _eliminate_cancellable(pos, neg)
    return NormalForm(tuple(pos), tuple(neg))


def group_op(kind: str, a: WordLike, b: WordLike | None = None) -> NormalForm:
    """Group arithmetic: ``multiply``, ``invert`` or ``conjugate`` (a^b = b^-1 a b)."""
    if kind == "invert":
        if b is not None:
            raise ValueError("invert takes a single argument")
        return normalize(_to_word(a).inverse())
    if b is None:
        raise ValueError(f"{kind} needs two arguments")
    wa, wb = _to_word(a), _to_word(b)
    if kind == "multiply":
        return normalize(wa * wb)
    if kind == "conjugate":
        return normalize(wb.inverse() * wa * wb)
    raise ValueError(f"unknown operation {kind!r}")


def _to_word(w: WordLike) -> Word:
    if isinstance(w, str):
        return parse_word(w)
    if isinstance(w, NormalForm):
        return w.to_word()
    return w


def multiply(a: WordLike, b: WordLike) -> NormalForm:
    return group_op("multiply", a, b)


def invert(a: WordLike) -> NormalForm:
    return group_op("invert", a)


def conjugate(a: WordLike, b: WordLike) -> NormalForm:
    return group_op("conjugate", a, b)


def parity_in_G(w: WordLike) -> bool:
    """True when the normal form has even length.

    The even-length elements are exactly the subgroup generated by x_0 x_2
    and x_1 x_2, which has index 2 in F.
    """
    return len(normalize(w)) % 2 == 0


# --- stepwise rewriting with a pluggable strategy ---------------------------
#
# The production normalizer above commits to one reduction order.  For
# confluence testing we also provide a naive engine that applies one
# two-letter rule at a time, with the rule position chosen by a strategy.

Strategy = Union[str, random.Random]


def _rule_redexes(codes: list[tuple[int, int]]) -> list[int]:
    """Positions p where a rule applies to codes[p], codes[p+1]."""
    out = []
    for p in range(len(codes) - 1):
        (i, si), (j, sj) = codes[p], codes[p + 1]
        if si > 0 and sj > 0 and i > j:
            out.append(p)
        elif si < 0 and sj > 0 and i != j:
            out.append(p)
        elif si < 0 and sj > 0 and i == j:
            out.append(p)
        elif si < 0 and sj < 0 and j > i:
            out.append(p)
        elif si > 0 and sj < 0 and i == j:
            out.append(p)
    return out


def _apply_rule(codes: list[tuple[int, int]], p: int) -> None:
    (i, si), (j, sj) = codes[p], codes[p + 1]
    if si > 0 and sj > 0:  # x_i x_j -> x_j x_{i+1}, i > j
        codes[p : p + 2] = [(j, 1), (i + 1, 1)]
    elif si < 0 and sj > 0 and i > j:  # x_i^{-1} x_j -> x_j x_{i+1}^{-1}
        codes[p : p + 2] = [(j, 1), (i + 1, -1)]
    elif si < 0 and sj > 0 and j > i:  # x_i^{-1} x_j -> x_{j+1} x_i^{-1}
        codes[p : p + 2] = [(j + 1, 1), (i, -1)]
    elif si < 0 and sj < 0:  # x_i^{-1} x_j^{-1} -> x_{j+1}^{-1} x_i^{-1}, j > i
        codes[p : p + 2] = [(j + 1, -1), (i, -1)]
    else:  # cancellation
        codes[p : p + 2] = []


def _choose(strategy: Strategy, options: list[int]) -> int:
    if strategy == "leftmost":
        return options[0]
    if strategy == "rightmost":
        return options[-1]
    if isinstance(strategy, random.Random):
        return strategy.choice(options)
    raise ValueError(f"unknown strategy {strategy!r}")


def semi_normal_form(w: WordLike, strategy: Strategy = "leftmost") -> Word:
    """Rewrite to the semi-normal form one rule application at a time."""
    codes = [(let.index, let.sign) for let in _as_letters(w)]
    while True:
        redexes = _rule_redexes(codes)
        if not redexes:
            return word(codes)
        _apply_rule(codes, _choose(strategy, redexes))


def normalize_stepwise(w: WordLike, strategy: Strategy = "leftmost") -> NormalForm:
    """Full normalization through the naive engine; strategy-independent result."""
    semi = semi_normal_form(w, strategy)
    pos = [let.index for let in semi if let.sign > 0]
    neg = [let.index for let in semi if let.sign < 0]
    # Sanity: the rewriting rules leave positives in front of negatives.
    if [let.sign for let in semi] != [1] * len(pos) + [-1] * len(neg):
        raise AssertionError(f"rewriting did not reach a semi-normal form: {semi}")
    while True:
        pset, nset = set(pos), set(neg)
        occurring = pset | nset
        candidates = [i for i in pset & nset if i + 1 not in occurring]
        if not candidates:
            break
        victim = _choose(strategy, sorted(candidates))
        pos.remove(victim)
        neg.remove(victim)
        pos = [v - 1 if v > victim else v for v in pos]
        neg = [v - 1 if v > victim else v for v in neg]
    return NormalForm(tuple(pos), tuple(neg))


# --- skips and blocks -------------------------------------------------------


def skips(i: int, w: NormalForm) -> bool:
    """Whether x_i skips over the positive normal form w, i.e. x_i w = w x_{i+n}.

    Equivalent to the index test: the j-th letter (1-based) satisfies
    i_j < i + j - 1.
    """
    if not w.is_positive:
        raise ValueError("skips is defined for positive normal forms only")
    if i < 0:
        raise ValueError("generator index must be >= 0")
    return all(idx < i + jj for jj, idx in enumerate(w.pos))


@dataclass(frozen=True)
class Block:
    """A contiguous factor pos[start:end] of a positive normal form.

    The factor x_{i_1} ... x_{i_n} is a block when its first and last letters
    differ and i_j < i_1 + j for every j; equivalently at least two distinct
    letters occur and x_{i_1 + 1} skips over the whole factor.
    """

    start: int
    end: int


def _is_block(indices: tuple[int, ...]) -> bool:
    if len(indices) < 2 or indices[0] == indices[-1]:
        return False
    first = indices[0]
    return all(idx < first + jj + 1 for jj, idx in enumerate(indices))


def find_blocks(w: NormalForm) -> list[Block]:
    """All contiguous block factors of a positive normal form, by position."""
    if not w.is_positive:
        raise ValueError("find_blocks is defined for positive normal forms only")
    out = []
    n = len(w.pos)
    for start in range(n):
        for end in range(start + 2, n + 1):
            if _is_block(w.pos[start:end]):
                out.append(Block(start, end))
    return out


def is_block_free(w: NormalForm) -> bool:
    return not find_blocks(w)


# --- double cosets of the subgroup generated by x_0x_1, x_1x_2, x_2x_3 ------


@dataclass(frozen=True)
class CosetCertificate:
    """Multipliers taking the input into its double-coset representative.

    ``normalize(left . input . right) == representative`` always holds; the
    left and right words are products of pairs x_k x_{k+1} and their
    inverses, so both lie in the subgroup generated by x_0x_1, x_1x_2,
    x_2x_3.  The representative of a full minimization is positive and
    block-free.
    """

    left: Word
    right: Word
    representative: NormalForm

    def matches(self, w: WordLike) -> bool:
        return normalize(self.left * _to_word(w) * self.right) == self.representative


def _positivize_parts(pos: list[int], neg: list[int], right: list[Letter]) -> None:
    # While the word ends with x_i^{-1}, multiply by x_i x_{i+1} on the right.
    # Each round shortens the negative part and never lengthens the word.
    while neg:
        i = neg[-1]
        right.append(Letter(i, 1))
        right.append(Letter(i + 1, 1))
        _push_positive(pos, neg, i)
        _push_positive(pos, neg, i + 1)
        _eliminate_cancellable(pos, neg)


def coset_positivize(w: WordLike) -> CosetCertificate:
    """Right-multiply by pairs x_i x_{i+1} until the normal form is positive."""
    nf = normalize(w)
    start_len = len(nf)
    pos, neg = list(nf.pos), list(nf.neg)
    right: list[Letter] = []
    _positivize_parts(pos, neg, right)
    rep = NormalForm(tuple(pos), tuple(neg))
    if len(rep) > start_len:
        raise AssertionError(f"positivization lengthened {w!r}")
    return CosetCertificate(Word(), Word(tuple(right)), rep)


def coset_minimize(w: WordLike) -> CosetCertificate:
    """Shortest positive block-free representative of the double coset of w.

    While the positive part contains a block, strip the first letter x_j by
    multiplying with (x_j x_{j+1})^{-1} on the left.  Each strip either
    shortens the word or walks the shortest block one step toward the front
    (letting a negative tail accumulate); once the block is in front the
    next strip cancels inside it, shortening by two.  Re-positivizing too
    early would translate the block right again, so it happens only when
    the positive part is block-free.  The length never increases and drops
    with every block round, so this terminates.
    """
    nf = normalize(w)
    left: list[Letter] = []
    right: list[Letter] = []
    pos, neg = list(nf.pos), list(nf.neg)
    _positivize_parts(pos, neg, right)
    steps = 0
    limit = 50 * (len(nf) + 2) ** 2 + 100
    while True:
        if find_blocks(NormalForm(tuple(pos), ())):
            j = pos[0]
            left[:0] = [Letter(j + 1, -1), Letter(j, -1)]
            pos, neg = _left_multiply_pair_inverse(
                j, NormalForm(tuple(pos), tuple(neg))
            )
        elif neg:
            _positivize_parts(pos, neg, right)
        else:
            break
        steps += 1
        if steps > limit:
            raise AssertionError(f"coset minimization failed to settle on {w!r}")
    rep = NormalForm(tuple(pos), tuple(neg))
    return CosetCertificate(Word(tuple(left)), Word(tuple(right)), rep)


def _left_multiply_pair_inverse(j: int, nf: NormalForm) -> tuple[list[int], list[int]]:
    """Parts of (x_j x_{j+1})^{-1} . nf."""
    pos = []
    neg = [j + 1, j]
    for i in nf.pos:
        _push_positive(pos, neg, i)
    for i in nf.neg:
        _push_negative(pos, neg, i)
    _eliminate_cancellable(pos, neg)
    return pos, neg
