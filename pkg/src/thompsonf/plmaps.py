"""Elements of Thompson's group F as exact piecewise-linear data.

Three interchangeable representations live here:

* ``PLMap`` -- an increasing PL homeomorphism of [0,1] stored as its
  breakpoints, all of them dyadic rationals, with every slope a power of 2.
  Arithmetic is exact (``fractions.Fraction``); no floats anywhere.

* ``PrefixMap`` -- the action on binary expansions: a finite list of pairs
  (u_i, v_i) of binary words where the u_i form a complete prefix code, the
  v_i likewise, and the map replaces the prefix u_i by v_i.

* the tree pairs of :mod:`thompsonf.treepairs`; the leaf addresses of the
  two trees are exactly the two prefix codes.

``BinaryPoint`` models eventually periodic binary expansions, i.e. rational
points of [0,1], so the prefix action can be evaluated exactly on them.

Composition follows the group convention, left to right: ``f * g`` is the
map t -> g(f(t)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .treepairs import TreePair, tree_leaf_addresses, tree_from_addresses

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def dyadic_parts(q: Fraction) -> tuple[int, int]:
    """Write q as num / 2^exp with num odd or exp = 0."""
    if not is_dyadic(q):
        raise ValueError(f"{q} is not dyadic")
    return q.numerator, q.denominator.bit_length() - 1


def _is_power_of_two(q: Fraction) -> bool:
    n, d = q.numerator, q.denominator
    return n > 0 and n & (n - 1) == 0 and d & (d - 1) == 0


class NonDyadicCutWarning(UserWarning):
    """A support boundary is a non-dyadic fixed point; the factor is not split there."""


@dataclass(frozen=True)
class PLMap:
    """Increasing dyadic PL homeomorphism of [0,1] with power-of-2 slopes.

    ``breakpoints`` runs from (0,0) to (1,1), strictly increasing in both
    coordinates, with no collinear interior points (so equality of maps is
    equality of breakpoint tuples).
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        pts = tuple(
            (Fraction(x), Fraction(y)) for x, y in self.breakpoints
        )
        pts = _drop_collinear(pts)
        object.__setattr__(self, "breakpoints", pts)
        if pts[0] != (ZERO, ZERO) or pts[-1] != (ONE, ONE):
            raise ValueError("a PL map must run from (0,0) to (1,1)")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 <= x0 or y1 <= y0:
                raise ValueError("breakpoints must increase strictly")
            if not _is_power_of_two((y1 - y0) / (x1 - x0)):
                raise ValueError(f"slope on [{x0}, {x1}] is not a power of 2")
        for x, y in pts:
            if not (is_dyadic(x) and is_dyadic(y)):
                raise ValueError(f"non-dyadic breakpoint ({x}, {y})")

    def __call__(self, q: Fraction) -> Fraction:
        return evaluate_exact(self, q)

    def __mul__(self, other: PLMap) -> PLMap:
        """Left-to-right composition: (f * g)(t) = g(f(t))."""
        return PLMap(_compose_breakpoints(self.breakpoints, other.breakpoints))

    def inverse(self) -> PLMap:
        return PLMap(tuple((y, x) for x, y in self.breakpoints))

    def is_identity(self) -> bool:
        return len(self.breakpoints) == 2

    def __str__(self) -> str:
        return " ".join(f"({x},{y})" for x, y in self.breakpoints)


def _drop_collinear(
    pts: Sequence[tuple[Fraction, Fraction]]
) -> tuple[tuple[Fraction, Fraction], ...]:
    out: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(out) >= 2:
            (x0, y0), (x1, y1) = out[-2], out[-1]
            if (y1 - y0) * (p[0] - x1) == (p[1] - y1) * (x1 - x0):
                out.pop()
            else:
                break
        if out and out[-1] == p:
            continue
        out.append(p)
    return tuple(out)


IDENTITY = PLMap(((ZERO, ZERO), (ONE, ONE)))

X0_MAP = PLMap(
    (
        (ZERO, ZERO),
        (Fraction(1, 4), Fraction(1, 2)),
        (Fraction(1, 2), Fraction(3, 4)),
        (ONE, ONE),
    )
)

X1_MAP = PLMap(
    (
        (ZERO, ZERO),
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(5, 8), Fraction(3, 4)),
        (Fraction(3, 4), Fraction(7, 8)),
        (ONE, ONE),
    )
)


def _compose_breakpoints(first, second):
    """Breakpoints of t -> second(first(t)) for monotone PL breakpoint lists."""
    xs = {x for x, _ in first}
    inv_first = tuple((y, x) for x, y in first)
    lo, hi = first[0][1], first[-1][1]
    for x, _ in second:
        if lo <= x <= hi:
            xs.add(_interp(inv_first, x))
    pts = []
    for x in sorted(xs):
        pts.append((x, _interp(second, _interp(first, x))))
    return tuple(pts)


def _interp(pts, q: Fraction) -> Fraction:
    """Evaluate the PL function through ``pts`` at q (q within range)."""
    lo, hi = 0, len(pts) - 1
    if not (pts[0][0] <= q <= pts[-1][0]):
        raise ValueError(f"{q} outside [{pts[0][0]}, {pts[-1][0]}]")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pts[mid][0] <= q:
            lo = mid
        else:
            hi = mid
    (x0, y0), (x1, y1) = pts[lo], pts[hi]
    if q == x0:
        return y0
    return y0 + (y1 - y0) * (q - x0) / (x1 - x0)


def evaluate_exact(f: PLMap, q: Fraction | int | str) -> Fraction:
    """Exact image of a rational point of [0,1]."""
    q = Fraction(q)
    if not ZERO <= q <= ONE:
        raise ValueError(f"{q} is outside [0,1]")
    return _interp(f.breakpoints, q)


def _generator_map(i: int) -> PLMap:
    if i == 0:
        return X0_MAP
    if i == 1:
        return X1_MAP
    prev = _GENERATOR_CACHE_GET(i - 1)
    return X0_MAP.inverse() * prev * X0_MAP


_generator_cache: dict[int, PLMap] = {}


def _GENERATOR_CACHE_GET(i: int) -> PLMap:
    m = _generator_cache.get(i)
    if m is None:
        m = _generator_map(i)
        _generator_cache[i] = m
    return m


def word_to_plmap(w) -> PLMap:
    """The PL homeomorphism of a word; products map to composites left to right."""
    from .words import _as_letters

    out = IDENTITY
    for let in _as_letters(w):
        g = _GENERATOR_CACHE_GET(let.index)
        out = out * (g if let.sign > 0 else g.inverse())
    return out


# --- fixed sets and components ----------------------------------------------


def fixed_set(f: PLMap) -> tuple[tuple[Fraction, Fraction], ...]:
    """The exact fixed-point set as merged closed intervals (points have lo == hi).

    Solved piece by piece: on a piece of slope 2^k != 1 the line meets the
    diagonal in at most one rational point (dyadic only if k = 0 mod nothing
    -- it may be non-dyadic, e.g. 1/3); a slope-1 piece on the diagonal is
    fixed pointwise.  0 and 1 are always present.
    """
    items: list[tuple[Fraction, Fraction]] = []
    pts = f.breakpoints
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        m = (y1 - y0) / (x1 - x0)
        if m == 1:
            if y0 == x0:
                items.append((x0, x1))
        else:
            t = (y0 - m * x0) / (1 - m)
            if x0 <= t <= x1:
                items.append((t, t))
    items.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def stabilizes(f: PLMap, points: Iterable[Fraction]) -> bool:
    """True when f fixes every point of the finite set."""
    return all(evaluate_exact(f, q) == q for q in points)


def oplus(f: PLMap, g: PLMap) -> PLMap:
    """The direct sum: f shrunk into [0,1/2] followed by g shrunk into [1/2,1]."""
    pts = [(x / 2, y / 2) for x, y in f.breakpoints]
    pts += [(HALF + x / 2, HALF + y / 2) for x, y in g.breakpoints]
    return PLMap(tuple(pts))


def components(f: PLMap) -> list[PLMap]:
    """Minimal-support factors of f, split at dyadic fixed cut-points.

    Each factor agrees with f on one closed support interval and is the
    identity elsewhere; factors pairwise commute and multiply back to f.
    Supports whose shared boundary is a non-dyadic fixed point cannot be
    separated inside F; they are merged into one coarser factor and a
    ``NonDyadicCutWarning`` is issued.
    """
    fixed = fixed_set(f)
    supports: list[tuple[Fraction, Fraction]] = []
    for (_, hi), (lo, _) in zip(fixed, fixed[1:]):
        supports.append((hi, lo))
    if not supports:
        return []
    groups: list[list[tuple[Fraction, Fraction]]] = [[supports[0]]]
    for prev, cur in zip(supports, supports[1:]):
        boundary_is_point = prev[1] == cur[0]
        if boundary_is_point and not is_dyadic(cur[0]):
            warnings.warn(
                f"support boundary {cur[0]} is not dyadic; not splitting there",
                NonDyadicCutWarning,
                stacklevel=2,
            )
            groups[-1].append(cur)
        else:
            groups.append([cur])
    out = []
    for group in groups:
        a, b = group[0][0], group[-1][1]
        pts: list[tuple[Fraction, Fraction]] = []
        if a > ZERO:
            pts.append((ZERO, ZERO))
        pts.append((a, a))
        pts.extend((x, y) for x, y in f.breakpoints if a < x < b)
        pts.append((b, b))
        if b < ONE:
            pts.append((ONE, ONE))
        out.append(PLMap(tuple(pts)))
    return out


# --- binary prefix substitution ---------------------------------------------


@dataclass(frozen=True)
class PrefixMap:
    """Binary prefix substitution pairs (u_i, v_i), sorted by source word.

    Both sides form complete prefix codes and the correspondence preserves
    lexicographic (= numeric) order, which makes the induced self-map of
    [0,1] exactly the PL homeomorphism sending interval(u_i) affinely onto
    interval(v_i).
    """

    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        pairs = tuple(sorted((u, v) for u, v in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        _check_complete_code([u for u, _ in pairs])
        _check_complete_code(sorted(v for _, v in pairs))
        vs = [v for _, v in pairs]
        if vs != sorted(vs):
            raise ValueError("prefix substitution does not preserve order")

    def sources(self) -> list[str]:
        return [u for u, _ in self.pairs]

    def targets(self) -> list[str]:
        return [v for _, v in self.pairs]


def _check_complete_code(code: list[str]) -> None:
    if any(set(u) - {"0", "1"} for u in code):
        raise ValueError("prefix code words must be binary")
    if sum(Fraction(1, 2 ** len(u)) for u in code) != 1:
        raise ValueError(f"{code} does not cover all infinite words")
    for a, b in zip(code, code[1:]):
        if b.startswith(a):
            raise ValueError(f"{a} is a prefix of {b}")


def _interval_of(u: str) -> tuple[Fraction, Fraction]:
    lo = Fraction(int(u, 2) if u else 0, 2 ** len(u))
    return lo, lo + Fraction(1, 2 ** len(u))


def prefix_to_plmap(m: PrefixMap) -> PLMap:
    pts = [(ZERO, ZERO)]
    for u, v in m.pairs:
        pts.append((_interval_of(u)[1], _interval_of(v)[1]))
    return PLMap(tuple(pts))


def plmap_to_prefix(f: PLMap) -> PrefixMap:
    """Subdivide [0,1] until every piece maps affinely onto a standard dyadic interval."""
    pairs: list[tuple[str, str]] = []

    def affine_on(a: Fraction, b: Fraction) -> bool:
        return all(not a < x < b for x, _ in f.breakpoints)

    def address(lo: Fraction, hi: Fraction) -> str | None:
        width = hi - lo
        if not _is_power_of_two(1 / width) and width != 1:
            return None
        if lo % width != 0:
            return None
        bits = (1 / width).numerator.bit_length() - 1
        return format(int(lo / width), "b").zfill(bits) if bits else ""

    def visit(u: str, a: Fraction, b: Fraction) -> None:
        if affine_on(a, b):
            v = address(evaluate_exact(f, a), evaluate_exact(f, b))
            if v is not None:
                pairs.append((u, v))
                return
        mid = (a + b) / 2
        visit(u + "0", a, mid)
        visit(u + "1", mid, b)

    visit("", ZERO, ONE)
    return PrefixMap(tuple(pairs))


def pair_to_prefix(d: TreePair) -> PrefixMap:
    """Leaf addresses of the two trees give the source and target codes."""
    us = tree_leaf_addresses(d.domain)
    vs = tree_leaf_addresses(d.range)
    return PrefixMap(tuple(zip(us, vs)))


def prefix_to_pair(m: PrefixMap) -> TreePair:
    return TreePair(
        tree_from_addresses(m.sources()),
        tree_from_addresses(m.targets()),
        reduced=False,
    )


def plmap_to_pair(f: PLMap) -> TreePair:
    return prefix_to_pair(plmap_to_prefix(f))


def pair_to_plmap(d: TreePair) -> PLMap:
    return prefix_to_plmap(pair_to_prefix(d))


# --- rational points as eventually periodic binary expansions ---------------


@dataclass(frozen=True)
class BinaryPoint:
    """A point of [0,1] written .preperiod(period) in binary.

    Canonical form: the period is primitive, not all zeros (a dyadic point
    has empty period and no trailing zeros), not all ones (folded into the
    preperiod by carrying), and cannot be rotated into the preperiod.  The
    point 1 is the special value .(1).
    """

    preperiod: str = ""
    period: str = ""

    def __post_init__(self):
        pre, per = _canonical_binary(self.preperiod, self.period)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def to_fraction(self) -> Fraction:
        pre, per = self.preperiod, self.period
        value = Fraction(int(pre, 2) if pre else 0, 2 ** len(pre))
        if per:
            value += Fraction(int(per, 2), 2 ** len(per) - 1) / 2 ** len(pre)
        return value

    @staticmethod
    def from_fraction(q: Fraction | int | str) -> BinaryPoint:
        q = Fraction(q)
        if not ZERO <= q <= ONE:
            raise ValueError(f"{q} is outside [0,1]")
        if q == 1:
            return BinaryPoint("", "1")
        bits: list[str] = []
        seen: dict[Fraction, int] = {}
        t = q
        while t not in seen:
            seen[t] = len(bits)
            t *= 2
            bit = "1" if t >= 1 else "0"
            if t >= 1:
                t -= 1
            bits.append(bit)
            if t == 0:
                return BinaryPoint("".join(bits), "")
        start = seen[t]
        return BinaryPoint("".join(bits[:start]), "".join(bits[start:]))

    def __str__(self) -> str:
        if not self.preperiod and not self.period:
            return ".0"
        return "." + self.preperiod + (f"({self.period})" if self.period else "")


_POINT_RE = None


def parse_binary_point(text: str) -> BinaryPoint:
    import re

    m = re.fullmatch(r"\.([01]*)(?:\(([01]+)\))?", text.strip())
    if m is None:
        raise ValueError(f"malformed binary point {text!r}")
    return BinaryPoint(m.group(1), m.group(2) or "")


def _canonical_binary(pre: str, per: str) -> tuple[str, str]:
    if set(pre) - {"0", "1"} or set(per) - {"0", "1"}:
        raise ValueError("binary point digits must be 0 or 1")
    if set(per) <= {"0"}:
        per = ""
        pre = pre.rstrip("0")
        return pre, per
    if set(per) == {"1"}:
        if pre == "":
            return "", "1"  # the point 1
        # .pre(1) = .pre + 2^-|pre|: binary increment with carry
        digits = list(pre)
        i = len(digits) - 1
        while i >= 0 and digits[i] == "1":
            digits[i] = "0"
            i -= 1
        if i < 0:
            return "", "1"
        digits[i] = "1"
        return "".join(digits).rstrip("0"), ""
    for d in range(1, len(per)):
        if len(per) % d == 0 and per == per[:d] * (len(per) // d):
            per = per[:d]
            break
    while pre and pre[-1] == per[-1]:
        per = per[-1] + per[:-1]
        pre = pre[:-1]
    return pre, per


def apply_prefix(m: PrefixMap, p: BinaryPoint) -> BinaryPoint:
    """Replace the matching source prefix of p's expansion by its target."""
    value = p.to_fraction()
    if value == 0 or value == 1:
        return p
    pre, per = p.preperiod, p.period
    max_len = max(len(u) for u in m.sources())
    stream = pre
    if per:
        while len(stream) < max_len:
            stream += per
    else:
        stream += "0" * max(0, max_len - len(stream))
    for u, v in m.pairs:
        if stream.startswith(u):
            if len(u) <= len(pre):
                return BinaryPoint(v + pre[len(u):], per)
            if not per:
                return BinaryPoint(v, "")
            offset = (len(u) - len(pre)) % len(per)
            return BinaryPoint(v, per[offset:] + per[:offset])
    raise AssertionError(f"complete code failed to match {p}")


def act_on_point(w, p: BinaryPoint) -> BinaryPoint:
    """Apply a word letter by letter to an eventually periodic binary point."""
    from .words import _as_letters
    from .treepairs import generator_diagram, invert_pair

    out = p
    for let in _as_letters(w):
        d = generator_diagram(let.index)
        if let.sign < 0:
            d = invert_pair(d)
        out = apply_prefix(pair_to_prefix(d), out)
    return out


def plmap_json(f: PLMap) -> list[list[int]]:
    """Breakpoints as [x_num, x_exp, y_num, y_exp] quadruples."""
    out = []
    for x, y in f.breakpoints:
        xn, xe = dyadic_parts(x)
        yn, ye = dyadic_parts(y)
        out.append([xn, xe, yn, ye])
    return out


def plmap_from_json(data: Sequence[Sequence[int]]) -> PLMap:
    return PLMap(
        tuple(
            (Fraction(xn, 2**xe), Fraction(yn, 2**ye)) for xn, xe, yn, ye in data
        )
    )
