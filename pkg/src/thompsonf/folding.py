"""Stallings-style folding for subgroups of F, in dimension 2.

A finitely generated subgroup H is turned into a finite machine in three
steps.  Each generator becomes its reduced tree-pair diagram, every caret of
which is one *cell* ``top -> left right`` (three edge slots).  Gluing the
top and bottom paths of all the diagrams onto a single base edge gives a
bouquet of spheres.  Folding then repeatedly identifies any two cells that
share their top edge (merging the two bottom edge pairs) or share their
bottom edge pair (merging the two tops), until cells are uniquely determined
by their top and by their bottom pair.  Folding is confluent, so the result
-- the 2-core of H -- does not depend on the processing order, nor on the
chosen generating set of H.

A folded core accepts a tree pair deterministically: map the pair's top edge
to the base edge, expand the domain tree downward through top-lookups,
recombine the range tree upward through bottom-pair lookups, and accept when
the final edge is the base again.  The accepted elements form the closure
Cl(H), a subgroup containing H; for the named subgroups used elsewhere in
this package (the x_0x_1, x_1x_2, x_2x_3 subgroup and point stabilizers)
acceptance is exact membership.

Edge and cell identifiers count from 1 in allocation order, and every merge
is recorded in a replayable trace.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .treepairs import (
    LEAF,
    BinTree,
    TreePair,
    reduce_dipoles,
    tree_leaf_addresses,
    word_to_diagram,
)
from .words import WordLike


@dataclass(frozen=True)
class FoldEvent:
    """One identification step: the cells merged and the edge classes unified."""

    kind: str  # "glue" (base identification) or "fold"
    cells: frozenset[int]
    edge_classes: tuple[frozenset[int], ...]


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def add(self, x: int) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra

    def classes(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), set()).add(x)
        return {r: frozenset(s) for r, s in out.items()}


@dataclass
class TwoAutomaton:
    """Mutable bouquet/folding state; freeze with :func:`fold_to_fixpoint`."""

    edges: _UnionFind = field(default_factory=_UnionFind)
    cells: _UnionFind = field(default_factory=_UnionFind)
    cell_data: dict[int, tuple[int, int, int]] = field(default_factory=dict)
    base: int = 0
    folded: bool = False
    trace: list[FoldEvent] = field(default_factory=list)
    edges_allocated: int = 0
    cells_allocated: int = 0

    def new_edge(self) -> int:
        self.edges_allocated += 1
        self.edges.add(self.edges_allocated)
        return self.edges_allocated

    def new_cell(self, top: int, left: int, right: int) -> int:
        self.cells_allocated += 1
        self.cells.add(self.cells_allocated)
        self.cell_data[self.cells_allocated] = (top, left, right)
        return self.cells_allocated

    def canonical_cell(self, c: int) -> tuple[int, int, int]:
        t, l, r = self.cell_data[c]
        find = self.edges.find
        return (find(t), find(l), find(r))

    def active_cells(self) -> list[int]:
        reps = {}
        for c in sorted(self.cell_data):
            reps.setdefault(self.cells.find(c), c)
        return sorted(reps)

    def copy(self) -> TwoAutomaton:
        dup = TwoAutomaton()
        dup.edges.parent = dict(self.edges.parent)
        dup.cells.parent = dict(self.cells.parent)
        dup.cell_data = dict(self.cell_data)
        dup.base = self.base
        dup.folded = self.folded
        dup.trace = list(self.trace)
        dup.edges_allocated = self.edges_allocated
        dup.cells_allocated = self.cells_allocated
        return dup


def _add_diagram(auto: TwoAutomaton, pair: TreePair) -> tuple[int, int]:
    """Allocate edges and cells for one diagram; returns (top edge, bottom edge).

    Domain-tree nodes get edges in pre-order (the root is the top edge) and
    their carets become cells top -> children.  Range-tree carets reuse the
    shared leaf edges and get fresh top edges in post-order, the range root
    being the bottom edge of the diagram.
    """
    edge_of: dict[str, int] = {}

    def alloc_edges(node: BinTree, address: str) -> None:
        edge_of[address] = auto.new_edge()
        if node != LEAF:
            alloc_edges(node[0], address + "0")
            alloc_edges(node[1], address + "1")

    def make_cells(node: BinTree, address: str) -> None:
        if node == LEAF:
            return
        auto.new_cell(edge_of[address], edge_of[address + "0"], edge_of[address + "1"])
        make_cells(node[0], address + "0")
        make_cells(node[1], address + "1")

    alloc_edges(pair.domain, "")
    make_cells(pair.domain, "")
    top = edge_of[""]
    leaves = iter(edge_of[a] for a in tree_leaf_addresses(pair.domain))

    def walk_range(node: BinTree) -> int:
        if node == LEAF:
            return next(leaves)
        left_edge = walk_range(node[0])
        right_edge = walk_range(node[1])
        edge = auto.new_edge()
        auto.new_cell(edge, left_edge, right_edge)
        return edge

    bottom = walk_range(pair.range)
    return top, bottom


def bouquet(pairs: Sequence[TreePair]) -> TwoAutomaton:
    """Glue the diagrams' top and bottom paths into one base edge.

    The base is the first diagram's top edge (a fresh lone edge when the
    generator list is empty).
    """
    auto = TwoAutomaton()
    glued: set[int] = set()
    for pair in pairs:
        top, bottom = _add_diagram(auto, pair)
        if not glued:
            auto.base = top
        auto.edges.union(auto.base, top)
        auto.edges.union(auto.base, bottom)
        glued.update((top, bottom))
    if not glued:
        auto.base = auto.new_edge()
    if len(glued) > 1:
        auto.trace.append(FoldEvent("glue", frozenset(), (frozenset(glued),)))
    return auto


def _collisions(auto: TwoAutomaton) -> list[tuple[tuple, list[int]]]:
    by_top: dict[int, list[int]] = {}
    by_bottom: dict[tuple[int, int], list[int]] = {}
    for c in auto.active_cells():
        t, l, r = auto.canonical_cell(c)
        by_top.setdefault(t, []).append(c)
        by_bottom.setdefault((l, r), []).append(c)
    out: list[tuple[tuple, list[int]]] = []
    for t, cs in sorted(by_top.items()):
        if len(cs) > 1:
            out.append((("top", t), cs))
    for key, cs in sorted(by_bottom.items()):
        if len(cs) > 1:
            out.append((("bottom", key), cs))
    return out


def fold_to_fixpoint(
    auto: TwoAutomaton, rng: random.Random | None = None
) -> FoldedCore:
    """Fold until every top and every bottom pair determines at most one cell.

    The default order processes the smallest colliding key first; an ``rng``
    randomizes the order (the folded result is the same either way).
    """
    while True:
        collisions = _collisions(auto)
        if not collisions:
            break
        key, cs = collisions[0] if rng is None else rng.choice(collisions)
        first = cs[0]
        for other in cs[1:]:
            auto.cells.union(first, other)
        merged_edges: list[frozenset[int]] = []
        if key[0] == "top":
            for slot in (1, 2):
                root = auto.canonical_cell(first)[slot]
                for other in cs[1:]:
                    root = auto.edges.union(root, auto.canonical_cell(other)[slot])
                merged_edges.append(auto.edges.classes()[auto.edges.find(root)])
        else:
            root = auto.canonical_cell(first)[0]
            for other in cs[1:]:
                root = auto.edges.union(root, auto.canonical_cell(other)[0])
            merged_edges.append(auto.edges.classes()[auto.edges.find(root)])
        members = auto.cells.classes()[auto.cells.find(first)]
        auto.trace.append(FoldEvent("fold", members, tuple(merged_edges)))
    auto.folded = True
    return FoldedCore._from_builder(auto)


@dataclass(frozen=True)
class FoldedCore:
    """Immutable folded 2-automaton; queries are pure and shareable."""

    base: int
    cells_by_top: dict[int, tuple[int, int, int]]
    cells_by_bottom: dict[tuple[int, int], int]
    edge_classes: dict[int, frozenset[int]]
    cell_classes: dict[int, frozenset[int]]
    trace: tuple[FoldEvent, ...]
    builder: TwoAutomaton = field(repr=False, compare=False)

    @staticmethod
    def _from_builder(auto: TwoAutomaton) -> FoldedCore:
        cells_by_top: dict[int, tuple[int, int, int]] = {}
        cells_by_bottom: dict[tuple[int, int], int] = {}
        for c in auto.active_cells():
            t, l, r = auto.canonical_cell(c)
            if t in cells_by_top or (l, r) in cells_by_bottom:
                raise AssertionError("folding left duplicate cells")
            cells_by_top[t] = (t, l, r)
            cells_by_bottom[(l, r)] = t
        return FoldedCore(
            base=auto.edges.find(auto.base),
            cells_by_top=cells_by_top,
            cells_by_bottom=cells_by_bottom,
            edge_classes=auto.edges.classes(),
            cell_classes=auto.cells.classes(),
            trace=tuple(auto.trace),
            builder=auto,
        )

    @property
    def edge_count(self) -> int:
        return len(self.edge_classes)

    @property
    def cell_count(self) -> int:
        return len(self.cells_by_top)

    # -- acceptance -----------------------------------------------------------

    def accepts(self, pair: TreePair) -> bool:
        """Deterministic morphism search for the diagram of ``pair``.

        Walk the domain tree downward from the base edge through top-lookups,
        then the range tree upward through bottom-pair lookups; accept when
        every lookup exists and the range root lands on the base edge.
        """
        leaf_images: list[int] = []

        def down(node: BinTree, edge: int) -> bool:
            if node == LEAF:
                leaf_images.append(edge)
                return True
            cell = self.cells_by_top.get(edge)
            if cell is None:
                return False
            return down(node[0], cell[1]) and down(node[1], cell[2])

        if not down(pair.domain, self.base):
            return False
        leaves = iter(leaf_images)

        def up(node: BinTree) -> int | None:
            if node == LEAF:
                return next(leaves)
            left = up(node[0])
            if left is None:
                return None
            right = up(node[1])
            if right is None:
                return None
            return self.cells_by_bottom.get((left, right))

        return up(pair.range) == self.base

    def accepts_word(self, w: WordLike) -> bool:
        return self.accepts(word_to_diagram(w))

    # -- canonical form --------------------------------------------------------

    def canonical(self) -> dict:
        """Isomorphism-invariant relabeling from the base edge.

        Breadth-first: expand known edges through their top-cells (children
        ordered left then right); when stuck, scan known edge pairs in index
        order for a bottom-lookup whose top is new.  Two folded cores are
        isomorphic exactly when their canonical forms are equal.
        """
        index: dict[int, int] = {self.base: 0}
        order: list[int] = [self.base]

        def discover(edge: int) -> None:
            if edge not in index:
                index[edge] = len(order)
                order.append(edge)

        progress = True
        while progress:
            progress = False
            i = 0
            while i < len(order):
                cell = self.cells_by_top.get(order[i])
                if cell is not None:
                    before = len(order)
                    discover(cell[1])
                    discover(cell[2])
                    progress = progress or len(order) > before
                i += 1
            found = None
            for a in order:
                for b in order:
                    top = self.cells_by_bottom.get((a, b))
                    if top is not None and top not in index:
                        found = top
                        break
                if found is not None:
                    break
            if found is not None:
                discover(found)
                progress = True
        if len(index) != self.edge_count:
            raise AssertionError("core is not connected to its base edge")
        cells = sorted(
            [index[t], index[l], index[r]] for t, l, r in self.cells_by_top.values()
        )
        return {
            "base": 0,
            "edges": list(range(len(order))),
            "cells": [{"top": t, "left": l, "right": r} for t, l, r in cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True)

    def to_dot(self) -> str:
        """Cells as triangle nodes wired top -> cell -> left, right."""
        data = self.canonical()
        lines = [
            "digraph core {",
            '  node [shape=circle];',
            f'  e0 [shape=doublecircle label="e0 (base)"];',
        ]
        for e in data["edges"][1:]:
            lines.append(f'  e{e} [label="e{e}"];')
        for k, cell in enumerate(data["cells"]):
            lines.append(f'  c{k} [shape=triangle label="cell{k}"];')
            lines.append(f'  e{cell["top"]} -> c{k} [label="top"];')
            lines.append(f'  c{k} -> e{cell["left"]} [label="left"];')
            lines.append(f'  c{k} -> e{cell["right"]} [label="right"];')
        lines.append("}")
        return "\n".join(lines)


def core_from_json(text: str) -> FoldedCore:
    """Rebuild a folded core from its canonical JSON export."""
    data = json.loads(text)
    auto = TwoAutomaton()
    ids = {}
    for e in data["edges"]:
        ids[e] = auto.new_edge()
    auto.base = ids[data["base"]]
    for cell in data["cells"]:
        auto.new_cell(ids[cell["top"]], ids[cell["left"]], ids[cell["right"]])
    return fold_to_fixpoint(auto)


def core_from_dot(text: str) -> FoldedCore:
    """Inverse of :meth:`FoldedCore.to_dot`."""
    tops = {}
    lefts = {}
    rights = {}
    for m in re.finditer(r"e(\d+) -> c(\d+)", text):
        tops[int(m.group(2))] = int(m.group(1))
    for m in re.finditer(r'c(\d+) -> e(\d+) \[label="(left|right)"\]', text):
        (lefts if m.group(3) == "left" else rights)[int(m.group(1))] = int(m.group(2))
    edges = set(tops.values()) | set(lefts.values()) | set(rights.values()) | {0}
    payload = {
        "base": 0,
        "edges": sorted(edges),
        "cells": [
            {"top": tops[k], "left": lefts[k], "right": rights[k]} for k in sorted(tops)
        ],
    }
    return core_from_json(json.dumps(payload))


def build_core_from_pairs(
    pairs: Iterable[TreePair], rng: random.Random | None = None
) -> FoldedCore:
    reduced = [reduce_dipoles(p) for p in pairs]
    return fold_to_fixpoint(bouquet(reduced), rng=rng)


def build_core(gens: Iterable[WordLike], rng: random.Random | None = None) -> FoldedCore:
    """The 2-core of the subgroup generated by the given words."""
    return build_core_from_pairs([word_to_diagram(g) for g in gens], rng=rng)


def extend_core(core: FoldedCore, pair: TreePair) -> FoldedCore:
    """Add one generator diagram to an existing core and re-fold.

    Folding is local, so feeding generators incrementally produces the same
    core as building the bouquet in one go; this is how an infinite
    generating set would be consumed.
    """
    auto = core.builder.copy()
    auto.folded = False
    top, bottom = _add_diagram(auto, reduce_dipoles(pair))
    auto.edges.union(auto.base, top)
    auto.edges.union(auto.base, bottom)
    auto.trace.append(
        FoldEvent("glue", frozenset(), (frozenset({auto.edges.find(auto.base), top, bottom}),))
    )
    return fold_to_fixpoint(auto)


def closure_member(gens: Sequence[WordLike], w: WordLike) -> bool:
    """Membership of w in Cl(<gens>): acceptance of its reduced diagram.

    This equals membership in the subgroup itself exactly when the subgroup
    is closed.
    """
    return build_core(gens).accepts(word_to_diagram(w))
