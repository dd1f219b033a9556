"""Seeded random instance generation: Yule and uniform tree shapes, and
random rSPR moves (detach a non-root subtree, reattach on another edge),
which bound the true distance of a generated pair by the move count.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import UsageError
from .forest import Forest, Vertex
from .pairs import TFPair


@dataclass(frozen=True)
class GenSpec:
    """A reproducible instance recipe."""

    n_leaves: int
    n_moves: int
    seed: int
    shape: str = "yule"

    def __post_init__(self):
        if self.n_leaves < 2:
            raise UsageError("need at least two leaves")
        if self.n_moves < 0:
            raise UsageError("move count must be non-negative")
        if self.shape not in ("yule", "uniform"):
            raise UsageError(f"unknown shape {self.shape!r}")


def _insert_above(forest: Forest, below: int, new_leaf: int) -> None:
    """Subdivide the edge entering ``below`` (or add a new root when
    ``below`` is a root) and hang ``new_leaf`` off the new vertex."""
    p = forest.vertices[below].parent
    nv = forest._fresh_id()
    forest.vertices[nv] = Vertex(parent=p, children=[below, new_leaf])
    if p is None:
        forest.roots[forest.roots.index(below)] = nv
    else:
        kids = forest.vertices[p].children
        kids[kids.index(below)] = nv
    forest.vertices[below].parent = nv
    forest.vertices[new_leaf].parent = nv
    if new_leaf in forest.roots:
        forest.roots.remove(new_leaf)
    forest._invalidate()


def random_tree(labels: list[str], rng: random.Random, shape: str = "yule") -> Forest:
    """A random rooted binary tree over ``labels``.

    "uniform" inserts each next leaf on a uniformly random edge (including
    the virtual edge above the root), which is exactly uniform over
    leaf-labeled rooted topologies; "yule" splits a uniformly random
    current leaf.
    """
    if len(labels) < 1:
        raise UsageError("need at least one label")
    f = Forest()
    f.add_leaf(labels[0])
    for lab in labels[1:]:
        leaf = f.add_leaf(lab)
        if shape == "uniform":
            spots = [v for v in sorted(f.vertices) if v != leaf]
        else:
            spots = [v for v in sorted(f.vertices)
                     if v != leaf and f.is_leaf(v)]
        below = rng.choice(spots)
        _insert_above(f, below, leaf)
    return f


def spr_move(forest: Forest, rng: random.Random) -> Forest:
    """One random rSPR move on a tree: detach a random non-root subtree
    and reattach it by subdividing a random edge outside it.  Returns a
    new forest; the input is unchanged."""
    cands = [v for v in sorted(forest.vertices) if not forest.is_root(v)]
    v = rng.choice(cands)
    red, _ = forest.ominus([v])
    inside = set(red.subtree_ids(v))
    spots = [h for h in red.edges() if h not in inside]
    spots += [r for r in red.roots if r != v]  # above a root is legal too
    if not spots:
        return forest.copy()
    below = rng.choice(sorted(set(spots)))
    red.roots.remove(v)
    _attach(red, below, v)
    return red


def _attach(forest: Forest, below: int, sub_root: int) -> None:
    p = forest.vertices[below].parent
    nv = forest._fresh_id()
    forest.vertices[nv] = Vertex(parent=p, children=[below, sub_root])
    if p is None:
        forest.roots[forest.roots.index(below)] = nv
    else:
        kids = forest.vertices[p].children
        kids[kids.index(below)] = nv
    forest.vertices[below].parent = nv
    forest.vertices[sub_root].parent = nv
    forest._invalidate()


def gen_pair(spec: GenSpec) -> TFPair:
    """The raw (un-preprocessed) pair for ``spec``: a random T, and F = T
    plus ``n_moves`` random rSPR moves.  Deterministic in the seed; the
    true distance is at most ``n_moves``."""
    rng = random.Random(spec.seed)
    labels = [f"t{i + 1}" for i in range(spec.n_leaves)]
    t = random_tree(labels, rng, spec.shape)
    f = t.copy()
    for _ in range(spec.n_moves):
        f = spr_move(f, rng)
    return TFPair(t, f)
