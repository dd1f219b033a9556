"""Executable key calculus: key validation, the per-path lower bound
b(key, P) = |f_e| + |f_c|, the exact search-tree lower bound b_Y(key), and
good/fair certification.

This module is the test oracle for every key the approximation engine
constructs; the exact b_Y evaluation enumerates all Y-search trees as a
max/min game over cherry choices and is gated to small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import ResourceError, UsageError
from .exact import SearchNode, _atom_expansion, _branches, _sibling_leaf_pairs, _advance, _State
from .forest import Forest
from .pairs import TFPair, induced_subpair


@dataclass(frozen=True)
class Key:
    """A key (X, B, R): a label set X forming dangling subtrees of T, a cut
    B inside F's X-zone, and (for abnormal keys) the edge set R of the path
    between the two X-leaves whose edges stay uncut."""

    X: frozenset[str]
    B: frozenset[int]
    R: frozenset[int] = frozenset()

    @property
    def kind(self) -> str:
        return "normal" if not self.R else "abnormal"

    @property
    def size(self) -> int:
        return len(self.B)


@dataclass(frozen=True)
class KeyBound:
    """f_e, f_c and b for one root-leaf path."""

    free_edges: frozenset[int]
    free_component_roots: frozenset[int]

    @property
    def bound(self) -> int:
        return len(self.free_edges) + len(self.free_component_roots)


PathLike = Union[frozenset, set, Sequence[SearchNode]]


def _path_cut(path: PathLike) -> frozenset[int]:
    if isinstance(path, (frozenset, set)):
        return frozenset(path)
    return path[-1].accumulated_cut


# --------------------------------------------------------------------- #
# Validation
# --------------------------------------------------------------------- #

def dangling_components_ok(tree: Forest, x: frozenset[str]) -> bool:
    """Condition 1: every component of the restriction of ``tree`` to ``x``
    is a full dangling subtree, i.e. its root's whole leaf set lies in x."""
    kept = tree.restrict_vertex_set(x)
    for v in kept:
        p = tree.parent(v)
        while p is not None and p not in kept:
            p = tree.parent(p)
        if p is None and not (tree.leaf_set(v) <= x):
            return False
    return True


def edge_zone(forest: Forest, x: frozenset[str]) -> frozenset[int]:
    """E_X: edges of ``forest`` whose tail or head lies in the restriction
    to ``x``."""
    kept = forest.restrict_vertex_set(x)
    return frozenset(
        h for h in forest.edges() if h in kept or forest.parent(h) in kept
    )


def is_cut(forest: Forest, edges: Iterable[int]) -> bool:
    """True iff every component of F - edges contains a labeled leaf."""
    gone = set(edges)
    for h in gone:
        if forest.is_root(h):
            return False
    labeled_root: dict[int, bool] = {}
    for u in forest.postorder():
        vert = forest.vertices[u]
        kids = [c for c in vert.children if c not in gone]
        has = vert.label is not None or any(labeled_root[c] for c in kids)
        labeled_root[u] = has
        if u in gone and not has:
            return False
    return all(labeled_root[r] for r in forest.roots)


def is_canonical_cut(forest: Forest, edges: Iterable[int]) -> bool:
    """True iff additionally every leaf of F - edges is labeled."""
    gone = set(edges)
    if not is_cut(forest, edges):
        return False
    for u in forest.vertices:
        kids = [c for c in forest.children(u) if c not in gone]
        if not kids and forest.label(u) is None:
            return False
    return True


def key_violation(pair: TFPair, key: Key) -> Optional[str]:
    """None when ``key`` is a key of ``pair``; otherwise a reason code.

    The dangling-components condition is enforced for abnormal keys, whose
    merge semantics rely on it; normal keys built from several dangling
    pieces (crossing cherries, port keys) join up through their T-side LCA
    in the restriction, and the lower-bound machinery stays sound for them
    because truncated search-tree paths only ever shrink b.
    """
    T, F = pair.T, pair.F
    if not key.X:
        return "empty-X"
    if not key.X <= T.labels():
        return "X-not-in-labels"
    if key.R and not dangling_components_ok(T, key.X):
        return "condition1"
    if not key.B <= edge_zone(F, key.X):
        return "B-outside-EX"
    if not is_cut(F, key.B):
        return "B-not-a-cut"
    leaf_edges = {}
    for lab in sorted(key.X):
        v = F.leaf_by_label(lab)
        if F.is_root(v):
            return "X-leaf-is-root"
        leaf_edges[lab] = v
    missing = [lab for lab, v in leaf_edges.items() if v not in key.B]
    if not missing:
        return None if not key.R else "R-nonempty-for-normal"
    if len(missing) != 2:
        return "leaf-edges-outside-B"
    x1, x2 = (leaf_edges[lab] for lab in missing)
    red, _ = F.ominus(key.B)
    r1, r2 = red.leaf_by_label(missing[0]), red.leaf_by_label(missing[1])
    if red.parent(r1) is None or red.parent(r1) != red.parent(r2):
        return "not-siblings-after-B"
    if key.R != F.path_edges(x1, x2):
        return "R-mismatch"
    if key.B & key.R:
        return "B-R-overlap"
    # Comment after Condition 3: the two leaves are siblings in T once the
    # other X-leaf edges are detached.
    other = frozenset(
        T.leaf_by_label(lab) for lab in key.X if lab not in missing
    )
    t_red, _ = T.ominus(other)
    t1, t2 = t_red.leaf_by_label(missing[0]), t_red.leaf_by_label(missing[1])
    if t_red.parent(t1) is None or t_red.parent(t1) != t_red.parent(t2):
        return "not-siblings-in-T"
    return None


def validate_key(pair: TFPair, key: Key) -> bool:
    return key_violation(pair, key) is None


# --------------------------------------------------------------------- #
# Bounds
# --------------------------------------------------------------------- #

def bound_for_path(pair: TFPair, key: Key, path: PathLike) -> KeyBound:
    """f_e, f_c and b for one root-leaf path (given as a path record from
    enumerate_search_tree or as its cut edge set over pair.F)."""
    cut = _path_cut(path)
    f_e = cut & (key.B | key.R)
    removed = (cut - key.R) | key.B
    F = pair.F
    free_roots = []
    has_label: dict[int, bool] = {}
    for u in F.postorder():
        vert = F.vertices[u]
        kids = [c for c in vert.children if c not in removed]
        has_label[u] = vert.label is not None or any(has_label[c] for c in kids)
    for u in sorted(F.vertices):
        if (u in removed or F.is_root(u)) and not has_label[u]:
            free_roots.append(u)
    return KeyBound(frozenset(f_e), frozenset(free_roots))


def key_lower_bound(
    pair: TFPair,
    key: Key,
    y: Optional[frozenset[str]] = None,
    mode: str = "exact",
) -> int:
    """b_Y(key): max over Y-search trees of the min over root-leaf paths of
    b(key, P).

    mode "exact" evaluates the max/min game over all cherry choices (gated
    to |Y| <= 10); mode "witness" evaluates min over the paths of the one
    deterministic Y-search tree, a valid lower bound on b_Y.
    """
    y = frozenset(y) if y is not None else key.X
    if not key.X <= y:
        raise UsageError("Y must contain the key's X")
    if not y <= pair.T.labels():
        raise UsageError("Y must be a subset of L(T)")
    if mode == "witness":
        from .exact import enumerate_search_tree

        return min(
            bound_for_path(pair, key, p).bound
            for p in enumerate_search_tree(pair, z=y, strict_z=False)
        )
    if mode != "exact":
        raise UsageError(f"unknown mode {mode!r}")
    if len(y) > 10:
        raise ResourceError(
            f"exact b_Y enumeration gated to |Y| <= 10 (got {len(y)})"
        )

    root_pair = pair
    start_pair, corr0 = induced_subpair(pair, frozenset())

    def value(cur: TFPair, cut: frozenset, corr: dict) -> int:
        cherries = []
        if not cur.is_bottom():
            for x1, x2 in _sibling_leaf_pairs(cur):
                y1 = _atom_expansion(root_pair, cur, cur.T.label(x1))
                y2 = _atom_expansion(root_pair, cur, cur.T.label(x2))
                if (y1 | y2) <= y:
                    cherries.append((x1, x2))
        if not cherries:
            return bound_for_path(pair, key, cut).bound
        best = None
        st = _State(cur, cut, corr, [])
        for x1, x2 in cherries:
            worst = None
            for _, branch in _branches(cur, x1, x2):
                sub, ncut, ncorr = _advance(st, branch)
                v = value(sub, ncut, ncorr)
                worst = v if worst is None else min(worst, v)
            best = worst if best is None else max(best, worst)
        return best  # type: ignore[return-value]

    return value(start_pair, frozenset(), dict(corr0))


def certify(
    pair: TFPair,
    key: Key,
    grade: str,
    check_distance: bool = False,
) -> bool:
    """Certify a key as good (|B| <= 2 b(key)) or fair (|B| <= 2 b(key)+1),
    using the exact b_X evaluation, which lower-bounds b_{L(T)}.

    With ``check_distance`` the drop of the exact distance across the
    induced sub-pair is also required to be at least b(key).
    """
    if grade not in ("good", "fair"):
        raise UsageError(f"unknown grade {grade!r}")
    if key_violation(pair, key) is not None:
        return False
    b = key_lower_bound(pair, key, key.X, mode="exact")
    ok = key.size <= 2 * b if grade == "good" else key.size <= 2 * b + 1
    if ok and check_distance:
        ok = distance_drop(pair, key) >= b
    return ok


def distance_drop(pair: TFPair, key: Key) -> int:
    """d(T,F) - d(T',F') across the sub-pair induced by the key's B
    (small instances only; uses the exact search)."""
    from .exact import exact_distance

    d0 = exact_distance(pair)[0]  # type: ignore[index]
    sub, _ = induced_subpair(pair, key.B)
    d1 = 0 if sub.is_bottom() else exact_distance(sub)[0]  # type: ignore[index]
    return d0 - d1
