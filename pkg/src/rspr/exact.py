"""Exact rSPR distance via the search tree, with branch-and-bound pruning,
an independent brute-force oracle, and (Z-)search-tree enumeration.

The search works on induced sub-pairs: at each node a sibling-leaf pair of
the current tree is picked (the cherry) and up to three child branches cut
{e_F(x1)}, {e_F(x2)}, or D_F(x1,x2).  Cuts accumulate as edges of the root
pair's F via the induced-sub-pair correspondences, so C(path) is always a
cut of the original forest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import ResourceError, UsageError
from .pairs import TFPair, induced_subpair, is_agreement_cut


@dataclass
class SearchNode:
    """One node of a search-tree path.

    ``accumulated_cut`` is C at this node, over the root pair's F.
    ``cherry`` is the pair of leaf-descendant label sets (expanded to the
    root pair's own labels) picked here, None at path ends.  ``branch_way``
    is the way (1, 2 or 3) taken from the parent into this node, None at
    the root.
    """

    accumulated_cut: frozenset[int]
    pair: TFPair
    cherry: Optional[tuple[frozenset[str], frozenset[str]]]
    branch_way: Optional[int]


@dataclass
class _State:
    pair: TFPair
    cut: frozenset[int]                 # over root F
    corr: dict[int, int]                # current F edge -> root F edge
    path: list[SearchNode]              # completed ancestor nodes
    way_in: Optional[int] = None        # branch taken into this node


def _atom_expansion(root_pair: TFPair, cur_pair: TFPair, label: str) -> frozenset[str]:
    """Express a current-pair label as the set of root-pair labels it
    absorbed (contractions always merge whole root-pair leaves)."""
    if label in root_pair.T.labels() or label == "":
        return frozenset([label])
    target = set(cur_pair.expand_label(label))
    atoms = [
        a for a in root_pair.T.labels()
        if set(root_pair.expand_label(a)) <= target
    ]
    covered = set()
    for a in atoms:
        covered.update(root_pair.expand_label(a))
    if covered != target:
        raise UsageError(f"label {label!r} does not align with the root pair")
    return frozenset(atoms)


def _sibling_leaf_pairs(pair: TFPair) -> list[tuple[int, int]]:
    """Sibling-leaf pairs of T, deepest parent first, then lowest ids."""
    T = pair.T
    out = []
    for v in T.vertices:
        kids = T.children(v)
        if len(kids) == 2 and all(T.is_leaf(c) for c in kids):
            a, b = sorted(kids)
            out.append((T.depth(v), a, b))
    out.sort(key=lambda t: (-t[0], t[1], t[2]))
    return [(a, b) for _, a, b in out]


def _branches(pair: TFPair, x1: int, x2: int) -> list[tuple[int, frozenset[int]]]:
    """The 2 or 3 branch cuts for a picked sibling-leaf pair, over the
    current pair's F (heads)."""
    F = pair.F
    f1 = F.leaf_by_label(pair.T.label(x1))
    f2 = F.leaf_by_label(pair.T.label(x2))
    ways = [(1, frozenset([f1])), (2, frozenset([f2]))]
    if F.same_component(f1, f2):
        d = F.d_edges(f1, f2)
        if d:
            ways.append((3, d))
    return ways


def _advance(state: _State, branch: frozenset[int]) -> tuple[TFPair, frozenset[int], dict[int, int]]:
    lifted = frozenset(state.corr[h] for h in branch)
    sub, step = induced_subpair(state.pair, branch)
    corr = {h: state.corr[step[h]] for h in sub.F.edges()}
    return sub, state.cut | lifted, corr


def _check_z(pair: TFPair, z: frozenset[str]) -> None:
    unknown = z - pair.T.labels()
    if unknown:
        raise UsageError(f"Z labels not in T: {sorted(unknown)}")
    kept = pair.T.restrict_vertex_set(z)
    for v in kept:
        p = pair.T.parent(v)
        while p is not None and p not in kept:
            p = pair.T.parent(p)
        if p is None and not (pair.T.leaf_set(v) <= z):
            raise UsageError(
                "Z is not a union of dangling subtrees of T"
            )


def enumerate_search_tree(
    pair: TFPair,
    z: Optional[frozenset[str]] = None,
    depth_cap: Optional[int] = None,
    policy: str = "deepest",
    strict_z: bool = True,
) -> Iterator[list[SearchNode]]:
    """Yield every root-leaf path of the deterministic (Z-)search tree.

    With ``z`` given, only cherries whose two leaf-descendant sets both lie
    inside ``z`` are picked; paths end when no such cherry remains.  The
    cherry at each node follows ``policy`` ("deepest" or "shallowest"
    sibling-leaf pair, ties by lowest vertex id).
    """
    if policy not in ("deepest", "shallowest"):
        raise UsageError(f"unknown policy {policy!r}")
    if z is not None and strict_z:
        _check_z(pair, frozenset(z))
    elif z is not None and not (frozenset(z) <= pair.T.labels()):
        raise UsageError(f"Z labels not in T")

    root_pair = pair
    start_pair, corr0 = induced_subpair(pair, frozenset())

    def expand(lab: str, p: TFPair) -> frozenset[str]:
        return _atom_expansion(root_pair, p, lab)

    stack = [_State(start_pair, frozenset(), dict(corr0), [])]
    while stack:
        st = stack.pop()
        depth = len(st.path)
        cherry_choice = None
        if not st.pair.is_bottom() and (depth_cap is None or depth < depth_cap):
            cands = _sibling_leaf_pairs(st.pair)
            if policy == "shallowest":
                cands = list(reversed(cands))
            for x1, x2 in cands:
                y1 = expand(st.pair.T.label(x1), st.pair)
                y2 = expand(st.pair.T.label(x2), st.pair)
                if z is None or (y1 | y2) <= z:
                    cherry_choice = (x1, x2, y1, y2)
                    break
        if cherry_choice is None:
            yield st.path + [SearchNode(st.cut, st.pair, None, st.way_in)]
            continue
        x1, x2, y1, y2 = cherry_choice
        here = SearchNode(st.cut, st.pair, (y1, y2), st.way_in)
        for way, branch in reversed(_branches(st.pair, x1, x2)):
            sub, cut, corr = _advance(st, branch)
            stack.append(_State(sub, cut, corr, st.path + [here], way))


def exact_distance(
    pair: TFPair,
    budget: Optional[int] = None,
    prune: bool = True,
) -> Optional[tuple[int, frozenset[int]]]:
    """Exact rSPR distance and one witness agreement cut over the pair's F.

    Returns None when ``budget`` is given and d(T,F) > budget.  With
    ``prune`` False, only the trivial incumbent bound is used (for the
    pruning-soundness tests).
    """
    from .approx import approx2, approx3  # local import: approx uses keys

    start_pair, corr0 = induced_subpair(pair, frozenset())
    if start_pair.is_bottom():
        return (0, frozenset())

    inc_cut = approx2(start_pair).cut
    inc_cut = frozenset(corr0[h] for h in inc_cut)
    best_size = len(inc_cut)
    best_cut = inc_cut
    cap = budget + 1 if budget is not None else None

    def bound_here(p: TFPair, used: int) -> bool:
        """True when the node at ``used`` cut edges cannot improve."""
        limit = best_size if cap is None else min(best_size, cap)
        if used >= limit:
            return True
        if not prune:
            return False
        lb = (len(approx3(p)) + 2) // 3
        if used + lb >= limit:
            return True
        lb = max(lb, (len(approx2(p).cut) + 1) // 2)
        return used + lb >= limit

    stack: list[_State] = [_State(start_pair, frozenset(), dict(corr0), [])]
    while stack:
        st = stack.pop()
        if st.pair.is_bottom():
            if len(st.cut) < best_size:
                best_size, best_cut = len(st.cut), st.cut
            elif len(st.cut) == best_size and sorted(st.cut) < sorted(best_cut):
                best_cut = st.cut
            continue
        if bound_here(st.pair, len(st.cut)):
            continue
        x1, x2 = _sibling_leaf_pairs(st.pair)[0]
        for _, branch in reversed(_branches(st.pair, x1, x2)):
            sub, cut, corr = _advance(st, branch)
            stack.append(_State(sub, cut, corr, []))

    if budget is not None and best_size > budget:
        return None
    return best_size, best_cut


def brute_force_distance(
    pair: TFPair, k_max: int
) -> Optional[tuple[int, frozenset[int]]]:
    """Smallest agreement cut by exhaustive enumeration of k-subsets of
    F's edges, k ascending; completely independent of the search tree.

    Returns None when no agreement cut of size <= k_max exists.  Guarded
    to small instances.
    """
    edges = sorted(pair.F.edges())
    if len(edges) > 25 and k_max > 5:
        raise ResourceError(
            f"brute force guarded to |edges| <= 25 or k_max <= 5 "
            f"(got {len(edges)} edges, k_max {k_max})"
        )
    for k in range(0, k_max + 1):
        for combo in itertools.combinations(edges, k):
            if is_agreement_cut(pair, frozenset(combo)):
                return k, frozenset(combo)
    return None
