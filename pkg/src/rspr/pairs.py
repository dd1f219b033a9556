"""Tree-forest (TF) pairs and the pair-level operations: preprocessing,
forced cuts, induced sub-pairs, and agreement-cut testing.

A TF pair is a phylogenetic tree T and a phylogenetic forest F over the same
leaf-label set.  Sub-pair construction keeps vertex ids stable on both sides
and returns an explicit correspondence from surviving F-edges back to the
edges of the input F, so cuts found on reduced pairs can be lifted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import InternalInvariantError, UsageError
from .forest import Forest

DUMMY_LABEL = "__dummy__"


@dataclass
class TFPair:
    """A tree T and forest F sharing one leaf-label set.

    ``composite`` maps each composite leaf label (created by contracting an
    agreeing subtree pair) to the tuple of original input labels it absorbed.
    """

    T: Forest
    F: Forest
    composite: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def is_bottom(self) -> bool:
        return self.T.is_empty() and self.F.is_empty()

    def labels(self) -> set[str]:
        return self.T.labels()

    def expand_label(self, label: str) -> tuple[str, ...]:
        """Original input labels behind ``label`` (itself, if not composite)."""
        return self.composite.get(label, (label,))

    def expand_labels(self, labels: Iterable[str]) -> frozenset[str]:
        out: list[str] = []
        for x in labels:
            out.extend(self.expand_label(x))
        return frozenset(out)

    def check(self) -> None:
        """Validate the TFPair invariants (raises InternalInvariantError)."""
        self.T.check_structure()
        self.F.check_structure()
        if self.is_bottom():
            return
        if len(self.T) != 1:
            raise InternalInvariantError("T must be connected")
        if self.T.labels() != self.F.labels():
            raise InternalInvariantError("label sets differ")
        if not (self.T.is_phylogenetic() and self.F.is_phylogenetic()):
            raise InternalInvariantError("pair is not phylogenetic")


def _composite_label(pair: TFPair, constituents: Iterable[str]) -> tuple[str, tuple[str, ...]]:
    parts: list[str] = []
    for lab in constituents:
        parts.extend(pair.expand_label(lab))
    flat = tuple(sorted(parts))
    label = "+".join(flat)
    while label in pair.T.labels() or label in pair.composite:
        label += "'"
    return label, flat


def _contract_to_leaf(forest: Forest, v: int, label: str) -> None:
    """Replace the subtree at v by a single leaf labeled ``label`` (v keeps
    its id, so any edge entering v keeps its identity)."""
    for u in forest.subtree_ids(v):
        if u != v:
            del forest.vertices[u]
    vert = forest.vertices[v]
    vert.children = []
    vert.label = label
    forest._invalidate()


def _delete_component(forest: Forest, root: int) -> None:
    for u in forest.subtree_ids(root):
        del forest.vertices[u]
    forest.roots.remove(root)
    forest._invalidate()


def _delete_leaf(forest: Forest, v: int) -> None:
    """Remove leaf v; binarize its parent if it becomes unifurcate."""
    p = forest.vertices[v].parent
    if p is None:
        _delete_component(forest, v)
        return
    forest.vertices[p].children.remove(v)
    del forest.vertices[v]
    kids = forest.vertices[p].children
    if len(kids) == 1:
        c = kids[0]
        gp = forest.vertices[p].parent
        forest.vertices[c].parent = gp
        if gp is None:
            forest.roots[forest.roots.index(p)] = c
        else:
            pk = forest.vertices[gp].children
            pk[pk.index(p)] = c
        del forest.vertices[p]
    forest._invalidate()


def _normalize(pair: TFPair) -> None:
    """Reduce ``pair`` in place to the invariant-satisfying form:

    - delete isomorphic component pairs (one from T, one from F);
    - contract every maximal agreeing non-leaf pair (subtrees isomorphic,
      parents' subtrees not) into a shared composite leaf;
    - remove labels that are both a leaf and a root of F from both sides.

    Each rule preserves the rSPR distance.  Runs to fixpoint.
    """
    T, F = pair.T, pair.F
    changed = True
    while changed:
        changed = False

        # Matched components.
        t_comp = {T.canon(r): r for r in T.roots}
        for fr in list(F.roots):
            key = F.canon(fr)
            tr = t_comp.get(key)
            if tr is not None and tr in T.roots:
                _delete_component(T, tr)
                _delete_component(F, fr)
                del t_comp[key]
                changed = True
        if pair.is_bottom():
            return

        # Maximal agreeing pairs: same canonical subtree on both sides,
        # parents disagreeing (a missing parent disagrees with everything).
        t_by_canon = {
            T.canon(v): v
            for v in T.vertices
            if not T.is_leaf(v)
        }
        agree: list[tuple[int, int]] = []
        for v in sorted(F.vertices):
            if F.is_leaf(v):
                continue
            alpha = t_by_canon.get(F.canon(v))
            if alpha is None:
                continue
            tp, fp = T.parent(alpha), F.parent(v)
            if tp is not None and fp is not None and T.canon(tp) == F.canon(fp):
                continue
            agree.append((alpha, v))
        for alpha, v in sorted(agree, key=lambda av: T.canon(av[0])):
            if alpha not in T.vertices or v not in F.vertices:
                continue
            label, flat = _composite_label(pair, sorted(T.leaf_set(alpha)))
            pair.composite[label] = flat
            _contract_to_leaf(T, alpha, label)
            _contract_to_leaf(F, v, label)
            changed = True

        # Labels that are both a leaf and a root of F.
        for fr in list(F.roots):
            if F.is_leaf(fr):
                lab = F.label(fr)
                tv = T.leaf_by_label(lab)
                _delete_leaf(F, fr)
                _delete_leaf(T, tv)
                changed = True


def preprocess(pair: TFPair, add_dummy: bool = False) -> TFPair:
    """Return the reduced form of a raw pair: optionally augment both sides
    with a shared dummy leaf under a new root, then normalize.

    The input pair is not modified.  Label sets must match.
    """
    if pair.T.labels() != pair.F.labels():
        raise UsageError("T and F must carry the same label set")
    out = TFPair(pair.T.copy(), pair.F.copy(), dict(pair.composite))
    if add_dummy:
        for forest in (out.T, out.F):
            if not forest.roots:
                raise UsageError("cannot add a dummy to an empty forest")
            old = forest.roots[0]
            d = forest.add_leaf(DUMMY_LABEL)
            r = forest._fresh_id()
            from .forest import Vertex

            forest.vertices[r] = Vertex(children=[old, d])
            forest.vertices[old].parent = r
            forest.vertices[d].parent = r
            forest.roots.remove(old)
            forest.roots.remove(d)
            forest.roots.insert(0, r)
            forest._invalidate()
    _normalize(out)
    out.check()
    return out


def forced_cut(pair: TFPair, cut_f: Iterable[int]) -> frozenset[int]:
    """The cut of T forced by a cut of F: repeatedly detach a non-root
    dangling subtree of T-so-far that is isomorphic to a component of
    F (-) cut_f.  Deterministic: components are tried in canonical order
    (so single-leaf components detach first), repeatedly until stable.
    """
    f_red, _ = pair.F.ominus(cut_f)
    component_keys = sorted(f_red.canon(r) for r in f_red.roots)
    cut_t: set[int] = set()
    pending = list(component_keys)
    while pending:
        t_cur, corr = pair.T.ominus(cut_t)
        by_canon = {
            t_cur.canon(v): v
            for v in t_cur.postorder()
            if not t_cur.is_root(v)
        }
        progress = False
        for key in list(pending):
            hit = by_canon.get(key)
            if hit is not None:
                cut_t.add(corr[hit])
                pending.remove(key)
                progress = True
                break
        if not progress:
            return frozenset(cut_t)
    return frozenset(cut_t)


def induced_subpair(
    pair: TFPair, cut_f: Iterable[int]
) -> tuple[TFPair, dict[int, int]]:
    """The sub-TF pair induced by ``cut_f`` plus the map from surviving
    F-edges (head ids) to the corresponding edges of the input F.

    The result is (bottom, {}) exactly when ``cut_f`` is an agreement cut.
    """
    cut_t = forced_cut(pair, cut_f)
    t0, _ = pair.T.ominus(cut_t)
    f0, corr = pair.F.ominus(cut_f)
    sub = TFPair(t0, f0, dict(pair.composite))
    _normalize(sub)
    corr = {v: corr[v] for v in sub.F.edges() if v in corr}
    if not sub.is_bottom():
        sub.check()
    return sub, corr


def _spans_disjoint(tree: Forest, parts: list[frozenset[str]]) -> bool:
    """True iff the minimal connecting subtrees of the label sets in
    ``parts`` are pairwise vertex-disjoint in ``tree``."""
    owner: dict[int, int] = {}
    for i, part in enumerate(parts):
        ids = [tree.leaf_by_label(x) for x in part]
        top = tree.lca(ids)
        if top is None:
            return False
        for leaf in ids:
            v: Optional[int] = leaf
            while v is not None:
                if owner.get(v, i) != i:
                    return False
                if v in owner:
                    break
                owner[v] = i
                if v == top:
                    break
                v = tree.vertices[v].parent
    return True


def is_agreement_cut(pair: TFPair, cut_f: Iterable[int]) -> bool:
    """True iff the sub-TF pair induced by ``cut_f`` is (bottom, bottom).

    Uses the direct agreement-forest characterization (component label sets
    partition L; each component isomorphic to the binarized T-restriction;
    connecting subtrees pairwise disjoint in T), which is property-tested
    against the definitional route.
    """
    if pair.is_bottom():
        return not set(cut_f)
    f_red, _ = pair.F.ominus(cut_f)
    parts = []
    comps = []
    for r in f_red.roots:
        parts.append(f_red.leaf_set(r))
        comps.append(f_red.canon(r))
    for part, comp_key in zip(parts, comps):
        restricted = pair.T.restrict(part).binarized()
        if len(restricted.roots) != 1:
            return False
        if restricted.canon(restricted.roots[0]) != comp_key:
            return False
    return _spans_disjoint(pair.T, parts)


def is_agreement_cut_by_definition(pair: TFPair, cut_f: Iterable[int]) -> bool:
    """Reference route: build the induced sub-pair and test emptiness."""
    sub, _ = induced_subpair(pair, cut_f)
    return sub.is_bottom()
