"""Arena-based rooted forests (each vertex has at most two children) and the
single-forest combinatorial primitives everything else builds on: LCA, paths,
off-path edge sets, edge deletion with binarization (ominus), label-set
restriction, and restricted path counting.

Vertex ids are stable: ominus/restrict return fresh forests whose surviving
vertices keep the ids they had in the source forest, so edge sets (identified
by head-vertex id) can be lifted between a forest and its reductions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import DomainError, UsageError


@dataclass
class Vertex:
    parent: Optional[int] = None
    children: list[int] = field(default_factory=list)
    label: Optional[str] = None


# Canonical subtree forms are nested tuples: ('L', label) for leaves and
# ('N', child_form_1, child_form_2, ...) with child forms sorted.
CanonForm = tuple


class Forest:
    """A rooted forest with at most two children per vertex.

    Labels live on leaves only in phylogenetic (binarized) forests, but the
    class itself also tolerates unifurcate vertices so that restrictions
    (which keep their unifurcate chains) can be represented.
    """

    def __init__(self) -> None:
        self.vertices: dict[int, Vertex] = {}
        self.roots: list[int] = []
        self._next_id = 0
        self._canon_cache: dict[int, CanonForm] = {}

    # ------------------------------------------------------------------ #
    # Construction
    # ------------------------------------------------------------------ #

    def _fresh_id(self) -> int:
        i = self._next_id
        self._next_id += 1
        return i

    def _invalidate(self) -> None:
        self._canon_cache.clear()

    def add_leaf(self, label: str) -> int:
        v = self._fresh_id()
        self.vertices[v] = Vertex(label=label)
        self.roots.append(v)
        self._invalidate()
        return v

    def add_internal(self, children: Iterable[int]) -> int:
        """Create an internal vertex over existing roots.

        Every child must currently be a root; they stop being roots.
        """
        kids = list(children)
        if not 1 <= len(kids) <= 2:
            raise UsageError("internal vertex needs one or two children")
        v = self._fresh_id()
        self.vertices[v] = Vertex(children=kids)
        for c in kids:
            if self.vertices[c].parent is not None or c not in self.roots:
                raise UsageError(f"child {c} is not a root")
            self.vertices[c].parent = v
            self.roots.remove(c)
        self.roots.append(v)
        self._invalidate()
        return v

    def copy(self) -> "Forest":
        g = Forest()
        g._next_id = self._next_id
        g.roots = list(self.roots)
        g.vertices = {
            i: Vertex(parent=v.parent, children=list(v.children), label=v.label)
            for i, v in self.vertices.items()
        }
        return g

    @classmethod
    def from_nested(cls, *specs) -> "Forest":
        """Build a forest from nested 2-tuples of labels, one spec per
        component, e.g. ``Forest.from_nested((("a", "b"), "c"))``."""
        f = cls()

        def build(spec) -> int:
            if isinstance(spec, str):
                return f.add_leaf(spec)
            if len(spec) != 2:
                raise UsageError("nested spec nodes must be 2-tuples")
            return f.add_internal([build(spec[0]), build(spec[1])])

        for spec in specs:
            build(spec)
        return f

    # ------------------------------------------------------------------ #
    # Basic queries
    # ------------------------------------------------------------------ #

    def __len__(self) -> int:
        """Number of components."""
        return len(self.roots)

    def is_empty(self) -> bool:
        return not self.vertices

    def parent(self, v: int) -> Optional[int]:
        return self._vertex(v).parent

    def children(self, v: int) -> list[int]:
        return self._vertex(v).children

    def label(self, v: int) -> Optional[str]:
        return self._vertex(v).label

    def is_leaf(self, v: int) -> bool:
        return not self._vertex(v).children

    def is_root(self, v: int) -> bool:
        return self._vertex(v).parent is None

    def _vertex(self, v: int) -> Vertex:
        try:
            return self.vertices[v]
        except KeyError:
            raise UsageError(f"unknown vertex id {v}") from None

    def leaves(self) -> list[int]:
        return [v for v in sorted(self.vertices) if self.is_leaf(v)]

    def labels(self) -> set[str]:
        out = set()
        for v in self.vertices.values():
            if v.label is not None:
                out.add(v.label)
        return out

    def leaf_by_label(self, label: str) -> int:
        for i in sorted(self.vertices):
            if self.vertices[i].label == label:
                return i
        raise UsageError(f"no leaf labeled {label!r}")

    def edges(self) -> list[int]:
        """All edges, identified by head-vertex id (non-roots)."""
        return [v for v in sorted(self.vertices) if not self.is_root(v)]

    def postorder(self, root: Optional[int] = None) -> Iterator[int]:
        """Children-before-parent traversal; roots in order, children in
        stored order.  Iterative, so deep chains are fine."""
        starts = [root] if root is not None else list(self.roots)
        for r in starts:
            stack = [(r, False)]
            while stack:
                v, expanded = stack.pop()
                if expanded:
                    yield v
                else:
                    stack.append((v, True))
                    for c in reversed(self.children(v)):
                        stack.append((c, False))

    def subtree_ids(self, v: int) -> list[int]:
        """All vertex ids in the dangling subtree rooted at v (postorder)."""
        return list(self.postorder(v))

    def leaf_set(self, v: int) -> frozenset[str]:
        """Labels of the labeled leaves in the subtree rooted at v."""
        out = []
        for u in self.postorder(v):
            lab = self.vertices[u].label
            if lab is not None:
                out.append(lab)
        return frozenset(out)

    def depth(self, v: int) -> int:
        d = 0
        p = self._vertex(v).parent
        while p is not None:
            d += 1
            p = self.vertices[p].parent
        return d

    def component_root(self, v: int) -> int:
        self._vertex(v)
        while True:
            p = self.vertices[v].parent
            if p is None:
                return v
            v = p

    def same_component(self, u: int, v: int) -> bool:
        return self.component_root(u) == self.component_root(v)

    def is_ancestor(self, a: int, d: int) -> bool:
        """True iff a is an ancestor of d (every vertex is its own ancestor)."""
        self._vertex(a)
        v: Optional[int] = d
        while v is not None:
            if v == a:
                return True
            v = self.vertices[v].parent
        return False

    # ------------------------------------------------------------------ #
    # LCA and paths
    # ------------------------------------------------------------------ #

    def lca(self, ids: Iterable[int]) -> Optional[int]:
        """Lowest common ancestor of ``ids``; None if they span components."""
        it = list(ids)
        if not it:
            raise UsageError("lca of an empty set")
        cur = it[0]
        self._vertex(cur)
        for v in it[1:]:
            cur = self._lca2(cur, v)
            if cur is None:
                return None
        return cur

    def _lca2(self, u: int, v: int) -> Optional[int]:
        self._vertex(u), self._vertex(v)
        du, dv = self.depth(u), self.depth(v)
        while du > dv:
            u = self.vertices[u].parent  # type: ignore[assignment]
            du -= 1
        while dv > du:
            v = self.vertices[v].parent  # type: ignore[assignment]
            dv -= 1
        while u != v:
            pu, pv = self.vertices[u].parent, self.vertices[v].parent
            if pu is None or pv is None:
                return None
            u, v = pu, pv
        return u

    def lca_labels(self, labels: Iterable[str]) -> Optional[int]:
        return self.lca([self.leaf_by_label(x) for x in labels])

    def path_vertices(self, u: int, v: int) -> list[int]:
        """Vertices of the path u ~ v, from u up to the LCA and down to v."""
        w = self._lca2(u, v)
        if w is None:
            raise DomainError("vertices lie in different components")
        up = []
        x = u
        while x != w:
            up.append(x)
            x = self.vertices[x].parent  # type: ignore[assignment]
        down = []
        x = v
        while x != w:
            down.append(x)
            x = self.vertices[x].parent  # type: ignore[assignment]
        return up + [w] + list(reversed(down))

    def path_edges(self, u: int, v: int) -> frozenset[int]:
        """Edge set of u ~ v, each edge named by its head vertex."""
        verts = self.path_vertices(u, v)
        w = self.lca([u, v])
        return frozenset(x for x in verts if x != w)

    def d_edges(self, u: int, v: int) -> frozenset[int]:
        """Edges whose tail is an inner vertex of u ~ v and whose head is
        off the path; empty for comparable or disconnected endpoints is a
        consequence of the definition, except disconnection which is the
        paper's explicit convention."""
        if self._lca2(u, v) is None:
            return frozenset()
        verts = self.path_vertices(u, v)
        on_path = set(verts)
        inner = verts[1:-1] if len(verts) >= 2 else []
        out = []
        for p in inner:
            for c in self.vertices[p].children:
                if c not in on_path:
                    out.append(c)
        return frozenset(out)

    def d_plus_edges(self, u: int, v: int) -> frozenset[int]:
        """D_F(u,v) plus every defined edge entering a path vertex, except
        the edges entering leaf endpoints; empty unless u,v incomparable."""
        w = self._lca2(u, v)
        if w is None or w == u or w == v:
            return frozenset()
        out = set(self.d_edges(u, v))
        for x in self.path_vertices(u, v):
            if self.is_root(x):
                continue
            if x in (u, v) and self.is_leaf(x):
                continue
            out.add(x)
        return frozenset(out)

    # ------------------------------------------------------------------ #
    # Canonical forms and isomorphism
    # ------------------------------------------------------------------ #

    def canon(self, v: int) -> CanonForm:
        """Canonical (child-order-insensitive, label-respecting) form of the
        subtree rooted at v."""
        cached = self._canon_cache.get(v)
        if cached is not None:
            return cached
        for u in self.postorder(v):
            if u in self._canon_cache:
                continue
            vert = self.vertices[u]
            if not vert.children:
                form: CanonForm = ("L", vert.label)
            else:
                form = ("N", *sorted(self._canon_cache[c] for c in vert.children))
            self._canon_cache[u] = form
        return self._canon_cache[v]

    def component_canons(self) -> list[CanonForm]:
        return sorted(self.canon(r) for r in self.roots)

    def isomorphic(self, other: "Forest") -> bool:
        """Label-respecting rooted-forest isomorphism; multi-component
        forests compare as multisets of components."""
        return self.component_canons() == other.component_canons()

    # ------------------------------------------------------------------ #
    # ominus: edge deletion + cleanup + binarization
    # ------------------------------------------------------------------ #

    def ominus(self, cut: Iterable[int]) -> tuple["Forest", dict[int, int]]:
        """Delete the edges in ``cut`` (head ids), drop vertices without
        labeled descendants, and binarize.

        Returns ``(g, corr)`` where surviving vertices of ``g`` keep their
        ids and ``corr`` maps each edge of ``g`` (by head id) to the
        corresponding edge of this forest (the edge leaving the tail on the
        original path), per the lifting convention.
        """
        g = self.copy()
        heads = sorted(set(cut))
        for h in heads:
            vert = g._vertex(h)
            if vert.parent is None:
                raise UsageError(f"vertex {h} is a root; e(v) undefined")
            g.vertices[vert.parent].children.remove(h)
            vert.parent = None
            g.roots.append(h)

        corr = {v: v for v in g.vertices if g.vertices[v].parent is not None}

        # Drop vertices with no labeled descendant.
        has_label: dict[int, bool] = {}
        for r in list(g.roots):
            for u in g.postorder(r):
                vert = g.vertices[u]
                has_label[u] = vert.label is not None or any(
                    has_label[c] for c in vert.children
                )
        for r in list(g.roots):
            if not has_label[r]:
                for u in g.subtree_ids(r):
                    del g.vertices[u]
                    corr.pop(u, None)
                g.roots.remove(r)
                continue
            # Remove label-free hanging subtrees inside a surviving component.
            stack = [r]
            while stack:
                u = stack.pop()
                keep = []
                for c in g.vertices[u].children:
                    if has_label[c]:
                        keep.append(c)
                        stack.append(c)
                    else:
                        for w in g.subtree_ids(c):
                            del g.vertices[w]
                            corr.pop(w, None)
                g.vertices[u].children = keep

        # Binarize: contract each unifurcate p into its unique child c;
        # the edge formerly entering c inherits p's correspondence.
        for u in list(g.postorder()):
            vert = g.vertices[u]
            if len(vert.children) != 1:
                continue
            c = vert.children[0]
            g.vertices[c].parent = vert.parent
            if vert.parent is None:
                g.roots[g.roots.index(u)] = c
                corr.pop(c, None)
            else:
                pk = g.vertices[vert.parent].children
                pk[pk.index(u)] = c
                corr[c] = corr.pop(u)
            del g.vertices[u]

        g._invalidate()
        return g, corr

    def binarized(self) -> "Forest":
        """Contract all unifurcate vertices (labels are preserved)."""
        g, _ = self.ominus([])
        return g

    # ------------------------------------------------------------------ #
    # Restriction F^X
    # ------------------------------------------------------------------ #

    def restrict_vertex_set(self, x_labels: frozenset[str] | set[str]) -> set[int]:
        """Vertex ids of the restriction of this forest to label set X:
        X-inclusive vertices that are members of X or have an X-bifurcate
        ancestor.  Unifurcate chain vertices are kept (no binarization)."""
        missing = set(x_labels) - self.labels()
        if missing:
            raise UsageError(f"labels not in forest: {sorted(missing)}")
        inclusive = self.x_inclusive(x_labels)
        kept: set[int] = set()
        for r in self.roots:
            # Walk down tracking whether an X-bifurcate ancestor was seen.
            stack = [(r, False)]
            while stack:
                v, seen = stack.pop()
                if not inclusive[v]:
                    continue
                vert = self.vertices[v]
                bif = (
                    len(vert.children) == 2
                    and all(inclusive[c] for c in vert.children)
                )
                here = seen or bif
                if here or (vert.label is not None and vert.label in x_labels):
                    kept.add(v)
                for c in vert.children:
                    stack.append((c, here))
        return kept

    def restrict(self, x_labels: frozenset[str] | set[str]) -> "Forest":
        """The forest induced by ``restrict_vertex_set`` (ids preserved,
        unifurcate vertices kept).  Each kept vertex hangs under its nearest
        kept proper ancestor."""
        kept = self.restrict_vertex_set(x_labels)
        g = Forest()
        g._next_id = self._next_id
        for v in kept:
            src = self.vertices[v]
            p = src.parent
            while p is not None and p not in kept:
                p = self.vertices[p].parent
            g.vertices[v] = Vertex(parent=p, label=src.label)
        for v in sorted(kept):
            p = g.vertices[v].parent
            if p is None:
                g.roots.append(v)
            else:
                g.vertices[p].children.append(v)
        return g

    def x_inclusive(self, x_labels: frozenset[str] | set[str]) -> dict[int, bool]:
        """Map vertex -> whether its subtree contains a leaf labeled in X."""
        out: dict[int, bool] = {}
        for u in self.postorder():
            vert = self.vertices[u]
            out[u] = (vert.label in x_labels) or any(
                out[c] for c in vert.children
            )
        return out

    # ------------------------------------------------------------------ #
    # Restricted path counting N_{A,X}
    # ------------------------------------------------------------------ #

    def n_paths(
        self,
        removed: Iterable[int],
        x_labels: frozenset[str] | set[str],
        v: int,
    ) -> int:
        """Number of X-paths starting at v in F - A: directed paths from v
        to a leaf labeled in X such that every vertex on the path that is
        bifurcate in F - A is also X-bifurcate in F - A."""
        self._vertex(v)
        gone = set(removed)
        kids = {
            u: [c for c in vert.children if c not in gone]
            for u, vert in self.vertices.items()
        }
        incl: dict[int, bool] = {}
        order = []
        stack = [(v, False)]
        while stack:
            u, expanded = stack.pop()
            if expanded:
                order.append(u)
            else:
                stack.append((u, True))
                for c in kids[u]:
                    stack.append((c, False))
        counts: dict[int, int] = {}
        for u in order:
            lab = self.vertices[u].label
            incl[u] = (lab in x_labels) or any(incl[c] for c in kids[u])
            blocked = len(kids[u]) == 2 and not all(incl[c] for c in kids[u])
            base = 1 if lab in x_labels else 0
            counts[u] = base if blocked else base + sum(counts[c] for c in kids[u])
        return counts[v]

    # ------------------------------------------------------------------ #
    # Validation (used by tests)
    # ------------------------------------------------------------------ #

    def check_structure(self) -> None:
        """Raise InternalInvariantError on parent/child inconsistency."""
        from .errors import InternalInvariantError

        seen_roots = set(self.roots)
        for v, vert in self.vertices.items():
            if len(vert.children) > 2:
                raise InternalInvariantError(f"vertex {v} has >2 children")
            if (vert.parent is None) != (v in seen_roots):
                raise InternalInvariantError(f"root bookkeeping wrong at {v}")
            for c in vert.children:
                if self.vertices[c].parent != v:
                    raise InternalInvariantError(f"parent link broken at {c}")
        reached = set()
        for r in self.roots:
            for u in self.postorder(r):
                if u in reached:
                    raise InternalInvariantError(f"vertex {u} reached twice")
                reached.add(u)
        if reached != set(self.vertices):
            raise InternalInvariantError("unreachable vertices present")

    def is_phylogenetic(self) -> bool:
        """Binarized, leaves distinctly labeled, non-leaves unlabeled."""
        labels = []
        for v, vert in self.vertices.items():
            if len(vert.children) == 1:
                return False
            if vert.children and vert.label is not None:
                return False
            if not vert.children:
                if vert.label is None:
                    return False
                labels.append(vert.label)
        return len(labels) == len(set(labels))
