"""Forest primitives: LCA, paths, off-path edge sets, ominus, restriction,
path counting, isomorphism; spec'd examples plus definition-following
reference cross-checks on exhaustive small shapes."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from rspr.errors import DomainError, UsageError
from rspr.forest import Forest
from rspr.generate import random_tree
import random


def tree(spec) -> Forest:
    return Forest.from_nested(spec)


def leaf(f: Forest, lab: str) -> int:
    return f.leaf_by_label(lab)


class TestLca:
    def test_cherry_parent(self):
        f = tree((("a", "b"), "c"))
        assert f.lca([leaf(f, "a"), leaf(f, "b")]) == f.parent(leaf(f, "a"))

    def test_root(self):
        f = tree((("a", "b"), "c"))
        assert f.lca([leaf(f, "a"), leaf(f, "c")]) == f.roots[0]

    def test_different_components(self):
        f = Forest.from_nested(("a", "b"), ("c", "d"))
        assert f.lca([leaf(f, "a"), leaf(f, "c")]) is None

    def test_self_ancestor(self):
        f = tree((("a", "b"), "c"))
        a = leaf(f, "a")
        assert f.lca([a]) == a
        assert f.is_ancestor(a, a)

    def test_invalid_id(self):
        f = tree(("a", "b"))
        with pytest.raises(UsageError):
            f.lca([999])


class TestPaths:
    def test_cherry_path(self):
        f = tree((("a", "b"), "c"))
        a, b = leaf(f, "a"), leaf(f, "b")
        assert f.path_edges(a, b) == frozenset([a, b])

    def test_through_root(self):
        f = tree((("a", "b"), "c"))
        a, c = leaf(f, "a"), leaf(f, "c")
        p = f.parent(a)
        assert f.path_edges(a, c) == frozenset([a, p, c])

    def test_identity(self):
        f = tree((("a", "b"), "c"))
        assert f.path_edges(leaf(f, "a"), leaf(f, "a")) == frozenset()

    def test_disconnected_raises(self):
        f = Forest.from_nested(("a", "b"), ("c", "d"))
        with pytest.raises(DomainError):
            f.path_edges(leaf(f, "a"), leaf(f, "c"))


class TestDEdges:
    def test_off_path_child(self):
        f = tree((("a", "b"), "c"))
        assert f.d_edges(leaf(f, "a"), leaf(f, "c")) == frozenset([leaf(f, "b")])

    def test_no_inner_vertices(self):
        f = tree((("a", "b"), "c"))
        assert f.d_edges(leaf(f, "a"), leaf(f, "b")) == frozenset()

    def test_disconnected_is_empty(self):
        f = Forest.from_nested(("a", "b"), ("c", "d"))
        assert f.d_edges(leaf(f, "a"), leaf(f, "c")) == frozenset()

    def test_comparable_d_plus_empty(self):
        f = tree((("a", "b"), "c"))
        assert f.d_plus_edges(f.roots[0], leaf(f, "a")) == frozenset()

    def test_fig1_window(self, fig1):
        f = fig1["pair"].F
        got = f.d_edges(leaf(f, "x1"), leaf(f, "x9"))
        expect = frozenset([leaf(f, "x7"), fig1["u"], fig1["v"], leaf(f, "x3")])
        assert got == expect

    def test_fig22_d_plus_eight(self, fig22):
        t = fig22["pair"].T
        delta = t.lca_labels(["x6", "x8"])
        assert len(t.d_plus_edges(delta, t.leaf_by_label("x11"))) == 8


def brute_d_edges(f: Forest, u: int, v: int) -> frozenset:
    """Definition-following reference for D_F."""
    if f.lca([u, v]) is None:
        return frozenset()
    verts = f.path_vertices(u, v)
    inner = set(verts[1:-1])
    out = set()
    for h in f.edges():
        if f.parent(h) in inner and h not in verts:
            out.add(h)
    return frozenset(out)


def brute_restrict_vertices(f: Forest, x: set) -> set:
    """Definition-following reference for the restriction's vertex set."""
    incl = f.x_inclusive(x)
    bif = {
        v for v in f.vertices
        if len(f.children(v)) == 2 and all(incl[c] for c in f.children(v))
    }
    kept = set()
    for v in f.vertices:
        if not incl[v]:
            continue
        anc = v
        has_bif = False
        while anc is not None:
            if anc in bif:
                has_bif = True
                break
            anc = f.parent(anc)
        if has_bif or f.label(v) in x:
            kept.add(v)
    return kept


def brute_n_paths(f: Forest, removed, x, v) -> int:
    """Count X-paths by explicit path enumeration."""
    gone = set(removed)
    kids = {u: [c for c in f.children(u) if c not in gone]
            for u in f.vertices}
    incl = {}
    def fill(u):
        if u in incl:
            return incl[u]
        incl[u] = (f.label(u) in x) or any(fill(c) for c in kids[u])
        return incl[u]
    for u in f.vertices:
        fill(u)
    count = 0
    stack = [(v, [v])]
    while stack:
        u, path = stack.pop()
        if f.label(u) in x:
            if all(len(kids[p]) != 2 or all(incl[c] for c in kids[p])
                   for p in path):
                count += 1
            continue
        for c in kids[u]:
            stack.append((c, path + [c]))
    return count


def all_shapes(labels: list) -> list:
    """Every rooted binary tree shape over the ordered label list."""
    if len(labels) == 1:
        return [labels[0]]
    out = []
    for k in range(1, len(labels)):
        for subset in itertools.combinations(range(len(labels)), k):
            if 0 not in subset:
                continue  # fix first label on the left to avoid mirror dups
            left = [labels[i] for i in subset]
            right = [labels[i] for i in range(len(labels)) if i not in subset]
            for ls in all_shapes(left):
                for rs in all_shapes(right):
                    out.append((ls, rs))
    return out


class TestAgainstDefinitions:
    def test_d_edges_exhaustive(self):
        labels = ["a", "b", "c", "d", "e"]
        for spec in all_shapes(labels):
            f = tree(spec)
            ids = sorted(f.vertices)
            for u in ids:
                for v in ids:
                    if u != v:
                        assert f.d_edges(u, v) == brute_d_edges(f, u, v)

    def test_restrict_exhaustive(self):
        labels = ["a", "b", "c", "d", "e"]
        for spec in all_shapes(labels)[::3]:
            f = tree(spec)
            for r in range(1, 5):
                for x in itertools.combinations(labels, r):
                    assert (f.restrict_vertex_set(set(x))
                            == brute_restrict_vertices(f, set(x)))

    def test_n_paths_exhaustive(self):
        labels = ["a", "b", "c", "d", "e"]
        for spec in all_shapes(labels)[::5]:
            f = tree(spec)
            edges = f.edges()
            for x in [{"a"}, {"a", "b"}, {"a", "c", "e"}, set(labels)]:
                for removed in [frozenset()] + [frozenset([e]) for e in edges[:4]]:
                    for v in sorted(f.vertices):
                        assert (f.n_paths(removed, x, v)
                                == brute_n_paths(f, removed, x, v))


class TestNPathsBasics:
    def test_member_has_trivial_path(self):
        f = tree((("a", "b"), "c"))
        assert f.n_paths([], {"a"}, leaf(f, "a")) == 1

    def test_empty_x(self):
        f = tree((("a", "b"), "c"))
        for v in f.vertices:
            assert f.n_paths([], set(), v) == 0

    def test_fig21_example(self, fig21):
        f = fig21["pair"].F
        v, w = fig21["f_vertex"]["v"], fig21["f_vertex"]["w"]
        x = {"x2", "x3", "x4"}
        assert f.n_paths([], x, v) == 0
        assert f.n_paths([], x, w) == 1
        a = [fig21["x"][1]]
        assert f.n_paths(a, x, v) == 1
        assert f.n_paths(a, x, w) == 2


class TestOminus:
    def test_detach_leaf(self):
        f = tree((("a", "b"), "c"))
        g, corr = f.ominus([leaf(f, "b")])
        assert g.isomorphic(Forest.from_nested(("a", "c"), "b"))
        assert len(g) == 2

    def test_empty_cut_identity(self):
        f = tree((("a", "b"), ("c", "d")))
        g, corr = f.ominus([])
        assert g.isomorphic(f)
        assert corr == {h: h for h in f.edges()}

    def test_detach_outer_leaf(self):
        f = tree((("a", "b"), "c"))
        g, _ = f.ominus([leaf(f, "c")])
        assert g.isomorphic(Forest.from_nested(("a", "b"), "c"))

    def test_idempotent(self):
        f = tree(((("a", "b"), "c"), ("d", "e")))
        g, _ = f.ominus([leaf(f, "b"), leaf(f, "d")])
        h, _ = g.ominus([])
        assert h.isomorphic(g)

    def test_correspondence_lifts_chains(self):
        f = tree(((("a", "b"), "c"), "d"))
        b = leaf(f, "b")
        g, corr = f.ominus([b])
        # In g the edge entering a corresponds to the edge that entered
        # the contracted cherry parent in f.
        a = leaf(f, "a")
        assert corr[a] == f.parent(a)

    def test_component_count_canonical(self, rng):
        # |F (-) C| = |F| + |C| for canonical cuts.
        from rspr.keys import is_canonical_cut

        checked = 0
        for seed in range(60):
            r = random.Random(seed)
            f = random_tree([f"t{i}" for i in range(8)], r)
            cut = frozenset(r.sample(f.edges(), 3))
            if not is_canonical_cut(f, cut):
                continue
            g, _ = f.ominus(cut)
            assert len(g) == len(f) + len(cut)
            checked += 1
        assert checked >= 10

    def test_root_edge_rejected(self):
        f = tree(("a", "b"))
        with pytest.raises(UsageError):
            f.ominus([f.roots[0]])


class TestRestrict:
    def test_cherry(self):
        f = tree((("a", "b"), "c"))
        r = f.restrict({"a", "b"})
        assert r.binarized().isomorphic(Forest.from_nested(("a", "b")))

    def test_keeps_bifurcate_root(self):
        f = tree((("a", "b"), "c"))
        r = f.restrict({"a", "c"})
        assert r.labels() == {"a", "c"}
        assert len(r.roots) == 1
        assert r.binarized().isomorphic(Forest.from_nested(("a", "c")))

    def test_singleton(self):
        f = tree((("a", "b"), "c"))
        r = f.restrict({"a"})
        assert set(r.vertices) == {leaf(f, "a")}

    def test_unknown_label(self):
        f = tree(("a", "b"))
        with pytest.raises(UsageError):
            f.restrict({"zz"})

    def test_fig1_restriction(self, fig1):
        f = fig1["pair"].F
        r = f.restrict({"x1", "x2", "x3", "x4"})
        assert r.labels() == {"x1", "x2", "x3", "x4"}
        assert r.binarized().isomorphic(
            Forest.from_nested(("x1", (("x2", "x4"), "x3")))
        )


class TestIsomorphic:
    def test_unordered_children(self):
        assert tree((("a", "b"), "c")).isomorphic(tree((("b", "a"), "c")))

    def test_different_topology(self):
        assert not tree((("a", "b"), "c")).isomorphic(tree((("a", "c"), "b")))

    def test_multiset_components(self):
        f = Forest.from_nested(("a", "b"), ("c", "d"))
        g = Forest.from_nested(("d", "c"), ("b", "a"))
        assert f.isomorphic(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(2, 40))
def test_structure_valid_random(seed, n):
    f = random_tree([f"t{i}" for i in range(n)], random.Random(seed),
                    "uniform" if seed % 2 else "yule")
    f.check_structure()
    assert f.is_phylogenetic()
