"""Exact distance, brute-force oracle, and (Z-)search-tree enumeration."""

import pytest

from rspr.errors import ResourceError, UsageError
from rspr.exact import brute_force_distance, enumerate_search_tree, exact_distance
from rspr.forest import Forest
from rspr.generate import GenSpec, gen_pair
from rspr.keys import is_canonical_cut
from rspr.pairs import TFPair, is_agreement_cut, preprocess

from conftest import pair_from_nested, random_pair


class TestExactDistance:
    def test_identical(self):
        pair = preprocess(pair_from_nested((("a", "b"), "c"),
                                           (("b", "a"), "c")))
        assert exact_distance(pair) == (0, frozenset())

    def test_one_move_with_dummy(self):
        pair = preprocess(pair_from_nested((("a", "b"), "c"),
                                           (("a", "c"), "b")),
                          add_dummy=True)
        d, cut = exact_distance(pair)
        assert d == 1
        assert brute_force_distance(pair, 3)[0] == 1
        assert is_agreement_cut(pair, cut)

    def test_moves_bound_distance(self):
        for seed in range(20):
            k = seed % 4
            pair = random_pair(seed, 8, k)
            d, _ = exact_distance(pair)
            assert d <= k

    def test_budget_semantics(self):
        pair = random_pair(77, 10, 4)
        d, _ = exact_distance(pair)
        if d == 0:
            pytest.skip("degenerate instance")
        assert exact_distance(pair, budget=d - 1) is None
        got = exact_distance(pair, budget=d)
        assert got is not None and got[0] == d

    def test_witness_is_minimum_agreement_cut(self):
        for seed in range(15):
            pair = random_pair(300 + seed, 9, 3)
            d, cut = exact_distance(pair)
            assert len(cut) == d
            assert is_agreement_cut(pair, cut)

    def test_pruning_soundness(self):
        for seed in range(40):
            pair = random_pair(1000 + seed, 8, seed % 4)
            with_p = exact_distance(pair, prune=True)
            without_p = exact_distance(pair, prune=False)
            assert with_p[0] == without_p[0]


class TestBruteForce:
    def test_matches_exact_small(self):
        for seed in range(60):
            pair = random_pair(2000 + seed, 5 + seed % 4, seed % 4)
            bf = brute_force_distance(pair, 8)
            ex = exact_distance(pair)
            assert bf is not None and bf[0] == ex[0], f"seed {seed}"

    def test_absent_when_over_kmax(self):
        pair = random_pair(4040, 10, 5)
        d, _ = exact_distance(pair)
        if d == 0:
            pytest.skip("degenerate instance")
        assert brute_force_distance(pair, d - 1) is None

    def test_guard(self):
        pair = random_pair(1, 30, 2, dummy=True)
        with pytest.raises(ResourceError):
            brute_force_distance(pair, 10)


class TestSearchTree:
    def test_depth_cap_zero(self):
        pair = random_pair(5, 6, 2)
        paths = list(enumerate_search_tree(pair, depth_cap=0))
        assert len(paths) == 1
        assert paths[0][-1].accumulated_cut == frozenset()

    def test_full_tree_min_is_distance(self):
        for seed in range(12):
            pair = random_pair(500 + seed, 7, 1 + seed % 3)
            if pair.is_bottom():
                continue
            paths = [p for p in enumerate_search_tree(pair)
                     if p[-1].pair.is_bottom()]
            best = min(len(p[-1].accumulated_cut) for p in paths)
            assert best == exact_distance(pair)[0]

    def test_paths_are_canonical_agreement_cuts(self):
        pair = random_pair(42, 7, 2)
        for p in enumerate_search_tree(pair):
            cut = p[-1].accumulated_cut
            assert is_canonical_cut(pair.F, cut)
            if p[-1].pair.is_bottom():
                assert is_agreement_cut(pair, cut)

    def test_policy_invariance_of_minimum(self):
        for seed in range(10):
            pair = random_pair(600 + seed, 7, 1 + seed % 3)
            if pair.is_bottom():
                continue
            vals = []
            for policy in ("deepest", "shallowest"):
                paths = [p for p in enumerate_search_tree(pair, policy=policy)
                         if p[-1].pair.is_bottom()]
                vals.append(min(len(p[-1].accumulated_cut) for p in paths))
            assert vals[0] == vals[1] == exact_distance(pair)[0]

    def test_z_full_label_set_is_full_tree(self):
        pair = random_pair(9, 6, 2)
        full = sum(1 for _ in enumerate_search_tree(pair))
        z_full = sum(1 for _ in enumerate_search_tree(
            pair, z=frozenset(pair.labels())))
        assert full == z_full

    def test_z_precondition_enforced(self):
        pair = preprocess(pair_from_nested(
            ((("a", "b"), "c"), "d"), ((("a", "c"), "b"), "d")))
        # {a, c} does not span dangling subtrees of T
        with pytest.raises(UsageError):
            list(enumerate_search_tree(pair, z=frozenset(["a", "c"])))

    def test_z_search_tree_restricts_cherries(self):
        pair = preprocess(pair_from_nested(
            ((("a", "b"), "c"), ("d", "e")),
            ((("a", "c"), "b"), ("e", "d"))))
        z = frozenset(["a", "b", "c"])
        for p in enumerate_search_tree(pair, z=z):
            for node in p[:-1]:
                y1, y2 = node.cherry
                assert (y1 | y2) <= z

    def test_branch_ways_recorded(self):
        pair = random_pair(11, 6, 2)
        if pair.is_bottom():
            pytest.skip("degenerate")
        seen = set()
        for p in enumerate_search_tree(pair):
            for node in p[1:]:
                assert node.branch_way in (1, 2, 3)
                seen.add(node.branch_way)
        assert {1, 2} <= seen

    def test_fig22_search_tree(self, fig22):
        """Frozen shape of the deterministic search tree for the induced
        reference pair, plus its structural invariants."""
        pair = fig22["pair"]
        paths = list(enumerate_search_tree(pair))
        complete = [p for p in paths if p[-1].pair.is_bottom()]
        assert len(paths) == len(complete)
        sizes = sorted(len(p[-1].accumulated_cut) for p in complete)
        d = exact_distance(pair)[0]
        assert min(sizes) == d == 2
        # Frozen against the deterministic cherry policy.
        assert len(paths) == 8
        assert sizes == [2, 2, 2, 2, 3, 3, 3, 3]
        for p in paths:
            assert is_canonical_cut(pair.F, p[-1].accumulated_cut)

    def test_fig22_z_search_tree(self, fig22):
        pair = fig22["pair"]
        z = frozenset(["x3+x4", "x11", "x12"])
        paths = list(enumerate_search_tree(pair, z=z))
        assert paths
        for p in paths:
            for node in p[:-1]:
                assert (node.cherry[0] | node.cherry[1]) <= z
            assert is_canonical_cut(pair.F, p[-1].accumulated_cut)
