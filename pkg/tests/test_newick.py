"""Newick parsing and canonical serialization."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from rspr.errors import ParseError
from rspr.forest import Forest
from rspr.generate import random_tree
from rspr.newick import parse_forest, parse_tree, serialize, split_document


class TestParse:
    def test_basic_cherry(self):
        f = parse_tree("((a,b),c);")
        assert f.labels() == {"a", "b", "c"}
        a, b = f.leaf_by_label("a"), f.leaf_by_label("b")
        assert f.parent(a) == f.parent(b)

    def test_lengths_and_inner_labels_dropped(self, caplog):
        f = parse_tree("((a:1.5,b)x,c);")
        assert f.isomorphic(parse_tree("((a,b),c);"))

    def test_multifurcation_rejected(self):
        with pytest.raises(ParseError, match="multifurcation"):
            parse_tree("((a,b,c),d);")

    def test_duplicate_label(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_tree("(a,a);")

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_tree(";")

    def test_position_reported(self):
        with pytest.raises(ParseError) as err:
            parse_tree("((a,b),);")
        assert err.value.position is not None

    def test_quoted_labels(self):
        f = parse_tree("('a (1)','b,c');")
        assert f.labels() == {"a (1)", "b,c"}
        assert parse_tree(serialize(f)).isomorphic(f)

    def test_deep_caterpillar_no_recursion_error(self):
        n = 5000
        s = "(" * n + "t0"
        for i in range(1, n + 1):
            s += f",t{i})"
        f = parse_tree(s + ";")
        assert len(f.labels()) == n + 1


class TestParseForest:
    def test_two_components(self):
        f = parse_forest("(a,b);(c,d);")
        assert len(f) == 2
        assert f.labels() == {"a", "b", "c", "d"}

    def test_single_leaf_component(self):
        f = parse_forest("a;(b,c);")
        assert len(f) == 2

    def test_duplicate_across_components(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_forest("(a,b);(a,c);")

    def test_comment_lines_ignored(self):
        f = parse_forest("# comment\n(a,b);\n# another\n(c,d);")
        assert len(f) == 2

    def test_missing_semicolon(self):
        with pytest.raises(ParseError):
            split_document("(a,b)")


class TestSerialize:
    def test_single_leaf(self):
        f = Forest.from_nested("a")
        assert serialize(f) == "a;"

    def test_two_components(self):
        f = Forest.from_nested(("a", "b"), ("c", "d"))
        assert serialize(f).count(";") == 2

    def test_canonical_across_isomorphism(self):
        a = parse_tree("((a,b),(c,d));")
        b = parse_tree("((d,c),(b,a));")
        assert serialize(a) == serialize(b)

    def test_round_trip_fig1(self, fig1):
        for f in (fig1["pair"].T, fig1["pair"].F):
            assert parse_tree(serialize(f)).isomorphic(f)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(2, 200))
def test_round_trip_random(seed, n):
    f = random_tree([f"t{i}" for i in range(n)], random.Random(seed),
                    "uniform" if seed % 3 else "yule")
    g = parse_tree(serialize(f))
    assert g.isomorphic(f)
    assert serialize(g) == serialize(f)
