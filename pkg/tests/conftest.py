"""Shared fixtures: the two reference tree pairs reconstructed from the
source figures' stated properties, plus small helpers used across modules.

Figure 2(1) fixture facts (all asserted in tests):
  - the four marked edges {e(x1), e(x2), e(u), e(x10)} form a canonical cut;
  - the forced cut of T is {e(x1), e(x2), e(x10), e(lambda)} where lambda
    is the T-vertex over the cherry (x5, x7);
  - with X = {x2,x3,x4}: N(v) = 0, N(w) = 1, and with e(x1) removed
    N(v) = 1, N(w) = 2;
  - kappa_e = (X, {e(x1), e(x2), e(u)}, R = edges of x3~x4) is a key;
  - ({x2,x3,x4}, {e(x1)..e(x4), e(x7)}) is robust but not super-robust;
  - beta (over {x2,x3,x4}) is consistent, alpha (over {x1..x4}) is not;
  - beta is a semi-close but not close stopper, gamma (over {x2,x3}) is
    no stopper, zeta (over {x6,x8}) is disconnected, lambda is not a root
    stopper;
  - in the induced sub-pair, D+ from delta (over {x6,x8}) to x11 has
    exactly eight edges.
"""

import random

import pytest

from rspr.forest import Forest
from rspr.generate import GenSpec, gen_pair
from rspr.pairs import TFPair, induced_subpair, preprocess


def pair_from_nested(t_spec, *f_specs) -> TFPair:
    return TFPair(Forest.from_nested(t_spec), Forest.from_nested(*f_specs))


@pytest.fixture(scope="session")
def fig21() -> dict:
    """The main reference pair; see the module docstring."""
    t = Forest.from_nested(
        ((((("x6", "x8"), ("x5", "x7")), "x9"),
          ((((("x2", "x3"), "x4"), "x1"), ("x10", "x11")), "x12")),
         "x13"),
    )
    f = Forest.from_nested(
        (((((((("x2", "x5"), "x7"), ("x1", "x3")), "x4"), "x12"), "x10"),
          ("x6", "x11")), "x13"),
        ("x8", "x9"),
    )
    pair = TFPair(t, f)
    x = {i: f.leaf_by_label(f"x{i}") for i in range(1, 14)}
    names = {
        "u": f.lca_labels(["x2", "x7"]),
        "n": f.lca_labels(["x2", "x5"]),
        "z": f.lca_labels(["x1", "x3"]),
        "v": f.lca_labels(["x2", "x3"]),
        "w": f.lca_labels(["x3", "x4"]),
    }
    t_names = {
        "gamma": t.lca_labels(["x2", "x3"]),
        "beta": t.lca_labels(["x2", "x4"]),
        "alpha": t.lca_labels(["x1", "x2"]),
        "lambda": t.lca_labels(["x5", "x7"]),
        "zeta": t.lca_labels(["x6", "x8"]),
    }
    marked_cut = frozenset([x[1], x[2], names["u"], x[10]])
    return {
        "pair": pair,
        "x": x,
        "f_vertex": names,
        "t_vertex": t_names,
        "marked_cut": marked_cut,
    }


@pytest.fixture(scope="session")
def fig22(fig21) -> dict:
    """The sub-pair induced by the marked cut of the reference pair."""
    sub, corr = induced_subpair(fig21["pair"], fig21["marked_cut"])
    return {"pair": sub, "corr": corr}


@pytest.fixture(scope="session")
def fig1() -> dict:
    """Second reference pair: D(x1, x9) = {e(x7), e(u), e(v), e(x3)} in F,
    and both alpha (over {x9,x6,x4}) and beta (over {x1,x2,x3}) are
    overlapping stoppers."""
    t = Forest.from_nested(
        (((("x1", "x2"), "x3"), (("x9", "x6"), "x4")), ("x5", ("x7", "x8"))),
    )
    f = Forest.from_nested(
        (((("x1", "x7"), ("x5", "x6")), (("x9", "x3"), ("x2", "x4"))), "x8"),
    )
    return {
        "pair": TFPair(t, f),
        "u": f.lca_labels(["x5", "x6"]),
        "v": f.lca_labels(["x2", "x4"]),
        "alpha": t.lca_labels(["x9", "x4"]),
        "beta": t.lca_labels(["x1", "x3"]),
        "gamma": t.lca_labels(["x1", "x2"]),
        "gamma_prime": t.lca_labels(["x9", "x6"]),
    }


def random_pair(seed: int, n_leaves: int, n_moves: int,
                shape: str = "yule", dummy: bool = True) -> TFPair:
    return preprocess(gen_pair(GenSpec(n_leaves, n_moves, seed, shape)),
                      add_dummy=dummy)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)
