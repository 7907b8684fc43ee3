import os

import pytest
from hypothesis import HealthCheck, settings

from compact_avl.tree import AvlTree, TreeClass

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LEAF = (None, None)


def nested_tree(shape, cls=TreeClass.AVL):
    return AvlTree.from_nested(shape, cls)


@pytest.fixture
def leaf():
    return LEAF


@pytest.fixture
def stats_example_tree():
    """12 nodes: a=6, b1=1, b2=2, c=1, d=2."""
    balanced1 = (LEAF, LEAF)
    left_unbalanced2 = (balanced1, LEAF)
    one_child1 = (LEAF, None)
    upper = (one_child1, balanced1)
    return nested_tree((left_unbalanced2, upper))


@pytest.fixture
def bitmap_example_tree():
    """9-node (non-AVL) tree whose level-order bitmap is 1111001111000100000."""
    n9 = (LEAF, None)
    n4 = (LEAF, n9)
    n2 = (n4, None)
    n7 = (LEAF, None)
    n3 = (None, n7)
    return nested_tree((n2, n3))


@pytest.fixture
def five_node_shapes():
    """The six 5-node AVL shapes, first one being root(balanced depth-1, leaf)."""
    L = LEAF
    return [
        ((L, L), L),
        ((L, None), (L, None)),
        ((L, None), (None, L)),
        (L, (L, L)),
        ((None, L), (None, L)),
        ((None, L), (L, None)),
    ]
