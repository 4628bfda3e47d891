import itertools

import pytest
from sympy.polys.domains import FF, QQ

from tiltsight.orbit import UnknownObject, build, parse_object_names


EXAMPLE_1 = ["P(0,1)", "P(2,1)"]
EXAMPLE_2 = ["P(0,1)", "P(0,2)", "P(3,1)"]


def test_object_counts():
    assert len(build(2, 2, QQ).objects) == 8
    assert len(build(3, 2, QQ).objects) == 15
    assert len(build(2, 1, QQ).objects) == 5


def test_object_names_accept_both_spellings():
    assert parse_object_names("P_0^1+P(2,1)") == EXAMPLE_1
    category = build(2, 2, QQ)
    assert category.object("P_3^2").name == "P(3,2)"
    with pytest.raises(UnknownObject):
        category.object("P(9,9)")


def test_shift_permutation_of_example_one():
    category = build(2, 2, QQ)
    shift = category.shift_permutation()
    for j in range(4):
        assert shift[f"P({j},1)"] == f"P({(j + 1) % 4},2)"
        assert shift[f"P({j},2)"] == f"P({(j + 2) % 4},1)"
    for name in category.names():
        assert category.tau_object(name) == category.shift_object(name, 2)
        assert category.tau_inverse_object(category.tau_object(name)) == name


def test_tau_is_the_d_fold_shift_in_example_two():
    category = build(3, 2, QQ)
    for name in category.names():
        assert category.tau_object(name) == category.shift_object(name, 2)


def test_calabi_yau_dimensions():
    category = build(2, 2, QQ)
    for x, y in itertools.product(category.names(), repeat=2):
        for degree in range(0, 4):
            assert category.hom(x, y, degree).dimension == category.hom(y, x, 3 - degree).dimension


def test_identity_and_composition():
    category = build(3, 2, QQ)
    for x, y in itertools.product(category.names()[:6], repeat=2):
        for f in category.hom(x, y, 0).basis():
            left = category.compose(category.identity(x), f)
            right = category.compose(f, category.identity(y))
            block = category.hom(x, y, 0)
            assert block.coordinates(left, QQ) == block.coordinates(f, QQ)
            assert block.coordinates(right, QQ) == block.coordinates(f, QQ)


def test_examples_are_cluster_tilting():
    assert build(2, 2, QQ).is_cluster_tilting(EXAMPLE_1).holds
    assert build(3, 2, QQ).is_cluster_tilting(EXAMPLE_2).holds
    report = build(2, 2, QQ).is_cluster_tilting(["P(0,1)"])
    assert not report.holds
    assert report.violations


def test_classical_cluster_category_of_a2_has_five_clusters():
    category = build(2, 1, QQ)
    clusters = [pair for pair in itertools.combinations(category.names(), 2) if category.is_cluster_tilting(pair).holds]
    assert len(clusters) == 5


def test_ar_quiver_of_example_one_is_an_eight_cycle():
    graph = build(2, 2, QQ).ar_quiver()
    arrows = [(s, t) for s, t, data in graph.edges(data=True) if data["kind"] == "arrow"]
    taus = [(s, t) for s, t, data in graph.edges(data=True) if data["kind"] == "tau"]
    assert len(arrows) == 8
    assert len(taus) == 8
    for j in range(4):
        assert (f"P({j},1)", f"P({j},2)") in arrows
        assert (f"P({j},2)", f"P({(j + 1) % 4},1)") in arrows


def test_finite_field_gives_the_same_hom_dims():
    rational = build(2, 2, QQ)
    binary = build(2, 2, FF(2))
    for x, y in itertools.product(rational.names(), repeat=2):
        for degree in (-1, 0, 1, 2):
            assert rational.hom(x, y, degree).dimension == binary.hom(x, y, degree).dimension


def test_shift_formulas_of_example_two():
    shift = build(3, 2, QQ).shift_permutation()
    for j in range(5):
        assert shift[f"P({j},1)"] == f"P({(j + 1) % 5},3)"
        assert shift[f"P({j},2)"] == f"P({(j + 2) % 5},2)"
        assert shift[f"P({j},3)"] == f"P({(j + 3) % 5},1)"
    assert sorted(shift.values()) == sorted(shift)


def test_splicing_towers_end_in_add_m():
    category = build(2, 2, QQ)
    for name in category.names():
        tower = category.splicing_tower(EXAMPLE_1, name)
        assert tower.loop(2).in_add_m


def test_ar_quiver_of_example_two_is_the_folded_mesh():
    graph = build(3, 2, QQ).ar_quiver()
    arrows = sorted((s, t) for s, t, data in graph.edges(data=True) if data["kind"] == "arrow")
    taus = [(s, t) for s, t, data in graph.edges(data=True) if data["kind"] == "tau"]
    expected = []
    for j in range(5):
        following = (j + 1) % 5
        expected += [
            (f"P({j},1)", f"P({j},2)"),
            (f"P({j},2)", f"P({j},3)"),
            (f"P({j},2)", f"P({following},1)"),
            (f"P({j},3)", f"P({following},2)"),
        ]
    assert arrows == sorted(expected)
    assert len(taus) == 15
