from pathlib import Path

import pytest
from sympy.polys.domains import FF, QQ

from tiltsight.dem import opposite_algebra
from tiltsight.quivers import (
    NotStabilized,
    PresentationError,
    algebras_isomorphic,
    enumerate_basis,
    linear_quiver,
    presentation_from_dict,
    truncate_algebra,
    truncation_ideal_is_closed,
    validate,
)
from tiltsight.registry import load_config


EXAMPLES = Path(__file__).resolve().parents[1] / "data" / "examples"


def example_algebra(name: str, field=QQ):
    presentation = load_config(EXAMPLES / f"{name}.toml").presentation
    return presentation, enumerate_basis(presentation, field)


def test_example_presentations_have_the_expected_graded_dims():
    _, first = example_algebra("example-1")
    _, second = example_algebra("example-2")
    assert first.graded_dims() == {0: 2, -1: 2}
    assert second.graded_dims() == {0: 4, -1: 3}
    assert first.has_zero_differential()
    assert first.is_connective()
    assert first.is_d_truncated(2)


def test_example_presentations_satisfy_the_algebra_axioms():
    for name in ("example-1", "example-2"):
        presentation, algebra = example_algebra(name)
        report = validate(presentation, algebra)
        assert report.passed, report.failures


def test_path_composition_order():
    _, algebra = example_algebra("example-2")
    labels = {element.label: index for index, element in enumerate(algebra.basis)}
    assert "beta*alpha" in labels
    beta, alpha = labels["beta"], labels["alpha"]
    assert algebra.product(beta, alpha) == {labels["beta*alpha"]: QQ.one}
    assert algebra.product(alpha, beta) == {}
    assert algebra.product(labels["gamma"], beta) == {}


def test_isomorphism_test_distinguishes_the_opposite_algebra():
    _, algebra = example_algebra("example-2")
    assert algebras_isomorphic(algebra, algebra) is not None
    assert algebras_isomorphic(algebra, opposite_algebra(algebra)) is None
    _, symmetric = example_algebra("example-1")
    assert algebras_isomorphic(symmetric, opposite_algebra(symmetric)) is not None


def test_same_dims_different_products_are_not_isomorphic():
    _, first = example_algebra("example-1")
    free = presentation_from_dict(
        {
            "vertices": ["1", "2"],
            "arrows": [
                {"name": "a", "from": "1", "to": "2", "degree": -1},
                {"name": "b", "from": "2", "to": "1", "degree": -1},
            ],
            "relations": [[{"path": ["b", "a"]}], [{"path": ["a", "b"]}]],
        }
    )
    assert algebras_isomorphic(first, enumerate_basis(free, QQ)) is not None
    loop = presentation_from_dict(
        {
            "vertices": ["1", "2"],
            "arrows": [
                {"name": "x", "from": "1", "to": "1", "degree": -1},
                {"name": "y", "from": "2", "to": "2", "degree": -1},
            ],
            "relations": [[{"path": ["x", "x"]}], [{"path": ["y", "y"]}]],
        }
    )
    other = enumerate_basis(loop, QQ)
    assert other.graded_dims() == first.graded_dims()
    assert algebras_isomorphic(first, other) is None


def test_unbounded_paths_are_reported():
    loop = presentation_from_dict({"vertices": ["1"], "arrows": [{"name": "x", "from": "1", "to": "1", "degree": 0}]})
    with pytest.raises(NotStabilized):
        enumerate_basis(loop, QQ, length_bound=4)


def test_positive_degree_arrows_are_rejected():
    with pytest.raises(PresentationError):
        presentation_from_dict({"vertices": ["1", "2"], "arrows": [{"name": "x", "from": "1", "to": "2", "degree": 1}]})


def test_relations_must_be_homogeneous_in_degree_and_length():
    arrows = [
        {"name": "a", "from": "1", "to": "2", "degree": 0},
        {"name": "b", "from": "2", "to": "3", "degree": -1},
        {"name": "c", "from": "1", "to": "3", "degree": -1},
    ]

    def present(relation):
        return presentation_from_dict({"vertices": ["1", "2", "3"], "arrows": arrows, "relations": [relation]})

    with pytest.raises(PresentationError, match="length-homogeneous"):
        present([{"coef": "1", "path": ["b", "a"]}, {"coef": "-1", "path": ["c"]}])
    with pytest.raises(PresentationError, match="sources, targets or degrees"):
        present([{"coef": "1", "path": ["b", "a"]}, {"coef": "-1", "path": ["a"]}])
    assert len(present([{"coef": "1", "path": ["b", "a"]}]).relations) == 1


def test_differential_on_a_dg_presentation():
    presentation = presentation_from_dict(
        {
            "vertices": ["1", "2", "3"],
            "arrows": [
                {"name": "a", "from": "1", "to": "2", "degree": 0},
                {"name": "b", "from": "2", "to": "3", "degree": 0},
                {"name": "h", "from": "1", "to": "3", "degree": -1},
            ],
            "differential": {"h": [{"path": ["b", "a"]}]},
        }
    )
    algebra = enumerate_basis(presentation, QQ)
    report = validate(presentation, algebra)
    assert report.passed, report.failures
    assert not algebra.has_zero_differential()
    assert algebra.underlying_complex().cohomology_dims() == {0: 5}


def test_linear_quiver_truncation():
    algebra = enumerate_basis(linear_quiver(3), FF(2))
    assert algebra.graded_dims() == {0: 6}
    assert truncation_ideal_is_closed(algebra, 1)
    assert truncate_algebra(algebra, 1).dimension == 6
