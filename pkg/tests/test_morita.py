import json
from pathlib import Path

import pytest
from sympy.polys.domains import FF, QQ

from tiltsight import morita
from tiltsight.morita import (
    EquivalenceReport,
    arrow_multiset,
    brute_force_classes,
    check_functoriality,
    context_over,
    enumerate_modules,
    lambda_ar_quiver,
    verify_equivalence,
)
from tiltsight.outputs import golden_diff, golden_observation, lambda_payload
from tiltsight.quivers import algebras_isomorphic, enumerate_basis
from tiltsight.registry import load_config


ROOT = Path(__file__).resolve().parents[1]
EXAMPLE_1 = ["P(0,1)", "P(2,1)"]
EXAMPLE_2 = ["P(0,1)", "P(0,2)", "P(3,1)"]


def presentation_algebra(name: str, field=QQ):
    return enumerate_basis(load_config(ROOT / "data" / "examples" / f"{name}.toml").presentation, field)


def test_extracted_algebras_match_the_presentations():
    first = context_over(2, 2, EXAMPLE_1, QQ)
    second = context_over(3, 2, EXAMPLE_2, QQ)
    assert first.algebra.graded_dims() == {0: 2, -1: 2}
    assert second.algebra.graded_dims() == {0: 4, -1: 3}
    assert algebras_isomorphic(first.algebra, presentation_algebra("example-1")) is not None
    assert algebras_isomorphic(second.algebra, presentation_algebra("example-2")) is not None
    payload = lambda_payload(second, presentation_match=())
    assert payload["graded_dims"] == {"-1": 3, "0": 4}
    assert payload["vertices"] == {"1": "P(0,1)", "2": "P(0,2)", "3": "P(3,1)"}
    assert payload["presentation_match"] == []


def test_transport_vanishes_on_add_m_and_lives_in_the_window():
    ctx = context_over(2, 2, EXAMPLE_1, QQ)
    for name in ctx.summands:
        assert ctx.f_m(name).is_zero()
    for name, module in ctx.transport_table().items():
        assert module.failures() == []
        assert module.in_dem(2), name
        assert not module.is_acyclic()


def test_example_one_passes_the_bridge_check():
    ctx = context_over(2, 2, EXAMPLE_1, QQ)
    report = verify_equivalence(ctx)
    assert report.passed, report.failures
    payload = report.to_json()
    assert payload["pair_count"] == 36
    assert payload["schema"] == "tiltsight.verify.v1"
    assert payload["projective_homs_checked"] == 2 * 8 * 2
    assert payload["projective_hom_mismatches"] == []
    assert all(vertex is not None for vertex in report.projectives.values())
    assert all(vertex is not None for vertex in report.injectives.values())


def test_example_two_dims_agree_across_the_bridge():
    ctx = context_over(3, 2, EXAMPLE_2, QQ)
    report = verify_equivalence(ctx, ar_quiver=False, functoriality_limit=8)
    assert report.to_json()["pair_count"] == 144
    assert report.mismatched_pairs == []
    assert report.passed, report.failures


def test_lambda_side_ar_quiver_matches_the_quotient():
    ctx = context_over(2, 2, EXAMPLE_1, QQ)
    assert arrow_multiset(lambda_ar_quiver(ctx)) == arrow_multiset(ctx.quotient.ar_quiver())


def test_functoriality_of_the_transport():
    ctx = context_over(3, 2, EXAMPLE_2, QQ)
    assert check_functoriality(ctx, limit=40) == []


def test_golden_observation_includes_lambda_dims():
    ctx = context_over(2, 2, EXAMPLE_1, QQ)
    expected = json.loads((ROOT / "data" / "golden" / "example-1.json").read_text(encoding="utf-8"))
    observed = golden_observation(ctx.category, ctx.quotient, ctx)
    assert golden_diff(expected, observed) == []


def test_brute_force_enumeration_over_f2():
    ctx = context_over(2, 2, EXAMPLE_1, FF(2))
    report = brute_force_classes(ctx, bound=3)
    assert report.passed, report.to_json()
    assert report.classes == 6
    assert report.valid <= report.examined


def test_enumeration_refuses_the_rationals_and_large_searches(monkeypatch):
    with pytest.raises(ValueError):
        brute_force_classes(context_over(2, 2, EXAMPLE_1, QQ), bound=2)
    monkeypatch.setattr(morita, "MAX_ASSIGNMENTS", 1)
    with pytest.raises(ValueError):
        list(enumerate_modules(presentation_algebra("example-1", FF(2)), 2, 2))


def test_projective_hom_mismatch_fails_the_report():
    report = EquivalenceReport(2, 2, EXAMPLE_1)
    report.projective_homs = [{"source": "P(1,1)", "target": "P(0,2)", "degree": -1, "quotient": 0, "ambient": 1}]
    assert not report.passed
    assert report.failures[0].startswith("Hom out of projective P(1,1)")
