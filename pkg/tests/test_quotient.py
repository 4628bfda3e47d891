import itertools
import json
from pathlib import Path

import pytest
from sympy.polys.domains import QQ

from tiltsight.morita import arrow_multiset
from tiltsight.orbit import SplicingFailure, build
from tiltsight.outputs import golden_diff, golden_observation
from tiltsight.quotient import NotClusterTilting, quotient_by


GOLDEN = Path(__file__).resolve().parents[1] / "data" / "golden"
EXAMPLE_1 = ["P(0,1)", "P(2,1)"]
EXAMPLE_2 = ["P(0,1)", "P(0,2)", "P(3,1)"]


def golden(name: str) -> dict:
    return json.loads((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))


def example_quotient(number: int):
    if number == 1:
        category = build(2, 2, QQ)
        return category, quotient_by(category, EXAMPLE_1)
    category = build(3, 2, QQ)
    return category, quotient_by(category, EXAMPLE_2)


def test_non_cluster_tilting_object_is_refused_unless_forced():
    category = build(2, 2, QQ)
    with pytest.raises(NotClusterTilting) as excinfo:
        quotient_by(category, ["P(0,1)"])
    assert excinfo.value.report.violations
    assert quotient_by(category, ["P(0,1)"], force=True).summands == ["P(0,1)"]


def test_example_one_matches_its_golden_file():
    category, quotient = example_quotient(1)
    observed = golden_observation(category, quotient)
    assert golden_diff(golden("example-1"), observed) == []
    assert quotient.frobenius_check()
    assert quotient.projectives() == ["P(1,1)", "P(3,1)"]


def test_example_two_matches_its_golden_file():
    category, quotient = example_quotient(2)
    observed = golden_observation(category, quotient)
    assert golden_diff(golden("example-2"), observed) == []
    assert not quotient.frobenius_check()
    assert quotient.injectives() == ["P(2,1)", "P(4,1)", "P(4,2)"]


def test_golden_diff_reports_a_missing_arrow():
    category, quotient = example_quotient(1)
    expected = golden("example-1")
    expected["quotient_arrows"] = expected["quotient_arrows"][1:]
    diffs = golden_diff(expected, golden_observation(category, quotient))
    assert len(diffs) == 1
    assert diffs[0].startswith("quotient_arrows")


def test_quotient_ar_quiver_is_the_full_subquiver_on_survivors():
    category, quotient = example_quotient(2)
    survivors = set(quotient.surviving())
    ambient = [
        (source, target)
        for source, target, data in category.ar_quiver().edges(data=True)
        if data["kind"] == "arrow" and source in survivors and target in survivors
    ]
    assert sorted(ambient) == arrow_multiset(quotient.ar_quiver())


def test_summands_die_in_the_quotient():
    _, quotient = example_quotient(1)
    for member in EXAMPLE_1:
        for other in quotient.category.names():
            assert quotient.hom(member, other, 0) == 0
            assert quotient.hom(other, member, 0) == 0
    for name in quotient.surviving():
        assert quotient.hom(name, name, 0) >= 1


def test_positive_and_deep_degrees_vanish():
    _, quotient = example_quotient(2)
    for x, y in itertools.product(quotient.surviving()[:4], repeat=2):
        assert quotient.hom(x, y, 1) == 0
        assert quotient.hom(x, y, -2) == 0


def test_classical_quotients_are_module_categories_of_a2():
    category = build(2, 1, QQ)
    clusters = [pair for pair in itertools.combinations(category.names(), 2) if category.is_cluster_tilting(pair).holds]
    for cluster in clusters:
        quotient = quotient_by(category, cluster)
        assert len(quotient.surviving()) == 3
        table = quotient.hom_table()
        assert sum(row["0"] for row in table.values()) == 5
        assert all(set(row) == {"0"} for row in table.values())


def test_bar_complex_agrees_with_the_direct_quotient():
    _, quotient = example_quotient(1)
    for x, y in itertools.product(quotient.surviving(), repeat=2):
        assert quotient.bar_hom0(x, y) == quotient.hom(x, y, 0), (x, y)
        assert quotient.bar_is_stable(x, y)


def test_witnesses_on_identities():
    _, quotient = example_quotient(1)
    for name in quotient.surviving():
        identity = quotient.category.identity(name)
        mono = quotient.d_mono_witness(identity)
        epi = quotient.d_epi_witness(identity)
        assert mono.holds and mono.factors == mono.surjective
        assert epi.holds and epi.factors == epi.surjective
        assert mono.to_json()["kind"] == "d-mono"


def test_loop_class_contains_add_m():
    _, quotient = example_quotient(2)
    assert set(EXAMPLE_2) <= set(quotient.loop_class(1))


def test_forced_quotient_keeps_an_unfinished_tower():
    category = build(2, 2, QQ)
    with pytest.raises(SplicingFailure):
        category.splicing_tower(["P(0,1)"], "P(1,1)")
    quotient = quotient_by(category, ["P(0,1)"], force=True)
    assert quotient.forced
    assert not quotient.tower("P(1,1)").loop(2).in_add_m
    table = quotient.hom_table()
    assert len(table) == len(quotient.surviving()) ** 2
    assert all(set(row) == {"-1", "0"} for row in table.values())


def test_hom_out_of_projectives_is_the_ambient_hom():
    for number in (1, 2):
        category, quotient = example_quotient(number)
        rows = quotient.projective_hom_rows()
        assert len(rows) == len(quotient.projectives()) * len(category.names()) * 2
        for row in rows:
            assert row["quotient"] == row["ambient"], row


def test_mono_and_epi_characterizations_agree_on_every_basis_morphism():
    for number in (1, 2):
        category, quotient = example_quotient(number)
        for x, y in itertools.product(quotient.surviving(), repeat=2):
            for morphism in category.hom(x, y, 0).basis():
                mono = quotient.d_mono_witness(morphism)
                epi = quotient.d_epi_witness(morphism)
                assert mono.factors == mono.surjective
                assert epi.factors == epi.surjective
