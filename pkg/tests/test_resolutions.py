from pathlib import Path

import pytest
from sympy.polys.domains import FF, QQ

from tiltsight.dgmodules import DGModule, direct_sum
from tiltsight.matrices import ExactMatrix
from tiltsight.quivers import enumerate_basis
from tiltsight.registry import load_config
from tiltsight.resolutions import (
    EndomorphismAlgebra,
    WindowTooDeep,
    default_depth,
    derived_isomorphic,
    endomorphism_algebra,
    free_module,
    is_indecomposable,
    is_local,
    rhom,
    semifree_resolution,
)


EXAMPLES = Path(__file__).resolve().parents[1] / "data" / "examples"


def algebra(name: str = "example-1"):
    return enumerate_basis(load_config(EXAMPLES / f"{name}.toml").presentation, QQ)


def simple(lam, vertex: int) -> DGModule:
    return DGModule(lam, {(0, vertex): 1})


def test_free_module_resolves_by_itself():
    lam = algebra()
    module = free_module(lam, 0).module
    resolution = semifree_resolution(module, default_depth(2))
    assert len(resolution.generators) == 1
    assert resolution.comparison.is_closed()
    assert resolution.comparison.is_quasi_iso()


def test_simple_module_needs_a_generator_every_other_degree():
    lam = algebra()
    resolution = semifree_resolution(simple(lam, 0), 4)
    assert sorted(g.degree for g in resolution.generators) == [-4, -2, 0]
    assert [g.vertex for g in sorted(resolution.generators, key=lambda g: g.degree)] == [0, 1, 0]
    assert resolution.comparison.is_quasi_iso(above=-4)


def test_derived_homs_between_free_modules():
    lam = algebra()
    p0, p1 = free_module(lam, 0).module, free_module(lam, 1).module
    assert rhom(p0, p0, 2).dims() == {-1: 0, 0: 1}
    assert rhom(p0, p1, 2).dims() == {-1: 1, 0: 0}
    assert rhom(p1, p0, 2).dims() == {-1: 1, 0: 0}


def test_self_extensions_of_a_simple_are_periodic():
    lam = algebra()
    s0 = simple(lam, 0)
    s1 = simple(lam, 1)
    assert rhom(s0, s0, 2, window=(0, 3)).dims() == {0: 1, 1: 0, 2: 0, 3: 0}
    assert rhom(s0, s1, 2, window=(0, 3)).dims() == {0: 0, 1: 0, 2: 1, 3: 0}


def test_window_beyond_the_resolution_is_refused():
    lam = algebra()
    module = free_module(lam, 0).module
    with pytest.raises(WindowTooDeep):
        rhom(module, module, 2, window=(0, 3), depth=2)


def test_indecomposability_and_isomorphism():
    lam = algebra()
    s0, s1 = simple(lam, 0), simple(lam, 1)
    assert is_indecomposable(s0, 2)
    assert not is_indecomposable(direct_sum([s0, s1]), 2)
    assert is_local(endomorphism_algebra(free_module(lam, 1).module, 2))
    assert derived_isomorphic(s0, s0, 2)
    assert not derived_isomorphic(s0, s1, 2)


def test_truncated_resolution_is_isomorphic_to_the_module():
    lam = algebra("example-2")
    for v in range(3):
        module = free_module(lam, v).module
        resolution = semifree_resolution(module, 3)
        assert derived_isomorphic(resolution.module, module, 2)


def two_dimensional(field, products, identity) -> EndomorphismAlgebra:
    def vector(values):
        return ExactMatrix(field, [[value] for value in values], 2, 1)

    structure = [[vector(products[i][j]) for j in range(2)] for i in range(2)]
    return EndomorphismAlgebra(None, structure, vector(identity))


def test_locality_reads_the_radical_in_every_characteristic():
    dual_numbers = [[(1, 0), (0, 1)], [(0, 1), (0, 0)]]
    split = [[(1, 0), (0, 0)], [(0, 0), (0, 1)]]
    gaussian = [[(1, 0), (0, 1)], [(0, 1), (-1, 0)]]
    for field in (QQ, FF(2), FF(3)):
        assert is_local(two_dimensional(field, dual_numbers, (1, 0)))
        assert not is_local(two_dimensional(field, split, (1, 1)))
    assert not is_local(two_dimensional(QQ, gaussian, (1, 0)))
    assert not is_local(two_dimensional(FF(5), gaussian, (1, 0)))
    assert is_local(two_dimensional(FF(2), gaussian, (1, 0)))
