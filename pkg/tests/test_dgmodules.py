from pathlib import Path

from sympy.polys.domains import QQ

from tiltsight.dgmodules import (
    DGModule,
    ModuleMap,
    cone_inclusion,
    cone_module,
    cone_projection,
    direct_sum,
    identity_map,
    module_hom_complex,
    shift_module,
    truncate_above,
    truncate_below,
    zero_module,
)
from tiltsight.quivers import enumerate_basis
from tiltsight.registry import load_config
from tiltsight.resolutions import free_module


EXAMPLES = Path(__file__).resolve().parents[1] / "data" / "examples"


def algebra(name: str = "example-1"):
    return enumerate_basis(load_config(EXAMPLES / f"{name}.toml").presentation, QQ)


def simple(lam, vertex: int) -> DGModule:
    return DGModule(lam, {(0, vertex): 1})


def test_free_modules_are_valid_and_two_dimensional():
    lam = algebra()
    for v in range(2):
        module = free_module(lam, v).module
        assert module.failures() == []
        assert module.total_dimension() == 2
        assert module.degrees() == [-1, 0]
        assert module.in_dem(2)
        assert not module.in_dem(1)


def test_shift_moves_degrees_and_round_trips():
    module = free_module(algebra(), 0).module
    shifted = shift_module(module, 1)
    assert shifted.degrees() == [-2, -1]
    assert shifted.failures() == []
    assert shift_module(shifted, -1).dims == module.dims


def test_cone_of_identity_is_acyclic():
    module = free_module(algebra(), 1).module
    identity = identity_map(module)
    assert identity.is_closed() and identity.is_linear()
    cone = cone_module(identity)
    assert cone.failures() == []
    assert cone.is_acyclic()
    assert cone_inclusion(identity).is_closed()
    assert cone_projection(identity).is_closed()


def test_cone_of_zero_map_splits():
    lam = algebra()
    first, second = free_module(lam, 0).module, free_module(lam, 1).module
    zero = ModuleMap(first, second, 0, {})
    cone = cone_module(zero)
    expected = direct_sum([shift_module(first, 1), second])
    assert cone.cohomology_dims() == expected.cohomology_dims()


def test_truncations_of_a_shifted_free_module():
    lam = algebra()
    module = shift_module(free_module(lam, 0).module, -1)
    below = truncate_below(module)
    assert below.module.degrees() == [0]
    assert below.comparison.is_closed() and below.comparison.is_linear()
    assert below.module.failures() == []

    above = truncate_above(free_module(lam, 0).module, 1)
    assert above.module.degrees() == [0]
    assert above.module.total_dimension() == 1
    assert above.comparison.is_quasi_iso(above=-1)


def test_module_hom_complex_between_free_modules():
    lam = algebra()
    p0, p1 = free_module(lam, 0).module, free_module(lam, 1).module
    assert module_hom_complex(p0, p0, [0]).space(0).dimension == 1
    assert module_hom_complex(p0, p0, [-1]).space(-1).dimension == 0
    assert module_hom_complex(p0, p1, [-1]).space(-1).dimension == 1
    assert module_hom_complex(p0, p1, [0]).space(0).dimension == 0


def test_maps_between_simples_must_respect_the_action():
    lam = algebra()
    s0 = simple(lam, 0)
    assert s0.failures() == []
    assert module_hom_complex(s0, s0, [0]).space(0).dimension == 1
    assert module_hom_complex(s0, simple(lam, 1), [0]).space(0).dimension == 0
    assert zero_module(lam).is_acyclic()


def test_json_round_trip_keeps_the_module():
    lam = algebra("example-2")
    module = free_module(lam, 1).module
    again = DGModule.from_json(lam, module.to_json())
    assert again.dims == module.dims
    assert again.cohomology_dims() == module.cohomology_dims()
    assert again.failures() == []
