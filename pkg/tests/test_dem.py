import random
from pathlib import Path

import pytest
from sympy.polys.domains import QQ

from tiltsight.dem import (
    ShapeError,
    check_presentation,
    is_d_self_injective,
    is_n_epi,
    is_n_mono,
    iterated_cokernel,
    iterated_kernel,
    k_dual,
    omega,
    projective_presentation,
    random_band,
    sigma,
)
from tiltsight.dgmodules import DGModule, ModuleMap, identity_map, zero_module
from tiltsight.quivers import enumerate_basis
from tiltsight.registry import load_config
from tiltsight.resolutions import derived_isomorphic, free_module


EXAMPLES = Path(__file__).resolve().parents[1] / "data" / "examples"


def algebra(name: str = "example-1"):
    return enumerate_basis(load_config(EXAMPLES / f"{name}.toml").presentation, QQ)


def test_identity_is_mono_and_epi_at_every_level():
    module = free_module(algebra(), 0).module
    identity = identity_map(module)
    for n in (1, 2):
        assert is_n_mono(identity, n, 2)
        assert is_n_epi(identity, n, 2)


def test_maps_to_and_from_zero():
    lam = algebra()
    module = free_module(lam, 0).module
    onto_zero = ModuleMap(module, zero_module(lam), 0, {})
    assert is_n_epi(onto_zero, 2, 2)
    assert not is_n_epi(onto_zero, 1, 2)
    from_zero = ModuleMap(zero_module(lam), module, 0, {})
    assert is_n_mono(from_zero, 2, 2)
    assert not is_n_mono(from_zero, 1, 2)
    with pytest.raises(ValueError):
        is_n_mono(from_zero, 3, 2)


def test_loop_and_suspension_of_a_free_module():
    module = free_module(algebra(), 0).module
    assert omega(module).total_dimension() == 1
    assert sigma(module, 2).total_dimension() == 1
    assert omega(omega(module)).is_acyclic()


def test_direct_and_inductive_iterated_cokernels_agree():
    rng = random.Random(7)
    for name in ("example-1", "example-2"):
        lam = algebra(name)
        for _ in range(25):
            degrees = [-rng.randrange(3) for _ in range(rng.randint(1, 3))]
            band = random_band(lam, degrees, rng)
            direct = iterated_cokernel(band, 2)
            inductive = iterated_cokernel(band, 2, inductive=True)
            assert direct.in_dem(2)
            assert derived_isomorphic(direct, inductive, 2), degrees


def test_direct_and_inductive_iterated_kernels_agree():
    rng = random.Random(11)
    for name in ("example-1", "example-2"):
        lam = algebra(name)
        for _ in range(25):
            degrees = [rng.randrange(3) for _ in range(rng.randint(1, 3))]
            band = random_band(lam, degrees, rng)
            direct = iterated_kernel(band, 2)
            inductive = iterated_kernel(band, 2, inductive=True)
            assert derived_isomorphic(direct, inductive, 2), degrees


def test_band_outside_the_window_is_rejected():
    lam = algebra()
    band = random_band(lam, [0, -3], random.Random(1))
    with pytest.raises(ShapeError):
        iterated_cokernel(band, 2)


def test_projective_presentation_of_a_simple():
    lam = algebra()
    module = DGModule(lam, {(0, 0): 1})
    presentation = projective_presentation(module, 2)
    assert presentation.stages
    assert check_presentation(presentation, module, 2) == []
    assert presentation.to_json()["band_generators"]


def test_k_dual_reverses_degrees_twice():
    module = free_module(algebra("example-2"), 0).module
    dual = k_dual(module)
    assert dual.failures() == []
    assert {i for i, _ in dual.dims} == {-i for i, _ in module.dims}
    assert k_dual(dual).dims == module.dims


def test_self_injectivity_of_the_examples():
    assert is_d_self_injective(algebra("example-1"), 2).self_injective
    report = is_d_self_injective(algebra("example-2"), 2)
    assert not report.self_injective
    assert set(report.to_json()["shifts"]) == {"1", "2"}
