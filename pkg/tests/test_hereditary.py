from collections import Counter

from sympy.polys.domains import QQ

from tiltsight.hereditary import (
    ProjectiveComplex,
    canonical_complex,
    cone_of,
    decompose,
    hom_dim,
    hom_space,
    identity,
    lift_hom_dim,
    minimize,
    nakayama,
    orbit_functor,
    orbit_step,
    orbit_step_inverse,
    tau,
    tau_inverse,
)
from tiltsight.matrices import ExactMatrix


def lifts(n: int, shifts=(0, 1)):
    return [(a, b, k) for k in shifts for a in range(1, n + 1) for b in range(a, n + 1)]


def test_hom_dims_match_interval_combinatorics_on_small_types():
    for n in (2, 3, 4):
        for source in lifts(n):
            for target in lifts(n):
                x = canonical_complex(n, QQ, source)
                y = canonical_complex(n, QQ, target)
                for degree in (-1, 0, 1, 2):
                    assert hom_dim(x, y, degree) == lift_hom_dim(source, target, n, degree), (n, source, target, degree)


def test_canonical_complexes_decompose_to_their_lift():
    for n in (2, 3, 4):
        for lift in lifts(n, shifts=(-1, 0, 2)):
            assert decompose(canonical_complex(n, QQ, lift)) == Counter({lift: 1})


def test_auslander_reiten_translate_on_intervals():
    n = 3
    for a, b, k in lifts(n):
        expected = (a + 1, b + 1, k) if b < n else (1, a, k - 1)
        assert decompose(tau(canonical_complex(n, QQ, (a, b, k)))) == Counter({expected: 1})
        assert decompose(tau_inverse(tau(canonical_complex(n, QQ, (a, b, k))))) == Counter({(a, b, k): 1})


def test_serre_duality_dimensions():
    n = 3
    for source in lifts(n, shifts=(0,)):
        for target in lifts(n, shifts=(0,)):
            x = canonical_complex(n, QQ, source)
            y = canonical_complex(n, QQ, target)
            assert hom_dim(x, y, 0) == hom_dim(y, nakayama(x), 0)


def test_orbit_functor_agrees_with_the_lift_rule():
    for n, d in ((2, 2), (3, 2), (2, 1)):
        for lift in lifts(n):
            moved = orbit_step(lift, n, d)
            assert decompose(orbit_functor(canonical_complex(n, QQ, lift), d)) == Counter({moved: 1})
            assert orbit_step_inverse(moved, n, d) == lift


def test_contractible_complex_minimizes_to_zero():
    contractible = ProjectiveComplex(3, QQ, {-1: (2,), 0: (2,)}, {-1: ExactMatrix(QQ, [[1]])})
    model = minimize(contractible)
    assert model.complex.is_zero()
    assert decompose(contractible) == Counter()


def test_cone_of_an_inclusion_of_projectives():
    n = 3
    p3 = canonical_complex(n, QQ, (3, 3, 0))
    p2 = canonical_complex(n, QQ, (2, 3, 0))
    inclusion = hom_space(p3, p2, 0).basis()[0]
    assert inclusion.is_closed()
    assert decompose(cone_of(inclusion)) == Counter({(2, 2, 0): 1})
    assert hom_space(p2, p2, 0).classify(identity(p2)) == ExactMatrix(QQ, [[1]])
