from sympy.polys.domains import FF, QQ

from tiltsight.complexes import CochainComplex, ChainMap, cone, is_quasi_iso, truncate_above, truncate_below
from tiltsight.matrices import ExactMatrix, hstack, in_span, quotient_projection, section_positions, span_rank
from tiltsight.scalars import field_elements, field_from_label, field_label, format_scalar, parse_scalar


def test_rank_kernel_and_solve_over_rationals():
    matrix = ExactMatrix(QQ, [[1, 2, 3], [2, 4, 6], [1, 0, 1]])
    assert matrix.rank() == 2
    kernel = matrix.kernel_basis()
    assert kernel.shape == (3, 1)
    assert (matrix @ kernel).is_zero()

    rhs = ExactMatrix(QQ, [[4], [8], [2]])
    solution = matrix.solve(rhs)
    assert solution is not None
    assert matrix @ solution == rhs
    assert matrix.solve(ExactMatrix(QQ, [[1], [0], [0]])) is None


def test_reduced_echelon_form_over_both_fields():
    reduced, pivots = ExactMatrix(QQ, [[2, 4, 1], [1, 3, 2]]).rref()
    assert pivots == (0, 1)
    assert reduced == ExactMatrix(QQ, [[1, 0, QQ(-5, 2)], [0, 1, QQ(3, 2)]])
    reduced, pivots = ExactMatrix(FF(3), [[2, 4, 1], [1, 3, 2]]).rref()
    assert pivots == (0, 1)
    assert reduced == ExactMatrix(FF(3), [[1, 0, 2], [0, 1, 0]])
    assert ExactMatrix(QQ, [[0, 0], [0, 0]]).rref()[1] == ()


def test_empty_shapes_behave():
    empty = ExactMatrix.zeros(QQ, 0, 3)
    assert empty.shape == (0, 3)
    assert empty.rank() == 0
    assert empty.kernel_basis().shape == (3, 3)
    assert (ExactMatrix.zeros(QQ, 2, 0) @ ExactMatrix.zeros(QQ, 0, 4)).shape == (2, 4)


def test_quotient_projection_kills_subspace_and_splits():
    subspace = ExactMatrix(QQ, [[1], [1], [0]])
    projection, section = quotient_projection(subspace, 3)
    assert projection.shape == (2, 3)
    assert (projection @ subspace).is_zero()
    assert projection @ section == ExactMatrix.identity(QQ, 2)
    assert section_positions(section) == [1, 2]


def test_span_helpers():
    e1 = ExactMatrix(QQ, [[1], [0]])
    e2 = ExactMatrix(QQ, [[0], [1]])
    assert span_rank(QQ, [e1, e1.scale(3)], 2) == 1
    assert span_rank(QQ, [], 2) == 0
    assert in_span(hstack(QQ, [e1]), e1.scale(5))
    assert not in_span(hstack(QQ, [e1]), e2)


def test_finite_field_arithmetic_wraps():
    field = FF(2)
    matrix = ExactMatrix(field, [[1, 1], [1, 1]])
    assert (matrix @ matrix).is_zero()
    assert matrix.rank() == 1
    assert len(field_elements(field)) == 2


def test_field_labels_round_trip():
    assert field_from_label("Q") == QQ
    assert field_from_label("Fp:2") == FF(2)
    assert field_from_label("Fp(3)") == FF(3)
    assert field_label(FF(5)) == "Fp:5"
    assert format_scalar(QQ, parse_scalar(QQ, "-3/6")) == "-1/2"
    assert format_scalar(FF(3), parse_scalar(FF(3), 5)) == "2"


def test_unknown_field_is_rejected():
    for label in ("R", "Fp:4"):
        try:
            field_from_label(label)
        except ValueError:
            continue
        raise AssertionError(label)


def two_term(field=QQ) -> CochainComplex:
    """k -> k^2 in degrees -1, 0 with an injective differential."""
    return CochainComplex(field, {-1: 1, 0: 2}, {-1: ExactMatrix(field, [[1], [0]])})


def test_cohomology_of_two_term_complex():
    complex_ = two_term()
    assert complex_.cohomology_dims() == {0: 1}
    assert not complex_.is_acyclic()
    assert complex_.shift(1).cohomology_dims() == {-1: 1}


def test_cone_of_identity_is_acyclic():
    complex_ = two_term()
    identity = ChainMap(complex_, complex_, {-1: ExactMatrix.identity(QQ, 1), 0: ExactMatrix.identity(QQ, 2)})
    assert identity.is_closed()
    assert is_quasi_iso(identity)
    assert cone(identity).is_acyclic()


def test_truncations_keep_the_window():
    complex_ = CochainComplex(QQ, {-2: 1, -1: 1, 0: 1}, {})
    below = truncate_below(complex_.shift(-1))
    assert below.source.cohomology_dims() == {-1: 1, 0: 1}
    projection, section = truncate_above(complex_, 2)
    assert projection.target.cohomology_dims() == {-1: 1, 0: 1}
    assert is_quasi_iso(projection, [-1, 0])
