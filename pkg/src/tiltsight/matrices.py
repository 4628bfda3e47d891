from __future__ import annotations

from typing import Any, Iterable, Sequence

from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix

from tiltsight.scalars import format_scalar, parse_scalar


class ShapeMismatch(ValueError):
    pass


class ExactMatrix:
    """Dense matrix over an exact sympy field domain.

    Rows and columns are stored explicitly so empty shapes such as 0 x 3
    behave like any other matrix.
    """

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Domain, rows: Sequence[Sequence[Any]], nrows: int | None = None, ncols: int | None = None) -> None:
        converted = tuple(tuple(field.convert(value) for value in row) for row in rows)
        self.field = field
        self.nrows = len(converted) if nrows is None else nrows
        if ncols is None:
            ncols = len(converted[0]) if converted else 0
        self.ncols = ncols
        if len(converted) != self.nrows or any(len(row) != ncols for row in converted):
            raise ShapeMismatch(f"rows do not match shape {self.nrows}x{ncols}")
        self.rows = converted

    @classmethod
    def _trusted(cls, field: Domain, rows: tuple[tuple[Any, ...], ...], nrows: int, ncols: int) -> ExactMatrix:
        matrix = cls.__new__(cls)
        matrix.field = field
        matrix.nrows = nrows
        matrix.ncols = ncols
        matrix.rows = rows
        return matrix

    @classmethod
    def zeros(cls, field: Domain, nrows: int, ncols: int) -> ExactMatrix:
        zero = field.zero
        return cls._trusted(field, tuple((zero,) * ncols for _ in range(nrows)), nrows, ncols)

    @classmethod
    def identity(cls, field: Domain, size: int) -> ExactMatrix:
        zero, one = field.zero, field.one
        rows = tuple(tuple(one if i == j else zero for j in range(size)) for i in range(size))
        return cls._trusted(field, rows, size, size)

    @classmethod
    def from_columns(cls, field: Domain, columns: Sequence[Sequence[Any]], nrows: int) -> ExactMatrix:
        if not columns:
            return cls.zeros(field, nrows, 0)
        rows = [[column[i] for column in columns] for i in range(nrows)]
        return cls(field, rows, nrows, len(columns))

    @classmethod
    def from_entries(cls, field: Domain, nrows: int, ncols: int, entries: dict[tuple[int, int], Any]) -> ExactMatrix:
        grid = [[field.zero] * ncols for _ in range(nrows)]
        for (i, j), value in entries.items():
            grid[i][j] = field.convert(value)
        return cls._trusted(field, tuple(tuple(row) for row in grid), nrows, ncols)

    @classmethod
    def block(cls, field: Domain, blocks: Sequence[Sequence[ExactMatrix]]) -> ExactMatrix:
        rows = [hstack(field, row) for row in blocks]
        return vstack(field, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def entry(self, i: int, j: int) -> Any:
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Any, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple[Any, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def is_zero(self) -> bool:
        zero = self.field.zero
        return all(value == zero for row in self.rows for value in row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self.to_strings())))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.nrows}x{self.ncols}, {self.to_strings()})"

    def __matmul__(self, other: ExactMatrix) -> ExactMatrix:
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.field.zero
        other_columns = other.columns()
        rows = []
        for row in self.rows:
            support = [(k, value) for k, value in enumerate(row) if value != zero]
            rows.append(tuple(sum((value * column[k] for k, value in support), zero) for column in other_columns))
        return ExactMatrix._trusted(self.field, tuple(rows), self.nrows, other.ncols)

    def __add__(self, other: ExactMatrix) -> ExactMatrix:
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {other.shape}")
        rows = tuple(tuple(a + b for a, b in zip(left, right)) for left, right in zip(self.rows, other.rows))
        return ExactMatrix._trusted(self.field, rows, self.nrows, self.ncols)

    def __neg__(self) -> ExactMatrix:
        return self.scale(-self.field.one)

    def __sub__(self, other: ExactMatrix) -> ExactMatrix:
        return self + (-other)

    def scale(self, factor: Any) -> ExactMatrix:
        factor = self.field.convert(factor)
        rows = tuple(tuple(factor * value for value in row) for row in self.rows)
        return ExactMatrix._trusted(self.field, rows, self.nrows, self.ncols)

    def transpose(self) -> ExactMatrix:
        rows = tuple(self.column(j) for j in range(self.ncols))
        return ExactMatrix._trusted(self.field, rows, self.ncols, self.nrows)

    def submatrix(self, row_indices: Sequence[int], column_indices: Sequence[int]) -> ExactMatrix:
        rows = tuple(tuple(self.rows[i][j] for j in column_indices) for i in row_indices)
        return ExactMatrix._trusted(self.field, rows, len(row_indices), len(column_indices))

    def rref(self) -> tuple[ExactMatrix, tuple[int, ...]]:
        """Reduced row echelon form and pivot columns.

        Over ℚ the elimination is fraction-free and divides by the common
        denominator once at the end; over 𝔽_p it is plain Gauss-Jordan.
        """
        if not self.nrows or not self.ncols:
            return self, ()
        field = self.field
        matrix = DomainMatrix([list(row) for row in self.rows], self.shape, field)
        if field.is_QQ:
            numerators, denominator, pivots = matrix.rref_den(method="FF")
            grid = [[value / denominator for value in row] for row in numerators.to_list()]
        else:
            reduced, pivots = matrix.rref(method="GJ")
            grid = reduced.to_list()
        rows = tuple(tuple(field.convert(value) for value in row) for row in grid)
        return ExactMatrix._trusted(field, rows, self.nrows, self.ncols), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> ExactMatrix:
        """Columns spanning the null space, one per free column."""
        field = self.field
        reduced, pivots = self.rref()
        pivot_set = set(pivots)
        free = [j for j in range(self.ncols) if j not in pivot_set]
        columns = []
        for f in free:
            vector = [field.zero] * self.ncols
            vector[f] = field.one
            for i, p in enumerate(pivots):
                vector[p] = -reduced.rows[i][f]
            columns.append(vector)
        return ExactMatrix.from_columns(field, columns, self.ncols)

    def column_basis(self) -> ExactMatrix:
        """Linearly independent columns spanning the column space."""
        _, pivots = self.rref()
        return self.submatrix(range(self.nrows), pivots)

    def solve(self, rhs: ExactMatrix) -> ExactMatrix | None:
        """A matrix X with self @ X == rhs, or None when none exists."""
        if rhs.nrows != self.nrows:
            raise ShapeMismatch(f"right-hand side has {rhs.nrows} rows, expected {self.nrows}")
        augmented = hstack(self.field, [self, rhs])
        reduced, pivots = augmented.rref()
        if any(p >= self.ncols for p in pivots):
            return None
        solution = [[self.field.zero] * rhs.ncols for _ in range(self.ncols)]
        for i, p in enumerate(pivots):
            for j in range(rhs.ncols):
                solution[p][j] = reduced.rows[i][self.ncols + j]
        return ExactMatrix._trusted(self.field, tuple(tuple(row) for row in solution), self.ncols, rhs.ncols)

    def inverse(self) -> ExactMatrix:
        if self.nrows != self.ncols:
            raise ShapeMismatch(f"cannot invert a {self.shape} matrix")
        solution = self.solve(ExactMatrix.identity(self.field, self.nrows))
        if solution is None:
            raise ValueError("matrix is not invertible")
        return solution

    def left_inverse(self) -> ExactMatrix:
        """L with L @ self == I for a matrix of full column rank."""
        _, pivot_rows = self.transpose().rref()
        if len(pivot_rows) != self.ncols:
            raise ValueError("matrix does not have full column rank")
        square = self.submatrix(pivot_rows, range(self.ncols)).inverse()
        entries = {}
        for k, row in enumerate(pivot_rows):
            for i in range(self.ncols):
                entries[(i, row)] = square.rows[i][k]
        return ExactMatrix.from_entries(self.field, self.ncols, self.nrows, entries)

    def to_strings(self) -> list[list[str]]:
        return [[format_scalar(self.field, value) for value in row] for row in self.rows]

    @classmethod
    def from_strings(cls, field: Domain, rows: Iterable[Iterable[Any]], nrows: int, ncols: int) -> ExactMatrix:
        return cls(field, [[parse_scalar(field, value) for value in row] for row in rows], nrows, ncols)


def hstack(field: Domain, matrices: Sequence[ExactMatrix]) -> ExactMatrix:
    if not matrices:
        return ExactMatrix.zeros(field, 0, 0)
    nrows = matrices[0].nrows
    if any(matrix.nrows != nrows for matrix in matrices):
        raise ShapeMismatch("hstack needs equal row counts")
    rows = tuple(tuple(value for matrix in matrices for value in matrix.rows[i]) for i in range(nrows))
    return ExactMatrix._trusted(field, rows, nrows, sum(matrix.ncols for matrix in matrices))


def vstack(field: Domain, matrices: Sequence[ExactMatrix]) -> ExactMatrix:
    if not matrices:
        return ExactMatrix.zeros(field, 0, 0)
    ncols = matrices[0].ncols
    if any(matrix.ncols != ncols for matrix in matrices):
        raise ShapeMismatch("vstack needs equal column counts")
    rows = tuple(row for matrix in matrices for row in matrix.rows)
    return ExactMatrix._trusted(field, rows, sum(matrix.nrows for matrix in matrices), ncols)


def block_diagonal(field: Domain, matrices: Sequence[ExactMatrix]) -> ExactMatrix:
    nrows = sum(matrix.nrows for matrix in matrices)
    ncols = sum(matrix.ncols for matrix in matrices)
    entries = {}
    row_offset = col_offset = 0
    for matrix in matrices:
        for i, row in enumerate(matrix.rows):
            for j, value in enumerate(row):
                entries[(row_offset + i, col_offset + j)] = value
        row_offset += matrix.nrows
        col_offset += matrix.ncols
    return ExactMatrix.from_entries(field, nrows, ncols, entries)


def unit_vector(field: Domain, size: int, index: int) -> ExactMatrix:
    return ExactMatrix.from_entries(field, size, 1, {(index, 0): field.one})


def quotient_projection(subspace: ExactMatrix, dimension: int) -> tuple[ExactMatrix, ExactMatrix]:
    """Projection V -> V/S and a section picking standard complement vectors.

    The section spans the standard basis vectors at the non-pivot positions of
    the reduced spanning set of S, so projection @ section is the identity and
    the projection kills S.
    """
    field = subspace.field
    reduced, pivots = subspace.transpose().rref()
    pivot_set = set(pivots)
    complement = [j for j in range(dimension) if j not in pivot_set]
    position = {j: k for k, j in enumerate(complement)}
    entries = {}
    for j in complement:
        entries[(position[j], j)] = field.one
    for i, p in enumerate(pivots):
        for j in complement:
            value = reduced.rows[i][j]
            if value != field.zero:
                entries[(position[j], p)] = -value
    projection = ExactMatrix.from_entries(field, len(complement), dimension, entries)
    section = ExactMatrix.from_entries(field, dimension, len(complement), {(j, position[j]): field.one for j in complement})
    return projection, section


def section_positions(section: ExactMatrix) -> list[int]:
    """Row index of the single nonzero entry in each column of a section."""
    zero = section.field.zero
    return [next(i for i in range(section.nrows) if section.rows[i][j] != zero) for j in range(section.ncols)]


def span_rank(field: Domain, vectors: Sequence[ExactMatrix], dimension: int) -> int:
    if not vectors:
        return 0
    return hstack(field, list(vectors)).rank()


def in_span(spanning: ExactMatrix, vector: ExactMatrix) -> bool:
    if vector.is_zero():
        return True
    if spanning.ncols == 0:
        return False
    return spanning.solve(vector) is not None
