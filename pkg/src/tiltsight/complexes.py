from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Any, Iterable

from sympy.polys.domains.domain import Domain

from tiltsight.matrices import ExactMatrix, block_diagonal, hstack, quotient_projection, vstack


TRUNCATION_MODES = ("<=0", ">-d")


class NotClosed(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """A computed result contradicts a statement the engine relies on."""


@dataclass(frozen=True)
class Cohomology:
    """H = Z / B with cocycle representatives and a projector onto H."""

    dimension: int
    ambient: int
    representatives: ExactMatrix
    projector: ExactMatrix
    cocycles: ExactMatrix

    def classify(self, vectors: ExactMatrix) -> ExactMatrix:
        """Coordinates in H of cocycle columns."""
        return self.projector @ vectors

    def is_cocycle(self, vectors: ExactMatrix) -> bool:
        if vectors.is_zero():
            return True
        if self.cocycles.ncols == 0:
            return False
        return self.cocycles.solve(vectors) is not None


def cohomology_of(field: Domain, outgoing: ExactMatrix, incoming: ExactMatrix, ambient: int) -> Cohomology:
    """Cohomology at a spot with differential `outgoing` and image of `incoming`."""
    cocycles = outgoing.kernel_basis() if outgoing.nrows else ExactMatrix.identity(field, ambient)
    inverse = cocycles.left_inverse() if cocycles.ncols else ExactMatrix.zeros(field, 0, ambient)
    boundaries = inverse @ incoming
    span = boundaries.column_basis() if boundaries.ncols else ExactMatrix.zeros(field, cocycles.ncols, 0)
    projection, section = quotient_projection(span, cocycles.ncols)
    return Cohomology(
        dimension=projection.nrows,
        ambient=ambient,
        representatives=cocycles @ section,
        projector=projection @ inverse,
        cocycles=cocycles,
    )


@dataclass
class CochainComplex:
    """Finitely supported complex of vector spaces, differentials raise degree by one."""

    field: Domain
    dims: dict[int, int]
    differentials: dict[int, ExactMatrix] = dataclass_field(default_factory=dict)
    validate: bool = True

    def __post_init__(self) -> None:
        self.dims = {degree: size for degree, size in self.dims.items() if size}
        self.differentials = {
            degree: matrix
            for degree, matrix in self.differentials.items()
            if matrix.nrows and matrix.ncols and not matrix.is_zero()
        }
        for degree, matrix in self.differentials.items():
            if matrix.shape != (self.dim(degree + 1), self.dim(degree)):
                raise ValueError(f"differential in degree {degree} has shape {matrix.shape}")
        if self.validate:
            for degree in self.differentials:
                if degree + 1 in self.differentials and not (self.differentials[degree + 1] @ self.differentials[degree]).is_zero():
                    raise ValueError(f"d∘d is nonzero at degree {degree}")

    def dim(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    def d(self, degree: int) -> ExactMatrix:
        matrix = self.differentials.get(degree)
        if matrix is None:
            return ExactMatrix.zeros(self.field, self.dim(degree + 1), self.dim(degree))
        return matrix

    def support(self) -> list[int]:
        return sorted(self.dims)

    def is_zero(self) -> bool:
        return not self.dims

    def cohomology(self, degree: int) -> Cohomology:
        return cohomology_of(self.field, self.d(degree), self.d(degree - 1), self.dim(degree))

    def cohomology_dims(self) -> dict[int, int]:
        dims = {}
        for degree in self.support():
            size = self.cohomology(degree).dimension
            if size:
                dims[degree] = size
        return dims

    def is_acyclic(self) -> bool:
        return not self.cohomology_dims()

    def shift(self, k: int) -> CochainComplex:
        sign = -1 if k % 2 else 1
        return CochainComplex(
            self.field,
            {degree - k: size for degree, size in self.dims.items()},
            {degree - k: matrix.scale(sign) for degree, matrix in self.differentials.items()},
            validate=False,
        )

    def truncate(self, mode: str, d: int | None = None) -> CochainComplex:
        if mode == "<=0":
            return truncate_below(self).source
        if mode == ">-d":
            if d is None:
                raise ValueError("truncation '>-d' needs d")
            return truncate_above(self, d)[0].target
        raise ValueError(f"unknown truncation mode {mode!r}; expected one of {TRUNCATION_MODES}")

    def to_json(self) -> dict[str, Any]:
        return {
            "dims": {str(degree): size for degree, size in sorted(self.dims.items())},
            "differentials": {str(degree): matrix.to_strings() for degree, matrix in sorted(self.differentials.items())},
        }

    @classmethod
    def from_json(cls, field: Domain, payload: dict[str, Any]) -> CochainComplex:
        dims = {int(degree): int(size) for degree, size in payload.get("dims", {}).items()}
        differentials = {
            int(degree): ExactMatrix.from_strings(field, rows, dims.get(int(degree) + 1, 0), dims.get(int(degree), 0))
            for degree, rows in payload.get("differentials", {}).items()
        }
        return cls(field, dims, differentials)


def direct_sum(complexes: Iterable[CochainComplex]) -> CochainComplex:
    complexes = list(complexes)
    field = complexes[0].field
    degrees = sorted({degree for complex_ in complexes for degree in complex_.dims})
    dims = {degree: sum(complex_.dim(degree) for complex_ in complexes) for degree in degrees}
    differentials = {}
    for degree in degrees:
        blocks = [complex_.d(degree) for complex_ in complexes]
        differentials[degree] = block_diagonal(field, blocks)
    return CochainComplex(field, dims, differentials, validate=False)


@dataclass
class ChainMap:
    source: CochainComplex
    target: CochainComplex
    blocks: dict[int, ExactMatrix]
    degree: int = 0

    def block(self, degree: int) -> ExactMatrix:
        matrix = self.blocks.get(degree)
        if matrix is None:
            return ExactMatrix.zeros(self.source.field, self.target.dim(degree + self.degree), self.source.dim(degree))
        return matrix

    def is_closed(self) -> bool:
        sign = -1 if self.degree % 2 else 1
        for degree in sorted(set(self.source.dims) | {degree - 1 for degree in self.source.dims}):
            left = self.target.d(degree + self.degree) @ self.block(degree)
            right = self.block(degree + 1) @ self.source.d(degree)
            if not (left - right.scale(sign)).is_zero():
                return False
        return True

    def compose(self, first: ChainMap) -> ChainMap:
        """self ∘ first."""
        blocks = {}
        for degree in first.source.support():
            blocks[degree] = self.block(degree + first.degree) @ first.block(degree)
        return ChainMap(first.source, self.target, blocks, first.degree + self.degree)

    def on_cohomology(self, degree: int) -> ExactMatrix:
        """Matrix of H^degree(source) -> H^{degree + self.degree}(target)."""
        source = self.source.cohomology(degree)
        target = self.target.cohomology(degree + self.degree)
        return target.classify(self.block(degree) @ source.representatives)


def identity_map(complex_: CochainComplex) -> ChainMap:
    blocks = {degree: ExactMatrix.identity(complex_.field, size) for degree, size in complex_.dims.items()}
    return ChainMap(complex_, complex_, blocks)


def zero_map(source: CochainComplex, target: CochainComplex) -> ChainMap:
    return ChainMap(source, target, {})


def cone(f: ChainMap) -> CochainComplex:
    """Cone(f)^i = X^{i+1} ⊕ Y^i with d = [[-d_X, 0], [f, d_Y]]."""
    if f.degree != 0 or not f.is_closed():
        raise NotClosed("cone needs a closed degree-0 chain map")
    source, target = f.source, f.target
    field = source.field
    degrees = sorted({degree - 1 for degree in source.dims} | set(target.dims))
    dims = {degree: source.dim(degree + 1) + target.dim(degree) for degree in degrees}
    differentials = {}
    for degree in degrees:
        upper = hstack(field, [-source.d(degree + 1), ExactMatrix.zeros(field, source.dim(degree + 2), target.dim(degree))])
        lower = hstack(field, [f.block(degree + 1), target.d(degree)])
        differentials[degree] = vstack(field, [upper, lower])
    return CochainComplex(field, dims, differentials)


def cocone(f: ChainMap) -> CochainComplex:
    return cone(f).shift(-1)


def truncate_below(complex_: CochainComplex) -> ChainMap:
    """τ^{≤0} as the inclusion of the truncation into the complex."""
    field = complex_.field
    kernel = complex_.d(0).kernel_basis() if complex_.dim(0) else ExactMatrix.zeros(field, 0, 0)
    dims = {degree: size for degree, size in complex_.dims.items() if degree < 0}
    dims[0] = kernel.ncols
    differentials = {degree: matrix for degree, matrix in complex_.differentials.items() if degree < -1}
    if kernel.ncols:
        differentials[-1] = kernel.left_inverse() @ complex_.d(-1)
    truncated = CochainComplex(field, dims, differentials)
    blocks = {degree: ExactMatrix.identity(field, size) for degree, size in truncated.dims.items() if degree < 0}
    blocks[0] = kernel
    return ChainMap(truncated, complex_, blocks)


def truncate_above(complex_: CochainComplex, d: int) -> tuple[ChainMap, ChainMap]:
    """τ^{>-d}: returns (projection onto the truncation, its section in degree -d+1)."""
    field = complex_.field
    bottom = -d + 1
    image = complex_.d(bottom - 1).column_basis()
    projection, section = quotient_projection(image, complex_.dim(bottom))
    dims = {degree: size for degree, size in complex_.dims.items() if degree > bottom}
    dims[bottom] = projection.nrows
    differentials = {degree: matrix for degree, matrix in complex_.differentials.items() if degree > bottom}
    differentials[bottom] = complex_.d(bottom) @ section
    truncated = CochainComplex(field, dims, differentials)
    blocks = {degree: ExactMatrix.identity(field, size) for degree, size in truncated.dims.items() if degree > bottom}
    blocks[bottom] = projection
    section_blocks = dict(blocks)
    section_blocks[bottom] = section
    return ChainMap(complex_, truncated, blocks), ChainMap(truncated, complex_, section_blocks)


def is_quasi_iso(f: ChainMap, degrees: Iterable[int] | None = None) -> bool:
    if f.degree != 0:
        return False
    if degrees is None:
        degrees = sorted(set(f.source.dims) | set(f.target.dims))
    for degree in degrees:
        induced = f.on_cohomology(degree)
        if induced.nrows != induced.ncols or induced.rank() != induced.nrows:
            return False
    return True
