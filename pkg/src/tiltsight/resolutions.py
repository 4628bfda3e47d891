"""Semi-free resolutions and derived Hom for finite-dimensional DG-modules.

A resolution is grown top-down: at degree j every class of H^j(Cone(P -> M))
that is not a degree-0 multiple of another is killed by a new generator. The
construction stops after degree -depth, so Hom(P, N) agrees with RHom(M, N)
only in degrees up to min(N) + depth - 1; `rhom` refuses anything deeper.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Iterable

from sympy import Poly, Symbol
from sympy.polys.matrices import DomainMatrix

from tiltsight.complexes import CochainComplex, Cohomology, InvariantViolation
from tiltsight.dgmodules import Block, DGModule, ModuleMap, cone_module
from tiltsight.matrices import ExactMatrix, block_diagonal, hstack, quotient_projection, span_rank, vstack
from tiltsight.quivers import FinDimGradedAlgebra
from tiltsight.scalars import field_elements, random_scalar


DEPTH_MARGIN = 2
MAX_ROUNDS = 16
ENUMERATION_LIMIT = 4096
RANDOM_ATTEMPTS = 12

Attachment = dict[tuple[int, int], Any]


class WindowTooDeep(ValueError):
    pass


class ResolutionStalled(InvariantViolation):
    pass


def default_depth(d: int) -> int:
    return d + DEPTH_MARGIN


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def idempotent_index(algebra: FinDimGradedAlgebra, vertex: int) -> int:
    return next(b for b in algebra.idempotents if algebra.basis[b].left == vertex)


@dataclass(frozen=True)
class Generator:
    degree: int
    vertex: int


@dataclass
class SemiFreeModule:
    """Free on `generators`; generator g sits in degree g.degree at g.vertex and d(g) = attachments[g]."""

    module: DGModule
    generators: list[Generator]
    attachments: list[Attachment]
    cells: dict[Block, list[tuple[int, int]]]
    comparison: ModuleMap | None = None
    depth: int | None = None

    def __post_init__(self) -> None:
        self._rows = {cell: (block, row) for block, members in self.cells.items() for row, cell in enumerate(members)}

    @property
    def algebra(self) -> FinDimGradedAlgebra:
        return self.module.algebra

    def row_of(self, generator: int, basis_index: int) -> tuple[Block, int]:
        return self._rows[(generator, basis_index)]

    def generator_row(self, generator: int) -> tuple[Block, int]:
        return self.row_of(generator, idempotent_index(self.algebra, self.generators[generator].vertex))

    def generator_degrees(self) -> list[int]:
        return sorted({generator.degree for generator in self.generators}, reverse=True)

    def extend_map(self, target: DGModule, degree: int, values: list[ExactMatrix]) -> ModuleMap:
        """The Λ-linear map of the given degree sending generator g to values[g]."""
        field = self.algebra.field
        blocks = {}
        for (i, w), members in self.cells.items():
            columns = []
            for g, c in members:
                generator = self.generators[g]
                columns.append(target.act(c, generator.degree + degree) @ values[g])
            blocks[(i, w)] = hstack(field, columns) if columns else ExactMatrix.zeros(field, target.dim((i + degree, w)), 0)
        return ModuleMap(self.module, target, degree, blocks)

    def values_of(self, f: ModuleMap) -> list[ExactMatrix]:
        values = []
        for g in range(len(self.generators)):
            block, row = self.generator_row(g)
            matrix = f.block(block)
            values.append(matrix.submatrix(range(matrix.nrows), [row]))
        return values

    def restrict(self, keep: Iterable[int]) -> SemiFreeModule:
        """Generators in `keep`; attachment terms on dropped generators are discarded."""
        keep = sorted(keep)
        index = {old: new for new, old in enumerate(keep)}
        attachments = [
            {(index[h], c): value for (h, c), value in self.attachments[g].items() if h in index}
            for g in keep
        ]
        return assemble(self.algebra, [self.generators[g] for g in keep], attachments)


def assemble(algebra: FinDimGradedAlgebra, generators: list[Generator], attachments: list[Attachment]) -> SemiFreeModule:
    field = algebra.field
    zero = field.zero
    cells: dict[Block, list[tuple[int, int]]] = {}
    for g, generator in enumerate(generators):
        for c in algebra.indices(left=generator.vertex):
            element = algebra.basis[c]
            cells.setdefault((generator.degree + element.degree, element.right), []).append((g, c))
    rows = {cell: row for members in cells.values() for row, cell in enumerate(members)}
    dims = {block: len(members) for block, members in cells.items()}

    differential = {}
    for (i, v), members in cells.items():
        entries: dict[tuple[int, int], Any] = {}
        for column, (g, c) in enumerate(members):
            image: dict[tuple[int, int], Any] = {}
            for (h, c1), coefficient in attachments[g].items():
                for k, value in algebra.product(c1, c).items():
                    image[(h, k)] = image.get((h, k), zero) + coefficient * value
            sign = field.convert(_sign(generators[g].degree))
            for k, value in algebra.d(c).items():
                image[(g, k)] = image.get((g, k), zero) + sign * value
            for cell, value in image.items():
                if value != zero:
                    entries[(rows[cell], column)] = value
        differential[(i, v)] = ExactMatrix.from_entries(field, dims.get((i + 1, v), 0), len(members), entries)

    action = {}
    for b, element in enumerate(algebra.basis):
        if element.is_idempotent:
            continue
        for (i, u), members in cells.items():
            if u != element.left:
                continue
            entries = {}
            for column, (g, c) in enumerate(members):
                for k, value in algebra.product(c, b).items():
                    key = (rows[(g, k)], column)
                    entries[key] = entries.get(key, zero) + value
            action[(b, i)] = ExactMatrix.from_entries(field, dims.get((i + element.degree, element.right), 0), len(members), entries)

    module = DGModule(algebra, dims, differential, action)
    return SemiFreeModule(module, list(generators), [dict(attachment) for attachment in attachments], cells)


def free_module(algebra: FinDimGradedAlgebra, vertex: int, degree: int = 0) -> SemiFreeModule:
    """e_vΛ with its generator in `degree`."""
    return assemble(algebra, [Generator(degree, vertex)], [{}])


def regular_module(algebra: FinDimGradedAlgebra) -> SemiFreeModule:
    return assemble(algebra, [Generator(0, v) for v in range(len(algebra.vertices))], [{} for _ in algebra.vertices])


def top_representatives(module: DGModule, block: Block) -> ExactMatrix:
    """Cocycles in `block` spanning H modulo degree-0 radical multiples from other components."""
    j, v = block
    field = module.field
    space = module.cohomology(block)
    if not space.dimension:
        return ExactMatrix.zeros(field, module.dim(block), 0)
    images = []
    for b, element in enumerate(module.algebra.basis):
        if element.is_idempotent or element.degree != 0 or element.right != v:
            continue
        source = module.cohomology((j, element.left))
        if source.dimension:
            images.append(space.classify(module.act(b, j) @ source.representatives))
    span = hstack(field, images).column_basis() if images else ExactMatrix.zeros(field, space.dimension, 0)
    _, section = quotient_projection(span, space.dimension)
    return space.representatives @ section


def semifree_resolution(module: DGModule, depth: int, vertex_order: Iterable[int] | None = None) -> SemiFreeModule:
    """Resolve down to generators of degree -depth; the comparison map P -> M is attached."""
    algebra = module.algebra
    field = algebra.field
    order = list(vertex_order) if vertex_order is not None else list(module.vertices)
    generators: list[Generator] = []
    attachments: list[Attachment] = []
    images: list[ExactMatrix] = []
    top = max(module.degrees(), default=0)
    for j in range(top, -depth - 1, -1):
        for _ in range(MAX_ROUNDS):
            current = assemble(algebra, generators, attachments)
            cone = cone_module(current.extend_map(module, 0, images))
            added = False
            for v in order:
                representatives = top_representatives(cone, (j, v))
                upper = current.module.dim((j + 1, v))
                members = current.cells.get((j + 1, v), [])
                for column in representatives.columns():
                    attachments.append({members[r]: column[r] for r in range(upper) if column[r] != field.zero})
                    images.append(ExactMatrix(field, [[-value] for value in column[upper:]], module.dim((j, v)), 1))
                    generators.append(Generator(j, v))
                    added = True
            if not added:
                break
        else:
            raise ResolutionStalled(f"cohomology of the cone in degree {j} did not die after {MAX_ROUNDS} rounds")
    resolution = assemble(algebra, generators, attachments)
    resolution.comparison = resolution.extend_map(module, 0, images)
    resolution.depth = depth
    return resolution


@dataclass
class FreeHomComplex:
    """Hom(P, N) for semi-free P, coordinatized by the values on generators."""

    resolution: SemiFreeModule
    target: DGModule
    offsets: dict[int, list[int]]
    complex: CochainComplex

    def size(self, generator: int, degree: int) -> int:
        entry = self.resolution.generators[generator]
        return self.target.dim((entry.degree + degree, entry.vertex))

    def values(self, degree: int, vector: ExactMatrix) -> list[ExactMatrix]:
        values = []
        for g, offset in enumerate(self.offsets[degree]):
            rows = range(offset, offset + self.size(g, degree))
            values.append(vector.submatrix(rows, [0]))
        return values

    def to_map(self, degree: int, vector: ExactMatrix) -> ModuleMap:
        return self.resolution.extend_map(self.target, degree, self.values(degree, vector))

    def vector_of(self, f: ModuleMap) -> ExactMatrix:
        field = self.target.field
        values = self.resolution.values_of(f)
        return vstack(field, values) if values else ExactMatrix.zeros(field, 0, 1)

    def space(self, degree: int) -> Cohomology:
        return self.complex.cohomology(degree)


def hom_from_semifree(resolution: SemiFreeModule, target: DGModule, degrees: Iterable[int]) -> FreeHomComplex:
    """(δf)(g) = d_N f(g) - (-1)^k f(dg), with f(h·c) = f(h)·c."""
    field = target.field
    generators = resolution.generators
    wanted = sorted({k + shift for k in degrees for shift in (-1, 0, 1)})
    offsets: dict[int, list[int]] = {}
    dims = {}
    for k in wanted:
        running, starts = 0, []
        for entry in generators:
            starts.append(running)
            running += target.dim((entry.degree + k, entry.vertex))
        offsets[k] = starts
        dims[k] = running
    differentials = {}
    for k in wanted:
        if k + 1 not in offsets or not dims[k] or not dims[k + 1]:
            continue
        entries: dict[tuple[int, int], Any] = {}

        def place(matrix: ExactMatrix, row: int, column: int, factor: Any) -> None:
            for i, values in enumerate(matrix.rows):
                for j, value in enumerate(values):
                    if value != field.zero:
                        key = (row + i, column + j)
                        entries[key] = entries.get(key, field.zero) + factor * value

        for g, entry in enumerate(generators):
            place(target.d((entry.degree + k, entry.vertex)), offsets[k + 1][g], offsets[k][g], field.one)
            for (h, c), coefficient in resolution.attachments[g].items():
                factor = field.convert(-_sign(k)) * coefficient
                place(target.act(c, generators[h].degree + k), offsets[k + 1][g], offsets[k][h], factor)
        differentials[k] = ExactMatrix.from_entries(field, dims[k + 1], dims[k], entries)
    return FreeHomComplex(resolution, target, offsets, CochainComplex(field, dims, differentials, validate=False))


@dataclass
class DerivedHom:
    source: DGModule
    target: DGModule
    resolution: SemiFreeModule
    homs: FreeHomComplex
    window: tuple[int, int]
    depth: int

    def dimension(self, degree: int) -> int:
        return self.homs.space(degree).dimension

    def dims(self) -> dict[int, int]:
        low, high = self.window
        return {k: self.dimension(k) for k in range(low, high + 1)}

    def basis(self, degree: int = 0) -> list[ExactMatrix]:
        representatives = self.homs.space(degree).representatives
        return [representatives.submatrix(range(representatives.nrows), [c]) for c in range(representatives.ncols)]

    def classify(self, vector: ExactMatrix, degree: int = 0) -> ExactMatrix:
        return self.homs.space(degree).classify(vector)

    def combination(self, coefficients: Iterable[Any], degree: int = 0) -> ExactMatrix:
        field = self.target.field
        total = ExactMatrix.zeros(field, self.homs.complex.dim(degree), 1)
        for coefficient, vector in zip(coefficients, self.basis(degree)):
            total = total + vector.scale(coefficient)
        return total

    def map_of(self, vector: ExactMatrix, degree: int = 0) -> ModuleMap:
        return self.homs.to_map(degree, vector)

    def to_json(self) -> dict[str, Any]:
        return {"depth": self.depth, "window": list(self.window), "dims": {str(k): size for k, size in self.dims().items()}}


def rhom(
    source: DGModule,
    target: DGModule,
    d: int,
    window: tuple[int, int] | None = None,
    depth: int | None = None,
    resolution: SemiFreeModule | None = None,
) -> DerivedHom:
    """H^k RHom(source, target) for k in the window, default (-d, 0]."""
    window = window or (-d + 1, 0)
    if resolution is not None:
        depth = resolution.depth
    depth = default_depth(d) if depth is None else depth
    bound = min(target.degrees(), default=0) + depth - 1
    if window[1] > bound:
        raise WindowTooDeep(f"a resolution of depth {depth} only certifies degrees <= {bound}; raise --depth")
    if resolution is None:
        resolution = semifree_resolution(source, depth)
    homs = hom_from_semifree(resolution, target, range(window[0], window[1] + 1))
    return DerivedHom(source, target, resolution, homs, window, depth)


def lift_through(source: SemiFreeModule, f: ExactMatrix, target: SemiFreeModule) -> ModuleMap:
    """A closed F: P -> Q with comparison ∘ F homotopic to f, where f lives in Hom^0(P, N) and Q resolves N."""
    comparison = target.comparison
    if comparison is None:
        raise ValueError("lifting needs a resolution with its comparison map")
    field = target.algebra.field
    into_resolution = hom_from_semifree(source, target.module, [0])
    into_module = hom_from_semifree(source, comparison.target, [0])
    cycles = into_resolution.complex.d(0)
    homotopies = into_module.complex.d(-1)
    transfer = block_diagonal(
        field,
        [comparison.block((entry.degree, entry.vertex)) for entry in source.generators],
    )
    system = ExactMatrix.block(
        field,
        [
            [cycles, ExactMatrix.zeros(field, cycles.nrows, homotopies.ncols)],
            [transfer, -homotopies],
        ],
    )
    rhs = vstack(field, [ExactMatrix.zeros(field, cycles.nrows, 1), f])
    solution = system.solve(rhs)
    if solution is None:
        raise InvariantViolation("map does not lift through the resolution; the resolutions are too shallow")
    lifted = solution.submatrix(range(cycles.ncols), [0])
    return into_resolution.to_map(0, lifted)


def compose_derived(first: DerivedHom, f: ExactMatrix, second: DerivedHom, g: ExactMatrix) -> ExactMatrix:
    """g ∘ f as a cocycle of Hom^0(P_first.source, second.target)."""
    lifted = lift_through(first.resolution, f, second.resolution)
    composite = second.map_of(g).compose(lifted)
    field = first.target.field
    values = first.resolution.values_of(composite)
    return vstack(field, values) if values else ExactMatrix.zeros(field, 0, 1)


@dataclass
class EndomorphismAlgebra:
    hom: DerivedHom
    structure: list[list[ExactMatrix]]
    identity: ExactMatrix

    @property
    def dimension(self) -> int:
        return len(self.structure)

    def left_multiplication(self, x: ExactMatrix) -> ExactMatrix:
        """Matrix of y -> x ∘ y."""
        field = self.identity.field
        columns = []
        for j in range(self.dimension):
            column = ExactMatrix.zeros(field, self.dimension, 1)
            for i in range(self.dimension):
                if x.rows[i][0] != field.zero:
                    column = column + self.structure[i][j].scale(x.rows[i][0])
            columns.append(column)
        return hstack(field, columns) if columns else ExactMatrix.zeros(field, 0, 0)


def endomorphism_algebra(module: DGModule, d: int, depth: int | None = None, resolution: SemiFreeModule | None = None) -> EndomorphismAlgebra:
    hom = rhom(module, module, d, window=(0, 0), depth=depth, resolution=resolution)
    basis = hom.basis(0)
    structure = [[hom.classify(compose_derived(hom, right, hom, left)) for right in basis] for left in basis]
    identity = hom.classify(hom.homs.vector_of(hom.resolution.comparison))
    return EndomorphismAlgebra(hom, structure, identity)


def _is_nilpotent(matrix: ExactMatrix) -> bool:
    power = matrix
    for _ in range(matrix.nrows):
        if power.is_zero():
            return True
        power = power @ matrix
    return power.is_zero()


def is_local(algebra: EndomorphismAlgebra) -> bool:
    """Split local: A = k·1 ⊕ rad A with rad A nilpotent.

    Each basis element b must act by a single eigenvalue λ in k, and the
    elements b - λ·1 must span a nilpotent subalgebra, which is then the radical.
    A local algebra whose residue field is larger than k reports False.
    """
    size = algebra.dimension
    if not size:
        return False
    field = algebra.identity.field
    radical = []
    for index in range(size):
        unit = _unit(field, size, index)
        eigenvalue = _single_eigenvalue(algebra.left_multiplication(unit))
        if eigenvalue is None:
            return False
        radical.append(unit - algebra.identity.scale(eigenvalue))
    return _is_nilpotent_subalgebra(algebra, radical)


def _single_eigenvalue(matrix: ExactMatrix) -> Any | None:
    field = matrix.field
    coefficients = DomainMatrix([list(row) for row in matrix.rows], matrix.shape, field).charpoly()
    polynomial = Poly.from_list([field.to_sympy(c) for c in coefficients], Symbol("t"), domain=field)
    _, factors = polynomial.factor_list()
    if len(factors) != 1 or factors[0][0].degree() != 1:
        return None
    lead, constant = factors[0][0].all_coeffs()
    return field.quo(field.from_sympy(-constant), field.from_sympy(lead))


def _is_nilpotent_subalgebra(algebra: EndomorphismAlgebra, vectors: list[ExactMatrix]) -> bool:
    field = algebra.identity.field
    size = algebra.dimension
    span = hstack(field, vectors).column_basis()
    squares = [algebra.left_multiplication(x) @ y for x in vectors for y in vectors]
    if span_rank(field, [span, *squares], size) != span.ncols:
        return False
    power = span
    for _ in range(size + 1):
        if not power.ncols:
            return True
        columns = [ExactMatrix(field, [[value] for value in column], size, 1) for column in power.columns()]
        products = [algebra.left_multiplication(x) @ y for x in columns for y in vectors]
        power = hstack(field, products).column_basis()
    return False


def _unit(field: Any, size: int, index: int) -> ExactMatrix:
    return ExactMatrix.from_entries(field, size, 1, {(index, 0): field.one})


def is_indecomposable(module: DGModule, d: int, depth: int | None = None) -> bool:
    if module.is_acyclic():
        return False
    return is_local(endomorphism_algebra(module, d, depth))


def coefficient_stream(field: Any, size: int, seed: int) -> Iterable[tuple[Any, ...]]:
    if not field.is_QQ:
        elements = field_elements(field)
        if len(elements) ** size <= ENUMERATION_LIMIT:
            yield from itertools.product(elements, repeat=size)
            return
    rng = random.Random(seed)
    for _ in range(RANDOM_ATTEMPTS if field.is_QQ else ENUMERATION_LIMIT):
        yield tuple(random_scalar(field, rng) for _ in range(size))


def find_quasi_isomorphism(source: DGModule, target: DGModule, d: int, depth: int | None = None, seed: int = 0) -> ModuleMap | None:
    """A closed P_source -> target inducing isomorphisms on every H^i(e_v) above the resolution floor."""
    if source.cohomology_dims() != target.cohomology_dims():
        return None
    hom = rhom(source, target, d, window=(0, 0), depth=depth)
    floor = -hom.depth
    basis = hom.basis(0)
    if not basis:
        candidate = hom.map_of(ExactMatrix.zeros(target.field, hom.homs.complex.dim(0), 1))
        return candidate if candidate.is_quasi_iso(above=floor) else None
    for coefficients in coefficient_stream(target.field, len(basis), seed):
        candidate = hom.map_of(hom.combination(coefficients))
        if candidate.is_quasi_iso(above=floor):
            return candidate
    return None


def derived_isomorphic(source: DGModule, target: DGModule, d: int, depth: int | None = None) -> bool:
    return find_quasi_isomorphism(source, target, d, depth) is not None
