"""Right DG-modules over a finite-dimensional graded algebra.

A module is stored through its idempotent components: block (i, v) is M^i e_v.
A basis element b with left vertex u and right vertex w acts from block (i, u)
to block (i + |b|, w), so x·b is defined for x in M e_u. Graded maps between
right modules commute with the action without signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Any, Iterable

from tiltsight.complexes import CochainComplex, Cohomology
from tiltsight.matrices import ExactMatrix, block_diagonal, hstack, quotient_projection, vstack
from tiltsight.quivers import FinDimGradedAlgebra


Block = tuple[int, int]


class ModuleError(ValueError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass
class DGModule:
    algebra: FinDimGradedAlgebra
    dims: dict[Block, int]
    differential: dict[Block, ExactMatrix] = dataclass_field(default_factory=dict)
    action: dict[tuple[int, int], ExactMatrix] = dataclass_field(default_factory=dict)

    def __post_init__(self) -> None:
        self.dims = {key: size for key, size in self.dims.items() if size}
        self.differential = {key: m for key, m in self.differential.items() if m.nrows and m.ncols and not m.is_zero()}
        self.action = {key: m for key, m in self.action.items() if m.nrows and m.ncols and not m.is_zero()}
        for (i, v), matrix in self.differential.items():
            if matrix.shape != (self.dim((i + 1, v)), self.dim((i, v))):
                raise ModuleError(f"differential at {(i, v)} has shape {matrix.shape}")
        for (b, i), matrix in self.action.items():
            element = self.algebra.basis[b]
            expected = (self.dim((i + element.degree, element.right)), self.dim((i, element.left)))
            if matrix.shape != expected:
                raise ModuleError(f"action of {element.label} on degree {i} has shape {matrix.shape}, expected {expected}")

    @property
    def field(self) -> Any:
        return self.algebra.field

    @property
    def vertices(self) -> range:
        return range(len(self.algebra.vertices))

    def dim(self, block: Block) -> int:
        return self.dims.get(block, 0)

    def degrees(self) -> list[int]:
        return sorted({i for i, _ in self.dims})

    def total_dimension(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return not self.dims

    def d(self, block: Block) -> ExactMatrix:
        matrix = self.differential.get(block)
        if matrix is None:
            i, v = block
            return ExactMatrix.zeros(self.field, self.dim((i + 1, v)), self.dim(block))
        return matrix

    def act(self, b: int, degree: int) -> ExactMatrix:
        element = self.algebra.basis[b]
        if element.is_idempotent:
            return ExactMatrix.identity(self.field, self.dim((degree, element.left)))
        matrix = self.action.get((b, degree))
        if matrix is None:
            return ExactMatrix.zeros(self.field, self.dim((degree + element.degree, element.right)), self.dim((degree, element.left)))
        return matrix

    def at_vertex(self, v: int) -> CochainComplex:
        dims = {i: size for (i, w), size in self.dims.items() if w == v}
        differentials = {i: matrix for (i, w), matrix in self.differential.items() if w == v}
        return CochainComplex(self.field, dims, differentials, validate=False)

    def cohomology(self, block: Block) -> Cohomology:
        i, v = block
        return self.at_vertex(v).cohomology(i)

    def cohomology_dims(self) -> dict[Block, int]:
        dims = {}
        for v in self.vertices:
            for i, size in self.at_vertex(v).cohomology_dims().items():
                dims[(i, v)] = size
        return dict(sorted(dims.items()))

    def is_acyclic(self) -> bool:
        return not self.cohomology_dims()

    def in_dem(self, d: int) -> bool:
        """H^i = 0 outside -d < i <= 0."""
        return all(-d < i <= 0 for i, _ in self.cohomology_dims())

    def failures(self) -> list[str]:
        problems = []
        algebra = self.algebra
        for (i, v) in self.dims:
            if not (self.d((i + 1, v)) @ self.d((i, v))).is_zero():
                problems.append(f"d∘d != 0 at {(i, v)}")
        moving = [b for b, element in enumerate(algebra.basis) if not element.is_idempotent]
        for b in moving:
            element = algebra.basis[b]
            for i in self.degrees():
                if not self.dim((i, element.left)):
                    continue
                left = self.d((i + element.degree, element.right)) @ self.act(b, i)
                right = self.act(b, i + 1) @ self.d((i, element.left))
                for k, value in algebra.d(b).items():
                    right = right + self.act(k, i).scale(value * _sign(i))
                if not (left - right).is_zero():
                    problems.append(f"Leibniz rule fails for {element.label} on degree {i}")
        for b in moving:
            first = algebra.basis[b]
            for c in moving:
                if algebra.basis[c].left != first.right:
                    continue
                for i in self.degrees():
                    if not self.dim((i, first.left)):
                        continue
                    composite = self.act(c, i + first.degree) @ self.act(b, i)
                    expected = ExactMatrix.zeros(self.field, composite.nrows, composite.ncols)
                    for k, value in algebra.product(b, c).items():
                        expected = expected + self.act(k, i).scale(value)
                    if not (composite - expected).is_zero():
                        problems.append(f"(x·{first.label})·{algebra.basis[c].label} != x·({first.label}{algebra.basis[c].label}) on degree {i}")
        return problems

    def validate(self) -> DGModule:
        problems = self.failures()
        if problems:
            raise ModuleError("; ".join(problems[:5]))
        return self

    def to_json(self) -> dict[str, Any]:
        vertices = self.algebra.vertices
        return {
            "components": {f"{i}@{vertices[v]}": size for (i, v), size in sorted(self.dims.items())},
            "differential": {f"{i}@{vertices[v]}": matrix.to_strings() for (i, v), matrix in sorted(self.differential.items())},
            "action": {
                f"{self.algebra.basis[b].label}@{i}": matrix.to_strings() for (b, i), matrix in sorted(self.action.items())
            },
            "cohomology": {f"{i}@{vertices[v]}": size for (i, v), size in self.cohomology_dims().items()},
        }

    @classmethod
    def from_json(cls, algebra: FinDimGradedAlgebra, payload: dict[str, Any]) -> DGModule:
        vertex_index = {name: k for k, name in enumerate(algebra.vertices)}
        labels = {element.label: b for b, element in enumerate(algebra.basis)}

        def block(key: str) -> Block:
            degree, vertex = key.split("@")
            return int(degree), vertex_index[vertex]

        dims = {block(key): int(size) for key, size in payload.get("components", {}).items()}
        differential = {}
        for key, rows in payload.get("differential", {}).items():
            i, v = block(key)
            differential[(i, v)] = ExactMatrix.from_strings(algebra.field, rows, dims.get((i + 1, v), 0), dims.get((i, v), 0))
        action = {}
        for key, rows in payload.get("action", {}).items():
            label, degree = key.rsplit("@", 1)
            b, i = labels[label], int(degree)
            element = algebra.basis[b]
            shape = (dims.get((i + element.degree, element.right), 0), dims.get((i, element.left), 0))
            action[(b, i)] = ExactMatrix.from_strings(algebra.field, rows, *shape)
        return cls(algebra, dims, differential, action)


@dataclass
class ModuleMap:
    """A graded map of degree `degree`; block (i, v) sends M^i e_v to N^{i+degree} e_v."""

    source: DGModule
    target: DGModule
    degree: int = 0
    blocks: dict[Block, ExactMatrix] = dataclass_field(default_factory=dict)

    def block(self, key: Block) -> ExactMatrix:
        matrix = self.blocks.get(key)
        if matrix is None:
            i, v = key
            return ExactMatrix.zeros(self.source.field, self.target.dim((i + self.degree, v)), self.source.dim(key))
        return matrix

    def is_zero(self) -> bool:
        return all(matrix.is_zero() for matrix in self.blocks.values())

    def compose(self, first: ModuleMap) -> ModuleMap:
        """self ∘ first."""
        blocks = {(i, v): self.block((i + first.degree, v)) @ first.block((i, v)) for (i, v) in first.source.dims}
        return ModuleMap(first.source, self.target, first.degree + self.degree, blocks)

    def scale(self, factor: Any) -> ModuleMap:
        return ModuleMap(self.source, self.target, self.degree, {key: m.scale(factor) for key, m in self.blocks.items()})

    def __add__(self, other: ModuleMap) -> ModuleMap:
        keys = set(self.blocks) | set(other.blocks)
        return ModuleMap(self.source, self.target, self.degree, {key: self.block(key) + other.block(key) for key in keys})

    def differential(self) -> ModuleMap:
        """δf = d_N f - (-1)^k f d_M."""
        sign = _sign(self.degree)
        keys = set(self.source.dims) | {(i - 1, v) for (i, v) in self.source.dims}
        blocks = {}
        for (i, v) in keys:
            value = self.target.d((i + self.degree, v)) @ self.block((i, v)) - (self.block((i + 1, v)) @ self.source.d((i, v))).scale(sign)
            if value.nrows and value.ncols:
                blocks[(i, v)] = value
        return ModuleMap(self.source, self.target, self.degree + 1, blocks)

    def is_closed(self) -> bool:
        return self.differential().is_zero()

    def is_linear(self) -> bool:
        algebra = self.source.algebra
        for b, element in enumerate(algebra.basis):
            if element.is_idempotent:
                continue
            for i in self.source.degrees():
                if not self.source.dim((i, element.left)):
                    continue
                left = self.block((i + element.degree, element.right)) @ self.source.act(b, i)
                right = self.target.act(b, i + self.degree) @ self.block((i, element.left))
                if not (left - right).is_zero():
                    return False
        return True

    def on_cohomology(self, key: Block) -> ExactMatrix:
        i, v = key
        source = self.source.cohomology(key)
        target = self.target.cohomology((i + self.degree, v))
        return target.classify(self.block(key) @ source.representatives)

    def cohomology_blocks(self) -> list[Block]:
        keys = set(self.source.cohomology_dims()) | {(i - self.degree, v) for (i, v) in self.target.cohomology_dims()}
        return sorted(keys)

    def is_quasi_iso(self, above: int | None = None) -> bool:
        """Isomorphism on every H^i(e_v); only degrees > `above` when given."""
        for key in self.cohomology_blocks():
            if above is not None and key[0] <= above:
                continue
            induced = self.on_cohomology(key)
            if induced.nrows != induced.ncols or induced.rank() != induced.nrows:
                return False
        return True


def identity_map(module: DGModule) -> ModuleMap:
    return ModuleMap(module, module, 0, {key: ExactMatrix.identity(module.field, size) for key, size in module.dims.items()})


def zero_module(algebra: FinDimGradedAlgebra) -> DGModule:
    return DGModule(algebra, {})


def shift_module(module: DGModule, k: int) -> DGModule:
    """M[k]: degree i holds M^{i+k}, the differential picks up (-1)^k."""
    sign = _sign(k)
    return DGModule(
        module.algebra,
        {(i - k, v): size for (i, v), size in module.dims.items()},
        {(i - k, v): matrix.scale(sign) for (i, v), matrix in module.differential.items()},
        {(b, i - k): matrix for (b, i), matrix in module.action.items()},
    )


def shift_map(f: ModuleMap, k: int) -> ModuleMap:
    return ModuleMap(shift_module(f.source, k), shift_module(f.target, k), f.degree, {(i - k, v): m for (i, v), m in f.blocks.items()})


def direct_sum(modules: Iterable[DGModule]) -> DGModule:
    modules = list(modules)
    algebra = modules[0].algebra
    field = algebra.field
    keys = sorted({key for module in modules for key in module.dims})
    dims = {key: sum(module.dim(key) for module in modules) for key in keys}
    differential = {key: block_diagonal(field, [module.d(key) for module in modules]) for key in keys}
    action = {}
    for b, element in enumerate(algebra.basis):
        if element.is_idempotent:
            continue
        for i in sorted({i for i, _ in keys}):
            action[(b, i)] = block_diagonal(field, [module.act(b, i) for module in modules])
    return DGModule(algebra, dims, differential, action)


def cone_module(f: ModuleMap) -> DGModule:
    """Cone(f)^i = X^{i+1} ⊕ Y^i with d = [[-d_X, 0], [f, d_Y]]."""
    if f.degree != 0:
        raise ModuleError("cone needs a degree-0 map")
    source, target = f.source, f.target
    algebra = source.algebra
    field = algebra.field
    keys = sorted({(i - 1, v) for (i, v) in source.dims} | set(target.dims))
    dims = {(i, v): source.dim((i + 1, v)) + target.dim((i, v)) for (i, v) in keys}
    differential = {}
    for (i, v) in keys:
        upper = hstack(field, [-source.d((i + 1, v)), ExactMatrix.zeros(field, source.dim((i + 2, v)), target.dim((i, v)))])
        lower = hstack(field, [f.block((i + 1, v)), target.d((i, v))])
        differential[(i, v)] = vstack(field, [upper, lower])
    action = {}
    for b, element in enumerate(algebra.basis):
        if element.is_idempotent:
            continue
        for i in sorted({i for i, _ in keys}):
            action[(b, i)] = block_diagonal(field, [source.act(b, i + 1), target.act(b, i)])
    return DGModule(algebra, dims, differential, action)


def cone_inclusion(f: ModuleMap) -> ModuleMap:
    """Y -> Cone(f)."""
    cone = cone_module(f)
    field = f.source.field
    blocks = {
        (i, v): vstack(field, [ExactMatrix.zeros(field, f.source.dim((i + 1, v)), size), ExactMatrix.identity(field, size)])
        for (i, v), size in f.target.dims.items()
    }
    return ModuleMap(f.target, cone, 0, blocks)


def cone_projection(f: ModuleMap) -> ModuleMap:
    """Cone(f) -> X[1]."""
    cone = cone_module(f)
    shifted = shift_module(f.source, 1)
    field = f.source.field
    blocks = {
        (i, v): hstack(field, [ExactMatrix.identity(field, shifted.dim((i, v))), ExactMatrix.zeros(field, shifted.dim((i, v)), f.target.dim((i, v)))])
        for (i, v) in cone.dims
    }
    return ModuleMap(cone, shifted, 0, blocks)


def cocone_module(f: ModuleMap) -> DGModule:
    return shift_module(cone_module(f), -1)


def cocone_projection(f: ModuleMap) -> ModuleMap:
    """Cocone(f) -> X."""
    cocone = cocone_module(f)
    field = f.source.field
    blocks = {
        (i, v): hstack(field, [ExactMatrix.identity(field, size), ExactMatrix.zeros(field, size, f.target.dim((i - 1, v)))])
        for (i, v), size in f.source.dims.items()
    }
    return ModuleMap(cocone, f.source, 0, blocks)


def map_of_cones(first: ModuleMap, second: ModuleMap, on_source: ModuleMap, on_target: ModuleMap) -> ModuleMap:
    """Cone(first) -> Cone(second) from a strictly commuting square."""
    source, target = cone_module(first), cone_module(second)
    field = first.source.field
    blocks = {
        (i, v): block_diagonal(field, [on_source.block((i + 1, v)), on_target.block((i, v))])
        for (i, v) in source.dims
    }
    return ModuleMap(source, target, 0, blocks)


@dataclass
class Truncation:
    module: DGModule
    comparison: ModuleMap


def truncate_below(module: DGModule) -> Truncation:
    """τ^{≤0} with its inclusion into the module."""
    algebra = module.algebra
    field = algebra.field
    kernels = {}
    for v in module.vertices:
        size = module.dim((0, v))
        if size:
            kernels[v] = module.d((0, v)).kernel_basis() if module.dim((1, v)) else ExactMatrix.identity(field, size)
    dims = {(i, v): size for (i, v), size in module.dims.items() if i < 0}
    dims.update({(0, v): kernel.ncols for v, kernel in kernels.items()})
    differential = {(i, v): m for (i, v), m in module.differential.items() if i < -1}
    for v, kernel in kernels.items():
        if kernel.ncols:
            differential[(-1, v)] = kernel.left_inverse() @ module.d((-1, v))
    action = {}
    for b, element in enumerate(algebra.basis):
        if element.is_idempotent:
            continue
        for i in module.degrees():
            if i > 0:
                continue
            matrix = module.act(b, i)
            if i == 0:
                kernel = kernels.get(element.left)
                if kernel is None or not kernel.ncols:
                    continue
                matrix = matrix @ kernel
            if i + element.degree == 0:
                kernel = kernels.get(element.right)
                if kernel is None or not kernel.ncols:
                    continue
                matrix = kernel.left_inverse() @ matrix
            action[(b, i)] = matrix
    truncated = DGModule(algebra, dims, differential, action)
    blocks = {(i, v): ExactMatrix.identity(field, size) for (i, v), size in truncated.dims.items() if i < 0}
    blocks.update({(0, v): kernel for v, kernel in kernels.items() if kernel.ncols})
    return Truncation(truncated, ModuleMap(truncated, module, 0, blocks))


def truncate_above(module: DGModule, d: int) -> Truncation:
    """τ^{>-d} with the projection from the module."""
    algebra = module.algebra
    field = algebra.field
    bottom = -d + 1
    quotients: dict[int, tuple[ExactMatrix, ExactMatrix]] = {}
    for v in module.vertices:
        size = module.dim((bottom, v))
        if size:
            image = module.d((bottom - 1, v))
            span = image.column_basis() if image.ncols else ExactMatrix.zeros(field, size, 0)
            quotients[v] = quotient_projection(span, size)
    dims = {(i, v): size for (i, v), size in module.dims.items() if i > bottom}
    dims.update({(bottom, v): projection.nrows for v, (projection, _) in quotients.items()})
    differential = {(i, v): m for (i, v), m in module.differential.items() if i > bottom}
    for v, (_, section) in quotients.items():
        differential[(bottom, v)] = module.d((bottom, v)) @ section
    action = {}
    for b, element in enumerate(algebra.basis):
        if element.is_idempotent:
            continue
        for i in module.degrees():
            landing = i + element.degree
            if i < bottom or landing < bottom:
                continue
            matrix = module.act(b, i)
            if i == bottom:
                if element.left not in quotients:
                    continue
                matrix = matrix @ quotients[element.left][1]
            if landing == bottom:
                if element.right not in quotients:
                    continue
                matrix = quotients[element.right][0] @ matrix
            action[(b, i)] = matrix
    truncated = DGModule(algebra, dims, differential, action)
    blocks = {(i, v): ExactMatrix.identity(field, size) for (i, v), size in truncated.dims.items() if i > bottom}
    blocks.update({(bottom, v): projection for v, (projection, _) in quotients.items()})
    return Truncation(truncated, ModuleMap(module, truncated, 0, blocks))


@dataclass
class ModuleHomComplex:
    """Λ-linear graded maps M -> N of each degree, with their differential."""

    source: DGModule
    target: DGModule
    cells: dict[int, list[tuple[Block, int, int]]]
    bases: dict[int, ExactMatrix]
    complex: CochainComplex

    def to_map(self, degree: int, coordinates: ExactMatrix) -> ModuleMap:
        return _vector_to_map(self.source, self.target, degree, self.cells[degree], self.bases[degree] @ coordinates)

    def coordinates(self, f: ModuleMap) -> ExactMatrix:
        vector = _map_to_vector(f, self.cells[f.degree])
        solution = self.bases[f.degree].solve(vector)
        if solution is None:
            raise ModuleError("map is not Λ-linear")
        return solution

    def space(self, degree: int) -> Cohomology:
        return self.complex.cohomology(degree)

    def closed_maps(self, degree: int) -> list[ModuleMap]:
        cocycles = self.space(degree).cocycles
        return [self.to_map(degree, cocycles.submatrix(range(cocycles.nrows), [c])) for c in range(cocycles.ncols)]


def _cells(source: DGModule, target: DGModule, degree: int) -> list[tuple[Block, int, int]]:
    cells = []
    for (i, v) in sorted(source.dims):
        for r in range(target.dim((i + degree, v))):
            for c in range(source.dim((i, v))):
                cells.append(((i, v), r, c))
    return cells


def _vector_to_map(source: DGModule, target: DGModule, degree: int, cells: list[tuple[Block, int, int]], vector: ExactMatrix) -> ModuleMap:
    entries: dict[Block, dict[tuple[int, int], Any]] = {}
    for position, (key, r, c) in enumerate(cells):
        value = vector.rows[position][0]
        if value != source.field.zero:
            entries.setdefault(key, {})[(r, c)] = value
    blocks = {
        (i, v): ExactMatrix.from_entries(source.field, target.dim((i + degree, v)), source.dim((i, v)), cells_)
        for (i, v), cells_ in entries.items()
    }
    return ModuleMap(source, target, degree, blocks)


def _map_to_vector(f: ModuleMap, cells: list[tuple[Block, int, int]]) -> ExactMatrix:
    entries = {}
    for position, (key, r, c) in enumerate(cells):
        block = f.blocks.get(key)
        if block is not None and block.rows[r][c] != f.source.field.zero:
            entries[(position, 0)] = block.rows[r][c]
    return ExactMatrix.from_entries(f.source.field, len(cells), 1, entries)


def _linear_maps(source: DGModule, target: DGModule, degree: int, cells: list[tuple[Block, int, int]]) -> ExactMatrix:
    """Columns spanning the Λ-linear maps among all graded maps of this degree."""
    field = source.field
    if not cells:
        return ExactMatrix.zeros(field, 0, 0)
    moving = [b for b, element in enumerate(source.algebra.basis) if not element.is_idempotent]
    columns = []
    for position in range(len(cells)):
        unit = ExactMatrix.from_entries(field, len(cells), 1, {(position, 0): field.one})
        f = _vector_to_map(source, target, degree, cells, unit)
        residuals = []
        for b in moving:
            element = source.algebra.basis[b]
            for i in source.degrees():
                if not source.dim((i, element.left)):
                    continue
                left = f.block((i + element.degree, element.right)) @ source.act(b, i)
                right = target.act(b, i + degree) @ f.block((i, element.left))
                residuals.extend(value for row in (left - right).rows for value in row)
        columns.append(residuals)
    constraint = ExactMatrix.from_columns(field, columns, len(columns[0])) if columns[0] else ExactMatrix.zeros(field, 0, len(cells))
    if not constraint.nrows:
        return ExactMatrix.identity(field, len(cells))
    return constraint.kernel_basis()


def module_hom_complex(source: DGModule, target: DGModule, degrees: Iterable[int]) -> ModuleHomComplex:
    """Hom_Λ(M, N) in the given degrees, computed without resolving M."""
    field = source.field
    degrees = sorted(set(degrees))
    wanted = sorted(set(degrees) | {k + 1 for k in degrees} | {k - 1 for k in degrees})
    cells = {k: _cells(source, target, k) for k in wanted}
    bases = {k: _linear_maps(source, target, k, cells[k]) for k in wanted}
    dims = {k: bases[k].ncols for k in wanted}
    differentials = {}
    for k in wanted:
        if k + 1 not in bases or not bases[k].ncols or not bases[k + 1].ncols:
            continue
        columns = []
        for c in range(bases[k].ncols):
            f = _vector_to_map(source, target, k, cells[k], bases[k].submatrix(range(bases[k].nrows), [c]))
            image = _map_to_vector(f.differential(), cells[k + 1])
            solution = bases[k + 1].solve(image)
            if solution is None:
                raise ModuleError("differential of a linear map left the linear maps")
            columns.append(solution)
        differentials[k] = hstack(field, columns)
    return ModuleHomComplex(source, target, cells, bases, CochainComplex(field, dims, differentials, validate=False))

