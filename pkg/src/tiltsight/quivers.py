"""Graded quivers with relations and the finite-dimensional algebras they present.

Paths are tuples of arrow names in composition order: ("beta", "alpha") is
beta∘alpha, alpha applied first. A basis element b has a left vertex (its
target) and a right vertex (its source), so e_left · b · e_right = b and a
product b · c is nonzero only when right(b) == left(c).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Iterable, Mapping

from sympy.polys.domains.domain import Domain

from tiltsight.complexes import CochainComplex
from tiltsight.matrices import ExactMatrix, hstack, quotient_projection, section_positions
from tiltsight.scalars import format_scalar, parse_scalar


DEFAULT_LENGTH_BOUND = 6

Vector = dict[int, Any]


class PresentationError(ValueError):
    pass


class NotStabilized(ValueError):
    def __init__(self, length_bound: int) -> None:
        super().__init__(f"paths of length {length_bound - 1} or {length_bound} survive the relations; raise the length bound")
        self.length_bound = length_bound


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str
    degree: int = 0


Term = tuple[str, tuple[str, ...]]


@dataclass(frozen=True)
class GradedQuiverPresentation:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    relations: tuple[tuple[Term, ...], ...] = ()
    differential: Mapping[str, tuple[Term, ...]] = dataclass_field(default_factory=dict)

    def arrow(self, name: str) -> Arrow:
        for arrow in self.arrows:
            if arrow.name == name:
                return arrow
        raise PresentationError(f"unknown arrow {name!r}")

    def endpoints(self, path: tuple[str, ...], vertex: str | None = None) -> tuple[str, str]:
        """(source, target) of a nonempty composable path."""
        if not path:
            if vertex is None:
                raise PresentationError("empty path needs a vertex")
            return vertex, vertex
        arrows = [self.arrow(name) for name in path]
        for later, earlier in zip(arrows, arrows[1:]):
            if earlier.target != later.source:
                raise PresentationError(f"path {'*'.join(path)} is not composable")
        return arrows[-1].source, arrows[0].target

    def path_degree(self, path: tuple[str, ...]) -> int:
        return sum(self.arrow(name).degree for name in path)


def presentation_from_dict(payload: Mapping[str, Any]) -> GradedQuiverPresentation:
    """Read the TOML/JSON schema: vertices, arrows, relations, differential."""
    vertices = tuple(str(vertex) for vertex in payload.get("vertices", []))
    arrows = []
    for item in payload.get("arrows", []):
        degree = int(item.get("degree", 0))
        if degree > 0:
            raise PresentationError(f"arrow {item.get('name')!r} has positive degree {degree}")
        arrow = Arrow(str(item["name"]), str(item["from"]), str(item["to"]), degree)
        if arrow.source not in vertices or arrow.target not in vertices:
            raise PresentationError(f"arrow {arrow.name!r} uses an unknown vertex")
        arrows.append(arrow)
    relations = tuple(_terms(relation) for relation in payload.get("relations", []))
    differential = {str(name): _terms(terms) for name, terms in (payload.get("differential") or {}).items()}
    presentation = GradedQuiverPresentation(vertices, tuple(arrows), relations, differential)
    _check_presentation(presentation)
    return presentation


def _terms(items: Iterable[Mapping[str, Any]]) -> tuple[Term, ...]:
    return tuple((str(item.get("coef", 1)), tuple(str(name) for name in item.get("path", []))) for item in items)


def _check_presentation(presentation: GradedQuiverPresentation) -> None:
    for relation in presentation.relations:
        if not relation:
            raise PresentationError("empty relation")
        if any(not path for _, path in relation):
            raise PresentationError("relations must consist of paths of positive length")
        shapes = {(*presentation.endpoints(path), presentation.path_degree(path)) for _, path in relation}
        if len(shapes) != 1:
            raise PresentationError(f"relation {relation} mixes sources, targets or degrees")
        if len({len(path) for _, path in relation}) != 1:
            raise PresentationError(f"relation {relation} mixes path lengths; only length-homogeneous relations are supported")
    for name, terms in presentation.differential.items():
        arrow = presentation.arrow(name)
        for _, path in terms:
            if path and presentation.endpoints(path) != (arrow.source, arrow.target):
                raise PresentationError(f"d({name}) has a term with the wrong endpoints")
            if not path and arrow.source != arrow.target:
                raise PresentationError(f"d({name}) has an idempotent term on a non-loop")
            if presentation.path_degree(path) != arrow.degree + 1:
                raise PresentationError(f"d({name}) is not of degree {arrow.degree + 1}")


def linear_quiver(n: int) -> GradedQuiverPresentation:
    """kA_n with linear orientation 1 -> 2 -> ... -> n."""
    vertices = tuple(str(i) for i in range(1, n + 1))
    arrows = tuple(Arrow(f"a{i}", str(i), str(i + 1)) for i in range(1, n))
    return GradedQuiverPresentation(vertices, arrows)


@dataclass(frozen=True)
class BasisElement:
    label: str
    degree: int
    left: int
    right: int
    path: tuple[str, ...] = ()

    @property
    def is_idempotent(self) -> bool:
        return not self.path and self.left == self.right and self.label.startswith("e_")


@dataclass
class FinDimGradedAlgebra:
    field: Domain
    vertices: tuple[str, ...]
    basis: tuple[BasisElement, ...]
    products: dict[tuple[int, int], Vector]
    differential: dict[int, Vector]
    idempotents: tuple[int, ...]
    length_bound: int | None = None

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def graded_dims(self) -> dict[int, int]:
        dims: dict[int, int] = {}
        for element in self.basis:
            dims[element.degree] = dims.get(element.degree, 0) + 1
        return dict(sorted(dims.items(), reverse=True))

    def indices(self, left: int | None = None, right: int | None = None, degree: int | None = None) -> list[int]:
        return [
            index
            for index, element in enumerate(self.basis)
            if (left is None or element.left == left)
            and (right is None or element.right == right)
            and (degree is None or element.degree == degree)
        ]

    def product(self, i: int, j: int) -> Vector:
        return self.products.get((i, j), {})

    def multiply(self, x: Vector, y: Vector) -> Vector:
        result: Vector = {}
        zero = self.field.zero
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.product(i, j).items():
                    result[k] = result.get(k, zero) + a * b * c
        return {k: value for k, value in result.items() if value != zero}

    def d(self, i: int) -> Vector:
        return self.differential.get(i, {})

    def apply_d(self, x: Vector) -> Vector:
        result: Vector = {}
        zero = self.field.zero
        for i, a in x.items():
            for k, c in self.d(i).items():
                result[k] = result.get(k, zero) + a * c
        return {k: value for k, value in result.items() if value != zero}

    def has_zero_differential(self) -> bool:
        return not any(self.differential.values())

    def radical_indices(self) -> list[int]:
        idempotents = set(self.idempotents)
        return [index for index in range(self.dimension) if index not in idempotents]

    def underlying_complex(self) -> CochainComplex:
        positions = {index: self.indices(degree=self.basis[index].degree).index(index) for index in range(self.dimension)}
        dims = self.graded_dims()
        entries: dict[int, dict[tuple[int, int], Any]] = {}
        for i, vector in self.differential.items():
            degree = self.basis[i].degree
            for k, value in vector.items():
                entries.setdefault(degree, {})[(positions[k], positions[i])] = value
        differentials = {
            degree: ExactMatrix.from_entries(self.field, dims.get(degree + 1, 0), dims.get(degree, 0), cells)
            for degree, cells in entries.items()
        }
        return CochainComplex(self.field, dims, differentials)

    def is_connective(self) -> bool:
        return all(element.degree <= 0 for element in self.basis)

    def is_d_truncated(self, d: int) -> bool:
        return all(degree > -d for degree in self.underlying_complex().cohomology_dims())

    def vector_to_matrix(self, x: Vector, indices: list[int]) -> ExactMatrix:
        return ExactMatrix.from_entries(self.field, len(indices), 1, {(indices.index(k), 0): v for k, v in x.items()})

    def to_json(self) -> dict[str, Any]:
        def encode(vector: Vector) -> dict[str, str]:
            return {self.basis[k].label: format_scalar(self.field, value) for k, value in sorted(vector.items())}

        return {
            "vertices": list(self.vertices),
            "graded_dims": {str(degree): size for degree, size in self.graded_dims().items()},
            "basis": [
                {"label": element.label, "degree": element.degree, "left": self.vertices[element.left], "right": self.vertices[element.right]}
                for element in self.basis
            ],
            "products": {
                f"{self.basis[i].label}.{self.basis[j].label}": encode(vector)
                for (i, j), vector in sorted(self.products.items())
                if vector
            },
            "differential": {self.basis[i].label: encode(vector) for i, vector in sorted(self.differential.items()) if vector},
        }


@dataclass
class _Cell:
    paths: list[tuple[str, ...]]
    projection: ExactMatrix
    normal: list[int]


def _paths_by_length(presentation: GradedQuiverPresentation, bound: int) -> list[list[tuple[str, str, tuple[str, ...]]]]:
    layers = [[(vertex, vertex, ()) for vertex in presentation.vertices]]
    for _ in range(bound):
        layer = []
        for source, target, path in layers[-1]:
            for arrow in presentation.arrows:
                if arrow.source == target:
                    layer.append((source, arrow.target, (arrow.name,) + path))
        layers.append(layer)
    return layers


def enumerate_basis(presentation: GradedQuiverPresentation, field: Domain, length_bound: int = DEFAULT_LENGTH_BOUND) -> FinDimGradedAlgebra:
    if length_bound < 1:
        raise ValueError("length_bound must be at least 1")
    layers = _paths_by_length(presentation, length_bound)
    relations = [
        (
            len(relation[0][1]),
            presentation.endpoints(relation[0][1]),
            [(parse_scalar(field, coef), path) for coef, path in relation],
        )
        for relation in presentation.relations
    ]
    cells: dict[tuple[str, str, int, int], _Cell] = {}
    surviving = []
    for length, layer in enumerate(layers):
        grouped: dict[tuple[str, str, int], list[tuple[str, ...]]] = {}
        for source, target, path in layer:
            grouped.setdefault((source, target, presentation.path_degree(path)), []).append(path)
        count = 0
        for (source, target, degree), paths in grouped.items():
            position = {path: k for k, path in enumerate(paths)}
            generators = []
            for rel_length, (rel_source, rel_target), terms in relations:
                if rel_length > length:
                    continue
                for left_length in range(length - rel_length + 1):
                    right_length = length - rel_length - left_length
                    lefts = [p for s, t, p in layers[left_length] if s == rel_target and t == target]
                    rights = [p for s, t, p in layers[right_length] if t == rel_source and s == source]
                    for left in lefts:
                        for right in rights:
                            entries: dict[tuple[int, int], Any] = {}
                            for coef, path in terms:
                                word = left + path + right
                                if word in position:
                                    key = (position[word], 0)
                                    entries[key] = entries.get(key, field.zero) + coef
                            generators.append(ExactMatrix.from_entries(field, len(paths), 1, entries))
            span = hstack(field, generators).column_basis() if generators else ExactMatrix.zeros(field, len(paths), 0)
            projection, section = quotient_projection(span, len(paths))
            normal = section_positions(section)
            cells[(source, target, degree, length)] = _Cell(paths, projection, normal)
            count += len(normal)
        surviving.append(count)
    if length_bound < 2 or surviving[-1] or surviving[-2]:
        raise NotStabilized(length_bound)

    vertex_index = {vertex: k for k, vertex in enumerate(presentation.vertices)}
    basis: list[BasisElement] = []
    word_index: dict[tuple[str, str, tuple[str, ...]], int] = {}
    for (source, target, degree, length), cell in sorted(cells.items(), key=lambda item: (item[0][3], -item[0][2], item[0][0], item[0][1])):
        for k in cell.normal:
            path = cell.paths[k]
            label = f"e_{source}" if not path else "*".join(path)
            word_index[(source, target, path)] = len(basis)
            basis.append(BasisElement(label, degree, vertex_index[target], vertex_index[source], path))
    idempotents = tuple(word_index[(vertex, vertex, ())] for vertex in presentation.vertices)

    def reduce(source: str, target: str, path: tuple[str, ...]) -> Vector:
        key = (source, target, presentation.path_degree(path), len(path))
        cell = cells.get(key)
        if cell is None:
            return {}
        column = cell.paths.index(path)
        result = {}
        for row, k in enumerate(cell.normal):
            value = cell.projection.rows[row][column]
            if value != field.zero:
                result[word_index[(source, target, cell.paths[k])]] = value
        return result

    products: dict[tuple[int, int], Vector] = {}
    for i, left in enumerate(basis):
        for j, right in enumerate(basis):
            if left.right != right.left:
                continue
            source = presentation.vertices[right.right]
            target = presentation.vertices[left.left]
            vector = reduce(source, target, left.path + right.path)
            if vector:
                products[(i, j)] = vector

    differential: dict[int, Vector] = {}
    arrow_d = {name: [(parse_scalar(field, coef), path) for coef, path in terms] for name, terms in presentation.differential.items()}
    for index, element in enumerate(basis):
        total: Vector = {}
        sign_degree = 0
        for position, name in enumerate(element.path):
            for coef, replacement in arrow_d.get(name, []):
                word = element.path[:position] + replacement + element.path[position + 1:]
                source = presentation.vertices[element.right]
                target = presentation.vertices[element.left]
                sign = -1 if sign_degree % 2 else 1
                for k, value in reduce(source, target, word).items():
                    total[k] = total.get(k, field.zero) + coef * value * sign
            sign_degree += presentation.arrow(name).degree
        total = {k: value for k, value in total.items() if value != field.zero}
        if total:
            differential[index] = total
    return FinDimGradedAlgebra(field, presentation.vertices, tuple(basis), products, differential, idempotents, length_bound)


@dataclass
class ValidationReport:
    checks: dict[str, bool]
    failures: list[str]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def validate(presentation: GradedQuiverPresentation | None, algebra: FinDimGradedAlgebra) -> ValidationReport:
    """Check the algebra axioms on all basis triples."""
    failures: list[str] = []
    checks = {"associativity": True, "unitality": True, "leibniz": True, "d_squared": True, "connective": True, "d_degree": True}
    size = algebra.dimension
    for i, j, k in itertools.product(range(size), repeat=3):
        left = algebra.multiply(algebra.product(i, j), {k: algebra.field.one})
        right = algebra.multiply({i: algebra.field.one}, algebra.product(j, k))
        if left != right:
            checks["associativity"] = False
            failures.append(f"({algebra.basis[i].label}·{algebra.basis[j].label})·{algebra.basis[k].label} differs")
            break
    for k, element in enumerate(algebra.basis):
        one = algebra.field.one
        left_unit = algebra.product(algebra.idempotents[element.left], k)
        right_unit = algebra.product(k, algebra.idempotents[element.right])
        if left_unit != {k: one} or right_unit != {k: one}:
            checks["unitality"] = False
            failures.append(f"idempotents do not fix {element.label}")
        for vertex, e in enumerate(algebra.idempotents):
            if vertex != element.left and algebra.product(e, k):
                checks["unitality"] = False
                failures.append(f"e_{algebra.vertices[vertex]} does not kill {element.label}")
        if element.degree > 0:
            checks["connective"] = False
            failures.append(f"{element.label} has positive degree")
        for target in algebra.d(k):
            if algebra.basis[target].degree != element.degree + 1:
                checks["d_degree"] = False
                failures.append(f"d({element.label}) has the wrong degree")
        if algebra.apply_d(algebra.d(k)):
            checks["d_squared"] = False
            failures.append(f"d²({element.label}) is nonzero")
    for i, j in itertools.product(range(size), repeat=2):
        x = {i: algebra.field.one}
        y = {j: algebra.field.one}
        lhs = algebra.apply_d(algebra.product(i, j))
        sign = -1 if algebra.basis[i].degree % 2 else 1
        rhs = _add(algebra, algebra.multiply(algebra.apply_d(x), y), algebra.multiply(x, algebra.apply_d(y)), sign)
        if lhs != rhs:
            checks["leibniz"] = False
            failures.append(f"Leibniz fails on {algebra.basis[i].label}, {algebra.basis[j].label}")
    if presentation is not None:
        for arrow in presentation.arrows:
            if arrow.degree > 0:
                checks["connective"] = False
                failures.append(f"arrow {arrow.name} has positive degree")
    return ValidationReport(checks, failures)


def _add(algebra: FinDimGradedAlgebra, x: Vector, y: Vector, sign: int = 1) -> Vector:
    result = dict(x)
    for k, value in y.items():
        result[k] = result.get(k, algebra.field.zero) + value * sign
    return {k: value for k, value in result.items() if value != algebra.field.zero}


def truncate_algebra(algebra: FinDimGradedAlgebra, d: int) -> FinDimGradedAlgebra:
    """Quotient by the ideal A^{≤-d} ⊕ d(A^{-d})."""
    field = algebra.field
    bottom = -d + 1
    bottom_indices = algebra.indices(degree=bottom)
    position = {index: k for k, index in enumerate(bottom_indices)}
    images = [
        algebra.vector_to_matrix(algebra.d(index), bottom_indices)
        for index in algebra.indices(degree=-d)
    ]
    span = hstack(field, images).column_basis() if images else ExactMatrix.zeros(field, len(bottom_indices), 0)
    projection, section = quotient_projection(span, len(bottom_indices))
    kept_positions = section_positions(section)
    kept_bottom = [bottom_indices[k] for k in kept_positions]
    kept = [index for index, element in enumerate(algebra.basis) if element.degree > bottom] + kept_bottom
    kept.sort()
    renumber = {old: new for new, old in enumerate(kept)}
    bottom_rows = {bottom_indices[k]: row for row, k in enumerate(kept_positions)}

    def project(vector: Vector) -> Vector:
        result: Vector = {}
        for index, value in vector.items():
            degree = algebra.basis[index].degree
            if degree > bottom:
                result[renumber[index]] = result.get(renumber[index], field.zero) + value
            elif degree == bottom:
                column = position[index]
                for target, row in bottom_rows.items():
                    entry = projection.rows[row][column]
                    if entry != field.zero:
                        result[renumber[target]] = result.get(renumber[target], field.zero) + value * entry
        return {k: v for k, v in result.items() if v != field.zero}

    basis = tuple(algebra.basis[index] for index in kept)
    products = {}
    for i in kept:
        for j in kept:
            vector = project(algebra.product(i, j))
            if vector:
                products[(renumber[i], renumber[j])] = vector
    differential = {}
    for i in kept:
        vector = project(algebra.d(i))
        if vector:
            differential[renumber[i]] = vector
    idempotents = tuple(renumber[index] for index in algebra.idempotents)
    return FinDimGradedAlgebra(field, algebra.vertices, basis, products, differential, idempotents, algebra.length_bound)


def truncation_ideal_is_closed(algebra: FinDimGradedAlgebra, d: int) -> bool:
    """The kernel of truncate_algebra is closed under d and two-sided products."""
    field = algebra.field
    bottom = -d + 1
    bottom_indices = algebra.indices(degree=bottom)
    images = [algebra.vector_to_matrix(algebra.d(index), bottom_indices) for index in algebra.indices(degree=-d)]
    span = hstack(field, images) if images else ExactMatrix.zeros(field, len(bottom_indices), 0)

    def in_ideal(vector: Vector) -> bool:
        edge = {k: v for k, v in vector.items() if algebra.basis[k].degree == bottom}
        rest = {k: v for k, v in vector.items() if algebra.basis[k].degree > bottom}
        if rest:
            return False
        if not edge:
            return True
        return span.ncols > 0 and span.solve(algebra.vector_to_matrix(edge, bottom_indices)) is not None

    generators: list[Vector] = [{index: field.one} for index, element in enumerate(algebra.basis) if element.degree <= -d]
    generators += [algebra.d(index) for index in algebra.indices(degree=-d)]
    for generator in generators:
        if not in_ideal(algebra.apply_d(generator)):
            return False
        for k in range(algebra.dimension):
            unit = {k: field.one}
            if not in_ideal(algebra.multiply(unit, generator)) or not in_ideal(algebra.multiply(generator, unit)):
                return False
    return True


def _cell_key(algebra: FinDimGradedAlgebra, index: int, order: tuple[int, ...]) -> tuple[int, int, int]:
    element = algebra.basis[index]
    return order[element.left], order[element.right], element.degree


def algebra_invariants(algebra: FinDimGradedAlgebra, order: tuple[int, ...] | None = None) -> dict[str, Any]:
    """Cell dimensions, product ranks, radical layers and differential ranks.

    `order` relabels vertex k as order[k].
    """
    field = algebra.field
    if order is None:
        order = tuple(range(len(algebra.vertices)))
    cells: dict[tuple[int, int, int], list[int]] = {}
    for index in range(algebra.dimension):
        cells.setdefault(_cell_key(algebra, index, order), []).append(index)
    dims = {key: len(indices) for key, indices in cells.items()}

    product_ranks = {}
    for (u, v, a), left in cells.items():
        for (v2, w, b), right in cells.items():
            if v2 != v:
                continue
            target = cells.get((u, w, a + b), [])
            columns = [algebra.vector_to_matrix(algebra.product(i, j), target) for i in left for j in right]
            rank = hstack(field, columns).rank() if target and columns else 0
            product_ranks[(u, v, w, a, b)] = rank

    layers: dict[tuple[int, tuple[int, int, int]], int] = {}
    current = [{index: field.one} for index in algebra.radical_indices()]
    power = 1
    while current and power <= algebra.dimension + 1:
        by_cell: dict[tuple[int, int, int], list[Vector]] = {}
        for vector in current:
            key = _cell_key(algebra, next(iter(vector)), order)
            by_cell.setdefault(key, []).append(vector)
        reduced: list[Vector] = []
        for key, vectors in by_cell.items():
            indices = cells[key]
            matrix = hstack(field, [algebra.vector_to_matrix(vector, indices) for vector in vectors]).column_basis()
            layers[(power, key)] = matrix.ncols
            for column in matrix.columns():
                reduced.append({indices[k]: value for k, value in enumerate(column) if value != field.zero})
        current = [
            product
            for vector in reduced
            for index in algebra.radical_indices()
            for product in [algebra.multiply(vector, {index: field.one})]
            if product
        ]
        power += 1

    d_ranks = {}
    for key, indices in cells.items():
        u, v, degree = key
        target = cells.get((u, v, degree + 1), [])
        columns = [algebra.vector_to_matrix(algebra.d(index), target) for index in indices]
        d_ranks[key] = hstack(field, columns).rank() if target and columns else 0
    return {"dims": dims, "products": product_ranks, "layers": layers, "differential": d_ranks}


def algebras_isomorphic(first: FinDimGradedAlgebra, second: FinDimGradedAlgebra) -> tuple[int, ...] | None:
    """A vertex bijection under which every invariant agrees, or None.

    The returned tuple sends vertex k of `second` to vertex result[k] of `first`.
    """
    if len(first.vertices) != len(second.vertices) or first.graded_dims() != second.graded_dims():
        return None
    reference = algebra_invariants(first)
    for order in itertools.permutations(range(len(second.vertices))):
        if algebra_invariants(second, order) == reference:
            return order
    return None
