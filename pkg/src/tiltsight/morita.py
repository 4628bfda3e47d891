"""From the quotient of the cluster category to modules over Λ = τ^{>-d} End(M).

Λ in degree -a is Hom_𝒞(M, M[-a]) for 0 <= a < d, multiplied by composition.
An object X goes to the graded module with H^{-j} e_v = Hom_𝒞(M_v, X[d-j]),
acted on by precomposition. The transport carries no differential; the
hom-dimension comparison in `verify_equivalence` is what certifies it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Iterator

import networkx as nx

from tiltsight.complexes import InvariantViolation
from tiltsight.dem import injective_module, omega_power, sigma_power
from tiltsight.dgmodules import DGModule, ModuleMap, shift_module
from tiltsight.matrices import ExactMatrix, hstack, quotient_projection, section_positions, span_rank
from tiltsight.orbit import ClusterMorphism, HomBlock, build
from tiltsight.quivers import BasisElement, FinDimGradedAlgebra
from tiltsight.quotient import QuotientCategory, quotient_by
from tiltsight.resolutions import (
    DerivedHom,
    SemiFreeModule,
    compose_derived,
    default_depth,
    derived_isomorphic,
    endomorphism_algebra,
    free_module,
    is_indecomposable,
    rhom,
    semifree_resolution,
)
from tiltsight.scalars import field_elements, field_from_label


DEFAULT_ENUMERATION_BOUND = 4
ENUMERATION_PRIME = 2
MAX_ASSIGNMENTS = 1 << 14


@dataclass
class _Frame:
    indices: list[int]
    change: ExactMatrix


def _identity_complement(block: HomBlock, identity: ClusterMorphism, field: Any) -> list[ClusterMorphism]:
    coordinates = block.coordinates(identity, field)
    _, section = quotient_projection(coordinates, block.dimension)
    basis = block.basis()
    return [basis[position] for position in section_positions(section)]


def extract_lambda(quotient: QuotientCategory) -> tuple[FinDimGradedAlgebra, list[ClusterMorphism]]:
    """The graded algebra τ^{>-d} End_𝒞(M) and the cluster morphism behind each basis element."""
    category = quotient.category
    field = category.field
    d = category.d
    summands = quotient.summands
    vertices = tuple(str(k + 1) for k in range(len(summands)))
    basis: list[BasisElement] = []
    morphisms: list[ClusterMorphism] = []
    for u, name in enumerate(summands):
        basis.append(BasisElement(f"e_{vertices[u]}", 0, u, u))
        morphisms.append(category.identity(name))
    frames: dict[tuple[int, int, int], _Frame] = {}
    for a in range(d):
        for u, target in enumerate(summands):
            for w, source in enumerate(summands):
                block = category.hom(source, target, -a)
                indices = [u] if a == 0 and u == w else []
                chosen = [morphisms[u]] if indices else []
                candidates = _identity_complement(block, morphisms[u], field) if indices else block.basis()
                for k, morphism in enumerate(candidates):
                    indices.append(len(basis))
                    chosen.append(morphism)
                    basis.append(BasisElement(f"h{a}_{vertices[w]}{vertices[u]}_{k}", -a, u, w))
                    morphisms.append(morphism)
                if not indices:
                    continue
                change = hstack(field, [block.coordinates(morphism, field) for morphism in chosen])
                frames[(u, w, a)] = _Frame(indices, change)

    products: dict[tuple[int, int], dict[int, Any]] = {}
    for i, first in enumerate(basis):
        for j, second in enumerate(basis):
            if first.right != second.left:
                continue
            a = -(first.degree + second.degree)
            if a >= d:
                continue
            if first.is_idempotent:
                products[(i, j)] = {j: field.one}
                continue
            if second.is_idempotent:
                products[(i, j)] = {i: field.one}
                continue
            frame = frames.get((first.left, second.right, a))
            if frame is None:
                continue
            composite = category.compose(morphisms[j], morphisms[i])
            block = category.hom(summands[second.right], summands[first.left], -a)
            coordinates = frame.change.solve(block.coordinates(composite, field))
            if coordinates is None:
                raise InvariantViolation(f"composite {basis[i].label}·{basis[j].label} left its hom block")
            vector = {frame.indices[k]: coordinates.rows[k][0] for k in range(coordinates.nrows) if coordinates.rows[k][0] != field.zero}
            if vector:
                products[(i, j)] = vector
    algebra = FinDimGradedAlgebra(field, vertices, tuple(basis), products, {}, tuple(range(len(summands))))
    return algebra, morphisms


@dataclass
class MoritaContext:
    quotient: QuotientCategory
    algebra: FinDimGradedAlgebra
    morphisms: list[ClusterMorphism]
    depth: int | None = None
    _modules: dict[str, DGModule] = dataclass_field(default_factory=dict, repr=False)
    _resolutions: dict[str, SemiFreeModule] = dataclass_field(default_factory=dict, repr=False)
    _homs: dict[tuple[str, str, tuple[int, int] | None], DerivedHom] = dataclass_field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.depth is None:
            self.depth = default_depth(self.d)

    @property
    def category(self):
        return self.quotient.category

    @property
    def d(self) -> int:
        return self.quotient.d

    @property
    def summands(self) -> list[str]:
        return self.quotient.summands

    def f_m(self, name: str) -> DGModule:
        key = self.category.object(name).name
        if key not in self._modules:
            self._modules[key] = self._transport(key)
        return self._modules[key]

    def _transport(self, name: str) -> DGModule:
        category = self.category
        field = category.field
        d = self.d
        blocks = {(-j, v): category.hom(summand, name, d - j) for v, summand in enumerate(self.summands) for j in range(d)}
        dims = {key: block.dimension for key, block in blocks.items()}
        action = {}
        for b, element in enumerate(self.algebra.basis):
            if element.is_idempotent:
                continue
            for j in range(d):
                landing = -j + element.degree
                source = blocks[(-j, element.left)]
                if landing <= -d or not source.dimension:
                    continue
                target = blocks[(landing, element.right)]
                if not target.dimension:
                    continue
                columns = [target.coordinates(category.compose(self.morphisms[b], phi), field) for phi in source.basis()]
                action[(b, -j)] = hstack(field, columns)
        return DGModule(self.algebra, dims, {}, action)

    def f_m_map(self, morphism: ClusterMorphism) -> ModuleMap:
        """The module map induced by a degree-0 morphism X -> Y."""
        if morphism.degree != 0:
            raise ValueError("only degree-0 morphisms are transported")
        category = self.category
        field = category.field
        source, target = self.f_m(morphism.source), self.f_m(morphism.target)
        blocks = {}
        for v, summand in enumerate(self.summands):
            for j in range(self.d):
                before = category.hom(summand, morphism.source, self.d - j)
                after = category.hom(summand, morphism.target, self.d - j)
                if not before.dimension:
                    continue
                columns = [after.coordinates(category.compose(phi, morphism), field) for phi in before.basis()]
                blocks[(-j, v)] = hstack(field, columns)
        return ModuleMap(source, target, 0, blocks)

    def transport_table(self) -> dict[str, DGModule]:
        return {name: self.f_m(name) for name in self.quotient.surviving()}

    def resolution(self, name: str) -> SemiFreeModule:
        key = self.category.object(name).name
        if key not in self._resolutions:
            self._resolutions[key] = semifree_resolution(self.f_m(key), self.depth)
        return self._resolutions[key]

    def rhom(self, source: str, target: str, window: tuple[int, int] | None = None) -> DerivedHom:
        x, y = self.category.object(source).name, self.category.object(target).name
        key = (x, y, window)
        if key not in self._homs:
            self._homs[key] = rhom(self.f_m(x), self.f_m(y), self.d, window, resolution=self.resolution(x))
        return self._homs[key]


def build_context(quotient: QuotientCategory, depth: int | None = None) -> MoritaContext:
    algebra, morphisms = extract_lambda(quotient)
    return MoritaContext(quotient, algebra, morphisms, depth)


def context_over(n: int, d: int, summands: list[str], field: Any, depth: int | None = None) -> MoritaContext:
    return build_context(quotient_by(build(n, d, field), summands), depth)


def _local_radical(ctx: MoritaContext, name: str) -> list[ExactMatrix]:
    """H^0 coordinates spanning rad End(f_m X) for an indecomposable X."""
    algebra = endomorphism_algebra(ctx.f_m(name), ctx.d, resolution=ctx.resolution(name))
    field = ctx.category.field
    size = algebra.dimension
    vectors = []
    for i in range(size):
        unit = ExactMatrix.from_entries(field, size, 1, {(i, 0): field.one})
        multiplication = algebra.left_multiplication(unit)
        eigenvalue = _single_eigenvalue(multiplication, field)
        vectors.append(unit - algebra.identity.scale(eigenvalue))
    if not vectors:
        return []
    span = hstack(field, vectors).column_basis()
    return [span.submatrix(range(span.nrows), [c]) for c in range(span.ncols)]


def _single_eigenvalue(matrix: ExactMatrix, field: Any) -> Any:
    size = matrix.nrows
    candidates = field_elements(field) if not field.is_QQ else [sum((matrix.rows[k][k] for k in range(size)), field.zero) / field.convert(size)]
    for value in candidates:
        shifted = matrix - ExactMatrix.identity(field, size).scale(value)
        power = shifted
        for _ in range(size):
            power = power @ shifted
        if power.is_zero():
            return value
    raise InvariantViolation("endomorphism algebra is not local")


def lambda_ar_quiver(ctx: MoritaContext) -> nx.MultiDiGraph:
    """rad/rad² of H^0 Hom between transported modules."""
    field = ctx.category.field
    survivors = ctx.quotient.surviving()
    radicals: dict[tuple[str, str], list[ExactMatrix]] = {}
    for x in survivors:
        for y in survivors:
            hom = ctx.rhom(x, y, (0, 0))
            size = hom.dimension(0)
            if not size:
                radicals[(x, y)] = []
            elif x == y:
                radicals[(x, y)] = _local_radical(ctx, x)
            else:
                radicals[(x, y)] = [ExactMatrix.from_entries(field, size, 1, {(i, 0): field.one}) for i in range(size)]
    graph = nx.MultiDiGraph()
    for name in survivors:
        graph.add_node(name)
    for x in survivors:
        for y in survivors:
            if not radicals[(x, y)]:
                continue
            target = ctx.rhom(x, y, (0, 0))
            size = target.dimension(0)
            squares = []
            for z in survivors:
                if not radicals[(x, z)] or not radicals[(z, y)]:
                    continue
                first, second = ctx.rhom(x, z, (0, 0)), ctx.rhom(z, y, (0, 0))
                first_reps = first.homs.space(0).representatives
                second_reps = second.homs.space(0).representatives
                for f in radicals[(x, z)]:
                    for g in radicals[(z, y)]:
                        composite = compose_derived(first, first_reps @ f, second, second_reps @ g)
                        squares.append(target.classify(composite))
            count = span_rank(field, radicals[(x, y)], size) - span_rank(field, squares, size)
            for _ in range(count):
                graph.add_edge(x, y, kind="arrow")
    return graph


def arrow_multiset(graph: nx.MultiDiGraph) -> list[tuple[str, str]]:
    return sorted((source, target) for source, target, data in graph.edges(data=True) if data.get("kind", "arrow") == "arrow")


@dataclass
class EnumerationReport:
    bound: int
    examined: int = 0
    valid: int = 0
    matched: set[str] = dataclass_field(default_factory=set)
    unmatched: list[dict[str, Any]] = dataclass_field(default_factory=list)
    expected: set[str] = dataclass_field(default_factory=set)

    @property
    def classes(self) -> int:
        return len(self.matched) + len(self.unmatched)

    @property
    def passed(self) -> bool:
        return not self.unmatched and self.matched == self.expected

    def to_json(self) -> dict[str, Any]:
        return {
            "bound": self.bound,
            "examined": self.examined,
            "valid_modules": self.valid,
            "classes": self.classes,
            "matched": sorted(self.matched),
            "missing": sorted(self.expected - self.matched),
            "unmatched": self.unmatched,
            "passed": self.passed,
        }


def _dimension_vectors(blocks: list[tuple[int, int]], bound: int) -> Iterator[dict[tuple[int, int], int]]:
    for sizes in itertools.product(range(bound + 1), repeat=len(blocks)):
        if 0 < sum(sizes) <= bound:
            yield {block: size for block, size in zip(blocks, sizes) if size}


def enumerate_modules(algebra: FinDimGradedAlgebra, d: int, bound: int) -> Iterator[DGModule]:
    """Every DG-module with components in degrees (-d, 0] and total dimension <= bound."""
    field = algebra.field
    elements = field_elements(field)
    vertices = range(len(algebra.vertices))
    blocks = [(i, v) for i in range(-d + 1, 1) for v in vertices]
    moving = [b for b, element in enumerate(algebra.basis) if not element.is_idempotent]
    for dims in _dimension_vectors(blocks, bound):
        slots: list[tuple[str, tuple[int, int], int, int]] = []
        for (i, v), size in sorted(dims.items()):
            upper = dims.get((i + 1, v), 0)
            if upper:
                slots.append(("d", (i, v), upper, size))
        for b in moving:
            element = algebra.basis[b]
            for i in range(-d + 1, 1):
                rows, columns = dims.get((i + element.degree, element.right), 0), dims.get((i, element.left), 0)
                if rows and columns:
                    slots.append(("a", (b, i), rows, columns))
        count = sum(rows * columns for _, _, rows, columns in slots)
        if len(elements) ** count > MAX_ASSIGNMENTS:
            raise ValueError(f"enumeration of dimension vector {dims} needs {len(elements)}^{count} assignments")
        for values in itertools.product(elements, repeat=count):
            differential, action, offset = {}, {}, 0
            for kind, key, rows, columns in slots:
                chunk = values[offset : offset + rows * columns]
                offset += rows * columns
                matrix = ExactMatrix(field, [chunk[r * columns : (r + 1) * columns] for r in range(rows)], rows, columns)
                (differential if kind == "d" else action)[key] = matrix
            module = DGModule(algebra, dims, differential, action)
            if not module.failures():
                yield module


def brute_force_classes(ctx: MoritaContext, bound: int = DEFAULT_ENUMERATION_BOUND) -> EnumerationReport:
    """Match every indecomposable module up to `bound` against the transport table."""
    field = ctx.category.field
    if field.is_QQ:
        raise ValueError("brute-force enumeration needs a finite field; build the context over F_p")
    table = ctx.transport_table()
    signatures = {name: module.cohomology_dims() for name, module in table.items()}
    report = EnumerationReport(bound, expected={name for name, module in table.items() if module.total_dimension() <= bound})
    for module in enumerate_modules(ctx.algebra, ctx.d, bound):
        report.examined += 1
        if module.is_acyclic():
            continue
        report.valid += 1
        signature = module.cohomology_dims()
        match = next(
            (name for name, expected in signatures.items() if expected == signature and derived_isomorphic(module, table[name], ctx.d, ctx.depth)),
            None,
        )
        if match is not None:
            report.matched.add(match)
            continue
        if is_indecomposable(module, ctx.d, ctx.depth):
            report.unmatched.append(module.to_json())
    return report


@dataclass
class EquivalenceReport:
    n: int
    d: int
    summands: list[str]
    pairs: list[dict[str, Any]] = dataclass_field(default_factory=list)
    indecomposable: dict[str, bool] = dataclass_field(default_factory=dict)
    collisions: list[list[str]] = dataclass_field(default_factory=list)
    vanishing_on_m: bool = True
    truncation: dict[str, bool] = dataclass_field(default_factory=dict)
    projective_homs: list[dict[str, Any]] = dataclass_field(default_factory=list)
    projectives: dict[str, str | None] = dataclass_field(default_factory=dict)
    injectives: dict[str, str | None] = dataclass_field(default_factory=dict)
    functoriality_failures: list[str] = dataclass_field(default_factory=list)
    ar_quiver_match: bool | None = None
    enumeration: EnumerationReport | None = None

    @property
    def mismatched_pairs(self) -> list[dict[str, Any]]:
        return [pair for pair in self.pairs if pair["quotient"] != pair["dem"]]

    @property
    def projective_hom_mismatches(self) -> list[dict[str, Any]]:
        return [row for row in self.projective_homs if row["quotient"] != row["ambient"]]

    @property
    def failures(self) -> list[str]:
        failures = [f"dim mismatch {p['source']}->{p['target']} in degree {p['degree']}: {p['quotient']} vs {p['dem']}" for p in self.mismatched_pairs]
        failures += [
            f"Hom out of projective {r['source']} to {r['target']} in degree {r['degree']}: quotient {r['quotient']} vs ambient {r['ambient']}"
            for r in self.projective_hom_mismatches
        ]
        failures += [f"{name} is sent to a decomposable module" for name, ok in self.indecomposable.items() if not ok]
        failures += [f"{x} and {y} are sent to isomorphic modules" for x, y in self.collisions]
        if not self.vanishing_on_m:
            failures.append("F_M does not vanish on add M")
        failures += [f"Ω^d or Σ^d is nonzero on {name}" for name, ok in self.truncation.items() if not ok]
        failures += [f"projective {name} has no free counterpart" for name, vertex in self.projectives.items() if vertex is None]
        failures += [f"injective {name} has no injective counterpart" for name, vertex in self.injectives.items() if vertex is None]
        failures += self.functoriality_failures
        if self.ar_quiver_match is False:
            failures.append("AR quivers differ across the bridge")
        if self.enumeration is not None and not self.enumeration.passed:
            failures.append("brute-force enumeration found modules outside the transport table")
        return failures

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": "tiltsight.verify.v1",
            "n": self.n,
            "d": self.d,
            "M": self.summands,
            "pairs": self.pairs,
            "pair_count": len({(p["source"], p["target"]) for p in self.pairs}),
            "projective_homs_checked": len(self.projective_homs),
            "projective_hom_mismatches": self.projective_hom_mismatches,
            "indecomposable": self.indecomposable,
            "collisions": self.collisions,
            "vanishing_on_m": self.vanishing_on_m,
            "truncation": self.truncation,
            "projectives": self.projectives,
            "injectives": self.injectives,
            "functoriality_failures": self.functoriality_failures,
            "ar_quiver_match": self.ar_quiver_match,
            "enumeration": self.enumeration.to_json() if self.enumeration else None,
            "failures": self.failures,
            "passed": self.passed,
        }


def _match_vertex(module: DGModule, candidates: dict[str, DGModule], d: int, depth: int) -> str | None:
    return next((vertex for vertex, other in candidates.items() if derived_isomorphic(module, other, d, depth)), None)


def check_functoriality(ctx: MoritaContext, limit: int | None = None) -> list[str]:
    """f_m(g∘f) = f_m(g)∘f_m(f) on degree-0 basis morphisms between survivors."""
    category = ctx.category
    survivors = ctx.quotient.surviving()
    failures = []
    checked = 0
    for x, y, z in itertools.product(survivors, repeat=3):
        first_block, second_block = category.hom(x, y, 0), category.hom(y, z, 0)
        for f in first_block.basis():
            for g in second_block.basis():
                if limit is not None and checked >= limit:
                    return failures
                checked += 1
                composite = ctx.f_m_map(category.compose(f, g))
                expected = ctx.f_m_map(g).compose(ctx.f_m_map(f))
                if any(not (composite.block(key) - expected.block(key)).is_zero() for key in ctx.f_m(x).dims):
                    failures.append(f"transport of a composite {x}->{y}->{z} is not the composite of transports")
    return failures


def verify_equivalence(
    ctx: MoritaContext,
    enumeration_bound: int | None = None,
    ar_quiver: bool = True,
    functoriality_limit: int | None = 64,
) -> EquivalenceReport:
    quotient = ctx.quotient
    category = ctx.category
    d = ctx.d
    report = EquivalenceReport(category.n, d, list(ctx.summands))
    survivors = quotient.surviving()
    table = ctx.transport_table()

    report.projective_homs = quotient.projective_hom_rows()
    report.vanishing_on_m = all(ctx.f_m(name).is_zero() for name in ctx.summands)
    for name, module in table.items():
        report.truncation[name] = omega_power(module, d).is_acyclic() and sigma_power(module, d, d).is_acyclic()

    for source in survivors:
        for target in survivors:
            hom = ctx.rhom(source, target)
            for degree in range(-d + 1, 1):
                report.pairs.append(
                    {"source": source, "target": target, "degree": degree, "quotient": quotient.hom(source, target, degree), "dem": hom.dimension(degree)}
                )

    for name in survivors:
        report.indecomposable[name] = is_indecomposable(table[name], d, ctx.depth)
    for x, y in itertools.combinations(survivors, 2):
        if table[x].cohomology_dims() == table[y].cohomology_dims() and derived_isomorphic(table[x], table[y], d, ctx.depth):
            report.collisions.append([x, y])

    frees = {ctx.algebra.vertices[v]: free_module(ctx.algebra, v).module for v in range(len(ctx.algebra.vertices))}
    injectives = {ctx.algebra.vertices[v]: shift_module(injective_module(ctx.algebra, v), d - 1) for v in range(len(ctx.algebra.vertices))}
    for name in quotient.projectives():
        report.projectives[name] = _match_vertex(ctx.f_m(name), frees, d, ctx.depth)
    for name in quotient.injectives():
        report.injectives[name] = _match_vertex(ctx.f_m(name), injectives, d, ctx.depth)

    report.functoriality_failures = check_functoriality(ctx, functoriality_limit)
    if ar_quiver:
        report.ar_quiver_match = arrow_multiset(lambda_ar_quiver(ctx)) == arrow_multiset(quotient.ar_quiver())
    if enumeration_bound is not None:
        finite = ctx if not category.field.is_QQ else context_over(category.n, d, ctx.summands, field_from_label(f"Fp:{ENUMERATION_PRIME}"), ctx.depth)
        report.enumeration = brute_force_classes(finite, enumeration_bound)
    return report
