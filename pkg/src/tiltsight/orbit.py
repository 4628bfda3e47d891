"""The (d+1)-cluster category of type A_n as the orbit category D^b(kA_n)/F, F = τ^{-1}[d].

Every indecomposable is stored through a lift (a, b, k) standing for M[a, b][k]
in a fundamental domain: mod kA_n in shifts 0..d-1 plus P_i[d]. A morphism
X -> Y[degree] is a finite sum over tags m of D^b morphisms X̂ -> F^m Ŷ[degree],
each given by coordinates in the corresponding Hom space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Iterable

import networkx as nx
from sympy.polys.domains.domain import Domain

from tiltsight.hereditary import (
    GradedMap,
    HomSpace,
    Lift,
    ProjectiveComplex,
    canonical_complex,
    cocone_of,
    complex_direct_sum,
    decompose,
    dimension_vector,
    hom_space,
    identity,
    isomorphism,
    minimize,
    orbit_functor,
    orbit_functor_map,
    orbit_step,
    orbit_step_inverse,
    zero_complex,
)
from tiltsight.complexes import InvariantViolation
from tiltsight.matrices import ExactMatrix, hstack, vstack


DEFAULT_SCAN_CAP = 16
NAME_RE = re.compile(r"^\s*P\s*[(_]?\s*(-?\d+)\s*[,^]\s*(\d+)\s*\)?\s*$")


class ScanWindowExceeded(RuntimeError):
    def __init__(self, what: str, cap: int) -> None:
        super().__init__(f"F-orbit scan for {what} did not reach an empty boundary within |m| <= {cap}")
        self.cap = cap


class SplicingFailure(InvariantViolation):
    pass


class UnknownObject(ValueError):
    pass


def object_name(column: int, row: int) -> str:
    return f"P({column},{row})"


def parse_object_names(text: str | Iterable[str]) -> list[str]:
    """Split "P(0,1)+P(2,1)" into canonical names; P_0^1 and P(0,1) are the same object."""
    items = text.split("+") if isinstance(text, str) else list(text)
    names = []
    for item in items:
        if not item.strip():
            continue
        match = NAME_RE.match(item)
        if not match:
            raise UnknownObject(f"cannot read object name {item!r}; expected P(j,k)")
        names.append(object_name(int(match.group(1)), int(match.group(2))))
    return names


@dataclass(frozen=True)
class ClusterObject:
    name: str
    column: int
    row: int
    lift: Lift

    def to_json(self, n: int) -> dict[str, Any]:
        a, b, k = self.lift
        return {
            "name": self.name,
            "row": self.row,
            "column": self.column,
            "lift": {"interval": [a, b], "shift": k},
            "dimension_vector": list(dimension_vector(self.lift, n)),
        }


@dataclass
class ClusterMorphism:
    """components[m] are coordinates in Hom_{D^b}(X̂, F^m Ŷ[degree])."""

    source: str
    target: str
    degree: int
    components: dict[int, ExactMatrix] = dataclass_field(default_factory=dict)

    def is_zero(self) -> bool:
        return all(vector.is_zero() for vector in self.components.values())


@dataclass
class HomBlock:
    source: str
    target: str
    degree: int
    parts: dict[int, HomSpace]

    @property
    def dimension(self) -> int:
        return sum(space.dimension for space in self.parts.values())

    def labels(self) -> list[tuple[int, int]]:
        return [(m, i) for m in sorted(self.parts) for i in range(self.parts[m].dimension)]

    def tag_dimensions(self) -> dict[int, int]:
        return {m: space.dimension for m, space in sorted(self.parts.items())}

    def basis(self) -> list[ClusterMorphism]:
        field = next(iter(self.parts.values())).hom.source.field if self.parts else None
        result = []
        for m, i in self.labels():
            size = self.parts[m].dimension
            vector = ExactMatrix.from_entries(field, size, 1, {(i, 0): field.one})
            result.append(ClusterMorphism(self.source, self.target, self.degree, {m: vector}))
        return result

    def coordinates(self, morphism: ClusterMorphism, field: Domain) -> ExactMatrix:
        pieces = []
        for m in sorted(self.parts):
            size = self.parts[m].dimension
            pieces.append(morphism.components.get(m, ExactMatrix.zeros(field, size, 1)))
        for m, vector in morphism.components.items():
            if m not in self.parts and not vector.is_zero():
                raise ValueError(f"morphism has a component at tag {m} outside the scanned window")
        return vstack(field, pieces) if pieces else ExactMatrix.zeros(field, 0, 1)

    def from_coordinates(self, vector: ExactMatrix) -> ClusterMorphism:
        components = {}
        offset = 0
        for m in sorted(self.parts):
            size = self.parts[m].dimension
            components[m] = vector.submatrix(range(offset, offset + size), [0])
            offset += size
        return ClusterMorphism(self.source, self.target, self.degree, components)


@dataclass
class GradedHomSpace:
    source: str
    target: str
    blocks: dict[int, HomBlock]

    def dims(self) -> dict[int, int]:
        return {degree: block.dimension for degree, block in sorted(self.blocks.items())}


@dataclass
class Approximation:
    """A single D^b map ⊕ canon(lifts) -> target."""

    lifts: list[Lift]
    names: list[str]
    source: ProjectiveComplex
    morphism: GradedMap


@dataclass
class TowerStage:
    index: int
    complex: ProjectiveComplex
    summands: list[tuple[str, int]]
    approximation_size: int
    in_add_m: bool

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.summands]


@dataclass
class SplicingTower:
    target: str
    stages: list[TowerStage]

    def loop(self, i: int) -> TowerStage:
        return self.stages[i]


@dataclass
class ClusterTiltingReport:
    holds: bool
    violations: list[dict[str, Any]]

    def to_json(self) -> dict[str, Any]:
        return {"cluster_tilting": self.holds, "violations": self.violations}


@dataclass
class ClusterCategory:
    n: int
    d: int
    field: Domain
    objects: list[ClusterObject]
    scan_cap: int = DEFAULT_SCAN_CAP
    _by_name: dict[str, ClusterObject] = dataclass_field(default_factory=dict, repr=False)
    _by_lift: dict[Lift, str] = dataclass_field(default_factory=dict, repr=False)
    _locate_cache: dict[Lift, tuple[str, int]] = dataclass_field(default_factory=dict, repr=False)
    _canon_cache: dict[Lift, ProjectiveComplex] = dataclass_field(default_factory=dict, repr=False)
    _hom_cache: dict[tuple[Lift, Lift, int], HomSpace] = dataclass_field(default_factory=dict, repr=False)
    _block_cache: dict[tuple[str, str, int], HomBlock] = dataclass_field(default_factory=dict, repr=False)
    _step_cache: dict[tuple[Lift, Lift, int], ExactMatrix] = dataclass_field(default_factory=dict, repr=False)
    _iso_cache: dict[Lift, tuple[GradedMap, GradedMap]] = dataclass_field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._by_name = {obj.name: obj for obj in self.objects}
        self._by_lift = {obj.lift: obj.name for obj in self.objects}

    def names(self) -> list[str]:
        return [obj.name for obj in self.objects]

    def object(self, name: str) -> ClusterObject:
        canonical = parse_object_names([name])[0]
        try:
            return self._by_name[canonical]
        except KeyError:
            raise UnknownObject(f"{name!r} is not an object of the cluster category of A_{self.n}, d={self.d}") from None

    def lift(self, name: str) -> Lift:
        return self.object(name).lift

    def iterate(self, lift: Lift, m: int) -> Lift:
        for _ in range(abs(m)):
            lift = orbit_step(lift, self.n, self.d) if m > 0 else orbit_step_inverse(lift, self.n, self.d)
        return lift

    def locate(self, lift: Lift) -> tuple[str, int]:
        """(name, m) with lift = F^m(lift of name)."""
        return locate_in_domain(self, lift)

    def canonical(self, lift: Lift) -> ProjectiveComplex:
        if lift not in self._canon_cache:
            self._canon_cache[lift] = canonical_complex(self.n, self.field, lift)
        return self._canon_cache[lift]

    def lift_hom(self, source: Lift, target: Lift, degree: int = 0) -> HomSpace:
        key = (source, target, degree)
        if key not in self._hom_cache:
            self._hom_cache[key] = hom_space(self.canonical(source), self.canonical(target), degree)
        return self._hom_cache[key]

    def hom(self, source: str, target: str, degree: int = 0) -> HomBlock:
        """Hom_𝒞(X, Y[degree]) as the sum over tags m of Hom_{D^b}(X̂, F^m Ŷ[degree])."""
        key = (self.object(source).name, self.object(target).name, degree)
        if key in self._block_cache:
            return self._block_cache[key]
        x_lift, y_lift = self.lift(source), self.lift(target)
        width = 2 + (2 + abs(degree)) // self.d
        while True:
            if width > self.scan_cap:
                raise ScanWindowExceeded(f"Hom({source}, {target}[{degree}])", self.scan_cap)
            boundary = [self.lift_hom(x_lift, self.iterate(y_lift, m), degree).dimension for m in (-width, width)]
            if not any(boundary):
                break
            width += 1
        parts = {}
        for m in range(-width + 1, width):
            space = self.lift_hom(x_lift, self.iterate(y_lift, m), degree)
            if space.dimension:
                parts[m] = space
        block = HomBlock(key[0], key[1], degree, parts)
        self._block_cache[key] = block
        return block

    def graded_hom(self, source: str, target: str, window: Iterable[int]) -> GradedHomSpace:
        return GradedHomSpace(source, target, {degree: self.hom(source, target, degree) for degree in sorted(set(window))})

    def identity(self, name: str) -> ClusterMorphism:
        lift = self.lift(name)
        vector = self.lift_hom(lift, lift, 0).classify(identity(self.canonical(lift)))
        return ClusterMorphism(self.object(name).name, self.object(name).name, 0, {0: vector})

    def _isomorphisms(self, lift: Lift) -> tuple[GradedMap, GradedMap]:
        """(φ, ψ) with φ: F(canon A) -> canon(FA), ψ: canon(FA) -> F(canon A), φ∘ψ = id."""
        if lift not in self._iso_cache:
            image = orbit_functor(self.canonical(lift), self.d)
            target = self.canonical(orbit_step(lift, self.n, self.d))
            forward = isomorphism(image, target)
            backward = isomorphism(target, image)
            end = self.lift_hom(orbit_step(lift, self.n, self.d), orbit_step(lift, self.n, self.d), 0)
            loop = end.classify(forward.compose(backward))
            unit = end.classify(identity(target))
            backward = backward.scale(unit.rows[0][0] / loop.rows[0][0])
            self._iso_cache[lift] = (forward, backward)
        return self._iso_cache[lift]

    def _step_matrix(self, source: Lift, target: Lift, degree: int) -> ExactMatrix:
        """Matrix of F on Hom(canon A, canon B[degree]) in the chosen cohomology bases."""
        key = (source, target, degree)
        if key not in self._step_cache:
            space = self.lift_hom(source, target, degree)
            image_space = self.lift_hom(orbit_step(source, self.n, self.d), orbit_step(target, self.n, self.d), degree)
            _, backward = self._isomorphisms(source)
            forward, _ = self._isomorphisms(target)
            columns = [
                image_space.classify(forward.compose(orbit_functor_map(g, self.d)).compose(backward))
                for g in space.basis()
            ]
            if columns:
                matrix = hstack(self.field, columns)
            else:
                matrix = ExactMatrix.zeros(self.field, image_space.dimension, 0)
            self._step_cache[key] = matrix
        return self._step_cache[key]

    def transport(self, source: Lift, target: Lift, degree: int, vector: ExactMatrix, m: int) -> tuple[Lift, Lift, ExactMatrix]:
        """Apply F^m to a D^b morphism given by coordinates."""
        while m > 0:
            vector = self._step_matrix(source, target, degree) @ vector
            source, target = orbit_step(source, self.n, self.d), orbit_step(target, self.n, self.d)
            m -= 1
        while m < 0:
            previous = orbit_step_inverse(source, self.n, self.d), orbit_step_inverse(target, self.n, self.d)
            matrix = self._step_matrix(*previous, degree)
            solution = matrix.solve(vector) if matrix.ncols else ExactMatrix.zeros(self.field, 0, 1)
            if solution is None:
                raise ArithmeticError("F is not invertible on a Hom space; check the orbit functor")
            vector = solution
            source, target = previous
            m += 1
        return source, target, vector

    def compose_lifts(
        self, source: Lift, middle: Lift, target: Lift, first_degree: int, first: ExactMatrix, second_degree: int, second: ExactMatrix
    ) -> ExactMatrix:
        f = self.lift_hom(source, middle, first_degree).from_coordinates(first)
        g = self.lift_hom(middle, target, second_degree).from_coordinates(second)
        return self.lift_hom(source, target, first_degree + second_degree).classify(g.compose(f))

    def compose(self, f: ClusterMorphism, g: ClusterMorphism) -> ClusterMorphism:
        """g ∘ f for f: X -> Y[a] and g: Y -> Z[b]."""
        if self.object(f.target).name != self.object(g.source).name:
            raise ValueError(f"cannot compose {f.source}->{f.target} with {g.source}->{g.target}")
        x_lift, y_lift, z_lift = self.lift(f.source), self.lift(f.target), self.lift(g.target)
        degree = f.degree + g.degree
        result: dict[int, ExactMatrix] = {}
        for m, v in sorted(f.components.items()):
            if v.is_zero():
                continue
            for l, w in sorted(g.components.items()):
                if w.is_zero():
                    continue
                middle, target, moved = self.transport(y_lift, self.iterate(z_lift, l), g.degree, w, m)
                coords = self.compose_lifts(x_lift, middle, target, f.degree, v, g.degree, moved)
                if coords.nrows == 0 or coords.is_zero():
                    continue
                result[m + l] = result[m + l] + coords if m + l in result else coords
        return ClusterMorphism(f.source, g.target, degree, result)

    def morphism_to_map(self, morphism: ClusterMorphism, tag: int) -> GradedMap:
        source = self.lift(morphism.source)
        target = self.iterate(self.lift(morphism.target), tag)
        return self.lift_hom(source, target, morphism.degree).from_coordinates(morphism.components[tag])

    def shift_object(self, name: str, k: int = 1) -> str:
        a, b, shift = self.lift(name)
        return self.locate((a, b, shift + k))[0]

    def tau_object(self, name: str) -> str:
        a, b, k = self.lift(name)
        lift = (a + 1, b + 1, k) if b < self.n else (1, a, k - 1)
        return self.locate(lift)[0]

    def tau_inverse_object(self, name: str) -> str:
        a, b, k = self.lift(name)
        lift = (a - 1, b - 1, k) if a > 1 else (b, self.n, k + 1)
        return self.locate(lift)[0]

    def shift_permutation(self, k: int = 1) -> dict[str, str]:
        return {name: self.shift_object(name, k) for name in self.names()}

    def decompose_complex(self, complex_: ProjectiveComplex) -> list[tuple[str, int]]:
        """Indecomposable summands as (name, tag), sorted."""
        summands = []
        for lift, multiplicity in sorted(decompose(complex_).items()):
            summands.extend([self.locate(lift)] * multiplicity)
        return sorted(summands)

    def certify_indecomposable(self, name: str) -> None:
        block = self.hom(name, name, 0)
        if block.tag_dimensions().get(0) != 1:
            raise ValueError(f"End^0({name}) is not local: tag dimensions {block.tag_dimensions()}")

    def is_cluster_tilting(self, summands: Iterable[str]) -> ClusterTiltingReport:
        members = sorted({self.object(name).name for name in summands})
        violations: list[dict[str, Any]] = []
        for name in self.names():
            inside = name in members
            right = [i for i in range(1, self.d + 1) for m in members if self.hom(name, m, i).dimension]
            left = [i for i in range(1, self.d + 1) for m in members if self.hom(m, name, i).dimension]
            if inside and (right or left):
                violations.append({"object": name, "reason": "not rigid", "degrees": sorted(set(right + left))})
            if not inside and not right:
                violations.append({"object": name, "reason": "Hom(X, M[i]) vanishes for 1 <= i <= d but X is not in add M"})
            if not inside and not left:
                violations.append({"object": name, "reason": "Hom(M, X[i]) vanishes for 1 <= i <= d but X is not in add M"})
        return ClusterTiltingReport(not violations and bool(members), violations)

    def tag_window(self, complex_: ProjectiveComplex) -> int:
        reach = max((abs(degree) for degree in complex_.support()), default=0)
        return 2 + (reach + 2) // self.d

    def right_approximation(self, summands: Iterable[str], target: ProjectiveComplex) -> Approximation:
        """Full-basis right add M-approximation, folded on the source."""
        members = sorted({self.object(name).name for name in summands})
        return self._approximation(members, target, right=True)

    def left_approximation(self, summands: Iterable[str], source: ProjectiveComplex) -> Approximation:
        """Full-basis left add M-approximation, folded on the target."""
        members = sorted({self.object(name).name for name in summands})
        return self._approximation(members, source, right=False)

    def _approximation(self, members: list[str], other: ProjectiveComplex, right: bool) -> Approximation:
        width = self.tag_window(other)
        while True:
            if width > self.scan_cap:
                raise ScanWindowExceeded("an approximation", self.scan_cap)
            edge = 0
            for name in members:
                for t in (-width, width):
                    lift = self.iterate(self.lift(name), t)
                    pair = (self.canonical(lift), other) if right else (other, self.canonical(lift))
                    edge += hom_space(*pair, 0).dimension
            if not edge:
                break
            width += 1
        lifts: list[Lift] = []
        names: list[str] = []
        maps: list[GradedMap] = []
        for name in members:
            for t in range(-width + 1, width):
                lift = self.iterate(self.lift(name), t)
                canon = self.canonical(lift)
                space = hom_space(canon, other, 0) if right else hom_space(other, canon, 0)
                for basis_map in space.basis():
                    lifts.append(lift)
                    names.append(name)
                    maps.append(basis_map)
        if not lifts:
            empty = zero_complex(self.n, self.field)
            morphism = GradedMap(empty, other, 0, {}) if right else GradedMap(other, empty, 0, {})
            return Approximation([], [], empty, morphism)
        total = complex_direct_sum([self.canonical(lift) for lift in lifts])
        blocks = {}
        if right:
            for p in total.support():
                pieces = [m.block(p) for m in maps]
                blocks[p] = hstack(self.field, pieces)
            morphism = GradedMap(total, other, 0, blocks)
        else:
            for p in other.support():
                pieces = [m.block(p) for m in maps]
                blocks[p] = vstack(self.field, pieces)
            morphism = GradedMap(other, total, 0, blocks)
        return Approximation(lifts, names, total, morphism)

    def splicing_tower(self, summands: Iterable[str], target: str, strict: bool = True) -> SplicingTower:
        """K_0 = Y and triangles K_i -> C_i -> K_{i-1} with C_i in add M.

        With strict=False a K_d outside add M is recorded on the last stage instead of raising.
        """
        members = sorted({self.object(name).name for name in summands})
        current = self.canonical(self.lift(target))
        stages = [TowerStage(0, current, [(self.object(target).name, 0)], 0, self.object(target).name in members)]
        for i in range(1, self.d + 1):
            approximation = self.right_approximation(members, current)
            if approximation.lifts:
                current = minimize(cocone_of(approximation.morphism)).complex
            else:
                current = current.shift(-1)
            found = self.decompose_complex(current)
            stages.append(TowerStage(i, current, found, len(approximation.lifts), all(name in members for name, _ in found)))
        if strict and not stages[-1].in_add_m:
            raise SplicingFailure(f"K_{self.d} of {target} is not in add M: {stages[-1].names}")
        return SplicingTower(self.object(target).name, stages)

    def ar_quiver(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        for obj in self.objects:
            graph.add_node(obj.name, row=obj.row, column=obj.column)
        for source, target, count in irreducible_counts(self, self.names()):
            for _ in range(count):
                graph.add_edge(source, target, kind="arrow")
        for obj in self.objects:
            graph.add_edge(obj.name, self.tau_object(obj.name), kind="tau")
        return graph


def radical_vectors(category: ClusterCategory, source: str, target: str) -> list[ExactMatrix]:
    """rad(X, Y) in degree 0: everything for X != Y, the nonzero tags on End(X)."""
    block = category.hom(source, target, 0)
    result = []
    for vector_morphism in block.basis():
        if source == target and 0 in vector_morphism.components:
            continue
        result.append(block.coordinates(vector_morphism, category.field))
    return result


def irreducible_counts(category: ClusterCategory, names: list[str], ideal: Any = None) -> list[tuple[str, str, int]]:
    """dim rad/rad² for every ordered pair; `ideal(X, Y)` optionally adds a subspace to both."""
    field = category.field
    radicals = {(x, y): radical_vectors(category, x, y) for x in names for y in names}
    counts = []
    for x in names:
        for y in names:
            block = category.hom(x, y, 0)
            if not block.dimension:
                continue
            extra = ideal(x, y) if ideal is not None else []
            rad = radicals[(x, y)] + extra
            squares = list(extra)
            for z in names:
                if not radicals[(x, z)] or not radicals[(z, y)]:
                    continue
                first_block = category.hom(x, z, 0)
                second_block = category.hom(z, y, 0)
                for f in radicals[(x, z)]:
                    for g in radicals[(z, y)]:
                        composite = category.compose(first_block.from_coordinates(f), second_block.from_coordinates(g))
                        squares.append(block.coordinates(composite, field))
            count = _span_dim(field, rad, block.dimension) - _span_dim(field, squares, block.dimension)
            if count:
                counts.append((x, y, count))
    return counts


def _span_dim(field: Domain, vectors: list[ExactMatrix], size: int) -> int:
    vectors = [v for v in vectors if v.nrows]
    if not vectors or not size:
        return 0
    return hstack(field, vectors).rank()


def in_domain(lift: Lift, n: int, d: int) -> bool:
    a, b, k = lift
    return 0 <= k < d or (k == d and b == n)


def fold_lift(lift: Lift, n: int, d: int, cap: int = DEFAULT_SCAN_CAP) -> tuple[Lift, int]:
    """(rep, m) with rep in the fundamental domain and lift = F^m(rep)."""
    current, m = lift, 0
    for _ in range(4 * cap + abs(lift[2])):
        if in_domain(current, n, d):
            return current, m
        if current[2] < 0:
            current = orbit_step(current, n, d)
            m -= 1
        else:
            current = orbit_step_inverse(current, n, d)
            m += 1
    raise ScanWindowExceeded(f"locating {lift}", cap)


def locate_in_domain(category: ClusterCategory, lift: Lift) -> tuple[str, int]:
    if lift not in category._locate_cache:
        rep, m = fold_lift(lift, category.n, category.d, category.scan_cap)
        category._locate_cache[lift] = (category._by_lift[rep], m)
    return category._locate_cache[lift]


def fundamental_domain(n: int, d: int) -> list[Lift]:
    lifts = [(a, b, k) for k in range(d) for a in range(1, n + 1) for b in range(a, n + 1)]
    lifts += [(a, n, d) for a in range(1, n + 1)]
    return lifts


def _tau_inverse_lift(lift: Lift, n: int) -> Lift:
    a, b, k = lift
    return (a - 1, b - 1, k) if a > 1 else (b, n, k + 1)


def name_objects(n: int, d: int, cap: int = DEFAULT_SCAN_CAP) -> dict[Lift, tuple[int, int]]:
    """Row k starts at the projective P_{n+1-k}; columns walk τ^{-1} until the orbit closes."""
    named: dict[Lift, tuple[int, int]] = {}
    for row in range(1, n + 1):
        walker, _ = fold_lift((n + 1 - row, n, 0), n, d, cap)
        column = 0
        while walker not in named:
            named[walker] = (column, row)
            column += 1
            walker, _ = fold_lift(_tau_inverse_lift(walker, n), n, d, cap)
    return named


def build(n: int, d: int, field: Domain, scan_cap: int = DEFAULT_SCAN_CAP) -> ClusterCategory:
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    named = name_objects(n, d, scan_cap)
    if len(named) != len(fundamental_domain(n, d)):
        raise ScanWindowExceeded("naming the τ-orbits", scan_cap)
    objects = [ClusterObject(object_name(column, row), column, row, lift) for lift, (column, row) in named.items()]
    objects.sort(key=lambda obj: (obj.row, obj.column))
    category = ClusterCategory(n, d, field, objects, scan_cap)
    for obj in objects:
        category.certify_indecomposable(obj.name)
    return category
