"""Ideal quotient 𝒯/[add M] of the cluster category by a cluster-tilting object.

Degree 0 is computed directly: Hom_𝒞(X, Y) modulo the span of composites
X -> M_i -> Y. Degree -i goes through the splicing tower, using
H^{-i}(X, Y) = H^0(X, K_i(Y)). The truncated bar complex gives a second,
transport-free computation of degree 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Any, Callable, Iterable

import networkx as nx

from tiltsight.complexes import InvariantViolation
from tiltsight.hereditary import (
    GradedMap,
    Lift,
    ProjectiveComplex,
    complex_direct_sum,
    cocone_projection,
    cone_inclusion,
    cone_projection,
    hom_space,
    zero_graded_map,
)
from tiltsight.matrices import ExactMatrix, hstack, in_span, quotient_projection, span_rank, vstack
from tiltsight.orbit import (
    ClusterCategory,
    ClusterMorphism,
    ClusterTiltingReport,
    HomBlock,
    ScanWindowExceeded,
    SplicingTower,
    irreducible_counts,
)


Factor = tuple[Lift, Lift, int, int]
Chain = tuple[Factor, ...]


class NotClusterTilting(ValueError):
    def __init__(self, summands: list[str], report: ClusterTiltingReport) -> None:
        super().__init__(f"{'+'.join(summands) or '0'} is not cluster-tilting ({len(report.violations)} violations)")
        self.report = report


class WindowTooSmall(ValueError):
    pass


class EquivalenceViolation(InvariantViolation):
    pass


@dataclass
class QuotientSpace:
    """Hom_𝒞(X, Y) with the factoring subspace and a projection onto the quotient."""

    block: HomBlock
    factoring: ExactMatrix
    projection: ExactMatrix

    @property
    def dimension(self) -> int:
        return self.projection.nrows

    def project(self, morphism: ClusterMorphism) -> ExactMatrix:
        return self.projection @ self.block.coordinates(morphism, self.projection.field)


@dataclass
class MorphismWitness:
    kind: str
    holds: bool
    factors: bool
    surjective: bool

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "holds": self.holds, "connecting_map_factors": self.factors, "restricted_epimorphism": self.surjective}


@dataclass
class QuotientCategory:
    category: ClusterCategory
    summands: list[str]
    forced: bool = False
    _towers: dict[str, SplicingTower] = dataclass_field(default_factory=dict, repr=False)
    _spaces: dict[tuple[str, str], QuotientSpace] = dataclass_field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.summands = sorted({self.category.object(name).name for name in self.summands})

    @property
    def d(self) -> int:
        return self.category.d

    @property
    def default_bar_length(self) -> int:
        return self.category.d + 2

    def surviving(self) -> list[str]:
        return [name for name in self.category.names() if name not in self.summands]

    def tower(self, name: str) -> SplicingTower:
        key = self.category.object(name).name
        if key not in self._towers:
            self._towers[key] = self.category.splicing_tower(self.summands, key, strict=not self.forced)
        return self._towers[key]

    def factoring_subspace(self, source: str, target: str) -> ExactMatrix:
        """Columns spanning the maps X -> Y that factor through add M."""
        category = self.category
        block = category.hom(source, target, 0)
        columns = []
        for member in self.summands:
            first_block = category.hom(source, member, 0)
            second_block = category.hom(member, target, 0)
            if not first_block.dimension or not second_block.dimension:
                continue
            for f in first_block.basis():
                for g in second_block.basis():
                    columns.append(block.coordinates(category.compose(f, g), category.field))
        if not columns or not block.dimension:
            return ExactMatrix.zeros(category.field, block.dimension, 0)
        return hstack(category.field, columns).column_basis()

    def space(self, source: str, target: str) -> QuotientSpace:
        key = (self.category.object(source).name, self.category.object(target).name)
        if key not in self._spaces:
            block = self.category.hom(*key, 0)
            factoring = self.factoring_subspace(*key)
            projection, _ = quotient_projection(factoring, block.dimension)
            self._spaces[key] = QuotientSpace(block, factoring, projection)
        return self._spaces[key]

    def hom(self, source: str, target: str, degree: int = 0) -> int:
        """dim H^degree of the quotient Hom; degree -i is read off K_i of the target's tower."""
        if degree > 0 or -degree >= self.d:
            return 0
        if degree == 0:
            return self.space(source, target).dimension
        stage = self.tower(target).loop(-degree)
        return sum(self.space(source, name).dimension for name, _ in stage.summands)

    def graded_hom(self, source: str, target: str) -> dict[int, int]:
        return {degree: self.hom(source, target, degree) for degree in range(-self.d + 1, 1)}

    def hom_table(self) -> dict[str, dict[str, int]]:
        table = {}
        for source in self.surviving():
            for target in self.surviving():
                dims = self.graded_hom(source, target)
                table[f"{source}->{target}"] = {str(degree): size for degree, size in sorted(dims.items())}
        return table

    def projectives(self) -> list[str]:
        return sorted({self.category.shift_object(name, -self.d) for name in self.summands})

    def injectives(self) -> list[str]:
        return sorted({self.category.shift_object(name, self.d) for name in self.summands})

    def projective_hom_rows(self) -> list[dict[str, Any]]:
        """Quotient against ambient Hom out of add(M[-d]); the two agree in every degree of (-d, 0]."""
        rows = []
        for source in self.projectives():
            for target in self.category.names():
                for degree in range(-self.d + 1, 1):
                    rows.append(
                        {
                            "source": source,
                            "target": target,
                            "degree": degree,
                            "quotient": self.hom(source, target, degree),
                            "ambient": self.category.hom(source, target, degree).dimension,
                        }
                    )
        return rows

    def is_projective(self, name: str) -> bool:
        return self.category.object(name).name in self.projectives()

    def is_injective(self, name: str) -> bool:
        return self.category.object(name).name in self.injectives()

    def frobenius_check(self) -> bool:
        return self.projectives() == self.injectives()

    def loop_class(self, i: int) -> list[str]:
        """Indecomposables T whose tower reaches add M by K_i, i.e. Ω^i(QT) = 0."""
        return [name for name in self.category.names() if self.tower(name).loop(i).in_add_m]

    def suspension_class(self, i: int) -> list[str]:
        """The dual class: T with T[i] in the loop class of order i."""
        members = set(self.loop_class(i))
        return [name for name in self.category.names() if self.category.shift_object(name, i) in members]

    def as_map(self, morphism: ClusterMorphism | GradedMap) -> GradedMap:
        if isinstance(morphism, GradedMap):
            return morphism
        if morphism.degree != 0:
            raise ValueError("witnesses are defined for degree-0 morphisms")
        category = self.category
        tags = [m for m, vector in morphism.components.items() if not vector.is_zero()]
        if len(tags) > 1:
            raise ValueError(f"morphism {morphism.source}->{morphism.target} mixes tags {sorted(tags)}; pass one tag at a time")
        if not tags:
            source = category.canonical(category.lift(morphism.source))
            return zero_graded_map(source, category.canonical(category.lift(morphism.target)))
        return category.morphism_to_map(morphism, tags[0])

    def d_mono_witness(self, morphism: ClusterMorphism | GradedMap) -> MorphismWitness:
        """Evaluate both characterizations of Q(f) being a d-monomorphism."""
        f = self.as_map(morphism)
        category = self.category
        left = category.left_approximation(self.summands, f.source)
        iota = left.morphism
        middle = complex_direct_sum([f.target, left.source])
        u = GradedMap(f.source, middle, 0, {p: vstack(category.field, [f.block(p), -iota.block(p)]) for p in f.source.support()})
        surjective = self._covariant_surjective(cone_inclusion(u))
        delta = cone_projection(u).shifted(-1)
        factors = self._factors_through(delta, self.loop_class(self.d - 1))
        if surjective != factors:
            raise EquivalenceViolation(f"d-mono conditions disagree: factorization={factors}, restricted epimorphism={surjective}")
        return MorphismWitness("d-mono", surjective, factors, surjective)

    def d_epi_witness(self, morphism: ClusterMorphism | GradedMap) -> MorphismWitness:
        """Evaluate both characterizations of Q(g) being a d-epimorphism."""
        g = self.as_map(morphism)
        category = self.category
        right = category.right_approximation(self.summands, g.target)
        pi = right.morphism
        middle = complex_direct_sum([g.source, right.source])
        v = GradedMap(middle, g.target, 0, {p: hstack(category.field, [g.block(p), pi.block(p)]) for p in middle.support()})
        surjective = self._contravariant_surjective(cocone_projection(v))
        factors = self._factors_through(cone_inclusion(v), self.suspension_class(self.d - 1))
        if surjective != factors:
            raise EquivalenceViolation(f"d-epi conditions disagree: factorization={factors}, restricted epimorphism={surjective}")
        return MorphismWitness("d-epi", surjective, factors, surjective)

    def projective_cover(self, name: str) -> GradedMap:
        """Full-basis map from add M[-d] onto the object."""
        target = self.category.canonical(self.category.lift(name))
        return self.category.right_approximation(self.projectives(), target).morphism

    def injective_hull(self, name: str) -> GradedMap:
        source = self.category.canonical(self.category.lift(name))
        return self.category.left_approximation(self.injectives(), source).morphism

    def _lifts_meeting(self, names: Iterable[str], meets: Callable[[ProjectiveComplex], int], reach: ProjectiveComplex) -> list[Lift]:
        category = self.category
        names = list(names)
        width = category.tag_window(reach)
        while True:
            if width > category.scan_cap:
                raise ScanWindowExceeded("a restricted Hom scan", category.scan_cap)
            edge = [category.iterate(category.lift(name), t) for name in names for t in (-width, width)]
            if not any(meets(category.canonical(lift)) for lift in edge):
                break
            width += 1
        lifts = []
        for name in names:
            for t in range(-width + 1, width):
                lift = category.iterate(category.lift(name), t)
                if meets(category.canonical(lift)):
                    lifts.append(lift)
        return lifts

    def _covariant_surjective(self, g: GradedMap) -> bool:
        """Is Hom(P, source) -> Hom(P, target) onto for every lift P of a summand of M?"""
        field = self.category.field
        for lift in self._lifts_meeting(self.summands, lambda other: hom_space(other, g.target, 0).dimension, g.target):
            test = self.category.canonical(lift)
            wanted = hom_space(test, g.target, 0)
            images = [wanted.classify(g.compose(b)) for b in hom_space(test, g.source, 0).basis()]
            if span_rank(field, images, wanted.dimension) < wanted.dimension:
                return False
        return True

    def _contravariant_surjective(self, g: GradedMap) -> bool:
        """Is Hom(target, P) -> Hom(source, P) onto for every lift P of a summand of M?"""
        field = self.category.field
        for lift in self._lifts_meeting(self.summands, lambda other: hom_space(g.source, other, 0).dimension, g.source):
            test = self.category.canonical(lift)
            wanted = hom_space(g.source, test, 0)
            images = [wanted.classify(b.compose(g)) for b in hom_space(g.target, test, 0).basis()]
            if span_rank(field, images, wanted.dimension) < wanted.dimension:
                return False
        return True

    def _factors_through(self, delta: GradedMap, names: list[str]) -> bool:
        """Does delta lie in the span of composites through lifts of `names`?"""
        whole = hom_space(delta.source, delta.target, 0)
        wanted = whole.classify(delta)
        if wanted.is_zero():
            return True
        columns = []
        for lift in self._lifts_meeting(names, lambda other: hom_space(delta.source, other, 0).dimension, delta.source):
            middle = self.category.canonical(lift)
            incoming = hom_space(middle, delta.target, 0).basis()
            if not incoming:
                continue
            for e in hom_space(delta.source, middle, 0).basis():
                for h in incoming:
                    columns.append(whole.classify(h.compose(e)))
        return bool(columns) and in_span(hstack(self.category.field, columns), wanted)

    def ar_quiver(self) -> nx.MultiDiGraph:
        """rad/rad² of the quotient H^0 category on the surviving indecomposables."""
        survivors = self.surviving()

        def ideal(source: str, target: str) -> list[ExactMatrix]:
            factoring = self.space(source, target).factoring
            return [factoring.submatrix(range(factoring.nrows), [c]) for c in range(factoring.ncols)]

        graph = nx.MultiDiGraph()
        for name in survivors:
            obj = self.category.object(name)
            graph.add_node(name, row=obj.row, column=obj.column, projective=self.is_projective(name), injective=self.is_injective(name))
        for source, target, count in irreducible_counts(self.category, survivors, ideal=ideal):
            for _ in range(count):
                graph.add_edge(source, target, kind="arrow")
        return graph

    def bar_hom0(self, source: str, target: str, length: int | None = None) -> int:
        """H^0 of the cone of the truncated reduced bar complex computing the quotient."""
        return bar_quotient_hom0(self, source, target, self.default_bar_length if length is None else length)

    def bar_is_stable(self, source: str, target: str) -> bool:
        return self.bar_hom0(source, target) == self.bar_hom0(source, target, self.default_bar_length + 1)


def quotient_by(category: ClusterCategory, summands: Iterable[str], force: bool = False) -> QuotientCategory:
    summands = sorted({category.object(name).name for name in summands})
    if not force:
        report = category.is_cluster_tilting(summands)
        if not report.holds:
            raise NotClusterTilting(summands, report)
    return QuotientCategory(category, summands, forced=force)


def _successors(quotient: QuotientCategory, lift: Lift, names: list[str], degree: int) -> list[Lift]:
    """Lifts L of the named objects with Hom_{D^b}(lift, L[degree]) != 0."""
    category = quotient.category
    name, t = category.locate(lift)
    found = []
    for other in names:
        for m in category.hom(name, other, degree).parts:
            found.append(category.iterate(category.lift(other), t + m))
    return found


def bar_chains(quotient: QuotientCategory, source: str, target: str, cone_degree: int, length: int) -> list[Chain]:
    """Basis chains x_1 ⊗ ... ⊗ x_r of the cone in one degree, bar terms up to `length` factors.

    x_1 starts at the lift of the source, middle factors run between lifts of
    summands of M with identities removed, x_r ends at a lift of the target.
    A chain sits in degree Σ|x_i| - r + 1.
    """
    category = quotient.category
    start = category.lift(source)
    chains: list[Chain] = []

    def extend(lift: Lift, prefix: Chain, owed: int, remaining: int) -> None:
        final = remaining == 1
        degrees = [owed] if final else range(owed, 1)
        for degree in degrees:
            for following in _successors(quotient, lift, [target] if final else quotient.summands, degree):
                if prefix and not final and following == lift and degree == 0:
                    continue
                for index in range(category.lift_hom(lift, following, degree).dimension):
                    factor = (lift, following, degree, index)
                    if final:
                        chains.append(prefix + (factor,))
                    else:
                        extend(following, prefix + (factor,), owed - degree, remaining - 1)

    for r in range(1, length + 1):
        owed = cone_degree + r - 1
        if owed > 0:
            break
        extend(start, (), owed, r)
    return sorted(set(chains))


def bar_differential(quotient: QuotientCategory, chain: Chain) -> dict[Chain, Any]:
    category = quotient.category
    zero = category.field.zero
    image: dict[Chain, Any] = {}
    running = 0
    for i in range(len(chain) - 1):
        a, b, first_degree, first_index = chain[i]
        _, c, second_degree, second_index = chain[i + 1]
        running += first_degree - 1
        sign = -1 if running % 2 else 1
        f = category.lift_hom(a, b, first_degree).basis()[first_index]
        g = category.lift_hom(b, c, second_degree).basis()[second_index]
        space = category.lift_hom(a, c, first_degree + second_degree)
        coords = space.classify(g.compose(f))
        middle = 0 < i < len(chain) - 2
        if middle and a == c and first_degree + second_degree == 0:
            continue
        for k in range(space.dimension):
            value = coords.rows[k][0]
            if value == zero:
                continue
            merged = chain[:i] + ((a, c, first_degree + second_degree, k),) + chain[i + 2 :]
            image[merged] = image.get(merged, zero) + value * sign
    return {key: value for key, value in image.items() if value != zero}


def _bar_matrix(quotient: QuotientCategory, sources: list[Chain], targets: list[Chain]) -> ExactMatrix:
    field = quotient.category.field
    index = {chain: k for k, chain in enumerate(targets)}
    entries = {}
    for column, chain in enumerate(sources):
        for key, value in bar_differential(quotient, chain).items():
            entries[(index[key], column)] = value
    return ExactMatrix.from_entries(field, len(targets), len(sources), entries)


def bar_quotient_hom0(quotient: QuotientCategory, source: str, target: str, length: int) -> int:
    if length < 2:
        raise WindowTooSmall(f"bar truncation length {length} cannot see composites; need at least 2")
    below, middle, above = (bar_chains(quotient, source, target, e, length) for e in (-1, 0, 1))
    if not middle:
        return 0
    outgoing = _bar_matrix(quotient, middle, above).rank() if above else 0
    incoming = _bar_matrix(quotient, below, middle).rank() if below else 0
    return len(middle) - outgoing - incoming
