"""Bounded derived category of kA_n, linear orientation 1 -> 2 -> ... -> n.

Objects are bounded complexes of indecomposable projectives P_1..P_n. P_s is
the interval module M[s, n], so a nonzero map P_s -> P_t exists exactly when
t <= s and is then a scalar multiple of the inclusion. Matrices between
projective terms therefore carry plain scalars, with entry (i, j) allowed only
when label(target_i) <= label(source_j); composition is matrix product.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Callable, Iterable

from sympy.polys.domains.domain import Domain

from tiltsight.complexes import CochainComplex, Cohomology
from tiltsight.matrices import ExactMatrix, block_diagonal, hstack, vstack


Lift = tuple[int, int, int]


class LabelViolation(ValueError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass
class ProjectiveComplex:
    n: int
    field: Domain
    terms: dict[int, tuple[int, ...]]
    differentials: dict[int, ExactMatrix] = dataclass_field(default_factory=dict)

    def __post_init__(self) -> None:
        self.terms = {degree: tuple(labels) for degree, labels in self.terms.items() if labels}
        cleaned = {}
        for degree, matrix in self.differentials.items():
            expected = (len(self.labels(degree + 1)), len(self.labels(degree)))
            if matrix.shape != expected:
                raise ValueError(f"differential in degree {degree} has shape {matrix.shape}, expected {expected}")
            if matrix.nrows and matrix.ncols and not matrix.is_zero():
                check_labels(matrix, self.labels(degree + 1), self.labels(degree))
                cleaned[degree] = matrix
        self.differentials = cleaned
        for degree in cleaned:
            if degree + 1 in cleaned and not (cleaned[degree + 1] @ cleaned[degree]).is_zero():
                raise ValueError(f"d∘d is nonzero at degree {degree}")

    def labels(self, degree: int) -> tuple[int, ...]:
        return self.terms.get(degree, ())

    def d(self, degree: int) -> ExactMatrix:
        matrix = self.differentials.get(degree)
        if matrix is None:
            return ExactMatrix.zeros(self.field, len(self.labels(degree + 1)), len(self.labels(degree)))
        return matrix

    def support(self) -> list[int]:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def amplitude(self) -> int:
        support = self.support()
        return support[-1] - support[0] if support else 0

    def shift(self, k: int) -> ProjectiveComplex:
        return ProjectiveComplex(
            self.n,
            self.field,
            {degree - k: labels for degree, labels in self.terms.items()},
            {degree - k: matrix.scale(_sign(k)) for degree, matrix in self.differentials.items()},
        )

    def evaluate(self, vertex: int) -> CochainComplex:
        """The complex of vector spaces at a vertex: summands P_s with s <= vertex."""
        dims = {degree: sum(1 for s in labels if s <= vertex) for degree, labels in self.terms.items()}
        differentials = {
            degree: matrix.submatrix(
                [i for i, s in enumerate(self.labels(degree + 1)) if s <= vertex],
                [j for j, s in enumerate(self.labels(degree)) if s <= vertex],
            )
            for degree, matrix in self.differentials.items()
        }
        return CochainComplex(self.field, dims, differentials, validate=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "terms": {str(degree): [f"P{s}" for s in labels] for degree, labels in sorted(self.terms.items())},
            "differentials": {str(degree): matrix.to_strings() for degree, matrix in sorted(self.differentials.items())},
        }


def check_labels(matrix: ExactMatrix, target: tuple[int, ...], source: tuple[int, ...]) -> None:
    zero = matrix.field.zero
    for i, row in enumerate(matrix.rows):
        for j, value in enumerate(row):
            if value != zero and target[i] > source[j]:
                raise LabelViolation(f"no map P{source[j]} -> P{target[i]} for orientation 1 -> ... -> n")


def zero_complex(n: int, field: Domain) -> ProjectiveComplex:
    return ProjectiveComplex(n, field, {})


def stalk(n: int, field: Domain, label: int, degree: int = 0) -> ProjectiveComplex:
    return ProjectiveComplex(n, field, {degree: (label,)})


def canonical_complex(n: int, field: Domain, lift: Lift) -> ProjectiveComplex:
    """Minimal projective resolution of M[a, b] placed so it represents M[a, b][k]."""
    a, b, k = lift
    if not 1 <= a <= b <= n:
        raise ValueError(f"no interval [{a}, {b}] in A_{n}")
    if b == n:
        return ProjectiveComplex(n, field, {-k: (a,)})
    return ProjectiveComplex(
        n,
        field,
        {-k - 1: (b + 1,), -k: (a,)},
        {-k - 1: ExactMatrix(field, [[1]])},
    )


def complex_direct_sum(complexes: Iterable[ProjectiveComplex]) -> ProjectiveComplex:
    complexes = list(complexes)
    first = complexes[0]
    degrees = sorted({degree for complex_ in complexes for degree in complex_.terms})
    terms = {degree: tuple(s for complex_ in complexes for s in complex_.labels(degree)) for degree in degrees}
    differentials = {degree: block_diagonal(first.field, [complex_.d(degree) for complex_ in complexes]) for degree in degrees}
    return ProjectiveComplex(first.n, first.field, terms, differentials)


@dataclass
class GradedMap:
    """A graded map of degree `degree`; block p sends X^p to Y^{p+degree}."""

    source: ProjectiveComplex
    target: ProjectiveComplex
    degree: int
    blocks: dict[int, ExactMatrix] = dataclass_field(default_factory=dict)

    def block(self, p: int) -> ExactMatrix:
        matrix = self.blocks.get(p)
        if matrix is None:
            return ExactMatrix.zeros(self.source.field, len(self.target.labels(p + self.degree)), len(self.source.labels(p)))
        return matrix

    def is_zero(self) -> bool:
        return all(matrix.is_zero() for matrix in self.blocks.values())

    def differential(self) -> GradedMap:
        """δf = d_Y f - (-1)^k f d_X."""
        sign = _sign(self.degree)
        blocks = {}
        for p in sorted(set(self.source.terms) | {p - 1 for p in self.source.terms}):
            value = self.target.d(p + self.degree) @ self.block(p) - (self.block(p + 1) @ self.source.d(p)).scale(sign)
            if value.nrows and value.ncols:
                blocks[p] = value
        return GradedMap(self.source, self.target, self.degree + 1, blocks)

    def is_closed(self) -> bool:
        return self.differential().is_zero()

    def compose(self, first: GradedMap) -> GradedMap:
        """self ∘ first."""
        blocks = {p: self.block(p + first.degree) @ first.block(p) for p in first.source.support()}
        return GradedMap(first.source, self.target, first.degree + self.degree, blocks)

    def scale(self, factor: Any) -> GradedMap:
        return GradedMap(self.source, self.target, self.degree, {p: m.scale(factor) for p, m in self.blocks.items()})

    def __add__(self, other: GradedMap) -> GradedMap:
        keys = set(self.blocks) | set(other.blocks)
        return GradedMap(self.source, self.target, self.degree, {p: self.block(p) + other.block(p) for p in keys})

    def shifted(self, k: int) -> GradedMap:
        """The same blocks read as a map X[k] -> Y[k]."""
        return GradedMap(self.source.shift(k), self.target.shift(k), self.degree, {p - k: m for p, m in self.blocks.items()})


def identity(complex_: ProjectiveComplex) -> GradedMap:
    return GradedMap(complex_, complex_, 0, {p: ExactMatrix.identity(complex_.field, len(labels)) for p, labels in complex_.terms.items()})


def zero_graded_map(source: ProjectiveComplex, target: ProjectiveComplex, degree: int = 0) -> GradedMap:
    return GradedMap(source, target, degree, {})


@dataclass
class HomComplex:
    """Hom^k(X, Y) = ⊕_p Hom(X^p, Y^{p+k}) with basis (p, i, j)."""

    source: ProjectiveComplex
    target: ProjectiveComplex
    basis: dict[int, list[tuple[int, int, int]]]
    complex: CochainComplex

    def to_map(self, degree: int, vector: ExactMatrix) -> GradedMap:
        entries: dict[int, dict[tuple[int, int], Any]] = {}
        for position, (p, i, j) in enumerate(self.basis.get(degree, [])):
            value = vector.rows[position][0]
            if value != self.source.field.zero:
                entries.setdefault(p, {})[(i, j)] = value
        blocks = {
            p: ExactMatrix.from_entries(self.source.field, len(self.target.labels(p + degree)), len(self.source.labels(p)), cells)
            for p, cells in entries.items()
        }
        return GradedMap(self.source, self.target, degree, blocks)

    def to_vector(self, f: GradedMap) -> ExactMatrix:
        basis = self.basis.get(f.degree, [])
        entries = {}
        for position, (p, i, j) in enumerate(basis):
            block = f.blocks.get(p)
            if block is not None:
                entries[(position, 0)] = block.rows[i][j]
        return ExactMatrix.from_entries(self.source.field, len(basis), 1, entries)


def hom_complex(source: ProjectiveComplex, target: ProjectiveComplex, degrees: Iterable[int] | None = None) -> HomComplex:
    field = source.field
    if degrees is None:
        low = min(target.support(), default=0) - max(source.support(), default=0)
        high = max(target.support(), default=0) - min(source.support(), default=0)
        degrees = range(low - 1, high + 2)
    degrees = sorted(set(degrees))
    wanted = set(degrees) | {k + 1 for k in degrees} | {k - 1 for k in degrees}
    basis: dict[int, list[tuple[int, int, int]]] = {}
    for k in sorted(wanted):
        cells = []
        for p in source.support():
            for j, s in enumerate(source.labels(p)):
                for i, t in enumerate(target.labels(p + k)):
                    if t <= s:
                        cells.append((p, i, j))
        basis[k] = cells
    dims = {k: len(cells) for k, cells in basis.items()}
    holder = HomComplex(source, target, basis, CochainComplex(field, {}))
    differentials = {}
    for k in sorted(wanted):
        if k + 1 not in basis:
            continue
        columns = []
        for position in range(len(basis[k])):
            unit = ExactMatrix.from_entries(field, len(basis[k]), 1, {(position, 0): field.one})
            columns.append(holder.to_vector(holder.to_map(k, unit).differential()))
        if columns:
            differentials[k] = hstack(field, columns)
    holder.complex = CochainComplex(field, dims, differentials, validate=False)
    return holder


@dataclass
class HomSpace:
    """Hom_{D^b}(X, Y[degree]) as closed maps modulo null-homotopic ones."""

    hom: HomComplex
    degree: int
    cohomology: Cohomology

    @property
    def dimension(self) -> int:
        return self.cohomology.dimension

    def basis(self) -> list[GradedMap]:
        reps = self.cohomology.representatives
        return [self.hom.to_map(self.degree, reps.submatrix(range(reps.nrows), [c])) for c in range(reps.ncols)]

    def classify(self, f: GradedMap) -> ExactMatrix:
        if f.degree != self.degree:
            raise ValueError(f"map of degree {f.degree} does not live in degree {self.degree}")
        return self.cohomology.classify(self.hom.to_vector(f))

    def from_coordinates(self, coordinates: ExactMatrix) -> GradedMap:
        return self.hom.to_map(self.degree, self.cohomology.representatives @ coordinates)


def hom_modulo_homotopy(source: ProjectiveComplex, target: ProjectiveComplex, window: Iterable[int]) -> dict[int, HomSpace]:
    window = sorted(set(window))
    hom = hom_complex(source, target, window)
    return {k: HomSpace(hom, k, hom.complex.cohomology(k)) for k in window}


def hom_space(source: ProjectiveComplex, target: ProjectiveComplex, degree: int = 0) -> HomSpace:
    return hom_modulo_homotopy(source, target, [degree])[degree]


def hom_dim(source: ProjectiveComplex, target: ProjectiveComplex, degree: int = 0) -> int:
    return hom_space(source, target, degree).dimension


def cone_of(f: GradedMap) -> ProjectiveComplex:
    """Cone(f)^p = X^{p+1} ⊕ Y^p with d = [[-d_X, 0], [f, d_Y]]."""
    if f.degree != 0 or not f.is_closed():
        raise ValueError("cone needs a closed degree-0 map")
    source, target, field = f.source, f.target, f.source.field
    degrees = sorted({p - 1 for p in source.terms} | set(target.terms))
    terms = {p: source.labels(p + 1) + target.labels(p) for p in degrees}
    differentials = {}
    for p in degrees:
        upper = hstack(field, [-source.d(p + 1), ExactMatrix.zeros(field, len(source.labels(p + 2)), len(target.labels(p)))])
        lower = hstack(field, [f.block(p + 1), target.d(p)])
        differentials[p] = vstack(field, [upper, lower])
    return ProjectiveComplex(source.n, field, terms, differentials)


def cocone_of(f: GradedMap) -> ProjectiveComplex:
    return cone_of(f).shift(-1)


def cone_inclusion(f: GradedMap) -> GradedMap:
    """Y -> Cone(f)."""
    cone = cone_of(f)
    field = f.source.field
    blocks = {
        p: vstack(field, [ExactMatrix.zeros(field, len(f.source.labels(p + 1)), len(labels)), ExactMatrix.identity(field, len(labels))])
        for p, labels in f.target.terms.items()
    }
    return GradedMap(f.target, cone, 0, blocks)


def cone_projection(f: GradedMap) -> GradedMap:
    """Cone(f) -> X[1]."""
    cone = cone_of(f)
    shifted = f.source.shift(1)
    field = f.source.field
    blocks = {
        p: hstack(field, [ExactMatrix.identity(field, len(shifted.labels(p))), ExactMatrix.zeros(field, len(shifted.labels(p)), len(f.target.labels(p)))])
        for p in cone.terms
    }
    return GradedMap(cone, shifted, 0, blocks)


def cocone_projection(g: GradedMap) -> GradedMap:
    """Cocone(g) -> Y for g: Y -> Z."""
    cocone = cocone_of(g)
    field = g.source.field
    blocks = {
        p: hstack(field, [ExactMatrix.identity(field, len(labels)), ExactMatrix.zeros(field, len(labels), len(g.target.labels(p - 1)))])
        for p, labels in g.source.terms.items()
    }
    return GradedMap(cocone, g.source, 0, blocks)


def cocone_inclusion(g: GradedMap) -> GradedMap:
    """Z[-1] -> Cocone(g)."""
    cocone = cocone_of(g)
    shifted = g.target.shift(-1)
    field = g.source.field
    blocks = {
        p: vstack(field, [ExactMatrix.zeros(field, len(g.source.labels(p)), len(labels)), ExactMatrix.identity(field, len(labels))])
        for p, labels in shifted.terms.items()
    }
    return GradedMap(shifted, cocone, 0, blocks)


@dataclass
class MinimalModel:
    complex: ProjectiveComplex
    inclusion: GradedMap
    retraction: GradedMap


def _cancellable(complex_: ProjectiveComplex) -> tuple[int, int, int] | None:
    zero = complex_.field.zero
    for p in complex_.support():
        matrix = complex_.d(p)
        targets, sources = complex_.labels(p + 1), complex_.labels(p)
        for i, row in enumerate(matrix.rows):
            for j, value in enumerate(row):
                if value != zero and targets[i] == sources[j]:
                    return p, i, j
    return None


def _cancel(complex_: ProjectiveComplex, p: int, i: int, j: int) -> tuple[ProjectiveComplex, GradedMap, GradedMap]:
    """Remove the isomorphism component d^p[i, j] by Gaussian elimination."""
    field = complex_.field
    d = complex_.d(p)
    phi_inverse = field.one / d.rows[i][j]
    rows = [r for r in range(d.nrows) if r != i]
    cols = [c for c in range(d.ncols) if c != j]
    terms = dict(complex_.terms)
    terms[p] = tuple(s for c, s in enumerate(complex_.labels(p)) if c != j)
    terms[p + 1] = tuple(s for r, s in enumerate(complex_.labels(p + 1)) if r != i)
    reduced = {}
    for r_new, r in enumerate(rows):
        for c_new, c in enumerate(cols):
            value = d.rows[r][c] - d.rows[r][j] * d.rows[i][c] * phi_inverse
            if value != field.zero:
                reduced[(r_new, c_new)] = value
    differentials = dict(complex_.differentials)
    differentials[p] = ExactMatrix.from_entries(field, len(rows), len(cols), reduced)
    if p - 1 in differentials:
        differentials[p - 1] = complex_.d(p - 1).submatrix(cols, range(len(complex_.labels(p - 1))))
    if p + 1 in differentials:
        differentials[p + 1] = complex_.d(p + 1).submatrix(range(len(complex_.labels(p + 2))), rows)
    smaller = ProjectiveComplex(complex_.n, field, terms, differentials)

    inclusion = {q: ExactMatrix.identity(field, len(labels)) for q, labels in smaller.terms.items()}
    retraction = {q: ExactMatrix.identity(field, len(labels)) for q, labels in smaller.terms.items()}
    entries = {}
    for c_new, c in enumerate(cols):
        entries[(c, c_new)] = field.one
        value = d.rows[i][c]
        if value != field.zero:
            entries[(j, c_new)] = -phi_inverse * value
    inclusion[p] = ExactMatrix.from_entries(field, d.ncols, len(cols), entries)
    inclusion[p + 1] = ExactMatrix.from_entries(field, d.nrows, len(rows), {(r, r_new): field.one for r_new, r in enumerate(rows)})
    retraction[p] = ExactMatrix.from_entries(field, len(cols), d.ncols, {(c_new, c): field.one for c_new, c in enumerate(cols)})
    entries = {}
    for r_new, r in enumerate(rows):
        entries[(r_new, r)] = field.one
        value = d.rows[r][j]
        if value != field.zero:
            entries[(r_new, i)] = -value * phi_inverse
    retraction[p + 1] = ExactMatrix.from_entries(field, len(rows), d.nrows, entries)
    for q in (p, p + 1):
        if not len(smaller.labels(q)):
            inclusion.pop(q, None)
            retraction.pop(q, None)
    return smaller, GradedMap(smaller, complex_, 0, inclusion), GradedMap(complex_, smaller, 0, retraction)


def minimize(complex_: ProjectiveComplex) -> MinimalModel:
    """Homotopy-equivalent minimal complex with the comparison maps."""
    current = complex_
    inclusion = identity(complex_)
    retraction = identity(complex_)
    while (pivot := _cancellable(current)) is not None:
        smaller, include, retract = _cancel(current, *pivot)
        inclusion = inclusion.compose(include)
        retraction = retract.compose(retraction)
        current = smaller
    return MinimalModel(current, inclusion, retraction)


def _interval_ranks(complex_: ProjectiveComplex, degree: int) -> dict[tuple[int, int], int]:
    field = complex_.field
    n = complex_.n
    labels = complex_.labels(degree)
    previous = complex_.labels(degree - 1)
    d_out = complex_.d(degree)
    d_in = complex_.d(degree - 1)
    ranks = {}
    for b in range(1, n + 1):
        boundary_cols = [j for j, s in enumerate(previous) if s <= b]
        boundaries = d_in.submatrix(range(len(labels)), boundary_cols)
        boundary_rank = boundaries.rank() if boundaries.ncols and boundaries.nrows else 0
        for a in range(1, b + 1):
            cols = [j for j, s in enumerate(labels) if s <= a]
            if not cols:
                ranks[(a, b)] = 0
                continue
            kernel = d_out.submatrix(range(d_out.nrows), cols).kernel_basis()
            embedded = ExactMatrix.from_entries(
                field,
                len(labels),
                kernel.ncols,
                {(cols[r], c): kernel.rows[r][c] for r in range(kernel.nrows) for c in range(kernel.ncols)},
            )
            if embedded.ncols == 0:
                ranks[(a, b)] = 0
                continue
            joint = hstack(field, [embedded, boundaries]) if boundaries.ncols else embedded
            ranks[(a, b)] = joint.rank() - boundary_rank
    return ranks


def decompose(complex_: ProjectiveComplex) -> Counter[Lift]:
    """Multiset of lifts (a, b, k), each standing for M[a, b][k]."""
    n = complex_.n
    result: Counter[Lift] = Counter()
    for degree in complex_.support():
        ranks = _interval_ranks(complex_, degree)

        def rank(a: int, b: int) -> int:
            if a < 1 or b > n or a > b:
                return 0
            return ranks[(a, b)]

        for b in range(1, n + 1):
            for a in range(1, b + 1):
                multiplicity = rank(a, b) - rank(a - 1, b) - rank(a, b + 1) + rank(a - 1, b + 1)
                if multiplicity:
                    result[(a, b, -degree)] += multiplicity
    return result


def is_isomorphic(first: ProjectiveComplex, second: ProjectiveComplex) -> bool:
    return decompose(first) == decompose(second)


def dimension_vector(lift: Lift, n: int) -> tuple[int, ...]:
    a, b, _ = lift
    return tuple(1 if a <= v <= b else 0 for v in range(1, n + 1))


Rule = Callable[[int], list[tuple[int, int]]]
Induced = Callable[[int, int], list[tuple[int, int]]]


def _nakayama_rule(n: int) -> tuple[Rule, Induced]:
    def rule(s: int) -> list[tuple[int, int]]:
        return [(-1, s + 1), (0, 1)] if s < n else [(0, 1)]

    def induced(s: int, t: int) -> list[tuple[int, int]]:
        pairs = [(len(rule(s)) - 1, len(rule(t)) - 1)]
        if s < n:
            pairs.append((0, 0))
        return pairs

    return rule, induced


def _nakayama_inverse_rule(n: int) -> tuple[Rule, Induced]:
    def rule(s: int) -> list[tuple[int, int]]:
        return [(0, n), (1, s - 1)] if s > 1 else [(0, n)]

    def induced(s: int, t: int) -> list[tuple[int, int]]:
        pairs = [(0, 0)]
        if t > 1:
            pairs.append((1, 1))
        return pairs

    return rule, induced


def _positions(complex_: ProjectiveComplex, rule: Rule) -> dict[int, list[tuple[int, int, int]]]:
    """Total degree r -> [(p, j, slot)] for the bicomplex term (p, rule(label_j)[slot])."""
    positions: dict[int, list[tuple[int, int, int]]] = {}
    for p in complex_.support():
        for j, s in enumerate(complex_.labels(p)):
            for slot, (q, _) in enumerate(rule(s)):
                positions.setdefault(p + q, []).append((p, j, slot))
    return positions


def _totalize(complex_: ProjectiveComplex, rule: Rule, induced: Induced) -> ProjectiveComplex:
    field = complex_.field
    positions = _positions(complex_, rule)
    terms = {r: tuple(rule(complex_.labels(p)[j])[slot][1] for p, j, slot in cells) for r, cells in positions.items()}
    differentials = {}
    for r, cells in positions.items():
        targets = positions.get(r + 1, [])
        index = {cell: k for k, cell in enumerate(targets)}
        entries: dict[tuple[int, int], Any] = {}
        for column, (p, j, slot) in enumerate(cells):
            s = complex_.labels(p)[j]
            if slot + 1 < len(rule(s)):
                entries[(index[(p, j, slot + 1)], column)] = field.convert(_sign(p))
            d = complex_.d(p)
            for i, t in enumerate(complex_.labels(p + 1)):
                value = d.rows[i][j]
                if value == field.zero:
                    continue
                for source_slot, target_slot in induced(s, t):
                    if source_slot == slot:
                        key = (index[(p + 1, i, target_slot)], column)
                        entries[key] = entries.get(key, field.zero) + value
        differentials[r] = ExactMatrix.from_entries(field, len(targets), len(cells), entries)
    return ProjectiveComplex(complex_.n, field, terms, differentials)


def _totalize_map(f: GradedMap, source: ProjectiveComplex, target: ProjectiveComplex, rule: Rule, induced: Induced) -> GradedMap:
    field = f.source.field
    source_positions = _positions(f.source, rule)
    target_positions = _positions(f.target, rule)
    blocks = {}
    for r, cells in source_positions.items():
        targets = target_positions.get(r + f.degree, [])
        index = {cell: k for k, cell in enumerate(targets)}
        entries: dict[tuple[int, int], Any] = {}
        for column, (p, j, slot) in enumerate(cells):
            s = f.source.labels(p)[j]
            block = f.block(p)
            for i, t in enumerate(f.target.labels(p + f.degree)):
                value = block.rows[i][j]
                if value == field.zero:
                    continue
                for source_slot, target_slot in induced(s, t):
                    if source_slot == slot:
                        key = (index[(p + f.degree, i, target_slot)], column)
                        entries[key] = entries.get(key, field.zero) + value
        blocks[r] = ExactMatrix.from_entries(field, len(targets), len(cells), entries)
    return GradedMap(source, target, f.degree, blocks)


def nakayama(complex_: ProjectiveComplex) -> ProjectiveComplex:
    """ν: each P_s becomes I_s = [P_{s+1} -> P_1] and the result is totalized."""
    return _totalize(complex_, *_nakayama_rule(complex_.n))


def nakayama_inverse(complex_: ProjectiveComplex) -> ProjectiveComplex:
    """ν^{-1}: each P_s becomes its injective coresolution [P_n -> P_{s-1}]."""
    return _totalize(complex_, *_nakayama_inverse_rule(complex_.n))


def nakayama_map(f: GradedMap) -> GradedMap:
    rule, induced = _nakayama_rule(f.source.n)
    return _totalize_map(f, nakayama(f.source), nakayama(f.target), rule, induced)


def nakayama_inverse_map(f: GradedMap) -> GradedMap:
    rule, induced = _nakayama_inverse_rule(f.source.n)
    return _totalize_map(f, nakayama_inverse(f.source), nakayama_inverse(f.target), rule, induced)


def tau(complex_: ProjectiveComplex) -> ProjectiveComplex:
    return nakayama(complex_).shift(-1)


def tau_inverse(complex_: ProjectiveComplex) -> ProjectiveComplex:
    return nakayama_inverse(complex_).shift(1)


def orbit_functor(complex_: ProjectiveComplex, d: int) -> ProjectiveComplex:
    """F = ν^{-1}[d+1] = τ^{-1}[d] on complexes."""
    return nakayama_inverse(complex_).shift(d + 1)


def orbit_functor_inverse(complex_: ProjectiveComplex, d: int) -> ProjectiveComplex:
    return nakayama(complex_).shift(-d - 1)


def orbit_functor_map(f: GradedMap, d: int) -> GradedMap:
    return nakayama_inverse_map(f).shifted(d + 1)


def orbit_functor_inverse_map(f: GradedMap, d: int) -> GradedMap:
    return nakayama_map(f).shifted(-d - 1)


def orbit_step(lift: Lift, n: int, d: int) -> Lift:
    """F on lifts: τ^{-1} moves M[a, b] to M[a-1, b-1], and I_b = M[1, b] to P_b[1]."""
    a, b, k = lift
    if a > 1:
        return a - 1, b - 1, k + d
    return b, n, k + 1 + d


def orbit_step_inverse(lift: Lift, n: int, d: int) -> Lift:
    a, b, k = lift
    if b < n:
        return a + 1, b + 1, k - d
    return 1, a, k - 1 - d


def interval_hom(first: tuple[int, int], second: tuple[int, int]) -> int:
    """dim Hom(M[a, b], M[c, d])."""
    (a, b), (c, d) = first, second
    return 1 if c <= a <= d <= b else 0


def interval_ext1(first: tuple[int, int], second: tuple[int, int], n: int) -> int:
    """dim Ext^1(M[a, b], M[c, d])."""
    (a, b), (c, d) = first, second
    return 1 if b < n and a + 1 <= c <= b + 1 <= d else 0


def interval_tau(interval: tuple[int, int], n: int) -> tuple[int, int] | None:
    """AR translate of a non-projective interval; None for projectives."""
    a, b = interval
    if b == n:
        return None
    return a + 1, b + 1


def lift_hom_dim(source: Lift, target: Lift, n: int, degree: int = 0) -> int:
    """dim Hom_{D^b}(M[a, b][k], M[c, d][l][degree]) from interval combinatorics."""
    a, b, k = source
    c, d, l = target
    gap = l + degree - k
    if gap == 0:
        return interval_hom((a, b), (c, d))
    if gap == 1:
        return interval_ext1((a, b), (c, d), n)
    return 0


def isomorphism(source: ProjectiveComplex, target: ProjectiveComplex) -> GradedMap:
    """A chain isomorphism class between isomorphic indecomposables."""
    space = hom_space(source, target, 0)
    if space.dimension != 1:
        raise ValueError(f"expected a one-dimensional Hom between indecomposables, got {space.dimension}")
    return space.basis()[0]
