"""Exact structure on modules with cohomology in (-d, 0].

Kernels and cokernels are truncated cocones and cones. A map is n-mono when
it is injective on H^{-n+1}(e_v) and bijective below; n-epi is the dual
statement read on H^{-d+n}. Both predicates are cross-checked against the
loop-object and suspension criteria and disagreeing answers raise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dataclass_field
from typing import Any

from tiltsight.complexes import InvariantViolation
from tiltsight.dgmodules import (
    DGModule,
    ModuleError,
    ModuleMap,
    cocone_module,
    cocone_projection,
    cone_inclusion,
    cone_module,
    shift_module,
    truncate_above,
    truncate_below,
)
from tiltsight.matrices import ExactMatrix, block_diagonal
from tiltsight.quivers import BasisElement, FinDimGradedAlgebra
from tiltsight.resolutions import (
    Generator,
    SemiFreeModule,
    assemble,
    coefficient_stream,
    derived_isomorphic,
    hom_from_semifree,
    regular_module,
    semifree_resolution,
    top_representatives,
)
from tiltsight.scalars import random_scalar


class CharacterizationMismatch(InvariantViolation):
    pass


class ShapeError(ValueError):
    pass


@dataclass
class Kernel:
    module: DGModule
    inclusion: ModuleMap


@dataclass
class Cokernel:
    module: DGModule
    projection: ModuleMap


def kernel3(f: ModuleMap) -> Kernel:
    """τ^{≤0} Cocone(f) with its map to the source."""
    truncation = truncate_below(cocone_module(f))
    return Kernel(truncation.module, cocone_projection(f).compose(truncation.comparison))


def cokernel3(f: ModuleMap, d: int) -> Cokernel:
    """τ^{>-d} Cone(f) with the map from the target."""
    truncation = truncate_above(cone_module(f), d)
    return Cokernel(truncation.module, truncation.comparison.compose(cone_inclusion(f)))


def omega(module: DGModule) -> DGModule:
    return truncate_below(shift_module(module, -1)).module


def sigma(module: DGModule, d: int) -> DGModule:
    return truncate_above(shift_module(module, 1), d).module


def omega_power(module: DGModule, k: int) -> DGModule:
    if k <= 0:
        return module
    return truncate_below(shift_module(module, -k)).module


def sigma_power(module: DGModule, k: int, d: int) -> DGModule:
    if k <= 0:
        return module
    return truncate_above(shift_module(module, k), d).module


def _degree_range(f: ModuleMap) -> range:
    degrees = f.source.degrees() + f.target.degrees()
    if not degrees:
        return range(0)
    return range(min(degrees) - 1, max(degrees) + 2)


def _mono_on_cohomology(f: ModuleMap, n: int) -> bool:
    for v in f.source.vertices:
        for i in _degree_range(f):
            if i > -n + 1:
                break
            induced = f.on_cohomology((i, v))
            if induced.rank() != induced.ncols:
                return False
            if i <= -n and induced.rank() != induced.nrows:
                return False
    return True


def _epi_on_cohomology(f: ModuleMap, n: int, d: int) -> bool:
    for v in f.source.vertices:
        for i in _degree_range(f):
            if i < -d + n:
                continue
            induced = f.on_cohomology((i, v))
            if induced.rank() != induced.nrows:
                return False
            if i > -d + n and induced.rank() != induced.ncols:
                return False
    return True


def is_n_mono(f: ModuleMap, n: int, d: int) -> bool:
    """f is n-mono, checked against Ω^{n-1} of its kernel."""
    if not 1 <= n <= d:
        raise ValueError(f"n must lie in 1..{d}")
    direct = _mono_on_cohomology(f, n)
    via_kernel = omega_power(kernel3(f).module, n - 1).is_acyclic()
    if direct != via_kernel:
        raise CharacterizationMismatch(f"{n}-mono: cohomology says {direct}, loop object of the kernel says {via_kernel}")
    return direct


def is_n_epi(f: ModuleMap, n: int, d: int) -> bool:
    """f is n-epi, checked against Σ^{n-1} of its cokernel."""
    if not 1 <= n <= d:
        raise ValueError(f"n must lie in 1..{d}")
    direct = _epi_on_cohomology(f, n, d)
    via_cokernel = sigma_power(cokernel3(f, d).module, n - 1, d).is_acyclic()
    if direct != via_cokernel:
        raise CharacterizationMismatch(f"{n}-epi: cohomology says {direct}, suspension of the cokernel says {via_cokernel}")
    return direct


def one_epi_via_kernel(f: ModuleMap, d: int) -> bool:
    """For a d-epi f: f is 1-epi iff Σ of its kernel vanishes."""
    return sigma(kernel3(f).module, d).is_acyclic()


def surjective_on_projectives(f: ModuleMap) -> bool:
    """H^0 Hom(e_vΛ, -) applied to f is onto for every vertex."""
    for v in f.source.vertices:
        induced = f.on_cohomology((0, v))
        if induced.rank() != induced.nrows:
            return False
    return True


@dataclass
class Cover:
    free: SemiFreeModule
    projection: ModuleMap


def projective_cover(module: DGModule, d: int) -> Cover:
    """A free module with a d-epi onto `module`, from generators of the top of H^0."""
    algebra = module.algebra
    field = algebra.field
    generators, images = [], []
    for v in module.vertices:
        representatives = top_representatives(module, (0, v))
        for column in representatives.columns():
            generators.append(Generator(0, v))
            images.append(ExactMatrix(field, [[value] for value in column], module.dim((0, v)), 1))
    free = assemble(algebra, generators, [{} for _ in generators])
    projection = free.extend_map(module, 0, images)
    if not _epi_on_cohomology(projection, d, d):
        generators, images = [], []
        for v in module.vertices:
            space = module.cohomology((0, v))
            for column in space.representatives.columns():
                generators.append(Generator(0, v))
                images.append(ExactMatrix(field, [[value] for value in column], module.dim((0, v)), 1))
        free = assemble(algebra, generators, [{} for _ in generators])
        projection = free.extend_map(module, 0, images)
    if not is_n_epi(projection, d, d):
        raise InvariantViolation("free cover is not a d-epimorphism")
    return Cover(free, projection)


@dataclass
class PresentationStage:
    index: int
    free: SemiFreeModule
    projection: ModuleMap
    kernel: Kernel


@dataclass
class Presentation:
    stages: list[PresentationStage]
    band: SemiFreeModule

    def to_json(self) -> dict[str, Any]:
        return {
            "stages": [
                {
                    "index": stage.index,
                    "generators": [[g.degree, stage.free.algebra.vertices[g.vertex]] for g in stage.free.generators],
                    "kernel_cohomology": {f"{i}@{stage.free.algebra.vertices[v]}": size for (i, v), size in stage.kernel.module.cohomology_dims().items()},
                }
                for stage in self.stages
            ],
            "band_generators": [[g.degree, self.band.algebra.vertices[g.vertex]] for g in self.band.generators],
        }


def projective_presentation(module: DGModule, d: int) -> Presentation:
    """Conflations M^{-(i+1)} -> P^{-i} -> M^{-i} for i = 0..d, plus the band in K^{[-d,0]}."""
    stages = []
    current = module
    for i in range(d + 1):
        if current.is_acyclic():
            break
        cover = projective_cover(current, d)
        kernel = kernel3(cover.projection)
        stages.append(PresentationStage(i, cover.free, cover.projection, kernel))
        current = kernel.module
    return Presentation(stages, semifree_resolution(module, d))


def _check_band(band: SemiFreeModule, low: int, high: int) -> None:
    outside = [g.degree for g in band.generators if not low <= g.degree <= high]
    if outside:
        raise ShapeError(f"generators in degrees {sorted(set(outside))} fall outside [{low}, {high}]")


def _split_rows(whole: SemiFreeModule, block: tuple[int, int], first: set[int]) -> tuple[list[int], list[int]]:
    members = whole.cells.get(block, [])
    inside = [r for r, (g, _) in enumerate(members) if g in first]
    outside = [r for r, (g, _) in enumerate(members) if g not in first]
    return inside, outside


def _permutation(whole: SemiFreeModule, block: tuple[int, int], leading: set[int]) -> ExactMatrix:
    """Rows of `whole` reordered so generators in `leading` come first."""
    field = whole.algebra.field
    inside, outside = _split_rows(whole, block, leading)
    order = inside + outside
    return ExactMatrix.from_entries(field, len(order), len(order), {(k, r): field.one for k, r in enumerate(order)})


def iterated_cokernel(band: SemiFreeModule, d: int, inductive: bool = False) -> DGModule:
    """The iterated cokernel of a band with generators in degrees [-d, 0]."""
    _check_band(band, -d, 0)
    if not inductive:
        return truncate_above(band.module, d).module
    field = band.algebra.field
    layer = [g for g, entry in enumerate(band.generators) if entry.degree == 0]
    kept = list(layer)
    previous = band.restrict(kept)
    truncation = truncate_above(previous.module, d)
    result, projection = truncation.module, truncation.comparison
    for k in range(1, d + 1):
        fresh = [g for g, entry in enumerate(band.generators) if entry.degree == -k]
        if not fresh:
            continue
        kept_now = sorted(kept + fresh)
        current = band.restrict(kept_now)
        new_index = {old: new for new, old in enumerate(kept_now)}
        fresh_new = {new_index[g] for g in fresh}
        free = band.restrict(fresh)
        shifted = shift_module(free.module, -1)
        attaching = {}
        for (i, v), size in shifted.dims.items():
            matrix = current.module.d((i - 1, v))
            new_columns, _ = _split_rows(current, (i - 1, v), fresh_new)
            _, old_rows = _split_rows(current, (i, v), fresh_new)
            attaching[(i, v)] = matrix.submatrix(old_rows, new_columns)
        alpha = ModuleMap(shifted, previous.module, 0, attaching)
        glued = projection.compose(alpha)
        cone_truncation = truncate_above(cone_module(glued), d)
        cone_map = ModuleMap(
            cone_module(alpha),
            cone_module(glued),
            0,
            {
                (i, v): block_diagonal(field, [ExactMatrix.identity(field, free.module.dim((i, v))), projection.block((i, v))])
                for (i, v) in cone_module(alpha).dims
            },
        )
        reorder = {(i, v): _permutation(current, (i, v), fresh_new) for (i, v) in current.module.dims}
        identification = ModuleMap(current.module, cone_module(alpha), 0, reorder)
        projection = cone_truncation.comparison.compose(cone_map).compose(identification)
        result = cone_truncation.module
        previous, kept = current, kept_now
    return result


def iterated_kernel(band: SemiFreeModule, d: int, inductive: bool = False) -> DGModule:
    """The iterated kernel of a band with generators in degrees [0, d]."""
    _check_band(band, 0, d)
    if not inductive:
        return truncate_below(band.module).module
    field = band.algebra.field
    kept = [g for g, entry in enumerate(band.generators) if entry.degree == 0]
    previous = band.restrict(kept)
    truncation = truncate_below(previous.module)
    result, inclusion = truncation.module, truncation.comparison
    for k in range(1, d + 1):
        fresh = [g for g, entry in enumerate(band.generators) if entry.degree == k]
        if not fresh:
            continue
        kept_now = sorted(kept + fresh)
        current = band.restrict(kept_now)
        new_index = {old: new for new, old in enumerate(kept_now)}
        fresh_new = {new_index[g] for g in fresh}
        free = band.restrict(fresh)
        target = shift_module(free.module, 1)
        connecting = {}
        for (i, v), size in previous.module.dims.items():
            matrix = current.module.d((i, v))
            fresh_rows, _ = _split_rows(current, (i + 1, v), fresh_new)
            _, old_columns = _split_rows(current, (i, v), fresh_new)
            connecting[(i, v)] = -matrix.submatrix(fresh_rows, old_columns)
        beta = ModuleMap(previous.module, target, 0, connecting)
        glued = beta.compose(inclusion)
        cocone_truncation = truncate_below(cocone_module(glued))
        # cocone blocks are (source part, shifted target part)
        source_cocone = cocone_module(glued)
        cocone_map = ModuleMap(
            source_cocone,
            cocone_module(beta),
            0,
            {
                (i, v): block_diagonal(field, [inclusion.block((i, v)), ExactMatrix.identity(field, free.module.dim((i, v)))])
                for (i, v) in source_cocone.dims
            },
        )
        old_first = set(range(len(kept_now))) - fresh_new
        reorder = {(i, v): _permutation(current, (i, v), old_first).transpose() for (i, v) in current.module.dims}
        identification = ModuleMap(cocone_module(beta), current.module, 0, reorder)
        inclusion = identification.compose(cocone_map).compose(cocone_truncation.comparison)
        result = cocone_truncation.module
        previous, kept = current, kept_now
    return result


def random_band(algebra: FinDimGradedAlgebra, degrees: list[int], rng: random.Random) -> SemiFreeModule:
    """Generators in the given degrees at random vertices, glued by random cocycles."""
    field = algebra.field
    order = sorted(degrees, reverse=True)
    generators: list[Generator] = []
    attachments: list[dict[tuple[int, int], Any]] = []
    for degree in order:
        vertex = rng.randrange(len(algebra.vertices))
        current = assemble(algebra, generators, attachments)
        block = (degree + 1, vertex)
        size = current.module.dim(block)
        attachment: dict[tuple[int, int], Any] = {}
        if size:
            outgoing = current.module.d(block)
            cocycles = outgoing.kernel_basis() if outgoing.nrows else ExactMatrix.identity(field, size)
            vector = ExactMatrix.zeros(field, size, 1)
            for column in range(cocycles.ncols):
                vector = vector + cocycles.submatrix(range(size), [column]).scale(random_scalar(field, rng, 2))
            members = current.cells[block]
            attachment = {members[r]: vector.rows[r][0] for r in range(size) if vector.rows[r][0] != field.zero}
        generators.append(Generator(degree, vertex))
        attachments.append(attachment)
    return assemble(algebra, generators, attachments)


def opposite_algebra(algebra: FinDimGradedAlgebra) -> FinDimGradedAlgebra:
    basis = tuple(
        BasisElement(element.label, element.degree, element.right, element.left, tuple(reversed(element.path)))
        for element in algebra.basis
    )
    products = {(j, i): vector for (i, j), vector in algebra.products.items()}
    return FinDimGradedAlgebra(
        algebra.field, algebra.vertices, basis, products, dict(algebra.differential), algebra.idempotents, algebra.length_bound
    )


def k_dual(module: DGModule, over: FinDimGradedAlgebra | None = None) -> DGModule:
    """Hom_k(M, k) as a right module over the opposite algebra, or over `over` when given."""
    algebra = module.algebra
    if not algebra.has_zero_differential():
        raise ModuleError("duality is implemented for algebras with zero differential")
    opposite = over if over is not None else opposite_algebra(algebra)
    dims = {(-i, v): size for (i, v), size in module.dims.items()}
    differential = {(-i - 1, v): matrix.transpose() for (i, v), matrix in module.differential.items()}
    action = {}
    for (b, i), matrix in module.action.items():
        action[(b, -(i + algebra.basis[b].degree))] = matrix.transpose()
    return DGModule(opposite, dims, differential, action)


def algebra_dual(algebra: FinDimGradedAlgebra) -> DGModule:
    """DΛ as a right Λ-module."""
    return k_dual(regular_module(opposite_algebra(algebra)).module, over=algebra)


def injective_module(algebra: FinDimGradedAlgebra, vertex: int) -> DGModule:
    """D(Λe_v), the indecomposable summand of DΛ at `vertex`."""
    opposite = opposite_algebra(algebra)
    return k_dual(assemble(opposite, [Generator(0, vertex)], [{}]).module, over=algebra)


@dataclass
class SelfInjectivityReport:
    d: int
    shifts: dict[int, bool] = dataclass_field(default_factory=dict)

    @property
    def self_injective(self) -> bool:
        return any(self.shifts.values())

    def to_json(self) -> dict[str, Any]:
        return {"d": self.d, "shifts": {str(s): found for s, found in sorted(self.shifts.items())}, "self_injective": self.self_injective}


def is_d_self_injective(algebra: FinDimGradedAlgebra, d: int, seed: int = 0) -> SelfInjectivityReport:
    """Look for a quasi-isomorphism Λ -> DΛ[s] for s in {d-1, d}."""
    regular = regular_module(algebra)
    dual = algebra_dual(algebra)
    report = SelfInjectivityReport(d)
    for s in (d - 1, d):
        target = shift_module(dual, s)
        found = False
        if regular.module.cohomology_dims() == target.cohomology_dims():
            homs = hom_from_semifree(regular, target, [0])
            cocycles = homs.space(0).cocycles
            columns = [cocycles.submatrix(range(cocycles.nrows), [c]) for c in range(cocycles.ncols)]
            for coefficients in coefficient_stream(algebra.field, len(columns), seed):
                vector = ExactMatrix.zeros(algebra.field, cocycles.nrows, 1)
                for coefficient, column in zip(coefficients, columns):
                    vector = vector + column.scale(coefficient)
                if homs.to_map(0, vector).is_quasi_iso():
                    found = True
                    break
        report.shifts[s] = found
    return report


def conflation_is_exact(kernel: Kernel, f: ModuleMap, d: int) -> bool:
    """K -> X -> Y is a conflation: the inclusion is d-mono and f is d-epi."""
    return is_n_mono(kernel.inclusion, d, d) and is_n_epi(f, d, d)


def check_presentation(presentation: Presentation, module: DGModule, d: int) -> list[str]:
    failures = []
    for stage in presentation.stages:
        if not is_n_epi(stage.projection, d, d):
            failures.append(f"stage {stage.index}: cover is not a d-epi")
        if not is_n_mono(stage.kernel.inclusion, d, d):
            failures.append(f"stage {stage.index}: kernel inclusion is not a d-mono")
    if presentation.stages and not presentation.stages[-1].kernel.module.is_acyclic() and len(presentation.stages) <= d:
        failures.append("presentation stopped before its kernels vanished")
    if not derived_isomorphic(iterated_cokernel(presentation.band, d), module, d):
        failures.append("iterated cokernel of the band is not isomorphic to the module")
    return failures

