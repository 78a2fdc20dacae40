"""Ghost groups of left-free bisets and the marks that land in them.

A ghost element is stored in orbit-sum coordinates: the coefficient at a
class representative L = ◁(U,α,V) is the coefficient of [U,α,V]⁺. Products
are computed by expanding orbit sums into their triples.
"""
from __future__ import annotations

from collections import defaultdict
import dataclasses
from fractions import Fraction
import functools
import logging
import math
import typing as t

import sympy
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.domains import ZZ

from .burnside import BurnsideElement, Flavor, SubgroupSystem, mark, product_system
from .catalog import isomorphism_labels
from .exceptions import CompositionError, DomainError, SystemClosureError
from .goursat import (
    ProductSubgroup,
    Triple,
    diagonal,
    from_triple,
    left_free_representatives,
    star,
)
from .groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    composition_length,
    homomorphisms,
)
from .typing import Scalar
from .utils import UnionFind, as_fraction

logger = logging.getLogger(__name__)


def _require_left_free(system: SubgroupSystem) -> None:
    if system.flavor in (Flavor.LEFT_FREE, Flavor.BIFREE):
        return
    if system.flavor is Flavor.CUSTOM and all(L.is_left_free for L in system.basis):
        return
    raise DomainError(
        f"Marks into the ghost group need a left-free system, not {system.flavor.value}"
    )


@dataclasses.dataclass(frozen=True)
class GhostElement:
    """A rational combination of orbit sums [U,α,V]⁺, keyed by ◁(U,α,V)"""

    system: SubgroupSystem = dataclasses.field(compare=False)
    coefficients: t.Dict[ProductSubgroup, Fraction] = dataclasses.field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        _require_left_free(self.system)
        for L in self.coefficients:
            if L not in self.system:
                raise SystemClosureError(
                    f"{L.describe()} lies outside the declared {self.system.flavor.value} system"
                )

    @classmethod
    def from_terms(
        cls,
        system: SubgroupSystem,
        terms: t.Iterable[t.Tuple[ProductSubgroup, Scalar]],
    ) -> GhostElement:
        coefficients: t.Dict[ProductSubgroup, Fraction] = defaultdict(Fraction)
        for L, coefficient in terms:
            coefficients[L.canonical()] += as_fraction(coefficient)
        ordered = sorted(
            ((L, c) for L, c in coefficients.items() if c != 0), key=lambda item: item[0].key
        )
        return cls(system, dict(ordered))

    @classmethod
    def orbit_sum(
        cls, system: SubgroupSystem, subgroup: ProductSubgroup, coefficient: Scalar = 1
    ) -> GhostElement:
        return cls.from_terms(system, [(subgroup, coefficient)])

    @property
    def left(self) -> FiniteGroup:
        return self.system.left

    @property
    def right(self) -> FiniteGroup:
        return self.system.right

    @property
    def terms(self) -> t.Tuple[t.Tuple[ProductSubgroup, Fraction], ...]:
        return tuple(sorted(self.coefficients.items(), key=lambda item: item[0].key))

    def coefficient(self, subgroup: ProductSubgroup) -> Fraction:
        return self.coefficients.get(subgroup.canonical(), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients.values())

    def _combine(self, other: GhostElement, sign: int) -> GhostElement:
        if self.left is not other.left or self.right is not other.right:
            raise CompositionError("Cannot add ghost elements over different pairs of groups")
        terms = list(self.coefficients.items()) + [
            (L, sign * c) for L, c in other.coefficients.items()
        ]
        return GhostElement.from_terms(self.system.union_flavor(other.system), terms)

    def __add__(self, other: GhostElement) -> GhostElement:
        return self._combine(other, 1)

    def __sub__(self, other: GhostElement) -> GhostElement:
        return self._combine(other, -1)

    def scale(self, factor: Scalar) -> GhostElement:
        factor = as_fraction(factor)
        return GhostElement.from_terms(
            self.system, ((L, factor * c) for L, c in self.coefficients.items())
        )

    def __mul__(self, other: t.Union[GhostElement, Scalar]) -> GhostElement:
        if isinstance(other, GhostElement):
            return ghost_product(self, other)
        return self.scale(other)

    def __rmul__(self, other: Scalar) -> GhostElement:
        return self.scale(other)

    def degrees(self) -> t.Dict[ProductSubgroup, int]:
        return {L: degree(L) for L in self.coefficients}


def degree(subgroup: ProductSubgroup) -> int:
    """Composition length of ker α for ◁(U,α,V); the kernel is k2"""
    return composition_length(subgroup.k2)


@functools.lru_cache(maxsize=None)
def _orbit(subgroup: ProductSubgroup) -> t.Tuple[ProductSubgroup, ...]:
    return tuple(
        ProductSubgroup(s) for s in subgroup.product.conjugates(subgroup.subgroup)
    )


def rho(element: BurnsideElement) -> GhostElement:
    """The mark homomorphism: the coefficient at ◁(U,α,V) is Φ(a)/|C_G(U)|"""
    system = element.system
    _require_left_free(system)
    left = element.left
    terms = []
    for L in system.basis:
        value = element.mark(L)
        if value:
            terms.append((L, value / left.centralizer(L.p1).order))
    return GhostElement.from_terms(system, terms)


@functools.lru_cache(maxsize=None)
def ghost_basis_product(
    first: ProductSubgroup, second: ProductSubgroup
) -> t.Tuple[t.Tuple[ProductSubgroup, Fraction], ...]:
    """[U,α,V]⁺·[V',β,W]⁺ by expanding both orbit sums.

    Each pair of triples with matching middle subgroup V contributes
    |C_H(V)|/|H|·(U,αβ,W); only the contributions landing on a class
    representative are kept, which is enough for a G×K-invariant result."""
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot multiply over {first.right.name} and {second.left.name}"
        )
    middle = first.right
    targets = set(left_free_representatives(first.left, second.right))
    by_domain: t.Dict[Subgroup, t.List[ProductSubgroup]] = defaultdict(list)
    for s in _orbit(second):
        by_domain[s.p1].append(s)
    coefficients: t.Dict[ProductSubgroup, Fraction] = defaultdict(Fraction)
    for r in _orbit(first):
        partners = by_domain.get(r.p2)
        if not partners:
            continue
        weight = Fraction(middle.centralizer(r.p2).order, middle.order)
        for s in partners:
            composite = star(r, s)
            if composite in targets:
                coefficients[composite] += weight
    return tuple(
        sorted(((L, c) for L, c in coefficients.items() if c), key=lambda item: item[0].key)
    )


def ghost_product(first: GhostElement, second: GhostElement) -> GhostElement:
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot multiply ghost elements over {first.right.name} and {second.left.name}"
        )
    system = product_system(first.system, second.system)
    if system.flavor is Flavor.ALL:
        system = SubgroupSystem.left_free(first.left, second.right)
    coefficients: t.Dict[ProductSubgroup, Fraction] = defaultdict(Fraction)
    for L, a in first.coefficients.items():
        for M, b in second.coefficients.items():
            for N, c in ghost_basis_product(L, M):
                coefficients[N] += a * b * c
    return GhostElement.from_terms(system, coefficients.items())


def _left_transversal(group: FiniteGroup, subgroup: Subgroup, within: t.Optional[Subgroup] = None) -> t.List[int]:
    """Least representative of each left coset x·subgroup inside within"""
    table = group.table
    elements = within.sorted if within is not None else range(group.order)
    seen: t.Set[int] = set()
    transversal = []
    for x in elements:
        if x in seen:
            continue
        transversal.append(x)
        seen.update(table[x][s] for s in subgroup.elements)
    return transversal


def transversal_product(first: ProductSubgroup, second: ProductSubgroup) -> GhostElement:
    """The product of two orbit sums by the closed transversal formula.

    Σ over (g,h,k) ∈ A×B×C of ^{(g,k)}(U, α c_h⁻¹ β, W), with A a transversal
    of G/p1(N(◁(U,α,V))), B of N_H(V)/C_H(ker α, V) and C of
    K/p2(N(◁(V,β,W))). Used to cross-check ghost_product."""
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot multiply over {first.right.name} and {second.left.name}"
        )
    left, middle, right = first.left, first.right, second.right
    system = SubgroupSystem.left_free(left, right)
    V = first.p2
    for h in range(middle.order):
        if middle.conjugate_subgroup(h, second.p1) == V:
            second = second.conjugate(h, 0)
            break
    else:
        return GhostElement(system, {})

    alpha = first.to_triple().alpha
    beta = second.to_triple().alpha
    U, W = first.p1, second.p2

    normalizer_first = ProductSubgroup(first.product.normalizer(first.subgroup))
    normalizer_second = ProductSubgroup(second.product.normalizer(second.subgroup))
    A = _left_transversal(left, normalizer_first.p1)
    B = _left_transversal(
        middle, middle.relative_centralizer(alpha.kernel, V), middle.normalizer(V)
    )
    C = _left_transversal(right, normalizer_second.p2)

    targets = set(left_free_representatives(left, right))
    alpha_values, beta_values = alpha.values, beta.values
    coefficients: t.Dict[ProductSubgroup, int] = defaultdict(int)
    for h in B:
        h_inv = middle.inverse[h]
        composite = ProductSubgroup.from_pairs(
            left,
            right,
            (
                (alpha_values[middle.conjugate(h_inv, beta_values[w])], w)
                for w in W.elements
            ),
        )
        for g in A:
            for k in C:
                term = composite.conjugate(g, k)
                if term in targets:
                    coefficients[term] += 1
    return GhostElement.from_terms(system, coefficients.items())


def ghost_identity(system: SubgroupSystem) -> GhostElement:
    """Σ over class representatives U of [U, id_U, U]⁺"""
    group = system.left
    return GhostElement.from_terms(
        system, ((diagonal(U), 1) for U in group.subgroup_representatives)
    )


def opposite(element: GhostElement) -> GhostElement:
    """[U,α,V]⁺° = |C_G(U)|/|C_H(V)|·[V,α⁻¹,U]⁺, for bifree elements.

    Scaled so that ρ(a°) = ρ(a)°."""
    if not all(L.is_bifree for L in element.coefficients):
        raise DomainError("Only bifree ghost elements have an opposite")
    left, right = element.left, element.right
    return GhostElement.from_terms(
        element.system.opposite(),
        (
            (
                L.opposite(),
                c * Fraction(left.centralizer(L.p1).order, right.centralizer(L.p2).order),
            )
            for L, c in element.coefficients.items()
        ),
    )


@functools.lru_cache(maxsize=None)
def mobius(lower: Subgroup, upper: Subgroup) -> int:
    """The Möbius function of the subgroup lattice, by recursion over [lower, upper]"""
    if lower == upper:
        return 1
    if not lower.is_subgroup_of(upper):
        return 0
    group = upper.group
    return -sum(
        mobius(lower, middle)
        for middle in group.subgroups_of(upper)
        if middle != upper and lower.is_subgroup_of(middle)
    )


@functools.lru_cache(maxsize=None)
def _rho_inverse_orbit_sum(subgroup: ProductSubgroup) -> t.Tuple[t.Tuple[ProductSubgroup, Fraction], ...]:
    triple = subgroup.to_triple()
    U, alpha, V = triple.U, triple.alpha, triple.V
    normalizer = subgroup.product.normalizer(subgroup.subgroup).order
    factor = Fraction(subgroup.left.centralizer(U).order, normalizer)
    terms = []
    for W in V.group.subgroups_of(V):
        mu = mobius(W, V)
        if not mu:
            continue
        restricted = alpha.restrict(W).onto_image()
        L = from_triple(Triple(restricted.codomain, restricted, W))
        terms.append((L.canonical(), factor * W.order * mu))
    return tuple(terms)


def rho_inverse(element: GhostElement) -> BurnsideElement:
    """Möbius inversion of the marks, sum over W ≤ V of |W|μ(W,V)[◁(α(W),α|_W,W)]"""
    terms = []
    for L, c in element.coefficients.items():
        for M, value in _rho_inverse_orbit_sum(L):
            terms.append((M, c * value))
    return BurnsideElement.from_terms(element.system, terms)


def rho_matrix(system: SubgroupSystem) -> sympy.Matrix:
    """Rows are orbit sums, columns are standard basis elements"""
    _require_left_free(system)
    basis = system.basis
    left = system.left
    return sympy.Matrix(
        len(basis),
        len(basis),
        lambda i, j: sympy.Rational(
            mark(basis[i], basis[j]), left.centralizer(basis[i].p1).order
        ),
    )


def rho_cokernel_order(system: SubgroupSystem) -> Fraction:
    determinant = rho_matrix(system).det()
    return abs(Fraction(int(determinant.p), int(determinant.q)))


def grading(element: GhostElement) -> t.Dict[int, GhostElement]:
    """Split an element by degree, the composition length of ker α"""
    parts: t.Dict[int, t.List[t.Tuple[ProductSubgroup, Fraction]]] = defaultdict(list)
    for L, c in element.coefficients.items():
        parts[degree(L)].append((L, c))
    return {
        n: GhostElement.from_terms(element.system, parts[n]) for n in sorted(parts)
    }


def burnside_graded_component(element: BurnsideElement, n: int) -> BurnsideElement:
    part = grading(rho(element)).get(n)
    if part is None:
        return BurnsideElement.zero(element.system)
    return rho_inverse(part)


def _coordinates(element: BurnsideElement, system: SubgroupSystem) -> t.List[Fraction]:
    return [element.coefficient(L) for L in system.basis]


def _integer_rows(vectors: t.Iterable[t.Sequence[Fraction]]) -> t.List[t.List[int]]:
    rows = []
    for vector in vectors:
        denominator = 1
        for value in vector:
            denominator = denominator * value.denominator // math.gcd(denominator, value.denominator)
        rows.append([int(value * denominator) for value in vector])
    return rows


def graded_index(system: SubgroupSystem) -> int:
    """[B^S : ⊕_n (B^S ∩ ℚB_n)] for a left-free system on G×G.

    Each ℚB_n is spanned by the preimages of degree-n orbit sums; the
    index of an integral spanning set in its saturation is the product of
    its invariant factors."""
    _require_left_free(system)
    by_degree: t.Dict[int, t.List[t.List[Fraction]]] = defaultdict(list)
    for L in system.basis:
        preimage = rho_inverse(GhostElement.orbit_sum(system, L))
        by_degree[degree(L)].append(_coordinates(preimage, system))

    stacked: t.List[t.List[int]] = []
    saturation = 1
    for n in sorted(by_degree):
        rows = _integer_rows(by_degree[n])
        stacked.extend(rows)
        for factor in invariant_factors(sympy.Matrix(rows), domain=ZZ):
            saturation *= int(factor)
    determinant = abs(int(sympy.Matrix(stacked).det()))
    logger.debug(f"graded lattice: determinant {determinant}, saturation {saturation}")
    return determinant // saturation


@dataclasses.dataclass(frozen=True)
class RadicalDecomposition:
    semisimple: t.Tuple[BurnsideElement, ...]
    radical: t.Tuple[BurnsideElement, ...]
    nilpotency_bound: int


def radical_complement(
    group: FiniteGroup, system: t.Optional[SubgroupSystem] = None
) -> RadicalDecomposition:
    """The bifree subalgebra and the radical J = ⊕_{n≥1} B_n over ℚ"""
    if system is None:
        system = SubgroupSystem.left_free(group, group)
    _require_left_free(system)
    semisimple = []
    radical = []
    for L in system.basis:
        if L.is_bifree:
            semisimple.append(BurnsideElement.basis_element(system, L))
        else:
            radical.append(rho_inverse(GhostElement.orbit_sum(system, L)))
    bound = 1 + max(composition_length(U) for U in group.subgroups)
    return RadicalDecomposition(tuple(semisimple), tuple(radical), bound)


def _independent(
    elements: t.Sequence[BurnsideElement], system: SubgroupSystem
) -> t.List[BurnsideElement]:
    nonzero = [e for e in elements if not e.is_zero()]
    if not nonzero:
        return []
    matrix = sympy.Matrix(
        [[sympy.Rational(c.numerator, c.denominator) for c in _coordinates(e, system)] for e in nonzero]
    )
    _, pivots = matrix.T.rref()
    return [nonzero[i] for i in pivots]


def radical_power(decomposition: RadicalDecomposition, k: int) -> t.List[BurnsideElement]:
    """A basis of J^k, found by multiplying a basis of J^(k-1) with J"""
    if not decomposition.radical:
        return []
    system = decomposition.radical[0].system
    current = _independent(decomposition.radical, system)
    for _ in range(k - 1):
        products = [a * b for a in current for b in decomposition.radical]
        current = _independent(products, system)
        if not current:
            break
    return current


def type_labels(subgroups: t.Iterable[ProductSubgroup]) -> t.Dict[ProductSubgroup, str]:
    subgroups = list(subgroups)
    labels = isomorphism_labels(L.p1 for L in subgroups)
    return {L: labels[L.p1] for L in subgroups}


def t_decompose(element: GhostElement) -> t.Dict[str, GhostElement]:
    """Split a bifree ghost element by the isomorphism type of U"""
    if not all(L.is_bifree for L in element.coefficients):
        raise DomainError("The T-decomposition needs support on twisted diagonals")
    labels = type_labels(element.coefficients)
    parts: t.Dict[str, t.List[t.Tuple[ProductSubgroup, Fraction]]] = {}
    for L, c in element.terms:
        parts.setdefault(labels[L], []).append((L, c))
    return {
        label: GhostElement.from_terms(element.system, terms)
        for label, terms in parts.items()
    }


# Equivariant matrices


def _left_orbit_key(hom: GroupHom) -> t.Tuple[t.Tuple[int, int], ...]:
    """Least graph of c_g∘λ over g in the codomain group"""
    group = hom.codomain.group
    return min(
        tuple(sorted((x, group.conjugate(g, y)) for x, y in hom.graph))
        for g in range(group.order)
    )


def _orbit_representatives(homs: t.Iterable[GroupHom]) -> t.List[GroupHom]:
    by_key: t.Dict[t.Tuple[t.Tuple[int, int], ...], GroupHom] = {}
    for hom in homs:
        key = _left_orbit_key(hom)
        if key not in by_key:
            by_key[key] = GroupHom(hom.domain, hom.codomain, frozenset(key))
    return [by_key[key] for key in sorted(by_key)]


def _pair_subgroup(first: GroupHom, second: GroupHom) -> ProductSubgroup:
    """Δ(λT, λμ⁻¹, μT) = {(λ(t), μ(t))}"""
    return ProductSubgroup.from_pairs(
        first.codomain.group,
        second.codomain.group,
        ((first.values[x], second.values[x]) for x in first.domain.elements),
    )


@dataclasses.dataclass(frozen=True)
class EquivariantMatrix:
    """A matrix indexed by orbits of injections, rows λ and columns μ.

    symmetries act on the right of both labels; an equivariant matrix has
    entries constant along simultaneous translation."""

    key: str
    rows: t.Tuple[GroupHom, ...]
    columns: t.Tuple[GroupHom, ...]
    entries: t.Tuple[t.Tuple[Fraction, ...], ...]
    symmetries: t.Tuple[GroupHom, ...] = ()

    @property
    def shape(self) -> t.Tuple[int, int]:
        return (len(self.rows), len(self.columns))

    def as_matrix(self) -> sympy.Matrix:
        return sympy.Matrix(
            len(self.rows),
            len(self.columns),
            lambda i, j: sympy.Rational(self.entries[i][j].numerator, self.entries[i][j].denominator),
        )

    def __matmul__(self, other: EquivariantMatrix) -> EquivariantMatrix:
        if [c.sort_key for c in self.columns] != [r.sort_key for r in other.rows]:
            raise CompositionError("Matrices are indexed by different orbit sets")
        entries = tuple(
            tuple(
                sum(
                    (self.entries[i][m] * other.entries[m][j] for m in range(len(self.columns))),
                    Fraction(0),
                )
                for j in range(len(other.columns))
            )
            for i in range(len(self.rows))
        )
        return EquivariantMatrix(self.key, self.rows, other.columns, entries, self.symmetries)

    def is_identity(self) -> bool:
        return all(
            self.entries[i][j] == (1 if i == j else 0)
            for i in range(len(self.rows))
            for j in range(len(self.columns))
        )

    def is_equivariant(self) -> bool:
        row_index = {_left_orbit_key(r): i for i, r in enumerate(self.rows)}
        column_index = {_left_orbit_key(c): j for j, c in enumerate(self.columns)}
        for omega in self.symmetries:
            for i, row in enumerate(self.rows):
                moved_row = row_index[_left_orbit_key(_precompose(row, omega))]
                for j, column in enumerate(self.columns):
                    moved_column = column_index[_left_orbit_key(_precompose(column, omega))]
                    if self.entries[moved_row][moved_column] != self.entries[i][j]:
                        return False
        return True


def _precompose(hom: GroupHom, automorphism: GroupHom) -> GroupHom:
    values = hom.values
    return GroupHom(
        automorphism.domain,
        hom.codomain,
        frozenset((x, values[y]) for x, y in automorphism.graph),
    )


def injection_orbits(source: FiniteGroup, target: FiniteGroup) -> t.List[GroupHom]:
    """Representatives of target\\Inj(T, target)"""
    return _orbit_representatives(homomorphisms(source.whole, target.whole, "mono"))


def _require_bifree(element: t.Union[BurnsideElement, GhostElement]) -> None:
    if not all(L.is_bifree for L in element.coefficients):
        raise DomainError("σ is only defined on elements supported on twisted diagonals")


def sigma(element: BurnsideElement, source: FiniteGroup) -> EquivariantMatrix:
    """σ_T: entry at ([λ],[μ]) is Φ_{Δ(λT,λμ⁻¹,μT)}(a)/|C_G(λT)|"""
    _require_bifree(element)
    left, right = element.left, element.right
    rows = injection_orbits(source, left)
    columns = injection_orbits(source, right)
    entries = tuple(
        tuple(
            element.mark(_pair_subgroup(row, column)) / left.centralizer(row.image).order
            for column in columns
        )
        for row in rows
    )
    key = isomorphism_labels([source.whole])[source.whole]
    return EquivariantMatrix(
        key,
        tuple(rows),
        tuple(columns),
        entries,
        homomorphisms(source.whole, source.whole, "iso"),
    )


def tau(element: GhostElement, source: FiniteGroup) -> EquivariantMatrix:
    """τ_T: the ghost coordinate at Δ(λT,λμ⁻¹,μT)"""
    _require_bifree(element)
    rows = injection_orbits(source, element.left)
    columns = injection_orbits(source, element.right)
    entries = tuple(
        tuple(element.coefficient(_pair_subgroup(row, column)) for column in columns)
        for row in rows
    )
    key = isomorphism_labels([source.whole])[source.whole]
    return EquivariantMatrix(
        key,
        tuple(rows),
        tuple(columns),
        entries,
        homomorphisms(source.whole, source.whole, "iso"),
    )


def object_classes(system: SubgroupSystem) -> t.List[Subgroup]:
    """Representatives of the isomorphism classes of objects of the category S_G.

    Two subgroups are isomorphic when a twisted diagonal of the system joins
    them; the least class representative of each union is returned."""
    group = system.left
    classes = UnionFind(group.subgroup_representatives)
    for L in system.basis:
        if not L.is_bifree:
            raise DomainError("σ̃ needs a system of twisted diagonals")
        classes.union(group.class_representative(L.p1), group.class_representative(L.p2))
    return sorted(
        (min(members, key=lambda U: U.key) for members in classes.groups()),  # type: ignore
        key=lambda U: U.key,
    )


def system_morphisms(system: SubgroupSystem, domain: Subgroup) -> t.List[GroupHom]:
    """Hom_S(U, G): injections φ with Δ(φU, φ, U) in the system"""
    group = system.left
    return [
        phi
        for phi in homomorphisms(domain, group.whole, "mono")
        if _pair_subgroup(phi, _inclusion(domain)) in system
    ]


def _inclusion(subgroup: Subgroup) -> GroupHom:
    return GroupHom(subgroup, subgroup.group.whole, frozenset((x, x) for x in subgroup.elements))


def _system_automorphisms(system: SubgroupSystem, subgroup: Subgroup) -> t.List[GroupHom]:
    return [
        GroupHom(subgroup, subgroup, phi.graph)
        for phi in system_morphisms(system, subgroup)
        if phi.image == subgroup
    ]


def sigma_tilde(
    element: BurnsideElement, system: t.Optional[SubgroupSystem] = None
) -> t.Dict[Subgroup, EquivariantMatrix]:
    """σ̃: one block per isomorphism class of objects, rows and columns Hom̄_S(U,G)"""
    _require_bifree(element)
    if system is None:
        system = element.system
    group = system.left
    blocks = {}
    for U in object_classes(system):
        homs = _orbit_representatives(system_morphisms(system, U))
        entries = tuple(
            tuple(
                element.mark(_pair_subgroup(phi, psi)) / group.centralizer(phi.image).order
                for psi in homs
            )
            for phi in homs
        )
        blocks[U] = EquivariantMatrix(
            U.describe(), tuple(homs), tuple(homs), entries, tuple(_system_automorphisms(system, U))
        )
    return blocks


def _pair_orbits(
    homs: t.Sequence[GroupHom], automorphisms: t.Sequence[GroupHom]
) -> t.List[t.Tuple[GroupHom, GroupHom]]:
    """Representatives of Aut_S(U) acting on pairs ([φ],[ψ]) from the right"""
    index = {_left_orbit_key(h): i for i, h in enumerate(homs)}
    seen: t.Set[t.Tuple[int, int]] = set()
    representatives = []
    for i, phi in enumerate(homs):
        for j, psi in enumerate(homs):
            if (i, j) in seen:
                continue
            representatives.append((phi, psi))
            for omega in automorphisms:
                seen.add(
                    (
                        index[_left_orbit_key(_precompose(phi, omega))],
                        index[_left_orbit_key(_precompose(psi, omega))],
                    )
                )
    return representatives


def sigma_tilde_dimension(system: SubgroupSystem) -> int:
    """Σ_U |Hom̄_S(U,G) ×_Aut Hom̄_S(U,G)|, the dimension of the target algebra"""
    total = 0
    for U in object_classes(system):
        homs = _orbit_representatives(system_morphisms(system, U))
        total += len(_pair_orbits(homs, _system_automorphisms(system, U)))
    return total


def sigma_tilde_matrix(system: SubgroupSystem) -> sympy.Matrix:
    """The matrix of σ̃ with rows given by orbit pairs and columns by the standard basis.

    Rows are put in standard-basis order through the bijection
    ([φ],[ψ]) ↦ Δ(φU, φψ⁻¹, ψU), which makes the matrix upper triangular."""
    group = system.left
    basis = system.basis
    rows: t.Dict[int, ProductSubgroup] = {}
    for U in object_classes(system):
        homs = _orbit_representatives(system_morphisms(system, U))
        for phi, psi in _pair_orbits(homs, _system_automorphisms(system, U)):
            L = _pair_subgroup(phi, psi)
            position = system.index(L)
            if position in rows:
                raise SystemClosureError(
                    f"Two orbit pairs map to the class of {L.describe()}"
                )
            rows[position] = L
    if len(rows) != len(basis):
        raise SystemClosureError("Orbit pairs do not cover the system")
    return sympy.Matrix(
        len(basis),
        len(basis),
        lambda i, j: sympy.Rational(
            mark(rows[i], basis[j]), group.centralizer(rows[i].p1).order
        ),
    )
