from __future__ import annotations

from collections import defaultdict
import dataclasses
import enum
from fractions import Fraction
import functools
import logging
import typing as t

import sympy

from .exceptions import CompositionError, PreconditionError, SystemClosureError
from .goursat import (
    ProductSubgroup,
    Triple,
    diagonal,
    from_triple,
    left_free_representatives,
    star,
)
from .groups import FiniteGroup, GroupHom, Subgroup, compose, direct_product, homomorphisms
from .typing import Scalar
from .utils import as_fraction, p_adic_valuation

logger = logging.getLogger(__name__)


class Flavor(str, enum.Enum):
    ALL = "all"
    LEFT_FREE = "leftfree"
    BIFREE = "bifree"
    CUSTOM = "custom"


# Standard flavours ordered by inclusion
_FLAVOR_RANK = {Flavor.BIFREE: 0, Flavor.LEFT_FREE: 1, Flavor.ALL: 2}


@dataclasses.dataclass(frozen=True)
class SubgroupSystem:
    """A conjugation-closed set of subgroups of G×H, stored as class representatives.

    The standard flavours are described by a predicate and only enumerate
    their members when the basis is asked for. Custom systems carry their
    members explicitly."""

    left: FiniteGroup
    right: FiniteGroup
    flavor: Flavor = Flavor.ALL
    members: t.Optional[t.FrozenSet[ProductSubgroup]] = None

    def __repr__(self) -> str:
        return f"<SubgroupSystem {self.flavor.value} on {self.left.name}x{self.right.name}>"

    @classmethod
    def all(cls, left: FiniteGroup, right: FiniteGroup) -> SubgroupSystem:
        return cls(left, right, Flavor.ALL)

    @classmethod
    def left_free(cls, left: FiniteGroup, right: FiniteGroup) -> SubgroupSystem:
        return cls(left, right, Flavor.LEFT_FREE)

    @classmethod
    def bifree(cls, left: FiniteGroup, right: FiniteGroup) -> SubgroupSystem:
        return cls(left, right, Flavor.BIFREE)

    @classmethod
    def custom(
        cls,
        left: FiniteGroup,
        right: FiniteGroup,
        members: t.Iterable[ProductSubgroup],
    ) -> SubgroupSystem:
        product = direct_product(left, right)
        canonical = set()
        for member in members:
            if member.product is not product:
                raise PreconditionError(
                    f"{member.describe()} is not a subgroup of {product.name}"
                )
            canonical.add(member.canonical())
        return cls(left, right, Flavor.CUSTOM, frozenset(canonical))

    @classmethod
    def named(cls, left: FiniteGroup, right: FiniteGroup, flavor: str) -> SubgroupSystem:
        try:
            chosen = Flavor(flavor)
        except ValueError as err:
            raise PreconditionError(f"Unknown subgroup system {flavor!r}") from err
        if chosen is Flavor.CUSTOM:
            raise PreconditionError("Custom systems need an explicit member list")
        return cls(left, right, chosen)

    @property
    def product(self) -> FiniteGroup:
        return direct_product(self.left, self.right)

    @functools.cached_property
    def basis(self) -> t.Tuple[ProductSubgroup, ...]:
        """Class representatives ordered by order, then canonical key"""
        if self.flavor is Flavor.ALL:
            found = [ProductSubgroup(rep) for rep in self.product.subgroup_representatives]
        elif self.flavor is Flavor.LEFT_FREE:
            found = list(left_free_representatives(self.left, self.right))
        elif self.flavor is Flavor.BIFREE:
            found = list(left_free_representatives(self.left, self.right, bifree=True))
        else:
            assert self.members is not None
            found = list(self.members)
        return tuple(sorted(found, key=lambda L: L.key))

    @functools.cached_property
    def positions(self) -> t.Dict[ProductSubgroup, int]:
        return {L: i for i, L in enumerate(self.basis)}

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self) -> t.Iterator[ProductSubgroup]:
        return iter(self.basis)

    def __contains__(self, subgroup: object) -> bool:
        if not isinstance(subgroup, ProductSubgroup):
            return False
        if subgroup.product is not self.product:
            return False
        if self.flavor is Flavor.ALL:
            return True
        if self.flavor is Flavor.LEFT_FREE:
            return subgroup.is_left_free
        if self.flavor is Flavor.BIFREE:
            return subgroup.is_bifree
        assert self.members is not None
        return subgroup.canonical() in self.members

    def index(self, subgroup: ProductSubgroup) -> int:
        try:
            return self.positions[subgroup.canonical()]
        except KeyError as err:
            raise SystemClosureError(
                f"{subgroup.describe()} is not a member of {self!r}"
            ) from err

    def opposite(self) -> SubgroupSystem:
        if self.flavor in (Flavor.ALL, Flavor.BIFREE):
            return SubgroupSystem(self.right, self.left, self.flavor)
        return SubgroupSystem.custom(
            self.right, self.left, (L.opposite() for L in self.basis)
        )

    @property
    def is_symmetric(self) -> bool:
        if self.left is not self.right:
            return False
        if self.flavor in (Flavor.ALL, Flavor.BIFREE):
            return True
        return {L.opposite().canonical() for L in self.basis} == set(self.basis)

    def union_flavor(self, other: SubgroupSystem) -> SubgroupSystem:
        """The smallest standard or identical system containing both"""
        if self == other:
            return self
        if self.flavor is Flavor.CUSTOM and other.flavor is Flavor.CUSTOM:
            return SubgroupSystem.all(self.left, self.right)
        if self.flavor is Flavor.CUSTOM:
            return other
        if other.flavor is Flavor.CUSTOM:
            return self
        return self if _FLAVOR_RANK[self.flavor] >= _FLAVOR_RANK[other.flavor] else other

    def closure_violations(self) -> t.List[str]:
        """Name the closure conditions a single-group system fails.

        Conditions are checked on class representatives: subgroups, star
        products L*^{(g,1)}M, opposites, and membership of Δ(G)."""
        if self.left is not self.right:
            raise PreconditionError("Closure conditions apply to systems on G×G")
        violations = []
        group = self.left
        basis = self.basis
        if any(sub not in self for L in basis for sub in L.subgroups()):
            violations.append("subgroups")
        star_closed = True
        for L in basis:
            for M in basis:
                for g in range(group.order):
                    if star(L, M.conjugate(g, 0)) not in self:
                        star_closed = False
                        break
                if not star_closed:
                    break
            if not star_closed:
                break
        if not star_closed:
            violations.append("star")
        if not self.is_symmetric:
            violations.append("opposite")
        if diagonal(group.whole) not in self:
            violations.append("diagonal")
        return violations


def standard_basis(
    left: FiniteGroup, right: FiniteGroup, flavor: str = "all"
) -> t.Tuple[ProductSubgroup, ...]:
    return SubgroupSystem.named(left, right, flavor).basis


@dataclasses.dataclass(frozen=True)
class BurnsideElement:
    """A rational combination of transitive bisets [G×H/L].

    Coefficients are keyed by class representatives and zero terms are
    never stored. Equality compares coefficients only, so the same element
    viewed in two systems compares equal."""

    system: SubgroupSystem = dataclasses.field(compare=False)
    coefficients: t.Dict[ProductSubgroup, Fraction] = dataclasses.field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
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
    ) -> BurnsideElement:
        coefficients: t.Dict[ProductSubgroup, Fraction] = defaultdict(Fraction)
        for L, coefficient in terms:
            coefficients[L.canonical()] += as_fraction(coefficient)
        ordered = sorted(
            ((L, c) for L, c in coefficients.items() if c != 0), key=lambda item: item[0].key
        )
        return cls(system, dict(ordered))

    @classmethod
    def basis_element(
        cls, system: SubgroupSystem, subgroup: ProductSubgroup, coefficient: Scalar = 1
    ) -> BurnsideElement:
        return cls.from_terms(system, [(subgroup, coefficient)])

    @classmethod
    def zero(cls, system: SubgroupSystem) -> BurnsideElement:
        return cls(system, {})

    @classmethod
    def identity(cls, system: SubgroupSystem) -> BurnsideElement:
        """[G×G/Δ(G)]"""
        if system.left is not system.right:
            raise PreconditionError("Only systems on G×G have an identity element")
        return cls.basis_element(system, diagonal(system.left.whole))

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

    def valuation(self, p: int) -> t.Optional[int]:
        """The least p-adic valuation of a coefficient, None for zero"""
        valuations = [p_adic_valuation(c, p) for c in self.coefficients.values()]
        return min((v for v in valuations if v is not None), default=None)

    def in_system(self, system: SubgroupSystem) -> BurnsideElement:
        return BurnsideElement(system, dict(self.coefficients))

    def _combine(self, other: BurnsideElement, sign: int) -> BurnsideElement:
        if self.left is not other.left or self.right is not other.right:
            raise CompositionError("Cannot add elements over different pairs of groups")
        system = self.system.union_flavor(other.system)
        terms = list(self.coefficients.items()) + [
            (L, sign * c) for L, c in other.coefficients.items()
        ]
        return BurnsideElement.from_terms(system, terms)

    def __add__(self, other: BurnsideElement) -> BurnsideElement:
        return self._combine(other, 1)

    def __sub__(self, other: BurnsideElement) -> BurnsideElement:
        return self._combine(other, -1)

    def __neg__(self) -> BurnsideElement:
        return self.scale(-1)

    def scale(self, factor: Scalar) -> BurnsideElement:
        factor = as_fraction(factor)
        return BurnsideElement.from_terms(
            self.system, ((L, factor * c) for L, c in self.coefficients.items())
        )

    def __mul__(self, other: t.Union[BurnsideElement, Scalar]) -> BurnsideElement:
        if isinstance(other, BurnsideElement):
            return mackey_product(self, other)
        return self.scale(other)

    def __rmul__(self, other: Scalar) -> BurnsideElement:
        return self.scale(other)

    def mark(self, subgroup: ProductSubgroup) -> Fraction:
        """Φ_L of this element"""
        return sum(
            (c * mark(subgroup, M) for M, c in self.coefficients.items()), Fraction(0)
        )

    def marks(
        self, subgroups: t.Optional[t.Iterable[ProductSubgroup]] = None
    ) -> t.Dict[ProductSubgroup, Fraction]:
        if subgroups is None:
            subgroups = self.system.basis
        return {L: self.mark(L) for L in subgroups}

    def opposite(self) -> BurnsideElement:
        return opposite_element(self)


@functools.lru_cache(maxsize=None)
def mark(subgroup: ProductSubgroup, orbit: ProductSubgroup) -> int:
    """Φ_L([G×H/M]), counting cosets x·M with L ≤ xMx⁻¹

    That count is (# conjugates of M containing L)·|N(M)|/|M|."""
    product = orbit.product
    conjugates = product.conjugates(orbit.subgroup)
    containing = sum(1 for M in conjugates if subgroup.subgroup.elements <= M.elements)
    if not containing:
        return 0
    return containing * product.order // (len(conjugates) * orbit.order)


def mark_matrix(system: SubgroupSystem) -> sympy.Matrix:
    """The table of marks: entry (i, j) is Φ_{L_i}([G×H/L_j])"""
    basis = system.basis
    return sympy.Matrix(
        len(basis), len(basis), lambda i, j: sympy.Integer(mark(basis[i], basis[j]))
    )


def _double_coset_representatives(
    group: FiniteGroup, first: Subgroup, second: Subgroup
) -> t.List[int]:
    """Least element of every double coset first·h·second"""
    table = group.table
    seen: t.Set[int] = set()
    representatives = []
    for h in range(group.order):
        if h in seen:
            continue
        representatives.append(h)
        for x in first.elements:
            xh = table[x][h]
            for y in second.elements:
                seen.add(table[xh][y])
    return representatives


@functools.lru_cache(maxsize=None)
def basis_product(first: ProductSubgroup, second: ProductSubgroup) -> t.Tuple[t.Tuple[ProductSubgroup, int], ...]:
    """[G×H/L]·[H×K/M] as a sum over p2(L)\\H/p1(M) of [G×K/(L*^{(h,1)}M)]"""
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot multiply over {first.right.name} and {second.left.name}"
        )
    counts: t.Dict[ProductSubgroup, int] = defaultdict(int)
    for h in _double_coset_representatives(first.right, first.p2, second.p1):
        counts[star(first, second.conjugate(h, 0)).canonical()] += 1
    return tuple(sorted(counts.items(), key=lambda item: item[0].key))


def product_system(first: SubgroupSystem, second: SubgroupSystem) -> SubgroupSystem:
    left, right = first.left, second.right
    if first == second:
        return first
    if first.flavor is Flavor.CUSTOM or second.flavor is Flavor.CUSTOM:
        standard = [s for s in (first, second) if s.flavor is not Flavor.CUSTOM]
        if not standard:
            return SubgroupSystem.all(left, right)
        return SubgroupSystem(left, right, standard[0].flavor)
    flavor = max(first.flavor, second.flavor, key=lambda f: _FLAVOR_RANK[f])
    return SubgroupSystem(left, right, flavor)


def mackey_product(
    first: BurnsideElement,
    second: BurnsideElement,
    system: t.Optional[SubgroupSystem] = None,
) -> BurnsideElement:
    """The product a·_H b by the Mackey formula, extended bilinearly"""
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot multiply elements over {first.right.name} and {second.left.name}"
        )
    if system is None:
        system = product_system(first.system, second.system)
    coefficients: t.Dict[ProductSubgroup, Fraction] = defaultdict(Fraction)
    for L, a in first.coefficients.items():
        for M, b in second.coefficients.items():
            for N, count in basis_product(L, M):
                coefficients[N] += a * b * count
    for N, c in coefficients.items():
        if c and N not in system:
            raise SystemClosureError(
                f"The product has support {N.describe()} outside the {system.flavor.value} system"
            )
    return BurnsideElement.from_terms(system, coefficients.items())


def opposite_element(element: BurnsideElement) -> BurnsideElement:
    """[G×H/L] ↦ [H×G/L°]"""
    return BurnsideElement.from_terms(
        element.system.opposite(),
        ((L.opposite(), c) for L, c in element.coefficients.items()),
    )


@dataclasses.dataclass(frozen=True, eq=False)
class ExplicitBiset:
    """A finite (G,H)-biset with its actions tabulated.

    left_action[g][x] is g·x and right_action[h][x] is x·h."""

    left: FiniteGroup
    right: FiniteGroup
    left_action: t.Tuple[t.Tuple[int, ...], ...]
    right_action: t.Tuple[t.Tuple[int, ...], ...]

    def __repr__(self) -> str:
        return f"<ExplicitBiset ({self.left.name},{self.right.name}) of size {self.size}>"

    @property
    def size(self) -> int:
        return len(self.left_action[0])

    @classmethod
    def from_subgroup(cls, subgroup: ProductSubgroup) -> ExplicitBiset:
        """(G×H)/L with g·x·h = (g,h⁻¹)x"""
        product = subgroup.product
        table = product.table
        coset_of: t.Dict[int, int] = {}
        representatives: t.List[int] = []
        for x in range(product.order):
            if x in coset_of:
                continue
            for l in subgroup.subgroup.elements:
                coset_of[table[x][l]] = len(representatives)
            representatives.append(x)

        def act(y: int) -> t.Tuple[int, ...]:
            return tuple(coset_of[table[y][x]] for x in representatives)

        left, right = subgroup.left, subgroup.right
        return cls(
            left=left,
            right=right,
            left_action=tuple(act(product.pair(g, 0)) for g in range(left.order)),
            right_action=tuple(
                act(product.pair(0, right.inverse[h])) for h in range(right.order)
            ),
        )

    @classmethod
    def identity(cls, group: FiniteGroup) -> ExplicitBiset:
        """H as an (H,H)-biset under multiplication"""
        table = group.table
        n = group.order
        return cls(
            left=group,
            right=group,
            left_action=tuple(tuple(table[g][x] for x in range(n)) for g in range(n)),
            right_action=tuple(tuple(table[x][h] for x in range(n)) for h in range(n)),
        )

    def disjoint_union(self, other: ExplicitBiset) -> ExplicitBiset:
        if self.left is not other.left or self.right is not other.right:
            raise CompositionError("Disjoint unions need bisets over the same groups")
        shift = self.size
        return ExplicitBiset(
            left=self.left,
            right=self.right,
            left_action=tuple(
                a + tuple(shift + x for x in b)
                for a, b in zip(self.left_action, other.left_action)
            ),
            right_action=tuple(
                a + tuple(shift + x for x in b)
                for a, b in zip(self.right_action, other.right_action)
            ),
        )

    def validate(self) -> None:
        points = range(self.size)
        for group, action, on_left in (
            (self.left, self.left_action, True),
            (self.right, self.right_action, False),
        ):
            if any(action[0][x] != x for x in points):
                raise PreconditionError("The identity does not act trivially")
            for a in range(group.order):
                for b in range(group.order):
                    ab = action[group.table[a][b]]
                    if on_left:
                        expected = [action[a][action[b][x]] for x in points]
                    else:
                        expected = [action[b][action[a][x]] for x in points]
                    if list(ab) != expected:
                        raise PreconditionError(f"{group.name} does not act by a group action")
        for g in range(self.left.order):
            for h in range(self.right.order):
                for x in points:
                    if self.left_action[g][self.right_action[h][x]] != self.right_action[h][self.left_action[g][x]]:
                        raise PreconditionError("The left and right actions do not commute")

    def act(self, g: int, h: int, x: int) -> int:
        """(g,h)·x = g·x·h⁻¹"""
        return self.left_action[g][self.right_action[self.right.inverse[h]][x]]

    def fixed_points(self, subgroup: ProductSubgroup) -> t.List[int]:
        pairs = subgroup.pairs
        return [
            x for x in range(self.size) if all(self.act(g, h, x) == x for g, h in pairs)
        ]

    def mark(self, subgroup: ProductSubgroup) -> int:
        return len(self.fixed_points(subgroup))

    def stabilizer(self, x: int) -> ProductSubgroup:
        return ProductSubgroup.from_pairs(
            self.left,
            self.right,
            (
                (g, h)
                for g in range(self.left.order)
                for h in range(self.right.order)
                if self.act(g, h, x) == x
            ),
        )


def tensor_oracle(first: ExplicitBiset, second: ExplicitBiset) -> ExplicitBiset:
    """X ×_H Y as the H-orbits of X×Y under h(x,y) = (xh⁻¹, hy)"""
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot tensor over {first.right.name} and {second.left.name}"
        )
    middle = first.right
    m = second.size
    orbit_of: t.Dict[int, int] = {}
    representatives: t.List[t.Tuple[int, int]] = []
    for x in range(first.size):
        for y in range(m):
            if x * m + y in orbit_of:
                continue
            for h in range(middle.order):
                xh = first.right_action[middle.inverse[h]][x]
                hy = second.left_action[h][y]
                orbit_of[xh * m + hy] = len(representatives)
            representatives.append((x, y))
    return ExplicitBiset(
        left=first.left,
        right=second.right,
        left_action=tuple(
            tuple(orbit_of[first.left_action[g][x] * m + y] for x, y in representatives)
            for g in range(first.left.order)
        ),
        right_action=tuple(
            tuple(orbit_of[x * m + second.right_action[k][y]] for x, y in representatives)
            for k in range(second.right.order)
        ),
    )


def decompose_biset(
    biset: ExplicitBiset, system: t.Optional[SubgroupSystem] = None
) -> BurnsideElement:
    """Split a biset into transitive pieces, one [G×H/Stab(x)] per orbit"""
    if system is None:
        system = SubgroupSystem.all(biset.left, biset.right)
    seen: t.Set[int] = set()
    terms = []
    for x in range(biset.size):
        if x in seen:
            continue
        for g in range(biset.left.order):
            for h in range(biset.right.order):
                seen.add(biset.act(g, h, x))
        terms.append((biset.stabilizer(x), 1))
    return BurnsideElement.from_terms(system, terms)


@dataclasses.dataclass(frozen=True)
class Factorization:
    """(α, V, β) with α: V ↠ U and β: W ↠ V"""

    alpha: GroupHom
    V: Subgroup
    beta: GroupHom


def _factorizations_through(
    gamma: GroupHom, V: Subgroup
) -> t.Iterator[t.Tuple[GroupHom, GroupHom]]:
    U, W = gamma.codomain, gamma.domain
    for beta in homomorphisms(W, V, "epi"):
        for alpha in homomorphisms(V, U, "epi"):
            if compose(alpha, beta).graph == gamma.graph:
                yield alpha, beta


def fixed_point_factorizations(
    U: Subgroup, gamma: GroupHom, W: Subgroup, middle: FiniteGroup
) -> t.List[Factorization]:
    """One representative of each H-orbit of factorizations γ = αβ through V ≤ H.

    H acts by h(α,V,β) = (αc_h⁻¹, ^hV, c_hβ); every orbit meets a V that is
    a class representative, and within it N_H(V) permutes the pairs."""
    if gamma.domain != W or gamma.codomain != U:
        raise PreconditionError("gamma must map W to U")
    if not gamma.is_surjective:
        raise PreconditionError("gamma must be an epimorphism onto U")
    representatives = []
    for V in middle.subgroup_representatives:
        if W.order % V.order or V.order % U.order:
            continue
        normalizer = middle.normalizer(V)
        seen: t.Set[t.Tuple[t.Any, t.Any]] = set()
        for alpha, beta in _factorizations_through(gamma, V):
            if (alpha.sort_key, beta.sort_key) in seen:
                continue
            orbit = set()
            for h in normalizer.elements:
                moved_alpha = sorted((middle.conjugate(h, v), y) for v, y in alpha.graph)
                moved_beta = sorted((w, middle.conjugate(h, v)) for w, v in beta.graph)
                orbit.add((tuple(moved_alpha), tuple(moved_beta)))
            seen.update(orbit)
            representatives.append(Factorization(alpha, V, beta))
    logger.debug(f"{len(representatives)} orbits of factorizations of {gamma.describe()}")
    return representatives


class FixedPointCount(t.NamedTuple):
    direct: Fraction
    full_sum: Fraction
    class_sum: Fraction
    orbit_sum: Fraction


def fixed_point_count(
    first: ExplicitBiset,
    second: ExplicitBiset,
    U: Subgroup,
    gamma: GroupHom,
    W: Subgroup,
) -> FixedPointCount:
    """Evaluate |(X×_H Y)^{◁(U,γ,W)}| directly and by the three factorization sums.

    Y must be left-free for the sums to agree with the direct count."""
    middle = first.right
    target = from_triple(Triple(U, gamma, W))
    direct = Fraction(tensor_oracle(first, second).mark(target))

    def weight(alpha: GroupHom, V: Subgroup, beta: GroupHom) -> int:
        return first.mark(from_triple(Triple(U, alpha, V))) * second.mark(
            from_triple(Triple(V, beta, W))
        )

    full_sum = Fraction(0)
    for V in middle.subgroups:
        if W.order % V.order or V.order % U.order:
            continue
        for alpha, beta in _factorizations_through(gamma, V):
            full_sum += Fraction(weight(alpha, V, beta), middle.order)

    class_sum = Fraction(0)
    for V in middle.subgroup_representatives:
        if W.order % V.order or V.order % U.order:
            continue
        normalizer_order = middle.normalizer(V).order
        for alpha, beta in _factorizations_through(gamma, V):
            class_sum += Fraction(weight(alpha, V, beta), normalizer_order)

    orbit_sum = Fraction(0)
    for factorization in fixed_point_factorizations(U, gamma, W, middle):
        V = factorization.V
        orbit_sum += Fraction(
            weight(factorization.alpha, V, factorization.beta),
            middle.centralizer(V).order,
        )
    return FixedPointCount(direct, full_sum, class_sum, orbit_sum)
