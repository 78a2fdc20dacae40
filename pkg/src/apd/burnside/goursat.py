from __future__ import annotations

from collections import defaultdict
import dataclasses
import enum
import functools
import logging
import typing as t

from .exceptions import ClassificationError, CompositionError, PreconditionError
from .groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    direct_product,
    homomorphisms,
    identity_hom,
)

logger = logging.getLogger(__name__)


class Freeness(str, enum.Enum):
    GENERAL = "general"
    LEFT_FREE = "left-free"
    RIGHT_FREE = "right-free"
    BIFREE = "bifree"


class GoursatData(t.NamedTuple):
    k1: Subgroup
    p1: Subgroup
    eta: t.Mapping[int, int]
    k2: Subgroup
    p2: Subgroup


def _coset_representatives(group: FiniteGroup, big: Subgroup, kernel: Subgroup) -> t.Dict[int, int]:
    """Map every element of big to the least element of its coset x·kernel"""
    table = group.table
    representative: t.Dict[int, int] = {}
    for x in big.sorted:
        if x in representative:
            continue
        for k in kernel.elements:
            representative[table[x][k]] = x
    return representative


@dataclasses.dataclass(frozen=True)
class ProductSubgroup:
    """A subgroup L of G×H together with its Goursat invariants.

    The wrapped subgroup must belong to a group built by direct_product, so
    the factors are known."""

    subgroup: Subgroup

    def __post_init__(self) -> None:
        if self.subgroup.group.factors is None:
            raise PreconditionError(
                f"{self.subgroup.group.name} is not a direct product"
            )

    def __repr__(self) -> str:
        return f"<ProductSubgroup of {self.product.name} order {self.order} {self.describe()}>"

    @classmethod
    def from_pairs(
        cls, left: FiniteGroup, right: FiniteGroup, pairs: t.Iterable[t.Tuple[int, int]]
    ) -> ProductSubgroup:
        product = direct_product(left, right)
        return cls(product.subgroup(product.pair(g, h) for g, h in pairs))

    @property
    def product(self) -> FiniteGroup:
        return self.subgroup.group

    @property
    def left(self) -> FiniteGroup:
        return self.product.factors[0]  # type: ignore

    @property
    def right(self) -> FiniteGroup:
        return self.product.factors[1]  # type: ignore

    @property
    def order(self) -> int:
        return self.subgroup.order

    @property
    def key(self) -> t.Tuple[int, t.Tuple[int, ...]]:
        return self.subgroup.key

    @functools.cached_property
    def pairs(self) -> t.Tuple[t.Tuple[int, int], ...]:
        return tuple(self.product.split(x) for x in self.subgroup.sorted)

    def __contains__(self, pair: t.Tuple[int, int]) -> bool:
        return self.product.pair(*pair) in self.subgroup.elements

    @functools.cached_property
    def p1(self) -> Subgroup:
        return self.left.subgroup(g for g, _ in self.pairs)

    @functools.cached_property
    def p2(self) -> Subgroup:
        return self.right.subgroup(h for _, h in self.pairs)

    @functools.cached_property
    def k1(self) -> Subgroup:
        return self.left.subgroup(g for g, h in self.pairs if h == 0)

    @functools.cached_property
    def k2(self) -> Subgroup:
        return self.right.subgroup(h for g, h in self.pairs if g == 0)

    @functools.cached_property
    def eta(self) -> t.Dict[int, int]:
        """η on least coset representatives: h·k2 ↦ g·k1 for (g,h) in L"""
        left_reps = _coset_representatives(self.left, self.p1, self.k1)
        right_reps = _coset_representatives(self.right, self.p2, self.k2)
        return {right_reps[h]: left_reps[g] for g, h in self.pairs}

    def goursat(self) -> GoursatData:
        return GoursatData(self.k1, self.p1, self.eta, self.k2, self.p2)

    def classify(self) -> Freeness:
        left_free = self.k1.is_trivial()
        right_free = self.k2.is_trivial()
        if left_free and right_free:
            return Freeness.BIFREE
        if left_free:
            return Freeness.LEFT_FREE
        if right_free:
            return Freeness.RIGHT_FREE
        return Freeness.GENERAL

    @property
    def is_left_free(self) -> bool:
        return self.k1.is_trivial()

    @property
    def is_bifree(self) -> bool:
        return self.k1.is_trivial() and self.k2.is_trivial()

    def to_triple(self) -> Triple:
        if not self.is_left_free:
            raise ClassificationError(
                f"{self.describe()} has a first kernel of order {self.k1.order}, so it is not left-free"
            )
        alpha = GroupHom(
            domain=self.p2,
            codomain=self.p1,
            graph=frozenset((h, g) for g, h in self.pairs),
        )
        return Triple(self.p1, alpha, self.p2)

    def opposite(self) -> ProductSubgroup:
        return ProductSubgroup.from_pairs(
            self.right, self.left, ((h, g) for g, h in self.pairs)
        )

    def conjugate(self, g: int, h: int) -> ProductSubgroup:
        product = self.product
        return ProductSubgroup(product.conjugate_subgroup(product.pair(g, h), self.subgroup))

    def canonical(self) -> ProductSubgroup:
        """The least member of the G×H-conjugacy class"""
        return ProductSubgroup(self.product.class_representative(self.subgroup))

    def is_subgroup_of(self, other: ProductSubgroup) -> bool:
        return self.subgroup.is_subgroup_of(other.subgroup)

    def subgroups(self) -> t.Tuple[ProductSubgroup, ...]:
        return tuple(ProductSubgroup(s) for s in self.product.subgroups_of(self.subgroup))

    def describe(self) -> str:
        return self.subgroup.describe()


def star(first: ProductSubgroup, second: ProductSubgroup) -> ProductSubgroup:
    """Relation composition L*M = {(g,k) : (g,h) ∈ L and (h,k) ∈ M for some h}"""
    if first.right is not second.left:
        raise CompositionError(
            f"Cannot compose over {first.right.name} and {second.left.name}"
        )
    by_middle: t.Dict[int, t.List[int]] = defaultdict(list)
    for h, k in second.pairs:
        by_middle[h].append(k)
    return ProductSubgroup.from_pairs(
        first.left,
        second.right,
        ((g, k) for g, h in first.pairs for k in by_middle.get(h, ())),
    )


@dataclasses.dataclass(frozen=True)
class Triple:
    """(U, α, V) with α: V ↠ U, standing for the subgroup ◁(U, α, V)"""

    U: Subgroup
    alpha: GroupHom
    V: Subgroup

    def __post_init__(self) -> None:
        if self.alpha.domain != self.V or self.alpha.codomain != self.U:
            raise PreconditionError("alpha must map V onto U")
        if not self.alpha.is_surjective:
            raise PreconditionError("alpha must be an epimorphism")

    @property
    def flavor(self) -> str:
        return "twisted-diagonal" if self.alpha.is_injective else "left-free"

    @property
    def kernel(self) -> Subgroup:
        return self.alpha.kernel

    def conjugate(self, g: int, h: int) -> Triple:
        """^{(g,h)}(U,α,V) = (^gU, c_g α c_h⁻¹, ^hV)"""
        left, right = self.U.group, self.V.group
        values = self.alpha.values
        h_inv = right.inverse[h]
        U = left.conjugate_subgroup(g, self.U)
        V = right.conjugate_subgroup(h, self.V)
        graph = frozenset(
            (v, left.conjugate(g, values[right.conjugate(h_inv, v)])) for v in V.elements
        )
        return Triple(U, GroupHom(V, U, graph), V)

    def inverse(self) -> Triple:
        """(V, α⁻¹, U), defined for twisted diagonals"""
        return Triple(self.V, self.alpha.inverse(), self.U)

    def describe(self) -> str:
        return f"({self.U.describe()}, {self.alpha.describe()}, {self.V.describe()})"


def from_triple(triple: Triple) -> ProductSubgroup:
    return ProductSubgroup.from_pairs(
        triple.U.group, triple.V.group, ((y, x) for x, y in triple.alpha.graph)
    )


def diagonal(subgroup: Subgroup) -> ProductSubgroup:
    """Δ(U) = {(u,u)} inside G×G"""
    return from_triple(Triple(subgroup, identity_hom(subgroup), subgroup))


def twisted_diagonal(phi: GroupHom) -> ProductSubgroup:
    """Δ(φ(P), φ, P) for an injective φ: P → S"""
    return ProductSubgroup.from_pairs(
        phi.codomain.group, phi.domain.group, ((y, x) for x, y in phi.graph)
    )


def left_kernel_product(left: Subgroup, right: Subgroup) -> ProductSubgroup:
    """U×V as a subgroup of G×H, for instance 1×C2"""
    return ProductSubgroup.from_pairs(
        left.group, right.group, ((g, h) for g in left.elements for h in right.elements)
    )


@functools.lru_cache(maxsize=None)
def left_free_representatives(
    left: FiniteGroup, right: FiniteGroup, bifree: bool = False
) -> t.Tuple[ProductSubgroup, ...]:
    """Class representatives of left-free (or bifree) subgroups of G×H.

    Conjugation moves every triple onto one whose U and V are class
    representatives, so only those pairs are enumerated."""
    found: t.Set[ProductSubgroup] = set()
    for V in right.subgroup_representatives:
        for U in left.subgroup_representatives:
            if V.order % U.order:
                continue
            if bifree and U.order != V.order:
                continue
            kind = "iso" if bifree else "epi"
            for alpha in homomorphisms(V, U, kind):
                found.add(from_triple(Triple(U, alpha, V)).canonical())
    logger.debug(
        f"{len(found)} classes of {'bifree' if bifree else 'left-free'} subgroups of {left.name}x{right.name}"
    )
    return tuple(sorted(found, key=lambda L: L.key))
