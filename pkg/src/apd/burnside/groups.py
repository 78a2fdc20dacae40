from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
import math
import typing as t

from .exceptions import PreconditionError
from .typing import HomKind
from .utils import check_order, is_power_of

logger = logging.getLogger(__name__)

F = t.TypeVar("F", bound=t.Callable[..., t.Any])


def memoized_method(method: F) -> F:
    """Cache a method on the instance it is called on.

    The cache lives in the instance __dict__, like functools.cached_property,
    so it is released together with the group."""
    attribute = f"_{method.__name__}_cache"

    @functools.wraps(method)
    def wrapper(self: t.Any, *args: t.Any) -> t.Any:
        cache = self.__dict__.setdefault(attribute, {})
        try:
            return cache[args]
        except KeyError:
            result = cache[args] = method(self, *args)
            return result

    return t.cast(F, wrapper)


@dataclasses.dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by a multiplication table over element indices.

    The identity is always element 0; loaders renumber their input so that
    this holds. Groups compare by identity, so structurally equal groups
    loaded twice are different objects. Use direct_product(...) rather than
    building product tables by hand, it returns the same object for the same
    pair of factors.
    """

    name: str
    table: t.Tuple[t.Tuple[int, ...], ...]
    labels: t.Optional[t.Tuple[str, ...]] = None
    factors: t.Optional[t.Tuple[FiniteGroup, FiniteGroup]] = None

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name} of order {self.order}>"

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    @functools.cached_property
    def inverse(self) -> t.Tuple[int, ...]:
        return tuple(row.index(0) for row in self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def conjugate(self, g: int, x: int) -> int:
        """Return gxg⁻¹"""
        return self.table[self.table[g][x]][self.inverse[g]]

    def label(self, x: int) -> str:
        if self.labels is None:
            return str(x)
        return self.labels[x]

    @memoized_method
    def element_order(self, x: int) -> int:
        order, power = 1, x
        while power != 0:
            power = self.table[power][x]
            order += 1
        return order

    @functools.cached_property
    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in range(self.order)
            for b in range(a)
        )

    def is_p_group(self, p: int) -> bool:
        return is_power_of(self.order, p)

    # Subgroups

    def subgroup(self, elements: t.Iterable[int]) -> Subgroup:
        return Subgroup(self, frozenset(elements))

    @functools.cached_property
    def whole(self) -> Subgroup:
        return self.subgroup(range(self.order))

    @functools.cached_property
    def trivial(self) -> Subgroup:
        return self.subgroup((0,))

    def closure(self, generators: t.Iterable[int]) -> t.FrozenSet[int]:
        generators = tuple(set(generators))
        table = self.table
        elements = {0}
        frontier = [0]
        while frontier:
            new = []
            for x in frontier:
                row = table[x]
                for g in generators:
                    y = row[g]
                    if y not in elements:
                        elements.add(y)
                        new.append(y)
            frontier = new
        return frozenset(elements)

    def generate(self, generators: t.Iterable[int]) -> Subgroup:
        return Subgroup(self, self.closure(generators))

    @functools.cached_property
    def subgroups(self) -> t.Tuple[Subgroup, ...]:
        """Every subgroup, sorted by canonical key.

        Subgroups are found by repeatedly joining a known subgroup with a
        cyclic subgroup it does not contain, starting from the cyclic
        subgroups themselves."""
        check_order(self.order, f"The group {self.name}")
        cyclic: t.Dict[t.FrozenSet[int], int] = {}
        for x in range(self.order):
            cyclic.setdefault(self.closure((x,)), x)

        found: t.Dict[t.FrozenSet[int], t.Tuple[int, ...]] = {
            elements: (x,) for elements, x in cyclic.items()
        }
        layer = list(found.items())
        while layer:
            next_layer = []
            for elements, generators in layer:
                for cyclic_elements, x in cyclic.items():
                    if cyclic_elements <= elements:
                        continue
                    joined_generators = generators + (x,)
                    joined = self.closure(joined_generators)
                    if joined not in found:
                        found[joined] = joined_generators
                        next_layer.append((joined, joined_generators))
            layer = next_layer
        logger.debug(f"{self.name} has {len(found)} subgroups")
        return tuple(
            sorted((self.subgroup(elements) for elements in found), key=lambda s: s.key)
        )

    @memoized_method
    def conjugate_subgroup(self, g: int, subgroup: Subgroup) -> Subgroup:
        return self.subgroup(self.conjugate(g, x) for x in subgroup.elements)

    @memoized_method
    def conjugates(self, subgroup: Subgroup) -> t.Tuple[Subgroup, ...]:
        """The conjugacy class of a subgroup, sorted by canonical key"""
        inverse = self.inverse
        table = self.table
        seen: t.Set[t.FrozenSet[int]] = set()
        for g in range(self.order):
            row = table[g]
            g_inv = inverse[g]
            seen.add(frozenset(table[row[x]][g_inv] for x in subgroup.elements))
        return tuple(sorted((self.subgroup(s) for s in seen), key=lambda s: s.key))

    def class_representative(self, subgroup: Subgroup) -> Subgroup:
        return self.conjugates(subgroup)[0]

    @functools.cached_property
    def subgroup_classes(self) -> t.Tuple[t.Tuple[Subgroup, ...], ...]:
        """Conjugacy classes of subgroups, ordered by their least member"""
        classes = []
        seen: t.Set[Subgroup] = set()
        for subgroup in self.subgroups:
            if subgroup in seen:
                continue
            conjugates = self.conjugates(subgroup)
            seen.update(conjugates)
            classes.append(conjugates)
        return tuple(classes)

    @property
    def subgroup_representatives(self) -> t.Tuple[Subgroup, ...]:
        return tuple(conjugates[0] for conjugates in self.subgroup_classes)

    def subgroups_of(self, subgroup: Subgroup) -> t.Tuple[Subgroup, ...]:
        return tuple(s for s in self.subgroups if s.elements <= subgroup.elements)

    @memoized_method
    def normalizer(self, subgroup: Subgroup) -> Subgroup:
        return self.subgroup(
            g
            for g in range(self.order)
            if self.conjugate_subgroup(g, subgroup) == subgroup
        )

    @memoized_method
    def centralizer(self, subgroup: Subgroup) -> Subgroup:
        table = self.table
        return self.subgroup(
            g
            for g in range(self.order)
            if all(table[g][x] == table[x][g] for x in subgroup.elements)
        )

    def is_normal(self, subgroup: Subgroup, within: t.Optional[Subgroup] = None) -> bool:
        if within is None:
            within = self.whole
        if not subgroup.elements <= within.elements:
            return False
        return all(
            self.conjugate_subgroup(v, subgroup) == subgroup for v in within.generators
        )

    @memoized_method
    def relative_centralizer(self, kernel: Subgroup, subgroup: Subgroup) -> Subgroup:
        """C_G(U, V): elements normalizing both U and V that act trivially on V/U"""
        if not self.is_normal(kernel, subgroup):
            raise PreconditionError(
                f"{kernel.describe()} is not a normal subgroup of {subgroup.describe()}"
            )
        table, inverse = self.table, self.inverse
        candidates = set(self.normalizer(kernel).elements) & set(
            self.normalizer(subgroup).elements
        )
        return self.subgroup(
            g
            for g in candidates
            if all(
                table[self.conjugate(g, v)][inverse[v]] in kernel.elements
                for v in subgroup.elements
            )
        )

    def induced(self, subgroup: Subgroup, name: t.Optional[str] = None) -> FiniteGroup:
        """Return the subgroup as a group in its own right.

        Element i of the result is the i-th smallest element of the subgroup,
        so the identity stays at index 0."""
        elements = subgroup.sorted
        position = {x: i for i, x in enumerate(elements)}
        table = tuple(
            tuple(position[self.table[a][b]] for b in elements) for a in elements
        )
        labels = tuple(self.label(x) for x in elements)
        return FiniteGroup(
            name=name or f"{self.name}[{subgroup.order}]", table=table, labels=labels
        )

    # Direct products

    def pair(self, g: int, h: int) -> int:
        assert self.factors is not None
        return g * self.factors[1].order + h

    def split(self, x: int) -> t.Tuple[int, int]:
        assert self.factors is not None
        return divmod(x, self.factors[1].order)


@dataclasses.dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup
    elements: t.FrozenSet[int]

    def __repr__(self) -> str:
        return f"<Subgroup of {self.group.name} {self.describe()}>"

    def __contains__(self, x: int) -> bool:
        return x in self.elements

    def __iter__(self) -> t.Iterator[int]:
        return iter(self.sorted)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @functools.cached_property
    def sorted(self) -> t.Tuple[int, ...]:
        return tuple(sorted(self.elements))

    @functools.cached_property
    def key(self) -> t.Tuple[int, t.Tuple[int, ...]]:
        """Canonical ordering: by order, then lexicographically by elements"""
        return (len(self.elements), self.sorted)

    @functools.cached_property
    def generators(self) -> t.Tuple[int, ...]:
        group = self.group
        generators: t.List[int] = []
        current: t.FrozenSet[int] = frozenset((0,))
        for x in sorted(self.elements, key=lambda x: (-group.element_order(x), x)):
            if x not in current:
                generators.append(x)
                current = group.closure(generators)
                if len(current) == len(self.elements):
                    break
        return tuple(generators)

    def is_subgroup_of(self, other: Subgroup) -> bool:
        return self.group is other.group and self.elements <= other.elements

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def describe(self) -> str:
        return "{" + ", ".join(self.group.label(x) for x in self.sorted) + "}"


@dataclasses.dataclass(frozen=True)
class GroupHom:
    """A homomorphism between two subgroups, possibly of different groups"""

    domain: Subgroup
    codomain: Subgroup
    graph: t.FrozenSet[t.Tuple[int, int]]

    def __repr__(self) -> str:
        return f"<GroupHom {self.describe()}>"

    def __call__(self, x: int) -> int:
        return self.values[x]

    @functools.cached_property
    def values(self) -> t.Dict[int, int]:
        return dict(self.graph)

    @functools.cached_property
    def sort_key(self) -> t.Tuple[t.Tuple[int, int], ...]:
        return tuple(sorted(self.graph))

    @functools.cached_property
    def image(self) -> Subgroup:
        return self.codomain.group.subgroup(self.values.values())

    @functools.cached_property
    def kernel(self) -> Subgroup:
        return self.domain.group.subgroup(x for x, y in self.graph if y == 0)

    @property
    def is_injective(self) -> bool:
        return self.image.order == self.domain.order

    @property
    def is_surjective(self) -> bool:
        return self.image.elements == self.codomain.elements

    @property
    def kind(self) -> str:
        if self.is_surjective:
            return "isomorphism" if self.is_injective else "epimorphism"
        return "general"

    def is_identity(self) -> bool:
        return all(x == y for x, y in self.graph)

    def inverse(self) -> GroupHom:
        if not self.is_injective:
            raise PreconditionError("Only injective homomorphisms can be inverted")
        return GroupHom(
            domain=self.image,
            codomain=self.domain,
            graph=frozenset((y, x) for x, y in self.graph),
        )

    def restrict(self, subgroup: Subgroup) -> GroupHom:
        return GroupHom(
            domain=subgroup,
            codomain=self.codomain,
            graph=frozenset((x, y) for x, y in self.graph if x in subgroup.elements),
        )

    def onto_image(self) -> GroupHom:
        return dataclasses.replace(self, codomain=self.image)

    def into(self, codomain: Subgroup) -> GroupHom:
        if not self.image.is_subgroup_of(codomain):
            raise PreconditionError("The image does not lie in the requested codomain")
        return dataclasses.replace(self, codomain=codomain)

    def describe(self) -> str:
        source, target = self.domain.group, self.codomain.group
        return (
            "{"
            + ", ".join(
                f"{source.label(x)}->{target.label(self.values[x])}"
                for x in self.domain.sorted
            )
            + "}"
        )


def compose(outer: GroupHom, inner: GroupHom) -> GroupHom:
    """Return outer∘inner, defined when the image of inner lies in the domain of outer"""
    if not inner.image.is_subgroup_of(outer.domain):
        raise PreconditionError("Cannot compose: the inner image is not in the outer domain")
    values = outer.values
    return GroupHom(
        domain=inner.domain,
        codomain=outer.codomain,
        graph=frozenset((x, values[y]) for x, y in inner.graph),
    )


def identity_hom(subgroup: Subgroup) -> GroupHom:
    return GroupHom(subgroup, subgroup, frozenset((x, x) for x in subgroup.elements))


def conjugation_hom(group: FiniteGroup, g: int, subgroup: Subgroup) -> GroupHom:
    """c_g restricted to the subgroup, as a map onto its conjugate"""
    graph = frozenset((x, group.conjugate(g, x)) for x in subgroup.elements)
    return GroupHom(subgroup, group.conjugate_subgroup(g, subgroup), graph)


@functools.lru_cache(maxsize=None)
def direct_product(left: FiniteGroup, right: FiniteGroup) -> FiniteGroup:
    """G×H with element (g,h) stored at index g·|H|+h"""
    m = right.order
    table = tuple(
        tuple(
            left.table[g1][g2] * m + right.table[h1][h2]
            for g2 in range(left.order)
            for h2 in range(m)
        )
        for g1 in range(left.order)
        for h1 in range(m)
    )
    labels = tuple(
        f"({left.label(g)},{right.label(h)})"
        for g in range(left.order)
        for h in range(m)
    )
    return FiniteGroup(
        name=f"{left.name}x{right.name}",
        table=table,
        labels=labels,
        factors=(left, right),
    )


def _extend_to_hom(
    domain: Subgroup,
    codomain_group: FiniteGroup,
    generators: t.Sequence[int],
    images: t.Sequence[int],
) -> t.Optional[t.Dict[int, int]]:
    """Extend an assignment on generators along the Cayley graph.

    Every edge x -> xg is checked, so a returned mapping is a homomorphism."""
    source = domain.group.table
    target = codomain_group.table
    mapping = {0: 0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            fx = mapping[x]
            for g, image in zip(generators, images):
                y = source[x][g]
                fy = target[fx][image]
                known = mapping.get(y)
                if known is None:
                    mapping[y] = fy
                    new.append(y)
                elif known != fy:
                    return None
        frontier = new
    return mapping


@functools.lru_cache(maxsize=4096)
def homomorphisms(
    domain: Subgroup, codomain: Subgroup, kind: HomKind = "all"
) -> t.Tuple[GroupHom, ...]:
    """Every homomorphism domain -> codomain of the requested kind.

    "conjugation" returns the maps c_g with gUg⁻¹ inside the codomain and
    needs both subgroups to live in the same group."""
    if kind == "conjugation":
        return _conjugation_homs(domain, codomain)
    if kind not in ("all", "epi", "mono", "iso"):
        raise ValueError(f"Unknown homomorphism kind {kind!r}")
    if kind == "iso" and domain.order != codomain.order:
        return ()
    if kind == "epi" and domain.order % codomain.order:
        return ()
    if kind == "mono" and codomain.order % domain.order:
        return ()

    codomain_group = codomain.group
    generators = domain.generators
    candidates = []
    for g in generators:
        order = domain.group.element_order(g)
        if kind in ("iso", "mono"):
            allowed = [
                x for x in codomain.sorted if codomain_group.element_order(x) == order
            ]
        else:
            allowed = [
                x
                for x in codomain.sorted
                if order % codomain_group.element_order(x) == 0
            ]
        candidates.append(allowed)

    found = []
    for images in itertools.product(*candidates):
        mapping = _extend_to_hom(domain, codomain_group, generators, images)
        if mapping is None:
            continue
        image_size = len(set(mapping.values()))
        if kind in ("epi", "iso") and image_size != codomain.order:
            continue
        if kind in ("mono", "iso") and image_size != domain.order:
            continue
        found.append(GroupHom(domain, codomain, frozenset(mapping.items())))
    return tuple(sorted(found, key=lambda hom: hom.sort_key))


def _conjugation_homs(domain: Subgroup, codomain: Subgroup) -> t.Tuple[GroupHom, ...]:
    group = domain.group
    if codomain.group is not group:
        raise PreconditionError(
            "Conjugation-induced maps need subgroups of a single group"
        )
    found = set()
    for g in range(group.order):
        hom = conjugation_hom(group, g, domain)
        if hom.image.is_subgroup_of(codomain):
            found.add(hom.into(codomain))
    return tuple(sorted(found, key=lambda hom: hom.sort_key))


def automorphisms(subgroup: Subgroup) -> t.Tuple[GroupHom, ...]:
    return homomorphisms(subgroup, subgroup, "iso")


def injections(domain: Subgroup, codomain: Subgroup) -> t.Tuple[GroupHom, ...]:
    return homomorphisms(domain, codomain, "mono")


@functools.lru_cache(maxsize=1024)
def composition_length(subgroup: t.Union[FiniteGroup, Subgroup]) -> int:
    """Length of a composition series.

    p-groups short-circuit to the exponent of their order; otherwise the
    series is found by descending through normal subgroups of largest order."""
    if isinstance(subgroup, FiniteGroup):
        subgroup = subgroup.whole
    order = subgroup.order
    if order == 1:
        return 0
    for p in _prime_factors(order):
        if is_power_of(order, p):
            return round(math.log(order, p))
    group = subgroup.group
    normal = [
        candidate
        for candidate in group.subgroups_of(subgroup)
        if candidate.order < order and group.is_normal(candidate, subgroup)
    ]
    maximal = max(normal, key=lambda s: (s.order, [-x for x in s.sorted]))
    return 1 + composition_length(maximal)


def _prime_factors(n: int) -> t.List[int]:
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def sylow_subgroup(group: FiniteGroup, p: int) -> Subgroup:
    """The Sylow p-subgroup with the least canonical key"""
    order = 1
    n = group.order
    while n % p == 0:
        n //= p
        order *= p
    for subgroup in group.subgroups:
        if subgroup.order == order:
            return subgroup
    raise PreconditionError(f"{group.name} has no subgroup of order {order}")


def is_sylow(group: FiniteGroup, subgroup: Subgroup, p: int) -> bool:
    return is_power_of(subgroup.order, p) and (group.order // subgroup.order) % p != 0
