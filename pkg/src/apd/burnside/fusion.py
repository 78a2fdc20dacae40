"""Fusion systems on p-groups, their characteristic idempotents and saturation"""
from __future__ import annotations

from collections import defaultdict, deque
from concurrent.futures import ThreadPoolExecutor
import dataclasses
from fractions import Fraction
import functools
import itertools
import logging
import typing as t

from .burnside import BurnsideElement, SubgroupSystem
from .exceptions import CapacityError, DomainError, PreconditionError
from .ghost import GhostElement, rho, rho_inverse, sigma_tilde
from .goursat import ProductSubgroup, diagonal, twisted_diagonal
from .groups import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    compose,
    conjugation_hom,
    homomorphisms,
    is_sylow,
    sylow_subgroup,
)
from .utils import is_p_integral

logger = logging.getLogger(__name__)

DEFAULT_FUSION_MAX_ORDER = 16


@dataclasses.dataclass(frozen=True)
class FusionSystem:
    """A fusion system on a p-group, stored as every morphism P -> S.

    Morphisms always have the whole base group as codomain; Hom_F(P,Q)
    is read off as those whose image lies in Q."""

    base: FiniteGroup
    prime: int
    morphisms: t.FrozenSet[GroupHom]

    def __post_init__(self) -> None:
        if not self.base.is_p_group(self.prime):
            raise PreconditionError(
                f"{self.base.name} is not a {self.prime}-group"
            )

    def __repr__(self) -> str:
        return f"<FusionSystem on {self.base.name} with {len(self.morphisms)} morphisms>"

    @functools.cached_property
    def _by_domain(self) -> t.Dict[Subgroup, t.Tuple[GroupHom, ...]]:
        grouped: t.Dict[Subgroup, t.List[GroupHom]] = defaultdict(list)
        for phi in self.morphisms:
            grouped[phi.domain].append(phi)
        return {
            P: tuple(sorted(homs, key=lambda hom: hom.sort_key))
            for P, homs in grouped.items()
        }

    @functools.cached_property
    def sort_key(self) -> t.Tuple[int, t.Tuple[t.Tuple[t.Tuple[int, int], ...], ...]]:
        return (
            len(self.morphisms),
            tuple(sorted(phi.sort_key for phi in self.morphisms)),
        )

    def hom(self, domain: Subgroup, target: t.Optional[Subgroup] = None) -> t.Tuple[GroupHom, ...]:
        """Hom_F(P, Q), defaulting to Q = S"""
        homs = self._by_domain.get(domain, ())
        if target is None:
            return homs
        return tuple(phi.into(target) for phi in homs if phi.image.is_subgroup_of(target))

    def hom_count(self, domain: Subgroup) -> int:
        return len(self._by_domain.get(domain, ()))

    def aut(self, subgroup: Subgroup) -> t.Tuple[GroupHom, ...]:
        return tuple(
            GroupHom(subgroup, subgroup, phi.graph)
            for phi in self.hom(subgroup)
            if phi.image == subgroup
        )

    def isomorphism_class(self, subgroup: Subgroup) -> t.Tuple[Subgroup, ...]:
        """Every Q ≤ S with Q =_F P, sorted by canonical key"""
        return tuple(sorted({phi.image for phi in self.hom(subgroup)}, key=lambda Q: Q.key))

    def object_classes(self) -> t.List[t.Tuple[Subgroup, ...]]:
        seen: t.Set[Subgroup] = set()
        classes = []
        for P in self.base.subgroups:
            if P in seen:
                continue
            members = self.isomorphism_class(P)
            seen.update(members)
            classes.append(members)
        return classes

    def is_fully_normalized(self, subgroup: Subgroup) -> bool:
        size = self.base.normalizer(subgroup).order
        return all(
            self.base.normalizer(Q).order <= size for Q in self.isomorphism_class(subgroup)
        )

    def is_fully_centralized(self, subgroup: Subgroup) -> bool:
        size = self.base.centralizer(subgroup).order
        return all(
            self.base.centralizer(Q).order <= size for Q in self.isomorphism_class(subgroup)
        )

    def automizer(self, subgroup: Subgroup) -> t.FrozenSet[GroupHom]:
        """Aut_S(P), the automorphisms induced by N_S(P)"""
        group = self.base
        return frozenset(
            GroupHom(subgroup, subgroup, conjugation_hom(group, g, subgroup).graph)
            for g in group.normalizer(subgroup).elements
        )

    def n_phi(self, phi: GroupHom) -> Subgroup:
        """N_φ: the y in N_S(P) with φ∘c_y∘φ⁻¹ induced by some z in N_S(φ(P))"""
        group = self.base
        P, Q = phi.domain, phi.image
        values = phi.values
        induced = {
            tuple(sorted(conjugation_hom(group, z, Q).graph))
            for z in group.normalizer(Q).elements
        }
        keep = []
        for y in group.normalizer(P).elements:
            twisted = tuple(
                sorted((values[u], values[group.conjugate(y, u)]) for u in P.elements)
            )
            if twisted in induced:
                keep.append(y)
        return group.subgroup(keep)

    def extends(self, phi: GroupHom, subgroup: Subgroup) -> t.Optional[GroupHom]:
        """A morphism of F on the given overgroup restricting to φ, if there is one"""
        for psi in self.hom(subgroup):
            if phi.graph <= psi.graph:
                return psi
        return None

    def transport(self, iso: GroupHom) -> FusionSystem:
        """Move the system along an isomorphism from the base onto another group"""
        if iso.domain != self.base.whole or not iso.is_injective or not iso.is_surjective:
            raise PreconditionError("Transport needs an isomorphism defined on the whole base group")
        target = iso.codomain.group
        move = iso.values
        morphisms = frozenset(
            GroupHom(
                target.subgroup(move[x] for x in phi.domain.elements),
                target.whole,
                frozenset((move[x], move[y]) for x, y in phi.graph),
            )
            for phi in self.morphisms
        )
        return FusionSystem(target, self.prime, morphisms)

    def is_subsystem(self, other: FusionSystem) -> bool:
        return self.base is other.base and self.morphisms <= other.morphisms

    @functools.cached_property
    def system(self) -> SubgroupSystem:
        """S(F), the twisted diagonals Δ(φ(P), φ, P)"""
        return SubgroupSystem.custom(
            self.base, self.base, (twisted_diagonal(phi) for phi in self.morphisms)
        )

    def is_inner(self) -> bool:
        return self.morphisms == inner_fusion_system(self.base, self.prime).morphisms

    def to_dict(self) -> t.Dict[str, t.Any]:
        return {
            "group": self.base.name,
            "prime": self.prime,
            "class_reps": [members[0].describe() for members in self.object_classes()],
            "morphism_tables": [
                {
                    "domain": P.describe(),
                    "maps": [phi.describe() for phi in self.hom(P)],
                }
                for P in self.base.subgroups
            ],
        }


def _close(
    base: FiniteGroup,
    seeds: t.Iterable[GroupHom],
    known: t.Iterable[GroupHom] = (),
) -> t.FrozenSet[GroupHom]:
    """Close a morphism set under restriction, inverses and composition.

    known must already be closed; only the consequences of the seeds are
    worked out."""
    whole = base.whole
    closed: t.Set[GroupHom] = set()
    by_domain: t.Dict[Subgroup, t.Set[GroupHom]] = defaultdict(set)
    by_image: t.Dict[Subgroup, t.Set[GroupHom]] = defaultdict(set)
    queue: t.Deque[GroupHom] = deque()

    def record(phi: GroupHom) -> bool:
        if phi in closed:
            return False
        closed.add(phi)
        by_domain[phi.domain].add(phi)
        by_image[phi.image].add(phi)
        return True

    def push(phi: GroupHom) -> None:
        if record(phi):
            queue.append(phi)

    for phi in known:
        record(phi)
    for phi in seeds:
        push(phi)

    while queue:
        phi = queue.popleft()
        for Q in base.subgroups_of(phi.domain):
            if Q != phi.domain:
                push(phi.restrict(Q))
        push(phi.inverse().into(whole))
        for psi in list(by_domain[phi.image]):
            push(compose(psi, phi))
        for chi in list(by_image[phi.domain]):
            push(compose(phi, chi))
    logger.debug(f"closure on {base.name} has {len(closed)} morphisms")
    return frozenset(closed)


def _as_morphism(base: FiniteGroup, phi: GroupHom) -> GroupHom:
    if phi.domain.group is not base or phi.codomain.group is not base:
        raise PreconditionError(f"Generators must map subgroups of {base.name} into it")
    if not phi.is_injective:
        raise PreconditionError(f"{phi.describe()} is not injective")
    return phi.into(base.whole)


@functools.lru_cache(maxsize=None)
def inner_fusion_system(base: FiniteGroup, prime: int) -> FusionSystem:
    """F_S(S): only the conjugations by elements of S"""
    return fusion_generate(base, prime, [])


def fusion_generate(
    base: FiniteGroup, prime: int, morphisms: t.Iterable[GroupHom]
) -> FusionSystem:
    """The smallest fusion system containing the given injective maps"""
    whole = base.whole
    seeds = [conjugation_hom(base, s, whole).into(whole) for s in range(base.order)]
    seeds.extend(_as_morphism(base, phi) for phi in morphisms)
    return FusionSystem(base, prime, _close(base, seeds))


def fusion_from_group(
    ambient: FiniteGroup, sylow: Subgroup, prime: int, name: t.Optional[str] = None
) -> FusionSystem:
    """F_S(G), realized on the Sylow subgroup as a group in its own right"""
    if not is_sylow(ambient, sylow, prime):
        raise PreconditionError(
            f"{sylow.describe()} is not a Sylow {prime}-subgroup of {ambient.name}"
        )
    base = ambient.induced(sylow, name=name or f"Syl{prime}({ambient.name})")
    position = {x: i for i, x in enumerate(sylow.sorted)}
    morphisms = set()
    for P in ambient.subgroups_of(sylow):
        domain = base.subgroup(position[x] for x in P.elements)
        for g in range(ambient.order):
            pairs = [(x, ambient.conjugate(g, x)) for x in P.elements]
            if not all(y in sylow.elements for _, y in pairs):
                continue
            graph = frozenset((position[x], position[y]) for x, y in pairs)
            morphisms.add(GroupHom(domain, base.whole, graph))
    return FusionSystem(base, prime, frozenset(morphisms))


def fusion_on(base: FiniteGroup, ambient: FiniteGroup, prime: int) -> FusionSystem:
    """F_S(G) for the Sylow p-subgroup of G, transported onto the given group S"""
    system = fusion_from_group(ambient, sylow_subgroup(ambient, prime), prime)
    isomorphisms = homomorphisms(system.base.whole, base.whole, "iso")
    if not isomorphisms:
        raise PreconditionError(
            f"The Sylow {prime}-subgroup of {ambient.name} is not isomorphic to {base.name}"
        )
    return system.transport(isomorphisms[0])


def _order_three_automorphisms(base: FiniteGroup) -> t.List[GroupHom]:
    if base.order != 4 or any(base.element_order(x) == 4 for x in range(4)):
        raise PreconditionError(f"{base.name} is not a Klein four-group")
    return [
        alpha
        for alpha in homomorphisms(base.whole, base.whole, "iso")
        if not alpha.is_identity() and compose(alpha, compose(alpha, alpha)).is_identity()
    ]


def automizer_system(base: FiniteGroup, prime: int, automorphisms: t.Iterable[GroupHom]) -> FusionSystem:
    """Generated by automorphisms of S together with all their restrictions"""
    return fusion_generate(base, prime, automorphisms)


def restriction_system(base: FiniteGroup, prime: int, automorphisms: t.Iterable[GroupHom]) -> FusionSystem:
    """Generated by the restrictions of automorphisms of S to proper subgroups only"""
    restrictions = [
        alpha.restrict(P)
        for alpha in automorphisms
        for P in base.subgroups
        if P.order < base.order
    ]
    return fusion_generate(base, prime, restrictions)


def example_b(base: FiniteGroup) -> FusionSystem:
    """The system of A4 on a Klein four-group, Aut_F(S) of order 3"""
    return automizer_system(base, 2, _order_three_automorphisms(base))


def example_c(base: FiniteGroup) -> FusionSystem:
    """The order-3 automorphisms of a Klein four-group, restricted to proper subgroups"""
    return restriction_system(base, 2, _order_three_automorphisms(base))


def _isomorphism_candidates(base: FiniteGroup) -> t.List[GroupHom]:
    whole = base.whole
    found = []
    for P in base.subgroups:
        for Q in base.subgroups:
            if P.order != Q.order:
                continue
            found.extend(phi.into(whole) for phi in homomorphisms(P, Q, "iso"))
    return found


def enumerate_fusion_systems(
    base: FiniteGroup,
    prime: int,
    max_order: t.Optional[int] = None,
    workers: t.Optional[int] = None,
) -> t.List[FusionSystem]:
    """Every fusion system on S, smallest first.

    Each layer adds one isomorphism between subgroups to a system from the
    previous layer and closes; every system is reached since it is
    generated by its isomorphisms. With workers the closures of a layer run
    on a thread pool and are merged in submission order."""
    bound = DEFAULT_FUSION_MAX_ORDER if max_order is None else max_order
    if base.order > bound:
        raise CapacityError(
            f"Enumerating fusion systems on a group of order {base.order} exceeds the bound of {bound}"
        )
    inner = inner_fusion_system(base, prime)
    candidates = _isomorphism_candidates(base)
    found: t.Dict[t.FrozenSet[GroupHom], FusionSystem] = {inner.morphisms: inner}
    layer = [inner]
    pool = ThreadPoolExecutor(max_workers=workers) if workers else None
    try:
        depth = 0
        while layer:
            jobs = [
                (system, phi)
                for system in layer
                for phi in candidates
                if phi not in system.morphisms
            ]

            def close(job: t.Tuple[FusionSystem, GroupHom]) -> t.FrozenSet[GroupHom]:
                system, phi = job
                return _close(base, [phi], system.morphisms)

            results: t.Iterable[t.FrozenSet[GroupHom]]
            if pool is None:
                results = map(close, jobs)
            else:
                results = pool.map(close, jobs)
            next_layer = []
            for morphisms in results:
                if morphisms in found:
                    continue
                system = FusionSystem(base, prime, morphisms)
                found[morphisms] = system
                next_layer.append(system)
            depth += 1
            logger.debug(
                f"layer {depth} on {base.name}: {len(jobs)} closures, {len(next_layer)} new systems"
            )
            layer = next_layer
    finally:
        if pool is not None:
            pool.shutdown()
    return sorted(found.values(), key=lambda system: system.sort_key)


# Idempotents


def _require_square_bifree(element: BurnsideElement) -> None:
    if element.left is not element.right:
        raise DomainError("Fusion idempotents live in B(S,S)")
    if not all(L.is_bifree for L in element.coefficients):
        raise DomainError("The Frobenius criterion needs support on twisted diagonals")


def _pair(first: GroupHom, second: GroupHom) -> ProductSubgroup:
    """Δ(φP, φψ⁻¹, ψP) = {(φ(u), ψ(u))}"""
    return ProductSubgroup.from_pairs(
        first.codomain.group,
        second.codomain.group,
        ((first.values[u], second.values[u]) for u in first.domain.elements),
    )


def _right_frobenius(element: BurnsideElement) -> bool:
    group = element.left
    for P in group.subgroup_representatives:
        injections = homomorphisms(P, group.whole, "mono")
        marks = {phi: element.mark(twisted_diagonal(phi)) for phi in injections}
        for phi, psi in itertools.product(injections, repeat=2):
            if marks[phi] * marks[psi] != element.mark(_pair(phi, psi)) * marks[psi]:
                logger.debug(f"Frobenius criterion fails at {phi.describe()}, {psi.describe()}")
                return False
    return True


def is_frobenius(element: BurnsideElement) -> t.Tuple[bool, bool]:
    """(left, right) Frobenius by the fixed-point criterion; left is right for a°"""
    _require_square_bifree(element)
    return (_right_frobenius(element.opposite()), _right_frobenius(element))


def fix_set(element: BurnsideElement) -> SubgroupSystem:
    """Fix(a): the twisted diagonals with non-zero mark"""
    group = element.left
    return SubgroupSystem.custom(
        group,
        group,
        (L for L in SubgroupSystem.bifree(group, group).basis if element.mark(L)),
    )


def _fix_closed_under_subgroups(fix: SubgroupSystem) -> bool:
    for L in fix.basis:
        triple = L.to_triple()
        for W in triple.V.group.subgroups_of(triple.V):
            restricted = triple.alpha.restrict(W)
            M = ProductSubgroup.from_pairs(
                L.left, L.right, ((y, x) for x, y in restricted.graph)
            )
            if M not in fix:
                return False
    return True


@dataclasses.dataclass(frozen=True)
class IdempotentReport:
    fusion: FusionSystem
    omega_ghost: GhostElement
    omega_standard: BurnsideElement
    marks: t.Dict[ProductSubgroup, Fraction]
    is_idempotent: bool
    is_frobenius_left: bool
    is_frobenius_right: bool
    is_symmetric: bool
    fix_set: SubgroupSystem
    valuation: t.Optional[int]
    sat_fs_condition: t.Dict[Subgroup, Fraction]

    @property
    def fix_matches(self) -> bool:
        return self.fix_set.basis == self.fusion.system.basis

    @property
    def p_integral_standard(self) -> bool:
        return self.valuation is None or self.valuation >= 0

    @property
    def sat_fs_integral(self) -> t.Dict[Subgroup, bool]:
        return {
            P: is_p_integral(value, self.fusion.prime)
            for P, value in self.sat_fs_condition.items()
        }


def sat_fs_values(fusion: FusionSystem) -> t.Dict[Subgroup, Fraction]:
    """|S|/(|Hom_F(P,S)|·|C_S(P)|) for each class representative P"""
    group = fusion.base
    return {
        P: Fraction(group.order, fusion.hom_count(P) * group.centralizer(P).order)
        for P in group.subgroup_representatives
    }


def omega(fusion: FusionSystem) -> IdempotentReport:
    """ω_F from its marks: |S|/|Hom_F(p1(L),S)| on S(F), zero elsewhere"""
    group = fusion.base
    system = SubgroupSystem.bifree(group, group)
    members = fusion.system
    marks = {}
    terms = []
    for L in system.basis:
        value = Fraction(group.order, fusion.hom_count(L.p1)) if L in members else Fraction(0)
        marks[L] = value
        if value:
            terms.append((L, value / group.centralizer(L.p1).order))
    omega_ghost = GhostElement.from_terms(system, terms)
    omega_standard = rho_inverse(omega_ghost)
    left, right = is_frobenius(omega_standard)
    return IdempotentReport(
        fusion=fusion,
        omega_ghost=omega_ghost,
        omega_standard=omega_standard,
        marks=marks,
        is_idempotent=omega_standard * omega_standard == omega_standard,
        is_frobenius_left=left,
        is_frobenius_right=right,
        is_symmetric=omega_standard.opposite() == omega_standard,
        fix_set=fix_set(omega_standard),
        valuation=omega_standard.valuation(fusion.prime),
        sat_fs_condition=sat_fs_values(fusion),
    )


@dataclasses.dataclass(frozen=True)
class IdempotentClassification:
    is_idempotent: bool
    is_frobenius_left: bool
    is_frobenius_right: bool
    fix_set: SubgroupSystem
    fix_subgroup_closed: bool
    contains_diagonal: bool
    fix_closure_violations: t.Tuple[str, ...]
    valuation: t.Optional[int]
    ghost_p_integral: bool
    sigma_tilde_p_integral: bool

    @property
    def in_idem(self) -> bool:
        return (
            self.is_idempotent
            and self.is_frobenius_left
            and self.is_frobenius_right
            and self.fix_subgroup_closed
            and self.contains_diagonal
        )

    @property
    def p_integral_standard(self) -> bool:
        return self.valuation is None or self.valuation >= 0


def classify_idempotent(element: BurnsideElement, prime: int) -> IdempotentClassification:
    """Check the Idem(S) axioms and the p-integrality of a on each side"""
    _require_square_bifree(element)
    group = element.left
    left, right = is_frobenius(element)
    fix = fix_set(element)
    ghost = rho(element.in_system(SubgroupSystem.bifree(group, group)))
    blocks = sigma_tilde(element, SubgroupSystem.bifree(group, group))
    sigma_integral = all(
        is_p_integral(entry, prime)
        for block in blocks.values()
        for row in block.entries
        for entry in row
    )
    return IdempotentClassification(
        is_idempotent=element * element == element,
        is_frobenius_left=left,
        is_frobenius_right=right,
        fix_set=fix,
        fix_subgroup_closed=_fix_closed_under_subgroups(fix),
        contains_diagonal=diagonal(group.whole) in fix,
        fix_closure_violations=tuple(fix.closure_violations()),
        valuation=element.valuation(prime),
        ghost_p_integral=all(
            is_p_integral(c, prime) for c in ghost.coefficients.values()
        ),
        sigma_tilde_p_integral=sigma_integral,
    )


# Saturation


@dataclasses.dataclass(frozen=True)
class SaturationResult:
    saturated: bool
    axiom: t.Optional[str] = None
    subgroup: t.Optional[Subgroup] = None
    morphism: t.Optional[GroupHom] = None

    def __bool__(self) -> bool:
        return self.saturated


def is_saturated(fusion: FusionSystem) -> SaturationResult:
    """Brute-force check of the Sylow and Extension axioms"""
    group, p = fusion.base, fusion.prime
    whole = group.whole
    index = len(fusion.aut(whole)) // len(fusion.automizer(whole))
    if index % p == 0:
        return SaturationResult(False, "sylow", whole, None)
    for P in group.subgroups:
        for phi in fusion.hom(P):
            if not fusion.is_fully_normalized(phi.image):
                continue
            N = fusion.n_phi(phi)
            if fusion.extends(phi, N) is None:
                logger.debug(
                    f"{phi.describe()} on {P.describe()} does not extend to {N.describe()}"
                )
                return SaturationResult(False, "extension", P, phi)
    return SaturationResult(True)


@dataclasses.dataclass(frozen=True)
class ClassStatistics:
    representative: Subgroup
    members: t.Tuple[Subgroup, ...]
    fully_normalized: t.Tuple[Subgroup, ...]
    fully_centralized: t.Tuple[Subgroup, ...]
    sylow_automizer: t.Tuple[Subgroup, ...]
    fully_normalized_classes: int
    sat_fs: Fraction
    sat_fs_integral: bool

    @property
    def normalized_criterion_holds(self) -> bool:
        """Fully normalized exactly when fully centralized with a Sylow automizer"""
        expected = set(self.fully_centralized) & set(self.sylow_automizer)
        return set(self.fully_normalized) == expected


def generalized_saturation_stats(fusion: FusionSystem) -> t.List[ClassStatistics]:
    group, p = fusion.base, fusion.prime
    stats = []
    for members in fusion.object_classes():
        representative = members[0]
        normalized = tuple(Q for Q in members if fusion.is_fully_normalized(Q))
        centralized = tuple(Q for Q in members if fusion.is_fully_centralized(Q))
        sylow = tuple(
            Q
            for Q in members
            if (len(fusion.aut(Q)) // len(fusion.automizer(Q))) % p != 0
        )
        classes = {group.class_representative(Q) for Q in normalized}
        value = Fraction(
            group.order,
            fusion.hom_count(representative) * group.centralizer(representative).order,
        )
        stats.append(
            ClassStatistics(
                representative=representative,
                members=members,
                fully_normalized=normalized,
                fully_centralized=centralized,
                sylow_automizer=sylow,
                fully_normalized_classes=len(classes),
                sat_fs=value,
                sat_fs_integral=is_p_integral(value, p),
            )
        )
    return stats


@dataclasses.dataclass(frozen=True)
class TriangleRecord:
    systems: t.Tuple[FusionSystem, ...]
    reports: t.Tuple[IdempotentReport, ...]

    @property
    def commutes(self) -> bool:
        """g(f(F)) = h(F): Fix(ω_F) is S(F) for every system"""
        return all(report.fix_matches for report in self.reports)

    @property
    def injective(self) -> bool:
        distinct = {report.omega_standard.terms for report in self.reports}
        return len(distinct) == len(self.reports)

    @property
    def failures(self) -> t.List[FusionSystem]:
        return [report.fusion for report in self.reports if not report.fix_matches]


def triangle_check(
    base: FiniteGroup,
    prime: int,
    max_order: t.Optional[int] = None,
    workers: t.Optional[int] = None,
) -> TriangleRecord:
    systems = enumerate_fusion_systems(base, prime, max_order=max_order, workers=workers)
    reports = tuple(omega(system) for system in systems)
    return TriangleRecord(tuple(systems), reports)
