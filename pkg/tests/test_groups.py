import gc
import weakref

import pytest

from apd.burnside.catalog import catalog_group
from apd.burnside.exceptions import PreconditionError
from apd.burnside.groups import (
    automorphisms,
    compose,
    composition_length,
    conjugation_hom,
    direct_product,
    homomorphisms,
    identity_hom,
    injections,
    is_sylow,
    sylow_subgroup,
)


@pytest.mark.parametrize(
    "name,subgroups,classes",
    [
        ("1", 1, 1),
        ("C2", 2, 2),
        ("C6", 4, 4),
        ("V4", 5, 5),
        ("S3", 6, 4),
        ("Q8", 6, 6),
        ("D8", 10, 8),
        ("A4", 10, 5),
    ],
)
def test_subgroup_lattice_sizes(name, subgroups, classes):
    group = catalog_group(name)
    assert len(group.subgroups) == subgroups
    assert len(group.subgroup_classes) == classes


@pytest.mark.parametrize("name", ["C4", "V4", "S3", "Q8", "D8", "A4"])
def test_identity_is_element_zero(name):
    group = catalog_group(name)
    assert group.table[0] == tuple(range(group.order))
    assert all(row[0] == i for i, row in enumerate(group.table))


def test_subgroups_are_sorted_by_canonical_key(d8):
    keys = [subgroup.key for subgroup in d8.subgroups]
    assert keys == sorted(keys)
    assert d8.subgroups[0] == d8.trivial
    assert d8.subgroups[-1] == d8.whole


def test_class_representative_is_least_conjugate(s3):
    for members in s3.subgroup_classes:
        for subgroup in members:
            assert s3.class_representative(subgroup) == members[0]


class TestNormalizersAndCentralizers:
    def test_reflection_subgroup_of_s3(self, s3):
        reflection = next(s for s in s3.subgroups if s.order == 2)
        assert s3.normalizer(reflection) == reflection
        assert s3.centralizer(reflection) == reflection
        assert not s3.is_normal(reflection)

    def test_rotation_subgroup_of_s3(self, s3):
        rotations = next(s for s in s3.subgroups if s.order == 3)
        assert s3.normalizer(rotations) == s3.whole
        assert s3.centralizer(rotations) == rotations
        assert s3.is_normal(rotations)

    def test_relative_centralizer_of_trivial_kernel_is_centralizer(self, s3):
        rotations = next(s for s in s3.subgroups if s.order == 3)
        assert s3.relative_centralizer(s3.trivial, rotations) == s3.centralizer(rotations)

    def test_relative_centralizer_of_whole_quotient(self, s3):
        assert s3.relative_centralizer(s3.whole, s3.whole) == s3.whole

    def test_relative_centralizer_needs_normal_kernel(self, s3):
        reflection = next(s for s in s3.subgroups if s.order == 2)
        with pytest.raises(PreconditionError):
            s3.relative_centralizer(reflection, s3.whole)


class TestHomomorphisms:
    @pytest.fixture
    def subject(self):
        return homomorphisms

    @pytest.mark.parametrize(
        "name,count",
        [("C2", 1), ("C3", 2), ("C4", 2), ("V4", 6), ("S3", 6), ("Q8", 24), ("D8", 8)],
    )
    def test_automorphism_counts(self, subject, name, count):
        group = catalog_group(name)
        assert len(subject(group.whole, group.whole, "iso")) == count
        assert automorphisms(group.whole) == subject(group.whole, group.whole, "iso")

    def test_all_homomorphisms_between_cyclic_groups(self, subject, c4, c2):
        assert len(subject(c4.whole, c2.whole, "all")) == 2
        assert len(subject(c4.whole, c2.whole, "epi")) == 1
        assert subject(c4.whole, c2.whole, "mono") == ()

    def test_injections_into_klein_four(self, c2, v4):
        assert len(injections(c2.whole, v4.whole)) == 3

    def test_conjugation_maps(self, subject, s3):
        reflection = next(s for s in s3.subgroups if s.order == 2)
        maps = subject(reflection, s3.whole, "conjugation")
        assert len(maps) == 3
        assert {phi.image for phi in maps} == {s for s in s3.subgroups if s.order == 2}

    def test_conjugation_needs_one_group(self, subject, c2, c3):
        with pytest.raises(PreconditionError):
            subject(c2.whole, c3.whole, "conjugation")

    def test_unknown_kind(self, subject, c2):
        with pytest.raises(ValueError):
            subject(c2.whole, c2.whole, "endo")

    def test_results_are_homomorphisms(self, subject, d8):
        for phi in subject(d8.whole, d8.whole, "iso"):
            for a in range(d8.order):
                for b in range(d8.order):
                    assert phi(d8.mul(a, b)) == d8.mul(phi(a), phi(b))


class TestGroupHom:
    def test_inverse_of_automorphism(self, c3):
        inversion = next(phi for phi in automorphisms(c3.whole) if not phi.is_identity())
        assert compose(inversion, inversion).is_identity()
        assert inversion.inverse().graph == inversion.graph

    def test_inverse_needs_injective(self, c4, c2):
        (projection,) = homomorphisms(c4.whole, c2.whole, "epi")
        assert projection.kernel.order == 2
        with pytest.raises(PreconditionError):
            projection.inverse()

    def test_compose_needs_matching_image(self, c2, c4):
        (projection,) = homomorphisms(c4.whole, c2.whole, "epi")
        with pytest.raises(PreconditionError):
            compose(projection, projection)

    def test_restrict_and_into(self, s3):
        rotations = next(s for s in s3.subgroups if s.order == 3)
        phi = conjugation_hom(s3, 1, s3.whole)
        restricted = phi.restrict(rotations).onto_image()
        assert restricted.codomain == rotations
        assert restricted.is_surjective
        with pytest.raises(PreconditionError):
            identity_hom(s3.whole).into(rotations)


@pytest.mark.parametrize(
    "name,length",
    [("1", 0), ("C2", 1), ("C4", 2), ("C6", 2), ("S3", 2), ("V4", 2), ("D8", 3), ("A4", 3), ("S4", 4)],
)
def test_composition_length(name, length):
    assert composition_length(catalog_group(name)) == length


class TestSylow:
    def test_sylow_subgroups(self, s3, a4):
        assert sylow_subgroup(s3, 3).order == 3
        assert sylow_subgroup(s3, 2).order == 2
        assert sylow_subgroup(a4, 2).order == 4
        assert is_sylow(a4, sylow_subgroup(a4, 2), 2)

    def test_trivial_subgroup_is_not_sylow(self, s3):
        assert not is_sylow(s3, s3.trivial, 2)

    def test_induced_group_keeps_identity(self, a4):
        sylow = sylow_subgroup(a4, 2)
        base = a4.induced(sylow)
        assert base.order == 4
        assert base.is_abelian
        assert base.table[0] == (0, 1, 2, 3)
        assert base.is_p_group(2)


class TestDirectProduct:
    def test_product_is_cached(self, c2, c3):
        assert direct_product(c2, c3) is direct_product(c2, c3)

    def test_pair_and_split(self, c2, c3):
        product = direct_product(c2, c3)
        assert product.order == 6
        assert product.pair(1, 2) == 5
        assert product.split(5) == (1, 2)
        assert product.factors == (c2, c3)

    def test_multiplication_is_componentwise(self, s3, c3):
        product = direct_product(s3, c3)
        for g1 in range(s3.order):
            for g2 in range(s3.order):
                x = product.mul(product.pair(g1, 1), product.pair(g2, 2))
                assert product.split(x) == (s3.mul(g1, g2), 0)


class TestCaches:
    def test_results_are_cached_on_the_group(self, s3):
        reflection = next(s for s in s3.subgroups if s.order == 2)
        assert s3.normalizer(reflection) is s3.normalizer(reflection)
        assert s3.conjugates(reflection) is s3.conjugates(reflection)

    def test_groups_are_released_with_their_caches(self, a4):
        group = a4.induced(sylow_subgroup(a4, 2), "V")
        subgroup = group.subgroups[1]
        group.normalizer(subgroup)
        group.centralizer(subgroup)
        group.conjugates(subgroup)
        group.element_order(1)
        ref = weakref.ref(group)
        del group, subgroup
        gc.collect()
        assert ref() is None
