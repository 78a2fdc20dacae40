from fractions import Fraction
import itertools

import pytest
import sympy

from apd.burnside.burnside import (
    BurnsideElement,
    ExplicitBiset,
    Flavor,
    SubgroupSystem,
    basis_product,
    decompose_biset,
    fixed_point_count,
    fixed_point_factorizations,
    mackey_product,
    mark,
    mark_matrix,
    standard_basis,
    tensor_oracle,
)
from apd.burnside.catalog import catalog_group
from apd.burnside.exceptions import CompositionError, PreconditionError, SystemClosureError
from apd.burnside.goursat import diagonal, left_kernel_product
from apd.burnside.groups import homomorphisms


def basis_elements(system):
    return [BurnsideElement.basis_element(system, L) for L in system.basis]


def left_free_systems(left, middle, right):
    G, H, K = catalog_group(left), catalog_group(middle), catalog_group(right)
    return SubgroupSystem.left_free(G, H), SubgroupSystem.left_free(H, K)


def assert_matches_oracle(first_system, second_system):
    for L in first_system.basis:
        for M in second_system.basis:
            expected = mackey_product(
                BurnsideElement.basis_element(first_system, L),
                BurnsideElement.basis_element(second_system, M),
            )
            product = tensor_oracle(ExplicitBiset.from_subgroup(L), ExplicitBiset.from_subgroup(M))
            assert decompose_biset(product) == expected


def assert_counts_agree(first_system, second_system):
    G, K = first_system.left, second_system.right
    for L in first_system.basis:
        for M in second_system.basis:
            X = ExplicitBiset.from_subgroup(L)
            Y = ExplicitBiset.from_subgroup(M)
            for W in K.subgroups:
                for U in G.subgroups:
                    for gamma in homomorphisms(W, U, "epi"):
                        count = fixed_point_count(X, Y, U, gamma, W)
                        assert count.direct == count.full_sum == count.class_sum == count.orbit_sum


class TestSubgroupSystem:
    @pytest.mark.parametrize(
        "flavor,size", [("all", 5), ("leftfree", 3), ("bifree", 2)]
    )
    def test_c2_basis_sizes(self, c2, flavor, size):
        assert len(standard_basis(c2, c2, flavor)) == size

    def test_c2_leftfree_order(self, c2_leftfree, c2):
        assert c2_leftfree.basis == (
            left_kernel_product(c2.trivial, c2.trivial),
            left_kernel_product(c2.trivial, c2.whole),
            diagonal(c2.whole),
        )

    def test_unknown_flavor(self, c2):
        with pytest.raises(PreconditionError):
            SubgroupSystem.named(c2, c2, "rightfree")
        with pytest.raises(PreconditionError):
            SubgroupSystem.named(c2, c2, "custom")

    def test_index_canonicalizes(self, s3):
        system = SubgroupSystem.bifree(s3, s3)
        reflections = [s for s in s3.subgroups if s.order == 2]
        assert system.index(diagonal(reflections[0])) == system.index(diagonal(reflections[2]))

    def test_index_outside_system(self, c2_bifree, c2):
        with pytest.raises(SystemClosureError):
            c2_bifree.index(left_kernel_product(c2.trivial, c2.whole))

    def test_custom_systems(self, s3):
        members = [diagonal(U) for U in s3.subgroups]
        system = SubgroupSystem.custom(s3, s3, members)
        assert system.flavor is Flavor.CUSTOM
        assert len(system) == 4
        assert all(L in system for L in members)
        assert system.closure_violations() == []

    def test_custom_system_violations(self, c2):
        system = SubgroupSystem.custom(c2, c2, [left_kernel_product(c2.trivial, c2.whole)])
        assert system.closure_violations() == ["subgroups", "opposite", "diagonal"]

    def test_standard_systems_are_closed(self, s3):
        for flavor in ("all", "bifree"):
            assert SubgroupSystem.named(s3, s3, flavor).closure_violations() == []
        assert SubgroupSystem.left_free(s3, s3).closure_violations() == ["opposite"]


class TestMarks:
    @pytest.fixture
    def subject(self):
        return mark_matrix

    def test_c2_leftfree_table(self, subject, c2_leftfree):
        assert subject(c2_leftfree) == sympy.Matrix([[4, 2, 2], [0, 2, 0], [0, 0, 2]])

    @pytest.mark.parametrize("name", ["C2", "C3", "S3"])
    def test_upper_triangular_with_normalizer_index_diagonal(self, subject, name):
        group = catalog_group(name)
        system = SubgroupSystem.all(group, group)
        matrix = subject(system)
        product = system.product
        for i, L in enumerate(system.basis):
            assert matrix[i, i] == product.normalizer(L.subgroup).order // L.order
            for j in range(i):
                assert matrix[i, j] == 0

    def test_marks_agree_with_explicit_bisets(self, c2):
        system = SubgroupSystem.all(c2, c2)
        for L, M in itertools.product(system.basis, repeat=2):
            assert mark(L, M) == ExplicitBiset.from_subgroup(M).mark(L)


class TestMackeyProduct:
    @pytest.fixture
    def subject(self):
        return mackey_product

    def test_c2_leftfree_products(self, subject, c2_leftfree, c2):
        trivial, kernel, identity = basis_elements(c2_leftfree)
        assert subject(trivial, trivial) == trivial.scale(2)
        assert subject(kernel, kernel) == kernel
        assert subject(kernel, trivial) == trivial
        assert subject(trivial, kernel) == kernel.scale(2)
        assert subject(identity, identity) == identity

    @pytest.mark.parametrize("name,flavor", [("C2", "all"), ("C3", "all"), ("S3", "leftfree")])
    def test_diagonal_is_identity(self, subject, name, flavor):
        group = catalog_group(name)
        system = SubgroupSystem.named(group, group, flavor)
        identity = BurnsideElement.identity(system)
        for element in basis_elements(system):
            assert subject(identity, element) == element
            assert subject(element, identity) == element

    def test_associative(self, subject, c2):
        system = SubgroupSystem.all(c2, c2)
        elements = basis_elements(system)
        for a, b, c in itertools.product(elements, repeat=3):
            assert subject(subject(a, b), c) == subject(a, subject(b, c))

    def test_opposite_is_anti_multiplicative(self, s3_leftfree):
        elements = basis_elements(s3_leftfree)
        for a, b in itertools.product(elements[:5], repeat=2):
            assert (a * b).opposite() == b.opposite() * a.opposite()

    def test_left_free_products_stay_left_free(self, s3_leftfree):
        elements = basis_elements(s3_leftfree)
        for a, b in itertools.product(elements, repeat=2):
            assert all(L.is_left_free for L in (a * b).coefficients)

    def test_middle_groups_must_agree(self, subject, c2, c3):
        a = BurnsideElement.identity(SubgroupSystem.all(c2, c2))
        b = BurnsideElement.identity(SubgroupSystem.all(c3, c3))
        with pytest.raises(CompositionError):
            subject(a, b)
        with pytest.raises(CompositionError):
            basis_product(diagonal(c2.whole), diagonal(c3.whole))

    def test_result_must_stay_in_the_declared_system(self, subject, c2_bifree, c2):
        a = BurnsideElement.identity(c2_bifree)
        target = SubgroupSystem.custom(c2, c2, [left_kernel_product(c2.trivial, c2.trivial)])
        with pytest.raises(SystemClosureError):
            subject(a, a, target)

    def test_products_are_integral(self, s3_leftfree):
        elements = basis_elements(s3_leftfree)
        assert all((a * b).is_integral() for a, b in itertools.product(elements, repeat=2))


class TestBurnsideElement:
    def test_zero_terms_are_dropped(self, c2_leftfree, c2):
        L = diagonal(c2.whole)
        element = BurnsideElement.from_terms(c2_leftfree, [(L, 1), (L, -1)])
        assert element.is_zero()
        assert element == BurnsideElement.zero(c2_leftfree)

    def test_outside_declared_system(self, c2_bifree, c2):
        with pytest.raises(SystemClosureError):
            BurnsideElement.basis_element(c2_bifree, left_kernel_product(c2.trivial, c2.whole))

    def test_arithmetic(self, c2_leftfree, c2):
        trivial, kernel, identity = basis_elements(c2_leftfree)
        element = identity - trivial.scale(Fraction(1, 2))
        assert element.coefficient(diagonal(c2.whole)) == 1
        assert element.coefficient(left_kernel_product(c2.trivial, c2.trivial)) == Fraction(-1, 2)
        assert not element.is_integral()
        assert element.valuation(2) == -1
        assert (2 * element).is_integral()
        assert -element + element == BurnsideElement.zero(c2_leftfree)

    def test_marks_are_linear(self, c2_leftfree):
        trivial, kernel, identity = basis_elements(c2_leftfree)
        combined = trivial.scale(3) + identity
        for L in c2_leftfree.basis:
            assert combined.mark(L) == 3 * trivial.mark(L) + identity.mark(L)

    def test_identity_needs_square(self, c2, c3):
        with pytest.raises(PreconditionError):
            BurnsideElement.identity(SubgroupSystem.all(c2, c3))


class TestTensorOracle:
    @pytest.fixture
    def subject(self):
        return tensor_oracle

    def test_identity_biset(self, subject, s3):
        identity = ExplicitBiset.identity(s3)
        identity.validate()
        assert decompose_biset(identity) == BurnsideElement.identity(SubgroupSystem.all(s3, s3))

    def test_validate_rejects_non_actions(self, c2):
        broken = ExplicitBiset(c2, c2, ((0, 1), (0, 0)), ((0, 1), (1, 0)))
        with pytest.raises(PreconditionError):
            broken.validate()

    @pytest.mark.parametrize("left,middle,right", [("C2", "C2", "C2"), ("C2", "C3", "C2"), ("C3", "C2", "C2")])
    def test_mackey_formula_matches_oracle(self, subject, left, middle, right):
        G, H, K = catalog_group(left), catalog_group(middle), catalog_group(right)
        first_system = SubgroupSystem.all(G, H)
        second_system = SubgroupSystem.all(H, K)
        for L in first_system.basis:
            for M in second_system.basis:
                expected = mackey_product(
                    BurnsideElement.basis_element(first_system, L),
                    BurnsideElement.basis_element(second_system, M),
                )
                product = subject(ExplicitBiset.from_subgroup(L), ExplicitBiset.from_subgroup(M))
                product.validate()
                assert decompose_biset(product) == expected

    @pytest.mark.functional
    def test_mackey_formula_matches_oracle_on_s3(self, subject, s3_leftfree):
        for L in s3_leftfree.basis:
            for M in s3_leftfree.basis:
                expected = mackey_product(
                    BurnsideElement.basis_element(s3_leftfree, L),
                    BurnsideElement.basis_element(s3_leftfree, M),
                )
                product = subject(ExplicitBiset.from_subgroup(L), ExplicitBiset.from_subgroup(M))
                assert decompose_biset(product) == expected

    @pytest.mark.parametrize("left,middle,right", [("C2", "C2", "C2"), ("C3", "C3", "C3")])
    def test_left_free_products_match_oracle(self, left, middle, right):
        assert_matches_oracle(*left_free_systems(left, middle, right))

    @pytest.mark.functional
    @pytest.mark.parametrize(
        "left,middle,right", [("S3", "S3", "S3"), ("V4", "V4", "V4"), ("S3", "V4", "C2")]
    )
    def test_left_free_products_match_oracle_on_larger_groups(self, left, middle, right):
        assert_matches_oracle(*left_free_systems(left, middle, right))

    def test_disjoint_union_adds(self, c2):
        system = SubgroupSystem.all(c2, c2)
        first = ExplicitBiset.from_subgroup(system.basis[0])
        second = ExplicitBiset.from_subgroup(system.basis[-1])
        union = first.disjoint_union(second)
        union.validate()
        assert decompose_biset(union) == decompose_biset(first) + decompose_biset(second)


class TestFixedPoints:
    def test_two_factorization_orbits(self, c2):
        (gamma,) = homomorphisms(c2.whole, c2.trivial, "epi")
        orbits = fixed_point_factorizations(c2.trivial, gamma, c2.whole, c2)
        assert sorted(f.V.order for f in orbits) == [1, 2]

    def test_single_orbit_through_trivial(self, c2):
        (gamma,) = homomorphisms(c2.trivial, c2.trivial, "epi")
        orbits = fixed_point_factorizations(c2.trivial, gamma, c2.trivial, c2)
        assert len(orbits) == 1

    def test_gamma_must_be_onto(self, c2):
        (inclusion,) = homomorphisms(c2.trivial, c2.whole, "mono")
        with pytest.raises(PreconditionError):
            fixed_point_factorizations(c2.whole, inclusion, c2.trivial, c2)

    @pytest.mark.parametrize("middle_name", ["C2", "C3", "S3"])
    def test_counts_agree_for_left_free_second_factor(self, c2, middle_name):
        middle = catalog_group(middle_name)
        first_system = SubgroupSystem.all(c2, middle)
        second_system = SubgroupSystem.left_free(middle, c2)
        for L in first_system.basis:
            for M in second_system.basis:
                X = ExplicitBiset.from_subgroup(L)
                Y = ExplicitBiset.from_subgroup(M)
                for W in c2.subgroups:
                    for U in c2.subgroups:
                        for gamma in homomorphisms(W, U, "epi"):
                            count = fixed_point_count(X, Y, U, gamma, W)
                            assert count.direct == count.full_sum == count.class_sum == count.orbit_sum

    @pytest.mark.parametrize("left,middle,right", [("C2", "C2", "C2"), ("C3", "C3", "C3")])
    def test_counts_agree_for_left_free_bisets(self, left, middle, right):
        assert_counts_agree(*left_free_systems(left, middle, right))

    @pytest.mark.functional
    @pytest.mark.parametrize("left,middle,right", [("S3", "S3", "S3"), ("S3", "V4", "C2")])
    def test_counts_agree_for_left_free_bisets_on_larger_groups(self, left, middle, right):
        assert_counts_agree(*left_free_systems(left, middle, right))

    @pytest.mark.performance
    def test_counts_agree_for_left_free_bisets_on_klein_four(self):
        assert_counts_agree(*left_free_systems("V4", "V4", "V4"))
