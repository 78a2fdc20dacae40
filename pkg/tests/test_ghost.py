from fractions import Fraction
import itertools
import math

import pytest
import sympy

from apd.burnside.burnside import BurnsideElement, SubgroupSystem
from apd.burnside.catalog import catalog_group
from apd.burnside.exceptions import DomainError
from apd.burnside.ghost import (
    GhostElement,
    burnside_graded_component,
    degree,
    ghost_basis_product,
    ghost_identity,
    grading,
    graded_index,
    mobius,
    opposite,
    radical_complement,
    radical_power,
    rho,
    rho_cokernel_order,
    rho_inverse,
    rho_matrix,
    sigma,
    sigma_tilde,
    sigma_tilde_dimension,
    sigma_tilde_matrix,
    t_decompose,
    tau,
    transversal_product,
)
from apd.burnside.goursat import diagonal, left_kernel_product


def basis_elements(system):
    return [BurnsideElement.basis_element(system, L) for L in system.basis]


@pytest.fixture
def c2_elements(c2_leftfree):
    return basis_elements(c2_leftfree)


class TestRho:
    @pytest.fixture
    def subject(self):
        return rho

    def test_c2_images(self, subject, c2_leftfree, c2, c2_elements):
        trivial, kernel, identity = c2_elements
        one = left_kernel_product(c2.trivial, c2.trivial)
        K = left_kernel_product(c2.trivial, c2.whole)
        assert subject(trivial) == GhostElement.orbit_sum(c2_leftfree, one, 2)
        assert subject(kernel) == GhostElement.from_terms(c2_leftfree, [(one, 1), (K, 1)])
        assert subject(identity) == ghost_identity(c2_leftfree)

    def test_rho_matrix(self, c2_leftfree):
        assert rho_matrix(c2_leftfree) == sympy.Matrix([[2, 1, 1], [0, 1, 0], [0, 0, 1]])
        assert rho_cokernel_order(c2_leftfree) == 2

    @pytest.mark.parametrize("name", ["C2", "C3"])
    def test_multiplicative(self, subject, name):
        group = catalog_group(name)
        system = SubgroupSystem.left_free(group, group)
        for a, b in itertools.product(basis_elements(system), repeat=2):
            assert subject(a * b) == subject(a) * subject(b)

    @pytest.mark.functional
    def test_multiplicative_on_s3(self, subject, s3_leftfree):
        for a, b in itertools.product(basis_elements(s3_leftfree), repeat=2):
            assert subject(a * b) == subject(a) * subject(b)

    @pytest.mark.parametrize("name", ["C2", "C3", "S3"])
    def test_matrix_is_triangular_with_normalizer_diagonal(self, name):
        group = catalog_group(name)
        system = SubgroupSystem.left_free(group, group)
        matrix = rho_matrix(system)
        diagonal_entries = []
        for i, L in enumerate(system.basis):
            for j in range(i):
                assert matrix[i, j] == 0
            entry = Fraction(
                system.product.normalizer(L.subgroup).order,
                L.order * group.centralizer(L.p1).order,
            )
            assert matrix[i, i] == sympy.Rational(entry.numerator, entry.denominator)
            diagonal_entries.append(entry)
        determinant = math.prod(diagonal_entries)
        assert matrix.det() == sympy.Rational(determinant.numerator, determinant.denominator)
        assert rho_cokernel_order(system) == determinant

    @pytest.mark.parametrize(
        "name",
        [
            "C2",
            "S3",
            pytest.param("V4", marks=pytest.mark.functional),
            pytest.param("D8", marks=pytest.mark.functional),
        ],
    )
    def test_unital(self, subject, name):
        group = catalog_group(name)
        system = SubgroupSystem.left_free(group, group)
        assert subject(BurnsideElement.identity(system)) == ghost_identity(system)

    @pytest.mark.functional
    def test_multiplicative_on_klein_four(self, subject, v4):
        system = SubgroupSystem.left_free(v4, v4)
        for a, b in itertools.product(basis_elements(system), repeat=2):
            assert subject(a * b) == subject(a) * subject(b)

    @pytest.mark.performance
    def test_multiplicative_on_dihedral_eight(self, subject, d8):
        system = SubgroupSystem.left_free(d8, d8)
        for a, b in itertools.product(basis_elements(system), repeat=2):
            assert subject(a * b) == subject(a) * subject(b)

    def test_needs_left_free_system(self, subject, c2):
        element = BurnsideElement.identity(SubgroupSystem.all(c2, c2))
        with pytest.raises(DomainError):
            subject(element)

    def test_idempotent_in_both_rings(self, subject, c2_elements):
        kernel = c2_elements[1]
        assert kernel * kernel == kernel
        image = subject(kernel)
        assert image * image == image


class TestGhostProduct:
    def test_ghost_identity_is_neutral(self, s3_leftfree):
        identity = ghost_identity(s3_leftfree)
        for L in s3_leftfree.basis:
            element = GhostElement.orbit_sum(s3_leftfree, L)
            assert identity * element == element
            assert element * identity == element

    def test_trivial_orbit_sums(self, c2):
        one = left_kernel_product(c2.trivial, c2.trivial)
        K = left_kernel_product(c2.trivial, c2.whole)
        assert ghost_basis_product(one, one) == ((one, Fraction(1)),)
        assert ghost_basis_product(one, K) == ((K, Fraction(1)),)
        assert ghost_basis_product(K, one) == ()

    def test_transversal_formula_agrees(self, c2_leftfree):
        for L, M in itertools.product(c2_leftfree.basis, repeat=2):
            expected = GhostElement.from_terms(c2_leftfree, ghost_basis_product(L, M))
            assert transversal_product(L, M) == expected

    @pytest.mark.parametrize("name", ["C2", "S3", pytest.param("V4", marks=pytest.mark.functional)])
    def test_integral_orbit_sums_multiply_integrally(self, name):
        group = catalog_group(name)
        system = SubgroupSystem.left_free(group, group)
        for L, M in itertools.product(system.basis, repeat=2):
            product = GhostElement.orbit_sum(system, L) * GhostElement.orbit_sum(system, M)
            assert product.is_integral()

    def test_scalars(self, c2_leftfree):
        identity = ghost_identity(c2_leftfree)
        assert (2 * identity - identity) == identity
        assert identity.scale(0).is_zero()


class TestRhoInverse:
    @pytest.fixture
    def subject(self):
        return rho_inverse

    def test_diagonal_orbit_sum(self, subject, c2_leftfree, c2, c2_elements):
        trivial, kernel, identity = c2_elements
        element = GhostElement.orbit_sum(c2_leftfree, diagonal(c2.whole))
        assert subject(element) == identity - trivial.scale(Fraction(1, 2))

    @pytest.mark.parametrize("name", ["C2", "C3", "S3", pytest.param("V4", marks=pytest.mark.functional)])
    def test_inverts_rho(self, subject, name):
        group = catalog_group(name)
        system = SubgroupSystem.left_free(group, group)
        for a in basis_elements(system):
            assert subject(rho(a)) == a
        for L in system.basis:
            element = GhostElement.orbit_sum(system, L)
            assert rho(subject(element)) == element

    def test_mobius_values(self, s3):
        rotations = next(s for s in s3.subgroups if s.order == 3)
        reflection = next(s for s in s3.subgroups if s.order == 2)
        assert mobius(s3.whole, s3.whole) == 1
        assert mobius(rotations, s3.whole) == -1
        assert mobius(s3.trivial, rotations) == -1
        assert mobius(s3.trivial, s3.whole) == 3
        assert mobius(reflection, rotations) == 0


class TestGrading:
    def test_degrees(self, c2, s3):
        assert degree(left_kernel_product(c2.trivial, c2.whole)) == 1
        assert degree(diagonal(c2.whole)) == 0
        assert degree(left_kernel_product(s3.trivial, s3.whole)) == 2

    def test_components_add_up(self, c2_elements):
        trivial, kernel, identity = c2_elements
        zero = burnside_graded_component(kernel, 0)
        one = burnside_graded_component(kernel, 1)
        assert zero == trivial.scale(Fraction(1, 2))
        assert one == kernel - trivial.scale(Fraction(1, 2))
        assert zero + one == kernel
        assert burnside_graded_component(kernel, 2).is_zero()

    def test_grading_splits_by_degree(self, c2_elements):
        parts = grading(rho(c2_elements[1]))
        assert sorted(parts) == [0, 1]

    def test_graded_index(self, c2_leftfree):
        assert graded_index(c2_leftfree) == 2

    @pytest.mark.functional
    def test_graded_index_is_positive(self, s3_leftfree):
        assert graded_index(s3_leftfree) >= 1


class TestRadical:
    @pytest.fixture
    def subject(self):
        return radical_complement

    def test_c2(self, subject, c2, c2_elements):
        trivial, kernel, identity = c2_elements
        decomposition = subject(c2)
        assert len(decomposition.semisimple) == 2
        assert decomposition.radical == (kernel - trivial.scale(Fraction(1, 2)),)
        assert decomposition.nilpotency_bound == 2

    def test_powers(self, subject, c2):
        decomposition = subject(c2)
        assert len(radical_power(decomposition, 1)) == 1
        assert radical_power(decomposition, 2) == []

    def test_nilpotent_within_bound(self, subject, s3):
        decomposition = subject(s3)
        assert radical_power(decomposition, decomposition.nilpotency_bound) == []

    def test_radical_is_an_ideal(self, subject, c2, c2_elements):
        (x,) = subject(c2).radical
        for a in c2_elements:
            assert 0 not in grading(rho(a * x))


class TestOpposite:
    def test_commutes_with_rho(self, s3):
        system = SubgroupSystem.bifree(s3, s3)
        for a in basis_elements(system):
            assert rho(a.opposite()) == opposite(rho(a))

    def test_needs_bifree_support(self, c2_leftfree, c2):
        element = GhostElement.orbit_sum(c2_leftfree, left_kernel_product(c2.trivial, c2.whole))
        with pytest.raises(DomainError):
            opposite(element)


class TestTDecomposition:
    def test_identity_splits_by_type(self, c2_bifree, c2):
        parts = t_decompose(ghost_identity(c2_bifree))
        assert sorted(parts) == ["1", "C2"]
        assert parts["C2"] == GhostElement.orbit_sum(c2_bifree, diagonal(c2.whole))

    def test_needs_bifree_support(self, c2_leftfree, c2):
        element = GhostElement.orbit_sum(c2_leftfree, left_kernel_product(c2.trivial, c2.whole))
        with pytest.raises(DomainError):
            t_decompose(element)


class TestSigma:
    def test_trivial_source(self, c2_bifree, trivial_group):
        trivial = BurnsideElement.basis_element(c2_bifree, c2_bifree.basis[0])
        matrix = sigma(trivial, trivial_group)
        assert matrix.shape == (1, 1)
        assert matrix.entries == ((2,),)
        assert sigma(trivial * trivial, trivial_group).entries == ((4,),)

    @pytest.mark.parametrize("source", ["1", "C2", "C3"])
    def test_multiplicative_on_s3(self, s3, source):
        system = SubgroupSystem.bifree(s3, s3)
        T = catalog_group(source)
        for a, b in itertools.product(basis_elements(system), repeat=2):
            product = sigma(a, T) @ sigma(b, T)
            assert product.entries == sigma(a * b, T).entries

    def test_tau_after_rho(self, s3):
        system = SubgroupSystem.bifree(s3, s3)
        T = catalog_group("C2")
        for a in basis_elements(system):
            assert tau(rho(a), T).entries == sigma(a, T).entries

    def test_equivariant(self, s3):
        system = SubgroupSystem.bifree(s3, s3)
        T = catalog_group("C3")
        for a in basis_elements(system):
            assert sigma(a, T).is_equivariant()

    def test_needs_bifree_support(self, c2_elements, trivial_group):
        with pytest.raises(DomainError):
            sigma(c2_elements[1], trivial_group)


class TestSigmaTilde:
    def test_c2_matrix(self, c2_bifree):
        assert sigma_tilde_matrix(c2_bifree) == sympy.Matrix([[2, 1], [0, 1]])
        assert sigma_tilde_dimension(c2_bifree) == 2

    @pytest.mark.parametrize("name", ["C2", "S3"])
    def test_identity_maps_to_identity_blocks(self, name):
        group = catalog_group(name)
        system = SubgroupSystem.bifree(group, group)
        blocks = sigma_tilde(BurnsideElement.identity(system))
        assert all(block.is_identity() for block in blocks.values())

    def test_s3_blocks(self, s3):
        system = SubgroupSystem.bifree(s3, s3)
        blocks = sigma_tilde(BurnsideElement.identity(system))
        assert sorted(U.order for U in blocks) == [1, 2, 3, 6]
        assert sigma_tilde_dimension(system) == len(system)

    def test_matrix_is_invertible(self, s3):
        system = SubgroupSystem.bifree(s3, s3)
        assert sigma_tilde_matrix(system).det() != 0

    @pytest.mark.parametrize("name", ["C2", "S3", pytest.param("V4", marks=pytest.mark.functional)])
    def test_multiplicative(self, name):
        group = catalog_group(name)
        system = SubgroupSystem.bifree(group, group)
        for a, b in itertools.product(basis_elements(system), repeat=2):
            product = sigma_tilde(a * b)
            first, second = sigma_tilde(a), sigma_tilde(b)
            assert product.keys() == first.keys()
            for U, block in product.items():
                assert (first[U] @ second[U]).entries == block.entries

    @pytest.mark.functional
    def test_klein_four(self, v4):
        system = SubgroupSystem.bifree(v4, v4)
        blocks = sigma_tilde(BurnsideElement.identity(system))
        assert all(block.is_identity() for block in blocks.values())
        assert sigma_tilde_dimension(system) == len(system)
        assert sigma_tilde_matrix(system).det() != 0
