from fractions import Fraction

import pytest

from apd.burnside.exceptions import CapacityError
from apd.burnside.utils import (
    DEFAULT_MAX_ORDER,
    UnionFind,
    capacity,
    check_order,
    is_p_integral,
    is_power_of,
    max_order,
    p_adic_valuation,
)


class TestCapacity:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("BURNSIDE_MAX_ORDER", raising=False)
        assert max_order() == DEFAULT_MAX_ORDER

    def test_environment(self, monkeypatch):
        monkeypatch.setenv("BURNSIDE_MAX_ORDER", "12")
        assert max_order() == 12

    def test_environment_must_be_an_integer(self, monkeypatch):
        monkeypatch.setenv("BURNSIDE_MAX_ORDER", "lots")
        with pytest.raises(CapacityError):
            max_order()

    def test_context_manager_wins_and_restores(self, monkeypatch):
        monkeypatch.setenv("BURNSIDE_MAX_ORDER", "12")
        with capacity(8) as bound:
            assert bound == 8
            assert max_order() == 8
            with capacity(None) as inner:
                assert inner == 8
        assert max_order() == 12

    def test_check_order(self):
        with capacity(8):
            check_order(8, "C8")
            with pytest.raises(CapacityError) as err:
                check_order(9, "C9")
        assert "C9" in str(err.value)


@pytest.mark.parametrize(
    "value,p,expected",
    [(Fraction(12, 5), 2, 2), (Fraction(3, 8), 2, -3), (Fraction(1, 6), 3, -1), (7, 2, 0), (0, 2, None)],
)
def test_p_adic_valuation(value, p, expected):
    assert p_adic_valuation(value, p) == expected


def test_is_p_integral():
    assert is_p_integral(Fraction(1, 3), 2)
    assert not is_p_integral(Fraction(1, 2), 2)
    assert is_p_integral(0, 5)


@pytest.mark.parametrize("n,p,expected", [(8, 2, True), (1, 3, True), (12, 2, False), (9, 3, True), (6, 3, False)])
def test_is_power_of(n, p, expected):
    assert is_power_of(n, p) == expected


class TestUnionFind:
    def test_groups(self):
        classes = UnionFind(range(5))
        classes.union(0, 3)
        classes.union(3, 4)
        assert sorted(sorted(group) for group in classes.groups()) == [[0, 3, 4], [1], [2]]
        assert classes.find(4) == classes.find(0)

    def test_unknown_items_are_added(self):
        classes = UnionFind()
        assert classes.find("a") == "a"
        classes.union("a", "b")
        assert classes.find("b") == classes.find("a")
