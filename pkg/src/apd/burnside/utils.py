from __future__ import annotations

import contextlib
from contextvars import ContextVar
from fractions import Fraction
import os
import typing as t

from .exceptions import CapacityError
from .typing import Scalar

DEFAULT_MAX_ORDER = 256

max_order_var: ContextVar[int] = ContextVar("max_order")


def max_order() -> int:
    """Return the largest group order that lattice computations accept.

    A bound installed with capacity(...) wins, otherwise the
    BURNSIDE_MAX_ORDER environment variable is consulted."""
    try:
        return max_order_var.get()
    except LookupError:
        pass
    value = os.environ.get("BURNSIDE_MAX_ORDER")
    if not value:
        return DEFAULT_MAX_ORDER
    try:
        return int(value)
    except ValueError as err:
        raise CapacityError(
            f"BURNSIDE_MAX_ORDER must be an integer, not {value!r}"
        ) from err


@contextlib.contextmanager
def capacity(order: t.Optional[int]) -> t.Iterator[int]:
    """Install an order bound for the duration of the block"""
    if order is None:
        yield max_order()
        return
    token = max_order_var.set(order)
    try:
        yield order
    finally:
        max_order_var.reset(token)


def check_order(order: int, what: str) -> None:
    bound = max_order()
    if order > bound:
        raise CapacityError(
            f"{what} has order {order}, which exceeds the configured bound of {bound}"
        )


def as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def p_adic_valuation(value: Scalar, p: int) -> t.Optional[int]:
    """The exponent of p in a reduced rational, or None for zero"""
    value = as_fraction(value)
    if value == 0:
        return None
    valuation = 0
    numerator, denominator = value.numerator, value.denominator
    while numerator % p == 0:
        numerator //= p
        valuation += 1
    while denominator % p == 0:
        denominator //= p
        valuation -= 1
    return valuation


def is_p_integral(value: Scalar, p: int) -> bool:
    return as_fraction(value).denominator % p != 0


def is_power_of(n: int, p: int) -> bool:
    while n > 1 and n % p == 0:
        n //= p
    return n == 1


class UnionFind:
    """Disjoint sets over hashable items, with path halving"""

    def __init__(self, items: t.Iterable[t.Hashable] = ()) -> None:
        self.parent: t.Dict[t.Hashable, t.Hashable] = {}
        for item in items:
            self.add(item)

    def add(self, item: t.Hashable) -> None:
        self.parent.setdefault(item, item)

    def find(self, item: t.Hashable) -> t.Hashable:
        self.add(item)
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, a: t.Hashable, b: t.Hashable) -> None:
        root_a, root_b = self.find(a), self.find(b)
        if root_a != root_b:
            self.parent[root_b] = root_a

    def groups(self) -> t.List[t.List[t.Hashable]]:
        by_root: t.Dict[t.Hashable, t.List[t.Hashable]] = {}
        for item in self.parent:
            by_root.setdefault(self.find(item), []).append(item)
        return list(by_root.values())
