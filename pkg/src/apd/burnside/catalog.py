"""Built-in groups, group files and isomorphism-type labels.

Catalog names are C<n>, C<p>^<k>, V4, D<2n>, Q8, S3, S4, A4 and the trivial
group 1; any two of them joined with an "x" name their direct product.
"""
from __future__ import annotations

from collections import Counter
import functools
import json
import logging
import math
import os
import re
import typing as t

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import (
    AlternatingGroup,
    DihedralGroup,
    SymmetricGroup,
)

from .exceptions import LoadError
from .groups import FiniteGroup, Subgroup, direct_product, homomorphisms
from .utils import check_order

logger = logging.getLogger(__name__)

CATALOG_EXAMPLES = (
    "1",
    "C2",
    "C3",
    "C4",
    "C5",
    "C6",
    "C8",
    "V4",
    "C2^3",
    "C3^2",
    "D6",
    "D8",
    "D10",
    "D12",
    "Q8",
    "S3",
    "A4",
    "S4",
)

_CYCLIC = re.compile(r"^C(\d+)$")
_ELEMENTARY = re.compile(r"^C(\d+)\^(\d+)$")
_DIHEDRAL = re.compile(r"^D(\d+)$")


def _cyclic(n: int) -> FiniteGroup:
    check_order(n, f"C{n}")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    labels = tuple("1" if k == 0 else ("a" if k == 1 else f"a^{k}") for k in range(n))
    return FiniteGroup(name=f"C{n}", table=table, labels=labels)


def _elementary_abelian(p: int, k: int) -> FiniteGroup:
    n = p ** k
    check_order(n, f"C{p}^{k}")

    def digits(x: int) -> t.List[int]:
        return [(x // p ** i) % p for i in range(k)]

    def add(a: int, b: int) -> int:
        return sum(((x + y) % p) * p ** i for i, (x, y) in enumerate(zip(digits(a), digits(b))))

    table = tuple(tuple(add(a, b) for b in range(n)) for a in range(n))
    labels = tuple("(" + ",".join(str(d) for d in digits(x)) + ")" for x in range(n))
    return FiniteGroup(name=f"C{p}^{k}", table=table, labels=labels)


def _cycle_label(permutation: Permutation) -> str:
    cycles = permutation.cyclic_form
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(i + 1) for i in cycle) + ")" for cycle in cycles)


def from_permutation_group(name: str, group: PermutationGroup) -> FiniteGroup:
    """Tabulate a sympy permutation group.

    Elements are sorted by order then by array form, so the identity lands
    on index 0 and tables are reproducible."""
    check_order(group.order(), name)
    elements = sorted(group.generate(), key=lambda p: (p.order(), p.array_form))
    position = {tuple(p.array_form): i for i, p in enumerate(elements)}
    table = tuple(
        tuple(position[tuple((a * b).array_form)] for b in elements) for a in elements
    )
    labels = tuple(_cycle_label(p) for p in elements)
    return FiniteGroup(name=name, table=table, labels=labels)


def _quaternion() -> FiniteGroup:
    # Index 2u + s is the unit u in (1, i, j, k) with sign (-1)^s
    units = {
        (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
        (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
        (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
        (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
    }  # fmt: skip

    def mul(a: int, b: int) -> int:
        unit, sign = units[(a // 2, b // 2)]
        return 2 * unit + (sign + a + b) % 2

    table = tuple(tuple(mul(a, b) for b in range(8)) for a in range(8))
    labels = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
    return FiniteGroup(name="Q8", table=table, labels=labels)


def _klein_four() -> FiniteGroup:
    return from_permutation_group(
        "V4",
        PermutationGroup(
            Permutation([[0, 1], [2, 3]], size=4), Permutation([[0, 2], [1, 3]], size=4)
        ),
    )


def catalog_group(name: str) -> FiniteGroup:
    """Return the catalog group with the given name.

    Results are cached, so loading a name twice gives the same object."""
    return _catalog_group(name.strip().replace(" ", ""))


@functools.lru_cache(maxsize=None)
def _catalog_group(name: str) -> FiniteGroup:
    if "x" in name:
        left, _, right = name.partition("x")
        return direct_product(catalog_group(left), catalog_group(right))
    if name in ("1", "C1"):
        return FiniteGroup(name="1", table=((0,),), labels=("1",))
    if name == "V4":
        return _klein_four()
    if name == "Q8":
        return _quaternion()
    if name == "S3":
        return from_permutation_group("S3", SymmetricGroup(3))
    if name == "S4":
        return from_permutation_group("S4", SymmetricGroup(4))
    if name == "A4":
        return from_permutation_group("A4", AlternatingGroup(4))
    match = _ELEMENTARY.match(name)
    if match:
        p, k = int(match.group(1)), int(match.group(2))
        if p < 2 or k < 1:
            raise LoadError(f"{name} is not a valid elementary abelian group name")
        return _elementary_abelian(p, k)
    match = _CYCLIC.match(name)
    if match and int(match.group(1)) >= 1:
        return _cyclic(int(match.group(1)))
    match = _DIHEDRAL.match(name)
    if match:
        order = int(match.group(1))
        if order < 6 or order % 2:
            raise LoadError(f"{name}: dihedral groups are named by their even order, at least 6")
        return from_permutation_group(name, DihedralGroup(order // 2))
    raise LoadError(f"Unknown catalog group {name!r}")


def load_group(spec: str) -> FiniteGroup:
    """Load a group by catalog name, or from a JSON group file if spec is a path"""
    if spec.endswith(".json") or os.path.sep in spec or os.path.exists(spec):
        return parse_group_file(spec)
    return catalog_group(spec)


def parse_group_file(path: str) -> FiniteGroup:
    try:
        with open(path, "r", encoding="utf-8") as source:
            data = json.load(source)
    except OSError as err:
        raise LoadError(f"Could not read group file {path}") from err
    except json.JSONDecodeError as err:
        raise LoadError(
            f"{path}: line {err.lineno}: group file is not valid JSON"
        ) from err
    return group_from_dict(data, source=path)


def group_from_dict(data: t.Any, source: str = "<group>") -> FiniteGroup:
    """Validate the group-file schema and normalize the identity to index 0"""
    if not isinstance(data, dict):
        raise LoadError(f"{source}: expected an object with name, order and table")
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise LoadError(f"{source}: field 'name' must be a non-empty string")
    order = data.get("order")
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise LoadError(f"{source}: field 'order' must be a positive integer")
    check_order(order, name)
    table = data.get("table")
    if not isinstance(table, list) or len(table) != order:
        raise LoadError(f"{source}: field 'table' must have {order} rows")
    for i, row in enumerate(table):
        if not isinstance(row, list) or len(row) != order:
            raise LoadError(f"{source}: field 'table[{i}]' must have {order} entries")
        for j, entry in enumerate(row):
            if not isinstance(entry, int) or isinstance(entry, bool) or not 0 <= entry < order:
                raise LoadError(
                    f"{source}: field 'table[{i}][{j}]' must be an element index below {order}"
                )
    labels = data.get("labels")
    if labels is not None:
        if (
            not isinstance(labels, list)
            or len(labels) != order
            or not all(isinstance(label, str) for label in labels)
        ):
            raise LoadError(f"{source}: field 'labels' must list {order} strings")

    everything = set(range(order))
    for i, row in enumerate(table):
        if set(row) != everything:
            raise LoadError(f"{source}: row {i} is not a bijection (Latin square axiom)")
    for j in range(order):
        if {row[j] for row in table} != everything:
            raise LoadError(f"{source}: column {j} is not a bijection (Latin square axiom)")

    identities = [
        e
        for e in range(order)
        if all(table[e][x] == x and table[x][e] == x for x in range(order))
    ]
    if not identities:
        raise LoadError(f"{source}: no two-sided identity element (identity axiom)")
    identity = identities[0]

    for a in range(order):
        row_a = table[a]
        for b in range(order):
            ab = row_a[b]
            row_ab = table[ab]
            row_b = table[b]
            for c in range(order):
                if row_ab[c] != row_a[row_b[c]]:
                    raise LoadError(
                        f"{source}: ({a}*{b})*{c} != {a}*({b}*{c}) (associativity axiom)"
                    )

    # The identity moves to 0 and the remaining elements keep their order
    old = [identity] + [x for x in range(order) if x != identity]
    new = {x: i for i, x in enumerate(old)}
    renamed = tuple(tuple(new[table[a][b]] for b in old) for a in old)
    if identity:
        logger.debug(f"{source}: identity {identity} renamed to 0")
    return FiniteGroup(
        name=name,
        table=renamed,
        labels=tuple(labels[x] for x in old) if labels is not None else None,
    )


def dump_group(group: FiniteGroup) -> t.Dict[str, t.Any]:
    data: t.Dict[str, t.Any] = {
        "name": group.name,
        "order": group.order,
        "table": [list(row) for row in group.table],
    }
    if group.labels is not None:
        data["labels"] = list(group.labels)
    return data


def _order_statistics(subgroup: Subgroup) -> t.Tuple[t.Tuple[int, int], ...]:
    counts = Counter(subgroup.group.element_order(x) for x in subgroup.elements)
    return tuple(sorted(counts.items()))


def _abelian_name(subgroup: Subgroup) -> str:
    """Name an abelian group by its invariant factors, largest first"""
    group = subgroup.group
    order = subgroup.order
    if order == 1:
        return "1"
    orders = [group.element_order(x) for x in subgroup.elements]
    primary: t.Dict[int, t.List[int]] = {}
    n, p = order, 2
    primes = []
    while n > 1:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    for p in primes:
        # Number of elements of the p-part killed by p^k is p^(d_k)
        exponents = []
        previous, k = 0, 1
        while True:
            killed = sum(1 for o in orders if (p ** k) % o == 0)
            d_k = round(math.log(killed, p))
            if d_k == previous:
                break
            exponents.append(d_k - previous)
            previous, k = d_k, k + 1
        # exponents[k-1] = number of cyclic factors of order at least p^k
        factors = []
        for k, count in enumerate(exponents, start=1):
            following = exponents[k] if k < len(exponents) else 0
            factors.extend([p ** k] * (count - following))
        primary[p] = sorted(factors, reverse=True)
    invariant: t.List[int] = []
    width = max(len(factors) for factors in primary.values())
    for i in range(width):
        value = 1
        for factors in primary.values():
            if i < len(factors):
                value *= factors[i]
        invariant.append(value)
    if invariant == [2, 2]:
        return "V4"
    if len(invariant) > 1 and len(set(invariant)) == 1:
        return f"C{invariant[0]}^{len(invariant)}"
    return "x".join(f"C{n}" for n in invariant)


def _is_abelian(subgroup: Subgroup) -> bool:
    table = subgroup.group.table
    return all(table[a][b] == table[b][a] for a in subgroup.elements for b in subgroup.elements)


_NONABELIAN = ("S3", "D8", "Q8", "D10", "A4", "D12", "D14", "D16", "S4")


@functools.lru_cache(maxsize=None)
def _nonabelian_catalog(order: int) -> t.Tuple[FiniteGroup, ...]:
    found = []
    for name in _NONABELIAN:
        group = catalog_group(name)
        if group.order == order:
            found.append(group)
    return tuple(found)


def _isomorphic(first: Subgroup, second: Subgroup) -> bool:
    if first.order != second.order:
        return False
    if _order_statistics(first) != _order_statistics(second):
        return False
    return bool(homomorphisms(first, second, "iso"))


def isomorphism_labels(subgroups: t.Iterable[Subgroup]) -> t.Dict[Subgroup, str]:
    """Label subgroups by isomorphism type.

    Abelian groups are named from their invariant factors and non-abelian
    ones by matching catalog groups; anything else becomes order<n>#<i>."""
    labels: t.Dict[Subgroup, str] = {}
    unknown: t.List[t.Tuple[Subgroup, str]] = []
    for subgroup in subgroups:
        if subgroup in labels:
            continue
        if _is_abelian(subgroup):
            labels[subgroup] = _abelian_name(subgroup)
            continue
        for candidate in _nonabelian_catalog(subgroup.order):
            if _isomorphic(candidate.whole, subgroup):
                labels[subgroup] = candidate.name
                break
        else:
            for seen, label in unknown:
                if _isomorphic(seen, subgroup):
                    labels[subgroup] = label
                    break
            else:
                index = sum(1 for seen, _ in unknown if seen.order == subgroup.order) + 1
                label = f"order{subgroup.order}#{index}"
                unknown.append((subgroup, label))
                labels[subgroup] = label
    return labels
