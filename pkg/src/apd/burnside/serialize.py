"""Deterministic table, JSON and CSV output for command results.

Rationals are always written as numerator/denominator pairs (JSON) or as
p/q text (tables and CSV), never as floats."""
from __future__ import annotations

import csv
import dataclasses
from fractions import Fraction
import io
import json
import typing as t

import sympy

from .burnside import BurnsideElement, SubgroupSystem
from .exceptions import PreconditionError
from .ghost import EquivariantMatrix, GhostElement, degree, type_labels
from .goursat import ProductSubgroup
from .groups import FiniteGroup, GroupHom, Subgroup
from .typing import OutputFormat, RationalDict


@dataclasses.dataclass(frozen=True)
class Table:
    headers: t.Tuple[str, ...]
    rows: t.Tuple[t.Tuple[t.Any, ...], ...]
    title: t.Optional[str] = None


def rational(value: t.Union[int, Fraction, sympy.Rational]) -> RationalDict:
    if isinstance(value, sympy.Basic):
        value = Fraction(int(value.p), int(value.q))  # type: ignore
    value = Fraction(value)
    return {"numerator": value.numerator, "denominator": value.denominator}


def cell_text(value: t.Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Fraction, sympy.Rational)):
        data = rational(value)
        if data["denominator"] == 1:
            return str(data["numerator"])
        return f"{data['numerator']}/{data['denominator']}"
    if isinstance(value, (Subgroup, ProductSubgroup, GroupHom)):
        return value.describe()
    if isinstance(value, FiniteGroup):
        return value.name
    return str(value)


def to_data(value: t.Any) -> t.Any:
    """Convert results into JSON-compatible structures"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, (Fraction, sympy.Rational)):
        return rational(value)
    if isinstance(value, sympy.MatrixBase):
        return [[rational(value[i, j]) for j in range(value.cols)] for i in range(value.rows)]
    if isinstance(value, Table):
        data = {
            "headers": list(value.headers),
            "rows": [[to_data(cell) for cell in row] for row in value.rows],
        }
        if value.title is not None:
            data["title"] = value.title
        return data
    if isinstance(value, BurnsideElement):
        return element_data(value)
    if isinstance(value, GhostElement):
        return ghost_data(value)
    if isinstance(value, EquivariantMatrix):
        return {
            "key": value.key,
            "rows": [row.describe() for row in value.rows],
            "columns": [column.describe() for column in value.columns],
            "entries": [[rational(entry) for entry in row] for row in value.entries],
        }
    if isinstance(value, (Subgroup, ProductSubgroup, GroupHom)):
        return value.describe()
    if isinstance(value, FiniteGroup):
        return value.name
    if isinstance(value, SubgroupSystem):
        return [L.describe() for L in value.basis]
    if isinstance(value, dict):
        return {cell_text(key): to_data(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_data(item) for item in value]
    raise PreconditionError(f"Cannot serialize {type(value).__name__}")


def element_data(element: BurnsideElement) -> t.Dict[str, t.Any]:
    system = element.system
    return {
        "pair": [element.left.name, element.right.name],
        "system": system.flavor.value,
        "terms": [
            {
                "class": system.index(L) if L in system.positions else None,
                "subgroup": L.describe(),
                "order": L.order,
                **rational(c),
            }
            for L, c in element.terms
        ],
    }


def ghost_data(element: GhostElement) -> t.Dict[str, t.Any]:
    labels = type_labels(element.coefficients)
    terms = []
    for L, c in element.terms:
        triple = L.to_triple()
        terms.append(
            {
                "U": list(triple.U.sorted),
                "V": list(triple.V.sorted),
                "alpha": [triple.alpha.values[v] for v in triple.V.sorted],
                "degree": degree(L),
                "type_key": labels[L],
                **rational(c),
            }
        )
    return {"pair": [element.left.name, element.right.name], "terms": terms}


def class_label(system: SubgroupSystem, subgroup: ProductSubgroup) -> str:
    return f"class:{system.index(subgroup)}"


def element_table(element: BurnsideElement, title: t.Optional[str] = None) -> Table:
    system = element.system
    return Table(
        ("class", "order", "subgroup", "coefficient"),
        tuple(
            (class_label(system, L), L.order, L.describe(), c) for L, c in element.terms
        ),
        title,
    )


def ghost_table(element: GhostElement, title: t.Optional[str] = None) -> Table:
    system = element.system
    labels = type_labels(element.coefficients)
    return Table(
        ("class", "triple", "degree", "type", "coefficient"),
        tuple(
            (
                class_label(system, L),
                L.to_triple().describe(),
                degree(L),
                labels[L],
                c,
            )
            for L, c in element.terms
        ),
        title,
    )


def matrix_table(matrix: sympy.Matrix, labels: t.Sequence[str], title: t.Optional[str] = None) -> Table:
    return Table(
        tuple(labels),
        tuple(tuple(matrix[i, j] for j in range(matrix.cols)) for i in range(matrix.rows)),
        title,
    )


def _flatten(value: t.Any, prefix: str = "") -> t.Iterator[t.Tuple[str, str]]:
    if isinstance(value, dict):
        for key, item in value.items():
            name = f"{prefix}.{cell_text(key)}" if prefix else cell_text(key)
            yield from _flatten(item, name)
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            yield from _flatten(item, f"{prefix}[{i}]")
    else:
        yield prefix, cell_text(value)


def _render_table(table: Table) -> str:
    cells = [list(table.headers)] + [[cell_text(c) for c in row] for row in table.rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(table.headers))]
    lines = []
    if table.title:
        lines.append(table.title)
    for row in cells:
        lines.append("  ".join(text.ljust(width) for text, width in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _text(value: t.Any) -> str:
    if isinstance(value, Table):
        return _render_table(value)
    if isinstance(value, (list, tuple)) and value and all(isinstance(v, Table) for v in value):
        return "\n\n".join(_render_table(v) for v in value)
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, Table):
                lines.append(_render_table(dataclasses.replace(item, title=cell_text(key))))
            else:
                for name, text in _flatten(item, cell_text(key)):
                    lines.append(f"{name}: {text}")
        return "\n".join(lines)
    return cell_text(value)


def _csv_rows(value: t.Any, prefix: str = "") -> t.Iterator[t.List[str]]:
    # Tables nested in a report get a row with their key, then headers and rows
    if isinstance(value, Table):
        if prefix:
            yield [prefix]
        yield list(value.headers)
        for row in value.rows:
            yield [cell_text(c) for c in row]
    elif isinstance(value, dict):
        for key, item in value.items():
            name = f"{prefix}.{cell_text(key)}" if prefix else cell_text(key)
            yield from _csv_rows(item, name)
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            yield from _csv_rows(item, f"{prefix}[{i}]")
    else:
        yield [prefix, cell_text(value)]


def _csv(value: t.Any) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    tables = value if isinstance(value, (list, tuple)) else [value]
    if all(isinstance(v, Table) for v in tables):
        for table in tables:
            writer.writerow(table.headers)
            for row in table.rows:
                writer.writerow([cell_text(c) for c in row])
    else:
        writer.writerow(["key", "value"])
        writer.writerows(_csv_rows(value))
    return buffer.getvalue().rstrip("\n")


def emit(value: t.Any, fmt: OutputFormat = "table") -> str:
    if fmt == "json":
        return json.dumps(to_data(value), sort_keys=True, indent=2)
    if fmt == "csv":
        return _csv(value)
    if fmt == "table":
        return _text(value)
    raise PreconditionError(f"Unknown output format {fmt!r}")
