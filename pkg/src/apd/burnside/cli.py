from fractions import Fraction
import functools
import logging
import re
import sys
import typing as t

import click

from . import fusion as fusion_module
from .burnside import BurnsideElement, SubgroupSystem, mark_matrix
from .catalog import CATALOG_EXAMPLES, catalog_group, isomorphism_labels, load_group
from .exceptions import BurnsideError, LoadError, ParseError
from .ghost import (
    GhostElement,
    burnside_graded_component,
    grading,
    rho,
    rho_inverse,
    sigma,
    sigma_tilde,
)
from .goursat import ProductSubgroup, diagonal, left_kernel_product
from .groups import FiniteGroup
from .serialize import Table, element_table, emit, ghost_table, matrix_table
from .utils import capacity

logger = logging.getLogger(__name__)

_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coefficient>\d+(?:/\d+)?)\s*\*?\s*)?\[(?P<basis>[^\]]*)\]\s*"
)


class BurnsideCommands(click.Group):
    """A command group whose usage errors exit with status 1"""

    def make_context(self, *args: t.Any, **kwargs: t.Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as err:
            err.exit_code = 1
            raise

    def invoke(self, ctx: click.Context) -> t.Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as err:
            err.exit_code = 1
            raise


def _subgroup_of(group: FiniteGroup, token: str, position: str) -> t.Any:
    if token == "1":
        return group.trivial
    if token.replace(" ", "") == group.name:
        return group.whole
    raise ParseError(f"{token!r} is neither 1 nor the {position} group {group.name}")


def _basis_subgroup(text: str, system: SubgroupSystem) -> ProductSubgroup:
    left, right = system.left, system.right
    body = text.strip()
    if body in ("Δ", "D"):
        if left is not right:
            raise ParseError("[Δ] needs the same group on both sides")
        return diagonal(left.whole)
    if body == "1":
        return left_kernel_product(left.trivial, right.trivial)
    if body.startswith("class:"):
        try:
            index = int(body[len("class:"):])
            return system.basis[index]
        except (ValueError, IndexError) as err:
            raise ParseError(f"{body!r} does not name a class of the basis listing") from err
    for match in re.finditer(r"x", body):
        first, second = body[: match.start()].strip(), body[match.end():].strip()
        try:
            return left_kernel_product(
                _subgroup_of(left, first, "left"), _subgroup_of(right, second, "right")
            )
        except ParseError:
            continue
    raise ParseError(f"Cannot read basis element [{body}]")


def parse_terms(
    text: str, system: SubgroupSystem
) -> t.List[t.Tuple[ProductSubgroup, Fraction]]:
    """Read a literal such as 2*[Δ] - 1/2*[1] + [1x C2] against a system"""
    terms = []
    position = 0
    text = text.strip()
    if not text:
        raise ParseError("Empty element literal")
    while position < len(text):
        match = _TERM.match(text, position)
        if match is None or match.end() == position:
            raise ParseError(f"Cannot read element literal at {text[position:]!r}")
        if terms and match.group("sign") is None:
            raise ParseError(f"Terms must be separated by + or - in {text!r}")
        try:
            coefficient = Fraction(match.group("coefficient") or 1)
        except ZeroDivisionError:
            raise ParseError(f"Coefficient {match.group('coefficient')!r} has a zero denominator")
        if match.group("sign") == "-":
            coefficient = -coefficient
        terms.append((_basis_subgroup(match.group("basis"), system), coefficient))
        position = match.end()
    return terms


def parse_element(text: str, system: SubgroupSystem) -> BurnsideElement:
    return BurnsideElement.from_terms(system, parse_terms(text, system))


def parse_ghost(text: str, system: SubgroupSystem) -> GhostElement:
    terms = parse_terms(text, system)
    for L, _ in terms:
        if not L.is_left_free:
            raise ParseError(f"{L.describe()} is not left-free, so it has no orbit sum")
    return GhostElement.from_terms(system, terms)


def parse_fusion(spec: str, group: FiniteGroup, prime: int) -> fusion_module.FusionSystem:
    """inner, example-b, example-c, from-group:<name> or enumerated:<index>"""
    kind, _, argument = spec.partition(":")
    if kind == "inner" and not argument:
        return fusion_module.inner_fusion_system(group, prime)
    if kind == "example-b" and not argument:
        return fusion_module.example_b(group)
    if kind == "example-c" and not argument:
        return fusion_module.example_c(group)
    if kind == "from-group" and argument:
        return fusion_module.fusion_on(group, load_group(argument), prime)
    if kind == "enumerated" and argument:
        systems = fusion_module.enumerate_fusion_systems(group, prime)
        try:
            return systems[int(argument)]
        except (ValueError, IndexError) as err:
            raise ParseError(
                f"{argument!r} is not an index below {len(systems)}"
            ) from err
    raise ParseError(f"Unknown fusion system specification {spec!r}")


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        level=logging.DEBUG if verbose else logging.WARN,
    )


def reports_errors(func: t.Callable[..., t.Any]) -> t.Callable[..., t.Any]:
    @functools.wraps(func)
    def wrapper(*args: t.Any, fmt: str, verbose: bool, **kwargs: t.Any) -> None:
        _configure_logging(verbose)
        try:
            result = func(*args, **kwargs)
        except LoadError as e:
            click.secho(str(e), err=True, fg="red")
            sys.exit(1)
        except BurnsideError as e:
            click.secho(str(e), err=True, fg="red")
            sys.exit(2)
        click.echo(emit(result, fmt))  # type: ignore

    return wrapper


def output_options(func: t.Callable[..., t.Any]) -> t.Callable[..., t.Any]:
    func = click.option(
        "--format",
        "fmt",
        type=click.Choice(["table", "json", "csv"]),
        default="table",
        help="The output format",
    )(func)
    func = click.option("-v", "--verbose", is_flag=True, help="Enables verbose mode")(func)
    return func


def system_option(default: str) -> t.Callable[..., t.Any]:
    return click.option(
        "--system",
        "flavor",
        type=click.Choice(["all", "leftfree", "bifree"]),
        default=default,
        help="The subgroup system the basis is drawn from",
    )


def fusion_group_options(func: t.Callable[..., t.Any]) -> t.Callable[..., t.Any]:
    func = click.option(
        "--prime", "-p", type=int, required=True, metavar="<P>", help="The prime p"
    )(func)
    func = click.option(
        "--group",
        "group_spec",
        required=True,
        metavar="<GROUP>",
        help="A catalog name or group file for the p-group S",
    )(func)
    return func


@click.group(cls=BurnsideCommands)
@click.option(
    "--max-order",
    type=int,
    default=None,
    metavar="<N>",
    help="The largest group order lattice computations accept",
    envvar="BURNSIDE_MAX_ORDER",
)
@click.pass_context
def main(ctx: click.Context, max_order: t.Optional[int]) -> None:
    """Exact computations in double Burnside rings and with fusion systems."""
    ctx.with_resource(capacity(max_order))


@main.command()
@output_options
@reports_errors
def groups() -> Table:
    """List the catalog groups."""
    rows = []
    for name in CATALOG_EXAMPLES:
        group = catalog_group(name)
        rows.append((name, group.order, group.is_abelian))
    return Table(("name", "order", "abelian"), tuple(rows))


@main.command()
@click.argument("group_spec", metavar="GROUP")
@output_options
@reports_errors
def subgroups(group_spec: str) -> Table:
    """List the subgroups of a group, class by class."""
    group = load_group(group_spec)
    labels = isomorphism_labels(group.subgroups)
    rows = []
    for index, members in enumerate(group.subgroup_classes):
        rep = members[0]
        rows.append(
            (index, rep.order, labels[rep], len(members), group.is_normal(rep), rep.describe())
        )
    return Table(("class", "order", "type", "conjugates", "normal", "elements"), tuple(rows))


def _system(left_spec: str, right_spec: str, flavor: str) -> SubgroupSystem:
    return SubgroupSystem.named(load_group(left_spec), load_group(right_spec), flavor)


@main.command()
@click.argument("left_spec", metavar="LEFT")
@click.argument("right_spec", metavar="RIGHT")
@system_option("all")
@output_options
@reports_errors
def basis(left_spec: str, right_spec: str, flavor: str) -> Table:
    """List the standard basis of B(LEFT, RIGHT).

    The class:<index> column is what element literals refer to."""
    system = _system(left_spec, right_spec, flavor)
    rows = []
    for index, L in enumerate(system.basis):
        k1, p1, _, k2, p2 = L.goursat()
        rows.append(
            (
                f"class:{index}",
                L.order,
                L.classify().value,
                f"k1={k1.describe()} p1={p1.describe()} k2={k2.describe()} p2={p2.describe()}",
            )
        )
    return Table(("class", "order", "kind", "goursat"), tuple(rows))


@main.command()
@click.argument("left_spec", metavar="LEFT")
@click.argument("right_spec", metavar="RIGHT")
@system_option("all")
@output_options
@reports_errors
def marks(left_spec: str, right_spec: str, flavor: str) -> Table:
    """Print the table of marks for the chosen system."""
    system = _system(left_spec, right_spec, flavor)
    labels = [f"class:{i}" for i in range(len(system))]
    return matrix_table(mark_matrix(system), labels)


@main.command()
@click.argument("group_spec", metavar="GROUP")
@click.argument("first")
@click.argument("second")
@system_option("all")
@output_options
@reports_errors
def bmul(group_spec: str, first: str, second: str, flavor: str) -> Table:
    """Multiply two elements of B(GROUP, GROUP) with the Mackey formula."""
    group = load_group(group_spec)
    system = SubgroupSystem.named(group, group, flavor)
    product = parse_element(first, system) * parse_element(second, system)
    return element_table(product)


@main.command("rho")
@click.argument("group_spec", metavar="GROUP")
@click.argument("element")
@system_option("leftfree")
@output_options
@reports_errors
def rho_command(group_spec: str, element: str, flavor: str) -> Table:
    """Apply the mark homomorphism to an element."""
    group = load_group(group_spec)
    system = SubgroupSystem.named(group, group, flavor)
    return ghost_table(rho(parse_element(element, system)))


@main.command("rho-inv")
@click.argument("group_spec", metavar="GROUP")
@click.argument("element", metavar="GHOST_ELEMENT")
@system_option("leftfree")
@output_options
@reports_errors
def rho_inverse_command(group_spec: str, element: str, flavor: str) -> Table:
    """Write a combination of orbit sums in the standard basis."""
    group = load_group(group_spec)
    system = SubgroupSystem.named(group, group, flavor)
    return element_table(rho_inverse(parse_ghost(element, system)))


@main.command("ghost-mul")
@click.argument("group_spec", metavar="GROUP")
@click.argument("first", metavar="X")
@click.argument("second", metavar="Y")
@system_option("leftfree")
@output_options
@reports_errors
def ghost_mul(group_spec: str, first: str, second: str, flavor: str) -> Table:
    """Multiply two ghost elements given as combinations of orbit sums."""
    group = load_group(group_spec)
    system = SubgroupSystem.named(group, group, flavor)
    return ghost_table(parse_ghost(first, system) * parse_ghost(second, system))


@main.command("grading")
@click.argument("group_spec", metavar="GROUP")
@click.argument("element")
@system_option("leftfree")
@output_options
@reports_errors
def grading_command(group_spec: str, element: str, flavor: str) -> Table:
    """Split an element into its graded components."""
    group = load_group(group_spec)
    system = SubgroupSystem.named(group, group, flavor)
    value = parse_element(element, system)
    rows = []
    for n in grading(rho(value)):
        for L, c in burnside_graded_component(value, n).terms:
            rows.append((n, f"class:{system.index(L)}", L.describe(), c))
    return Table(("degree", "class", "subgroup", "coefficient"), tuple(rows))


@main.command("sigma")
@click.argument("group_spec", metavar="GROUP")
@click.argument("element")
@click.option("--type", "type_name", required=True, metavar="<LABEL>", help="The catalog group T")
@output_options
@reports_errors
def sigma_command(group_spec: str, element: str, type_name: str) -> Table:
    """The equivariant matrix of an element at the type T."""
    group = load_group(group_spec)
    system = SubgroupSystem.bifree(group, group)
    matrix = sigma(parse_element(element, system), catalog_group(type_name))
    return Table(
        ("row",) + tuple(column.describe() for column in matrix.columns),
        tuple(
            (row.describe(),) + tuple(entries)
            for row, entries in zip(matrix.rows, matrix.entries)
        ),
        title=matrix.key,
    )


@main.command("sigma-tilde")
@click.argument("group_spec", metavar="GROUP")
@click.argument("element")
@output_options
@reports_errors
def sigma_tilde_command(group_spec: str, element: str) -> Table:
    """The blocks of σ̃ for an element supported on twisted diagonals."""
    group = load_group(group_spec)
    system = SubgroupSystem.bifree(group, group)
    rows = []
    for U, block in sigma_tilde(parse_element(element, system), system).items():
        for row, entries in zip(block.rows, block.entries):
            for column, entry in zip(block.columns, entries):
                rows.append((U.describe(), row.describe(), column.describe(), entry))
    return Table(("object", "row", "column", "entry"), tuple(rows))


def _fusion_table(system: fusion_module.FusionSystem) -> Table:
    rows = []
    for members in system.object_classes():
        P = members[0]
        rows.append(
            (
                P.describe(),
                len(members),
                system.hom_count(P),
                len(system.aut(P)),
            )
        )
    return Table(("class", "members", "hom_to_S", "automorphisms"), tuple(rows))


@main.command("fusion-from-group")
@fusion_group_options
@click.option("--ambient", required=True, metavar="<GROUP>", help="The group G with S as Sylow subgroup")
@output_options
@reports_errors
def fusion_from_group_command(group_spec: str, prime: int, ambient: str) -> Table:
    """The fusion system of G on its Sylow p-subgroup, realized on S."""
    system = fusion_module.fusion_on(load_group(group_spec), load_group(ambient), prime)
    return _fusion_table(system)


@main.command("fusion-enumerate")
@fusion_group_options
@click.option(
    "--max-order",
    "fusion_max_order",
    type=int,
    default=fusion_module.DEFAULT_FUSION_MAX_ORDER,
    metavar="<N>",
    help="The largest p-group fusion systems are enumerated on",
    envvar="BURNSIDE_MAX_FUSION_ORDER",
)
@output_options
@reports_errors
def fusion_enumerate(group_spec: str, prime: int, fusion_max_order: int) -> Table:
    """Enumerate every fusion system on S."""
    group = load_group(group_spec)
    systems = fusion_module.enumerate_fusion_systems(group, prime, max_order=fusion_max_order)
    rows = []
    for index, system in enumerate(systems):
        rows.append(
            (
                index,
                len(system.morphisms),
                len(system.system),
                len(system.aut(group.whole)),
                fusion_module.is_saturated(system).saturated,
            )
        )
    return Table(("index", "morphisms", "classes", "automorphisms", "saturated"), tuple(rows))


def _report(report: fusion_module.IdempotentReport) -> t.Dict[str, t.Any]:
    system = report.omega_standard.system
    return {
        "marks": Table(
            ("class", "p1_order", "mark"),
            tuple(
                (f"class:{system.index(L)}", L.p1.order, value)
                for L, value in report.marks.items()
            ),
        ),
        "omega": element_table(report.omega_standard),
        "idempotent": report.is_idempotent,
        "frobenius_left": report.is_frobenius_left,
        "frobenius_right": report.is_frobenius_right,
        "symmetric": report.is_symmetric,
        "fix_matches": report.fix_matches,
        "valuation": report.valuation,
        "p_integral": report.p_integral_standard,
        "saturated": fusion_module.is_saturated(report.fusion).saturated,
        "sat_fs": Table(
            ("subgroup", "value", "p_integral"),
            tuple(
                (P.describe(), value, report.sat_fs_integral[P])
                for P, value in report.sat_fs_condition.items()
            ),
        ),
    }


@main.command("omega")
@fusion_group_options
@click.option("--fusion", "fusion_spec", required=True, metavar="<SPEC>", help="The fusion system")
@output_options
@reports_errors
def omega_command(group_spec: str, prime: int, fusion_spec: str) -> t.Dict[str, t.Any]:
    """The characteristic idempotent of a fusion system."""
    group = load_group(group_spec)
    return _report(fusion_module.omega(parse_fusion(fusion_spec, group, prime)))


@main.command("classify")
@fusion_group_options
@click.option("--fusion", "fusion_spec", default=None, metavar="<SPEC>", help="Classify ω of this fusion system")
@click.argument("element", required=False)
@output_options
@reports_errors
def classify(
    group_spec: str, prime: int, fusion_spec: t.Optional[str], element: t.Optional[str]
) -> t.Dict[str, t.Any]:
    """Check an element against the axioms of Idem(S) and for p-integrality."""
    if (fusion_spec is None) == (element is None):
        raise ParseError("Give exactly one of --fusion or ELEMENT")
    group = load_group(group_spec)
    if fusion_spec is not None:
        value = fusion_module.omega(parse_fusion(fusion_spec, group, prime)).omega_standard
    else:
        assert element is not None
        value = parse_element(element, SubgroupSystem.bifree(group, group))
    verdict = fusion_module.classify_idempotent(value, prime)
    return {
        "idempotent": verdict.is_idempotent,
        "frobenius_left": verdict.is_frobenius_left,
        "frobenius_right": verdict.is_frobenius_right,
        "fix_subgroup_closed": verdict.fix_subgroup_closed,
        "contains_diagonal": verdict.contains_diagonal,
        "in_idem": verdict.in_idem,
        "valuation": verdict.valuation,
        "p_integral": verdict.p_integral_standard,
        "ghost_p_integral": verdict.ghost_p_integral,
        "sigma_tilde_p_integral": verdict.sigma_tilde_p_integral,
    }


@main.command("saturated")
@fusion_group_options
@click.option("--fusion", "fusion_spec", required=True, metavar="<SPEC>", help="The fusion system")
@output_options
@reports_errors
def saturated_command(group_spec: str, prime: int, fusion_spec: str) -> t.Dict[str, t.Any]:
    """Test the Sylow and Extension axioms, printing a witness on failure."""
    group = load_group(group_spec)
    result = fusion_module.is_saturated(parse_fusion(fusion_spec, group, prime))
    return {
        "saturated": result.saturated,
        "axiom": result.axiom,
        "subgroup": result.subgroup,
        "morphism": result.morphism,
    }


@main.command("triangle")
@fusion_group_options
@output_options
@reports_errors
def triangle(group_spec: str, prime: int) -> t.Dict[str, t.Any]:
    """Check that ω_F determines S(F) for every fusion system on S."""
    record = fusion_module.triangle_check(load_group(group_spec), prime)
    return {
        "systems": len(record.systems),
        "commutes": record.commutes,
        "injective": record.injective,
        "failures": [len(system.morphisms) for system in record.failures],
    }
