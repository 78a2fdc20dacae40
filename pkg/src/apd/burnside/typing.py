from fractions import Fraction
import sys
import typing as t

if sys.version_info >= (3, 10):
    from typing import TypeAlias
else:
    from typing_extensions import TypeAlias

from typing import Literal, Protocol, TypedDict

if t.TYPE_CHECKING:
    from .goursat import ProductSubgroup


# Exact scalars. Everything that is multiplied into a coefficient is
# converted to a Fraction first, ints are accepted as a convenience.
Scalar: TypeAlias = t.Union[int, Fraction]

# The kinds of homomorphism the enumerator understands. "conjugation" only
# makes sense when domain and codomain are subgroups of the same group.
HomKind: TypeAlias = Literal["all", "epi", "mono", "iso", "conjugation"]

OutputFormat: TypeAlias = Literal["table", "json", "csv"]


# Anything that can report the number of points fixed by a subgroup of a
# direct product, such as Burnside elements and explicit bisets.
class SupportsMarks(Protocol):
    def mark(self, subgroup: "ProductSubgroup") -> Scalar:
        ...


# Serialized rationals are always numerator/denominator pairs
class RationalDict(TypedDict):
    numerator: int
    denominator: int
