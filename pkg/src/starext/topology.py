"""Basic closed sets of the star topology and their membership checks.

A basic closed set is described by finitely many (function, point) pairs;
a point belongs to it when at least one listed function maps it to the
corresponding target. These sets generate the coarsest T1 topology
making every starred function continuous: the preimage of a basic closed
set under a starred function is again basic, by composing the listed
functions, and that identity is checkable per point.

The density check ``covers_standard`` handles the sets with standard
targets: when the listed preimages cover the base sample up to the
horizon, the set provably contains every point of the extension, which
the caller can sweep-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import Undecidable
from .funlang import Compose, Const, FnExpr, compile_fn, pretty
from .hyper import Hyperpoint, Universe


@dataclass(frozen=True)
class BasicClosed:
    """Finite union of fibers: the points some listed function sends to
    the matching target."""

    pairs: tuple[tuple[FnExpr, Hyperpoint], ...]

    def __repr__(self) -> str:
        inner = ", ".join(f"({pretty(f)}, {p!r})" for f, p in self.pairs)
        return f"BasicClosed[{inner}]"

    def with_pair(self, f: FnExpr, target: Hyperpoint) -> "BasicClosed":
        return BasicClosed(self.pairs + ((f, target),))


class CoverVerdict(Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class CoverResult:
    verdict: CoverVerdict
    witness: int | None = None  # an uncovered base element, when NO


def closed_member(u: Universe, xi: Hyperpoint, closed: BasicClosed) -> bool:
    """Disjunction over the listed pairs of one star-equality each."""
    pending: Undecidable | None = None
    for f, target in closed.pairs:
        try:
            if u.eq(u.star_apply(f, xi), target):
                return True
        except Undecidable as exc:
            pending = exc
    if pending is not None:
        raise pending
    return False


def covers_standard(u: Universe, closed: BasicClosed,
                    bound: int | None = None) -> CoverResult:
    """Density check for a set with standard targets.

    Verifies that the union of the listed preimages contains every base
    element up to the bound (default: the oracle horizon). A YES means
    the set is the whole extension, so every point is a member; a NO
    carries the least uncovered element.
    """
    bound = u.oracle.horizon if bound is None else bound
    targets: list[int] = []
    fns = []
    for f, target in closed.pairs:
        if not isinstance(target.seq, Const):
            raise ValueError(
                f"covers_standard needs standard targets, got {target!r}"
            )
        targets.append(target.seq.value)
        fns.append(compile_fn(f))
    for x in range(bound + 1):
        if not any(fn(x) == t for fn, t in zip(fns, targets)):
            return CoverResult(CoverVerdict.NO, witness=x)
    return CoverResult(CoverVerdict.YES)


def star_preimage(f: FnExpr, closed: BasicClosed) -> BasicClosed:
    """Preimage of a basic closed set under a starred function.

    Membership satisfies: the image point lies in ``closed`` exactly when
    the original point lies in the returned set; both sides reduce to the
    same agreement queries, so the biconditional is exact.
    """
    return BasicClosed(tuple((Compose(g, f), target) for g, target in closed.pairs))


def separating_closed(xi: Hyperpoint) -> BasicClosed:
    """The basic closed set {xi} under the identity listing.

    The testable surrogate for the T1 separation property: any point not
    equal to xi (modulo the oracle) is outside this set.
    """
    from .funlang import VAR

    return BasicClosed(((VAR, xi),))
