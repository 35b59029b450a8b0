"""Essentially-V stamps and membership in joins with LI.

A stamp ``φ`` is essentially-V when its quotient by the essential congruence
(``u ≡ v`` iff ``φ(xuy) = φ(xvy)`` for all long enough ``x, y``) lies in V.
This is decided two ways: structurally, by building the quotient and checking
the basis of V on it, and equationally, by checking the wrapped identities
``x^w y u z t^w = x^w y v z t^w`` on the stamp. For the varieties where
``xLy`` stays in the join for every V-language L, essentially-V is the same
as belonging to ``V ∨ LI``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal, Sequence

import numpy

from lijoin.algebra import (
    FiniteMonoid,
    MonoidCongruence,
    make_congruence,
    quotient_monoid,
)
from lijoin.automata import Dfa, dfa_to_dict, equivalent, minimize, word_quotient
from lijoin.identities import (
    Basis,
    IdentityStatement,
    builtin_basis,
    find_violation,
    monoid_satisfies,
    parse_identity,
    u_of_e,
)
from lijoin.stamps import Stamp, eventual_image, make_stamp, syntactic_stamp
from lijoin.utils import (
    ConsistencyError,
    CriterionError,
    InvalidInputError,
    Word,
    format_word,
    iter_words,
)

__all__ = [
    "EssentialQuotient",
    "JoinVerdict",
    "CriterionResult",
    "JOIN_VARIETIES",
    "ASSERTED_VARIETIES",
    "essential_quotient",
    "is_essentially_v_structural",
    "is_essentially_v_equational",
    "in_join_with_li",
    "bounded_criterion_check",
    "is_locally_trivial",
]

logger = logging.getLogger(__name__)

# varieties V for which xLy stays in Lang(V ∨ LI) for every V-language L
JOIN_VARIETIES = ("R", "L", "J", "G", "Ab", "Com", "ACom", "A", "triv")

# criterion stated without a proof
ASSERTED_VARIETIES = ("Com", "ACom")


@dataclass(frozen=True, eq=False)
class EssentialQuotient:
    """The essential congruence of a stamp at the element level.

    ``m ≈ m'`` iff ``α m β = α m' β`` for all ``α, β ∈ T``, where ``T`` is
    the image of the words of length at least the stability index.
    """

    stamp: Stamp
    congruence: MonoidCongruence
    quotient_stamp: Stamp
    T: frozenset[int]
    stability_index: int

    @property
    def monoid(self) -> FiniteMonoid:
        return self.quotient_stamp.monoid


def _essential_classes(M: FiniteMonoid, T: Sequence[int]) -> numpy.ndarray:
    T = numpy.asarray(T, dtype=numpy.intp)
    # m ~ m' iff m·β = m'·β for all β ∈ T
    _, right = numpy.unique(M.table[:, T], axis=0, return_inverse=True)
    right = right.reshape(-1)
    # m ≈ m' iff α·m ~ α·m' for all α ∈ T
    _, classes = numpy.unique(right[M.table[T, :]].T, axis=0, return_inverse=True)
    return classes.reshape(-1)


def essential_quotient(s: Stamp) -> EssentialQuotient:
    """Computes the essential congruence of `s` and the quotient stamp
    ``μ = π ∘ φ``.

    :raises ConsistencyError: if the computed relation is not a congruence.
    """
    ev = eventual_image(s)
    M = s.monoid
    congruence = make_congruence(M, _essential_classes(M, sorted(ev.T)))
    try:
        quotient, projection = quotient_monoid(congruence)
    except InvalidInputError as e:
        raise ConsistencyError(f"Essential relation is not a congruence: {e}") from e
    letters = {a: int(projection[m]) for a, m in s.letter_image.items()}
    logger.debug(
        "Essential quotient of a monoid of size %d has size %d", M.size, quotient.size
    )
    return EssentialQuotient(
        stamp=s,
        congruence=congruence,
        quotient_stamp=make_stamp(s.alphabet, quotient, letters),
        T=ev.T,
        stability_index=ev.stability_index,
    )


def _identities(
    basis: Basis | Iterable[IdentityStatement],
) -> tuple[IdentityStatement, ...]:
    if isinstance(basis, Basis):
        return basis.identities
    return tuple(basis)


def is_essentially_v_structural(
    s: Stamp | EssentialQuotient, basis: Basis | Iterable[IdentityStatement]
) -> bool:
    """Whether the essential quotient of `s` satisfies every identity of
    `basis`, variables ranging over the whole quotient monoid."""
    eq = s if isinstance(s, EssentialQuotient) else essential_quotient(s)
    return all(monoid_satisfies(eq.monoid, i) for i in _identities(basis))


def _equational_violation(
    s: Stamp, basis: Basis | Iterable[IdentityStatement]
) -> tuple[IdentityStatement, dict[str, int]] | None:
    for identity in u_of_e(_identities(basis)):
        violation = find_violation(s, identity, "ne")
        if violation is not None:
            return identity, violation
    return None


def is_essentially_v_equational(
    s: Stamp, basis: Basis | Iterable[IdentityStatement]
) -> bool:
    """Whether `s` ne-satisfies every identity ``x^w y u z t^w = x^w y v z t^w``
    obtained from an identity ``u = v`` of `basis`."""
    return _equational_violation(s, basis) is None


@dataclass(frozen=True)
class JoinVerdict:
    """Answer to "does L belong to Lang(V ∨ LI)?".

    `method` is ``"both"`` when the structural and equational procedures were
    run and agreed. `witness` names a violated wrapped identity and a
    violating assignment when the answer is negative.
    """

    in_join: bool
    method: Literal["structural", "equational", "both"]
    variety: str
    basis: tuple[str, ...]
    quotient_size: int
    stability_index: int
    asserted_only: bool = False
    witness: dict[str, Any] | None = None
    language: dict[str, Any] | None = field(default=None, compare=False)

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "language": self.language,
            "variety": self.variety,
            "in_join": self.in_join,
            "method": self.method,
            "quotient_size": self.quotient_size,
            "stability_index": self.stability_index,
            "asserted_only": self.asserted_only,
            "basis": list(self.basis),
        }
        if self.witness is not None:
            result["witness"] = self.witness
        return result


def in_join_with_li(d: Dfa, variety: str) -> JoinVerdict:
    """Decides whether the language of `d` belongs to ``Lang(V ∨ LI)``.

    Both procedures are run on the syntactic stamp and must agree.

    :raises CriterionError: for J1, and for any variety outside
        :data:`JOIN_VARIETIES`, where essentially-V is not known to coincide
        with the join.
    :raises ConsistencyError: when the two procedures disagree.
    """
    if variety == "J1":
        raise CriterionError(
            "criterion (A) fails for J1: essentially-J1 stamps do not coincide"
            " with J1 ∨ LI; run `lijoin demo j1` for the counterexample"
        )
    basis = builtin_basis(variety)
    if variety not in JOIN_VARIETIES:
        raise CriterionError(
            f"criterion (A) is not known to hold for {variety}; supported"
            f" varieties are {', '.join(JOIN_VARIETIES)}"
        )
    s = syntactic_stamp(d)
    eq = essential_quotient(s)
    structural = is_essentially_v_structural(eq, basis)
    violation = _equational_violation(s, basis)
    equational = violation is None
    if structural != equational:
        raise ConsistencyError(
            f"Essentially-{variety} procedures disagree on {d!r}:"
            f" structural={structural}, equational={equational}"
        )
    witness = None
    if violation is not None:
        identity, assignment = violation
        witness = {
            "identity": str(identity),
            "assignment": {
                name: s.monoid.name(m) for name, m in assignment.items()
            },
        }
    return JoinVerdict(
        in_join=structural,
        method="both",
        variety=variety,
        basis=tuple(str(i) for i in basis.identities),
        quotient_size=eq.monoid.size,
        stability_index=eq.stability_index,
        asserted_only=variety in ASSERTED_VARIETIES,
        witness=witness,
        language=dfa_to_dict(minimize(d)),
    )


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of :func:`bounded_criterion_check`.

    When `found`, `assignment` maps every pair ``(u, v)`` to the index of a
    candidate K with ``u⁻¹Lv⁻¹ = (xu)⁻¹K(vy)⁻¹``; otherwise `refuted_at` is
    the first pair for which no candidate works.
    """

    found: bool
    assignment: dict[tuple[Word, Word], int]
    refuted_at: tuple[Word, Word] | None = None

    def describe(self) -> str:
        if self.found:
            return f"found a candidate for all {len(self.assignment)} pairs"
        assert self.refuted_at is not None
        u, v = self.refuted_at
        return f"refuted at (u, v) = ({format_word(u)}, {format_word(v)})"


def bounded_criterion_check(
    L: Dfa,
    x: Sequence[str],
    y: Sequence[str],
    k: int,
    l: int,  # noqa: E741
    candidates: Sequence[Dfa],
) -> CriterionResult:
    """Checks the quotient condition for all ``u ∈ Σ^k, v ∈ Σ^l``.

    Pairs are visited with u in length-lexicographic order, then v; for each,
    the candidates are tried in order.
    """
    if k < 0 or l < 0:
        raise InvalidInputError("k and l must be non-negative")
    x, y = tuple(x), tuple(y)
    keys = [minimize(K).key() for K in candidates]
    if len(set(keys)) != len(keys):
        warnings.warn(
            f"{len(keys) - len(set(keys))} duplicate candidate languages", stacklevel=2
        )
    assignment: dict[tuple[Word, Word], int] = {}
    for u in iter_words(L.alphabet, k, k):
        for v in iter_words(L.alphabet, l, l):
            target = word_quotient(L, u, v)
            for i, K in enumerate(candidates):
                if equivalent(word_quotient(K, x + u, v + y), target):
                    assignment[(u, v)] = i
                    break
            else:
                logger.debug("No candidate for u=%s v=%s", u, v)
                return CriterionResult(False, assignment, (u, v))
    return CriterionResult(True, assignment)


_LI_IDENTITY = "x^w y x^w = x^w"


def is_locally_trivial(s: Stamp) -> bool:
    """Whether `s` ne-satisfies ``x^w y x^w = x^w``, i.e. recognizes only
    LI languages."""
    return find_violation(s, parse_identity(_LI_IDENTITY), "ne") is None
