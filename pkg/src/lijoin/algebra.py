"""Finite monoids given by multiplication tables.

Elements are the dense indices ``0..size-1``; ``table[a, b]`` is the product
``a·b`` (row = left factor). The identity is not required to be index 0.
"""

from __future__ import annotations

import enum
import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy

from lijoin.utils import CapExceededError, InvalidInputError

__all__ = [
    "FiniteMonoid",
    "MonoidCongruence",
    "DirectProduct",
    "DivisionBudget",
    "DivisionVerdict",
    "make_monoid",
    "make_congruence",
    "identity_congruence",
    "full_congruence",
    "omega",
    "omega_map",
    "exponent",
    "is_group",
    "generated_submonoid",
    "direct_product",
    "quotient_monoid",
    "divides",
    "cyclic_group",
    "monogenic_monoid",
    "monoid_from_dict",
    "monoid_to_dict",
]

logger = logging.getLogger(__name__)

DEFAULT_PRODUCT_CAP = 10_000


@dataclass(frozen=True, eq=False)
class FiniteMonoid:
    """A finite monoid. Build instances with :func:`make_monoid`, which
    validates the table; the table array is read-only."""

    table: numpy.ndarray
    identity: int
    names: tuple[str, ...] | None = None

    @property
    def size(self) -> int:
        return int(self.table.shape[0])

    @property
    def elements(self) -> range:
        return range(self.size)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def product(self, factors: Iterable[int]) -> int:
        result = self.identity
        for f in factors:
            result = int(self.table[result, f])
        return result

    def power(self, m: int, k: int) -> int:
        return self.product([m] * k)

    def name(self, m: int) -> str:
        return self.names[m] if self.names is not None else str(m)

    @functools.cached_property
    def omegas(self) -> numpy.ndarray:
        return omega_map(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMonoid):
            return NotImplemented
        return (
            self.identity == other.identity
            and self.table.shape == other.table.shape
            and bool(numpy.array_equal(self.table, other.table))
        )

    def __hash__(self) -> int:
        return hash((self.identity, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteMonoid(size={self.size}, identity={self.identity})"


def _check_associative(t: numpy.ndarray, middles: Iterable[int]) -> None:
    # (a·b)·c against a·(b·c), one middle element b at a time
    for b in middles:
        left = t[t[:, b]]
        right = t[:, t[b]]
        bad = numpy.argwhere(left != right)
        if len(bad):
            a, c = (int(z) for z in bad[0])
            raise InvalidInputError(
                f"Table is not associative: ({a}·{b})·{c} = {left[a, c]}"
                f" but {a}·({b}·{c}) = {right[a, c]}"
            )


def _check_generates(t: numpy.ndarray, identity: int, gens: list[int]) -> None:
    reached = numpy.zeros(t.shape[0], dtype=bool)
    reached[identity] = True
    frontier = numpy.array([identity], dtype=numpy.intp)
    while len(frontier):
        products = t[numpy.ix_(frontier, gens)].ravel()
        frontier = numpy.unique(products[~reached[products]])
        reached[frontier] = True
    if not reached.all():
        missing = numpy.flatnonzero(~reached).tolist()
        raise InvalidInputError(
            f"Generators {gens} do not generate the table; elements {missing}"
            " are never reached"
        )


def make_monoid(
    table: Sequence[Sequence[int]] | numpy.ndarray,
    identity: int,
    names: Sequence[str] | None = None,
    generators: Iterable[int] | None = None,
) -> FiniteMonoid:
    """Validates a multiplication table and returns a :class:`FiniteMonoid`.

    Associativity is checked one row at a time, in ``O(n³)`` steps. When
    `generators` is given it is checked on products ``(x·g)·y = x·(g·y)``
    with g a generator only, in ``O(n²·|generators|)`` steps, which is
    exact for a generating set.

    :param table: square array of element indices, ``table[a][b] = a·b``.
    :param identity: index of the identity element.
    :param names: (optional) distinct display names, one per element.
    :param generators: (optional) elements generating the monoid.
    :raises InvalidInputError: on a non-square table, out-of-range entries, a
        violation of the identity law, or non-associativity. The message names
        the first offending pair or triple.
    """
    try:
        t = numpy.array(table, dtype=numpy.intp)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(
            f"Multiplication table is not an integer array: {e}"
        ) from e
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise InvalidInputError(
            "Multiplication table must be a non-empty square array,"
            f" got shape {t.shape}"
        )
    n = t.shape[0]
    bad = numpy.argwhere((t < 0) | (t >= n))
    if len(bad):
        a, b = (int(z) for z in bad[0])
        raise InvalidInputError(f"Table entry [{a}][{b}] = {t[a, b]} is out of range")
    if not 0 <= identity < n:
        raise InvalidInputError(f"Identity {identity} is out of range for size {n}")
    for m in range(n):
        if t[identity, m] != m:
            raise InvalidInputError(
                f"identity law violated: {identity}·{m} = {t[identity, m]} ≠ {m}"
            )
        if t[m, identity] != m:
            raise InvalidInputError(
                f"identity law violated: {m}·{identity} = {t[m, identity]} ≠ {m}"
            )
    if generators is None:
        _check_associative(t, range(n))
    else:
        gens = sorted({int(g) for g in generators})
        if any(not 0 <= g < n for g in gens):
            raise InvalidInputError(f"Generators {gens} out of range for size {n}")
        _check_generates(t, identity, gens)
        _check_associative(t, gens)
    if names is not None:
        names = tuple(names)
        if len(names) != n or len(set(names)) != n:
            raise InvalidInputError(f"Element names must be {n} distinct strings")
    t.setflags(write=False)
    return FiniteMonoid(table=t, identity=int(identity), names=names)


def omega(M: FiniteMonoid, m: int) -> int:
    """Returns the unique idempotent among the positive powers of `m`."""
    if not 0 <= m < M.size:
        raise InvalidInputError(f"Element {m} is out of range for size {M.size}")
    p = m
    while M.table[p, p] != p:
        p = int(M.table[p, m])
    return p


def omega_map(M: FiniteMonoid) -> numpy.ndarray:
    """The ω-power of every element, as an array indexed by element."""
    base = numpy.arange(M.size)
    cur = base.copy()
    result = numpy.full(M.size, -1, dtype=numpy.intp)
    while (result < 0).any():
        idempotent = (M.table[cur, cur] == cur) & (result < 0)
        result[idempotent] = cur[idempotent]
        cur = M.table[cur, base]
    result.setflags(write=False)
    return result


def exponent(M: FiniteMonoid) -> int:
    """Least ``k >= 1`` such that ``m^k`` is idempotent for every element."""
    indices = []
    periods = []
    for m in M.elements:
        seen: dict[int, int] = {}
        p, k = m, 1
        while p not in seen:
            seen[p] = k
            p = M.mul(p, m)
            k += 1
        indices.append(seen[p])
        periods.append(k - seen[p])
    lcm = math.lcm(*periods)
    return lcm * math.ceil(max(indices) / lcm)


def is_group(M: FiniteMonoid) -> bool:
    return bool((M.omegas == M.identity).all())


def generated_submonoid(M: FiniteMonoid, gens: Iterable[int]) -> frozenset[int]:
    """Least subset containing the identity and `gens`, closed under product."""
    gens = sorted(set(gens))
    for g in gens:
        if not 0 <= g < M.size:
            raise InvalidInputError(f"Generator {g} is out of range for size {M.size}")
    found = {M.identity}
    queue = [M.identity]
    while queue:
        p = queue.pop()
        for g in gens:
            q = M.mul(p, g)
            if q not in found:
                found.add(q)
                queue.append(q)
    return frozenset(found)


@dataclass(frozen=True)
class DirectProduct:
    """The product ``left × right``; the pair ``(i, j)`` is element
    ``i * right.size + j`` of `monoid`."""

    monoid: FiniteMonoid
    left: FiniteMonoid
    right: FiniteMonoid

    def pair(self, i: int, j: int) -> int:
        return i * self.right.size + j

    def unpair(self, k: int) -> tuple[int, int]:
        i, j = divmod(k, self.right.size)
        return i, j

    def left_projection(self) -> numpy.ndarray:
        return numpy.arange(self.monoid.size) // self.right.size

    def right_projection(self) -> numpy.ndarray:
        return numpy.arange(self.monoid.size) % self.right.size


def direct_product(
    M: FiniteMonoid, N: FiniteMonoid, max_size: int = DEFAULT_PRODUCT_CAP
) -> DirectProduct:
    """Componentwise product of two monoids.

    :raises CapExceededError: when ``|M|·|N|`` exceeds `max_size`.
    """
    size = M.size * N.size
    if size > max_size:
        raise CapExceededError(
            f"Direct product of sizes {M.size} and {N.size} has {size} elements,"
            f" over the cap of {max_size}",
            max_size,
        )
    table = (
        M.table[:, None, :, None] * N.size + N.table[None, :, None, :]
    ).reshape(size, size)
    # (m, 1) and (1, n) generate the product
    generators = [i * N.size + N.identity for i in range(M.size)]
    generators += [M.identity * N.size + j for j in range(N.size)]
    monoid = make_monoid(table, M.identity * N.size + N.identity, None, generators)
    return DirectProduct(monoid=monoid, left=M, right=N)


@dataclass(frozen=True, eq=False)
class MonoidCongruence:
    """A partition of the carrier of `base`; ``class_of[m]`` is the class of
    `m`. Classes are numbered by first occurrence. Compatibility with the
    product is checked by :func:`quotient_monoid`."""

    base: FiniteMonoid
    class_of: numpy.ndarray
    class_count: int

    def classes(self) -> list[list[int]]:
        result: list[list[int]] = [[] for _ in range(self.class_count)]
        for m, c in enumerate(self.class_of):
            result[int(c)].append(m)
        return result


def make_congruence(
    base: FiniteMonoid, class_of: Sequence[int] | numpy.ndarray
) -> MonoidCongruence:
    labels = numpy.asarray(class_of)
    if labels.shape != (base.size,):
        raise InvalidInputError(
            f"Class assignment must have one entry per element ({base.size})"
        )
    renumber: dict[Any, int] = {}
    normalized = numpy.empty(base.size, dtype=numpy.intp)
    for m, label in enumerate(labels.tolist()):
        normalized[m] = renumber.setdefault(label, len(renumber))
    normalized.setflags(write=False)
    return MonoidCongruence(base=base, class_of=normalized, class_count=len(renumber))


def identity_congruence(M: FiniteMonoid) -> MonoidCongruence:
    return make_congruence(M, numpy.arange(M.size))


def full_congruence(M: FiniteMonoid) -> MonoidCongruence:
    return make_congruence(M, numpy.zeros(M.size, dtype=numpy.intp))


def quotient_monoid(c: MonoidCongruence) -> tuple[FiniteMonoid, numpy.ndarray]:
    """Builds the quotient monoid of a congruence.

    :returns: tuple ``(quotient, projection)`` where ``projection[m]`` is the
        class of `m`, a surjective morphism onto `quotient`.
    :raises InvalidInputError: when the partition is not compatible with the
        product; the message names two pairs with equal classes whose products
        fall in different classes.
    """
    M = c.base
    k = c.class_count
    cls = c.class_of
    products = cls[M.table]
    qtable = numpy.full((k, k), -1, dtype=numpy.intp)
    witness: dict[tuple[int, int], tuple[int, int]] = {}
    for a in M.elements:
        for b in M.elements:
            key = (int(cls[a]), int(cls[b]))
            value = int(products[a, b])
            if qtable[key] < 0:
                qtable[key] = value
                witness[key] = (a, b)
            elif qtable[key] != value:
                a0, b0 = witness[key]
                raise InvalidInputError(
                    f"Partition is not a congruence: ({a0}, {b0}) and ({a}, {b})"
                    f" lie in the same classes but {a0}·{b0} and {a}·{b}"
                    " fall in different classes"
                )
    quotient = make_monoid(qtable, int(cls[M.identity]))
    return quotient, cls


class DivisionVerdict(enum.Enum):
    DIVIDES = "divides"
    DOES_NOT_DIVIDE = "does not divide"
    BUDGET_EXHAUSTED = "budget exhausted"


@dataclass(frozen=True)
class DivisionBudget:
    """Search limits for :func:`divides`.

    :param max_rounds: submonoids generated by up to this many elements are
        searched.
    :param max_target_size: morphisms are only searched onto monoids of at
        most this size.
    """

    max_rounds: int = 4
    max_target_size: int = 6


def _morphism_onto(
    N: FiniteMonoid, gens: tuple[int, ...], M: FiniteMonoid
) -> dict[int, int] | None:
    # a morphism from <gens> is determined by the images of gens
    for images in itertools.product(M.elements, repeat=len(gens)):
        image = {N.identity: M.identity}
        queue = [N.identity]
        consistent = True
        while queue and consistent:
            p = queue.pop()
            for g, gi in zip(gens, images, strict=True):
                q = N.mul(p, g)
                v = M.mul(image[p], gi)
                if q not in image:
                    image[q] = v
                    queue.append(q)
                elif image[q] != v:
                    consistent = False
                    break
        if consistent and len(set(image.values())) == M.size:
            return image
    return None


def divides(
    M: FiniteMonoid, N: FiniteMonoid, budget: DivisionBudget | None = None
) -> DivisionVerdict:
    """Decides whether `M` divides `N`, i.e. is the image of a submonoid of `N`
    under a surjective morphism. Exponential search: meant as a test oracle
    for small monoids.

    Submonoids are enumerated by adding one generator at a time; a round that
    still discovers new submonoids after ``budget.max_rounds`` rounds makes the
    search inconclusive.
    """
    budget = budget or DivisionBudget()
    if M.size == 1:
        return DivisionVerdict.DIVIDES
    if M.size > N.size:
        return DivisionVerdict.DOES_NOT_DIVIDE
    if M.size > budget.max_target_size:
        return DivisionVerdict.BUDGET_EXHAUSTED

    start = generated_submonoid(N, ())
    seen: dict[frozenset[int], tuple[int, ...]] = {start: ()}
    frontier = [start]
    rounds = 0
    while frontier:
        rounds += 1
        discovered: list[frozenset[int]] = []
        for P in frontier:
            for x in N.elements:
                if x in P:
                    continue
                Q = generated_submonoid(N, P | {x})
                if Q in seen:
                    continue
                seen[Q] = seen[P] + (x,)
                discovered.append(Q)
        if rounds > budget.max_rounds:
            # submonoids needing more generators remain unexplored
            if discovered:
                return DivisionVerdict.BUDGET_EXHAUSTED
            break
        for Q in discovered:
            if len(Q) >= M.size and _morphism_onto(N, seen[Q], M) is not None:
                logger.debug("Found division through a submonoid of size %d", len(Q))
                return DivisionVerdict.DIVIDES
        frontier = discovered
    return DivisionVerdict.DOES_NOT_DIVIDE


def cyclic_group(n: int) -> FiniteMonoid:
    """The cyclic group of order `n`, element `k` being ``g^k``."""
    if n < 1:
        raise InvalidInputError("Group order must be positive")
    r = numpy.arange(n)
    return make_monoid((r[:, None] + r[None, :]) % n, 0)


def monogenic_monoid(index: int, period: int) -> FiniteMonoid:
    """The monoid ``{1, m, ..., m^(index+period-1)}`` with
    ``m^(index+period) = m^index``. Element `k` is ``m^k``."""
    if index < 1 or period < 1:
        raise InvalidInputError("Index and period must be positive")
    n = index + period

    def reduce(e: int) -> int:
        return e if e < n else index + (e - index) % period

    table = [[reduce(a + b) for b in range(n)] for a in range(n)]
    return make_monoid(table, 0)


def monoid_from_dict(data: dict[str, Any]) -> FiniteMonoid:
    """Reads the monoid JSON format
    ``{"size": n, "identity": i, "table": [[...]], "names": [...]}``."""
    try:
        size = int(data["size"])
        table = data["table"]
        identity = int(data["identity"])
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"Malformed monoid JSON: {e}") from e
    if len(table) != size:
        raise InvalidInputError(
            f"Monoid JSON declares size {size} but has {len(table)} rows"
        )
    return make_monoid(table, identity, data.get("names"))


def monoid_to_dict(M: FiniteMonoid) -> dict[str, Any]:
    result: dict[str, Any] = {
        "size": M.size,
        "identity": M.identity,
        "table": M.table.tolist(),
    }
    if M.names is not None:
        result["names"] = list(M.names)
    return result
