"""ω-term identities and their satisfaction by finite monoids and stamps.

Identities are written in a small language::

    identity := term "=" term
    term     := "1" | factor+
    factor   := var | var "^w" | "(" term ")" "^w"
    var      := letter digit*

A run of letters is read as a product of single-letter variables, so
``(ab)^w`` and ``(a b)^w`` are the same term; digits attach to the preceding
letter (``x1`` is one variable). ``^ω`` may be used in place of ``^w``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, NamedTuple, Sequence, Union

import numpy

from lijoin.algebra import FiniteMonoid
from lijoin.stamps import Stamp, image_semigroup
from lijoin.utils import InvalidInputError

__all__ = [
    "Var",
    "Omega",
    "OmegaTerm",
    "IdentityStatement",
    "IdentitySyntaxError",
    "Basis",
    "Mode",
    "BASIS_NAMES",
    "parse_identity",
    "eval_term",
    "satisfies",
    "find_violation",
    "monoid_satisfies",
    "u_of_e",
    "builtin_basis",
]

logger = logging.getLogger(__name__)

Mode = Literal["all", "ne"]

# assignments evaluated per numpy batch
_BATCH = 1 << 20


class IdentitySyntaxError(InvalidInputError):
    def __init__(self, message: str, text: str, position: int) -> None:
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Omega:
    inner: OmegaTerm

    def __str__(self) -> str:
        if len(self.inner.factors) == 1 and isinstance(self.inner.factors[0], Var):
            return f"{self.inner}^w"
        return f"({self.inner})^w"


Factor = Union[Var, Omega]


@dataclass(frozen=True)
class OmegaTerm:
    """A product of factors; the empty product is the constant 1."""

    factors: tuple[Factor, ...] = ()

    def variables(self) -> tuple[str, ...]:
        """Variable names in order of first occurrence."""
        names: dict[str, None] = {}
        for f in self.factors:
            if isinstance(f, Var):
                names.setdefault(f.name)
            else:
                names.update(dict.fromkeys(f.inner.variables()))
        return tuple(names)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class IdentityStatement:
    lhs: OmegaTerm
    rhs: OmegaTerm

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.lhs.variables() + self.rhs.variables()))

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def error(self, message: str, position: int | None = None) -> IdentitySyntaxError:
        return IdentitySyntaxError(
            message, self.text, self.pos if position is None else position
        )

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def omega_suffix(self) -> bool:
        for suffix in ("^w", "^ω"):
            if self.text.startswith(suffix, self.pos):
                self.pos += len(suffix)
                return True
        if self.text.startswith("^", self.pos):
            raise self.error("expected ^w")
        return False

    def identity(self) -> IdentityStatement:
        lhs = self.term()
        if self.peek() != "=":
            raise self.error("expected '='")
        self.pos += 1
        rhs = self.term()
        if self.peek():
            if self.peek() == ")":
                raise self.error("unbalanced parenthesis")
            raise self.error(f"unexpected {self.peek()!r}")
        return IdentityStatement(lhs, rhs)

    def term(self) -> OmegaTerm:
        if self.peek() == "1":
            self.pos += 1
            if self.peek() not in ("", "=", ")"):
                raise self.error("the constant 1 must stand alone")
            return OmegaTerm()
        factors: list[Factor] = []
        while True:
            c = self.peek()
            if "a" <= c <= "z":
                while self.pos < len(self.text) and "a" <= self.text[self.pos] <= "z":
                    start = self.pos
                    self.pos += 1
                    while self.pos < len(self.text) and self.text[self.pos].isdigit():
                        self.pos += 1
                    var = Var(self.text[start : self.pos])
                    if self.omega_suffix():
                        factors.append(Omega(OmegaTerm((var,))))
                    else:
                        factors.append(var)
            elif c == "(":
                opening = self.pos
                self.pos += 1
                inner = self.term()
                if self.peek() != ")":
                    raise self.error("unbalanced parenthesis", opening)
                self.pos += 1
                if not self.omega_suffix():
                    raise self.error("a parenthesized group must be followed by ^w")
                factors.append(Omega(inner))
            else:
                break
        if not factors:
            if self.peek() in ("", "="):
                raise self.error("expected a term")
            raise self.error(f"unexpected {self.peek()!r}")
        return OmegaTerm(tuple(factors))


def parse_identity(text: str) -> IdentityStatement:
    """Parses an identity such as ``"x^w y x^w = x^w"``.

    :raises IdentitySyntaxError: with the position of the offending character.
    """
    return _Parser(text).identity()


def eval_term(M: FiniteMonoid, t: OmegaTerm, assignment: Mapping[str, int]) -> int:
    """Evaluates `t` in `M`: concatenation is the product, ``(u)^w`` is the
    ω-power of the value of `u` and the empty term is the identity."""
    result = M.identity
    for f in t.factors:
        if isinstance(f, Var):
            if f.name not in assignment:
                raise InvalidInputError(f"Unbound variable {f.name!r}")
            value = int(assignment[f.name])
        else:
            value = int(M.omegas[eval_term(M, f.inner, assignment)])
        result = M.mul(result, value)
    return result


def _eval_batch(
    M: FiniteMonoid, t: OmegaTerm, values: Mapping[str, numpy.ndarray], count: int
) -> numpy.ndarray:
    result = numpy.full(count, M.identity, dtype=numpy.intp)
    for f in t.factors:
        if isinstance(f, Var):
            value = values[f.name]
        else:
            value = M.omegas[_eval_batch(M, f.inner, values, count)]
        result = M.table[result, value]
    return result


def _assignments(
    names: Sequence[str], domain: numpy.ndarray, start: int, stop: int
) -> dict[str, numpy.ndarray]:
    """Assignments number ``start..stop-1`` of the grid ``domain^names``, the
    first variable varying slowest."""
    flat = numpy.arange(start, stop, dtype=numpy.int64)
    r = len(domain)
    values = {}
    for k, name in enumerate(reversed(names)):
        values[name] = domain[(flat // r**k) % r]
    return values


def _grid_violation(
    M: FiniteMonoid,
    lhs: OmegaTerm,
    rhs: OmegaTerm,
    names: Sequence[str],
    domain: numpy.ndarray,
) -> dict[str, int] | None:
    total = len(domain) ** len(names)
    for start in range(0, total, _BATCH):
        stop = min(total, start + _BATCH)
        values = _assignments(names, domain, start, stop)
        left = _eval_batch(M, lhs, values, stop - start)
        right = _eval_batch(M, rhs, values, stop - start)
        bad = numpy.flatnonzero(left != right)
        if len(bad):
            i = int(bad[0])
            return {name: int(values[name][i]) for name in names}
    return None


def _omega_of_var(f: Factor) -> str | None:
    if isinstance(f, Omega) and len(f.inner.factors) == 1:
        inner = f.inner.factors[0]
        if isinstance(inner, Var):
            return inner.name
    return None


def _context_split(
    identity: IdentityStatement,
) -> tuple[tuple[str, str, str, str], OmegaTerm, OmegaTerm] | None:
    """Recognizes identities ``x^w y u z t^w = x^w y v z t^w`` whose context
    variables are distinct and occur nowhere else."""
    lhs, rhs = identity.lhs.factors, identity.rhs.factors
    if len(lhs) < 4 or len(rhs) < 4:
        return None
    if lhs[:2] != rhs[:2] or lhs[-2:] != rhs[-2:]:
        return None
    x, y, z, t = _omega_of_var(lhs[0]), lhs[1], lhs[-2], _omega_of_var(lhs[-1])
    if x is None or t is None or not isinstance(y, Var) or not isinstance(z, Var):
        return None
    context = (x, y.name, z.name, t)
    core_l, core_r = OmegaTerm(lhs[2:-2]), OmegaTerm(rhs[2:-2])
    if len(set(context)) != 4:
        return None
    if set(context) & set(core_l.variables() + core_r.variables()):
        return None
    return context, core_l, core_r


def _context_violation(
    M: FiniteMonoid,
    context: tuple[str, str, str, str],
    core_l: OmegaTerm,
    core_r: OmegaTerm,
    domain: numpy.ndarray,
) -> dict[str, int] | None:
    """Decides ``x^w y u z t^w = x^w y v z t^w`` by comparing u and v up to
    the relation ``m ~ m'`` iff ``p m s = p m' s`` for all left contexts
    ``p = x^w y`` and right contexts ``s = z t^w``."""
    first, second = numpy.meshgrid(domain, domain, indexing="ij")
    left_all = M.table[M.omegas[first], second].ravel()
    right_all = M.table[first, M.omegas[second]].ravel()
    left, left_at = numpy.unique(left_all, return_index=True)
    right, right_at = numpy.unique(right_all, return_index=True)
    # classes of m by the row m·S, then of m by the rows (P·m)·S
    _, by_right = numpy.unique(M.table[:, right], axis=0, return_inverse=True)
    by_right = by_right.reshape(-1)
    _, cls = numpy.unique(
        by_right[M.table[left, :]].T, axis=0, return_inverse=True
    )
    cls = cls.reshape(-1)

    names = tuple(dict.fromkeys(core_l.variables() + core_r.variables()))
    total = len(domain) ** len(names)
    for start in range(0, total, _BATCH):
        stop = min(total, start + _BATCH)
        values = _assignments(names, domain, start, stop)
        u = _eval_batch(M, core_l, values, stop - start)
        v = _eval_batch(M, core_r, values, stop - start)
        bad = numpy.flatnonzero(cls[u] != cls[v])
        if not len(bad):
            continue
        i = int(bad[0])
        mu, mv = int(u[i]), int(v[i])
        for pi, p in enumerate(left):
            for si, s in enumerate(right):
                if M.table[M.table[p, mu], s] != M.table[M.table[p, mv], s]:
                    a, b = divmod(int(left_at[pi]), len(domain))
                    c, d = divmod(int(right_at[si]), len(domain))
                    witness = {name: int(values[name][i]) for name in names}
                    x, y, z, t = context
                    witness.update(
                        {
                            x: int(domain[a]),
                            y: int(domain[b]),
                            z: int(domain[c]),
                            t: int(domain[d]),
                        }
                    )
                    return witness
    return None


def _violation(
    M: FiniteMonoid,
    identity: IdentityStatement,
    domain: numpy.ndarray,
    eliminate_context: bool,
) -> dict[str, int] | None:
    split = _context_split(identity) if eliminate_context else None
    if split is not None:
        return _context_violation(M, *split, domain)
    return _grid_violation(M, identity.lhs, identity.rhs, identity.variables, domain)


def _domain(s: Stamp, mode: Mode) -> numpy.ndarray:
    if mode == "all":
        return numpy.arange(s.monoid.size)
    if mode == "ne":
        return numpy.array(sorted(image_semigroup(s)), dtype=numpy.intp)
    raise InvalidInputError(
        f"Unknown satisfaction mode {mode!r}, expected 'all' or 'ne'"
    )


def find_violation(
    s: Stamp,
    identity: IdentityStatement,
    mode: Mode = "all",
    eliminate_context: bool = True,
) -> dict[str, int] | None:
    """Searches for an assignment violating `identity` in the stamp `s`.

    Variables range over the whole monoid for ``mode="all"`` and over the
    image semigroup ``φ(Σ⁺)`` for ``mode="ne"``.

    :param eliminate_context: evaluate identities of the shape
        ``x^w y u z t^w = x^w y v z t^w`` through their contexts instead of
        enumerating ``x, y, z, t``.
    :returns: the first violating assignment, or None when `s` satisfies
        `identity`.
    """
    return _violation(s.monoid, identity, _domain(s, mode), eliminate_context)


def satisfies(
    s: Stamp,
    identity: IdentityStatement,
    mode: Mode = "all",
    eliminate_context: bool = True,
) -> bool:
    return find_violation(s, identity, mode, eliminate_context) is None


def monoid_satisfies(
    M: FiniteMonoid, identity: IdentityStatement, eliminate_context: bool = True
) -> bool:
    """Whether the monoid `M` satisfies `identity`, all variables ranging over
    the whole of `M`."""
    domain = numpy.arange(M.size)
    return _violation(M, identity, domain, eliminate_context) is None


def _fresh(base: str, used: set[str]) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def u_of_e(E: Iterable[IdentityStatement]) -> tuple[IdentityStatement, ...]:
    """Wraps every ``u = v`` into ``x^w y u z t^w = x^w y v z t^w``.

    The context variables are named x, y, z and t, suffixed with the least
    positive integer that makes them fresh when a name is already taken.
    """
    result = []
    for identity in E:
        used = set(identity.variables)
        x, y, z, t = names = [_fresh(b, used) for b in "xyzt"]
        if len(set(names)) != 4:
            raise InvalidInputError("Fresh variable names collide")
        head = (Omega(OmegaTerm((Var(x),))), Var(y))
        tail = (Var(z), Omega(OmegaTerm((Var(t),))))
        result.append(
            IdentityStatement(
                OmegaTerm(head + identity.lhs.factors + tail),
                OmegaTerm(head + identity.rhs.factors + tail),
            )
        )
    return tuple(result)


class Basis(NamedTuple):
    identities: tuple[IdentityStatement, ...]
    mode: Mode


_BASES: dict[str, tuple[tuple[str, ...], Mode]] = {
    "R": (("(a b)^w a = (a b)^w",), "all"),
    "L": (("b (a b)^w = (a b)^w",), "all"),
    "J": (("(a b)^w a = (a b)^w", "b (a b)^w = (a b)^w"), "all"),
    "LI": (("x^w y x^w = x^w",), "ne"),
    "J1": (("x x = x", "x y = y x"), "all"),
    "Com": (("x y = y x",), "all"),
    "ACom": (("x y = y x", "x^w x = x^w"), "all"),
    "A": (("x^w x = x^w",), "all"),
    "G": (("x^w = 1",), "all"),
    "Ab": (("x^w = 1", "x y = y x"), "all"),
    "triv": (("x = y",), "all"),
}

BASIS_NAMES = tuple(_BASES)


def builtin_basis(name: str) -> Basis:
    """The identity basis of a named variety and the mode it is meant for.

    R, L and J use the ω-identities for R-trivial, L-trivial and J-trivial
    monoids, LI is ne-defined by ``x^w y x^w = x^w``; J1, Com, ACom, A, G, Ab
    and triv use the standard bases.
    """
    try:
        texts, mode = _BASES[name]
    except KeyError as e:
        raise InvalidInputError(
            f"Unknown variety {name!r}, expected one of {', '.join(BASIS_NAMES)}"
        ) from e
    return Basis(tuple(parse_identity(text) for text in texts), mode)
