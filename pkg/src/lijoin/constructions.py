"""Quotient witnesses: for a V-language L and words x, y, a language K in
the same variety with ``L = x⁻¹ K y⁻¹``.

Each builder verifies its output by exact automaton equivalence before
returning it.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Any, Iterable, Literal, Sequence

from lijoin.algebra import is_group
from lijoin.automata import (
    Dfa,
    Empty,
    Monomial,
    MonomialError,
    Subword,
    bool_op,
    build_family,
    concat_words,
    dfa_to_dict,
    equivalent,
    explore,
    make_dfa,
    minimize,
    reverse,
    word_quotient,
)
from lijoin.decide import (
    CriterionResult,
    bounded_criterion_check,
    is_essentially_v_equational,
    is_essentially_v_structural,
)
from lijoin.identities import builtin_basis
from lijoin.stamps import eval_word, language_of, syntactic_stamp
from lijoin.utils import (
    ConsistencyError,
    InvalidInputError,
    Word,
    as_word,
    env_int,
    format_word,
    iter_words,
)

__all__ = [
    "RMonomial",
    "SubwordProfile",
    "J1Report",
    "J1Row",
    "NotPiecewiseTestableError",
    "NotAGroupError",
    "DEFAULT_PROFILE_STATE_CAP",
    "PROFILE_CAP_VARIABLE",
    "monomials_language",
    "r_witness",
    "l_witness",
    "simon_profile",
    "j_witness",
    "group_witness",
    "j1_candidates",
    "j1_counterexample_report",
    "monomials_from_dict",
    "monomials_to_dict",
    "witness_report",
]

logger = logging.getLogger(__name__)

DEFAULT_PROFILE_STATE_CAP = 1_000_000
PROFILE_CAP_VARIABLE = "LIJOIN_PROFILE_STATE_CAP"


class NotPiecewiseTestableError(InvalidInputError):
    pass


class NotAGroupError(InvalidInputError):
    pass


@dataclass(frozen=True)
class RMonomial:
    """The language ``A₀* a₁ A₁* ⋯ a_k A_k*`` over `alphabet`.

    In R mode ``aᵢ ∉ Aᵢ₋₁``; in L mode ``aᵢ ∉ Aᵢ``.
    """

    alphabet: tuple[str, ...]
    sets: tuple[frozenset[str], ...]
    letters: Word
    mode: Literal["R", "L"] = "R"

    def __post_init__(self) -> None:
        for i, A in enumerate(self.sets):
            extra = A - set(self.alphabet)
            if extra:
                raise MonomialError(
                    f"A_{i} has letters {sorted(extra)} outside the alphabet"
                )
        as_word(self.letters, self.alphabet)
        self.family()

    def family(self) -> Monomial:
        return Monomial(self.sets, self.letters, self.mode)

    def dfa(self) -> Dfa:
        return build_family(self.family(), self.alphabet)

    def mirror(self) -> RMonomial:
        """The monomial of the reversed language, in the dual mode."""
        return RMonomial(
            self.alphabet,
            self.sets[::-1],
            self.letters[::-1],
            "L" if self.mode == "R" else "R",
        )

    def __str__(self) -> str:
        def star(A: frozenset[str]) -> str:
            letters = [a for a in self.alphabet if a in A]
            return "{" + ",".join(letters) + "}*"

        parts = [star(self.sets[0])]
        for a, A in zip(self.letters, self.sets[1:], strict=True):
            parts += [a, star(A)]
        return " ".join(parts)


def _alphabet_of(monomials: Sequence[RMonomial]) -> tuple[str, ...]:
    if not monomials:
        raise InvalidInputError("At least one monomial is required")
    alphabet = monomials[0].alphabet
    if any(m.alphabet != alphabet for m in monomials):
        raise InvalidInputError("All monomials must share one alphabet")
    return alphabet


def monomials_language(monomials: Sequence[RMonomial]) -> Dfa:
    """The union of the monomials."""
    result = build_family(Empty(), _alphabet_of(monomials))
    for m in monomials:
        result = bool_op("union", result, m.dfa())
    return result


def _verify(L: Dfa, K: Dfa, x: Word, y: Word, what: str) -> Dfa:
    if not equivalent(word_quotient(K, x, y), L):
        raise ConsistencyError(
            f"{what} witness does not satisfy L = x⁻¹Ky⁻¹ for"
            f" x={format_word(x, L.alphabet)}, y={format_word(y, L.alphabet)}"
        )
    return K


def r_witness(
    monomials: Sequence[RMonomial], x: Sequence[str], y: Sequence[str]
) -> Dfa:
    """Builds K with ``L = x⁻¹Ky⁻¹`` for L the union of R-normal monomials.

    For each monomial, ``y = z t`` with ``z`` the longest prefix of y in
    ``A_k*``; the monomial contributes ``x A₀*a₁⋯a_k A_k* t`` minus the words
    ``x A₀*a₁⋯a_k v t`` with ``v ∈ A_k^{<|z|}``. For ``k = 0`` the excluded
    words are ``x v t``.

    :raises MonomialError: when a monomial is not in R mode.
    :raises ConsistencyError: when the result fails verification.
    """
    alphabet = _alphabet_of(monomials)
    x, y = as_word(x, alphabet), as_word(y, alphabet)
    K = build_family(Empty(), alphabet)
    for m in monomials:
        if m.mode != "R":
            raise MonomialError(f"Monomial {m} is not in R mode")
        last = m.sets[-1]
        i = 0
        while i < len(y) and y[i] in last:
            i += 1
        z, t = y[:i], y[i:]
        part = concat_words(x, m.dfa(), t)
        truncated = build_family(
            Monomial(m.sets[:-1] + (frozenset(),), m.letters), alphabet
        )
        ordered = [a for a in alphabet if a in last]
        for v in iter_words(ordered, len(z) - 1):
            part = bool_op("difference", part, concat_words(x, truncated, v + t))
        K = bool_op("union", K, part)
    logger.debug("R witness has %d states", K.states)
    return _verify(monomials_language(monomials), K, x, y, "R")


def l_witness(
    monomials: Sequence[RMonomial], x: Sequence[str], y: Sequence[str]
) -> Dfa:
    """The mirror of :func:`r_witness` for L-normal monomials: ``x = t z``
    with ``z`` the longest suffix of x in ``A₀*``.

    :raises MonomialError: when a monomial is not in L mode.
    """
    alphabet = _alphabet_of(monomials)
    x, y = as_word(x, alphabet), as_word(y, alphabet)
    for m in monomials:
        if m.mode != "L":
            raise MonomialError(f"Monomial {m} is not in L mode")
    mirrored = r_witness([m.mirror() for m in monomials], y[::-1], x[::-1])
    return _verify(monomials_language(monomials), reverse(mirrored), x, y, "L")


@dataclass(frozen=True, eq=False)
class SubwordProfile:
    """The automaton whose state after reading w is the set of subwords of w
    of length at most k. ``profiles[q]`` is the subword set of state q."""

    alphabet: tuple[str, ...]
    k: int
    dfa: Dfa
    profiles: tuple[frozenset[Word], ...]

    def state_of(self, w: Sequence[str]) -> int:
        return self.dfa.run(self.dfa.initial, w)

    def profile_of(self, w: Sequence[str]) -> frozenset[Word]:
        return self.profiles[self.state_of(w)]


def simon_profile(
    alphabet: Sequence[str], k: int, max_states: int | None = None
) -> SubwordProfile:
    """Builds the reachable profile automaton; two words reach the same state
    iff they have the same subwords of length at most k.

    :param max_states: state cap; defaults to the value of the environment
        variable ``LIJOIN_PROFILE_STATE_CAP``, or 1,000,000.
    :raises CapExceededError: when the cap is exceeded.
    """
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    alphabet = tuple(alphabet)
    if max_states is None:
        max_states = env_int(PROFILE_CAP_VARIABLE, DEFAULT_PROFILE_STATE_CAP)

    def follow(state: frozenset[Word], symbol: str) -> frozenset[Word]:
        return state | {u + (symbol,) for u in state if len(u) < k}

    states, rows = explore(alphabet, frozenset({()}), follow, max_states)
    logger.debug("Profile automaton for k=%d has %d states", k, len(states))
    return SubwordProfile(
        alphabet=alphabet,
        k=k,
        dfa=make_dfa(alphabet, rows, 0, []),
        profiles=tuple(states),
    )


def _reachable_pairs(d1: Dfa, d2: Dfa) -> list[tuple[int, int]]:
    def follow(state: tuple[int, int], symbol: str) -> tuple[int, int]:
        p, q = state
        return d1.run(p, (symbol,)), d2.run(q, (symbol,))

    states, _ = explore(d1.alphabet, (d1.initial, d2.initial), follow)
    return states


def j_witness(L: Dfa, k: int, x: Sequence[str], y: Sequence[str]) -> Dfa:
    """Builds K as the union of the ``~_m``-classes of the words ``x w y``,
    ``w ∈ L``, where ``m = |xy| + k``.

    :raises NotPiecewiseTestableError: when L is not a union of
        ``~_k``-classes.
    :raises ConsistencyError: when the result fails verification.
    """
    x, y = as_word(x, L.alphabet), as_word(y, L.alphabet)
    L = minimize(L)
    level = simon_profile(L.alphabet, k)
    verdicts: dict[int, bool] = {}
    for p, q in _reachable_pairs(level.dfa, L):
        accepted = q in L.finals
        if verdicts.setdefault(p, accepted) != accepted:
            raise NotPiecewiseTestableError(
                f"Language is not piecewise-testable at level {k}"
            )
    m = len(x) + len(y) + k
    profile = simon_profile(L.alphabet, m)
    wrapped = concat_words(x, L, y)
    pairs = _reachable_pairs(profile.dfa, wrapped)
    finals = {p for p, q in pairs if q in wrapped.finals}
    K = minimize(make_dfa(L.alphabet, profile.dfa.delta, 0, finals))
    logger.debug("J witness uses %d of %d profiles", len(finals), profile.dfa.states)
    return _verify(L, K, x, y, "J")


def group_witness(L: Dfa, x: Sequence[str], y: Sequence[str]) -> Dfa:
    """``K = η⁻¹(η(x) η(L) η(y))`` for η the syntactic stamp of L.

    :raises NotAGroupError: when the syntactic monoid of L is not a group.
    """
    x, y = as_word(x, L.alphabet), as_word(y, L.alphabet)
    s = syntactic_stamp(L)
    if not is_group(s.monoid):
        raise NotAGroupError(
            f"Syntactic monoid (size {s.monoid.size}) is not a group"
        )
    assert s.accepting is not None
    M = s.monoid
    ex, ey = eval_word(s, x), eval_word(s, y)
    target = {M.mul(M.mul(ex, m), ey) for m in s.accepting}
    return _verify(L, language_of(s, target), x, y, "Group")


@dataclass(frozen=True)
class J1Row:
    k: int
    l: int  # noqa: E741
    refuted_at: tuple[Word, Word]
    distinguishing: tuple[Word, Word]


@dataclass(frozen=True)
class J1Report:
    """Reproduction of the failure of the criterion for J1 on
    ``L = Σ*bΣ*``, ``x = b``, ``y = ε``."""

    candidate_count: int
    rows: tuple[J1Row, ...]
    structural: bool
    equational: bool

    @property
    def essentially_j1(self) -> bool:
        return self.structural and self.equational

    def to_dict(self) -> dict[str, Any]:
        return {
            "language": "Σ*bΣ*",
            "x": "b",
            "y": "",
            "candidate_count": self.candidate_count,
            "refutations": [
                {
                    "k": row.k,
                    "l": row.l,
                    "u": "".join(row.refuted_at[0]),
                    "v": "".join(row.refuted_at[1]),
                    "distinguishing": ["".join(w) for w in row.distinguishing],
                }
                for row in self.rows
            ],
            "bSbS_essentially_J1": {
                "structural": self.structural,
                "equational": self.equational,
            },
        }

    def render(self) -> str:
        lines = [
            "L = Σ*bΣ* over {a,b}, x = b, y = ε",
            f"{self.candidate_count} candidate languages K (Boolean combinations"
            " of Σ*aΣ* and Σ*bΣ*)",
        ]
        for row in self.rows:
            u, v = row.refuted_at
            w1, w2 = row.distinguishing
            lines.append(
                f"k={row.k} l={row.l}: refuted at u={format_word(u)}"
                f" v={format_word(v)}: {format_word(w1)} ∉ u⁻¹Lv⁻¹,"
                f" {format_word(w2)} ∈ u⁻¹Lv⁻¹, and no K separates them"
            )
        verdict = "is" if self.essentially_j1 else "is not"
        lines.append(
            f"bΣ*bΣ* {verdict} essentially-J1 (structural: {self.structural},"
            f" equational: {self.equational})"
        )
        return "\n".join(lines)


def j1_candidates(alphabet: Sequence[str] = ("a", "b")) -> list[Dfa]:
    """The 16 Boolean combinations of ``Σ*aΣ*`` and ``Σ*bΣ*``, as unions of
    the four atoms, deduplicated by equivalence."""
    alphabet = tuple(alphabet)
    has_a = build_family(Subword(("a",)), alphabet)
    has_b = build_family(Subword(("b",)), alphabet)
    no_a = bool_op("complement", has_a)
    no_b = bool_op("complement", has_b)
    atoms = [
        bool_op("intersection", no_a, no_b),
        bool_op("intersection", has_a, no_b),
        bool_op("intersection", no_a, has_b),
        bool_op("intersection", has_a, has_b),
    ]
    candidates: dict[Any, Dfa] = {}
    for mask in range(16):
        K = build_family(Empty(), alphabet)
        for i, atom in enumerate(atoms):
            if mask >> i & 1:
                K = bool_op("union", K, atom)
        candidates.setdefault(K.key(), K)
    if len(candidates) != 16:
        warnings.warn(
            f"Only {len(candidates)} distinct candidate languages", stacklevel=2
        )
    return list(candidates.values())


def j1_counterexample_report(max_length: int = 3) -> J1Report:
    """Runs the bounded criterion check for J1 for all ``k, l <= max_length``
    and certifies that ``bΣ*bΣ*`` is essentially-J1.

    :raises ConsistencyError: when a candidate unexpectedly works, the
        refutation differs from ``(a^k, a^l)`` with the pair ``(a, ab)``, or
        ``bΣ*bΣ*`` is not found essentially-J1.
    """
    alphabet = ("a", "b")
    L = build_family(Subword(("b",)), alphabet)
    x: Word = ("b",)
    y: Word = ()
    candidates = j1_candidates(alphabet)
    a, ab = ("a",), ("a", "b")
    rows = []
    for k in range(max_length + 1):
        for l in range(max_length + 1):  # noqa: E741
            result: CriterionResult = bounded_criterion_check(L, x, y, k, l, candidates)
            expected = (("a",) * k, ("a",) * l)
            if result.found or result.refuted_at != expected:
                raise ConsistencyError(
                    f"J1 criterion check at k={k}, l={l}: {result.describe()}"
                )
            u, v = expected
            if L.accepts(u + a + v) or not L.accepts(u + ab + v):
                raise ConsistencyError("(a, ab) does not distinguish u⁻¹Lv⁻¹")
            for K in candidates:
                if K.accepts(x + u + a + v + y) != K.accepts(x + u + ab + v + y):
                    raise ConsistencyError(f"Candidate {K!r} separates a and ab")
            rows.append(J1Row(k, l, expected, (a, ab)))

    bSbS = concat_words(x, L, y)
    s = syntactic_stamp(bSbS)
    basis = builtin_basis("J1")
    structural = is_essentially_v_structural(s, basis)
    equational = is_essentially_v_equational(s, basis)
    if not (structural and equational):
        raise ConsistencyError(
            f"bΣ*bΣ* not essentially-J1: structural={structural},"
            f" equational={equational}"
        )
    return J1Report(
        candidate_count=len(candidates),
        rows=tuple(rows),
        structural=structural,
        equational=equational,
    )


def monomials_from_dict(data: dict[str, Any]) -> list[RMonomial]:
    """Reads ``{"alphabet": [...], "monomials": [{"sets": [...], "letters":
    [...]}], "mode": "R"}``."""
    mode = data.get("mode", "R")
    if mode not in ("R", "L"):
        raise InvalidInputError(f"Monomial mode must be 'R' or 'L', got {mode!r}")
    try:
        alphabet = tuple(str(a) for a in data["alphabet"])
        raw = data["monomials"]
        result = [
            RMonomial(
                alphabet,
                tuple(frozenset(str(a) for a in A) for A in item["sets"]),
                tuple(str(a) for a in item["letters"]),
                mode,
            )
            for item in raw
        ]
    except (KeyError, TypeError) as e:
        raise InvalidInputError(f"Malformed monomial JSON: {e}") from e
    return result


def monomials_to_dict(monomials: Iterable[RMonomial]) -> dict[str, Any]:
    monomials = list(monomials)
    alphabet = _alphabet_of(monomials)
    return {
        "alphabet": list(alphabet),
        "monomials": [
            {
                "sets": [[a for a in alphabet if a in A] for A in m.sets],
                "letters": list(m.letters),
            }
            for m in monomials
        ],
        "mode": monomials[0].mode,
    }


def witness_report(L: Dfa, K: Dfa, x: Word, y: Word) -> dict[str, Any]:
    return {
        "x": format_word(x, L.alphabet),
        "y": format_word(y, L.alphabet),
        "states": K.states,
        "dfa": dfa_to_dict(K),
        "verified": equivalent(word_quotient(K, x, y), L),
    }
