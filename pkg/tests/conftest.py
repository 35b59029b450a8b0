import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy
import pytest

from lijoin.automata import (
    Dfa,
    InfixLI,
    ModCount,
    Monomial,
    Prefix,
    Subword,
    Suffix,
    bool_op,
    build_family,
    concat_words,
    make_dfa,
    minimize,
)
from lijoin.stamps import DEFAULT_MONOID_CAP, Stamp, syntactic_stamp
from lijoin.utils import CapExceededError

AB = ("a", "b")

# largest syntactic monoid in the main corpus; bigger ones go to the large
# corpus, up to LARGE_CORPUS_SIZE of them and DEFAULT_MONOID_CAP elements
CORPUS_MONOID_CAP = 120
LARGE_CORPUS_SIZE = 8
MAX_CORPUS_STATES = 6
CORPUS_DRAWS = 3000


class Utilities:
    @staticmethod
    def random_dfa(
        rng: numpy.random.Generator, states: int, alphabet: tuple[str, ...] = AB
    ) -> Dfa:
        delta = rng.integers(0, states, size=(states, len(alphabet)))
        finals = [q for q in range(states) if rng.random() < 0.5]
        return make_dfa(alphabet, delta, 0, finals)

    @staticmethod
    def dfa(
        rows: list[list[int]], finals: list[int], alphabet: tuple[str, ...] = AB
    ) -> Dfa:
        return make_dfa(alphabet, rows, 0, finals)

    @staticmethod
    def handcrafted() -> dict[str, Dfa]:
        a_only_even = make_dfa(AB, [[1, 2], [0, 2], [2, 2]], 0, [0])
        ab_star = make_dfa(AB, [[1, 2], [2, 0], [2, 2]], 0, [0])
        has_b = build_family(Subword(("b",)), AB)
        return {
            "bSbS": concat_words(("b",), has_b, ()),
            "(aa)*": a_only_even,
            "(ab)*": ab_star,
            "even_a": build_family(ModCount(frozenset("a"), 2, frozenset({0})), AB),
            "a_mod3": build_family(ModCount(frozenset("a"), 3, frozenset({1})), AB),
            "even_length": build_family(ModCount(frozenset(AB), 2, frozenset({0})), AB),
            "aS": build_family(Prefix(("a",)), AB),
            "Sab": build_family(Suffix(("a", "b")), AB),
            "aSb": build_family(InfixLI((("a",),), (("b",),)), AB),
            "SaSbS": build_family(Subword(("a", "b")), AB),
            "SbS": has_b,
            "a*bS": build_family(
                Monomial((frozenset("a"), frozenset(AB)), ("b",), "R"), AB
            ),
            "Sba*": build_family(
                Monomial((frozenset(AB), frozenset("a")), ("b",), "L"), AB
            ),
            "SabS": make_dfa(AB, [[1, 0], [1, 2], [2, 2]], 0, [2]),
            "Sabba_suffix": build_family(Suffix(("a", "b", "b", "a")), AB),
            "a_and_not_b": bool_op(
                "difference", build_family(Subword(("a",)), AB), has_b
            ),
            "exactly_one_b": bool_op(
                "difference", has_b, build_family(Subword(("b", "b")), AB)
            ),
            "no_aa": make_dfa(AB, [[1, 0], [2, 0], [2, 2]], 0, [0, 1]),
            "aS_or_even": bool_op(
                "union",
                build_family(Prefix(("a",)), AB),
                build_family(ModCount(frozenset("b"), 2, frozenset({0})), AB),
            ),
            "empty": make_dfa(AB, [[0, 0]], 0, []),
        }

    @staticmethod
    def write_json(directory: Path, name: str, data: Any) -> str:
        path = directory / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)


@dataclass(frozen=True)
class Corpus:
    """Minimal automata with 1 to MAX_CORPUS_STATES states.

    Every draw lands in exactly one of `languages` (syntactic monoid of at most
    CORPUS_MONOID_CAP elements, handcrafted languages included), `large`
    (larger monoids, at most DEFAULT_MONOID_CAP elements), `over_cap` or
    `duplicates`.
    """

    languages: dict[str, Dfa]
    large: dict[str, Dfa]
    over_cap: int
    duplicates: int


def generate_corpus(draws: int = CORPUS_DRAWS, seed: int = 20) -> Corpus:
    rng = numpy.random.default_rng(seed)
    small: dict[Any, Dfa] = {}
    large: dict[Any, Dfa] = {}
    over_cap = duplicates = 0
    for d in Utilities.handcrafted().values():
        small.setdefault(minimize(d).key(), d)
    for _ in range(draws):
        states = int(rng.integers(1, MAX_CORPUS_STATES + 1))
        d = minimize(Utilities.random_dfa(rng, states))
        if d.key() in small or d.key() in large:
            duplicates += 1
            continue
        try:
            syntactic_stamp(d, CORPUS_MONOID_CAP)
        except CapExceededError:
            pass
        else:
            small[d.key()] = d
            continue
        if len(large) == LARGE_CORPUS_SIZE:
            over_cap += 1
            continue
        try:
            syntactic_stamp(d, DEFAULT_MONOID_CAP)
        except CapExceededError:
            over_cap += 1
            continue
        large[d.key()] = d
    return Corpus(
        languages={f"L{i}": d for i, d in enumerate(small.values())},
        large={f"X{i}": d for i, d in enumerate(large.values())},
        over_cap=over_cap,
        duplicates=duplicates,
    )


@pytest.fixture(scope="session")
def utilities() -> Utilities:
    return Utilities()


@pytest.fixture(scope="session")
def corpus_sweep() -> Corpus:
    return generate_corpus()


@pytest.fixture(scope="session")
def corpus(corpus_sweep: Corpus) -> dict[str, Dfa]:
    return corpus_sweep.languages


@pytest.fixture(scope="session")
def large_corpus(corpus_sweep: Corpus) -> dict[str, Dfa]:
    return corpus_sweep.large


@pytest.fixture(scope="session")
def corpus_stamps(corpus: dict[str, Dfa]) -> dict[str, Stamp]:
    return {name: syntactic_stamp(d) for name, d in corpus.items()}
