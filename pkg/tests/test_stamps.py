import numpy
import pytest

from lijoin.algebra import (
    DivisionVerdict,
    cyclic_group,
    divides,
    make_monoid,
    monogenic_monoid,
)
from lijoin.automata import (
    Dfa,
    Prefix,
    Single,
    Universal,
    build_family,
    equivalent,
    make_dfa,
    minimize,
)
from lijoin.oracle import eventual_image_bruteforce
from lijoin.stamps import (
    DEFAULT_MONOID_CAP,
    Stamp,
    eval_word,
    eventual_image,
    image_semigroup,
    language_of,
    level_sets,
    make_stamp,
    stability_index,
    stamp_from_dict,
    stamp_to_dict,
    syntactic_stamp,
)
from lijoin.utils import CapExceededError, InvalidInputError, format_word, iter_words
from tests.conftest import (
    CORPUS_DRAWS,
    CORPUS_MONOID_CAP,
    LARGE_CORPUS_SIZE,
    Corpus,
    Utilities,
)

AB = ("a", "b")
A_EVEN = make_dfa(("a",), [[1], [0]], 0, [0])
A_SIGMA = build_family(Prefix(("a",)), AB)

TRIVIAL = make_stamp(("a",), make_monoid([[0]], 0), {"a": 0})
PARITY = make_stamp(("a",), cyclic_group(2), {"a": 1})
# {1, m} with m² = m
IDEMPOTENT = make_stamp(("a",), monogenic_monoid(1, 1), {"a": 1})


def transition_monoid(d: Dfa) -> numpy.ndarray:
    """Multiplication table of the transition monoid of `d`, unminimized."""
    elements = [tuple(range(d.states))]
    i = 0
    while i < len(elements):
        for a in range(len(d.alphabet)):
            g = tuple(int(d.delta[q, a]) for q in elements[i])
            if g not in elements:
                elements.append(g)
        i += 1
    index = {e: k for k, e in enumerate(elements)}
    return numpy.array(
        [[index[tuple(g[q] for q in f)] for g in elements] for f in elements]
    )


def test_syntactic_stamp_universal() -> None:
    s = syntactic_stamp(build_family(Universal(), AB))
    assert s.monoid.size == 1
    assert s.accepting == {s.monoid.identity}


def test_syntactic_stamp_parity() -> None:
    s = syntactic_stamp(A_EVEN)
    assert s.monoid.size == 2
    assert s.monoid.identity == 0
    assert s.accepting == {0}
    assert s.monoid.mul(1, 1) == 0


def test_syntactic_stamp_prefix() -> None:
    s = syntactic_stamp(A_SIGMA)
    assert s.monoid.size == 3
    assert [s.monoid.name(m) for m in s.monoid.elements] == ["ε", "a", "b"]


def test_syntactic_stamp_recognizes(corpus: dict[str, Dfa]) -> None:
    for d in list(corpus.values())[:100]:
        s = syntactic_stamp(d)
        assert s.accepting is not None
        for w in [(), ("a",), ("b", "a"), ("a", "b", "b"), ("b", "b", "a", "a")]:
            assert d.accepts(w) == (eval_word(s, w) in s.accepting)


def test_eval_word() -> None:
    parity = syntactic_stamp(A_EVEN)
    assert eval_word(parity, ()) == parity.monoid.identity
    assert eval_word(parity, ("a", "a", "a")) == 1
    prefix = syntactic_stamp(A_SIGMA)
    assert eval_word(prefix, ("b", "a")) == eval_word(prefix, ("b",))


def test_eval_word_unknown_symbol() -> None:
    with pytest.raises(InvalidInputError):
        eval_word(PARITY, ("b",))


@pytest.mark.parametrize(
    "stamp, expected", [(TRIVIAL, 1), (PARITY, 2), (IDEMPOTENT, 1)]
)
def test_stability_index(stamp: Stamp, expected: int) -> None:
    assert stability_index(stamp) == expected


def test_eventual_image_examples() -> None:
    assert eventual_image(TRIVIAL).T == {0}
    ev = eventual_image(PARITY)
    assert ev.T == {0, 1}
    assert ev.level(2) == {0}
    assert ev.level(3) == {1}
    assert ev.period == 2
    prefix = syntactic_stamp(A_SIGMA)
    a, b = eval_word(prefix, ("a",)), eval_word(prefix, ("b",))
    assert eventual_image(prefix).T == {a, b}


def test_level_sets_repeat() -> None:
    sets, preperiod, period = level_sets(PARITY)
    assert sets == (frozenset({1}), frozenset({0}))
    assert (preperiod, period) == (1, 2)


def test_image_semigroup() -> None:
    assert image_semigroup(TRIVIAL) == {0}
    assert image_semigroup(PARITY) == {0, 1}
    assert image_semigroup(IDEMPOTENT) == {1}


def test_language_of() -> None:
    assert equivalent(language_of(PARITY, [0, 1]), make_dfa(("a",), [[0]], 0, [0]))
    assert equivalent(language_of(PARITY, [0]), A_EVEN)
    assert equivalent(language_of(PARITY, []), make_dfa(("a",), [[0]], 0, []))


def test_language_of_round_trip(corpus: dict[str, Dfa]) -> None:
    for d in corpus.values():
        s = syntactic_stamp(d)
        assert s.accepting is not None
        assert equivalent(language_of(s, s.accepting), d)


def test_eventual_image_properties(corpus_stamps: dict[str, Stamp]) -> None:
    for s in corpus_stamps.values():
        ev = eventual_image(s)
        M = s.monoid
        k = ev.stability_index
        A_s = ev.level(k)
        assert {M.mul(p, q) for p in A_s for q in A_s} == A_s
        first = ev.level(1)
        for n in range(1, 2 * k + ev.period + 1):
            following = {M.mul(p, q) for p in ev.level(n) for q in first}
            assert ev.level(n + 1) == following
        image = image_semigroup(s)
        assert {M.mul(t, m) for t in ev.T for m in image} <= ev.T
        assert {M.mul(m, t) for t in ev.T for m in image} <= ev.T


def test_eventual_image_against_enumeration(corpus_stamps: dict[str, Stamp]) -> None:
    checked = 0
    for s in corpus_stamps.values():
        ev = eventual_image(s)
        n = 2 * ev.stability_index + ev.period + ev.preperiod
        if n > 14:
            continue
        brute = eventual_image_bruteforce(s, n)
        assert all(A == ev.level(i) for i, A in enumerate(brute, 1))
        k = ev.stability_index
        assert brute[2 * k - 1] == brute[k - 1]
        assert all(brute[2 * j - 1] != brute[j - 1] for j in range(1, k))
        tail = range(k - 1, k - 1 + ev.period + ev.preperiod)
        assert frozenset[int]().union(*(brute[i] for i in tail)) == ev.T
        checked += 1
    assert checked >= 20


def test_syntactic_monoid_divides_transition_monoid() -> None:
    doubled = make_dfa(("a",), [[1], [2], [3], [0]], 0, [0, 2])
    cases = [
        doubled,
        make_dfa(AB, [[1, 2], [1, 1], [2, 2]], 0, [1]),
        make_dfa(AB, [[1, 0], [0, 1]], 0, [0, 1]),
    ]
    for d in cases:
        s = syntactic_stamp(d)
        full = make_monoid(transition_monoid(d), 0)
        assert full.size >= s.monoid.size
        assert divides(s.monoid, full) is DivisionVerdict.DIVIDES


def test_make_stamp_requires_surjectivity() -> None:
    with pytest.raises(InvalidInputError, match="do not generate"):
        make_stamp(("a",), cyclic_group(3), {"a": 0})


def test_make_stamp_requires_every_letter() -> None:
    with pytest.raises(InvalidInputError):
        make_stamp(AB, cyclic_group(2), {"a": 1})


def test_stamp_json_round_trip() -> None:
    s = syntactic_stamp(A_SIGMA)
    data = stamp_to_dict(s)
    assert set(data) == {"alphabet", "monoid", "letters", "accepting"}
    loaded = stamp_from_dict(data)
    assert loaded.monoid == s.monoid
    assert loaded.letter_image == s.letter_image
    assert loaded.accepting == s.accepting


def test_syntactic_stamp_large_monoid() -> None:
    d = make_dfa(AB, [[1, 2], [3, 1], [4, 4], [2, 3], [2, 0]], 0, [0, 1, 2])
    s = syntactic_stamp(d)
    assert s.monoid.size == 1105
    assert s.accepting is not None
    for w in iter_words(AB, 8):
        assert d.accepts(w) == (eval_word(s, w) in s.accepting)


def test_syntactic_stamp_cap() -> None:
    d = make_dfa(AB, [[1, 2], [3, 1], [4, 4], [2, 3], [2, 0]], 0, [0, 1, 2])
    with pytest.raises(CapExceededError) as info:
        syntactic_stamp(d, 1000)
    assert info.value.cap == 1000


def test_syntactic_stamp_multi_character_symbols() -> None:
    alphabet = ("a", "b", "ab")
    s = syntactic_stamp(build_family(Single(("a", "b")), alphabet))
    names = [s.monoid.name(m) for m in s.monoid.elements]
    assert len(set(names)) == s.monoid.size
    assert "a b" in names
    assert "ab" in names
    assert eval_word(s, ("a", "b")) != eval_word(s, ("ab",))


@pytest.mark.parametrize(
    "w, alphabet, expected",
    [
        ((), AB, "ε"),
        (("a", "b"), AB, "ab"),
        (("a", "b"), ("a", "b", "ab"), "a b"),
        (("ab",), ("a", "b", "ab"), "ab"),
        (("a", "b"), None, "ab"),
        (("ab", "c"), None, "ab c"),
    ],
)
def test_format_word(
    w: tuple[str, ...], alphabet: tuple[str, ...] | None, expected: str
) -> None:
    assert format_word(w, alphabet) == expected


def test_corpus_accounts_for_every_draw(
    corpus_sweep: Corpus, corpus_stamps: dict[str, Stamp]
) -> None:
    handcrafted = {minimize(d).key() for d in Utilities.handcrafted().values()}
    kept = len(corpus_sweep.languages) + len(corpus_sweep.large)
    skipped = corpus_sweep.over_cap + corpus_sweep.duplicates
    assert kept + skipped == CORPUS_DRAWS + len(handcrafted)
    assert max(s.monoid.size for s in corpus_stamps.values()) <= CORPUS_MONOID_CAP
    assert len(corpus_sweep.large) == LARGE_CORPUS_SIZE
    assert corpus_sweep.over_cap > 0
    for d in corpus_sweep.large.values():
        size = syntactic_stamp(d).monoid.size
        assert CORPUS_MONOID_CAP < size <= DEFAULT_MONOID_CAP
