import itertools

import numpy
import pytest

from lijoin.algebra import is_group
from lijoin.automata import (
    Dfa,
    Empty,
    ModCount,
    MonomialError,
    Prefix,
    Subword,
    bool_op,
    build_family,
    concat_words,
    equivalent,
    make_dfa,
    word_quotient,
)
from lijoin.constructions import (
    PROFILE_CAP_VARIABLE,
    NotAGroupError,
    NotPiecewiseTestableError,
    RMonomial,
    group_witness,
    j1_candidates,
    j1_counterexample_report,
    j_witness,
    l_witness,
    monomials_from_dict,
    monomials_language,
    monomials_to_dict,
    r_witness,
    simon_profile,
    witness_report,
)
from lijoin.identities import builtin_basis, monoid_satisfies
from lijoin.stamps import syntactic_stamp
from lijoin.utils import CapExceededError, InvalidInputError, Word, iter_words

AB = ("a", "b")
A_EVEN = make_dfa(("a",), [[1], [0]], 0, [0])
A_ODD = make_dfa(("a",), [[1], [0]], 0, [1])
HAS_B = build_family(Subword(("b",)), AB)
WITNESS_CASES = 60


def in_variety(d: Dfa, name: str) -> bool:
    M = syntactic_stamp(d).monoid
    return all(monoid_satisfies(M, i) for i in builtin_basis(name).identities)


def random_word(rng: numpy.random.Generator, max_length: int) -> Word:
    n = int(rng.integers(0, max_length + 1))
    return tuple(AB[int(i)] for i in rng.integers(0, len(AB), size=n))


def random_monomials(rng: numpy.random.Generator) -> list[RMonomial]:
    monomials: list[RMonomial] = []
    count = int(rng.integers(1, 3))
    while len(monomials) < count:
        k = int(rng.integers(0, 3))
        sets = tuple(
            frozenset(a for a in AB if rng.random() < 0.5) for _ in range(k + 1)
        )
        letters = tuple(AB[int(i)] for i in rng.integers(0, len(AB), size=k))
        try:
            monomials.append(RMonomial(AB, sets, letters, "R"))
        except MonomialError:
            continue
    return monomials


def subwords(w: Word, k: int) -> frozenset[Word]:
    return frozenset(
        tuple(w[i] for i in indices)
        for n in range(k + 1)
        for indices in itertools.combinations(range(len(w)), n)
    )


def test_r_witness_single_monomial() -> None:
    m = RMonomial(AB, (frozenset("b"), frozenset(AB)), ("a",))
    K = r_witness([m], ("b",), ())
    assert equivalent(K, concat_words(("b",), m.dfa(), ()))
    assert equivalent(word_quotient(K, ("b",), ()), m.dfa())


def test_r_witness_without_letters() -> None:
    m = RMonomial(AB, (frozenset("a"),), ())
    K = r_witness([m], (), ("a",))
    a_plus = concat_words(("a",), m.dfa(), ())
    assert equivalent(K, a_plus)
    assert equivalent(word_quotient(K, (), ("a",)), m.dfa())


def test_r_witness_empty_words() -> None:
    m = RMonomial(AB, (frozenset("a"), frozenset("b")), ("b",))
    assert equivalent(r_witness([m], (), ()), m.dfa())


def test_r_witness_requires_r_mode() -> None:
    m = RMonomial(AB, (frozenset(AB), frozenset("b")), ("a",), "L")
    with pytest.raises(MonomialError):
        r_witness([m], ("a",), ())


def test_monomial_rejects_foreign_letters() -> None:
    with pytest.raises(MonomialError, match="outside the alphabet"):
        RMonomial(AB, (frozenset("c"),), ())


def test_monomials_need_one_alphabet() -> None:
    with pytest.raises(InvalidInputError):
        monomials_language([])
    first = RMonomial(AB, (frozenset("a"),), ())
    other = RMonomial(("a",), (frozenset("a"),), ())
    with pytest.raises(InvalidInputError, match="share one alphabet"):
        monomials_language([first, other])


def test_monomial_str() -> None:
    m = RMonomial(AB, (frozenset("b"), frozenset(AB)), ("a",))
    assert str(m) == "{b}* a {a,b}*"
    assert str(m.mirror()) == "{a,b}* a {b}*"
    assert m.mirror().mode == "L"


def test_r_witness_random() -> None:
    rng = numpy.random.default_rng(3)
    for _ in range(WITNESS_CASES):
        monomials = random_monomials(rng)
        x, y = random_word(rng, 3), random_word(rng, 3)
        L = monomials_language(monomials)
        K = r_witness(monomials, x, y)
        assert equivalent(word_quotient(K, x, y), L)
        assert in_variety(K, "R")


def test_l_witness_example() -> None:
    m = RMonomial(AB, (frozenset(AB), frozenset("b")), ("a",), "L")
    K = l_witness([m], ("a",), ())
    assert equivalent(word_quotient(K, ("a",), ()), m.dfa())
    assert equivalent(l_witness([m], (), ()), m.dfa())


def test_l_witness_requires_l_mode() -> None:
    m = RMonomial(AB, (frozenset("b"), frozenset(AB)), ("a",))
    with pytest.raises(MonomialError):
        l_witness([m], (), ("a",))


def test_l_witness_random() -> None:
    rng = numpy.random.default_rng(4)
    for _ in range(WITNESS_CASES):
        monomials = [m.mirror() for m in random_monomials(rng)]
        x, y = random_word(rng, 3), random_word(rng, 3)
        K = l_witness(monomials, x, y)
        assert equivalent(word_quotient(K, x, y), monomials_language(monomials))
        assert in_variety(K, "L")


@pytest.mark.parametrize(
    "alphabet, k, states",
    [(AB, 0, 1), (AB, 1, 4), (("a",), 1, 2), (("a",), 2, 3)],
)
def test_simon_profile_size(alphabet: tuple[str, ...], k: int, states: int) -> None:
    assert simon_profile(alphabet, k).dfa.states == states


def test_simon_profile_contains_subwords() -> None:
    rng = numpy.random.default_rng(5)
    for k in range(4):
        profile = simon_profile(AB, k)
        for _ in range(100):
            w = random_word(rng, 8)
            assert profile.profile_of(w) == subwords(w, k)


def test_simon_profile_is_congruence() -> None:
    rng = numpy.random.default_rng(6)
    profile = simon_profile(AB, 2)
    table: dict[tuple[int, int], int] = {}
    for _ in range(500):
        w1, w2 = random_word(rng, 6), random_word(rng, 6)
        key = (profile.state_of(w1), profile.state_of(w2))
        state = profile.state_of(w1 + w2)
        assert table.setdefault(key, state) == state


def test_simon_profile_cap() -> None:
    with pytest.raises(CapExceededError) as info:
        simon_profile(AB, 3, max_states=5)
    assert info.value.cap == 5


def test_simon_profile_cap_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(PROFILE_CAP_VARIABLE, "3")
    with pytest.raises(CapExceededError):
        simon_profile(AB, 1)
    monkeypatch.setenv(PROFILE_CAP_VARIABLE, "many")
    with pytest.raises(InvalidInputError, match=PROFILE_CAP_VARIABLE):
        simon_profile(AB, 1)


def test_simon_profile_negative_level() -> None:
    with pytest.raises(InvalidInputError):
        simon_profile(AB, -1)


def test_j_witness_examples() -> None:
    assert equivalent(j_witness(HAS_B, 1, (), ()), HAS_B)
    K = j_witness(HAS_B, 1, ("a",), ())
    assert equivalent(word_quotient(K, ("a",), ()), HAS_B)
    # bab has no a-initial word with the same subwords of length 2
    outside = bool_op("difference", K, build_family(Subword(("a", "b")), AB))
    assert equivalent(outside, build_family(Empty(), AB))
    assert K.accepts(("a", "b"))
    assert not K.accepts(("b", "a", "b"))
    empty = build_family(Empty(), AB)
    assert equivalent(j_witness(empty, 0, ("b",), ("a",)), empty)


def test_j_witness_wrong_level() -> None:
    with pytest.raises(NotPiecewiseTestableError, match="level 1"):
        j_witness(build_family(Subword(("a", "b")), AB), 1, (), ())


def test_j_witness_random() -> None:
    rng = numpy.random.default_rng(7)
    level_two = [build_family(Subword(u), AB) for u in iter_words(AB, 2, 2)]
    languages = [(K, 1) for K in j1_candidates(AB)]
    for K1, K2 in itertools.combinations(level_two, 2):
        languages.append((bool_op("difference", K1, K2), 2))
    for i in range(WITNESS_CASES):
        L, k = languages[i % len(languages)]
        x = random_word(rng, 1)
        y = random_word(rng, 2 if k == 1 else 1)
        K = j_witness(L, k, x, y)
        assert equivalent(word_quotient(K, x, y), L)
        assert in_variety(K, "J")


def test_group_witness_examples() -> None:
    assert equivalent(group_witness(A_EVEN, ("a",), ()), A_ODD)
    assert equivalent(group_witness(A_EVEN, (), ()), A_EVEN)


def test_group_witness_requires_group() -> None:
    with pytest.raises(NotAGroupError):
        group_witness(build_family(Prefix(("a",)), AB), ("a",), ())


def test_group_witness_random() -> None:
    rng = numpy.random.default_rng(8)
    languages = [
        build_family(ModCount(frozenset(letters), modulus, frozenset({r})), AB)
        for letters in ("a", "b", "ab")
        for modulus in (2, 3)
        for r in range(modulus)
    ]
    for i in range(WITNESS_CASES):
        L = languages[i % len(languages)]
        x, y = random_word(rng, 4), random_word(rng, 4)
        K = group_witness(L, x, y)
        assert equivalent(word_quotient(K, x, y), L)
        M = syntactic_stamp(K).monoid
        assert is_group(M)
        assert M.size <= syntactic_stamp(L).monoid.size


def test_j1_candidates() -> None:
    candidates = j1_candidates()
    assert len(candidates) == 16
    assert len({K.key() for K in candidates}) == 16
    assert all(in_variety(K, "J1") for K in candidates)


def test_j1_counterexample_report() -> None:
    report = j1_counterexample_report()
    assert report.candidate_count == 16
    assert len(report.rows) == 16
    for row in report.rows:
        assert row.refuted_at == (("a",) * row.k, ("a",) * row.l)
        assert row.distinguishing == (("a",), ("a", "b"))
    assert report.essentially_j1
    assert "bΣ*bΣ* is essentially-J1" in report.render()


def test_j1_report_dict() -> None:
    data = j1_counterexample_report(max_length=1).to_dict()
    assert data["candidate_count"] == 16
    assert data["refutations"][0] == {
        "k": 0,
        "l": 0,
        "u": "",
        "v": "",
        "distinguishing": ["a", "ab"],
    }
    assert data["refutations"][-1]["u"] == "a"
    assert data["bSbS_essentially_J1"] == {"structural": True, "equational": True}


def test_monomials_json() -> None:
    data = {
        "alphabet": ["a", "b"],
        "monomials": [{"sets": [["b"], ["a", "b"]], "letters": ["a"]}],
        "mode": "R",
    }
    monomials = monomials_from_dict(data)
    assert monomials == [RMonomial(AB, (frozenset("b"), frozenset(AB)), ("a",))]
    assert monomials_to_dict(monomials) == data


@pytest.mark.parametrize(
    "data",
    [
        {"alphabet": ["a"], "monomials": [{"sets": [["a"]]}]},
        {"alphabet": ["a"], "monomials": [], "mode": "X"},
        {"monomials": []},
    ],
)
def test_monomials_json_malformed(data: dict[str, object]) -> None:
    with pytest.raises(InvalidInputError):
        monomials_from_dict(data)


def test_witness_report() -> None:
    K = group_witness(A_EVEN, ("a",), ())
    report = witness_report(A_EVEN, K, ("a",), ())
    assert report["x"] == "a"
    assert report["y"] == "ε"
    assert report["verified"] is True
    assert report["states"] == K.states
    assert set(report["dfa"]) == {"alphabet", "states", "initial", "finals", "delta"}
