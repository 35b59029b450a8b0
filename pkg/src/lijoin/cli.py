"""Command-line front end.

Every verb reads its inputs, runs one library operation chain and returns its
output in one piece. Exit codes: 0 decided or constructed, 1 negative
decision, 2 usage or input error, 3 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from typing import Any, Callable, Sequence, cast

import lijoin.decide
import lijoin.oracle
from lijoin.algebra import monoid_from_dict, monoid_to_dict
from lijoin.automata import (
    Dfa,
    build_family,
    dfa_from_dict,
    dfa_to_dict,
    minimize,
    parse_family,
    word_quotient,
)
from lijoin.constructions import (
    group_witness,
    j1_counterexample_report,
    j_witness,
    l_witness,
    monomials_from_dict,
    monomials_language,
    r_witness,
    witness_report,
)
from lijoin.export import export_verdicts
from lijoin.identities import (
    IdentityStatement,
    Mode,
    builtin_basis,
    eval_term,
    find_violation,
    monoid_satisfies,
    parse_identity,
    u_of_e,
)
from lijoin.stamps import (
    Stamp,
    eval_word,
    eventual_image,
    stamp_from_dict,
    stamp_to_dict,
    syntactic_stamp,
)
from lijoin.utils import (
    ConsistencyError,
    InvalidInputError,
    Word,
    format_word,
    parse_word,
)

__all__ = [
    "main",
    "run",
    "EXIT_OK",
    "EXIT_NEGATIVE",
    "EXIT_INPUT",
    "EXIT_CONSISTENCY",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CONSISTENCY = 3

# largest number of words an oracle cross-check may enumerate
VERIFY_WORD_BUDGET = 200_000

_WITNESS_BASES = {"r": "R", "l": "L", "j": "J", "group": "G"}


def _load(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise InvalidInputError(f"Cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path} must hold a JSON object")
    return data


def _load_dfa(path: str) -> Dfa:
    return dfa_from_dict(_load(path))


def _parse_alphabet(text: str) -> tuple[str, ...]:
    if "," in text:
        return tuple(a.strip() for a in text.split(",") if a.strip())
    return tuple(text)


def _dump(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2)


def _word_count(alphabet_size: int, max_length: int, min_length: int = 0) -> int:
    return sum(alphabet_size**n for n in range(min_length, max_length + 1))


def _within_budget(words: int, what: str) -> bool:
    if words > VERIFY_WORD_BUDGET:
        warnings.warn(
            f"Skipping the {what} cross-check: {words} words exceed the budget"
            f" of {VERIFY_WORD_BUDGET}",
            stacklevel=2,
        )
        return False
    return True


def _check_partition(
    classes: list[list[Word]], label: Callable[[Word], int], what: str
) -> None:
    """Each brute-force class must carry one label and distinct classes
    distinct labels."""
    seen: dict[int, int] = {}
    for i, words in enumerate(classes):
        labels = {label(w) for w in words}
        if len(labels) != 1:
            raise ConsistencyError(
                f"{what}: words {', '.join(format_word(w) for w in words[:4])}"
                " are equivalent by enumeration but not algebraically"
            )
        (value,) = labels
        if seen.setdefault(value, i) != i:
            raise ConsistencyError(
                f"{what}: {format_word(words[0])} and"
                f" {format_word(classes[seen[value]][0])} are distinguished by"
                " enumeration but not algebraically"
            )


def _verify_syntactic(d: Dfa, s: Stamp) -> None:
    d = minimize(d)
    n = d.states
    k = len(d.alphabet)
    if not _within_budget(_word_count(k, n) ** 2, "syntactic monoid"):
        return
    classes = lijoin.oracle.syntactic_classes_bruteforce(d, n, n)
    _check_partition(classes, lambda w: eval_word(s, w), "Syntactic monoid")
    logger.info("Syntactic monoid agrees with %d word classes", len(classes))


def _verify_stability(s: Stamp) -> None:
    ev = eventual_image(s)
    n = 2 * ev.stability_index + ev.period
    if not _within_budget(_word_count(len(s.alphabet), n), "eventual image"):
        return
    brute = lijoin.oracle.eventual_image_bruteforce(s, n)
    for i, A in enumerate(brute, 1):
        if A != ev.level(i):
            raise ConsistencyError(f"Level set {i} differs from enumeration")
    index = next(
        k for k in range(1, n // 2 + 1) if brute[2 * k - 1] == brute[k - 1]
    )
    if index != ev.stability_index:
        raise ConsistencyError(
            f"Stability index {ev.stability_index} but enumeration gives {index}"
        )


def _verify_essential(s: Stamp, eq: lijoin.decide.EssentialQuotient) -> None:
    ev = eventual_image(s)
    low = ev.stability_index
    high = max(low, ev.preperiod) + ev.period - 1
    n = min(s.monoid.size, 4)
    k = len(s.alphabet)
    if not _within_budget(
        _word_count(k, n) * _word_count(k, high, low), "essential congruence"
    ):
        return
    classes = lijoin.oracle.essential_classes_bruteforce(s, n, low, high)
    projection = eq.congruence.class_of
    _check_partition(
        classes, lambda w: int(projection[eval_word(s, w)]), "Essential congruence"
    )


def _verify_identity(
    s: Stamp,
    identity: IdentityStatement,
    mode: Mode,
    violation: dict[str, int] | None,
) -> None:
    M = s.monoid
    if violation is not None:
        if eval_term(M, identity.lhs, violation) == eval_term(
            M, identity.rhs, violation
        ):
            raise ConsistencyError(f"Reported violation of {identity} does not hold")
        return
    if not _within_budget(M.size ** len(identity.variables), "identity"):
        return
    if not lijoin.oracle.satisfies_bruteforce(s, identity, mode):
        raise ConsistencyError(f"Word substitution violates {identity}")


def _short_agreement(d1: Dfa, d2: Dfa, what: str) -> None:
    """Compares the automata on every word the budget allows, up to the length
    where agreement is conclusive."""
    bound = 2 * d1.states * d2.states
    n = 0
    while n < bound and _word_count(len(d1.alphabet), n + 1) <= VERIFY_WORD_BUDGET:
        n += 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        agree = lijoin.oracle.approx_equal(d1, d2, n)
    if not agree:
        raise ConsistencyError(f"{what} differs on a word of length at most {n}")


def _stamp_of(data: dict[str, Any]) -> Stamp | None:
    if "delta" in data:
        return syntactic_stamp(dfa_from_dict(data))
    if "monoid" in data:
        return stamp_from_dict(data)
    return None


def _names(s: Stamp, assignment: dict[str, int]) -> dict[str, str]:
    return {v: s.monoid.name(m) for v, m in assignment.items()}


def _synmon(args: argparse.Namespace) -> tuple[int, str]:
    d = _load_dfa(args.dfa)
    s = syntactic_stamp(d)
    if args.verify:
        _verify_syntactic(d, s)
    return EXIT_OK, _dump(stamp_to_dict(s))


def _stability(args: argparse.Namespace) -> tuple[int, str]:
    s = syntactic_stamp(_load_dfa(args.dfa))
    ev = eventual_image(s)
    if args.verify:
        _verify_stability(s)
    name = s.monoid.name
    if args.json:
        return EXIT_OK, _dump(
            {
                "stability_index": ev.stability_index,
                "preperiod": ev.preperiod,
                "period": ev.period,
                "level_sets": [sorted(name(m) for m in A) for A in ev.level_sets],
                "T": sorted(name(m) for m in ev.T),
            }
        )
    lines = [
        f"stability index: {ev.stability_index}",
        f"level sets repeat from {ev.preperiod} with period {ev.period}",
        f"T = {{{', '.join(sorted(name(m) for m in ev.T))}}}",
    ]
    return EXIT_OK, "\n".join(lines)


def _essquo(args: argparse.Namespace) -> tuple[int, str]:
    s = syntactic_stamp(_load_dfa(args.dfa))
    eq = lijoin.decide.essential_quotient(s)
    if args.verify:
        _verify_essential(s, eq)
    name = s.monoid.name
    return EXIT_OK, _dump(
        {
            "stability_index": eq.stability_index,
            "T": sorted(name(m) for m in eq.T),
            "classes": [[name(m) for m in c] for c in eq.congruence.classes()],
            "projection": eq.congruence.class_of.tolist(),
            "quotient": monoid_to_dict(eq.monoid),
            "letters": dict(eq.quotient_stamp.letter_image),
        }
    )


def _check_identity(args: argparse.Namespace) -> tuple[int, str]:
    identity = parse_identity(args.identity)
    mode = cast(Mode, args.mode)
    data = _load(args.input)
    s = _stamp_of(data)
    witness: dict[str, str] | None = None
    if s is None:
        if args.mode == "ne":
            raise InvalidInputError(
                "ne-satisfaction needs an automaton or a stamp, not a bare monoid"
            )
        satisfied = monoid_satisfies(monoid_from_dict(data), identity)
    else:
        violation = find_violation(s, identity, mode)
        if args.verify:
            _verify_identity(s, identity, mode, violation)
        satisfied = violation is None
        if violation is not None:
            witness = _names(s, violation)
    code = EXIT_OK if satisfied else EXIT_NEGATIVE
    if args.json:
        return code, _dump(
            {
                "identity": str(identity),
                "mode": args.mode,
                "satisfied": satisfied,
                "witness": witness,
            }
        )
    if satisfied:
        return code, f"{identity} holds ({args.mode})"
    text = f"{identity} fails ({args.mode})"
    if witness is not None:
        text += ": " + ", ".join(f"{v} = {m}" for v, m in witness.items())
    return code, text


def _variety(args: argparse.Namespace) -> tuple[int, str]:
    basis = builtin_basis(args.name)
    s = syntactic_stamp(_load_dfa(args.dfa))
    failed: tuple[IdentityStatement, dict[str, int]] | None = None
    for identity in basis.identities:
        violation = find_violation(s, identity, basis.mode)
        if args.verify:
            _verify_identity(s, identity, basis.mode, violation)
        if violation is not None:
            failed = identity, violation
            break
    code = EXIT_OK if failed is None else EXIT_NEGATIVE
    if args.json:
        result: dict[str, Any] = {
            "variety": args.name,
            "mode": basis.mode,
            "member": failed is None,
            "monoid_size": s.monoid.size,
        }
        if failed is not None:
            result["witness"] = {
                "identity": str(failed[0]),
                "assignment": _names(s, failed[1]),
            }
        return code, _dump(result)
    if failed is None:
        return code, f"syntactic monoid (size {s.monoid.size}) is in {args.name}"
    identity, violation = failed
    assigned = ", ".join(f"{v} = {m}" for v, m in _names(s, violation).items())
    return code, f"not in {args.name}: {identity} fails at {assigned}"


def _join_li(args: argparse.Namespace) -> tuple[int, str]:
    d = _load_dfa(args.dfa)
    verdict = lijoin.decide.in_join_with_li(d, args.name)
    if args.verify:
        s = syntactic_stamp(d)
        algebraic = lijoin.decide.is_locally_trivial(s)
        if algebraic != lijoin.oracle.is_locally_trivial_language(d):
            raise ConsistencyError("LI test disagrees with prefix-suffix enumeration")
        _verify_essential(s, lijoin.decide.essential_quotient(s))
    code = EXIT_OK if verdict.in_join else EXIT_NEGATIVE
    if args.json:
        return code, _dump(verdict.to_dict())
    relation = "∈" if verdict.in_join else "∉"
    lines = [f"L {relation} Lang({args.name} ∨ LI)"]
    lines.append(
        f"essential quotient of size {verdict.quotient_size},"
        f" stability index {verdict.stability_index}"
    )
    if verdict.asserted_only:
        lines.append(f"note: the criterion for {args.name} is asserted, not proved")
    if verdict.witness is not None:
        assigned = ", ".join(
            f"{v} = {m}" for v, m in verdict.witness["assignment"].items()
        )
        lines.append(f"{verdict.witness['identity']} fails at {assigned}")
    return code, "\n".join(lines)


def _uofe(args: argparse.Namespace) -> tuple[int, str]:
    wrapped = u_of_e(parse_identity(text) for text in args.identities)
    if args.json:
        return EXIT_OK, _dump({"identities": [str(i) for i in wrapped]})
    return EXIT_OK, "\n".join(str(i) for i in wrapped)


def _witness(args: argparse.Namespace) -> tuple[int, str]:
    data = _load(args.input)
    if args.kind in ("r", "l"):
        monomials = monomials_from_dict(data)
        L = monomials_language(monomials)
        x, y = parse_word(args.x, L.alphabet), parse_word(args.y, L.alphabet)
        build = r_witness if args.kind == "r" else l_witness
        K = build(monomials, x, y)
    else:
        L = dfa_from_dict(data)
        x, y = parse_word(args.x, L.alphabet), parse_word(args.y, L.alphabet)
        if args.kind == "j":
            if args.k is None:
                raise InvalidInputError("witness j needs --k")
            K = j_witness(L, args.k, x, y)
        else:
            K = group_witness(L, x, y)
    if args.verify:
        _short_agreement(word_quotient(K, x, y), L, "Witness quotient")
        basis = builtin_basis(_WITNESS_BASES[args.kind])
        stamp = syntactic_stamp(K)
        if not all(find_violation(stamp, i) is None for i in basis.identities):
            raise ConsistencyError(
                f"Witness leaves the variety {_WITNESS_BASES[args.kind]}"
            )
    return EXIT_OK, _dump(witness_report(L, K, x, y))


def _demo(args: argparse.Namespace) -> tuple[int, str]:
    report = j1_counterexample_report()
    if args.json:
        return EXIT_OK, _dump(report.to_dict())
    return EXIT_OK, report.render()


def _build(args: argparse.Namespace) -> tuple[int, str]:
    alphabet = _parse_alphabet(args.alphabet)
    raw = build_family(parse_family(args.family, alphabet), alphabet)
    d = minimize(raw)
    if args.verify:
        _short_agreement(raw, d, "Minimized automaton")
    return EXIT_OK, _dump(dfa_to_dict(d))


def _table(args: argparse.Namespace) -> tuple[int, str]:
    varieties = [v.strip() for v in args.varieties.split(",") if v.strip()]
    languages = {path: _load_dfa(path) for path in args.dfas}
    df = export_verdicts(languages, varieties, progress=args.progress)
    if args.json:
        return EXIT_OK, df.to_json(orient="records", force_ascii=False)
    return EXIT_OK, df.to_csv(index=False).rstrip("\n")


def _parser() -> argparse.ArgumentParser:
    # flags accepted both before and after the verb
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--verify",
        action="store_true",
        default=argparse.SUPPRESS,
        help="cross-check the result with brute-force oracles",
    )
    common.add_argument(
        "--json",
        action="store_true",
        default=argparse.SUPPRESS,
        help="machine-readable output",
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", default=argparse.SUPPRESS
    )

    parser = argparse.ArgumentParser(
        prog="lijoin",
        description="Decide membership of regular languages in V ∨ LI.",
        parents=[common],
    )
    parser.set_defaults(verify=False, json=False, verbose=False)
    verbs = parser.add_subparsers(dest="verb", required=True)

    def verb(
        name: str, handler: Callable[[argparse.Namespace], tuple[int, str]], doc: str
    ) -> argparse.ArgumentParser:
        sub = verbs.add_parser(name, parents=[common], help=doc, description=doc)
        sub.set_defaults(handler=handler)
        return sub

    verb("synmon", _synmon, "print the syntactic stamp").add_argument("dfa")
    verb("stability", _stability, "stability index and eventual image").add_argument(
        "dfa"
    )
    verb("essquo", _essquo, "essential quotient and projection").add_argument("dfa")

    sub = verb("check-identity", _check_identity, "check an identity")
    sub.add_argument("identity")
    sub.add_argument("input", help="automaton, stamp or monoid JSON")
    sub.add_argument("--mode", choices=["all", "ne"], default="all")

    sub = verb("variety", _variety, "check a builtin basis on the syntactic stamp")
    sub.add_argument("name")
    sub.add_argument("dfa")

    sub = verb("join-li", _join_li, "decide membership in Lang(V ∨ LI)")
    sub.add_argument("name")
    sub.add_argument("dfa")

    sub = verb("uofe", _uofe, "wrap identities into their essential form")
    sub.add_argument("identities", nargs="+")

    sub = verb("witness", _witness, "build a quotient witness K")
    sub.add_argument("kind", choices=sorted(_WITNESS_BASES))
    sub.add_argument("input", help="monomial JSON for r and l, automaton JSON else")
    sub.add_argument("--x", default="")
    sub.add_argument("--y", default="")
    sub.add_argument("--k", type=int, default=None)

    sub = verb("demo", _demo, "reproduce a worked counterexample")
    sub.add_argument("name", choices=["j1"])

    sub = verb("build", _build, "build an automaton from a family spec")
    sub.add_argument("family")
    sub.add_argument("--alphabet", default="ab")

    sub = verb("table", _table, "verdict table for several automata")
    sub.add_argument("varieties", help="comma-separated variety names")
    sub.add_argument("dfas", nargs="+")
    sub.add_argument("--progress", action="store_true")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Runs one command and returns its exit code and output."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (EXIT_OK if e.code == 0 else EXIT_INPUT), ""
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        code, output = args.handler(args)
    except ConsistencyError as e:
        print(f"lijoin: internal consistency failure: {e}", file=sys.stderr)
        return EXIT_CONSISTENCY, ""
    except InvalidInputError as e:
        print(f"lijoin: error: {e}", file=sys.stderr)
        return EXIT_INPUT, ""
    return code, output


def main(argv: Sequence[str] | None = None) -> int:
    code, output = run(argv)
    if output:
        print(output)
    return code
