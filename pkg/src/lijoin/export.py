from __future__ import annotations

from typing import Hashable, Mapping, Sequence

import pandas

import lijoin.decide
from lijoin.automata import Dfa
from lijoin.identities import builtin_basis
from lijoin.stamps import Stamp
from lijoin.utils import CriterionError, progress_bar

__all__ = ["export_verdicts", "export_agreement"]


def export_verdicts(
    languages: Mapping[Hashable, Dfa],
    varieties: Sequence[str],
    progress: bool = False,
) -> pandas.DataFrame:
    """Decides join membership for every language and variety and exports
    the verdicts as a DataFrame with one row per pair and the columns
    "language", "variety", "in_join", "quotient_size", "stability_index" and
    "asserted_only". This format enables easy storage and inspection of
    corpus runs.

    :param languages: automata keyed by a label used in the "language" column.
    :param varieties: names accepted by :func:`lijoin.decide.in_join_with_li`.
    :param progress: show a progress bar.
    :raises CriterionError: when a variety is not supported, before any work
        is done.
    """
    unsupported = [v for v in varieties if v not in lijoin.decide.JOIN_VARIETIES]
    if unsupported:
        raise CriterionError(
            f"Join membership is not decidable here for {', '.join(unsupported)}"
        )

    rows = []
    total = len(languages) * len(varieties)
    bar = progress_bar(total, "verdicts") if progress else None
    for label, d in languages.items():
        for variety in varieties:
            verdict = lijoin.decide.in_join_with_li(d, variety)
            rows.append(
                {
                    "language": label,
                    "variety": variety,
                    "in_join": verdict.in_join,
                    "quotient_size": verdict.quotient_size,
                    "stability_index": verdict.stability_index,
                    "asserted_only": verdict.asserted_only,
                }
            )
            if bar is not None:
                bar.update(len(rows))
    if bar is not None:
        bar.finish()
    return pandas.DataFrame(
        rows,
        columns=[
            "language",
            "variety",
            "in_join",
            "quotient_size",
            "stability_index",
            "asserted_only",
        ],
    )


def export_agreement(
    stamps: Mapping[Hashable, Stamp],
    bases: Sequence[str],
    progress: bool = False,
) -> pandas.DataFrame:
    """Runs both essentially-V procedures on every stamp and basis. The
    DataFrame has the columns "stamp", "basis", "monoid_size",
    "quotient_size", "structural", "equational" and "agree"; disagreements
    are recorded, not raised.

    :param stamps: stamps keyed by a label used in the "stamp" column.
    :param bases: names accepted by :func:`lijoin.identities.builtin_basis`.
    """
    resolved = {name: builtin_basis(name) for name in bases}
    rows = []
    bar = progress_bar(len(stamps), "stamps") if progress else None
    for i, (label, s) in enumerate(stamps.items()):
        eq = lijoin.decide.essential_quotient(s)
        for name, basis in resolved.items():
            structural = lijoin.decide.is_essentially_v_structural(eq, basis)
            equational = lijoin.decide.is_essentially_v_equational(s, basis)
            rows.append(
                {
                    "stamp": label,
                    "basis": name,
                    "monoid_size": s.monoid.size,
                    "quotient_size": eq.monoid.size,
                    "structural": structural,
                    "equational": equational,
                    "agree": structural == equational,
                }
            )
        if bar is not None:
            bar.update(i + 1)
    if bar is not None:
        bar.finish()
    return pandas.DataFrame(
        rows,
        columns=[
            "stamp",
            "basis",
            "monoid_size",
            "quotient_size",
            "structural",
            "equational",
            "agree",
        ],
    )
