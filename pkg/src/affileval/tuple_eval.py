"""Scoring extracted membership tuples against ground truth.

Matching is one-to-one and runs in two passes. Pass 1 pairs tuples whose
normalized person and club are exactly equal. Pass 2 walks the remaining
predicted tuples in input order and pairs each with the first remaining truth
tuple (in input order) whose person and club both pass the fuzzy comparison
rules from :mod:`affileval.normalize`. Once paired, both tuples leave the
pool, so a second near-duplicate prediction of the same truth tuple counts as
a false positive.

Greedy pass-2 pairing is not an assignment solver; tests compare it against a
maximum-matching oracle and report any gap.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyAfterNormalization, EmptyGroundTruth, MalformedTuple
from .graph import EdgeTuple
from .normalize import (
    NormalizationConfig,
    _expand_tokens,
    _strip_for_match,
    normalize_label,
    split_title,
)

# F1 score bins, highest first. The top bin includes a perfect 1.0.
BIN_LABELS: tuple[str, ...] = (
    "[0.92,1.00)",
    "[0.84,0.92)",
    "[0.76,0.84)",
    "[0.40,0.76)",
)
BELOW_RANGE = "below_0.40"
_BIN_LOWER = (0.92, 0.84, 0.76, 0.40)


def f1_bin(f1: float) -> str:
    """Map an F1 score in [0, 1] to its report bin label."""
    if math.isnan(f1) or f1 < 0.0 or f1 > 1.0:
        raise ValueError(f"f1 must be within [0, 1], got {f1!r}")
    for label, lower in zip(BIN_LABELS, _BIN_LOWER):
        if f1 >= lower:
            return label
    return BELOW_RANGE


@dataclass(frozen=True)
class EvalReport:
    """Outcome of matching predicted tuples against truth.

    Index lists refer to positions in the caller's (pre-deduplication) input
    sequences; duplicates beyond the first occurrence are dropped before
    matching and appear in none of the lists.
    """

    precision: float
    recall: float
    f1: float
    true_positives: int
    matched_pairs: tuple[tuple[int, int], ...]
    false_positives: tuple[int, ...]
    false_negatives: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "true_positives": self.true_positives,
            "matched_pairs": [list(p) for p in self.matched_pairs],
            "false_positives": list(self.false_positives),
            "false_negatives": list(self.false_negatives),
        }


@dataclass(frozen=True)
class _Side:
    """Precomputed comparison forms for one tuple (avoids re-stripping per pair)."""

    index: int
    person: str
    club: str
    member_relation: bool
    title: str | None
    person_strip: str
    person_exp: str
    club_strip: str
    club_exp: str
    exact_key: tuple[str, str]


def _prepare(
    tuples: Sequence[EdgeTuple],
    cfg: NormalizationConfig,
    require_member_relation: bool,
) -> list[_Side]:
    """Normalize, precompute match forms, and dedupe keeping first occurrences."""
    out: list[_Side] = []
    seen: set = set()
    for index, t in enumerate(tuples):
        if not t.person or not t.person.strip():
            raise MalformedTuple(index, "empty person field")
        if not t.club or not t.club.strip():
            raise MalformedTuple(index, "empty club field")
        try:
            person = normalize_label(t.person, cfg)
            club = normalize_label(t.club, cfg)
        except EmptyAfterNormalization as exc:
            raise MalformedTuple(index, str(exc)) from exc
        relation = (t.relation or "").strip().casefold()
        dedup_key = (person, club, relation) if require_member_relation else (person, club)
        if dedup_key in seen:
            continue
        seen.add(dedup_key)
        title, rest = split_title(person, cfg)
        out.append(
            _Side(
                index=index,
                person=person,
                club=club,
                member_relation=relation == "member",
                title=None if title is None else title.casefold(),
                person_strip=_strip_for_match(rest),
                person_exp=_strip_for_match(_expand_tokens(rest, cfg)),
                club_strip=_strip_for_match(club),
                club_exp=_strip_for_match(_expand_tokens(club, cfg)),
                exact_key=(person, club),
            )
        )
    return out


def _labels_compatible(sa: str, sb: str, ea: str, eb: str, min_len: int) -> bool:
    if sa == sb:
        return True
    if len(sa) > min_len and len(sb) > min_len and (sa in sb or sb in sa):
        return True
    return ea == eb


def _tuples_compatible(a: _Side, b: _Side, cfg: NormalizationConfig, require_member: bool) -> bool:
    if require_member and not (a.member_relation and b.member_relation):
        return False
    if a.title is not None and b.title is not None:
        if a.title != b.title:
            return False
    elif (a.title is None) != (b.title is None) and cfg.strict_titles:
        return False
    if not _labels_compatible(a.person_strip, b.person_strip, a.person_exp, b.person_exp, cfg.min_substring_len):
        return False
    return _labels_compatible(a.club_strip, b.club_strip, a.club_exp, b.club_exp, cfg.min_substring_len)


def evaluate_tuples(
    predicted: Sequence[EdgeTuple],
    truth: Sequence[EdgeTuple],
    cfg: NormalizationConfig | None = None,
    *,
    require_member_relation: bool = False,
) -> EvalReport:
    """Match ``predicted`` against ``truth`` and score precision/recall/F1.

    With ``require_member_relation`` the relation field must case-insensitively
    equal "member" on both sides of a match; by default it is ignored.
    Raises :class:`EmptyGroundTruth` when ``truth`` is empty.
    """
    if not truth:
        raise EmptyGroundTruth("ground truth tuple list is empty")
    cfg = cfg or NormalizationConfig()
    preds = _prepare(predicted, cfg, require_member_relation)
    truths = _prepare(truth, cfg, require_member_relation)

    matched: list[tuple[int, int]] = []
    truth_taken = [False] * len(truths)

    # Pass 1: exact normalized (person, club) equality.
    exact_index: dict[tuple, deque[int]] = {}
    for pos, t in enumerate(truths):
        if require_member_relation and not t.member_relation:
            continue
        exact_index.setdefault(t.exact_key, deque()).append(pos)
    pred_remaining: list[_Side] = []
    for p in preds:
        queue = exact_index.get(p.exact_key)
        if queue and not (require_member_relation and not p.member_relation):
            pos = queue.popleft()
            if not queue:
                del exact_index[p.exact_key]
            truth_taken[pos] = True
            matched.append((p.index, truths[pos].index))
        else:
            pred_remaining.append(p)

    # Pass 2: greedy fuzzy pairing in input order.
    for p in pred_remaining:
        for pos, t in enumerate(truths):
            if truth_taken[pos]:
                continue
            if _tuples_compatible(p, t, cfg, require_member_relation):
                truth_taken[pos] = True
                matched.append((p.index, t.index))
                break

    matched_pred = {pi for pi, _ in matched}
    false_positives = tuple(p.index for p in preds if p.index not in matched_pred)
    false_negatives = tuple(t.index for pos, t in enumerate(truths) if not truth_taken[pos])
    tp = len(matched)
    precision = tp / len(preds) if preds else 0.0
    recall = tp / len(truths)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        true_positives=tp,
        matched_pairs=tuple(sorted(matched)),
        false_positives=false_positives,
        false_negatives=false_negatives,
    )


def sample_false_positives(
    report: EvalReport, predicted: Sequence[EdgeTuple], n: int, seed: int
) -> list[EdgeTuple]:
    """Uniformly sample up to ``n`` false-positive tuples, without replacement.

    Deterministic for a given seed; returned in ascending input order.
    """
    fps = list(report.false_positives)
    if n >= len(fps):
        chosen = fps
    else:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        picked = rng.choice(len(fps), size=n, replace=False)
        chosen = sorted(fps[i] for i in picked)
    return [predicted[i] for i in chosen]
