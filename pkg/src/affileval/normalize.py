"""Entity label normalization and fuzzy name matching.

Labels from OCR'd membership lists arrive with stray punctuation, parenthetical
asides, inconsistent spacing, and abbreviated words. ``normalize_label`` folds
those away while preserving case. ``entities_match`` and ``persons_match``
implement the deliberately-loose comparison used when deciding whether an
extracted tuple refers to the same person/club as a ground-truth tuple:

* exact equality after removing all spaces and punctuation, or
* both stripped forms longer than ``min_substring_len`` and one a substring
  of the other, or
* equality after expanding configured abbreviations.

Person comparison additionally checks honorific titles: when either side
starts with a known title the titles must agree (configurable).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .errors import EmptyAfterNormalization

DEFAULT_ABBREVIATIONS: Mapping[str, str] = MappingProxyType(
    {
        "Assn": "Association",
        "Byo": "Bulawayo",
        "St": "Saint",
        "Univ": "University",
    }
)

DEFAULT_TITLES: tuple[str, ...] = ("Mr", "Mrs", "Miss", "Rev", "Dr")

# Characters erased outright by normalize_label. Hyphens, apostrophes and
# ampersands are kept because they are name-internal.
_DROPPED_CHARS = ".,;:!?\"()"

_PARENTHETICAL = re.compile(r"\([^()]*\)")
_WHITESPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class NormalizationConfig:
    """Knobs for normalization and matching.

    ``abbreviation_map`` keys are matched per whitespace token, case
    insensitively; expansion values are inserted verbatim. ``strict_titles``
    makes a title on exactly one side a person mismatch (the default); when
    False titles are only compared if both sides carry one.
    """

    abbreviation_map: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_ABBREVIATIONS))
    title_list: tuple[str, ...] = DEFAULT_TITLES
    min_substring_len: int = 10
    strict_titles: bool = True

    def __post_init__(self) -> None:
        if self.min_substring_len < 1:
            raise ValueError("min_substring_len must be >= 1")
        folded: dict[str, str] = {}
        for key, value in self.abbreviation_map.items():
            if not key or not value:
                raise ValueError("abbreviation keys and expansions must be non-empty")
            fkey = key.casefold()
            if fkey in folded:
                raise ValueError(f"abbreviation key {key!r} duplicated after case-folding")
            folded[fkey] = value
        # An expansion containing another key would make normalize_label
        # non-idempotent, so reject it up front.
        for value in folded.values():
            for token in value.split():
                if token.casefold() in folded:
                    raise ValueError(
                        f"abbreviation expansion {value!r} contains the key {token!r}; "
                        "expansions must not re-trigger expansion"
                    )
        object.__setattr__(self, "_folded_abbrevs", folded)
        object.__setattr__(self, "_folded_titles", tuple(t.casefold() for t in self.title_list))

    # internal, populated in __post_init__
    _folded_abbrevs: Mapping[str, str] = field(init=False, repr=False, compare=False, default=None)
    _folded_titles: tuple[str, ...] = field(init=False, repr=False, compare=False, default=())


def exact_match_config() -> NormalizationConfig:
    """Config under which only exact (space/punctuation-blind) equality matches."""
    return NormalizationConfig(abbreviation_map={}, min_substring_len=10**9, strict_titles=True)


def _expand_tokens(label: str, cfg: NormalizationConfig) -> str:
    tokens = label.split()
    out = [cfg._folded_abbrevs.get(tok.casefold(), tok) for tok in tokens]
    return " ".join(out)


def normalize_label(label: str, cfg: NormalizationConfig | None = None) -> str:
    """Canonicalize one entity label.

    Applies NFC unicode normalization, removes balanced parenthetical groups
    with their contents, erases sentence punctuation, collapses runs of
    whitespace, and expands abbreviation tokens. Case is preserved. Raises
    :class:`EmptyAfterNormalization` when nothing survives.
    """
    cfg = cfg or NormalizationConfig()
    text = unicodedata.normalize("NFC", label)
    while True:
        stripped = _PARENTHETICAL.sub(" ", text)
        if stripped == text:
            break
        text = stripped
    text = text.translate({ord(ch): None for ch in _DROPPED_CHARS})
    text = _WHITESPACE.sub(" ", text).strip()
    text = _expand_tokens(text, cfg)
    if not text:
        raise EmptyAfterNormalization(f"label {label!r} is empty after normalization")
    return text


def _strip_for_match(label: str) -> str:
    """Drop every space and punctuation character; keep alphanumerics only."""
    return "".join(ch for ch in label if ch.isalnum())


def entities_match(a: str, b: str, cfg: NormalizationConfig | None = None) -> bool:
    """Decide whether two already-normalized entity labels refer to the same entity.

    Symmetric. True when the space/punctuation-stripped forms are equal, when
    both stripped forms exceed ``min_substring_len`` characters and one
    contains the other, or when expanding configured abbreviations makes the
    stripped forms equal.
    """
    cfg = cfg or NormalizationConfig()
    sa = _strip_for_match(a)
    sb = _strip_for_match(b)
    if sa == sb:
        return True
    n = cfg.min_substring_len
    if len(sa) > n and len(sb) > n and (sa in sb or sb in sa):
        return True
    ea = _strip_for_match(_expand_tokens(a, cfg))
    eb = _strip_for_match(_expand_tokens(b, cfg))
    return ea == eb


def split_title(label: str, cfg: NormalizationConfig | None = None) -> tuple[str | None, str]:
    """Split a person label into (title, remainder).

    The title is the first whitespace token when it case-insensitively equals
    an entry of ``title_list``; otherwise ``(None, label)``.
    """
    cfg = cfg or NormalizationConfig()
    head, _, rest = label.partition(" ")
    if head.casefold() in cfg._folded_titles and rest:
        return head, rest
    return None, label


def persons_match(a: str, b: str, cfg: NormalizationConfig | None = None) -> bool:
    """Decide whether two already-normalized person labels match.

    The non-title remainders must satisfy :func:`entities_match`. Title
    handling: with ``strict_titles`` (default) the two title tokens must be
    equal whenever either side carries one, so a title on exactly one side is
    a mismatch. With ``strict_titles=False`` titles are compared only when
    both sides carry one.
    """
    cfg = cfg or NormalizationConfig()
    title_a, rest_a = split_title(a, cfg)
    title_b, rest_b = split_title(b, cfg)
    if title_a is not None and title_b is not None:
        if title_a.casefold() != title_b.casefold():
            return False
    elif (title_a is None) != (title_b is None) and cfg.strict_titles:
        return False
    return entities_match(rest_a, rest_b, cfg)
