"""Look Up: the perturbation set of a token under the sound/spelling filter.

A token belongs to the result when it shares the query's phonetic key at
level k and its spelling sits within Levenshtein distance d.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import LevelMismatchError
from .index import PhoneticIndex, get_bucket
from .textcore import SoundexKey, encode, levenshtein, within_distance

__all__ = ["LookupParams", "Member", "PerturbationSet", "lookup", "perturbations_only"]


@dataclass(frozen=True)
class LookupParams:
    """Query-time knobs; spelling distance is case-insensitive by default."""

    k: int = 1
    d: int = 3
    case_sensitive: bool = False
    include_query: bool = True
    min_count: int = 1

    def __post_init__(self) -> None:
        if self.k < 0 or self.d < 0:
            raise LevelMismatchError(f"k and d must be >= 0 (k={self.k}, d={self.d})")
        if self.min_count < 1:
            raise LevelMismatchError(f"min_count must be >= 1, got {self.min_count}")


@dataclass(frozen=True)
class Member:
    raw: str
    count: int
    distance: int

    def as_dict(self) -> dict:
        return {"raw": self.raw, "count": self.count, "distance": self.distance}


@dataclass
class PerturbationSet:
    """Result of a lookup, ordered by count desc, distance asc, raw asc."""

    query: str
    key: SoundexKey
    members: list[Member] = field(default_factory=list)

    def raws(self) -> list[str]:
        return [m.raw for m in self.members]

    def as_dict(self) -> dict:
        return {
            "token": self.query,
            "key": self.key.text,
            "k": self.key.level,
            "members": [m.as_dict() for m in self.members],
        }


def lookup(index: PhoneticIndex, x: str, params: LookupParams | None = None) -> PerturbationSet:
    """All indexed tokens sharing x's key at level k within distance d.

    Raises EmptyTokenError when x canonicalizes to nothing, and
    LevelMismatchError when params.k is not the index's level.
    """
    params = params or LookupParams()
    if params.k != index.level:
        raise LevelMismatchError(f"params.k={params.k} but index level is {index.level}")
    key = encode(x, params.k, index.encoder)
    query_cmp = x if params.case_sensitive else x.casefold()
    members = []
    for entry in get_bucket(index, key):
        if entry.count < params.min_count:
            continue
        if not params.include_query and entry.raw == x:
            continue
        candidate_cmp = entry.raw if params.case_sensitive else entry.raw.casefold()
        if not within_distance(query_cmp, candidate_cmp, params.d):
            continue
        members.append(Member(raw=entry.raw, count=entry.count, distance=levenshtein(query_cmp, candidate_cmp)))
    members.sort(key=lambda m: (-m.count, m.distance, m.raw))
    return PerturbationSet(query=x, key=key, members=members)


def perturbations_only(index: PhoneticIndex, x: str, params: LookupParams | None = None) -> PerturbationSet:
    """Lookup minus the query itself (minus case variants of it when folding)."""
    params = replace(params or LookupParams(), include_query=False)
    result = lookup(index, x, params)
    if not params.case_sensitive:
        folded = x.casefold()
        result.members = [m for m in result.members if m.raw.casefold() != folded]
    return result
