"""Three-valued check outcomes shared by the analysis layer and the oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class TraceWitness:
    """A finite input trace exhibiting a violation, replayable by simulation."""

    input_names: tuple[str, ...]
    steps: tuple[tuple, ...]
    step: Optional[int] = None
    outputs: Optional[tuple[tuple, ...]] = None
    note: str = ""

    def slot(self, name: str) -> tuple:
        i = self.input_names.index(name)
        return tuple(s[i] for s in self.steps)


@dataclass(frozen=True)
class LassoWitness:
    """An ultimately periodic input assignment exhibiting a violation."""

    words: tuple[tuple[str, tuple, tuple], ...]  # (name, stem, loop)
    note: str = ""


Witness = Union[TraceWitness, LassoWitness]


@dataclass(frozen=True)
class Proven:
    note: str = ""

    def label(self) -> str:
        return "Proven"


@dataclass(frozen=True)
class Refuted:
    witness: Optional[Witness] = None
    horizon: Optional[int] = None
    note: str = ""

    def label(self) -> str:
        return "Refuted"


@dataclass(frozen=True)
class Unknown:
    reason: str = ""

    def label(self) -> str:
        return "Unknown"


CheckResult = Union[Proven, Refuted, Unknown]
