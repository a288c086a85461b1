"""Whitelisted, range-certified hyperparameters for guided training.

Every entry carries its certified range and a per-update rate limit;
application order is clamp-to-range first, then rate-limit against the
current value, so no single directive can jump a parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError


@dataclass
class HyperparamEntry:
    """One tunable with its safety envelope.

    rate='mult' limits updates to [value/max_step, value*max_step] and
    requires a positive range; rate='abs' limits to value +/- max_step.
    kind='int' keeps the value integral (rounded after limiting).
    """

    name: str
    value: float
    lo: float
    hi: float
    kind: str = "float"
    rate: str = "mult"
    max_step: float = 2.0

    def __post_init__(self):
        if self.kind not in ("float", "int"):
            raise ConfigError(f"{self.name}: kind must be float or int, got {self.kind!r}")
        if self.rate not in ("mult", "abs"):
            raise ConfigError(f"{self.name}: rate must be mult or abs, got {self.rate!r}")
        if self.lo > self.hi:
            raise ConfigError(f"{self.name}: empty range [{self.lo}, {self.hi}]")
        if self.rate == "mult" and self.lo <= 0.0:
            raise ConfigError(f"{self.name}: multiplicative rate limit needs lo > 0")
        if self.rate == "mult" and self.max_step <= 1.0:
            raise ConfigError(f"{self.name}: multiplicative max_step must exceed 1")
        if self.rate == "abs" and self.max_step <= 0.0:
            raise ConfigError(f"{self.name}: absolute max_step must be positive")
        if not self.lo <= self.value <= self.hi:
            raise ConfigError(
                f"{self.name}: value {self.value} outside certified range "
                f"[{self.lo}, {self.hi}]"
            )
        if self.kind == "int" and self.value != int(self.value):
            raise ConfigError(f"{self.name}: integer entry has value {self.value}")

    def limited(self, proposed: float) -> tuple:
        """Clamp then rate-limit a proposal; returns (applied, flags)."""
        clamped = min(max(float(proposed), self.lo), self.hi)
        was_clamped = clamped != float(proposed)
        if self.rate == "mult":
            lo_r, hi_r = self.value / self.max_step, self.value * self.max_step
        else:
            lo_r, hi_r = self.value - self.max_step, self.value + self.max_step
        limited = min(max(clamped, lo_r), hi_r)
        was_limited = limited != clamped
        # rate window is centered on an in-range value, so stay in range too
        limited = min(max(limited, self.lo), self.hi)
        if self.kind == "int":
            limited = float(int(round(limited)))
            limited = min(max(limited, self.lo), self.hi)
        return limited, {"clamped": was_clamped, "rate_limited": was_limited}


class HyperparamSet:
    """Ordered collection of entries with snapshot/restore semantics."""

    def __init__(self, entries):
        self._entries = {}
        for e in entries:
            if e.name in self._entries:
                raise ConfigError(f"duplicate hyperparameter {e.name!r}")
            self._entries[e.name] = e

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def __getitem__(self, name: str) -> HyperparamEntry:
        return self._entries[name]

    def names(self):
        return list(self._entries)

    def entries(self):
        return list(self._entries.values())

    def get(self, name: str, default=None):
        e = self._entries.get(name)
        return e.value if e is not None else default

    def set_value(self, name: str, value: float) -> None:
        e = self._entries[name]
        if not e.lo <= value <= e.hi:
            raise ConfigError(f"{name}: {value} outside [{e.lo}, {e.hi}]")
        e.value = float(value)

    def snapshot(self) -> dict:
        return {name: e.value for name, e in self._entries.items()}

    def restore(self, snap: dict) -> None:
        unknown = set(snap) - set(self._entries)
        if unknown:
            raise ConfigError(f"snapshot names unknown entries: {sorted(unknown)}")
        for name, value in snap.items():
            self.set_value(name, value)

    def describe(self) -> list:
        """JSON-ready rows for the guider prompt."""
        return [
            {
                "name": e.name,
                "value": e.value,
                "range": [e.lo, e.hi],
                "rate": e.rate,
                "max_step": e.max_step,
                "kind": e.kind,
            }
            for e in self._entries.values()
        ]

    def __eq__(self, other):
        if not isinstance(other, HyperparamSet):
            return NotImplemented
        return self.describe() == other.describe()


def default_guided_set(n_quantiles: int = 16) -> HyperparamSet:
    """The whitelist used for guided distributional-critic training."""
    return HyperparamSet(
        [
            HyperparamEntry("learning_rate", 3e-4, 1e-5, 1e-2, rate="mult", max_step=2.0),
            HyperparamEntry("entropy_alpha", 0.05, 1e-3, 0.5, rate="mult", max_step=2.0),
            HyperparamEntry("tau", 0.01, 1e-3, 0.1, rate="mult", max_step=2.0),
            HyperparamEntry(
                "batch_size", 64, 16, 512, kind="int", rate="abs", max_step=64
            ),
            HyperparamEntry(
                "truncation_k", 2, 0, n_quantiles - 1, kind="int", rate="abs", max_step=1
            ),
            HyperparamEntry("exploration_decay", 0.7, 0.1, 1.0, rate="mult", max_step=2.0),
        ]
    )
