"""Five-point ordinal scale shared by factor valuations, node states, and costs."""

from __future__ import annotations

import enum

import numpy as np


class Level(enum.IntEnum):
    """Ordinal rating from very_low to very_high, with numeric image value/4."""

    VERY_LOW = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3
    VERY_HIGH = 4

    @property
    def image(self) -> float:
        return self.value / 4.0

    def invert(self) -> "Level":
        """Mirror the scale: very_low <-> very_high, low <-> high."""
        return Level(4 - self.value)

    @classmethod
    def from_name(cls, name: str) -> "Level":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown ordinal level {name!r}") from None

    @property
    def label(self) -> str:
        return self.name.lower()


N_LEVELS = 5

# Numeric images of the five levels, index-aligned with Level values.
LEVEL_IMAGES = np.array([lv.image for lv in Level])

LEVEL_NAMES = tuple(lv.label for lv in Level)


class Scope(enum.Enum):
    """Which entity a factor characterizes."""

    PROJECT = "project"
    TASK = "task"
    SITE = "site"
    TASK_PAIR = "task_pair"
    SITE_PAIR = "site_pair"
    TASK_SITE = "task_site"


class Kind(enum.Enum):
    ORDINAL = "ordinal"
    BOOLEAN = "boolean"


def value_image(value) -> float:
    """Numeric image of a factor value; booleans map to the scale endpoints."""
    if isinstance(value, Level):
        return value.image
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    raise TypeError(f"not a factor value: {value!r}")


def value_level(value) -> Level:
    """Embed a factor value into the five-level scale."""
    if isinstance(value, Level):
        return value
    if isinstance(value, bool):
        return Level.VERY_HIGH if value else Level.VERY_LOW
    raise TypeError(f"not a factor value: {value!r}")
