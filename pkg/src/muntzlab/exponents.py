"""Exponent sequences 0 = l0 < l1 < l2 < ... and the divergence test
sum 1/l_i that separates dense from non-dense Muntz systems."""

from __future__ import annotations

from dataclasses import dataclass, field

from muntzlab.errors import ConfigError

DENSITY_DIVERGES = "diverges"
DENSITY_CONVERGES = "converges"
DENSITY_UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ExponentSequence:
    """An exponent sequence: arithmetic(step), squares (i^2) or an
    explicit finite list.  Always starts at exponent 0.
    """

    kind: str  # "arithmetic" | "squares" | "explicit"
    step: float | None = None
    values: tuple[float, ...] | None = None
    description: str = ""

    def __post_init__(self):
        if self.kind == "arithmetic":
            if self.step is None or not self.step > 0:
                raise ConfigError("arithmetic sequence needs step > 0")
        elif self.kind == "squares":
            pass
        elif self.kind == "explicit":
            if not self.values:
                raise ConfigError("explicit sequence needs a non-empty list")
            vals = tuple(float(v) for v in self.values)
            if vals[0] != 0.0:
                raise ConfigError("first exponent must be exactly 0")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigError("exponents must be strictly increasing")
            object.__setattr__(self, "values", vals)
        else:
            raise ConfigError(f"unknown sequence kind {self.kind!r}")

    def exponent(self, i: int) -> float:
        if i < 0:
            raise ConfigError("index must be nonnegative")
        if self.kind == "arithmetic":
            return self.step * i
        if self.kind == "squares":
            return float(i * i)
        if i >= len(self.values):
            raise ConfigError(
                f"index {i} out of range for explicit sequence of length "
                f"{len(self.values)}"
            )
        return self.values[i]


def arithmetic(step: float, description: str = "") -> ExponentSequence:
    return ExponentSequence("arithmetic", step=float(step),
                            description=description or f"arithmetic({step})")


def squares(description: str = "") -> ExponentSequence:
    return ExponentSequence("squares", description=description or "squares")


def explicit(values, description: str = "") -> ExponentSequence:
    return ExponentSequence("explicit", values=tuple(float(v) for v in values),
                            description=description or "explicit")


def truncate(seq: ExponentSequence, n: int) -> list[float]:
    """Finite slice [l_0, ..., l_n] of the sequence."""
    if n < 0:
        raise ConfigError("n must be nonnegative")
    return [seq.exponent(i) for i in range(n + 1)]


def reciprocal_partial_sum(seq: ExponentSequence, n: int) -> float:
    """Partial sum sum_{i=1..n} 1/l_i (index 0 excluded: l_0 = 0)."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    return sum(1.0 / seq.exponent(i) for i in range(1, n + 1))


def classify_density(seq: ExponentSequence) -> str:
    """Tail behaviour of sum 1/l_i.  Density in C[0,1] holds exactly when
    the series diverges; a finite explicit list cannot decide a tail.
    """
    if seq.kind == "arithmetic":
        return DENSITY_DIVERGES
    if seq.kind == "squares":
        return DENSITY_CONVERGES
    return DENSITY_UNDETERMINED


def sequence_to_json(seq: ExponentSequence) -> dict:
    if seq.kind == "arithmetic":
        kind = {"arithmetic": seq.step}
    elif seq.kind == "squares":
        kind = "squares"
    else:
        kind = {"explicit": list(seq.values)}
    return {"kind": kind, "label": seq.description}


def sequence_from_json(obj: dict) -> ExponentSequence:
    """Parse {"kind": "squares" | {"arithmetic": a} | {"explicit": [..]},
    "label": "..."}."""
    if not isinstance(obj, dict):
        raise ConfigError("sequence descriptor must be an object")
    unknown = set(obj) - {"kind", "label"}
    if unknown:
        raise ConfigError(f"unknown sequence fields: {sorted(unknown)}")
    kind = obj.get("kind")
    label = obj.get("label", "")
    if kind == "squares":
        return squares(label)
    if isinstance(kind, dict) and set(kind) == {"arithmetic"}:
        return arithmetic(kind["arithmetic"], label)
    if isinstance(kind, dict) and set(kind) == {"explicit"}:
        return explicit(kind["explicit"], label)
    raise ConfigError(f"unrecognized sequence kind: {kind!r}")
