"""Death-probability regimes: how the per-individual mortality depends on
the current state k and the initial state n.

Four parametric families plus an explicit table:

* ``Constant(c)``             -- fixed c in (0,1)
* ``InitialPower(a, gamma)``  -- c_n = a * n**-gamma, set by the initial state
* ``StatePower(a, gamma)``    -- c_k = a * k**-gamma, set by the current state
* ``JointPower(alpha, beta)`` -- c_{k,n} = k**alpha / n**beta, beta >= alpha
* ``Table(values)``           -- explicit (k, n) -> probability map

Regimes are immutable and serialize to a tagged-union JSON encoding with a
bit-exact round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Union

from . import kernels


class RegimeError(ValueError):
    """Invalid regime parameters or an out-of-range evaluation."""


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self) -> None:
        if not 0.0 < self.c < 1.0:
            raise RegimeError(f"constant mortality must lie in (0,1), got {self.c}")


@dataclass(frozen=True)
class InitialPower:
    """c_n = a * n**-gamma: mortality frozen at the start of each run."""

    a: float
    gamma: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.gamma <= 0:
            raise RegimeError(f"InitialPower needs a > 0 and gamma > 0, got {self}")


@dataclass(frozen=True)
class StatePower:
    """c_k = a * k**-gamma: mortality tracks the current population.

    One concrete instantiation of a state-dependent sequence; gamma > 2
    makes sum k*c_k finite, the hypothesis under which the single-drop
    path keeps positive probability forever.  Arbitrary sequences go
    through ``Table``.
    """

    a: float
    gamma: float

    def __post_init__(self) -> None:
        if self.a <= 0 or self.gamma <= 0:
            raise RegimeError(f"StatePower needs a > 0 and gamma > 0, got {self}")


@dataclass(frozen=True)
class JointPower:
    """c_{k,n} = k**alpha / n**beta; beta >= alpha keeps every value <= 1."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.alpha <= 0 or self.beta <= 0:
            raise RegimeError(f"JointPower needs alpha > 0 and beta > 0, got {self}")
        if self.beta < self.alpha:
            raise RegimeError(
                f"JointPower needs beta >= alpha so probabilities stay <= 1, got {self}"
            )


@dataclass(frozen=True)
class Table:
    """Explicit (k, n) -> probability map for custom experiments.

    The only regime allowed to assign probability 1 by construction.
    """

    values: Mapping[tuple[int, int], float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))
        for (k, n), p in self.values.items():
            if not (1 <= k <= n):
                raise RegimeError(f"table key ({k}, {n}) violates 1 <= k <= n")
            if not 0.0 < p <= 1.0:
                raise RegimeError(f"table probability at ({k}, {n}) must be in (0,1], got {p}")


MortalityRegime = Union[Constant, InitialPower, StatePower, JointPower, Table]


def mortality(regime: MortalityRegime, k: int, n: int) -> float:
    """Death probability applied to each individual at state k, start n."""
    if not 1 <= k <= n:
        raise RegimeError(f"state out of range: need 1 <= k <= n, got k={k}, n={n}")
    if isinstance(regime, Constant):
        return regime.c
    if isinstance(regime, InitialPower):
        value = regime.a * float(n) ** (-regime.gamma)
    elif isinstance(regime, StatePower):
        value = regime.a * float(k) ** (-regime.gamma)
    elif isinstance(regime, JointPower):
        value = float(k) ** regime.alpha / float(n) ** regime.beta
    elif isinstance(regime, Table):
        try:
            return regime.values[(k, n)]
        except KeyError:
            raise RegimeError(f"table regime has no entry for (k={k}, n={n})") from None
    else:
        raise RegimeError(f"unknown regime type: {type(regime).__name__}")
    if not value > 0.0:
        raise RegimeError(f"{regime} evaluates to {value} at (k={k}, n={n}); must be positive")
    if value > 1.0:
        raise RegimeError(f"{regime} evaluates to {value} > 1 at (k={k}, n={n})")
    return value


def mortality_vector(regime: MortalityRegime, n: int) -> list[float]:
    """Mortalities along the single-drop path: entry k-1 is c at state k."""
    return [mortality(regime, k, n) for k in range(1, n + 1)]


def min_mortality(regime: MortalityRegime, n: int) -> float:
    """Smallest mortality met on the way from n to 0 (sets censoring bounds)."""
    if isinstance(regime, Table):
        return min(p for (k, m), p in regime.values.items() if m == n and k <= n)
    if isinstance(regime, (Constant, InitialPower)):
        return mortality(regime, 1, n)
    # power-in-k families are monotone in k, so an endpoint attains the min
    return min(mortality(regime, 1, n), mortality(regime, n, n))


def kernel_code(regime: MortalityRegime) -> tuple[int, float, float]:
    """Encode a parametric regime for the numeric kernels."""
    if isinstance(regime, Constant):
        return kernels.CONSTANT, regime.c, 0.0
    if isinstance(regime, InitialPower):
        return kernels.INITIAL_POWER, regime.a, regime.gamma
    if isinstance(regime, StatePower):
        return kernels.STATE_POWER, regime.a, regime.gamma
    if isinstance(regime, JointPower):
        return kernels.JOINT_POWER, regime.alpha, regime.beta
    raise RegimeError(f"{type(regime).__name__} regimes have no kernel encoding")


def to_json(regime: MortalityRegime) -> str:
    """Tagged-union JSON encoding; floats round-trip bit-exactly."""
    if isinstance(regime, Constant):
        body: dict = {"type": "constant", "c": regime.c}
    elif isinstance(regime, InitialPower):
        body = {"type": "initial_power", "a": regime.a, "gamma": regime.gamma}
    elif isinstance(regime, StatePower):
        body = {"type": "state_power", "a": regime.a, "gamma": regime.gamma}
    elif isinstance(regime, JointPower):
        body = {"type": "joint_power", "alpha": regime.alpha, "beta": regime.beta}
    elif isinstance(regime, Table):
        triples = sorted([k, n, p] for (k, n), p in regime.values.items())
        body = {"type": "table", "values": triples}
    else:
        raise RegimeError(f"unknown regime type: {type(regime).__name__}")
    return json.dumps(body, sort_keys=True)


def from_dict(data: dict) -> MortalityRegime:
    """Decode the tagged-union dict form, rejecting unknown fields."""
    if not isinstance(data, dict):
        raise RegimeError(f"regime must be a JSON object, got {type(data).__name__}")
    tag = data.get("type")
    fields = {k: v for k, v in data.items() if k != "type"}
    expected = {
        "constant": {"c"},
        "initial_power": {"a", "gamma"},
        "state_power": {"a", "gamma"},
        "joint_power": {"alpha", "beta"},
        "table": {"values"},
    }
    if tag not in expected:
        raise RegimeError(f"unknown regime type tag: {tag!r}")
    unknown = set(fields) - expected[tag]
    if unknown:
        raise RegimeError(f"unknown field(s) for regime {tag!r}: {sorted(unknown)}")
    missing = expected[tag] - set(fields)
    if missing:
        raise RegimeError(f"missing field(s) for regime {tag!r}: {sorted(missing)}")
    for name, value in fields.items():
        if name != "values" and not isinstance(value, (int, float)):
            raise RegimeError(f"regime field {name!r} must be a number, got {value!r}")
    if tag == "constant":
        return Constant(float(fields["c"]))
    if tag == "initial_power":
        return InitialPower(float(fields["a"]), float(fields["gamma"]))
    if tag == "state_power":
        return StatePower(float(fields["a"]), float(fields["gamma"]))
    if tag == "joint_power":
        return JointPower(float(fields["alpha"]), float(fields["beta"]))
    triples = fields["values"]
    if not isinstance(triples, list):
        raise RegimeError("table regime field 'values' must be a list of [k, n, p] triples")
    values = {}
    for item in triples:
        if not (isinstance(item, list) and len(item) == 3):
            raise RegimeError(f"table entry must be a [k, n, p] triple, got {item!r}")
        k, n, p = item
        if not (isinstance(k, int) and isinstance(n, int)):
            raise RegimeError(f"table entry states must be integers, got {item!r}")
        values[(k, n)] = float(p)
    return Table(values)


def from_json(text: str) -> MortalityRegime:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegimeError(f"regime is not valid JSON: {exc}") from exc
    return from_dict(data)


def parse_inline(spec: str) -> MortalityRegime:
    """Parse the compact CLI form, e.g. ``constant:0.3`` or ``joint_power:1,4``."""
    name, _, arg_text = spec.partition(":")
    name = name.strip().lower().replace("-", "_")
    args = [a for a in arg_text.split(",") if a.strip()]
    try:
        values = [float(a) for a in args]
    except ValueError as exc:
        raise RegimeError(f"bad numeric argument in regime spec {spec!r}") from exc
    shapes = {
        "constant": (1, lambda v: Constant(v[0])),
        "initial_power": (2, lambda v: InitialPower(v[0], v[1])),
        "state_power": (2, lambda v: StatePower(v[0], v[1])),
        "joint_power": (2, lambda v: JointPower(v[0], v[1])),
    }
    if name not in shapes:
        raise RegimeError(
            f"unknown regime {name!r}; expected one of {sorted(shapes)} (table via JSON config)"
        )
    arity, build = shapes[name]
    if len(values) != arity:
        raise RegimeError(f"regime {name!r} takes {arity} parameter(s), got {len(values)}")
    return build(values)


def describe(regime: MortalityRegime) -> str:
    """Short human-readable form used in report labels."""
    if isinstance(regime, Constant):
        return f"c={regime.c:g}"
    if isinstance(regime, InitialPower):
        return f"c_n={regime.a:g}*n^-{regime.gamma:g}"
    if isinstance(regime, StatePower):
        return f"c_k={regime.a:g}*k^-{regime.gamma:g}"
    if isinstance(regime, JointPower):
        return f"c_kn=k^{regime.alpha:g}/n^{regime.beta:g}"
    return f"table[{len(regime.values)}]"
