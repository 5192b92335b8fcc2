"""Two-slice discrete causal networks.

A network has an input slice (the state at t-1) and an output slice (the
state at t). Every output node carries a dense conditional probability
table with one row per full input state. Rows are ordered mixed-radix with
the first-listed input as the least significant digit.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import NetworkError

TOL = 1e-9

INPUT = "input"
OUTPUT = "output"
SLICES = (INPUT, OUTPUT)


@dataclass(frozen=True)
class Variable:
    """A discrete variable with named states."""

    name: str
    states: tuple = ("0", "1")

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        object.__setattr__(self, "states", states)
        if not self.name:
            raise NetworkError("variable name must be nonempty")
        if len(states) < 2:
            raise NetworkError(f"variable {self.name!r} needs at least 2 states")
        if len(set(states)) != len(states):
            raise NetworkError(f"variable {self.name!r} has duplicate state labels")

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def state_index(self, label) -> int:
        """Index of a state given its label (or an int index)."""
        if isinstance(label, (int, np.integer)) and not isinstance(label, bool):
            if 0 <= label < self.cardinality:
                return int(label)
            raise NetworkError(f"state {label} out of range for {self.name!r}")
        try:
            return self.states.index(str(label))
        except ValueError:
            raise NetworkError(
                f"unknown state {label!r} for {self.name!r}; "
                f"expected one of {list(self.states)}"
            ) from None


def encode_state(values: Sequence[int], cards: Sequence[int]) -> int:
    """Mixed-radix index of a state, first variable least significant."""
    if len(values) != len(cards):
        raise IndexError("state length does not match the number of variables")
    index, radix = 0, 1
    for v, c in zip(values, cards):
        if not 0 <= v < c:
            raise IndexError(f"state value {v} out of range for cardinality {c}")
        index += int(v) * radix
        radix *= c
    return index


def decode_state(index: int, cards: Sequence[int]) -> tuple:
    """Inverse of :func:`encode_state`."""
    if not 0 <= index < math.prod(cards):
        raise IndexError(f"state index {index} out of range")
    values = []
    for c in cards:
        index, v = divmod(index, c)
        values.append(v)
    return tuple(values)


def all_states(cards: Sequence[int]):
    """Iterate over every state tuple in mixed-radix order."""
    for values in itertools.product(*(range(c) for c in reversed(cards))):
        yield tuple(reversed(values))


class Transition(NamedTuple):
    """An observed pair of full states: ``before`` (inputs), ``after`` (outputs)."""

    before: tuple
    after: tuple


@dataclass(frozen=True)
class Occurrence:
    """A subset of one slice's variables held in their actual states."""

    slice: str
    members: tuple = ()
    states: tuple = ()

    def __post_init__(self):
        if self.slice not in SLICES:
            raise ValueError(f"slice must be one of {SLICES}, got {self.slice!r}")
        if len(self.members) != len(self.states):
            raise ValueError("members and states differ in length")
        order = sorted(range(len(self.members)), key=lambda i: self.members[i])
        object.__setattr__(self, "members", tuple(int(self.members[i]) for i in order))
        object.__setattr__(self, "states", tuple(int(self.states[i]) for i in order))
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate occurrence members")

    @classmethod
    def of(cls, transition: Transition, slice: str, members: Iterable[int]):
        """The occurrence over ``members`` with states taken from a transition."""
        full = transition.before if slice == INPUT else transition.after
        members = sorted(members)
        return cls(slice, tuple(members), tuple(full[m] for m in members))

    @property
    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << i
        return m

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True, eq=False)
class CausalNetwork:
    """Immutable two-slice network.

    ``cpts[i]`` has shape ``(n_input_states, outputs[i].cardinality)``.
    ``background`` records inputs that were pinned away, as (name, label) pairs.
    """

    inputs: tuple
    outputs: tuple
    cpts: tuple
    background: tuple = field(default=())

    def __post_init__(self):
        inputs = tuple(self.inputs)
        outputs = tuple(self.outputs)
        for label, variables in (("input", inputs), ("output", outputs)):
            names = [v.name for v in variables]
            if len(set(names)) != len(names):
                raise NetworkError(f"duplicate {label} variable names")
        if not outputs:
            raise NetworkError("a network needs at least one output")
        if len(self.cpts) != len(outputs):
            raise NetworkError("one CPT per output node is required")
        rows = math.prod(v.cardinality for v in inputs)
        cpts = []
        for var, table in zip(outputs, self.cpts):
            # column-major so the per-input tensor view below needs no copy
            arr = np.array(table, dtype=float, order="F")
            if arr.shape != (rows, var.cardinality):
                raise NetworkError(
                    f"CPT for {var.name!r} has shape {arr.shape}, "
                    f"expected {(rows, var.cardinality)}"
                )
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise NetworkError(f"CPT for {var.name!r} has invalid entries")
            sums = arr.sum(axis=1)
            if np.any(np.abs(sums - 1) > TOL):
                bad = int(np.argmax(np.abs(sums - 1)))
                raise NetworkError(
                    f"CPT row {bad} for {var.name!r} sums to {sums[bad]!r}, not 1"
                )
            arr.setflags(write=False)
            cpts.append(arr)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "cpts", tuple(cpts))
        object.__setattr__(
            self, "background", tuple((str(k), str(v)) for k, v in self.background)
        )

    @property
    def input_cards(self) -> tuple:
        return tuple(v.cardinality for v in self.inputs)

    @property
    def output_cards(self) -> tuple:
        return tuple(v.cardinality for v in self.outputs)

    @property
    def n_input_states(self) -> int:
        return math.prod(self.input_cards)

    @cached_property
    def tensors(self) -> tuple:
        """CPTs reshaped to ``(*input_cards, card_i)``, one axis per input."""
        out = []
        for arr in self.cpts:
            t = arr.reshape(self.input_cards + (arr.shape[1],), order="F")
            out.append(t)
        return tuple(out)

    def variables(self, slice: str) -> tuple:
        return self.inputs if slice == INPUT else self.outputs

    def index(self, slice: str, name: str) -> int:
        for i, v in enumerate(self.variables(slice)):
            if v.name == name:
                return i
        raise NetworkError(f"no {slice} variable named {name!r}")

    def parse_state(self, slice: str, assignment: Mapping) -> dict:
        """Map ``{name: label}`` to ``{index: state index}``."""
        variables = self.variables(slice)
        out = {}
        for name, label in assignment.items():
            i = self.index(slice, name)
            out[i] = variables[i].state_index(label)
        return out

    def full_state(self, slice: str, assignment: Mapping) -> tuple:
        """A complete state tuple from a ``{name: label}`` mapping."""
        parsed = self.parse_state(slice, assignment)
        variables = self.variables(slice)
        missing = [v.name for i, v in enumerate(variables) if i not in parsed]
        if missing:
            raise NetworkError(f"missing {slice} values for {missing}")
        return tuple(parsed[i] for i in range(len(variables)))

    def labels(self, slice: str, members: Sequence[int], states: Sequence[int]) -> dict:
        variables = self.variables(slice)
        return {variables[m].name: variables[m].states[s] for m, s in zip(members, states)}

    def to_dict(self) -> dict:
        d = {
            "inputs": [{"name": v.name, "states": list(v.states)} for v in self.inputs],
            "outputs": [{"name": v.name, "states": list(v.states)} for v in self.outputs],
            "cpt": {v.name: arr.tolist() for v, arr in zip(self.outputs, self.cpts)},
        }
        if self.background:
            d["background"] = dict(self.background)
        return d


def _as_variable(spec) -> Variable:
    if isinstance(spec, Variable):
        return spec
    if isinstance(spec, str):
        return Variable(spec)
    if isinstance(spec, Mapping):
        try:
            return Variable(spec["name"], tuple(spec.get("states", ("0", "1"))))
        except KeyError:
            raise NetworkError("variable entry needs a 'name'") from None
    name, states = spec
    return Variable(name, tuple(states))


def build_network(spec: Mapping) -> CausalNetwork:
    """Build and validate a network from its JSON-style description.

    Background entries naming a current input are pinned on load; entries
    naming variables already absent are kept as a record only.
    """
    try:
        inputs = [_as_variable(v) for v in spec.get("inputs", [])]
        outputs = [_as_variable(v) for v in spec["outputs"]]
        cpt = spec["cpt"]
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network description: {exc}") from None
    if not isinstance(cpt, Mapping):
        raise NetworkError("'cpt' must map output names to tables")
    extra = set(cpt) - {v.name for v in outputs}
    if extra:
        raise NetworkError(f"CPT given for unknown outputs {sorted(extra)}")
    tables = []
    for v in outputs:
        if v.name not in cpt:
            raise NetworkError(f"missing CPT for output {v.name!r}")
        tables.append(cpt[v.name])
    background = dict(spec.get("background") or {})
    input_names = {v.name for v in inputs}
    to_pin = {k: lbl for k, lbl in background.items() if k in input_names}
    record = [(k, lbl) for k, lbl in background.items() if k not in input_names]
    net = CausalNetwork(tuple(inputs), tuple(outputs), tuple(tables), tuple(record))
    if to_pin:
        net = pin_background(net, to_pin)
    return net


def network_from_mechanisms(
    inputs: Sequence, outputs: Sequence, mechanisms: Mapping[str, Callable]
) -> CausalNetwork:
    """Tabulate a network from per-output mechanism functions.

    Each mechanism takes the input state tuple (state indices) and returns
    either an output state index (deterministic) or a probability vector.
    """
    inputs = [_as_variable(v) for v in inputs]
    outputs = [_as_variable(v) for v in outputs]
    cards = [v.cardinality for v in inputs]
    tables = []
    for var in outputs:
        fn = mechanisms[var.name]
        rows = []
        for state in all_states(cards):
            r = fn(state)
            if isinstance(r, (int, np.integer, bool)):
                row = [0.0] * var.cardinality
                row[int(r)] = 1.0
            else:
                row = [float(p) for p in r]
            rows.append(row)
        tables.append(rows)
    return CausalNetwork(tuple(inputs), tuple(outputs), tuple(tables))


def load_network(path) -> CausalNetwork:
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}: not valid JSON ({exc})") from None
    return build_network(spec)


def dump_network(net: CausalNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net.to_dict(), fh, indent=2)
        fh.write("\n")


def node_transition_prob(net: CausalNetwork, node: int, state: int, before: Sequence[int]) -> float:
    """p(output ``node`` = ``state`` | do(inputs = ``before``))."""
    if not 0 <= node < len(net.outputs):
        raise IndexError(f"output index {node} out of range")
    if not 0 <= state < net.outputs[node].cardinality:
        raise IndexError(f"state {state} out of range for {net.outputs[node].name!r}")
    row = encode_state(before, net.input_cards)
    return float(net.cpts[node][row, state])


def transition_prob(net: CausalNetwork, before: Sequence[int], after: Sequence[int]) -> float:
    """Probability of the full output state given the full input state."""
    if len(after) != len(net.outputs):
        raise IndexError("output state length does not match the network")
    row = encode_state(before, net.input_cards)
    p = 1.0
    for i, s in enumerate(after):
        if not 0 <= s < net.outputs[i].cardinality:
            raise IndexError(f"state {s} out of range for {net.outputs[i].name!r}")
        p *= float(net.cpts[i][row, s])
    return p


class Validation(NamedTuple):
    ok: bool
    probability: float

    def __bool__(self):
        return self.ok


def validate_transition(net: CausalNetwork, transition: Transition) -> Validation:
    """Check that a transition can actually happen (probability > 0)."""
    p = transition_prob(net, transition.before, transition.after)
    return Validation(p > 0.0, p)


def pin_background(net: CausalNetwork, assignments: Mapping) -> CausalNetwork:
    """Fix some inputs as background conditions and drop them from the network.

    ``assignments`` maps input names to a state label or index. The returned
    network's CPT rows are the original rows at the pinned values.
    """
    if not assignments:
        return net
    pinned = {}
    for name, label in assignments.items():
        try:
            i = net.index(INPUT, name)
        except NetworkError:
            raise NetworkError(f"cannot pin {name!r}: not an input variable") from None
        pinned[i] = net.inputs[i].state_index(label)
    keep = [i for i in range(len(net.inputs)) if i not in pinned]
    kept_cards = [net.inputs[i].cardinality for i in keep]
    rows = []
    for sub in all_states(kept_cards):
        full = [0] * len(net.inputs)
        for i, v in zip(keep, sub):
            full[i] = v
        for i, v in pinned.items():
            full[i] = v
        rows.append(encode_state(full, net.input_cards))
    rows = np.array(rows, dtype=int)
    record = list(net.background) + [
        (net.inputs[i].name, net.inputs[i].states[v]) for i, v in sorted(pinned.items())
    ]
    return CausalNetwork(
        tuple(net.inputs[i] for i in keep),
        net.outputs,
        tuple(arr[rows] for arr in net.cpts),
        tuple(record),
    )
