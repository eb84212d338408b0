"""JSON text formats for distributions, protocols and quantum states.

Distribution::

    {"parties": ["A","B","C"], "cardinalities": [2,2,2],
     "entries": [{"outcome": [0,0,0], "p": 0.5}, {"outcome": [1,1,1], "p": 0.5}]}

Omitted outcomes have probability 0.  Protocol::

    {"name": "px_to_p2", "steps": [
        {"kind": "announce", "party": "C", "channel": {"in": 2, "out": 2, "kernel": [[1,0],[0,1]]}},
        {"kind": "local_channel", "party": "B", "channel": {...},
         "when": [{"transcript": [1], "channel": {...}}]},
        {"kind": "forget", "party": "C"}]}

``when`` is optional: it overrides the channel for branches whose transcript
of announced values matches.  Density matrix::

    {"parties": [...], "dims": [...], "matrix": [[[re, im], ...], ...]}

and a pure state carries ``"amplitudes": [[re, im], ...]`` instead of
``"matrix"``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .locc import Protocol, ProtocolStep
from .probdist import DistributionError, JointDistribution, StochasticChannel
from .quantum import DensityMatrix, PureState, StateError


class FormatError(ValueError):
    """Malformed JSON document."""


def _load(source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def _num(x: float):
    # integers stay integers so fixtures read naturally
    return int(x) if float(x).is_integer() else float(x)


# ---------------------------------------------------------------------------
# distributions


def distribution_to_dict(dist: JointDistribution) -> dict:
    return {
        "parties": list(dist.labels),
        "cardinalities": list(dist.cardinalities),
        "entries": [{"outcome": list(o), "p": p} for o, p in dist.support()],
    }


def distribution_from_dict(doc: dict) -> JointDistribution:
    try:
        entries = [(e["outcome"], float(e["p"])) for e in doc["entries"]]
        return JointDistribution.from_entries(doc["parties"], doc["cardinalities"], entries)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed distribution document: {exc!r}") from exc


def load_distribution(source) -> JointDistribution:
    return distribution_from_dict(_load(source))


def dump_distribution(dist: JointDistribution, path=None) -> str:
    text = json.dumps(distribution_to_dict(dist))
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# ---------------------------------------------------------------------------
# protocols


def channel_to_dict(ch: StochasticChannel) -> dict:
    return {
        "in": ch.in_cardinality,
        "out": ch.out_cardinality,
        "kernel": [[_num(x) for x in row] for row in ch.kernel],
    }


def channel_from_dict(doc: dict) -> StochasticChannel:
    try:
        kernel = np.asarray(doc["kernel"], dtype=float)
        if kernel.shape != (doc["in"], doc["out"]):
            raise FormatError(f"kernel shape {kernel.shape} does not match in={doc['in']}, out={doc['out']}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed channel: {exc!r}") from exc
    return StochasticChannel(kernel)


def protocol_to_dict(protocol: Protocol) -> dict:
    steps = []
    for step in protocol.steps:
        doc = {"kind": step.kind, "party": step.party}
        if step.channel is not None:
            doc["channel"] = channel_to_dict(step.channel)
        if step.when:
            doc["when"] = [
                {"transcript": list(t), "channel": channel_to_dict(ch)} for t, ch in sorted(step.when.items())
            ]
        steps.append(doc)
    return {"name": protocol.name, "steps": steps}


def protocol_from_dict(doc: dict) -> Protocol:
    try:
        steps = []
        for s in doc["steps"]:
            ch = channel_from_dict(s["channel"]) if "channel" in s else None
            when = {tuple(w["transcript"]): channel_from_dict(w["channel"]) for w in s.get("when", [])}
            steps.append(ProtocolStep(s["kind"], s["party"], ch, when))
        return Protocol(doc["name"], tuple(steps))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed protocol document: {exc!r}") from exc


def load_protocol(source) -> Protocol:
    return protocol_from_dict(_load(source))


def dump_protocol(protocol: Protocol, path=None) -> str:
    text = json.dumps(protocol_to_dict(protocol))
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# ---------------------------------------------------------------------------
# quantum states


def _complex_list(a) -> list:
    a = np.asarray(a)
    if a.ndim == 0:
        return [_num(a.real), _num(a.imag)]
    return [_complex_list(x) for x in a]


def _complex_array(doc) -> np.ndarray:
    arr = np.asarray(doc, dtype=float)
    if arr.shape[-1] != 2:
        raise FormatError("complex numbers are [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(state: DensityMatrix | PureState) -> dict:
    doc = {"parties": list(state.labels), "dims": list(state.dims)}
    if isinstance(state, PureState):
        doc["amplitudes"] = _complex_list(state.amplitudes)
    else:
        doc["matrix"] = _complex_list(state.matrix)
    return doc


def state_from_dict(doc: dict) -> DensityMatrix | PureState:
    try:
        labels, dims = doc["parties"], doc["dims"]
        if "amplitudes" in doc:
            return PureState.from_arrays(labels, dims, _complex_array(doc["amplitudes"]))
        return DensityMatrix.from_arrays(labels, dims, _complex_array(doc["matrix"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"malformed state document: {exc!r}") from exc


def load_state(source) -> DensityMatrix | PureState:
    return state_from_dict(_load(source))


def dump_state(state, path=None) -> str:
    text = json.dumps(state_to_dict(state))
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


INPUT_ERRORS = (FormatError, DistributionError, StateError, OSError)
