"""Write the canonical distributions, GHZ and built-in protocols as JSON files.

    python -m secmono.fixtures [DIR]      # default: ./fixtures
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from . import canonical, io, locc, quantum
from .probdist import tensor, uniform


def fixture_objects() -> dict:
    objs = {
        "p2ab.json": canonical.p2("AB"),
        "p2ac.json": canonical.p2("AC"),
        "p2bc.json": canonical.p2("BC"),
        "p3.json": canonical.p3(),
        "px.json": canonical.px(),
        "p3p3.json": tensor(canonical.p3(), canonical.p3()),
        "pxpx.json": tensor(canonical.px(), canonical.px()),
        "product.json": uniform(canonical.LABELS, (2, 2, 2)),
        "ghz.json": quantum.ghz(3),
        "product_state.json": quantum.PureState.from_arrays(
            canonical.LABELS, (2, 2, 2), np.eye(8, dtype=complex)[0]
        ),
    }
    for p in locc.builtin_protocols():
        objs[f"protocols/{p.name}.json"] = p
    return objs


def write_fixtures(directory) -> list[Path]:
    directory = Path(directory)
    written = []
    for name, obj in fixture_objects().items():
        path = directory / name
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(obj, locc.Protocol):
            io.dump_protocol(obj, path)
        elif isinstance(obj, (quantum.PureState, quantum.DensityMatrix)):
            io.dump_state(obj, path)
        else:
            io.dump_distribution(obj, path)
        written.append(path)
    return written


if __name__ == "__main__":
    for path in write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "fixtures"):
        print(path)
