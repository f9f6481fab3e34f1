"""Plain-text input formats and delimited output writers.

Formats
-------
Subshift file: first line the alphabet size k, then k lines of k
space-separated 0/1 entries.

Cocycle file: header ``k d`` (symbols, matrix dimension), then one line of
d*d row-major reals per symbol.  ``#`` starts a comment.

Flow spec (JSON): ``{"sft": <path>, "roof_depth": m, "roof": {"010": v}}``
with the subshift path resolved relative to the spec file.

Trig polynomial file: one line per mode, ``n_1 ... n_d re im``.

CSV output is written with 15 significant digits and \n line endings, so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .potentials import LocallyConstantFunction
from .sft import Sft
from .suspension import RoofFunction, SuspensionFlow


def _data_lines(path):
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def load_sft(path):
    """Read a transition matrix file into an Sft."""
    lines = list(_data_lines(path))
    if not lines:
        raise ValueError(f"{path}: empty subshift file")
    try:
        k = int(lines[0][1])
    except ValueError as exc:
        raise ValueError(f"{path}:{lines[0][0]}: expected the alphabet size") from exc
    if len(lines) != k + 1:
        raise ValueError(f"{path}: expected {k} matrix rows, found {len(lines) - 1}")
    rows = []
    for lineno, line in lines[1:]:
        entries = line.split()
        if len(entries) != k:
            raise ValueError(f"{path}:{lineno}: expected {k} entries")
        rows.append([int(v) for v in entries])
    return Sft(rows)


def save_sft(sft, path):
    lines = [str(sft.k)]
    lines += [" ".join(str(int(v)) for v in row) for row in sft.matrix]
    Path(path).write_text("\n".join(lines) + "\n")


def load_cocycle_matrices(path):
    """Read per-symbol matrices; returns (k, list of d x d arrays)."""
    lines = list(_data_lines(path))
    if not lines:
        raise ValueError(f"{path}: empty cocycle file")
    header = lines[0][1].split()
    if len(header) != 2:
        raise ValueError(f"{path}:{lines[0][0]}: header must be 'k d'")
    k, d = int(header[0]), int(header[1])
    if len(lines) != k + 1:
        raise ValueError(f"{path}: expected {k} matrix lines, found {len(lines) - 1}")
    matrices = []
    for lineno, line in lines[1:]:
        entries = [float(v) for v in line.split()]
        if len(entries) != d * d:
            raise ValueError(f"{path}:{lineno}: expected {d * d} reals")
        matrices.append(np.array(entries).reshape(d, d))
    return k, matrices


def _word_from_key(key):
    return tuple(int(ch) for ch in str(key))


def potential_from_dict(sft, spec):
    """Locally constant function from {"depth": m, "values": {"01": v}}."""
    depth = int(spec["depth"])
    values = {_word_from_key(k): float(v) for k, v in spec["values"].items()}
    return LocallyConstantFunction(sft, depth, values)


def potential_to_dict(f):
    return {
        "depth": f.depth,
        "values": {"".join(map(str, w)): v for w, v in sorted(f.values.items())},
    }


def load_flow_spec(path):
    """Read a flow spec file; returns (sft, SuspensionFlow)."""
    path = Path(path)
    spec = json.loads(path.read_text())
    for key in ("sft", "roof_depth", "roof"):
        if key not in spec:
            raise ValueError(f"{path}: flow spec misses key '{key}'")
    sft = load_sft(path.parent / spec["sft"])
    roof = RoofFunction(
        potential_from_dict(sft, {"depth": spec["roof_depth"], "values": spec["roof"]})
    )
    return sft, SuspensionFlow(sft, roof)


def load_trig_polynomial(path):
    from .embedding import TrigPolynomial

    coeffs = {}
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"{path}:{lineno}: expected 'n_1 .. n_d re im'")
        freq = tuple(int(v) for v in parts[:-2])
        coeffs[freq] = coeffs.get(freq, 0.0) + complex(float(parts[-2]), float(parts[-1]))
    return TrigPolynomial(coeffs)


def save_sampled_function(fn, path):
    """Write a sampled flow observable as (word, height, value) rows."""
    rows = []
    for word in sorted(fn.grids):
        heights, values = fn.grids[word]
        for h, v in zip(heights, values):
            rows.append(("".join(map(str, word)), h, v))
    write_csv(path, ("word", "height", "value"), rows)


def format_scalar(value):
    """Stable text form: 15 significant digits for floats."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.15g}"
    return str(value)


def write_csv(path, header, rows):
    """Deterministic CSV writer; same rows always give the same bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_scalar(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
