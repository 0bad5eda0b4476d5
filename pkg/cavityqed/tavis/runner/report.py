"""

Copyright (c) 2026 cavityqed-tavis developers

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in
all copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
THE SOFTWARE.

"""

import csv
import enum
import json
import logging
import os

import numpy as np

log = logging.getLogger("cavityqed.tavis.report")

FLOAT_FORMAT = ".17g"


def format_float(x):
    return format(float(x), FLOAT_FORMAT)


def split_column(name):
    """'n.exact' -> ('n', 'exact')"""
    obs, sep, provenance = name.partition(".")
    return obs, provenance


def summarize(columns):
    """Max-abs and RMS deviation between every pair of provenances of each observable"""
    groups = {}
    for name in columns:
        obs, provenance = split_column(name)
        if provenance:
            groups.setdefault(obs, []).append(name)

    summary = {}
    for obs, names in groups.items():
        for i, first in enumerate(names):
            for second in names[i+1:]:
                diff = np.asarray(columns[first], dtype=float) - np.asarray(columns[second], dtype=float)
                summary[f"{first} vs {second}"] = {
                    "max_abs": float(np.max(np.abs(diff))),
                    "rms": float(np.sqrt(np.mean(diff**2))),
                }
    return summary


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def dump_json(obj, f):
    json.dump(to_jsonable(obj), f, indent=2)
    f.write("\n")


def write_csv(result, directory):
    os.makedirs(directory, exist_ok=True)
    data_path = os.path.join(directory, f"{result.name}.csv")
    meta_path = os.path.join(directory, f"{result.name}.meta.json")

    names = list(result.columns)
    with open(data_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["t"] + names)
        for k, t in enumerate(result.times):
            w.writerow([format_float(t)] + [format_float(result.columns[n][k]) for n in names])

    with open(meta_path, "w") as f:
        dump_json({"metadata": result.metadata, "summary": result.summary}, f)

    log.info("Wrote %s and %s", data_path, meta_path)
    return [data_path, meta_path]


def write_json(result, directory):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{result.name}.json")
    columns = {"t": result.times}
    columns.update(result.columns)
    with open(path, "w") as f:
        dump_json({"columns": columns, "metadata": result.metadata, "summary": result.summary}, f)
    log.info("Wrote %s", path)
    return [path]


def write_result(result, directory, fmt="csv"):
    if fmt == "json":
        return write_json(result, directory)
    return write_csv(result, directory)


def read_table(path):
    """Return (times, columns) from a CSV or JSON data file"""
    if path.endswith(".json"):
        with open(path, "r") as f:
            doc = json.load(f)
        columns = dict(doc["columns"])
        times = np.array(columns.pop("t"), dtype=float)
        return times, {k: np.array(v, dtype=float) for k, v in columns.items()}

    with open(path, "r", newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    if not header or header[0] != "t":
        raise ValueError(f"{path}: first column must be 't'")
    data = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(len(body), len(header))
    return data[:, 0], {name: data[:, k] for k, name in enumerate(header) if k > 0}


def report(paths):
    """Recomputed deviation summaries, one per data file"""
    out = {}
    for path in paths:
        times, columns = read_table(path)
        out[path] = summarize(columns)
        log.debug("%s: %d rows, %d columns", path, times.size, len(columns))
    return out
