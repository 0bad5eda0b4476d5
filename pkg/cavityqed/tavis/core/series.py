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

import enum

import numpy as np


class Provenance(enum.Enum):
    EXACT = "exact"
    LEADING = "leading"
    CORRECTED = "corrected"
    CLOSED_FORM = "closed-form"


def time_grid(start, end, n_points, scale=1.0):
    """Uniform grid of n_points from start to end, divided by scale"""
    if n_points < 1:
        raise ValueError("Time grid point count out of range")
    if n_points > 1 and not end > start:
        raise ValueError("Time grid end must be after start")
    if scale <= 0:
        raise ValueError("Time grid scale out of range")
    return np.linspace(start, end, int(n_points))/scale


class TimeSeries:
    """Observable values on a time grid, tagged with how they were computed"""
    def __init__(self, times, records, provenance, metadata=None):
        times = np.array(times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("Time series needs a non-empty 1-D time array")
        if np.any(np.diff(times) <= 0):
            raise ValueError("Time series times must be strictly increasing")
        times.flags.writeable = False

        self.times = times
        self.provenance = Provenance(provenance)
        self.records = {}
        for name, values in records.items():
            values = np.array(values, dtype=float)
            if values.shape != times.shape:
                raise ValueError(f"Record {name!r} has {values.size} values for {times.size} times")
            values.flags.writeable = False
            self.records[name] = values
        self.metadata = dict(metadata or {})

    @property
    def observables(self):
        return list(self.records)

    @property
    def valid(self):
        return bool(self.metadata.get("valid", True))

    def qualified(self, name):
        return f"{name}.{self.provenance.value}"

    def columns(self):
        return {self.qualified(name): values for name, values in self.records.items()}

    def deviation(self, other, name, other_name=None):
        """Max absolute difference between one observable here and in another series"""
        if self.times.shape != other.times.shape or not np.allclose(self.times, other.times, rtol=0, atol=1e-12):
            raise ValueError("Time series are on different grids")
        return float(np.max(np.abs(self.records[name] - other.records[other_name or name])))

    def __getitem__(self, name):
        return self.records[name]

    def __len__(self):
        return self.times.size

    def __repr__(self):
        return (
            f"{type(self).__name__}(points={self.times.size}, "
            f"observables={self.observables!r}, "
            f"provenance={self.provenance.value!r})"
        )
