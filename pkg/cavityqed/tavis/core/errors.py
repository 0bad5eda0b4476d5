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


class TavisError(Exception):
    """Base class for all simulator errors"""


class CutoffTooSmall(TavisError):
    def __init__(self, message, required_cutoff=None, tail_mass=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff
        self.tail_mass = tail_mass


class SpaceMismatch(TavisError):
    pass


class DiagonalizationFailure(TavisError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotCommuting(TavisError):
    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class OrderNegative(TavisError):
    pass


class CutoffMismatch(TavisError):
    pass


class ThresholdExceeded(TavisError):
    pass


class OffResonance(TavisError):
    pass


class TruncationInsufficient(TavisError):
    def __init__(self, message, tail_bound=None, tolerance=None):
        super().__init__(message)
        self.tail_bound = tail_bound
        self.tolerance = tolerance


class NormalizationMismatch(TavisError):
    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class DegenerateLevel(TavisError):
    def __init__(self, message, level=None, partners=()):
        super().__init__(message)
        self.level = level
        self.partners = tuple(partners)


class ConfigError(TavisError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "Invalid configuration")
