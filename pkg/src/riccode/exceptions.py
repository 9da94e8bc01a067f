#!/usr/bin/env python3
"""
exceptions.py

Error types raised by riccode. All of them derive from builtin exceptions so
callers can keep catching ValueError / RuntimeError.
"""

from __future__ import annotations

from typing import Optional


class AlphabetError(ValueError):
    """A symbol outside 0..m-1, or an alphabet with fewer than two symbols."""


class IntervalError(ValueError):
    """Empty or out-of-range coding interval."""


class CodeFormatError(ValueError):
    """Malformed RIC1 file or a payload that cannot be decoded."""


class FormatError(ValueError):
    """Malformed text or JSON artifact."""

    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if source is not None:
            where = f"{source}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(f"{where}{message}")
        self.source = source
        self.line = line


class PGMFormatError(FormatError):
    """Malformed or unsupported PGM image."""


class SampleRangeError(ValueError):
    """A sample value falls outside the grid [t_0, t_R]."""

    def __init__(self, index: int, value: float, lo: float, hi: float):
        super().__init__(f"sample #{index} = {value!r} outside [{lo}, {hi}]")
        self.index = index
        self.value = value


class EnumerationLimitError(ValueError):
    """Exhaustive enumeration requested above its size guard."""


class ConvergenceError(RuntimeError):
    """Iterative computation did not converge within its budget."""
