"""Numerical tolerances shared by all modules.

Structural checks (Hermiticity, unitarity, trace) default to 1e-12 and
spectral checks (eigenvalue signs, eigen reconstructions) to 1e-10.  Use
:func:`tolerances` to override them for a block of code::

    with tolerances(spectral=1e-8):
        peres_test(rho, (2, 2))
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace
from typing import Iterator


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-12
    spectral: float = 1e-10
    # unitarity of user-supplied group elements is checked at this level
    unitary: float = 1e-10


_current: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "tomosep_tolerances", default=Tolerances()
)


def get_tolerances() -> Tolerances:
    return _current.get()


@contextlib.contextmanager
def tolerances(**overrides: float) -> Iterator[Tolerances]:
    """Temporarily override tolerance fields (context-local, thread safe)."""
    new = replace(_current.get(), **overrides)
    token = _current.set(new)
    try:
        yield new
    finally:
        _current.reset(token)
