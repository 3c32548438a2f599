"""Kernel selection: compiled engine when available, pure Python otherwise.

Both implementations export the same two functions with identical observable
behavior; `IBVKIT_PURE=1` forces the pure one (used by the differential test
and the benchmark).
"""

import os

if os.environ.get("IBVKIT_PURE"):
    from . import engine_py as engine

    ACTIVE = "pure"
else:
    try:
        from . import engine_cy as engine  # type: ignore[attr-defined]

        ACTIVE = "compiled"
    except ImportError:
        from . import engine_py as engine

        ACTIVE = "pure"

enumerate_premises = engine.enumerate_premises
subformula_positions = engine.subformula_positions
