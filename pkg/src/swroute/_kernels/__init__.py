"""Kernel backend selection: compiled extension when built, pure otherwise.

Set ``SW_KERNEL=pure`` to force the fallback (used by the benchmark and by
the equivalence tests); ``SW_KERNEL=compiled`` raises if the extension is
missing instead of silently degrading.
"""

import os

from . import pure

BACKEND = "pure"
dp_solve = pure.dp_solve
fixed_points_best = pure.fixed_points_best
count_sequences = pure.count_sequences

_forced = os.environ.get("SW_KERNEL", "").strip().lower()
if _forced != "pure":
    try:
        from . import _fast

        BACKEND = "compiled"
        dp_solve = _fast.dp_solve
        fixed_points_best = _fast.fixed_points_best
        count_sequences = _fast.count_sequences
    except ImportError:
        if _forced == "compiled":
            raise

# the enumerating generator stays in Python either way: callers stream it
feasible_sequences = pure.feasible_sequences
dp_solve_with_table = pure.dp_solve_with_table
