"""Feed published crisis-interaction coefficients into the classifier.

The coefficients and significance stars come from the test fixture
``tests/_published.py``. Stars map to representative p-values, and the
correlation evidence is absent, so only the regression leg of the rule fires.
Run with ``python demos/published_table_replay.py``.
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import _published  # noqa: E402
from safehaven.classify import classify_all, evidence_from_stars  # noqa: E402

summary = classify_all({(a, i): evidence_from_stars(b, s) for a, i, b, s in _published.cells()})
width = max(len(i) for i in summary.indices)
print(" " * width + "  " + " ".join(f"{a[:9]:>9}" for a in summary.assets))
for index, row in zip(summary.indices, summary.grid()):
    print(f"{index:>{width}}  " + " ".join(f"{lab[:9]:>9}" for lab in row))
