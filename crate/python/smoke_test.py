"""Smoke test for the linkvol Python extension.

Build with `cargo build --release -p linkvol-py` and run with
`python3 python/smoke_test.py` from the repository root.
"""

import math
import os
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    built = ROOT / "target" / "release" / "liblinkvol_py.so"
    if not built.exists():
        sys.exit(f"missing {built}; run `cargo build --release -p linkvol-py` first")
    tmp = tempfile.mkdtemp()
    shutil.copy(built, os.path.join(tmp, "linkvol_py.so"))
    sys.path.insert(0, tmp)
    import linkvol_py

    return linkvol_py


def main():
    lv = load()

    fig8 = lv.ConwaySymbol("2  2")
    assert str(fig8) == "2 2"
    assert fig8.crossings == 4
    assert fig8.components() == 1
    assert fig8.is_alternating()
    assert len(fig8.pd()) == 4

    r = fig8.volume()
    assert r.hyperbolic and r.converged
    assert math.isclose(r.volume, 2.029883212819307, abs_tol=1e-9), r
    assert r.classification == "2V_0"

    assert lv.volume("2 1 2").classification == "V_1"
    assert not lv.volume("5").hyperbolic

    try:
        lv.ConwaySymbol("2 (1")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")

    rows = lv.family("p q", {"p": (2, 3), "q": (2, 3)})
    assert len(rows) == 4
    assert math.isclose(rows[1][2], rows[2][2], abs_tol=1e-9)

    b = lv.bounds("p q")
    assert b.lower_expr == "2V_0" and b.upper_expr == "2V_1"

    xs = [float(x) for x in range(2, 12)]
    model = lv.fit([(x, 4.0 - 1.0 / (x * x + 1.0)) for x in xs], "rational", 1)
    assert math.isclose(model.asymptote(), 4.0, abs_tol=1e-6)

    print("python smoke test passed")


if __name__ == "__main__":
    main()
