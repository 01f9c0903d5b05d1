"""Smoke test for the fourbessel_py extension.

Build first with `cargo build --release -p fourbessel-py`; the script picks up
target/release (or target/debug) when the module is not already installed.
"""

import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import fourbessel_py

        return fourbessel_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libfourbessel_py.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("fourbessel_py", lib)
            mod = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(mod)
            return mod
    sys.exit("fourbessel_py not built; run cargo build -p fourbessel-py")


def main():
    fb = load()
    p = fb.Parameters(0.0, 0.5, 0.5, 0.5, 0.5)
    for a, b in [(2.0, 1.0), (1.0, 3.0)]:
        want = 1 / (math.pi * max(a, b))
        for method in ("closed", "contour", "residue", "oracle"):
            r = fb.evaluate(p, a, b, method)
            assert abs(r.value - want) <= 1e-8 * want, (method, r)
    print("half-order law ok:", fb.evaluate(p, 2.0, 1.0))

    q = fb.Parameters(-0.5, 0.25, 1.0, 0.5, 0.25)
    vals = [fb.evaluate(q, 1.0, 0.5, m).value for m in ("closed", "contour", "residue", "oracle")]
    assert max(vals) - min(vals) <= 1e-7 * abs(vals[0]), vals
    print("four methods agree:", vals[0])

    assert abs(fb.eval_scaled(p, 0.4).value - 1 / math.pi) < 1e-12

    bad = fb.Parameters(0.0, 0.5, 0.5, 1.0, 1.0)
    assert bad.validate(1.0, 0.5), "degenerate set should not validate"
    try:
        fb.evaluate(bad, 1.0, 0.5)
    except ValueError as e:
        print("degenerate rejected:", e)
    else:
        raise AssertionError("degenerate set evaluated")

    checks = fb.selftest()
    assert all(ok for _, ok, _ in checks), checks
    print(f"selftest: {len(checks)} checks pass")

    s = fb.crosscheck_grid("mu = 0, -0.5\norders = 0.25, 1, 0.5, 0.25\ntau = 0.5, 2\n")
    assert s["fail"] == 0 and s["pass"] == 4, s
    print("crosscheck:", s)


if __name__ == "__main__":
    main()
