"""Builds the extension module and exercises it from Python.

    python3 python/smoke_test.py
"""

import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "zerosum-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    target = os.environ.get("CARGO_TARGET_DIR", os.path.join(ROOT, "target"))
    lib = os.path.join(target, "release", "libpyzerosum.so")
    out = tempfile.mkdtemp(prefix="pyzerosum-")
    shutil.copy(lib, os.path.join(out, "pyzerosum.so"))
    sys.path.insert(0, out)


def main():
    build()
    import pyzerosum as zs

    s = zs.parse(3, "(1,0)^2 (0,1)^2 (1,1)")
    assert len(s) == 5
    assert str(s) == "(0,1)^2 (1,0)^2 (1,1)"
    assert s.sigma() == (0, 0)
    assert s.multiplicity((1, 0)) == 2
    assert s.with_term((2, 2)).remove_term((2, 2)) == s
    assert zs.Sequence.from_terms(3, [(1, 1), (0, 1)]).divides(s)

    assert zs.is_basis(4, (1, 0), (1, 1))
    assert not zs.is_basis(4, (2, 0), (0, 1))

    assert not zs.has_zero_sum_le(s, 4)
    assert zs.has_zero_sum_le(s, 5)
    assert (0, 0) not in zs.sigma_le(s, 4)
    w = zs.find_zero_sum_le(s, 5)
    assert w is not None and w.sigma() == (0, 0)

    c = zs.classify(s)
    assert c["verdict"] == "pass"
    assert c["details"]["class"] == "minimal_zero_sum"
    assert c["details"]["extremal"] is True

    m = zs.match_conjecture(s, 1)
    assert m["matched"] and m["item"] == 2

    t = zs.construct(5, 3)
    assert str(t) == "(0,1)^4 (1,0)^4 (1,1)^3"
    assert zs.match_conjecture(t, 3)["item"] == 3
    assert str(zs.canonicalize(zs.parse(3, "(2,0) (0,2)"))) == str(zs.canonicalize(zs.parse(3, "(1,0) (0,1)")))

    assert [zs.compute_davenport(n) for n in (2, 3, 4)] == [3, 5, 7]
    assert zs.compute_s_le(3, 3) == 7
    reps = zs.enumerate_extremal(4, 2)
    assert len(reps) == 1 and len(reps[0]) == 8
    r = zs.verify_conjecture(4, 3)
    assert r["verdict"] == "pass" and r["orbits"] >= 1

    for bad in (lambda: zs.parse(3, "(3,0)"), lambda: zs.construct(5, 3, item=2)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        zs.compute_davenport(9)
    except RuntimeError:
        pass
    else:
        raise AssertionError("expected the feasibility guard to refuse")

    print("pyzerosum smoke test passed")


if __name__ == "__main__":
    main()
