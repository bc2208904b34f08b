"""Smoke test for the Python module.

Build first:  cargo build -p motif-py
Then run:     python3 crates/py/python/smoke_test.py
"""

import importlib.util
import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[3]
CORPUS = ROOT / "crates" / "core" / "corpus"


def load_module():
    for profile in ("debug", "release"):
        lib = ROOT / "target" / profile / "libmotif_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libmotif_py.so not found; run `cargo build -p motif-py` first")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "motif.so"
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("motif", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    motif = load_module()

    assert motif.seeds("int f(int x);", "f") == [b"\xff\xff\xff\xff", b"\x00" * 4, b"\x01\x00\x00\x00"]

    header = (CORPUS / "corpus.h").read_text()
    tpos = (CORPUS / "tpos.c").read_text()
    files = motif.seeds(header + tpos, "T_POS_IsConstraintValid")
    assert [len(f) for f in files] == [8060] * 3

    fuzz, fp, test = motif.drivers(header + tpos, "T_POS_IsConstraintValid")
    assert "mut_T_POS_IsConstraintValid(" in fuzz
    assert fp == fuzz.replace("mut_T_POS_IsConstraintValid(", "T_POS_IsConstraintValid(")
    assert "printf_struct" in test

    muts = motif.mutants("int add(int a, int b) { return a + b; }", "add", ["AOR"])
    assert [m[3] for m in muts] == ["-", "*", "/", "%"], muts

    assert motif.bucketize(5) == "4-7"
    assert motif.classify("signal", 6, ["CALL_ORIG", "RET_ORIG", "CALL_MUT", "RET_MUT", "DIFF"]) == "kill-diff"
    assert abs(motif.fisher_exact(10, 0, 0, 10) - 2 / 184756) < 1e-15

    env = json.loads(motif.parse(header))
    assert "T_POS" in env["environment"]["typedefs"]

    plan = json.loads(motif.plan(str(CORPUS / "corpus.toml")))
    assert plan["total_mutants"] > 0
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
