# SPDX-License-Identifier: Apache-2.0
"""Smoke test for the `lct` extension module.

Build and install first:
    pip install --no-build-isolation ./crates/python
"""

import pathlib
import tempfile

import lct

DATA = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def main() -> None:
    mux = lct.Table.load(DATA / "mux4.lct")
    assert mux.name == "mux4" and not mux.clocked and len(mux) == 5
    assert mux.eval({"enable": 1, "select": 2}) == {"data_out": "data2"}
    assert mux.eval({"enable": 0, "select": 2}) == {"data_out": "8'd0"}

    fsm = lct.Table.load(DATA / "fsm4.lct")
    report = fsm.check()
    assert len(report["uncovered"]) == 4
    assert all(a["cond0"] == 1 and a["cond1"] == 1 and a["rst_n"] == 1 for a in report["uncovered"])

    hdl = mux.gen(style="case-nested")
    back = lct.extract(hdl, mux)
    assert lct.compare(mux, back)["equivalent"]

    mutated = lct.Table.parse(mux.to_manifest(), mux.to_csv().replace("data1", "data3", 1))
    r = lct.compare(mux, mutated)
    assert not r["equivalent"] and r["counterexample"]["output"] == "data_out"

    with tempfile.TemporaryDirectory() as run:
        out = lct.roundtrip(fsm, run_dir=run)
        assert out["label"] == "M", out
        assert (pathlib.Path(run) / "fsm4" / "verdict.json").is_file()

    big = lct.Table.fsm(32, 5, 8, seed=1)
    assert lct.roundtrip(big)["label"] == "M"

    try:
        lct.Table.load(DATA / "missing.lct")
    except lct.LctError as e:
        assert "missing.lct" in str(e)
    else:
        raise AssertionError("expected LctError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
