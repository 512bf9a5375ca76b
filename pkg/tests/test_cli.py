import io
import json
import math

import numpy as np
import pytest

from qsp.algebra import AngleSequence
from qsp.cli_bench import (
    BENCH_FIELDS,
    BenchRecord,
    bench_region,
    bench_runtime,
    default_eta,
    find_angles,
    main,
    run_hamsim,
    write_records,
)
from qsp.hamsim import HamsimSpec
from qsp.laurent import LaurentPoly


def write_poly(path, poly):
    path.write_text(json.dumps(poly.to_json_dict()))


def cosine_target():
    return LaurentPoly([0.5, 0, 0.5])


def test_cli_complete_decompose_verify_chain(tmp_path):
    f_path = tmp_path / "F.json"
    u_path = tmp_path / "U.json"
    a_path = tmp_path / "angles.json"
    r_path = tmp_path / "report.json"
    write_poly(f_path, cosine_target())

    assert main(["complete", "--input", str(f_path), "--seed", "7", "--out", str(u_path)]) == 0
    u_data = json.loads(u_path.read_text())
    assert set(u_data) == {"A", "B", "report"}
    assert u_data["report"]["rng_seed"] == 7

    assert main(["decompose", "--input", str(u_path), "--mode", "halving",
                 "--out", str(a_path)]) == 0
    seq = AngleSequence.from_json_dict(json.loads(a_path.read_text()))
    assert len(seq) == 1
    assert abs(seq.angles[0]) == pytest.approx(math.pi / 4, abs=1e-12)

    assert main(["verify", "--angles", str(a_path), "--target", str(f_path),
                 "--eps", "1e-3", "--out", str(r_path)]) == 0
    report = json.loads(r_path.read_text())
    assert report["max_error"] <= 1e-12
    assert report["achievable"] is True


def test_cli_verify_exit_code_on_miss(tmp_path):
    f_path = tmp_path / "F.json"
    a_path = tmp_path / "angles.json"
    r_path = tmp_path / "report.json"
    write_poly(f_path, cosine_target())
    a_path.write_text(json.dumps(AngleSequence((0.5,), 0.0).to_json_dict()))
    assert main(["verify", "--angles", str(a_path), "--target", str(f_path),
                 "--eps", "1e-6", "--out", str(r_path)]) == 2


def test_cli_internal_error_exit_code(tmp_path):
    missing = tmp_path / "nope.json"
    out = tmp_path / "out.json"
    assert main(["complete", "--input", str(missing), "--out", str(out)]) == 1


def test_cli_hamsim(tmp_path):
    a_path = tmp_path / "angles.json"
    r_path = tmp_path / "report.json"
    code = main(["hamsim", "--tau", "10", "--eps", "1e-3", "--seed", "5",
                 "--out", str(a_path), "--report", str(r_path)])
    assert code == 0
    report = json.loads(r_path.read_text())
    assert report["achievable"] is True
    assert report["max_error"] <= 1e-3
    assert report["mode"] == "halving"
    assert report["delta"] > 0
    seq = AngleSequence.from_json_dict(json.loads(a_path.read_text()))
    assert len(seq) == report["degree"]


def test_cli_hamsim_determinism(tmp_path):
    paths = [tmp_path / "a1.json", tmp_path / "a2.json"]
    for p in paths:
        assert main(["hamsim", "--tau", "8", "--seed", "11", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_default_eta_pairing():
    assert default_eta(1e-3) == pytest.approx(0.999)
    assert default_eta(1e-4) == pytest.approx(0.9999)


def test_find_angles_rejects_unknown_mode():
    with pytest.raises(ValueError):
        find_angles(cosine_target(), mode="bisecting")


def test_bench_runtime_empty():
    records, slope = bench_runtime([], 1e-3)
    assert records == []
    assert math.isnan(slope)


def test_bench_runtime_requires_ascending():
    with pytest.raises(ValueError):
        bench_runtime([100.0, 50.0], 1e-3)


def test_bench_runtime_records():
    records, slope = bench_runtime([4.0, 8.0], 1e-3, seed=1)
    assert len(records) == 2
    assert all(r.mode == "halving" for r in records)
    assert all(r.achievable for r in records)
    assert records[0].degree <= records[1].degree


def test_bench_region_modes_and_protocol():
    records = bench_region([4.0, 8.0], [1e-3], mode="both", seed=1)
    assert len(records) == 4
    assert {r.mode for r in records} == {"halving", "carving"}
    assert all(r.eta == pytest.approx(0.999) for r in records)
    halving = {r.tau for r in records if r.mode == "halving" and r.achievable}
    carving = {r.tau for r in records if r.mode == "carving" and r.achievable}
    assert carving <= halving  # tiny instances: both succeed


def test_bench_region_validates_grids():
    with pytest.raises(ValueError):
        bench_region([], [1e-3])


def test_csv_golden_header_and_shape():
    rec = BenchRecord(tau=4.0, eps=1e-3, eta=0.999, degree=12, mode="halving",
                      wall_time_s=0.25, max_error=1e-9, achievable=True, seed=3)
    buf = io.StringIO()
    write_records([rec], buf, fmt="csv")
    lines = buf.getvalue().splitlines()
    assert lines[0] == "tau,eps,eta,degree,mode,wall_time_s,max_error,achievable,seed"
    assert lines[1].split(",") == [
        "4.0", "0.001", "0.999", "12", "halving", "0.25", "1e-09", "true", "3"
    ]


def test_jsonl_output():
    rec = BenchRecord(tau=4.0, eps=1e-3, eta=0.999, degree=12, mode="carving",
                      wall_time_s=0.25, max_error=1e-9, achievable=False, seed=3)
    buf = io.StringIO()
    write_records([rec], buf, fmt="jsonl")
    row = json.loads(buf.getvalue())
    assert list(row) == BENCH_FIELDS
    assert row["achievable"] is False


def test_cli_bench_runtime_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "runtime", "--taus", "4,8", "--eps", "1e-3",
                 "--seed", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("tau,eps,eta,")
    assert len(lines) == 3


def test_cli_bench_region_jsonl(tmp_path):
    out = tmp_path / "region.jsonl"
    assert main(["bench", "region", "--taus", "4", "--epsilons", "1e-3",
                 "--mode", "halving", "--seed", "2", "--format", "jsonl",
                 "--out", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 1
    assert rows[0]["mode"] == "halving"


def test_run_hamsim_bundle():
    out = run_hamsim(HamsimSpec(tau=5.0, eps=1e-3, eta=0.999, cap_coeff=0.45e-3, seed=0))
    assert set(out) == {"angles", "report", "completion", "target", "delta"}
    assert out["report"].achievable is True
    assert out["report"].wall_times.keys() >= {"completion", "decomposition", "verification"}
