import csv
import io
import json

import numpy as np
import pytest

from xxz_gmn.cli import main
from xxz_gmn.scan import (
    AnalyticRecord,
    ConfigError,
    ScanRecord,
    SweepConfig,
    columns,
    emit,
    render,
    run_analytic_w,
    run_coupling_sweep,
    run_field_sweep,
    run_point,
)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=6, mode="bogus"),
        dict(n=6, mode="field-sweep", grid=(0.0, 1.0, 1)),
        dict(n=6, mode="field-sweep", grid=(0.0, 1.0, 2.5)),
        dict(n=6, mode="field-sweep", grid=(1.0, 1.0, 5)),
        dict(n=6, mode="field-sweep", grid=(1.0, -1.0, 5)),
        dict(n=6, mode="coupling-sweep", grid=(1.0, 3.0, 5)),
        dict(n=6, mode="coupling-sweep", grid=(0.5, 3.0, 5)),
        dict(n=13, mode="field-sweep", grid=(0.0, 1.0, 5)),
        dict(n=2, mode="point"),
        dict(n=65, mode="analytic-w"),
        dict(n=10, mode="analytic-w", n_min=3),
        dict(n=5, mode="analytic-w", n_min=8),
        dict(n=6, mode="point", outputs=frozenset({"entropy"})),
        dict(n=6, mode="point", restarts=0),
    ],
)
def test_config_rejected(kwargs):
    with pytest.raises(ConfigError):
        SweepConfig(**kwargs)


def test_wrong_runner_for_mode():
    cfg = SweepConfig(n=6, mode="point")
    with pytest.raises(ConfigError):
        run_field_sweep(cfg)
    with pytest.raises(ConfigError):
        run_analytic_w(cfg)


@pytest.fixture(scope="module")
def field_sweep_6():
    cfg = SweepConfig(n=6, mode="field-sweep", fixed=2.0, grid=(-1.5, 1.5, 61))
    return run_field_sweep(cfg)


def test_field_sweep_sectors_step_through(field_sweep_6):
    ks = [r.sector_k for r in field_sweep_6]
    assert ks[0] == 0 and ks[-1] == 6
    assert all(b >= a for a, b in zip(ks, ks[1:]))
    assert sorted(set(ks)) == list(range(7))
    # k=0 ends at b = -1, where the one-magnon line meets it
    for r in field_sweep_6:
        if r.swept_value < -1 - 1e-9:
            assert r.sector_k == 0
        elif -1 + 1e-9 < r.swept_value < -0.68:
            assert r.sector_k == 1


def test_field_sweep_single_excitation_plateau(field_sweep_6):
    vals = [r.violation for r in field_sweep_6 if r.sector_k == 1]
    assert len(vals) >= 5
    assert max(vals) - min(vals) < 1e-7
    conc = [r.concurrence for r in field_sweep_6 if r.sector_k == 1]
    np.testing.assert_allclose(conc, np.sqrt(10) / 6, atol=1e-9)


def test_field_sweep_endpoints_separable(field_sweep_6):
    for r in (field_sweep_6[0], field_sweep_6[-1]):
        assert r.violation <= 1e-9 and r.concurrence <= 1e-9


def test_field_sweep_gmn_implies_gme(field_sweep_6):
    for r in field_sweep_6:
        if r.violation > 1e-9:
            assert r.concurrence > 0


def test_field_sweep_mirror_symmetry():
    cfg = SweepConfig(n=7, mode="field-sweep", fixed=2.0, grid=(-1.2, 1.2, 25))
    recs = run_field_sweep(cfg)
    for r, s in zip(recs, reversed(recs)):
        # at exact crossings the tie rule picks the smaller k on both sides
        if r.degenerate or s.degenerate:
            continue
        assert r.sector_k + s.sector_k == 7
        assert r.violation == pytest.approx(s.violation, abs=1e-6)
        assert r.concurrence == pytest.approx(s.concurrence, abs=1e-9)


def test_coupling_sweep_sectors_and_trends():
    cfg = SweepConfig(n=6, mode="coupling-sweep", fixed=-0.8, grid=(1.05, 6.0, 23))
    recs = run_coupling_sweep(cfg)
    ks = [r.sector_k for r in recs]
    assert [k for i, k in enumerate(ks) if i == 0 or k != ks[i - 1]] == [0, 1, 2, 3]
    for a, b in zip(recs, recs[1:]):
        if a.sector_k == b.sector_k and a.sector_k > 1:
            assert b.violation <= a.violation + 1e-9
    for r in recs:
        if r.violation > 1e-9:
            assert r.concurrence > 0


def test_point_record():
    cfg = SweepConfig(n=6, mode="point", outputs=frozenset({"violation"}))
    r = run_point(cfg, 2.0, -0.8)
    assert r.sector_k == 1 and r.concurrence is None
    assert r.violation == pytest.approx(0.018595267482600, abs=1e-9)


def test_analytic_records():
    cfg = SweepConfig(n=6, mode="analytic-w", n_min=4)
    recs = run_analytic_w(cfg)
    assert [r.n for r in recs] == [4, 5, 6]
    assert recs[0].violation == pytest.approx(0.0405694150420947, abs=1e-9)
    assert all(r.violation > 0 for r in recs)


def _record(**kw):
    base = dict(swept_value=0.5, sector_k=1, degenerate=False, energy=-1.25)
    base.update(kw)
    return ScanRecord(**base)


def test_csv_columns_follow_outputs():
    text = render([_record()])
    assert text.splitlines()[0] == "swept_value,sector_k,degenerate,energy"
    assert text.splitlines()[1] == "0.5,1,false,-1.25"
    full = _record(violation=0.1, theta1=0.0, theta2=1.0, theta3=2.0, theta4=3.0,
                   concurrence=0.5, min_partition=(1, 4))
    rows = list(csv.reader(io.StringIO(render([full]))))
    assert rows[0] == ["swept_value", "sector_k", "degenerate", "energy", "violation",
                       "theta1", "theta2", "theta3", "theta4", "concurrence", "min_partition"]
    assert rows[1][-1] == "1+4"


def test_json_mirrors_csv():
    recs = [_record(concurrence=0.25, min_partition=(2,)), _record(swept_value=0.75, concurrence=0.5,
                                                                   min_partition=(1, 3))]
    doc = json.loads(render(recs, "json"))
    assert [list(d) for d in doc] == [columns(recs)] * 2
    assert doc[1]["min_partition"] == [1, 3]
    assert doc[0]["degenerate"] is False


def test_render_rejects_empty_and_unknown():
    with pytest.raises(ValueError):
        render([])
    with pytest.raises(ValueError):
        render([_record()], "xml")


def test_emit_to_file_and_stdout(tmp_path, capsys):
    recs = [AnalyticRecord(4, 0.04, 0.1, 0.2, 0.3, 0.4)]
    emit(recs, "csv", None)
    out = capsys.readouterr().out
    target = tmp_path / "w.csv"
    emit(recs, "csv", str(target))
    assert target.read_text() == out
    assert out.splitlines()[0] == "n,violation,theta1,theta2,theta3,theta4"


def test_cli_scan_field_rows(tmp_path):
    out = tmp_path / "scan.csv"
    assert main(["scan-field", "--n", "4", "--jx", "2", "--grid-min", "-1.5", "--grid-max", "1.5",
                 "--grid-count", "200", "--outputs", "sector,energy", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 201
    assert lines[0] == "swept_value,sector_k,degenerate,energy"


def test_cli_rerun_is_byte_identical(tmp_path):
    args = ["scan-field", "--n", "6", "--jx", "2", "--grid-min", "-1", "--grid-max", "1",
            "--grid-count", "9", "--seed", "3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_workers_do_not_change_output(tmp_path):
    args = ["scan-coupling", "--n", "5", "--b", "-0.5", "--grid-min", "1.2", "--grid-max", "4",
            "--grid-count", "6"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--workers", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_ground_state(capsys):
    assert main(["ground-state", "--n", "4", "--jx", "2", "--b", "-0.9"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "config,amplitude"
    assert lines[1:] == [f"{c},0.5" for c in ("0001", "0010", "0100", "1000")]
    assert main(["ground-state", "--n", "4", "--jx", "2", "--b", "-0.9", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["sector_k"] == 1 and len(doc["amplitudes"]) == 4


def test_cli_boundaries(capsys):
    assert main(["boundaries", "--n", "6", "--jx", "2"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [(int(r["k_left"]), int(r["k_right"])) for r in rows] == [(k, k + 1) for k in range(6)]
    assert float(rows[0]["b"]) == pytest.approx(-1.0, abs=1e-6)


def test_cli_bad_config_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scan-field", "--n", "6", "--jx", "2", "--grid-min", "1", "--grid-max", "0",
              "--grid-count", "5"])
    assert exc.value.code == 2
    assert "min < max" in capsys.readouterr().err


def test_cli_unwritable_output(tmp_path, capsys):
    bad = tmp_path / "missing" / "out.csv"
    rc = main(["concurrence", "--n", "4", "--jx", "2", "--b", "0", "--out", str(bad)])
    assert rc != 0
    assert capsys.readouterr().err
