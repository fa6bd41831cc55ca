import pytest

from lumenlens.cli import main
from lumenlens.harness import read_results


def test_validate_passes(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 7


def test_single_prints_schemes(capsys):
    assert main(["single", "--theta-r", "30", "--phi-r", "5", "--schemes", "cls,static",
                 "--trials", "500"]) == 0
    out = capsys.readouterr().out
    assert "[cls]" in out and "[static]" in out and "bound=" in out


def test_orientation_sweep_to_file(tmp_path):
    out = tmp_path / "o.json"
    assert main(["orientation-sweep", "--sigma2", "0,10", "--schemes", "vulo,static",
                 "--draws", "2", "--trials", "500", "--seed", "3", "--out", str(out),
                 "--format", "json"]) == 0
    rows = read_results(out)
    assert len(rows) == 4 and {r.seed for r in rows} == {3}


def test_dtx_sweep_stdout(capsys):
    assert main(["dtx-sweep", "--dtx", "0.5", "--variant", "16:4:0.005", "--draws", "1",
                 "--trials", "200"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# lumenlens-v1\n") and "d_tx|Nt=16|Nr=4" in out


def test_bad_scheme_rejected():
    with pytest.raises(SystemExit):
        main(["orientation-sweep", "--schemes", "magic"])
