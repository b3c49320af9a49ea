import pytest

from latticekms.cli import main, run_job
from latticekms.config import apply_overrides, parse_config, parse_complex
from latticekms.errors import ConfigError

MINIMAL = """\
# trivial one-dimensional job
[system]
n = 1
blocks = 1
gen1 = 1
[params]
lambda = 1
beta = 1
[analyses]
run = kms-verify
"""

C2_JOB = """\
[system]
n = 1
blocks = 1 1
gen1 = 1 0 / 1 0
[params]
lambda = 1
beta = 1
m = 3
d = 2
[trace half]
weights = 0.5 0.5
[trace tail]
weights = 0 1
[analyses]
run = validate ideals fock-check kms-verify kms-eval descent dilate multikms-classify
"""


def test_parse_complex_forms():
    assert parse_complex("1", "t") == 1 + 0j
    assert parse_complex("-2.5e-3", "t") == complex(-2.5e-3)
    assert parse_complex("1+2i", "t") == 1 + 2j
    assert parse_complex("0.5-2e-3i", "t") == complex(0.5, -2e-3)
    assert parse_complex("2i", "t") == 2j
    assert parse_complex("-1i", "t") == -1j
    with pytest.raises(ConfigError, match="complex"):
        parse_complex("1+2j", "t")


def test_parse_minimal_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.n == 1 and cfg.block_dims == (1,)
    assert cfg.m == 4 and cfg.d == 2
    assert cfg.eps == pytest.approx(1e-9) and cfg.tol == pytest.approx(1e-8)
    assert cfg.effective_betabar() == (1.0,)
    assert list(cfg.traces) == ["uniform"]  # auto-added default trace
    assert cfg.analyses == ["kms-verify"]


def test_parse_rejections():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("[system]\nn = 1\nbogus = 2\nblocks = 1\ngen1 = 1\n[analyses]\nrun = ideals")
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(MINIMAL + "[mystery]\nkey = 1\n")
    with pytest.raises(ConfigError, match="unknown analysis"):
        parse_config(MINIMAL.replace("run = kms-verify", "run = explode"))
    with pytest.raises(ConfigError, match="row"):
        parse_config(C2_JOB.replace("gen1 = 1 0 / 1 0", "gen1 = 1 0 / 1"))
    with pytest.raises(ConfigError, match="weights"):
        parse_config(C2_JOB.replace("weights = 0.5 0.5", "weights = 0.5 0.25 0.25"))
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(MINIMAL + "[system]\nn = 2\n")
    with pytest.raises(ConfigError, match="lambda needs"):
        parse_config(MINIMAL.replace("lambda = 1", "lambda = 1 2"))


def test_overrides():
    text = apply_overrides(MINIMAL, ["params.beta=2", "params.m=3"])
    cfg = parse_config(text)
    assert cfg.beta == 2.0 and cfg.m == 3
    text2 = apply_overrides(MINIMAL, ["trace.extra.weights=1"])
    cfg2 = parse_config(text2)
    assert cfg2.traces["extra"] == (1.0,)
    with pytest.raises(ConfigError):
        apply_overrides(MINIMAL, ["beta=2"])


def test_run_trivial_verify_clean():
    rb = run_job(parse_config(MINIMAL), seed=5)
    text = rb.text()
    assert rb.findings == 0 and rb.faults == 0
    assert "trace uniform: violations = 0" in text
    assert "regime = positive" in text


def test_run_embeds_negative_certificate():
    text = MINIMAL.replace("[analyses]", "[params2]").replace("[params2]", "[analyses]")
    cfg = parse_config(apply_overrides(MINIMAL, ["params.lambda=-1"]))
    rb = run_job(cfg, seed=0)
    out = rb.text()
    assert "certificate (negative-direction, direction 1)" in out
    assert "> 1" in out
    assert rb.faults == 0


def test_run_full_c2_job_deterministic(tmp_path):
    cfg_path = tmp_path / "job.cfg"
    cfg_path.write_text(C2_JOB)
    out1 = tmp_path / "r1.txt"
    out2 = tmp_path / "r2.txt"
    assert main(["run", str(cfg_path), "--seed", "7", "--report", str(out1)]) == 0
    assert main(["run", str(cfg_path), "--seed", "7", "--report", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    assert "analysis multikms-classify:" in text
    assert "findings = 1" in text  # the half trace does not descend


def test_run_regime_notes():
    cfg = parse_config(apply_overrides(MINIMAL, ["params.beta=0", "analyses.run=kms-verify kms-eval"]))
    out = run_job(cfg, seed=0).text()
    assert "regime = tracial" in out
    assert "plain traciality" in out

    two_dir = MINIMAL.replace("n = 1", "n = 2").replace(
        "gen1 = 1", "gen1 = 1\ngen2 = 1"
    ).replace("lambda = 1", "lambda = 1 0")
    cfg2 = parse_config(two_dir)
    out2 = run_job(cfg2, seed=0).text()
    assert "regime = reduced" in out2
    assert "nonzero directions" in out2


def test_main_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[system]\nn = oops\n")
    assert main(["run", str(bad)]) == 2
    assert main(["run", str(tmp_path / "missing.cfg")]) == 2
    # a size-guard rejection is a fault, not a crash
    cfg_path = tmp_path / "big.cfg"
    cfg_path.write_text(apply_overrides(MINIMAL, ["params.m=50", "analyses.run=fock-check"]))
    report = tmp_path / "rep.txt"
    assert main(["run", str(cfg_path), "--report", str(report)]) == 1
    assert "fault" in report.read_text()


def test_validate_analysis_reports_bad_generator(tmp_path):
    text = C2_JOB.replace("gen1 = 1 0 / 1 0", "gen1 = 1 1 / 0 0").replace(
        "run = validate ideals fock-check kms-verify kms-eval descent dilate multikms-classify",
        "run = validate ideals",
    )
    cfg = parse_config(text)
    rb = run_job(cfg, seed=0)
    out = rb.text()
    assert "multiplicative violation" in out
    assert rb.findings >= 1
    assert rb.faults >= 1  # downstream analysis cannot run
