"""Batch jobs: a line-oriented config in, a deterministic report out.

The same entry point backs the command line:

    latticekms run job.cfg --seed 7 --report report.txt
"""

from latticekms.cli import run_job
from latticekms.config import apply_overrides, parse_config

JOB = """\
[system]
n = 1
blocks = 1 1
gen1 = 1 0 / 1 0        # the collapse (a, b) |-> (a, a)
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
run = validate ideals kms-verify descent dilate
"""

cfg = parse_config(JOB)
report = run_job(cfg, seed=7)
print(report.text())

# Overrides rewrite entries before parsing; validation still applies.
hot = parse_config(apply_overrides(JOB, ["params.beta=0.25"]))
print("with beta = 0.25, findings =", run_job(hot, seed=7).findings)
