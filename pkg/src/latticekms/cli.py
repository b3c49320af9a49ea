"""Batch front-end: run configured analyses, emit a deterministic report.

Usage:

    latticekms run JOB.cfg [--set section.key=value ...] [--report PATH] [--seed INT]

Reports are plain structured text with a stable field order; identical
configs and seeds produce byte-identical output.  Violations found by the
verifiers are findings (exit status stays 0, the findings counter is
nonzero); faults -- rejected inputs, exhausted budgets -- exit with 1,
parse errors with 2.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fock, kms, multikms
from .algebra import (
    BlockAlgebra,
    EndomorphismViolation,
    TracialState,
    validate_endomorphism,
)
from .config import JobConfig, apply_overrides, parse_config
from .dynamics import DynamicalSystem, classify_injectivity, dilate, invariance_ideal
from .errors import ConfigError
from .lattice import MultiIndex, enumerate_grid
from .monomial import Monomial


def _f(x: float) -> str:
    return f"{float(x):.17g}"


def _c(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


class ReportBuilder:
    def __init__(self):
        self.lines: list[str] = []
        self.findings = 0
        self.faults = 0

    def add(self, line: str = "", indent: int = 0) -> None:
        self.lines.append("  " * indent + line)

    def fault(self, analysis: str, message: str) -> None:
        self.faults += 1
        self.add(f"fault: {message}", indent=1)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _echo_config(rb: ReportBuilder, cfg: JobConfig, seed: int) -> None:
    rb.add("latticekms report")
    rb.add(f"seed = {seed}")
    rb.add("config:")
    rb.add(f"n = {cfg.n}", 1)
    rb.add("blocks = " + " ".join(str(d) for d in cfg.block_dims), 1)
    for i, mat in enumerate(cfg.generator_matrices, start=1):
        rows = " / ".join(" ".join(_c(z) for z in row) for row in mat)
        rb.add(f"gen{i} = {rows}", 1)
    rb.add("lambda = " + " ".join(_f(l) for l in cfg.lam), 1)
    rb.add(f"beta = {_f(cfg.beta)}", 1)
    rb.add(f"m = {cfg.m}", 1)
    rb.add(f"d = {cfg.d}", 1)
    rb.add(f"eps = {_f(cfg.eps)}", 1)
    rb.add(f"tol = {_f(cfg.tol)}", 1)
    rb.add("betabar = " + " ".join(_f(b) for b in cfg.effective_betabar()), 1)
    for name in sorted(cfg.traces):
        rb.add(f"trace {name} = " + " ".join(_f(w) for w in cfg.traces[name]), 1)
    rb.add("analyses = " + " ".join(cfg.analyses), 1)


def _ideal_str(ideal) -> str:
    return "{" + ",".join(str(b) for b in sorted(ideal.blocks)) + "}"


def run_job(cfg: JobConfig, seed: int = 0) -> ReportBuilder:
    rb = ReportBuilder()
    _echo_config(rb, cfg, seed)

    algebra = BlockAlgebra(cfg.block_dims)
    gens = []
    gen_problems: list[tuple[int, EndomorphismViolation]] = []
    for i, mat in enumerate(cfg.generator_matrices):
        out = validate_endomorphism(algebra, mat)
        if isinstance(out, EndomorphismViolation):
            gen_problems.append((i, out))
        else:
            gens.append(out)

    sys_obj: DynamicalSystem | None = None
    sys_error = ""
    if not gen_problems:
        try:
            sys_obj = DynamicalSystem(algebra, gens)
        except ValueError as exc:
            sys_error = str(exc)
    else:
        sys_error = "; ".join(f"gen{i + 1}: {v}" for i, v in gen_problems)

    params = kms.KmsParams(lam=cfg.lam, beta=cfg.beta, eps=cfg.eps)
    traces = {name: cfg.traces[name] for name in sorted(cfg.traces)}

    for analysis in cfg.analyses:
        rb.add(f"analysis {analysis}:")
        if analysis == "validate":
            if gen_problems:
                for i, v in gen_problems:
                    rb.findings += 1
                    rb.add(f"gen{i + 1}: {v}", 1)
            elif sys_obj is None:
                rb.fault(analysis, sys_error)
            else:
                for i, g in enumerate(gens, start=1):
                    cert = g.certificate
                    rb.add(
                        f"gen{i}: valid (unital {_f(cert.unital_defect)}, "
                        f"multiplicative {_f(cert.multiplicative_defect)}, "
                        f"adjoint {_f(cert.adjoint_defect)})",
                        1,
                    )
                rb.add(f"commutation defect = {_f(sys_obj.commutation_defect)}", 1)
            continue

        if sys_obj is None:
            rb.fault(analysis, f"system invalid: {sys_error}")
            continue

        rng = np.random.default_rng(seed)
        try:
            if analysis == "ideals":
                _run_ideals(rb, sys_obj)
            elif analysis == "fock-check":
                rep = fock.build_representation(sys_obj, cfg.m)
                nr = rep.check_nica_pair(cfg.d if cfg.d >= 1 else 1)
                rb.add(f"scope: m = {cfg.m}, degree = {nr.degree}, safe levels = {nr.safe_levels}", 1)
                rb.add("isometry residuals = " + " ".join(_f(v) for v in nr.isometry), 1)
                rb.add(
                    "doubly-commuting residuals = "
                    + (" ".join(_f(v) for v in nr.doubly_commuting) or "-"),
                    1,
                )
                rb.add("covariance residuals = " + " ".join(_f(v) for v in nr.covariance), 1)
            elif analysis == "kms-verify":
                _run_kms_verify(rb, sys_obj, params, traces, cfg, rng)
            elif analysis == "kms-eval":
                _run_kms_eval(rb, sys_obj, params, traces, cfg)
            elif analysis == "descent":
                _run_descent(rb, sys_obj, params, traces, cfg)
            elif analysis == "dilate":
                _run_dilate(rb, sys_obj, cfg)
            elif analysis == "multikms-classify":
                table = multikms.classify_prescribing_sets(
                    sys_obj, cfg.effective_betabar(), degree=cfg.d, tol=cfg.tol, rng=rng
                )
                rb.add(
                    "betabar = " + " ".join(_f(b) for b in table.betabar)
                    + f", sets = {len(table.rows)}",
                    1,
                )
                for row in table.rows:
                    rb.add(f"set {row.label}: {row.verdict}", 1)
                    rb.add(row.detail, 2)
            else:  # pragma: no cover - analysis names validated at parse time
                rb.fault(analysis, f"unknown analysis {analysis!r}")
        except Exception as exc:
            rb.fault(analysis, f"{type(exc).__name__}: {exc}")

    rb.add(f"findings = {rb.findings}")
    rb.add(f"faults = {rb.faults}")
    return rb


def _run_ideals(rb: ReportBuilder, sys_obj: DynamicalSystem) -> None:
    n = sys_obj.n
    rb.add(f"I_0 = {_ideal_str(invariance_ideal(sys_obj, MultiIndex.zero(n)))}", 1)
    for i in range(n):
        e_i = MultiIndex.unit(i, n)
        ideal, level = invariance_ideal(sys_obj, e_i, audit=True)
        rb.add(f"I_e{i + 1} = {_ideal_str(ideal)} (perp sweep stabilized at level {level})", 1)
    ones, level = invariance_ideal(sys_obj, MultiIndex.ones(n), audit=True)
    rb.add(f"I_1 = {_ideal_str(ones)} (perp sweep stabilized at level {level})", 1)
    inj = classify_injectivity(sys_obj)
    if inj.injective:
        rb.add("injective = yes", 1)
    else:
        d, b = inj.kernel_witness
        rb.add(f"injective = no (generator {d + 1} kills block {b})", 1)


def _run_kms_verify(rb, sys_obj, params, traces, cfg, rng) -> None:
    rb.add(
        f"scope: degree = {cfg.d}, tol = {_f(cfg.tol)}, eps = {_f(cfg.eps)}, "
        "elements = basis + 2 random",
        1,
    )
    rb.add(f"regime = {params.regime}", 1)
    cert = kms.no_kms_certificate(params, cnp=False, sys=sys_obj)
    if cert is not None:
        rb.add(f"certificate ({cert.kind}, direction {cert.direction + 1}): {cert.chain}", 1)
        return
    cnp_cert = kms.no_kms_certificate(params, cnp=True, sys=sys_obj)
    if cnp_cert is not None:
        rb.add(
            f"quotient-algebra certificate ({cnp_cert.kind}, direction "
            f"{cnp_cert.direction + 1}): {cnp_cert.chain}",
            1,
        )
    if params.regime == "tracial":
        rb.add("beta = 0: the condition is plain traciality; supply a tracial functional", 1)
        return
    if params.regime == "reduced":
        rb.add(
            "some lambda_k = 0: the condition only constrains the nonzero directions; "
            "no candidate functional is auto-constructed",
            1,
        )
        return
    for name, weights in traces.items():
        tau = TracialState(sys_obj.algebra, weights)
        psi = kms.psi_tau_functional(sys_obj, tau, params)
        violations = kms.verify_kms(psi, params, degree=cfg.d, tol=cfg.tol, rng=rng)
        rb.findings += len(violations)
        rb.add(f"trace {name}: violations = {len(violations)}", 1)
        for v in violations[:3]:
            rb.add(v.render(), 2)


def _run_kms_eval(rb, sys_obj, params, traces, cfg) -> None:
    if params.regime != "positive":
        rb.add(f"regime = {params.regime}: Gibbs-type evaluation not defined", 1)
        return
    labels = sys_obj.algebra.basis_labels()
    units = sys_obj.algebra.basis()
    for name, weights in traces.items():
        tau = TracialState(sys_obj.algebra, weights)
        psi = kms.psi_tau_functional(sys_obj, tau, params)
        rb.add(f"trace {name} (off-diagonal monomials evaluate to 0 exactly):", 1)
        for x in enumerate_grid(cfg.d, sys_obj.n):
            for lab, e in zip(labels, units):
                v = psi.evaluate(Monomial(sys_obj, x, e, x))
                rb.add(f"psi(V{tuple(x)} {lab} V*{tuple(x)}) = {_c(v.value)} +- {_f(v.radius)}", 2)


def _run_descent(rb, sys_obj, params, traces, cfg) -> None:
    if params.regime != "positive":
        rb.add(f"regime = {params.regime}: descent analysis needs the positive regime", 1)
        return
    for name, weights in traces.items():
        tau = TracialState(sys_obj.algebra, weights)
        report = kms.cnp_descent(tau, params, sys_obj, tol=cfg.tol)
        rb.add(
            f"trace {name}: descends = {'yes' if report.descends else 'no'} "
            f"(I_1 blocks {{{','.join(str(b) for b in report.ideal_blocks)}}}, "
            f"weights vanish = {'yes' if report.weights_vanish else 'no'}, "
            f"max defect = {_f(report.max_defect)})",
            1,
        )
        for key, val in report.measured_constants:
            rb.add(f"measured psi(P_{key}) = {_f(val)}", 2)
        if not report.descends:
            rb.findings += 1
            for defect in report.defects[:3]:
                rb.add(
                    f"defect at y = {tuple(defect.y)}, {defect.label}: {_c(defect.value)}",
                    2,
                )


def _run_dilate(rb, sys_obj, cfg) -> None:
    dil = dilate(sys_obj, max(cfg.m, 1))
    rb.add(f"level m = {dil.m}, levels = {len(dil.grid)}", 1)
    rb.add(f"algebra = {dil.algebra!r}", 1)
    for lvl in dil.levels:
        retained = ",".join(str(b) for b in lvl.retained_blocks)
        tag = " boundary" if lvl.index in dil.boundary else ""
        rb.add(f"level {tuple(lvl.index)}: blocks {{{retained}}}{tag}", 2)
    rb.add(
        "compression defects = " + " ".join(_f(d) for d in dil.compression_defects), 1
    )
    rb.add(
        "interior min singular values = "
        + " ".join(_f(s) for s in dil.interior_min_singular),
        1,
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="latticekms", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a job configuration")
    runp.add_argument("config", help="path to the job configuration")
    runp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
    runp.add_argument("--report", default=None, help="write the report here instead of stdout")
    runp.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        text = apply_overrides(text, args.set)
        cfg = parse_config(text)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    rb = run_job(cfg, seed=args.seed)
    out = rb.text()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if rb.faults == 0 else 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
