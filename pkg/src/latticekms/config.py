"""Line-oriented job configuration.

Grammar (see README for the full description):

    # comment to end of line
    [system]
    n = 2
    blocks = 1 1
    gen1 = 1 0 / 1 0          # row-major coordinate matrix, rows '/'-separated
    gen2 = 1 0 / 0 1
    [params]
    lambda = 1 1
    beta = 1
    m = 4
    d = 2
    eps = 1e-9
    tol = 1e-8
    betabar = 1 1             # optional; defaults to lambda * beta
    [trace NAME]
    weights = 0.5 0.5
    [analyses]
    run = validate ideals fock-check kms-verify kms-eval descent dilate multikms-classify

Complex entries are written RE, REiIMi is not a thing: the accepted forms
are a plain float ``1.5``, ``re+imi`` / ``re-imi`` such as ``1+2i`` or
``0.5-2e-3i``, and a pure imaginary ``2i``.  Parsing is strict: unknown
sections, unknown keys, duplicate keys, and malformed values are rejected
with line diagnostics.  Defaults (m=4, d=2, eps=1e-9, tol=1e-8,
lambda=(1,...,1), beta=1) fill omitted parameters and are always echoed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

ANALYSES = (
    "validate",
    "ideals",
    "fock-check",
    "kms-verify",
    "kms-eval",
    "descent",
    "dilate",
    "multikms-classify",
)

_COMPLEX_RE = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$"
)
_IMAG_RE = re.compile(r"^(?P<im>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$")


def parse_complex(token: str, where: str) -> complex:
    tok = token.strip()
    try:
        return complex(float(tok))
    except ValueError:
        pass
    m = _COMPLEX_RE.match(tok)
    if m:
        return complex(float(m.group("re")), float(m.group("im")))
    m = _IMAG_RE.match(tok)
    if m:
        return complex(0.0, float(m.group("im")))
    raise ConfigError(f"{where}: cannot parse complex number {token!r}")


@dataclass
class JobConfig:
    n: int
    block_dims: tuple[int, ...]
    generator_matrices: list[np.ndarray]
    analyses: list[str]
    lam: tuple[float, ...]
    beta: float
    m: int = 4
    d: int = 2
    eps: float = 1e-9
    tol: float = 1e-8
    betabar: tuple[float, ...] | None = None
    traces: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def effective_betabar(self) -> tuple[float, ...]:
        if self.betabar is not None:
            return self.betabar
        return tuple(l * self.beta for l in self.lam)


def _split_sections(text: str) -> list[tuple[int, str, list[tuple[int, str, str]]]]:
    """(line, section-header, [(line, key, value), ...]) triples."""
    sections: list[tuple[int, str, list[tuple[int, str, str]]]] = []
    current: list[tuple[int, str, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            header = line[1:-1].strip()
            current = []
            sections.append((lineno, header, current))
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: entry outside any section")
        key, value = line.split("=", 1)
        current.append((lineno, key.strip(), value.strip()))
    return sections


def _floats(value: str, where: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in value.split())
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _ints(value: str, where: str) -> tuple[int, ...]:
    out = []
    for t in value.split():
        try:
            out.append(int(t))
        except ValueError:
            raise ConfigError(f"{where}: not an integer: {t!r}") from None
    return tuple(out)


def _matrix(value: str, dim: int, where: str) -> np.ndarray:
    rows = [r.strip() for r in value.split("/")]
    if len(rows) != dim:
        raise ConfigError(f"{where}: expected {dim} rows, got {len(rows)}")
    mat = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        toks = row.split()
        if len(toks) != dim:
            raise ConfigError(f"{where}: row {i + 1} has {len(toks)} entries, expected {dim}")
        for j, tok in enumerate(toks):
            mat[i, j] = parse_complex(tok, f"{where}, row {i + 1}")
    return mat


def parse_config(text: str) -> JobConfig:
    """Parse, then validate; every rejection carries a line or field tag."""
    sections = _split_sections(text)
    system: dict[str, tuple[int, str]] = {}
    params: dict[str, tuple[int, str]] = {}
    analyses: list[str] = []
    traces: dict[str, tuple[float, ...]] = {}

    seen_sections: set[str] = set()
    for lineno, header, entries in sections:
        if header == "system" or header == "params" or header == "analyses":
            if header in seen_sections:
                raise ConfigError(f"line {lineno}: duplicate section [{header}]")
            seen_sections.add(header)
        if header == "system":
            for ln, k, v in entries:
                if k in system:
                    raise ConfigError(f"line {ln}: duplicate key {k!r} in [system]")
                system[k] = (ln, v)
        elif header == "params":
            for ln, k, v in entries:
                if k in params:
                    raise ConfigError(f"line {ln}: duplicate key {k!r} in [params]")
                params[k] = (ln, v)
        elif header == "analyses":
            for ln, k, v in entries:
                if k != "run":
                    raise ConfigError(f"line {ln}: unknown key {k!r} in [analyses]")
                if analyses:
                    raise ConfigError(f"line {ln}: duplicate key 'run' in [analyses]")
                for name in v.split():
                    if name not in ANALYSES:
                        raise ConfigError(f"line {ln}: unknown analysis {name!r}")
                    analyses.append(name)
        elif header.startswith("trace "):
            name = header[len("trace ") :].strip()
            if not name:
                raise ConfigError(f"line {lineno}: trace section needs a name")
            if name in traces:
                raise ConfigError(f"line {lineno}: duplicate trace {name!r}")
            got = None
            for ln, k, v in entries:
                if k != "weights":
                    raise ConfigError(f"line {ln}: unknown key {k!r} in [trace {name}]")
                got = _floats(v, f"line {ln}")
            if got is None:
                raise ConfigError(f"line {lineno}: [trace {name}] needs a 'weights' entry")
            traces[name] = got
        else:
            raise ConfigError(f"line {lineno}: unknown section [{header}]")

    if "n" not in system:
        raise ConfigError("[system]: missing key 'n'")
    ln, v = system.pop("n")
    try:
        n = int(v)
    except ValueError:
        raise ConfigError(f"line {ln}: n must be an integer") from None
    if n < 1:
        raise ConfigError(f"line {ln}: n must be >= 1")

    if "blocks" not in system:
        raise ConfigError("[system]: missing key 'blocks'")
    ln, v = system.pop("blocks")
    block_dims = _ints(v, f"line {ln}")
    if not block_dims or any(d < 1 for d in block_dims):
        raise ConfigError(f"line {ln}: block dimensions must be positive integers")
    coord_dim = sum(d * d for d in block_dims)

    gens: list[np.ndarray] = []
    for i in range(1, n + 1):
        key = f"gen{i}"
        if key not in system:
            raise ConfigError(f"[system]: missing key {key!r}")
        ln, v = system.pop(key)
        gens.append(_matrix(v, coord_dim, f"line {ln} ({key})"))
    if system:
        k, (ln, _) = sorted(system.items())[0]
        raise ConfigError(f"line {ln}: unknown key {k!r} in [system]")

    cfg = JobConfig(
        n=n,
        block_dims=block_dims,
        generator_matrices=gens,
        analyses=analyses,
        lam=(1.0,) * n,
        beta=1.0,
        traces=traces,
    )

    known = {"lambda", "beta", "m", "d", "eps", "tol", "betabar"}
    for k, (ln, v) in sorted(params.items()):
        if k not in known:
            raise ConfigError(f"line {ln}: unknown key {k!r} in [params]")
    if "lambda" in params:
        ln, v = params["lambda"]
        lam = _floats(v, f"line {ln}")
        if len(lam) != n:
            raise ConfigError(f"line {ln}: lambda needs {n} entries")
        cfg.lam = lam
    if "beta" in params:
        ln, v = params["beta"]
        cfg.beta = float(_floats(v, f"line {ln}")[0])
    if "m" in params:
        ln, v = params["m"]
        cfg.m = int(_ints(v, f"line {ln}")[0])
    if "d" in params:
        ln, v = params["d"]
        cfg.d = int(_ints(v, f"line {ln}")[0])
    if "eps" in params:
        ln, v = params["eps"]
        cfg.eps = float(_floats(v, f"line {ln}")[0])
        if cfg.eps <= 0:
            raise ConfigError(f"line {ln}: eps must be positive")
    if "tol" in params:
        ln, v = params["tol"]
        cfg.tol = float(_floats(v, f"line {ln}")[0])
        if cfg.tol <= 0:
            raise ConfigError(f"line {ln}: tol must be positive")
    if "betabar" in params:
        ln, v = params["betabar"]
        bb = _floats(v, f"line {ln}")
        if len(bb) != n:
            raise ConfigError(f"line {ln}: betabar needs {n} entries")
        cfg.betabar = bb

    if not cfg.analyses:
        raise ConfigError("[analyses]: no analyses requested")
    for name, w in cfg.traces.items():
        if len(w) != len(block_dims):
            raise ConfigError(f"[trace {name}]: {len(w)} weights for {len(block_dims)} blocks")
    if not cfg.traces:
        B = len(block_dims)
        cfg.traces["uniform"] = tuple(1.0 / B for _ in range(B))
    return cfg


def apply_overrides(text: str, overrides: list[str]) -> str:
    """Apply ``--set section.key=value`` pairs to the raw config text.

    Overrides rewrite the first matching entry (or append one to the
    section); the result is re-parsed, so every validation still runs.
    """
    lines = text.splitlines()
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"--set needs section.key=value, got {ov!r}")
        path, value = ov.split("=", 1)
        if "." not in path:
            raise ConfigError(f"--set needs section.key=value, got {ov!r}")
        section, key = path.rsplit(".", 1)
        section = section.replace(".", " ")  # trace.NAME -> 'trace NAME'
        header = f"[{section}]"
        out: list[str] = []
        in_section = False
        replaced = False
        section_found = False
        for line in lines:
            stripped = line.split("#", 1)[0].strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                if in_section and not replaced:
                    out.append(f"{key} = {value}")
                    replaced = True
                in_section = stripped[1:-1].strip() == section
                section_found = section_found or in_section
                out.append(line)
                continue
            if in_section and stripped and stripped.split("=", 1)[0].strip() == key:
                if not replaced:
                    out.append(f"{key} = {value}")
                    replaced = True
                continue
            out.append(line)
        if in_section and not replaced:
            out.append(f"{key} = {value}")
            replaced = True
        if not section_found:
            out.append(header)
            out.append(f"{key} = {value}")
        lines = out
    return "\n".join(lines)
