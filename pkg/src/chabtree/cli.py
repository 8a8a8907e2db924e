"""Command-line entry point.

Exit codes: 0 success, 1 a verified property failed, 2 usage or
configuration error, 3 capacity exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from contextlib import redirect_stderr
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import chabauty, profile as prof
from .eig import EdgeIndexedGraph, export_dot, is_unimodular
from .errors import CapacityError, ChabtreeError
from .spec import PlusK, parse_spec
from .tree import build_tree_ball

COMMANDS = (
    "tree", "profile", "closure", "plusk", "quotient", "unimodular",
    "agreement", "primes", "torsion", "discrete", "valency1", "verify",
)
MODES = ("text", "json", "dot")


class ConfigError(ChabtreeError):
    pass


@dataclass
class RunConfig:
    base: str | None = None
    spec: str | None = None
    spec2: str | None = None
    root: str | None = None
    r: int = 2
    Rmax: int = 3
    D: int = 0
    k: int = 1
    kmax: int = 2
    n: int = 0
    M: int = 3
    p: int = 2
    depth: int = 3
    pi: frozenset | None = None
    mode: str = "text"
    cache_dir: str | None = None
    cap: int = prof.DEFAULT_CAP
    threads: int | None = None

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"unknown output mode {self.mode!r}")
        for name in ("r", "Rmax", "D", "k", "kmax", "n", "M", "p", "depth", "cap"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.pi is not None:
            from .permgrp import prime_factors

            for q in self.pi:
                if prime_factors(q) != {q}:
                    raise ConfigError(f"{q} in pi is not a prime")
        return self


_INT_KEYS = {"r", "Rmax", "D", "k", "kmax", "n", "M", "p", "depth", "cap", "threads"}
_ALIASES = {"rmax": "Rmax", "d": "D", "m": "M", "cache-dir": "cache_dir"}


def _convert(key: str, value: str):
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key} expects an integer, got {value!r}") from None
    if key == "pi":
        value = value.strip().strip("{}")
        try:
            return frozenset(int(x) for x in value.split(",") if x.strip())
        except ValueError:
            raise ConfigError(f"pi expects comma-separated primes, got {value!r}") from None
    return value


def _canonical_key(key: str) -> str:
    names = {f.name for f in fields(RunConfig)}
    key = _ALIASES.get(key, key).replace("-", "_")
    if key not in names:
        raise ConfigError(f"unknown key {key!r}")
    return key


def load_config(path) -> RunConfig:
    """key=value lines with '#' comments; unknown keys are errors."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            key = _canonical_key(key)
            values[key] = _convert(key, value)
        except ConfigError as exc:
            raise ConfigError(f"config line {lineno}: {exc}") from None
    return RunConfig(**values).validate()


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chabtree", description="Finite Chabauty certificates for groups acting on trees.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=None)
    common.add_argument("--base", default=S)
    common.add_argument("--spec", default=S)
    common.add_argument("--spec2", default=S)
    common.add_argument("--root", default=S)
    for name in ("r", "Rmax", "D", "k", "kmax", "n", "M", "p", "depth", "cap"):
        common.add_argument(f"--{name}", type=int, default=S)
    common.add_argument("--pi", default=S, help="comma-separated primes")
    common.add_argument("--mode", default=S, help="text | json | dot")
    common.add_argument("--cache-dir", dest="cache_dir", default=S)
    common.add_argument("--threads", type=int, default=S)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return ap


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = load_config(ns.config) if ns.config else RunConfig()
    overrides = {}
    for f in fields(RunConfig):
        if hasattr(ns, f.name):
            val = getattr(ns, f.name)
            overrides[f.name] = _convert(f.name, val) if f.name == "pi" else val
    return replace(cfg, **overrides).validate()


def _load(cfg: RunConfig, which: str = "spec"):
    text = getattr(cfg, which)
    base = None
    if cfg.base:
        try:
            base = EdgeIndexedGraph.from_text(Path(cfg.base).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read base graph {cfg.base}: {exc}") from None
    if text is None:
        if base is None:
            raise ConfigError(f"--{which} (or --base) is required")
        return base, None
    base_dir = Path(cfg.base).parent if cfg.base else Path.cwd()
    return parse_spec(text, base, base_dir)


def _root(cfg: RunConfig, base):
    return base.vertex(cfg.root) if cfg.root is not None else 0


def _need_spec(spec):
    if spec is None:
        raise ConfigError("this command needs --spec")
    return spec


def _digest(P) -> str:
    h = hashlib.sha256()
    for b in P.portraits:
        h.update(b)
    return h.hexdigest()


def _profile_summary(P, base) -> dict:
    return {
        "root": base.names[P.root_type],
        "r": P.r,
        "D": P.D,
        "size": len(P),
        "exact": P.exact,
        "digest": _digest(P),
    }


def _graph_dict(Q: EdgeIndexedGraph) -> dict:
    edges = []
    for i in range(0, len(Q.darts), 2):
        d, e = Q.darts[i], Q.darts[i + 1]
        edges.append({"u": Q.names[d.origin], "w": Q.names[d.target], "i12": d.index, "i21": e.index})
    return {"vertices": list(Q.names), "colors": list(Q.colors), "edges": edges}


def _execute(cmd: str, cfg: RunConfig) -> tuple[int, object]:
    kw = {"threads": cfg.threads, "cap": cfg.cap}
    if cmd == "verify":
        from .acceptance import run_all

        results = run_all()
        report = {f"{c.number:02d}_{c.name}": {"passed": c.passed, "detail": c.detail} for c in results}
        return (0 if all(c.passed for c in results) else 1), report
    if cmd == "valency1":
        rep = chabauty.valency_one_report(**kw)
        return (0 if rep.ok else 1), rep

    base, spec = _load(cfg)
    root = _root(cfg, base)
    if cmd == "tree":
        T = build_tree_ball(base, root, cfg.r, cap=min(cfg.cap * 5, 10**7))
        return 0, {"root": base.names[root], "r": cfg.r, "sphere_sizes": T.sphere_sizes(), "vertices": len(T)}
    if cmd == "unimodular":
        return 0, {"unimodular": is_unimodular(base)}
    spec = _need_spec(spec)
    if cmd == "profile":
        if cfg.D > 0:
            P = prof.moving_profile(spec, root, cfg.r, cfg.D, **kw)
        else:
            P = prof.own_profile(spec, root, cfg.r, **kw)
        return 0, _profile_summary(P, base)
    if cmd == "closure":
        rep = chabauty.closure_descent_suite(spec, root, cfg.r, cfg.kmax, **kw)
        return (0 if rep.ok else 1), rep
    if cmd == "plusk":
        P = prof.plus_k_profile(spec, cfg.k, root, cfg.r, **kw)
        return 0, _profile_summary(P, base)
    if cmd == "quotient":
        Q = chabauty.quotient_graph(spec, cfg.Rmax, root)
        if cfg.mode == "dot":
            return 0, export_dot(Q)
        return 0, _graph_dict(Q) if cfg.mode == "json" else Q.to_text()
    if cmd == "agreement":
        if cfg.spec2 is None:
            raise ConfigError("agreement needs --spec2")
        _, spec2 = _load(cfg, "spec2")
        return 0, chabauty.agreement_radius(spec, spec2, root, cfg.Rmax, cfg.D, **kw)
    if cmd == "primes":
        if cfg.pi is not None:
            rep = chabauty.verify_pro_pi_transfer(spec, cfg.pi, cfg.r, cfg.k, cfg.depth, root, **kw)
            return (0 if rep.ok else 1), rep
        return 0, {"n": cfg.n, "primes": sorted(chabauty.prime_content(spec, root, cfg.n, **kw))}
    if cmd == "torsion":
        return 0, chabauty.torsion_claim_check(spec, root, cfg.p, cfg.n, cfg.M, **kw)
    if cmd == "discrete":
        return 0, chabauty.discreteness_check(spec, root, cfg.Rmax, **kw)
    raise ConfigError(f"unknown command {cmd!r}")  # pragma: no cover


@dataclass
class CommandResult:
    code: int
    stdout: str
    stderr: str


def _format(payload, mode: str) -> str:
    if isinstance(payload, str):
        return payload if payload.endswith("\n") else payload + "\n"
    if mode == "json":
        return chabauty.to_json(payload) + "\n"
    return chabauty.render(payload) + "\n"


def run_command(argv) -> CommandResult:
    err = io.StringIO()
    try:
        with redirect_stderr(err):
            ns = _parser().parse_args(list(argv))
    except SystemExit as exc:
        return CommandResult(int(exc.code or 0), "", err.getvalue())
    try:
        cfg = _config_from_args(ns)
        # cache_dir falls back to CHABAUTY_CACHE_DIR, then .cache/
        prof.set_disk_cache(prof.ProfileCache(cfg.cache_dir))
        if cfg.mode == "dot" and ns.command != "quotient":
            raise ConfigError("dot output is only available for quotient")
        code, payload = _execute(ns.command, cfg)
        return CommandResult(code, _format(payload, cfg.mode), "")
    except CapacityError as exc:
        return CommandResult(3, "", f"error: capacity: {exc}\n")
    except ChabtreeError as exc:
        return CommandResult(2, "", f"error: {type(exc).__name__}: {exc}\n")
    finally:
        prof.set_disk_cache(None)


def main(argv=None) -> int:
    res = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.stdout)
    sys.stderr.write(res.stderr)
    return res.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
