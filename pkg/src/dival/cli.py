"""The `dival` command: experiment orchestration with deterministic artifacts.

Every subcommand resolves its configuration from defaults, an optional
key=value config file, and command-line overrides (overrides win), then
writes byte-deterministic CSV/JSON under --output_path together with a
manifest.json naming the produced files and the config hash.  Partial
outputs are removed if a run fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, bilinear, discrepancy, expsums, variance
from .arith import make_params
from .sieve import dump_table, sieve_table, unit_residues

DEFAULT_OUTPUT = "dival_out"


class ConfigError(ValueError):
    pass


def _parse_value(key: str, raw: str, kind):
    try:
        if kind is Fraction:
            return Fraction(raw)
        if kind is bool:
            return raw.lower() in ("1", "true", "yes")
        return kind(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"config field '{key}': cannot parse {raw!r} ({exc})") from exc


def _load_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config file {path!r}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config file {path!r} line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


class Session:
    """Tracks produced files, removes them on failure, writes the manifest."""

    def __init__(self, command: str, outdir: str, config: dict):
        self.command = command
        self.dir = Path(outdir)
        self.config = config
        self.files: list[str] = []

    def __enter__(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        return self

    def _canonical_config(self) -> str:
        return json.dumps(self.config, sort_keys=True, default=str)

    def write_text(self, name: str, text: str) -> None:
        (self.dir / name).write_text(text, newline="\n")
        self.files.append(name)

    def write_json(self, name: str, obj) -> None:
        obj = dict(obj)
        obj["config"] = {k: str(v) if isinstance(v, Fraction) else v for k, v in self.config.items()}
        self.write_text(name, json.dumps(obj, sort_keys=True, indent=2) + "\n")

    def write_binary(self, name: str, writer) -> None:
        writer(self.dir / name)
        self.files.append(name)

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for name in self.files:
                try:
                    (self.dir / name).unlink()
                except OSError:
                    pass
            return False
        manifest = {
            "command": self.command,
            "config_sha256": hashlib.sha256(self._canonical_config().encode()).hexdigest(),
            "files": sorted(self.files),
        }
        (self.dir / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", newline="\n"
        )
        return False


FIELDS = {
    "X": int,
    "k": int,
    "d": int,
    "a": int,
    "D": int,
    "lo": int,
    "hi": int,
    "q": int,
    "b": int,
    "c": float,
    "c1": int,
    "c2": int,
    "d1": int,
    "d2": int,
    "ell": int,
    "N": int,
    "H": float,
    "m1": int,
    "m2": int,
    "n": int,
    "varpi": Fraction,
    "kind": str,
    "mode": str,
    "second": str,
    "variant": str,
    "nu": str,
    "samples": int,
    "seed": int,
    "sample": int,
    "c_grid": str,
    "memory_budget": int,
    "thread_count": int,
    "output_path": str,
}


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < command-line overrides."""
    merged = dict(defaults)
    if args.config:
        file_cfg = _load_config_file(args.config)
        for key, raw in file_cfg.items():
            if key not in FIELDS:
                raise ConfigError(f"config field '{key}': unknown key")
            merged[key] = _parse_value(key, raw, FIELDS[key])
    for key in defaults:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
    if merged.get("thread_count", 1) is None:  # env fallback, then 1
        merged["thread_count"] = int(os.environ.get("DIVAL_THREADS", "1"))
    missing = [k for k, v in merged.items() if v is None]
    if missing:
        raise ConfigError(f"missing required config fields: {', '.join(sorted(missing))}")
    if merged.get("thread_count", 1) < 1:
        raise ConfigError("config field 'thread_count': must be >= 1")
    if merged.get("seed", 0) < 0:
        raise ConfigError("config field 'seed': must be >= 0")
    return merged


def _parallel_map(thread_count: int):
    if thread_count <= 1:
        return map
    pool = ThreadPoolExecutor(max_workers=thread_count)

    def mapper(fn, items):
        return pool.map(fn, items)

    return mapper


def _float_repr(x) -> str:
    return repr(float(x))


def _records_csv(records) -> str:
    lines = ["d,a,delta_num,delta_den,abs_delta_float"]
    lines += [rec.csv_row() for rec in records]
    return "\n".join(lines) + "\n"


def cmd_sieve(cfg: dict, session: Session) -> None:
    table = sieve_table(cfg["kind"], cfg["lo"], cfg["hi"], k=cfg["k"],
                        memory_budget=cfg["memory_budget"])
    session.write_binary("table.bin", lambda path: dump_table(table, path))
    session.write_json("table.json", {
        "kind": table.kind, "k": table.k, "lo": table.lo, "hi": table.hi,
        "sum": float(table.values.sum()),
    })


def cmd_delta(cfg: dict, session: Session) -> None:
    table = sieve_table(cfg["kind"], 1, cfg["X"], k=cfg["k"])
    d = cfg["d"]
    if cfg["a"] >= 0:
        pairs = [(cfg["a"], discrepancy.delta(table, d, cfg["a"]).delta)]
    else:  # a = -1 means every reduced residue
        pairs = sorted(discrepancy.delta_profile(table, d).items())
    lines = ["d,a,delta_num,delta_den,abs_delta_float"]
    lines += [
        f"{d},{a},{v.numerator},{v.denominator},{abs(float(v))!r}" for a, v in pairs
    ]
    session.write_text("delta.csv", "\n".join(lines) + "\n")


def cmd_family(cfg: dict, session: Session) -> None:
    params = make_params(cfg["X"], cfg["k"], cfg["varpi"])
    family = discrepancy.build_family(params, cfg["a"])
    if family.members:
        table = sieve_table("tauk", 1, cfg["X"], k=cfg["k"])
        pmap = _parallel_map(cfg["thread_count"])
        report = discrepancy.theorem1_experiment(params, cfg["a"], family=family,
                                                 table=table, parallel_map=pmap)
        recs = [discrepancy.delta(table, d, cfg["a"] % d) for d in family.members]
    else:
        report = {
            "experiment": "averaged_discrepancy",
            "params": params.to_json_dict(),
            "a": cfg["a"],
            "member_count": 0,
            "lhs_num": "0", "lhs_den": "1", "lhs": 0.0,
            "rhs": math.exp((1 - float(params.theta_k)) * math.log(params.X)),
            "ratio": 0.0,
            "scaled": params.scaled,
        }
        recs = []
    report["empty"] = not family.members
    session.write_text("family.csv", _records_csv(recs))
    session.write_json("theorem1.json", report)


def cmd_expsum(cfg: dict, session: Session) -> None:
    lines = []
    kind = cfg["kind"]
    if kind == "ramanujan":
        val = expsums.ramanujan(cfg["q"], cfg["n"])
        lines.append(f"ramanujan,{cfg['q']},{cfg['n']},{_float_repr(abs(val))},{_float_repr(abs(val))},1.0")
    elif kind == "kloosterman":
        if cfg["sample"]:
            rng = np.random.Generator(np.random.Philox(key=cfg["seed"]))
            for _ in range(cfg["sample"]):
                q = int(rng.integers(2, 1000))
                a = int(rng.integers(0, q))
                b = int(rng.integers(0, q))
                res = expsums.kloosterman(a, b, q)
                lines.append(expsums.expsum_csv_row("kloosterman", [a, b, q], res))
        else:
            res = expsums.kloosterman(cfg["a"], cfg["b"], cfg["q"])
            lines.append(expsums.expsum_csv_row("kloosterman", [cfg["a"], cfg["b"], cfg["q"]], res))
    elif kind == "incomplete":
        res = expsums.incomplete_kloosterman(cfg["c1"], cfg["d1"], cfg["c2"], cfg["d2"],
                                             cfg["ell"], cfg["N"])
        params = [cfg["c1"], cfg["d1"], cfg["c2"], cfg["d2"], cfg["ell"], cfg["N"]]
        lines.append(expsums.expsum_csv_row("incomplete", params, res))
    elif kind == "minsum":
        res = expsums.minsum(cfg["c1"], cfg["d"], cfg["H"], cfg["N"])
        lines.append(expsums.expsum_csv_row("minsum", [cfg["c1"], cfg["d"], cfg["H"], cfg["N"]], res))
    elif kind == "birch":
        res = expsums.birch_bombieri_T(cfg["k"], cfg["m1"], cfg["m2"], cfg["q"])
        lines.append(expsums.expsum_csv_row("birch", [cfg["k"], cfg["m1"], cfg["m2"], cfg["q"]], res))
    else:
        raise ConfigError(f"config field 'kind': unknown exponential sum {kind!r}")
    session.write_text("expsum.csv", "sum_kind,params...,abs_value,bound,ratio\n" + "\n".join(lines) + "\n")


def cmd_variance(cfg: dict, session: Session) -> None:
    mode = cfg["mode"]
    params = make_params(cfg["X"], cfg["k"]).to_json_dict()
    if mode == "conjecture":
        rep = variance.conjecture_report(cfg["k"], cfg["X"], cfg["d"],
                                         samples=cfg["samples"], seed=cfg["seed"])
        rep["params"], rep["scaled"] = params, params["scaled"]
        session.write_json("variance.json", rep)
    elif mode == "theorem13":
        rep = variance.theorem13_experiment(cfg["k"], cfg["X"], cfg["D"])
        rep["params"], rep["scaled"] = params, params["scaled"]
        session.write_json("variance.json", rep)
    elif mode == "gamma":
        lines = ["k,c,value,std_error,samples,seed"]
        start, stop, step = (float(x) for x in cfg["c_grid"].split(":"))
        c = start
        while c <= stop + 1e-12:
            est = variance.gamma_k(cfg["k"], c, cfg["samples"], seed=cfg["seed"])
            lines.append(
                f"{cfg['k']},{_float_repr(c)},{_float_repr(est.value)},"
                f"{_float_repr(est.std_error)},{cfg['samples']},{cfg['seed']}"
            )
            c += step
        session.write_text("gamma.csv", "\n".join(lines) + "\n")
    else:
        raise ConfigError(f"config field 'mode': unknown mode {mode!r}")


def cmd_bilinear(cfg: dict, session: Session) -> None:
    rep = bilinear.theorem14_experiment(cfg["k"], cfg["X"], cfg["D"],
                                        second=cfg["second"], variant=cfg["variant"])
    params = make_params(cfg["X"], cfg["k"]).to_json_dict()
    rep["params"], rep["scaled"] = params, params["scaled"]
    session.write_json("theorem14.json", rep)
    t1 = sieve_table("tauk", 1, cfg["X"], k=cfg["k"])
    lines = ["d,a,e_num,e_den,variant"]
    for d in range(1, min(cfg["D"], 50) + 1):
        for a in unit_residues(d):
            lines.append(bilinear.bilinear_E(t1, t1, d, a, cfg["variant"]).csv_row())
    session.write_text("bilinear.csv", "\n".join(lines) + "\n")


def cmd_classify(cfg: dict, session: Session) -> None:
    nu = tuple(float(x) for x in cfg["nu"].split(","))
    case = discrepancy.classify_case(nu, cfg["varpi"])
    session.write_json("classify.json", {"nu": list(nu), "varpi": str(cfg["varpi"]), "case": case})


def cmd_verify(cfg: dict, session: Session) -> int:
    results = acceptance.run_all()
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}  {res.detail}")
    summary = {
        "criteria": [
            {"name": r.name, "passed": r.passed, "detail": r.detail,
             "elapsed_s": round(r.elapsed, 3)}
            for r in results
        ],
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
    }
    session.write_json("verify.json", summary)
    return 0 if summary["failed"] == 0 else 1


SUBCOMMANDS = {
    "sieve": (cmd_sieve, {"kind": "tauk", "k": 2, "lo": 1, "hi": 1000,
                          "memory_budget": 2 * 1024**3}),
    "delta": (cmd_delta, {"kind": "tauk", "X": 10, "k": 2, "d": 3, "a": 1}),
    "family": (cmd_family, {"X": 10**5, "k": 4, "varpi": Fraction(1, 1168), "a": 1,
                            "thread_count": None}),
    "expsum": (cmd_expsum, {"kind": "kloosterman", "q": 11, "a": 1, "b": 1, "n": 1,
                            "c1": 0, "c2": 0, "d": 11, "d1": 11, "d2": 1, "ell": 0,
                            "N": 100, "H": 10.0, "m1": 0, "m2": 0, "k": 1,
                            "sample": 0, "seed": 0}),
    "variance": (cmd_variance, {"mode": "conjecture", "k": 2, "X": 10**4, "d": 101,
                                "D": 50, "samples": 10**5, "seed": 0,
                                "c_grid": "0.1:1.0:0.1"}),
    "bilinear": (cmd_bilinear, {"k": 4, "X": 10**3, "D": 50, "second": "tauk",
                                "variant": "unrestricted"}),
    "classify": (cmd_classify, {"nu": "0.5,0.3", "varpi": Fraction(1, 1168)}),
    "verify": (cmd_verify, {}),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dival", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, defaults) in SUBCOMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--output_path", default=None)
        for key, default in defaults.items():
            kind = FIELDS[key]
            if kind is Fraction:
                p.add_argument(f"--{key}", type=Fraction, default=None)
            else:
                p.add_argument(f"--{key}", type=kind, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler, defaults = SUBCOMMANDS[args.command]
    try:
        cfg = _resolve(args, defaults)
        outdir = args.output_path or DEFAULT_OUTPUT
        cfg_for_echo = dict(cfg)
        cfg_for_echo["command"] = args.command
        with Session(args.command, outdir, cfg_for_echo) as session:
            rc = handler(cfg, session)
        return int(rc or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, MemoryError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
