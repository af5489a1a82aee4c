"""Command-line entry point: ``conclusive {run,sweep,sample,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
The default output format comes from ``$CONCLUSIVE_FORMAT`` (``json`` or
``csv``), falling back to ``json``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .analysis import (
    PROTOCOLS,
    binomial_bound,
    bit_report,
    enumerate_protocol,
    monte_carlo,
    run_protocol,
    success_probability,
)
from .errors import SimulationError
from .params import ChannelSpec, InputQubit

FORMAT_ENV = "CONCLUSIVE_FORMAT"
SWEEP_COLUMNS = ["protocol", "beta", "p_success", "expected_bits", "fidelity_given_success"]
DEFAULT_BETAS = "0.1,0.2,0.3,0.4,0.5,0.6,max"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    protocol: str
    channel: ChannelSpec
    q: InputQubit
    seed: int = 0
    shots: int = 1
    fmt: str = "json"
    out: str | None = None


def _complex_pair(z: complex) -> list[float]:
    return [round(z.real, 12), round(z.imag, 12)]


def _channel(alpha, beta) -> ChannelSpec:
    try:
        if alpha is None and beta is None:
            return ChannelSpec.maximal()
        if alpha is None:
            return ChannelSpec.from_beta(beta)
        if beta is None:
            return ChannelSpec.from_alpha(alpha)
        return ChannelSpec(alpha, beta)
    except SimulationError as e:
        raise ConfigError(str(e)) from None


def _input(a, b) -> InputQubit:
    if a is None and b is None:
        return InputQubit.reference()
    if a is None or b is None:
        raise ConfigError("give both --a and --b, or neither")
    try:
        return InputQubit(complex(a.replace(" ", "")), complex(b.replace(" ", "")))
    except ValueError as e:
        raise ConfigError(f"bad input amplitude: {e}") from None


def _config(args) -> RunConfig:
    if args.protocol not in PROTOCOLS:
        raise ConfigError(f"unknown protocol {args.protocol!r}; choose from {', '.join(PROTOCOLS)}")
    shots = getattr(args, "shots", 1)
    if shots < 1:
        raise ConfigError("--shots must be >= 1")
    return RunConfig(
        args.protocol,
        _channel(args.alpha, args.beta),
        _input(args.a, args.b),
        args.seed,
        shots,
        args.format,
        args.out,
    )


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(cfg: RunConfig) -> dict:
    return {
        "protocol": cfg.protocol,
        "channel": {"alpha": cfg.channel.alpha, "beta": cfg.channel.beta},
        "input": {"a": _complex_pair(cfg.q.a), "b": _complex_pair(cfg.q.b)},
        "seed": cfg.seed,
    }


def cmd_run(cfg: RunConfig) -> str:
    trace = run_protocol(cfg.protocol, cfg.q, cfg.channel, np.random.default_rng(cfg.seed))
    doc = _header(cfg) | trace.to_dict()
    if cfg.fmt == "csv":
        row = {
            "protocol": cfg.protocol,
            "alpha": cfg.channel.alpha,
            "beta": cfg.channel.beta,
            "seed": cfg.seed,
            "path": "/".join(trace.path),
            "success": trace.success,
            "fidelity": doc["fidelity"],
            "bits": ";".join(f"{k}={v}" for k, v in sorted(trace.bits.items())),
        }
        return _csv([row], list(row))
    return json.dumps(doc, sort_keys=True) + "\n"


def _parse_betas(text: str) -> list[float]:
    betas = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        try:
            beta = math.sqrt(0.5) if tok in ("max", "1/sqrt2") else float(tok)
        except ValueError:
            raise ConfigError(f"bad beta value {tok!r}") from None
        if not 0.0 < beta <= math.sqrt(0.5) + 1e-12:
            raise ConfigError(f"beta={beta} outside (0, 1/sqrt2]")
        betas.append(min(beta, math.sqrt(0.5)))
    if not betas:
        raise ConfigError("empty beta grid")
    return betas


def sweep_rows(protocols: list[str], betas: list[float]) -> list[dict]:
    rows = []
    for pid in protocols:
        for beta in betas:
            c = ChannelSpec.from_beta(beta)
            p = success_probability(pid, c)
            d = enumerate_protocol(pid, InputQubit.reference(), c)
            ok = [b for b in d.branches if b.success]
            fid = None
            if ok:
                fid = round(math.fsum(b.probability * b.fidelity for b in ok) / math.fsum(b.probability for b in ok), 12)
            rows.append(
                {
                    "protocol": pid,
                    "beta": round(beta, 15),
                    "p_success": round(p, 12),
                    "expected_bits": round(bit_report(d).expected_total, 12),
                    "fidelity_given_success": fid,
                }
            )
    return rows


def cmd_sweep(protocols: list[str], betas: list[float], fmt: str) -> str:
    rows = sweep_rows(protocols, betas)
    if fmt == "csv":
        return _csv([{k: ("" if v is None else v) for k, v in r.items()} for r in rows], SWEEP_COLUMNS)
    return json.dumps(rows, sort_keys=True) + "\n"


def cmd_sample(cfg: RunConfig) -> str:
    stats = monte_carlo(cfg.protocol, cfg.q, cfg.channel, cfg.shots, cfg.seed)
    exact = enumerate_protocol(cfg.protocol, cfg.q, cfg.channel).success_probability
    bound = binomial_bound(exact, cfg.shots)
    dev = abs(stats.success_frequency - exact)
    doc = _header(cfg) | stats.to_dict()
    doc |= {
        "exact_probability": round(exact, 12),
        "deviation": dev,
        "bound_4sigma": bound,
        "verdict": "PASS" if dev <= bound + 1e-15 else "FAIL",
    }
    if cfg.fmt == "csv":
        cols = ["protocol", "beta", "seed", "shots", "successes", "success_frequency",
                "exact_probability", "bound_4sigma", "mean_fidelity", "verdict"]
        return _csv([doc | {"beta": cfg.channel.beta}], cols)
    return json.dumps(doc, sort_keys=True) + "\n"


def cmd_verify(fmt: str = "text", out: str | None = None) -> int:
    from .verify import run_all

    if fmt == "json":
        results = run_all()
        _emit(json.dumps([r.to_dict() for r in results], indent=2) + "\n", out)
    else:
        results = run_all(echo=print)
        failed = sum(not r.passed for r in results)
        print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    default_fmt = os.environ.get(FORMAT_ENV, "json")
    if default_fmt not in ("json", "csv"):
        default_fmt = "json"
    parser = argparse.ArgumentParser(prog="conclusive", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, shots=False):
        p.add_argument("--protocol", required=True, help=", ".join(PROTOCOLS))
        p.add_argument("--beta", type=float, help="smaller Schmidt coefficient (default 1/sqrt2)")
        p.add_argument("--alpha", type=float, help="larger Schmidt coefficient")
        p.add_argument("--a", help="input amplitude of |0>, e.g. 0.6 or 0.6+0.8j")
        p.add_argument("--b", help="input amplitude of |1>")
        p.add_argument("--seed", type=int, default=0)
        if shots:
            p.add_argument("--shots", type=int, default=100_000)
        p.add_argument("--format", choices=("json", "csv"), default=default_fmt)
        p.add_argument("--out", help="write here instead of stdout")

    common(sub.add_parser("run", help="one seeded protocol run"))
    common(sub.add_parser("sample", help="seeded Monte Carlo against the exact value"), shots=True)

    sw = sub.add_parser("sweep", help="exact success probability over a beta grid")
    sw.add_argument("--protocols", default=",".join(PROTOCOLS))
    sw.add_argument("--betas", default=DEFAULT_BETAS, help="comma list; 'max' = 1/sqrt2")
    sw.add_argument("--format", choices=("json", "csv"), default=default_fmt)
    sw.add_argument("--out")

    ve = sub.add_parser("verify", help="run the acceptance checks")
    ve.add_argument("--format", choices=("text", "json"), default="text")
    ve.add_argument("--out")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args.format, args.out)
        if args.command == "sweep":
            protocols = [p.strip() for p in args.protocols.split(",") if p.strip()]
            unknown = [p for p in protocols if p not in PROTOCOLS]
            if unknown or not protocols:
                raise ConfigError(f"unknown protocol(s) {unknown}; choose from {', '.join(PROTOCOLS)}")
            _emit(cmd_sweep(protocols, _parse_betas(args.betas), args.format), args.out)
            return 0
        cfg = _config(args)
        text = cmd_run(cfg) if args.command == "run" else cmd_sample(cfg)
        _emit(text, cfg.out)
        return 0
    except (ConfigError, SimulationError) as e:
        print(f"conclusive: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
