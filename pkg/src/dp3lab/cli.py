"""Command-line front end: ``python -m dp3lab <command> ...``.

Exit codes: 0 all checks pass, 1 an audit or numerical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Sequence

from . import __version__

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SUITE_NAMES = ("structure", "divisibility", "genfun-a", "genfun-b", "residues", "fence", "inequalities", "all")
FORMS = ("auto", "general", "imaginary_a", "suleimanov", "negative_a")


class UsageError(ValueError):
    pass


_TERM = re.compile(r"[+-]?[^+-]+(?:(?<=[eE])[+-][^+-]+)?")


def parse_number(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a real number: {text!r}") from None


def parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """Exact (re, im) from strings like '-2/3', '0.5i', 'i0.5', '-1/3+0.2i', '1-i/2'."""
    s = text.replace(" ", "").replace("j", "i")
    if not s:
        raise UsageError("empty number")
    terms = _TERM.findall(s)
    if "".join(terms) != s:
        raise UsageError(f"cannot parse {text!r} as x+yi")
    re_part = im_part = Fraction(0)
    for term in terms:
        if "i" in term:
            if term.count("i") > 1:
                raise UsageError(f"cannot parse {text!r} as x+yi")
            sign = -1 if term.startswith("-") else 1
            body = term.lstrip("+-").replace("*", "")
            coef = body.replace("i", "", 1)
            if coef.startswith("/"):
                coef = "1" + coef
            im_part += sign * (parse_number(coef) if coef else Fraction(1))
        else:
            re_part += parse_number(term)
    return re_part, im_part


def format_complex(z: tuple[Fraction, Fraction]) -> str:
    re_, im_ = z
    if im_ == 0:
        return str(re_)
    sign = "+" if im_ >= 0 else "-"
    return f"{re_}{sign}{abs(im_)}i"


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None = None
    depth: int | None = None
    suite: str | None = None
    a: str | None = None
    b: str | None = None
    tau: str | None = None
    t1: float | None = None
    t2: float | None = None
    samples: int | None = None
    tol: float | None = None
    form: str | None = None
    gate: str | None = None
    format: str = "text"
    out: str | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - fields
        if unknown:
            raise UsageError(f"unknown RunConfig fields {sorted(unknown)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _emit(cfg: RunConfig, text: str, stdout: IO[str]) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def cmd_coeffs(cfg: RunConfig, stdout: IO[str], stderr: IO[str]) -> int:
    from .coeffs import compute_u_table, dump_table, entry_to_json, structure_report

    N = cfg.n or 10
    if N < 1:
        raise UsageError("--n must be at least 1")
    table = compute_u_table(N)
    rep = structure_report(table, N)
    buf = io.StringIO()
    if cfg.format == "json":
        rows = []
        for n in range(1, N + 1):
            d = table.decomposition(n)
            rows.append({"n": n, "m": d.m_observed, "exponents": {str(k): e for k, e in d.exponents.items()},
                         **entry_to_json(table[n])})
        json.dump({"config": dataclasses.asdict(cfg), "entries": rows}, buf, indent=1, sort_keys=True)
        buf.write("\n")
    elif cfg.format == "csv":
        buf.write("n,m,numerator_ascending,denominator\n")
        for n in range(1, N + 1):
            f = table[n]
            nums = " ".join(str(c) for c in f.numerator.integer_coeffs())
            den = " ".join(f"{k}^{e}" for k, e in f.denominator.items())
            buf.write(f"{n},{table.decomposition(n).m_observed},{nums},{den}\n")
    else:
        dump_table(table, buf)
    _emit(cfg, buf.getvalue(), stdout)
    stderr.write(str(rep) + "\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _suite_job(args: tuple[str, int]):
    from .suites import run_suite

    return run_suite(*args)


def _threads() -> int:
    raw = os.environ.get("DP3LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"DP3LAB_THREADS must be an integer, got {raw!r}") from None


def cmd_verify(cfg: RunConfig, stdout: IO[str], stderr: IO[str]) -> int:
    from .suites import SUITES

    suite = cfg.suite or "all"
    if suite not in SUITE_NAMES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")
    N = cfg.n or cfg.depth or 12
    names = list(SUITES) if suite == "all" else [suite]
    workers = min(_threads(), len(names))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            reports = [r for batch in pool.map(_suite_job, [(s, N) for s in names]) for r in batch]
    else:
        reports = [r for s in names for r in _suite_job((s, N))]
    if cfg.format == "json":
        payload = {
            "config": dataclasses.asdict(cfg),
            "reports": [
                {"title": r.title, "checks": [dataclasses.asdict(c) for c in r.checks], "notes": r.notes}
                for r in reports
            ],
        }
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        text = "\n".join(str(r) for r in reports) + "\n"
        failed = sum(len(r.failures) for r in reports)
        total = sum(len(r.checks) for r in reports)
        text += f"== summary: {total - failed}/{total} checks pass\n"
    _emit(cfg, text, stdout)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


def _evaluator(cfg: RunConfig):
    from .numerics import SolutionEvaluator

    if cfg.a is None or cfg.b is None:
        raise UsageError("--a (or --alpha) and --b are required")
    a = parse_complex(cfg.a)
    b = parse_complex(cfg.b)
    if b[0] == 0 and b[1] == 0:
        raise UsageError("b must be nonzero")
    rtol = cfg.tol or 1e-10
    try:
        return SolutionEvaluator(a, complex(float(b[0]), float(b[1])), rtol=rtol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(cfg: RunConfig, stdout: IO[str], stderr: IO[str]) -> int:
    from .numerics import PoleEncountered, eval_u

    ev = _evaluator(cfg)
    if cfg.tau is None:
        raise UsageError("--tau is required")
    taus = [float(parse_number(t)) for t in cfg.tau.split(",")]
    if any(t < 0 for t in taus):
        raise UsageError("--tau values must be non-negative")
    try:
        values = [complex(v) for v in eval_u(ev, taus)] if max(taus) > 0 else [0j] * len(taus)
    except PoleEncountered as exc:
        stderr.write(f"FAIL  {exc}\n")
        return EXIT_FAIL
    buf = io.StringIO()
    if cfg.format == "json":
        json.dump({"config": dataclasses.asdict(cfg),
                   "values": [{"tau": t, "re_u": v.real, "im_u": v.imag} for t, v in zip(taus, values)]},
                  buf, indent=1, sort_keys=True)
        buf.write("\n")
    elif cfg.format == "csv":
        buf.write("tau,re_u,im_u\n")
        for t, v in zip(taus, values):
            buf.write(f"{t!r},{v.real!r},{v.imag!r}\n")
    else:
        for t, v in zip(taus, values):
            buf.write(f"u({t!r}) = {v.real!r} {'+' if v.imag >= 0 else '-'} {abs(v.imag)!r}i\n")
    _emit(cfg, buf.getvalue(), stdout)
    return EXIT_OK


def cmd_compare(cfg: RunConfig, stdout: IO[str], stderr: IO[str]) -> int:
    from .numerics import AsymptoticEvaluator, GateViolation, PoleEncountered, compare_asymptotics

    ev = _evaluator(cfg)
    if ev.b.imag != 0 or ev.b.real <= 0:
        raise UsageError("compare needs real b > 0")
    t1, t2 = cfg.t1 if cfg.t1 is not None else 5.0, cfg.t2 if cfg.t2 is not None else 40.0
    if not 0 < t1 < t2:
        raise UsageError("need 0 < --t1 < --t2")
    samples = cfg.samples or 400
    if samples < 2:
        raise UsageError("--samples must be at least 2")
    try:
        ae = AsymptoticEvaluator.for_parameters(ev.a, ev.b.real, cfg.gate or "weak")
    except GateViolation as exc:
        raise UsageError(str(exc)) from None
    form = None if cfg.form in (None, "auto") else cfg.form
    try:
        cmp = compare_asymptotics(ev, ae, (t1, t2), samples, form)
    except PoleEncountered as exc:
        stderr.write(f"FAIL  {exc}\n")
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    cmp.write_csv(buf)
    _emit(cfg, buf.getvalue(), stdout)
    stderr.write(str(cmp.report) + "\n")
    return EXIT_OK if cmp.report.ok else EXIT_FAIL


def cmd_fence(cfg: RunConfig, stdout: IO[str], stderr: IO[str]) -> int:
    from .fence import build_fence, fence_conjecture_audit, measured_profile, write_profile_csv
    from .suites import table

    N = cfg.n or 150
    depth = cfg.depth if cfg.depth is not None else min(N, 150)
    predicted = build_fence(N)
    measured = measured_profile(table(depth), depth) if depth > 0 else None
    buf = io.StringIO()
    write_profile_csv(measured, predicted, buf)
    _emit(cfg, buf.getvalue(), stdout)
    if measured is None:
        return EXIT_OK
    rep = fence_conjecture_audit(measured, predicted.truncated(depth))
    stderr.write(str(rep) + "\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


COMMANDS = {"coeffs": cmd_coeffs, "verify": cmd_verify, "eval": cmd_eval, "compare": cmd_compare, "fence": cmd_fence}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dp3lab", description="Exact and numerical audits for the odd dP3 solution vanishing at 0.")
    p.add_argument("--version", action="version", version=f"dp3lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=("text", "json", "csv")):
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--out", help="write the result here instead of stdout")
        sp.add_argument("--save-config", metavar="PATH", help="also write the RunConfig as JSON")

    sp = sub.add_parser("coeffs", help="exact table of u_2n(a) with structural checks")
    sp.add_argument("--n", type=int, default=10)
    common(sp)

    sp = sub.add_parser("verify", help="run audit suites")
    sp.add_argument("--suite", default="all", choices=SUITE_NAMES)
    sp.add_argument("--n", type=int, help="table depth (default 12)")
    sp.add_argument("--depth", type=int, help="alias of --n")
    common(sp, ("text", "json"))

    for name, helptext in (("eval", "evaluate u(tau)"), ("compare", "u against its large-tau asymptotics")):
        sp = sub.add_parser(name, help=helptext)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--a", help="complex parameter a, e.g. -2/3, 0.5i, -1/3+0.2i")
        g.add_argument("--alpha", help="shorthand for a = i*alpha")
        sp.add_argument("--b", required=True)
        sp.add_argument("--tol", type=float, help="relative tolerance of the integrator (default 1e-10)")
        if name == "eval":
            sp.add_argument("--tau", required=True, help="one value or a comma-separated list")
            common(sp)
        else:
            sp.add_argument("--t1", type=float, default=5.0)
            sp.add_argument("--t2", type=float, default=40.0)
            sp.add_argument("--samples", type=int, default=400)
            sp.add_argument("--form", choices=FORMS, default="auto")
            sp.add_argument("--gate", choices=("strict", "weak"), default="weak")
            common(sp, ("csv",))

    sp = sub.add_parser("fence", help="measured and predicted 3-adic heights as CSV")
    sp.add_argument("--n", type=int, default=150, help="length of the predicted profile")
    sp.add_argument("--depth", type=int, help="exact table depth for the measured column (0 to skip)")
    common(sp, ("csv",))

    sp = sub.add_parser("replay", help="rerun a saved RunConfig")
    sp.add_argument("config")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.command == "replay":
        try:
            with open(ns.config, encoding="utf-8") as fh:
                return RunConfig.from_json(fh.read())
        except OSError as exc:
            raise UsageError(str(exc)) from None
    a = getattr(ns, "a", None)
    alpha = getattr(ns, "alpha", None)
    if alpha is not None:
        re_, im_ = parse_complex(alpha)
        if im_ != 0:
            raise UsageError("--alpha must be real")
        a = format_complex((Fraction(0), re_))
    elif a is not None:
        a = format_complex(parse_complex(a))
    b = getattr(ns, "b", None)
    if b is not None:
        b = format_complex(parse_complex(b))
    return RunConfig(
        command=ns.command,
        n=getattr(ns, "n", None),
        depth=getattr(ns, "depth", None),
        suite=getattr(ns, "suite", None),
        a=a,
        b=b,
        tau=getattr(ns, "tau", None),
        t1=getattr(ns, "t1", None),
        t2=getattr(ns, "t2", None),
        samples=getattr(ns, "samples", None),
        tol=getattr(ns, "tol", None),
        form=getattr(ns, "form", None),
        gate=getattr(ns, "gate", None),
        format=getattr(ns, "format", "text"),
        out=getattr(ns, "out", None),
    )


def run(cfg: RunConfig, stdout: IO[str] = sys.stdout, stderr: IO[str] = sys.stderr) -> int:
    try:
        cmd = COMMANDS[cfg.command]
    except KeyError:
        raise UsageError(f"unknown command {cfg.command!r}") from None
    return cmd(cfg, stdout, stderr)


_VALUE_FLAGS = ("--a", "--b", "--alpha", "--tau")


def _glue_signed_values(argv: Sequence[str]) -> list[str]:
    """Turn '--a -1/2' into '--a=-1/2' so argparse does not read the value as a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2] not in ("-", ""):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None, stdout: IO[str] = sys.stdout, stderr: IO[str] = sys.stderr) -> int:
    try:
        ns = build_parser().parse_args(_glue_signed_values(sys.argv[1:] if argv is None else argv))
        cfg = config_from_args(ns)
        save = getattr(ns, "save_config", None)
        if save:
            with open(save, "w", encoding="utf-8") as fh:
                fh.write(cfg.to_json())
        return run(cfg, stdout, stderr)
    except UsageError as exc:
        stderr.write(f"dp3lab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
