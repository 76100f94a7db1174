"""Command-line driver: every verification as a subcommand, JSON report on the output.

Exit codes: 0 verified, 1 an asserted check failed, 2 invalid configuration,
3 inconclusive (a budget or time limit was hit).
"""

from __future__ import annotations

import argparse
import json
import math
import signal
import sys
import time
from dataclasses import asdict, dataclass

from . import __version__
from .action import (build_action, borel, check_flag_transitivity, kernel_order, object_action_order,
                     sp_order_check, verify_parabolic_structure, verify_slim_structure)
from .amalgams import build_parabolic_amalgam, build_slim_amalgam, check_coherence, manifest, verify_completion
from .builders import GAMMA_FIELDS, GammaSpec, PiSpec, build_gamma, build_pi, residue_iso_phi
from .cover import build_cover, cover_distances, deck_regularity, verify_2cover
from .geometry import check_geometry
from .homotopy import INCONCLUSIVE, NONTRIVIAL, TRIVIAL, certify_trivial, pi1_presentation

REPORT_SCHEMA = "amalgam-lab-report/1"
EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3
COMMANDS = ("geometry", "pi1", "cover", "action", "amalgam", "all")


class ConfigError(ValueError):
    pass


class TimeLimit(Exception):
    pass


@dataclass
class RunConfig:
    task: str
    q: int = 2
    n: int = 4
    d: int | None = None
    pi: bool = False
    slim: bool = False
    rank2: bool = False
    max_cosets: int = 1_000_000
    time_limit: float | None = None
    threads: int = 1
    out: str = "-"
    timing: bool = True

    def validate(self):
        if self.task not in COMMANDS:
            raise ConfigError(f"unknown task {self.task!r}")
        if self.q not in GAMMA_FIELDS:
            raise ConfigError(f"q must be one of {GAMMA_FIELDS}")
        if not 2 <= self.n <= 8:
            raise ConfigError("n must lie in 2..8")
        if self.d is not None and self.d != self.n % 2:
            raise ConfigError("d must equal n mod 2 (the radical of a maximal-rank form)")
        if self.max_cosets < 1 or self.threads < 1:
            raise ConfigError("budgets must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError("time limit must be positive")
        if self.pi and self.n < 4:
            raise ConfigError("Pi(p, H) needs n >= 4")

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("timing")
        out.pop("out")
        return out


@dataclass
class Outcome:
    status: int
    result: dict
    summary: str


def _status_name(code: int) -> str:
    return {EXIT_OK: "verified", EXIT_FAILED: "failed", EXIT_INCONCLUSIVE: "inconclusive"}[code]


def _combine(codes) -> int:
    codes = list(codes)
    if EXIT_FAILED in codes:
        return EXIT_FAILED
    if EXIT_INCONCLUSIVE in codes:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else "inf"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


def _strip_timing(x):
    if isinstance(x, dict):
        return {k: _strip_timing(v) for k, v in x.items() if k not in ("seconds", "timing")}
    if isinstance(x, list):
        return [_strip_timing(v) for v in x]
    return x


# -- subcommands ---------------------------------------------------------------

def _geometry_for(cfg: RunConfig):
    spec = GammaSpec(cfg.q, cfg.n)
    if cfg.pi:
        return build_pi(PiSpec(spec))
    return build_gamma(spec)


def cmd_geometry(cfg: RunConfig) -> Outcome:
    g = _geometry_for(cfg)
    rep = check_geometry(g)
    expected = None
    if not cfg.pi and cfg.n >= 3:
        expected = 2
    elif cfg.pi and cfg.n % 2 == 0:
        expected = 1
    ok = rep.ok(expected)
    result = {
        "name": g.name, "type_counts": list(rep.type_counts), "chambers": g.count_flags(g.types),
        "transversal": rep.transversal, "string_diagram": rep.string_diagram,
        "residually_connected": rep.residually_connected, "point_diameter": rep.point_diameter,
        "expected_diameter": expected, "geometry": g.to_json(),
    }
    if not cfg.pi and cfg.n >= 3:
        phi = residue_iso_phi(g, 0)
        result["phi_certified"] = phi.certified
        ok = ok and phi.certified
    summary = f"{g.name}: counts {rep.type_counts}, diameter {rep.point_diameter}, ok={ok}"
    return Outcome(EXIT_OK if ok else EXIT_FAILED, result, summary)


def _pi1_expectation(cfg: RunConfig):
    """(expected status, expected order) when a claim covers the parameters, else None."""
    if cfg.pi:
        if (cfg.q, cfg.n) == (2, 6):
            return NONTRIVIAL, 2
        if cfg.q >= 3:
            return TRIVIAL, 1
        return None
    if cfg.n >= 4 and (cfg.q >= 3 or cfg.n % 2 == 0):
        return TRIVIAL, 1
    return None


def cmd_pi1(cfg: RunConfig) -> Outcome:
    g = _geometry_for(cfg)
    pp = pi1_presentation(g)
    verdict = certify_trivial(pp, cfg.max_cosets)
    expect = _pi1_expectation(cfg)
    result = {"name": g.name, "generators": pp.presentation.ngens, "relators": len(pp.presentation.relators),
              "verdict": verdict.to_json(), "expected": list(expect) if expect else None}
    if verdict.status == INCONCLUSIVE:
        code = EXIT_INCONCLUSIVE
    elif expect is None:
        code = EXIT_OK
    else:
        code = EXIT_OK if (verdict.status, verdict.order) == expect else EXIT_FAILED
    summary = f"pi1({g.name}): {verdict.status}, order {verdict.order}"
    return Outcome(code, result, summary)


def cmd_cover(cfg: RunConfig) -> Outcome:
    if (cfg.q, cfg.n) != (2, 6):
        raise ConfigError("the double cover exists for q = 2, n = 6 only")
    cv = build_cover()
    rep = verify_2cover(cv)
    dist = cover_distances(cv)
    deck = deck_regularity(cv)
    geo = check_geometry(cv.geometry)
    pi1 = certify_trivial(pi1_presentation(cv.geometry), cfg.max_cosets)
    ok = rep.ok and dist.ok and deck.ok and geo.ok() and pi1.status == TRIVIAL
    result = {
        "type_counts": list(cv.geometry.type_counts()), "cover": rep.to_json(), "distances": dist.to_json(),
        "all_other_pairs_within_two": dist.all_other_pairs_within_two,
        "distance_note": "every fiber pair q+, q- is at distance 3; pairs over distinct base points are within 2",
        "deck": deck.to_json(), "geometry_checks": {"transversal": geo.transversal,
                                                    "string_diagram": geo.string_diagram,
                                                    "residually_connected": geo.residually_connected},
        "pi1": pi1.to_json(), "geometry": cv.to_json(),
    }
    summary = f"cover: 2-cover {rep.ok}, d(Q+,Q-)={dist.q_plus_minus}, deck {deck.ok}, pi1 {pi1.status}"
    code = EXIT_INCONCLUSIVE if pi1.status == INCONCLUSIVE else (EXIT_OK if ok else EXIT_FAILED)
    return Outcome(code, result, summary)


def cmd_action(cfg: RunConfig) -> Outcome:
    if cfg.n % 2 or cfg.n not in (4, 6):
        raise ConfigError("the action report needs n in {4, 6}")
    act = build_action(cfg.q, cfg.n)
    r = cfg.n // 2
    sp = sp_order_check(act)
    b = borel(act).order()
    ker = kernel_order(act)
    ft = check_flag_transitivity(act)
    par = verify_parabolic_structure(act)
    result = {
        "sp_order": sp.to_json(), "borel_order": b, "borel_expected": (cfg.q * (cfg.q - 1)) ** r,
        "kernel_order": ker, "object_action_order": object_action_order(act),
        "flag_transitive": ft.ok,
        "flag_orbits": {",".join(map(str, J)): {"orbit": o, "flags": c} for J, c in
                        ((J, v[1]) for J, v in ft.per_type.items()) for o in [ft.per_type[J][0]]},
        "parabolics": par.to_json(),
    }
    ok = sp.ok and ft.ok and b == (cfg.q * (cfg.q - 1)) ** r and (par.ok or not par.asserted)
    if cfg.q in (2, 3):
        slim = verify_slim_structure(act.s)
        result["slim"] = slim.to_json()
        ok = ok and slim.ok
    summary = f"Sp({cfg.n},{cfg.q}) order {sp.got}, Borel {b}, kernel {ker}, flag-transitive {ft.ok}"
    return Outcome(EXIT_OK if ok else EXIT_FAILED, result, summary)


def cmd_amalgam(cfg: RunConfig) -> Outcome:
    if cfg.n % 2 or cfg.n not in (4, 6):
        raise ConfigError("amalgams need n in {4, 6}")
    if cfg.slim:
        if cfg.q not in (2, 3):
            raise ConfigError("the slim amalgam needs q in {2, 3}")
        from .symplectic import SympSpace
        a = build_slim_amalgam(SympSpace.standard(cfg.q, cfg.n))
    else:
        act = build_action(cfg.q, cfg.n)
        a = build_parabolic_amalgam(act, max_rank=2, maximal=not cfg.rank2)
    coh = check_coherence(a)
    verdict = verify_completion(a, max_cosets=cfg.max_cosets)
    result = {"coherent": coh.ok, "verdict": verdict.to_json(), "manifest": manifest(a)}
    if verdict.iso == "inconclusive":
        code = EXIT_INCONCLUSIVE
    elif a.asserted and not (verdict.verified and coh.ok):
        code = EXIT_FAILED
    else:
        code = EXIT_OK
    summary = (f"{a.name}: completion order {verdict.completion_order} vs {verdict.target_order}, "
               f"iso {verdict.iso}{'' if a.asserted else ' (reported, not asserted)'}")
    return Outcome(code, result, summary)


def cmd_all(cfg: RunConfig) -> Outcome:
    parts = {}
    codes = []
    lines = []
    plan = [("geometry", cmd_geometry), ("pi1", cmd_pi1)]
    if cfg.n % 2 == 0 and cfg.n in (4, 6):
        plan += [("action", cmd_action), ("amalgam", cmd_amalgam)]
    if (cfg.q, cfg.n) == (2, 6):
        plan.append(("cover", cmd_cover))
    for name, fn in plan:
        out = fn(cfg)
        parts[name] = {"status": _status_name(out.status), "result": out.result}
        codes.append(out.status)
        lines.append(out.summary)
    return Outcome(_combine(codes), parts, "\n".join(lines))


HANDLERS = {"geometry": cmd_geometry, "pi1": cmd_pi1, "cover": cmd_cover, "action": cmd_action,
            "amalgam": cmd_amalgam, "all": cmd_all}


# -- driver ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amalgam-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="task", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--q", type=int, default=2, help="field size (prime)")
        sp.add_argument("--n", type=int, default=4, help="dimension of V")
        sp.add_argument("--d", type=int, default=None, help="radical dimension (must be n mod 2)")
        sp.add_argument("--pi", action="store_true", help="use Pi(p, H) instead of Gamma(V)")
        sp.add_argument("--slim", action="store_true", help="slim amalgam instead of parabolics")
        sp.add_argument("--rank2", action="store_true", help="parabolics P_J with |J| <= 2 instead of maximal")
        sp.add_argument("--max-cosets", type=int, default=1_000_000, help="coset enumeration budget")
        sp.add_argument("--time-limit", type=float, default=None, help="seconds before giving up (exit 3)")
        sp.add_argument("--threads", type=int, default=1, help="accepted for compatibility; runs are serial")
        sp.add_argument("--out", default="-", help="JSON report path ('-' for standard output)")
        sp.add_argument("--no-timing", action="store_true", help="omit timings for byte-identical reports")
    return parser


def _alarm(signum, frame):
    raise TimeLimit()


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Validate, execute and package one task; returns ``(exit code, report)``."""
    t0 = time.perf_counter()
    try:
        cfg.validate()
    except ConfigError as exc:
        return EXIT_INVALID, {"schema": REPORT_SCHEMA, "command": cfg.task, "config": cfg.echo(),
                              "status": "invalid", "error": str(exc)}
    old = None
    if cfg.time_limit is not None and hasattr(signal, "SIGALRM"):
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, cfg.time_limit)
    try:
        out = HANDLERS[cfg.task](cfg)
        code, result, summary = out.status, out.result, out.summary
    except ConfigError as exc:
        return EXIT_INVALID, {"schema": REPORT_SCHEMA, "command": cfg.task, "config": cfg.echo(),
                              "status": "invalid", "error": str(exc)}
    except TimeLimit:
        code, result, summary = EXIT_INCONCLUSIVE, {}, f"time limit of {cfg.time_limit}s reached"
    finally:
        if old is not None:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    report = {"schema": REPORT_SCHEMA, "version": __version__, "command": cfg.task, "config": cfg.echo(),
              "status": _status_name(code), "exit_code": code, "result": _jsonable(result),
              "summary": summary, "timing": {"total_seconds": round(time.perf_counter() - t0, 3)}}
    if not cfg.timing:
        report = _strip_timing(report)
    return code, report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(task=args.task, q=args.q, n=args.n, d=args.d, pi=args.pi, slim=args.slim, rank2=args.rank2,
                    max_cosets=args.max_cosets, time_limit=args.time_limit, threads=args.threads, out=args.out,
                    timing=not args.no_timing)
    code, report = run(cfg)
    text = json.dumps(report, sort_keys=True, indent=1) + "\n"
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    print(report.get("summary") or report.get("error", ""), file=sys.stderr)
    print(f"status: {report['status']} (exit {code})", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
