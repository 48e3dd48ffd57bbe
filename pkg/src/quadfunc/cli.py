"""``quadfunc`` command line: derive, solve-base, verify-families, certify,
mine-collisions and cross-k.

Exit status: 0 when everything checked out, 1 when a mathematical check
found a counterexample, 2 when a budget ran out or something stayed
unresolved (also used for invalid arguments, as argparse does).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from quadfunc.cache import ReportCache
from quadfunc.derive import BudgetExhausted, DerivationBudget, derive_expressions
from quadfunc.families import standard_families, verify_family
from quadfunc.induction import DomainError, certify, threshold_A
from quadfunc.quadform import collisions
from quadfunc.solve import InsufficientConstraints, SolveBudget, factored_text, solve_base

EXIT_OK, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2

COMMANDS = ("derive", "solve-base", "verify-families", "certify", "mine-collisions", "cross-k")


@dataclass(frozen=True)
class RunConfig:
    command: str
    k: Optional[int] = None
    target: Optional[int] = None
    nmax: int = 1000
    umax: int = 300
    scan: int = 2000
    degree_cap: int = 8
    reject_scan: int = 2000
    route: str = "classic"
    seed: int = 0
    mutate: Tuple[Tuple[int, str], ...] = ()
    k_min: int = 2
    k_max: int = 9
    format: str = "markdown"
    cache_dir: Optional[str] = None
    use_cache: bool = True
    timing: bool = False

    def __post_init__(self):
        for name in ("nmax", "umax", "scan", "degree_cap", "reject_scan"):
            if getattr(self, name) < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.target is not None and self.target < 1:
            raise ValueError("--target must be positive")

    def cache_key(self) -> dict:
        """Everything that can change the report; output and cache knobs excluded."""
        d = asdict(self)
        for name in ("format", "cache_dir", "use_cache"):
            d.pop(name)
        d["mutate"] = [list(m) for m in self.mutate]
        return d

    def derivation(self) -> DerivationBudget:
        return DerivationBudget(scan=self.scan, degree_cap=self.degree_cap)

    def solve_budget(self) -> SolveBudget:
        return SolveBudget(derivation=self.derivation(), reject_scan=max(self.reject_scan, self.scan))


@dataclass
class Outcome:
    code: int
    payload: dict
    markdown: str
    stderr: List[str] = field(default_factory=list)


# --------------------------------------------------------------------------- #
# commands
# --------------------------------------------------------------------------- #


def _need_k(cfg: RunConfig, minimum: int = 2) -> int:
    if cfg.k is None:
        raise ValueError(f"{cfg.command} needs --k")
    if cfg.k < minimum:
        raise DomainError(f"{cfg.command} needs k >= {minimum}")
    return cfg.k


def cmd_derive(cfg: RunConfig) -> Outcome:
    k = _need_k(cfg)
    target = cfg.target or threshold_A(k)
    try:
        table, _ = derive_expressions(k, target, cfg.derivation())
    except BudgetExhausted as exc:
        payload = exc.table.to_dict() if exc.table is not None else {"k": k, "target": target}
        payload["status"] = "budget_exhausted"
        payload["missing"] = list(exc.missing)
        shown = ", ".join(map(str, exc.missing[:20])) + (" ..." if len(exc.missing) > 20 else "")
        md = f"Budget exhausted: {len(exc.missing)} value(s) missing, n = {shown}\n"
        return Outcome(EXIT_BUDGET, payload, md, [str(exc)])
    payload = table.to_dict()
    payload["status"] = "ok"
    return Outcome(EXIT_OK, payload, table.to_markdown())


def cmd_solve_base(cfg: RunConfig) -> Outcome:
    k = _need_k(cfg)
    try:
        rep = solve_base(k, cfg.solve_budget(), route=cfg.route)
    except InsufficientConstraints as exc:
        payload = {"k": k, "status": "unresolved", "unresolved": [str(exc)]}
        return Outcome(EXIT_BUDGET, payload, f"UNRESOLVED: {exc}\n", [str(exc)])
    return Outcome(EXIT_OK if rep.resolved else EXIT_BUDGET, rep.to_dict(), rep.to_markdown())


def _parse_mutations(cfg: RunConfig) -> Dict[int, Fraction]:
    return {n: Fraction(v) for n, v in cfg.mutate}


def cmd_verify_families(cfg: RunConfig) -> Outcome:
    k = _need_k(cfg, minimum=1)
    muts = _parse_mutations(cfg)
    results = []
    for fam in standard_families(k, cfg.seed):
        if muts:
            fam = fam.with_overrides(muts)
        results.append(verify_family(fam, cfg.umax))
    ok = all(r.passed for r in results)
    payload = {
        "k": k,
        "umax": cfg.umax,
        "seed": cfg.seed,
        "passed": ok,
        "runs": [r.to_dict(include_timing=cfg.timing) for r in results],
    }
    lines = [
        f"### Families for k = {k} on [1, {cfg.umax}]^2",
        "",
        "| family | result | pairs checked | first failure |",
        "|---|---|---|---|",
    ]
    for r in results:
        ff = r.first_failure
        fail = "" if ff is None else f"(u,v)=({ff['u']},{ff['v']}): f({ff['n']}) = {ff['lhs']}, f(u)^2+k f(v)^2 = {ff['rhs']}"
        lines.append(f"| {r.family} | {'pass' if r.passed else 'FAIL'} | {r.pairs_checked} | {fail} |")
    err = [f"counterexample: {r.family} at {r.first_failure}" for r in results if not r.passed]
    return Outcome(EXIT_OK if ok else EXIT_FAIL, payload, "\n".join(lines) + "\n", err[:1])


def _certificate(k: int, cfg: RunConfig):
    """Solve the base case, derive F on 1..A and certify; returns (certificate, report)."""
    rep = solve_base(k, cfg.solve_budget(), route=cfg.route)
    table, _ = derive_expressions(k, threshold_A(k), cfg.derivation())
    return certify(k, rep, table), rep


def _certify_exit(cert) -> int:
    if cert.certified:
        return EXIT_OK
    return EXIT_BUDGET if cert.solution_status != "resolved" else EXIT_FAIL


def cmd_certify(cfg: RunConfig) -> Outcome:
    k = _need_k(cfg)
    try:
        cert, rep = _certificate(k, cfg)
    except (BudgetExhausted, InsufficientConstraints) as exc:
        payload = {"k": k, "verdict": "Failed", "reasons": [f"budget: {exc}"], "solution_status": "unresolved"}
        return Outcome(EXIT_BUDGET, payload, f"Failed (budget): {exc}\n", [str(exc)])
    payload = cert.to_dict()
    md = cert.to_markdown()
    if not rep.resolved:
        payload["unresolved_report"] = rep.to_dict()
        md += "\n" + rep.to_markdown()
    return Outcome(_certify_exit(cert), payload, md)


def cmd_mine_collisions(cfg: RunConfig) -> Outcome:
    k = _need_k(cfg, minimum=1)
    found = collisions(k, cfg.nmax)
    payload = {
        "k": k,
        "nmax": cfg.nmax,
        "count": len(found),
        "collisions": [{"n": n, "reps": [[r.u, r.v] for r in reps]} for n, reps in found],
    }
    lines = [f"### Collisions for k = {k}, n <= {cfg.nmax}: {len(found)}", ""]
    for n, reps in found:
        lines.append(f"- {n} = " + " = ".join(f"{r.u}^2 + {k}*{r.v}^2" for r in reps))
    return Outcome(EXIT_OK, payload, "\n".join(lines) + "\n")


def shared_formulas(tables: Dict[int, "object"]) -> List[dict]:
    """n whose F(n) polynomial is literally identical in every given table."""
    common = set.intersection(*(set(t.exprs) for t in tables.values())) if tables else set()
    out = []
    for n in sorted(common):
        polys = {str(t.exprs[n]) for t in tables.values()}
        out.append({"n": n, "agree": len(polys) == 1, "poly": sorted(polys)[0] if len(polys) == 1 else None})
    return out


def cmd_cross_k(cfg: RunConfig) -> Outcome:
    if cfg.k_min < 2 or cfg.k_max < cfg.k_min:
        raise ValueError("need 2 <= --k-min <= --k-max")
    rows, codes, tables = [], [], {}
    for k in range(cfg.k_min, cfg.k_max + 1):
        row: dict = {"k": k, "A": threshold_A(k)}
        try:
            cert, rep = _certificate(k, cfg)
        except (BudgetExhausted, InsufficientConstraints) as exc:
            row.update(verdict="Failed", status="budget", reasons=[str(exc)])
            codes.append(EXIT_BUDGET)
            rows.append(row)
            continue
        try:
            tables[k], _ = derive_expressions(k, cfg.target or 12, cfg.derivation())
        except BudgetExhausted:
            pass
        row.update(
            verdict=cert.verdict,
            status=rep.to_dict()["status"],
            eliminant=factored_text(rep.roots, rep.eliminant) if rep.eliminant is not None else None,
            f1_values=rep.f1_values,
            rejected=[c.to_list() for c, _ in rep.rejected],
            irrational_factors_refuted=len(rep.factor_refutations),
            reasons=cert.reasons,
        )
        codes.append(_certify_exit(cert))
        rows.append(row)
    payload = {"k_min": cfg.k_min, "k_max": cfg.k_max, "runs": rows, "shared_formulas": shared_formulas(tables)}
    lines = [
        f"### Cross-k run, k = {cfg.k_min}..{cfg.k_max}",
        "",
        "| k | A | verdict | f(1) | rejected (alpha, beta) | eliminant |",
        "|---|---|---|---|---|---|",
    ]
    for r in rows:
        rej = "; ".join(f"({a}, {b})" for a, b in r.get("rejected", []))
        lines.append(
            f"| {r['k']} | {r['A']} | {r['verdict']} | {', '.join(r.get('f1_values', []))} | {rej} | {r.get('eliminant') or ''} |"
        )
    agree = [s for s in payload["shared_formulas"] if s["agree"]]
    lines += ["", f"F(n) identical across all k for n in {[s['n'] for s in agree]}", ""]
    worst = EXIT_FAIL if EXIT_FAIL in codes else max(codes, default=EXIT_OK)
    return Outcome(worst, payload, "\n".join(lines) + "\n")


HANDLERS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "derive": cmd_derive,
    "solve-base": cmd_solve_base,
    "verify-families": cmd_verify_families,
    "certify": cmd_certify,
    "mine-collisions": cmd_mine_collisions,
    "cross-k": cmd_cross_k,
}


# --------------------------------------------------------------------------- #
# plumbing
# --------------------------------------------------------------------------- #


def _mutation(text: str) -> Tuple[int, str]:
    try:
        n, v = text.split("=", 1)
        n_i = int(n)
        Fraction(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n=v with a rational v, got {text!r}")
    if n_i < 1:
        raise argparse.ArgumentTypeError("mutation point must be positive")
    return n_i, str(Fraction(v))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int)
    common.add_argument("--target", type=int, help="largest n to express (derive; default A(k))")
    common.add_argument("--nmax", type=int, default=1000, help="collision search bound")
    common.add_argument("--umax", type=int, default=300, help="grid side for verify-families")
    common.add_argument("--scan", type=int, default=2000, help="largest n whose collisions are used")
    common.add_argument("--degree-cap", type=int, default=8)
    common.add_argument("--reject-scan", type=int, default=2000, help="search bound for rejection witnesses")
    common.add_argument("--route", choices=("classic", "auto"), default="classic",
                        help="elimination pair: the classic hand-picked one for k = 2..5, or automatic")
    common.add_argument("--format", choices=("json", "markdown"), default="markdown")
    common.add_argument("--cache-dir", help="defaults to $QUADFUNC_CACHE_DIR or ~/.cache/quadfunc")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--seed", type=int, default=0, help="seed for the random sign policy")
    common.add_argument("--mutate", type=_mutation, action="append", default=[], metavar="N=V",
                        help="override f(N) := V in every family (repeatable)")
    common.add_argument("--k-min", type=int, default=2)
    common.add_argument("--k-max", type=int, default=9)
    common.add_argument("--timing", action="store_true", help="include wall times (breaks byte-stable output)")

    parser = argparse.ArgumentParser(
        prog="quadfunc", description="Checks for f(u^2 + k v^2) = f(u)^2 + k f(v)^2."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "derive": "express F(n) = f(n)^2 through alpha = f(1)^2 and beta = f(2)^2",
        "solve-base": "find the admissible f(1) values",
        "verify-families": "check the three solution families on a grid",
        "certify": "base classification plus induction audit",
        "mine-collisions": "list n with two or more representations",
        "cross-k": "run certify over a range of k and compare formulas",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        k=ns.k,
        target=ns.target,
        nmax=ns.nmax,
        umax=ns.umax,
        scan=ns.scan,
        degree_cap=ns.degree_cap,
        reject_scan=ns.reject_scan,
        route=ns.route,
        seed=ns.seed,
        mutate=tuple(ns.mutate),
        k_min=ns.k_min,
        k_max=ns.k_max,
        format=ns.format,
        cache_dir=ns.cache_dir,
        use_cache=not ns.no_cache,
        timing=ns.timing,
    )


def run(cfg: RunConfig) -> Outcome:
    """Run one command, going through the cache when allowed."""
    cache = ReportCache(cfg.cache_dir) if cfg.use_cache and not cfg.timing else None
    key = cfg.cache_key()
    if cache is not None:
        hit = cache.load(cfg.command, cfg.k, key)
        if hit is not None:
            return Outcome(hit["exit_code"], hit["payload"], hit["markdown"], hit.get("stderr", []))
    out = HANDLERS[cfg.command](cfg)
    if cache is not None:
        try:
            cache.store(cfg.command, cfg.k, key, exit_code=out.code, payload=out.payload,
                        markdown=out.markdown, stderr=out.stderr)
        except OSError as exc:
            out.stderr.append(f"cache not written: {exc}")
    return out


def render(out: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.payload, sort_keys=True, indent=2) + "\n"
    return out.markdown


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        out = run(cfg)
    except (ValueError, TypeError) as exc:
        print(f"quadfunc: error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    sys.stdout.write(render(out, cfg.format))
    for line in out.stderr:
        print(line, file=sys.stderr)
    return out.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
