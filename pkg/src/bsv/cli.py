"""
Command line entry point.

    bsv ideals --n 3 [--census]
    bsv verify --n 3 [--ideal JSON | --parabolic 1,1,1] [--json] [--jobs 8]
    bsv split candidate.json --n 2 --p 2 [--expect-split]

Exit status: 0 when every mathematical check passes, 1 when one fails,
2 on usage, capacity or domain errors.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .claims import DEFAULT_SEED, verify_all, verify_chain
from .errors import CapacityError, DomainError, EvaluationError
from .matrices import set_cache_dir
from .poly import is_prime
from .poset import Position, PosetIdeal, coordinate_lie_ideal_census, enumerate_ideals, parabolic_to_ideal
from .splitting import DEFAULT_MAX_SEARCH, DEFAULT_MAX_TERMS, CandidateExpr, simultaneous_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    n: int
    p: int = None
    seed: int = DEFAULT_SEED
    cache_dir: str = None
    jobs: int = 1
    output: str = "human"
    timing: bool = True
    caps: dict = field(default_factory=lambda: {
        "max_n": 4, "max_terms": DEFAULT_MAX_TERMS, "max_search": DEFAULT_MAX_SEARCH,
    })

    def __post_init__(self):
        if not 1 <= self.n <= self.caps["max_n"]:
            raise CapacityError(f"n={self.n} outside [1, max_n={self.caps['max_n']}]")
        if self.p is not None and not is_prime(self.p):
            raise DomainError(f"--p {self.p} is not prime")
        if self.jobs < 1:
            raise DomainError("--jobs must be >= 1")

    @classmethod
    def from_args(cls, args):
        return cls(
            n=args.n,
            p=getattr(args, "p", None),
            seed=args.seed,
            cache_dir=args.cache_dir,
            jobs=getattr(args, "jobs", 1),
            output="json" if args.json else "human",
            timing=not args.no_timing,
            caps={"max_n": args.max_n, "max_terms": args.max_terms, "max_search": args.max_search},
        )


def _emit(obj, config, human):
    if config.output == "json":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(human)


def _selected_ideal(args, n):
    if args.ideal and args.parabolic:
        raise DomainError("give at most one of --ideal and --parabolic")
    if args.ideal:
        try:
            obj = json.loads(args.ideal)
        except json.JSONDecodeError as exc:
            raise DomainError(f"--ideal is not valid JSON: {exc}") from None
        return PosetIdeal.from_json(obj, n=n)
    if args.parabolic:
        try:
            blocks = [int(b) for b in args.parabolic.split(",")]
        except ValueError:
            raise DomainError(f"cannot parse --parabolic {args.parabolic!r}") from None
        S = parabolic_to_ideal(blocks)
        if S.n != n:
            raise DomainError(f"blocks {blocks} sum to {S.n}, not n={n}")
        return S
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_ideals(args, config):
    ideals = enumerate_ideals(config.n, max_n=config.caps["max_n"])
    out = {
        "schema": "1",
        "n": config.n,
        "count": len(ideals),
        "ideals": [S.to_json()["members"] for S in ideals],
    }
    lines = [f"{len(ideals)} ideals for n={config.n}"]
    lines += [f"  {k:3d}  {S}" for k, S in enumerate(ideals)]
    if args.census:
        census = coordinate_lie_ideal_census(config.n, seed=config.seed)
        out["census"] = census
        lines.append("")
        lines.append(f"census over {census['subsets_scanned']} coordinate subspaces of b:")
        for key in ("b_S_family", "coordinate_lie_ideals", "b_stable", "b_stable_lie_ideals"):
            lines.append(f"  {key:28s} {census[key]}")
        extra = census["b_stable_lie_ideals_not_b_S"]
        lines.append(f"  B-stable Lie ideals missing from b[S]: {len(extra)}")
    _emit(out, config, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args, config):
    S = _selected_ideal(args, config.n)
    if S is not None:
        chain = verify_chain(S, seed=config.seed)
        out = {"schema": "1", **chain.to_json(config.timing)}
        passed = chain.passed
        lines = [f"ideal {S}: {'PASS' if passed else 'FAIL'} ({len(chain.steps)} steps)"]
        lines += _describe_chain(chain)
    else:
        summary = verify_all(config.n, max_n=config.caps["max_n"], seed=config.seed, jobs=config.jobs)
        out = summary.to_json(config.timing)
        passed = summary.passed
        lines = [f"n={config.n}: {summary.passed_count}/{len(summary.chains)} ideals pass"]
        for name, c in summary.check_counts().items():
            lines.append(f"  {name:20s} pass {c['pass']:4d}  fail {c['fail']:4d}")
        for chain in summary.chains:
            if not chain.passed:
                lines.append(f"FAILED ideal {chain.S}")
                lines += _describe_chain(chain)
        if config.timing:
            lines.append(f"elapsed {summary.seconds:.2f}s")
    _emit(out, config, "\n".join(lines))
    return EXIT_OK if passed else EXIT_FAIL


def _describe_chain(chain):
    lines = []
    if not chain.base_case.passed:
        lines.append(f"  base case failed: {chain.base_case.witness}")
    for step in chain.steps:
        status = "ok" if step.passed else "FAIL"
        lines.append(f"  add {Position(*step.position)} at r={step.r}: {status}")
        for name, check in step.failures().items():
            lines.append(f"    {name}: {check.witness}")
    return lines


def cmd_split(args, config):
    if config.p is None:
        raise DomainError("split needs --p")
    try:
        with open(args.candidate) as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read candidate file: {exc}") from None
    candidate = CandidateExpr.loads(text, n=config.n)
    if candidate.n is not None and candidate.n != config.n:
        raise DomainError(f"candidate is for n={candidate.n}, --n is {config.n}")
    S = _selected_ideal(args, config.n)
    ideals = [S] if S is not None else enumerate_ideals(config.n, max_n=config.caps["max_n"])
    report = simultaneous_report(candidate, config.p, ideals, n=config.n,
                                 max_terms=config.caps["max_terms"])
    out = report.to_json()
    lines = [f"splits: {report.splits} (trace {report.trace})"]
    for row in report.ideals:
        mark = "compatible" if row["compatibly_split"] else "NOT compatible"
        lines.append(f"  {row['ideal']}: {mark}")
        for v in row["variables"]:
            if not v["compatible"]:
                lines.append(f"    {v['variable']}: witness {v['witness']}")
    _emit(out, config, "\n".join(lines))
    if args.expect_split:
        ok = report.splits and all(row["compatibly_split"] for row in report.ideals)
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common(parser):
    parser.add_argument("--n", type=int, required=True, help="matrix size")
    parser.add_argument("--json", action="store_true", help="emit JSON")
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    parser.add_argument("--cache-dir", default=os.environ.get("BSV_CACHE_DIR"),
                        help="directory for cached F_r[S] (default: $BSV_CACHE_DIR)")
    parser.add_argument("--no-timing", action="store_true", help="omit timing fields")
    parser.add_argument("--max-n", type=int, default=4)
    parser.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS)
    parser.add_argument("--max-search", type=int, default=DEFAULT_MAX_SEARCH)


def build_parser():
    parser = argparse.ArgumentParser(prog="bsv", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ideals", help="list the ideals of [1,n]^2")
    _common(p)
    p.add_argument("--census", action="store_true",
                   help="compare coordinate Lie ideals of b with the family b[S]")
    p.set_defaults(func=cmd_ideals)

    p = sub.add_parser("verify", help="check the peeling induction")
    _common(p)
    p.add_argument("--ideal", help='JSON ideal, e.g. "[[2,1],[1,1]]"')
    p.add_argument("--parabolic", help="block sizes, e.g. 1,2")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("split", help="test a candidate splitting section")
    _common(p)
    p.add_argument("candidate", help="candidate JSON file")
    p.add_argument("--p", type=int, help="characteristic")
    p.add_argument("--ideal", help="restrict the report to one ideal")
    p.add_argument("--parabolic", help="restrict the report to one parabolic ideal")
    p.add_argument("--expect-split", action="store_true",
                   help="exit 1 unless the candidate splits every reported ideal compatibly")
    p.set_defaults(func=cmd_split)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_args(args)
        if config.cache_dir:
            set_cache_dir(config.cache_dir)
        return args.func(args, config)
    except (DomainError, CapacityError, EvaluationError) as exc:
        print(f"bsv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
