"""Command-line entry point: ``masmc run | probe | figures | selfcheck``.

Exit codes: 0 success or accepted outcome, 1 usage/config error,
2 protocol rejection (or a Monte Carlo row outside its 3-stderr band).
"""

from __future__ import annotations

import argparse
import random
import sys
import warnings
from pathlib import Path

from .errors import ConfigError, MasmcError, TopologyWarning
from .figures import (
    SERIES_LABELS,
    emit_series,
    eq3_table,
    fmt_prob,
    table_to_csv,
)
from .scenario import load_scenario

EXIT_OK, EXIT_ERROR, EXIT_REJECTED = 0, 1, 2


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"1..20"`` (inclusive) or ``"2,4,8"``."""
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split("..", 1))
            values = list(range(lo, hi + 1))
        else:
            values = [int(t) for t in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad range {text!r}") from None
    if not values:
        raise ConfigError(f"empty range {text!r}")
    if min(values) < 1:
        raise ConfigError(f"range {text!r} must contain only values >= 1")
    return values


def _write_out(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_run(args) -> int:
    from .voting import TaskAborted, run_task

    sc = load_scenario(args.scenario, seed=args.seed)
    try:
        run = run_task(sc)
    except TaskAborted as exc:
        if args.transcript:
            _write_out(args.transcript, exc.transcript.to_text())
        raise
    if args.transcript:
        _write_out(args.transcript, run.transcript.to_text())
    print(run.outcome.line())
    return EXIT_OK if run.outcome.accepted else EXIT_REJECTED


def _print_rows(header: str, rows) -> bool:
    print(header)
    ok = True
    for cells, passed in rows:
        ok &= passed
        print(" ".join(cells) + (" PASS" if passed else " FAIL"))
    return ok


def cmd_probe(args) -> int:
    if args.eq in ("eq1", "eq2"):
        opt = "r" if args.eq == "eq1" else "m"
        given = getattr(args, opt)
        if given is None:
            raise ConfigError(f"probe {args.eq} needs --{opt}")
        xs = parse_range(given)
        which = "FIG2" if args.eq == "eq1" else "FIG3"
        points, text = emit_series(which, xs, args.trials, args.seed)
        ok = _print_rows(
            f"# {SERIES_LABELS[which]} trials={args.trials} seed={args.seed}\n"
            f"{opt} p_closed p_mc stderr check",
            (
                ([str(pt.x), fmt_prob(pt.p_closed), fmt_prob(pt.p_mc), fmt_prob(pt.stderr)], pt.passes())
                for pt in points
            ),
        )
    else:
        if args.m is None or args.p is None:
            raise ConfigError("probe eq3 needs --m and --p")
        rows = eq3_table(parse_range(args.m), parse_range(args.p), args.trials, args.seed)
        text = table_to_csv(rows)
        ok = _print_rows(
            f"# p_wrong_agent trials={args.trials} seed={args.seed}\nm p p_closed p_mc stderr check",
            (
                ([str(t.m), str(t.p), fmt_prob(t.p_closed), fmt_prob(t.p_mc), fmt_prob(t.stderr)], t.passes())
                for t in rows
            ),
        )
    if args.csv:
        _write_out(args.csv, text)
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_figures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    xs = parse_range(args.range)
    ok = True
    for which, name in (("FIG2", "fig2.csv"), ("FIG3", "fig3.csv")):
        points, text = emit_series(which, xs, args.trials, args.seed)
        _write_out(str(out / name), text)
        bad = [pt.x for pt in points if not pt.passes()]
        ok &= not bad
        print(f"{name} {SERIES_LABELS[which]} rows={len(points)} " + ("PASS" if not bad else f"FAIL x={bad}"))
    return EXIT_OK if ok else EXIT_REJECTED


# -- selfcheck ----------------------------------------------------------------


def _check_shares() -> str:
    from .ring_crypto import DEFAULT_MODULUS, recombine_shares, split_into_shares
    from .rng import substream

    rng = substream(0, "selfcheck", "shares")
    for _ in range(200):
        v, r = rng.randrange(DEFAULT_MODULUS), rng.randint(1, 8)
        assert recombine_shares(split_into_shares(v, r, rng)) == v
    return "200 cases"


def _check_seal() -> str:
    from .errors import AuthFailure
    from .ring_crypto import ChannelKey, SealedMessage, channel_open, channel_seal

    key = ChannelKey.derive(0, (("party", 0), ("dm", 0)))
    other = ChannelKey.derive(1, (("party", 0), ("dm", 0)))
    msg = b"selfcheck fragment"
    sm = channel_seal(msg, key, 0)
    assert channel_open(sm, key) == msg
    assert channel_seal(msg, key, 1).body != sm.body
    tampered = SealedMessage(sm.nonce, bytes([sm.body[0] ^ 1]) + sm.body[1:], sm.tag)
    for bad, k in ((tampered, key), (sm, other)):
        try:
            channel_open(bad, k)
        except AuthFailure:
            continue
        raise AssertionError("tampered or mis-keyed message opened")
    return "round trip, tamper, wrong key"


def _check_honest() -> str:
    from .scenario import random_scenario
    from .voting import run_task

    rng = random.Random(20240)
    for _ in range(100):
        sc = random_scenario(rng)
        run = run_task(sc)
        assert run.outcome.accepted
        got = run.outcome.opened_value if sc.task.blind_result else run.outcome.value
        assert got == sc.true_result()
        assert run.outcome.support == sc.task.agents_selected_k
    return "100 scenarios"


def _check_tally() -> str:
    from .actors import ONE_THIRD, STRICT_MAJORITY, AgentResult
    from .voting import ACCEPTED, REJECTED_AMBIGUOUS, REJECTED_NO_QUORUM, tally_results

    def tally(values, rule=ONE_THIRD):
        res = [AgentResult("t", a, v) for a, v in enumerate(values)]
        return tally_results(res, rule, len(values))

    assert (tally([7] * 5).status, tally([7] * 5).support) == (ACCEPTED, 5)
    o = tally([7, 7, 9, 9, 9])
    assert (o.status, o.value, o.support) == (ACCEPTED, 9, 3)
    assert tally([7, 7, 9, 9]).status == REJECTED_AMBIGUOUS
    # 5 colluders out of 9 carry a wrong value under the one-third rule
    o = tally([1] * 4 + [666] * 5)
    assert (o.status, o.value) == (ACCEPTED, 666)
    assert tally([1, 2, 3, 4, 5]).status == REJECTED_NO_QUORUM
    assert tally([1] * 4 + [2, 3, 4, 5, 6], STRICT_MAJORITY).status == REJECTED_NO_QUORUM
    return "6 rule cases"


def _check_identity() -> str:
    from fractions import Fraction

    from .figures import eq3_p_wrong_agent

    for m in range(1, 21):
        for p in range(1, 21):
            exact = Fraction(1, m) + Fraction(1, p) - Fraction(1, m * p)
            assert exact == 1 - (1 - Fraction(1, m)) * (1 - Fraction(1, p))
            assert abs(eq3_p_wrong_agent(m, p) - float(exact)) <= 1e-12
    return "m,p in 1..20"


def _check_determinism() -> str:
    from .scenario import random_scenario
    from .threat_lab import AdversaryConfig, Experiment, mc_estimate
    from .voting import run_task

    sc = random_scenario(random.Random(5), blind=True)
    assert run_task(sc).transcript.to_text() == run_task(sc).transcript.to_text()
    cfg = AdversaryConfig(Experiment.WRONG_AGENT, 10_000, seed=3, m=3, p=7)
    assert mc_estimate(cfg) == mc_estimate(cfg, chunk=999)
    return "transcript and Monte Carlo"


SELFCHECKS = (
    ("share_roundtrip", _check_shares),
    ("seal_roundtrip", _check_seal),
    ("honest_correctness", _check_honest),
    ("tally_rules", _check_tally),
    ("inclusion_exclusion", _check_identity),
    ("determinism", _check_determinism),
)


def cmd_selfcheck(args) -> int:
    ok = True
    for name, fn in SELFCHECKS:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TopologyWarning)
                detail = fn()
            print(f"{name} PASS ({detail})")
        except Exception as exc:  # noqa: BLE001 - report every group
            ok = False
            print(f"{name} FAIL ({type(exc).__name__}: {exc})")
    return EXIT_OK if ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="masmc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one task from a scenario file")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--transcript", help="write the event transcript here")
    run.set_defaults(func=cmd_run)

    probe = sub.add_parser("probe", help="closed form vs Monte Carlo table")
    probe.add_argument("eq", choices=("eq1", "eq2", "eq3"))
    probe.add_argument("--r", help="fragment counts, e.g. 1..20")
    probe.add_argument("--m", help="decision-maker counts")
    probe.add_argument("--p", help="agent counts (eq3)")
    probe.add_argument("--trials", type=int, default=100_000)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--csv", help="write the table as CSV")
    probe.set_defaults(func=cmd_probe)

    figs = sub.add_parser("figures", help="write fig2.csv and fig3.csv")
    figs.add_argument("--out", default=".")
    figs.add_argument("--range", default="1..20")
    figs.add_argument("--trials", type=int, default=100_000)
    figs.add_argument("--seed", type=int, default=0)
    figs.set_defaults(func=cmd_figures)

    check = sub.add_parser("selfcheck", help="fast invariant checks")
    check.set_defaults(func=cmd_selfcheck)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (MasmcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
