"""Command-line interface: ``extgames <command> [options] GAME``.

Exit status is 0 on success, 1 when the input is rejected by a solver
(invalid game, unmet precondition, capacity exceeded, bad script) and 2 on
usage errors, including unreadable input files.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import backward, caps, competitive, dynamics, epistemic, strategic
from .dot import export_dot
from .errors import GameError
from .formats import parse_game, parse_ks, print_game
from .generators import CORPUS, corpus_text, ultimatum
from .report import Report, digest
from .strategies import find_joint, outcome
from .tree import ExtensiveGame, classify, format_outcome


class UsageError(Exception):
    pass


def _labels(text: str) -> list[str]:
    return [x.strip() for x in text.split(",")]


def _load(args) -> tuple[ExtensiveGame, str, str]:
    """(game, input description, sha256 of the input text)."""
    sources = [args.game is not None, args.corpus is not None, args.ultimatum is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one of GAME, --corpus NAME or --ultimatum N")
    if args.ultimatum is not None:
        if args.ultimatum < 0:
            raise UsageError("--ultimatum needs N >= 0")
        text = print_game(ultimatum(args.ultimatum))
        return parse_game(text), f"ultimatum {args.ultimatum}", digest(text.encode())
    if args.corpus is not None:
        text = corpus_text(args.corpus)
        return parse_game(text), f"corpus {args.corpus}", digest(text.encode())
    try:
        data = Path(args.game).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {args.game}: {exc.strerror}") from None
    return parse_game(data.decode("utf-8")), args.game, digest(data)


def _joint_labels(game: ExtensiveGame, joint) -> list[str]:
    return [s.label(game) for s in joint]


def _strategic(game: ExtensiveGame, args) -> strategic.StrategicGame:
    return strategic.to_strategic(game, reduced=getattr(args, "reduced", False),
                                  label_style=getattr(args, "labels", "actions"))


def _profiles(H, profiles) -> list:
    return [{"profile": list(H.profile_labels(p)), "outcome": format_outcome(H.payoff(p))} for p in profiles]


def _trace(H, trace) -> list:
    return [
        {
            "round": st.round,
            "player": st.player + 1,
            "removed": H.labels[st.player][st.removed],
            "witness": None if st.witness is None else H.labels[st.player][st.witness],
        }
        for st in trace.steps
    ]


# -- commands -------------------------------------------------------------------------


def cmd_validate(game, args) -> dict:
    return {"valid": True, "players": game.n_players, "nodes": game.num_nodes, "leaves": len(game.leaves)}


def cmd_classify(game, args) -> dict:
    return classify(game).as_dict()


def cmd_strategic(game, args) -> dict:
    H = _strategic(game, args)
    return {
        "strategies": {f"player {i + 1}": list(ls) for i, ls in enumerate(H.labels)},
        "table": _profiles(H, H.profiles()),
    }


def cmd_nash(game, args) -> dict:
    H = _strategic(game, args)
    return {"equilibria": _profiles(H, strategic.nash_equilibria(H))}


def cmd_spe(game, args) -> dict:
    if args.check:
        joint = find_joint(game, _labels(args.check))
        return {"profile": _labels(args.check), "mode": args.mode, "spe": backward.is_spe(game, joint, args.mode)}
    spe = backward.bi_enumerate(game)
    out = {"count": spe.count, "outcomes": sorted(spe.outcomes())}
    if args.enumerate:
        if spe.explicit is None:
            out["equilibria"] = f"not listed: {spe.count} exceeds the expansion cap"
        else:
            out["equilibria"] = [
                {"profile": _joint_labels(game, j), "outcome": format_outcome(outcome(game, j))}
                for j in spe.explicit
            ]
    return out


def _parse_script(game: ExtensiveGame, text: str) -> dict:
    """``node=action,...`` where node is a node name or, failing that, a node id."""
    out = {}
    for item in _labels(text):
        if "=" not in item:
            raise UsageError(f"script item {item!r} is not node=action")
        node, action = item.split("=", 1)
        if node in game.names:
            v = game.names.index(node)
        elif node.isdigit() and int(node) < game.num_nodes:
            v = int(node)
        else:
            raise UsageError(f"no node {node!r}")
        if not game.children[v]:
            raise UsageError(f"node {node!r} is a leaf")
        out[v] = action
    return out


def cmd_bi(game, args) -> dict:
    tie = _parse_script(game, args.script) if args.script else args.tie_break
    res = backward.bi_run(game, tie_break=tie, seed=args.seed, order=args.order)
    return {
        "strategy": _joint_labels(game, res.strategy),
        "outcome": res.outcome,
        "order": [game.node_label(v) for v in res.order],
        "extended_outcomes": {game.node_label(v): res.extended_outcomes[v] for v in game.preorder},
    }


def cmd_ebi(game, args) -> dict:
    res = backward.ebi_run(game, slow_check=args.slow_check)
    H = res.final
    return {
        "spe": _joint_labels(game, res.bi.strategy),
        "outcome": res.bi.outcome,
        "eliminations": _trace(H, res.trace),
        "survivors": {f"player {i + 1}": list(ls) for i, ls in enumerate(H.surviving_labels())},
        "trivial": res.trivial,
        "contains_spe": res.contains_spe,
    }


def cmd_iewds(game, args) -> dict:
    H = _strategic(game, args)
    policy = _labels(args.script) if args.script else args.policy
    res = strategic.iewds(H, policy)
    return {
        "policy": "scripted" if args.script else args.policy,
        "rounds": res.trace.rounds,
        "eliminations": _trace(H, res.trace),
        "survivors": {f"player {i + 1}": list(ls) for i, ls in enumerate(res.final.surviving_labels())},
        "outcomes": sorted(res.final.outcomes()),
        "solved": res.solved,
    }


def cmd_sc_solve(game, args) -> dict:
    run = competitive.sc_iterate(game)
    return {
        "outcome_count": run.outcome_count,
        "trivial_at": run.trivial_at,
        "rounds": [
            {f"player {i + 1}": list(ls) for i, ls in enumerate(G.surviving_labels())} for G in run.snapshots
        ],
        "value": sorted(run.final.outcomes()),
        "lose_removal": competitive.lose_removal_check(game),
    }


def cmd_zermelo(game, args) -> dict:
    v = competitive.zermelo(game)
    return {
        "verdict": str(v.kind),
        "witnesses": {
            f"player {i + 1}": (None if s is None else s.label(game)) for i, s in enumerate(v.witnesses)
        },
    }


def cmd_dynamics(game, args) -> dict:
    H = strategic.to_strategic(game)
    out: dict = {}
    if args.fip:
        fip = dynamics.fip_analysis(H)
        out["fip"] = fip.has_fip
        out["cycle"] = [list(H.profile_labels(p)) for p in fip.cycle] if fip.cycle else []
    if args.start:
        script = None
        if args.script:
            script = []
            for item in _labels(args.script):
                who, _, lab = item.partition(":")
                if not who.isdigit() or not lab:
                    raise UsageError(f"script item {item!r} is not PLAYER:STRATEGY")
                script.append((int(who) - 1, lab))
        path = dynamics.improvement_path(
            H, _labels(args.start), args.scheduler, max_steps=args.max_steps, seed=args.seed, script=script
        )
        out["status"] = str(path.status)
        out["path"] = [
            {"profile": list(H.profile_labels(p)), "outcome": H.payoff(p)} for p in path.profiles
        ]
        if path.potentials:
            out["potentials"] = ["".join(map(str, bits)) for bits in path.potentials]
    if not out:
        raise UsageError("dynamics needs --start and/or --fip")
    return out


def cmd_ckr(game, args) -> dict:
    if args.singleton:
        ks = epistemic.singleton_system(game)
    elif args.ks:
        try:
            text = Path(args.ks).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.ks}: {exc.strerror}") from None
        ks = parse_ks(text, game)
    else:
        raise UsageError("ckr needs --ks FILE or --singleton")
    res = epistemic.ckr_check(ks, game)
    return {
        "holds": res.holds,
        "spe": _joint_labels(game, res.spe),
        "R": ks.order(res.rationality),
        "CKR": ks.order(res.ckr),
        "I": ks.order(res.bi),
        "violations": [
            {"state": t.state, "disagrees_at": [game.node_label(v) for v in t.failing]} for t in res.violations
        ],
    }


def cmd_dot(game, args) -> str:
    joint = find_joint(game, _labels(args.strategy)) if args.strategy else None
    extended = None
    if args.bi:
        res = backward.bi_run(game)
        extended = res.extended_outcomes
        joint = joint or res.strategy
    return export_dot(game, joint, extended)


COMMANDS = {
    "validate": (cmd_validate, "parse and validate a game"),
    "classify": (cmd_classify, "structural flags of a game"),
    "strategic": (cmd_strategic, "strategic form"),
    "nash": (cmd_nash, "pure Nash equilibria of the strategic form"),
    "spe": (cmd_spe, "subgame perfect equilibria"),
    "bi": (cmd_bi, "one backward induction run"),
    "ebi": (cmd_ebi, "backward induction with strategy elimination"),
    "iewds": (cmd_iewds, "iterated elimination of weakly dominated strategies"),
    "sc-solve": (cmd_sc_solve, "max-policy elimination of a strictly competitive game"),
    "zermelo": (cmd_zermelo, "winner of a win-or-lose or chess-like game"),
    "dynamics": (cmd_dynamics, "improvement paths and the finite improvement property"),
    "ckr": (cmd_ckr, "common knowledge of rationality against a knowledge system"),
    "dot": (cmd_dot, "Graphviz export"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="extgames", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        c = sub.add_parser(name, help=help_text)
        c.add_argument("game", nargs="?", help="game file (.egt)")
        c.add_argument("--corpus", choices=CORPUS, help="use a bundled example game")
        c.add_argument("--ultimatum", type=int, metavar="N", help="use the ultimatum game with offers 0..N")
        c.add_argument("--format", choices=("text", "json"), default="text")
        c.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identity)")
        c.add_argument("-o", "--output", help="write to this file instead of stdout")
        if name in ("strategic", "nash", "iewds"):
            c.add_argument("--reduced", action="store_true", help="use reduced strategies")
            c.add_argument("--labels", choices=("actions", "named"), default="actions")
        if name == "spe":
            c.add_argument("--enumerate", action="store_true", help="list every equilibrium")
            c.add_argument("--check", metavar="S1,S2,...", help="test one joint strategy")
            c.add_argument("--mode", choices=("one_deviation", "definition"), default="one_deviation")
        if name == "bi":
            c.add_argument("--tie-break", choices=("first", "random"), default="first")
            c.add_argument("--script", metavar="NODE=ACTION,...", help="scripted tie-breaks")
            c.add_argument("--order", choices=("first", "random"), default="first")
            c.add_argument("--seed", type=int)
        if name == "ebi":
            c.add_argument("--slow-check", action="store_true", help="certify each removal as dominated")
        if name == "iewds":
            c.add_argument("--policy", choices=("max", "greedy"), default="max")
            c.add_argument("--script", metavar="S1,S2,...", help="scripted removals, in order")
        if name == "dynamics":
            c.add_argument("--start", metavar="S1,S2,...")
            c.add_argument("--scheduler", choices=("first", "best-gain", "random", "scripted", "potential"),
                           default="first")
            c.add_argument("--script", metavar="P:STRATEGY,...", help="deviations for the scripted scheduler")
            c.add_argument("--seed", type=int)
            c.add_argument("--max-steps", type=int, default=10_000)
            c.add_argument("--fip", action="store_true", help="decide the finite improvement property")
        if name == "ckr":
            c.add_argument("--ks", metavar="FILE", help="knowledge system (.eks)")
            c.add_argument("--singleton", action="store_true", help="one state assigned the SPE")
        if name == "dot":
            c.add_argument("--strategy", metavar="S1,S2,...", help="joint strategy to draw bold")
            c.add_argument("--bi", action="store_true", help="label nodes with backward induction outcomes")
    return p


def run_command(argv: list[str], out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        for read_cap in (caps.enumeration_cap, caps.tdi_cap, caps.spe_expansion_cap):
            read_cap()
    except ValueError as exc:
        print(f"extgames {args.command}: {exc}", file=err)
        return 2
    fn = COMMANDS[args.command][0]
    start = time.perf_counter()
    try:
        game, source, sha = _load(args)
        result = fn(game, args)
    except UsageError as exc:
        print(f"extgames {args.command}: {exc}", file=err)
        return 2
    except GameError as exc:
        print(f"extgames {args.command}: error: {exc}", file=err)
        return 1
    if isinstance(result, str):
        text = result
    else:
        report = Report([args.command] + _echo(argv), source, sha, result,
                        time.perf_counter() - start if args.timing else None)
        text = report.render(args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return 0


def _echo(argv: list[str]) -> list[str]:
    """Arguments after the command name, minus the output destination."""
    rest = list(argv[1:])
    for flag in ("-o", "--output"):
        if flag in rest:
            k = rest.index(flag)
            del rest[k : k + 2]
    return rest


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
