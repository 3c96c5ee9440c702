"""Command-line runner: ``bellsim <subcommand> [options]``.

Every output file starts with the configuration that produced it (a
``config`` key in JSON, ``# config:`` comment lines in CSV), floats are
written with 9 significant digits, and a fixed seed gives byte-identical
files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from bellsim import __version__

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
SIG = 9


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), f".{SIG}g")
    return str(x)


def _round(obj):
    """Floats to 9 significant digits, recursively, for stable JSON."""
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(format(v, f".{SIG}g")) if math.isfinite(v) else None
    return obj


def render_json(config: dict, payload: dict) -> str:
    return json.dumps(_round({"config": config, **payload}), indent=2, sort_keys=False) + "\n"


def render_csv(config: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_round(config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r[h]) for h in header])
    return buf.getvalue()


def read_config(path) -> dict:
    """Configuration embedded in a file written by this tool."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith("# config: "):
        return json.loads(text.splitlines()[0][len("# config: "):])
    return json.loads(text)["config"]


def _check_out(path):
    if path in (None, "-"):
        return
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise UsageError(f"cannot write to {path}")
    if os.path.isdir(path):
        raise UsageError(f"{path} is a directory")


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _require(cond, msg):
    if not cond:
        raise UsageError(msg)


def _config(args, *names) -> dict:
    cfg = {"command": args.command, "version": __version__}
    for n in names:
        cfg[n] = getattr(args, n)
    return cfg


def _grid(start, end, step):
    _require(step > 0, "step must be positive")
    _require(end >= start, "grid end must not precede its start")
    n = int(math.floor((end - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


# -- subcommands ---------------------------------------------------------------------

def cmd_bs_table(args):
    from bellsim import photonic

    target = tuple(photonic.Bell(t) for t in args.target)
    _require(target in photonic.TARGET_PAIRS, f"unsupported target pair {args.target}")
    table = photonic.derive_bs_table(photonic.build_bs_network(target))
    payload = table.to_dict()
    payload["success"] = {b.value: table.success_probability(b) for b in photonic.Bell}
    return render_json(_config(args, "target"), payload)


def cmd_logical_bm(args):
    from bellsim import logical_bm

    _require(all(1 <= n <= logical_bm.MAX_EXPAND_N for n in args.n), "N must lie in [1, 20]")
    _require(args.trials >= 1, "trials must be positive")
    rows = logical_bm.success_table(args.n, args.trials, args.seed)
    cfg = _config(args, "n", "trials", "seed", "format")
    header = ["N", "exact", "mc_estimate", "mc_stderr", "trials", "seed"]
    if args.format == "csv":
        return render_csv(cfg, header, rows)
    return render_json(cfg, {"results": rows})


def cmd_loss_sweep(args):
    from bellsim import loss

    _require(all(n >= 1 for n in args.n), "N must be at least 1")
    _require(0.0 <= args.eta_start and args.eta_end <= 1.0, "eta must lie in [0, 1]")
    _require(args.trials >= 1, "trials must be positive")
    closed = loss.bm_success_prob_lossy if args.kind == "bm" else loss.gate_teleport_success_prob
    mc = loss.mc_bm_success_lossy if args.kind == "bm" else loss.mc_gate_teleport_success
    rows = []
    for n in args.n:
        for eta in _grid(args.eta_start, args.eta_end, args.eta_step):
            eta = min(1.0, eta)
            est = mc(n, eta, args.trials, args.seed)
            rows.append({"N": n, "eta": eta, "p_closed": closed(n, eta), "p_mc": est.value, "stderr": est.stderr})
    cfg = _config(args, "kind", "n", "eta_start", "eta_end", "eta_step", "trials", "seed")
    return render_csv(cfg, ["N", "eta", "p_closed", "p_mc", "stderr"], rows)


def _random_inputs(rng, count, N):
    from bellsim.protocols import LogicalQubitState

    for _ in range(count):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        yield LogicalQubitState.from_vector(v, N)


def cmd_teleport(args):
    from bellsim import loss, protocols

    _require(args.n >= 1, "N must be at least 1")
    _require(0.0 <= args.eta <= 1.0, "eta must lie in [0, 1]")
    _require(args.trials >= 1 and args.samples >= 0, "trials must be positive")
    est = protocols.success_rate("teleport", args.n, args.eta, args.trials, args.seed)
    rng = np.random.default_rng(args.seed)
    fids, tallies = [], {}
    for q in _random_inputs(rng, args.samples, args.n):
        r = protocols.teleport(q, args.eta, rng)
        key = str(r.measurements[0].outcome)
        tallies[key] = tallies.get(key, 0) + 1
        if r.success:
            fids.append(r.output.fidelity(q))
    payload = {
        "success_rate": {"estimate": est.value, "stderr": est.stderr, "trials": est.trials},
        "closed_form": loss.bm_success_prob_lossy(args.n, args.eta),
        "samples": {
            "count": args.samples,
            "outcomes": dict(sorted(tallies.items())),
            "successes": len(fids),
            "min_fidelity": min(fids) if fids else None,
            "mean_fidelity": float(np.mean(fids)) if fids else None,
        },
    }
    return render_json(_config(args, "n", "eta", "trials", "samples", "seed"), payload)


def cmd_gate(args):
    from bellsim import loss, protocols

    _require(args.n >= 1, "N must be at least 1")
    _require(0.0 <= args.eta <= 1.0, "eta must lie in [0, 1]")
    _require(args.trials >= 1 and args.samples >= 0, "trials must be positive")
    _require(args.max_attempts >= 1, "max-attempts must be at least 1")
    est = protocols.success_rate(args.kind, args.n, args.eta, args.trials, args.seed)
    p1 = loss.gate_teleport_success_prob(args.n, args.eta)
    closed = p1 if args.kind == "hadamard" else p1 * p1
    rng = np.random.default_rng(args.seed)
    attempts_hist: dict[int, int] = {}
    fids = []
    gave_up = 0
    for q in _random_inputs(rng, args.samples, args.n):
        q2 = next(_random_inputs(rng, 1, args.n)) if args.kind == "cz" else None
        for attempt in range(1, args.max_attempts + 1):
            # a failed attempt consumes the input; the caller re-supplies it
            r = (protocols.hadamard_via_teleport(q, args.eta, rng) if q2 is None
                 else protocols.cz_via_teleport(q, q2, args.eta, rng))
            if r.success:
                break
        else:
            gave_up += 1
            continue
        attempts_hist[attempt] = attempts_hist.get(attempt, 0) + 1
        if q2 is None:
            fids.append(r.output.fidelity(protocols.HADAMARD @ q.vector))
        else:
            want = protocols.CZ @ np.kron(q.vector, q2.vector)
            fids.append(float(abs(np.vdot(want, r.output)) ** 2))
    payload = {
        "success_rate": {"estimate": est.value, "stderr": est.stderr, "trials": est.trials},
        "closed_form": closed,
        "samples": {
            "count": args.samples,
            "attempts": {str(k): v for k, v in sorted(attempts_hist.items())},
            "gave_up": gave_up,
            "min_fidelity": min(fids) if fids else None,
        },
    }
    return render_json(_config(args, "kind", "n", "eta", "trials", "samples", "max_attempts", "seed"), payload)


def cmd_compare(args):
    from bellsim import comparison

    _require(2.0 <= args.grid_start and args.grid_end <= 20.0, "grid must lie within [2, 20]")
    grid = _grid(args.grid_start, args.grid_end, args.step)
    pts = comparison.generate_figure2(grid)
    rows = [{"scheme": p.scheme, "nbar": p.nbar, "ps": p.ps, "is_physical_point": p.is_physical_point}
            for p in pts]
    cfg = _config(args, "grid_start", "grid_end", "step")
    return render_csv(cfg, ["scheme", "nbar", "ps", "is_physical_point"], rows)


def cmd_ft_threshold(args):
    from bellsim.ftsim import circuit as circ_mod
    from bellsim.ftsim import engine
    from bellsim.ftsim.threshold import find_threshold

    _require(args.levels >= 3, "levels must be at least 3")
    _require(args.trials >= 1, "trials must be positive")
    _require(all(n >= 1 for n in args.n), "N must be at least 1")
    _require(args.backend is None or args.backend in engine.BACKENDS,
             f"backend must be one of {sorted(engine.BACKENDS)}")
    c = circ_mod.load(args.circuit) if args.circuit else circ_mod.default_circuit()
    results = []
    for n in args.n:
        r = find_threshold(n, args.levels, args.trials, args.seed, tol=args.tol, circuit=c,
                           backend=args.backend)
        results.append(r.to_dict())
    payload = {
        "circuit": {"locations": dict(sorted(c.location_counts().items())), "qubits": c.n_qubits},
        "results": results,
    }
    cfg = _config(args, "n", "levels", "trials", "seed", "tol", "circuit")
    return render_json(cfg, payload)


def cmd_resources(args):
    from bellsim import protocols

    _require(min(args.nh, args.ncz, args.nplus) >= 0, "resource counts must be nonnegative")
    total = protocols.resource_cost(args.nh, args.ncz, args.nplus)
    if args.out in (None, "-"):
        return f"{total}\n"
    return render_json(_config(args, "nh", "ncz", "nplus"),
                       {"total": total, "fractions": protocols.FRACTIONS})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        return sp

    sp = add("bs-table", cmd_bs_table, "derive the standard Bell analyzer table")
    sp.add_argument("--target", nargs=2, default=["PhiMinus", "PsiMinus"],
                    choices=["PhiPlus", "PhiMinus", "PsiPlus", "PsiMinus"])

    sp = add("logical-bm", cmd_logical_bm, "logical Bell measurement success, exact and sampled")
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--trials", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = add("loss-sweep", cmd_loss_sweep, "success under loss over an eta grid (CSV)")
    sp.add_argument("--n", type=int, nargs="+", default=[1, 4, 16, 80])
    sp.add_argument("--kind", choices=["bm", "gate"], default="bm")
    sp.add_argument("--eta-start", type=float, default=0.0)
    sp.add_argument("--eta-end", type=float, default=1.0)
    sp.add_argument("--eta-step", type=float, default=0.05)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, required=True)

    sp = add("teleport", cmd_teleport, "teleportation success and fidelity")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--samples", type=int, default=100, help="random inputs teleported one by one")
    sp.add_argument("--seed", type=int, required=True)

    sp = add("gate", cmd_gate, "Hadamard or CZ by gate teleportation")
    sp.add_argument("--kind", choices=["hadamard", "cz"], default="hadamard")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--max-attempts", type=int, default=1,
                    help="repeat a failed gate with a fresh copy of the input up to this many times")
    sp.add_argument("--seed", type=int, required=True)

    sp = add("compare", cmd_compare, "success probability against mean photon number (CSV)")
    sp.add_argument("--grid-start", type=float, default=2.0)
    sp.add_argument("--grid-end", type=float, default=20.0)
    sp.add_argument("--step", type=float, default=0.5)

    sp = add("ft-threshold", cmd_ft_threshold, "fault-tolerance threshold by concatenated Monte Carlo")
    sp.add_argument("--n", type=int, nargs="+", default=[4])
    sp.add_argument("--levels", type=int, default=4)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--tol", type=float, default=5e-5)
    sp.add_argument("--circuit", default=None, help="circuit file (default: the shipped round)")
    sp.add_argument("--backend", default=None)

    sp = add("resources", cmd_resources, "photon resources for one correction round")
    sp.add_argument("--nh", type=int, required=True)
    sp.add_argument("--ncz", type=int, required=True)
    sp.add_argument("--nplus", type=int, required=True)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    from bellsim.errors import CircuitError, DomainError

    try:
        _check_out(args.out)
        text = args.func(args)
    except (UsageError, DomainError, CircuitError) as exc:
        print(f"bellsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report and signal a runtime failure
        print(f"bellsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"bellsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
