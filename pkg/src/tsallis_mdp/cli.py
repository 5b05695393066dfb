"""Command-line front end: ``tsallis-mdp {gen-env,solve,sweep,compare,verify}``.

Exit codes: 0 success (converged), 2 ran but did not converge, 1 bad input.
Results go to files or stdout; log lines go to stderr only.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .envs import EnvKind, EnvSpec, make_env
from .errors import ConvergenceError, DivergenceError, TsallisMdpError
from .mdp import atomic_write_text, content_hash, initial_value, mdp_from_file, mdp_from_json, mdp_hash, mdp_to_file, mdp_to_json
from .qmath import EntropicIndex, format_q
from .solvers import Algorithm, SolverConfig, run_mvi_q, run_naive_lnq, solve

log = logging.getLogger("tsallis_mdp")

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2
JOBS_ENV = "TSALLIS_MDP_JOBS"
SWEEP_HEADER = ("q", "final_value", "iterations", "converged")
COMPARE_HEADER = ("iter", "mviq_value", "naive_value")
SUMMARY_HEADER = ("mviq_final", "naive_final", "margin", "higher")

# flag name -> SolverConfig field; flags default to None so a config file can fill gaps
CONFIG_FLAGS = {
    "algo": "algorithm",
    "q": "q",
    "tau": "tau",
    "alpha": "alpha",
    "p": "p",
    "max_iters": "max_iters",
    "residual_tol": "residual_tol",
    "m": "m",
    "regularizer": "regularizer",
    "munchausen": "munchausen",
    "log_floor": "log_floor",
    "greedy": "greedy",
    "cvi_operator": "cvi_operator",
    "divergence_factor": "divergence_factor",
}


class InputError(Exception):
    """Bad command-line input; reported without a traceback."""


def _q_arg(text):
    try:
        return EntropicIndex.parse(text).value
    except TsallisMdpError as exc:
        raise argparse.ArgumentTypeError(f"{exc} (the entropic index must satisfy q > 0)") from None


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    return repr(float(x))


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else format_q(x) if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _write_json(path, doc):
    atomic_write_text(path, json.dumps(_jsonable(doc), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _env_block(mdp, path):
    """File hash when the MDP came from disk; the canonical hash is always recorded."""
    block = {"path": path, "canonical_hash": mdp_hash(mdp), "meta": mdp.meta}
    block["content_hash"] = content_hash(path) if path else block["canonical_hash"]
    return block


# --- argument groups -------------------------------------------------------------


def _add_env_args(p, required_kind=False):
    g = p.add_argument_group("environment")
    g.add_argument("--env", help="MDP file (JSON); overrides the generator flags")
    g.add_argument("--kind", choices=[k.value for k in EnvKind], required=required_kind)
    g.add_argument("--length", type=int, default=5)
    g.add_argument("--width", type=int, default=6)
    g.add_argument("--height", type=int, default=3)
    g.add_argument("--n-states", type=int, default=10)
    g.add_argument("--n-actions", type=int, default=4)
    g.add_argument("--branching", type=int, default=3)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("--gamma", type=float, default=0.9)
    g.add_argument("--seed", type=int, default=0)


def _add_solver_args(p, with_algo=True):
    g = p.add_argument_group("solver (flags win over --config)")
    g.add_argument("--config", help="JSON file with SolverConfig fields and optionally 'env'")
    if with_algo:
        g.add_argument("--algo", choices=[a.value for a in Algorithm])
    g.add_argument("--q", type=_q_arg)
    g.add_argument("--tau", type=float)
    g.add_argument("--alpha", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--max-iters", type=int)
    g.add_argument("--residual-tol", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--regularizer")
    g.add_argument("--munchausen", choices=["advantage", "log"])
    g.add_argument("--log-floor", type=float)
    g.add_argument("--greedy", choices=["closed_form", "numeric"])
    g.add_argument("--cvi-operator", choices=["lse", "boltzmann"])
    g.add_argument("--divergence-factor", type=float)
    g.add_argument("--no-early-stop", action="store_true", help="always run max-iters iterations")
    g.add_argument("--record-time", action="store_true", help="fill wall_ms (makes traces nondeterministic)")


def _load_config_file(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"config file {path} must hold a JSON object")
    return doc


def resolve_config(args, **forced):
    """Defaults, then the config file, then flags, then ``forced`` values."""
    doc = _load_config_file(args.config) if getattr(args, "config", None) else {}
    env_from_file = doc.pop("env", None)
    fields = dict(doc)
    for flag, name in CONFIG_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            fields[name] = v
    if getattr(args, "no_early_stop", False):
        fields["early_stop"] = False
    if getattr(args, "record_time", False):
        fields["record_time"] = True
    fields.update(forced)
    if isinstance(fields.get("q"), str):
        fields["q"] = EntropicIndex.parse(fields["q"]).value
    try:
        cfg = SolverConfig.from_dict(fields)
    except (TsallisMdpError, ValueError, TypeError) as exc:
        raise InputError(f"invalid solver configuration: {exc}") from None
    return cfg, env_from_file


def load_env(args, env_from_config=None):
    path = args.env or env_from_config
    if path:
        return mdp_from_file(path), str(path)
    if not args.kind:
        raise InputError("give an MDP file with --env or a generator with --kind")
    spec = EnvSpec(
        kind=args.kind,
        length=args.length,
        width=args.width,
        height=args.height,
        n_states=args.n_states,
        n_actions=args.n_actions,
        branching=args.branching,
        noise=args.noise,
        gamma=args.gamma,
        seed=args.seed,
    )
    return make_env(spec), None


# --- runs --------------------------------------------------------------------------


def execute_run(mdp, cfg, out_dir, env_path=None):
    """Solve, write ``trace.csv`` and ``manifest.json`` into ``out_dir``; return the manifest."""
    out_dir = Path(out_dir)
    status, message = "converged", ""
    try:
        Q, pi, trace = solve(mdp, cfg)
        value = initial_value(mdp, pi)
        if not trace.converged:
            status = "not_converged"
    except DivergenceError as exc:
        trace, value, status, message = exc.trace, math.nan, "diverged", str(exc)
    trace.to_csv(out_dir / "trace.csv")
    manifest = {
        "config": cfg.to_dict(),
        "environment": _env_block(mdp, env_path),
        "outcome": {
            "status": status,
            "converged": status == "converged",
            "iterations": len(trace),
            "final_residual": trace.final_residual,
            "initial_value": value,
            "message": message,
        },
        "artifacts": {"trace": "trace.csv"},
    }
    _write_json(out_dir / "manifest.json", manifest)
    return manifest


def cmd_gen_env(args):
    mdp, _ = load_env(args)
    mdp_to_file(mdp, args.out)
    log.info("wrote %s (%d states, %d actions)", args.out, mdp.n_states, mdp.n_actions)
    print(mdp_hash(mdp))
    return EXIT_OK


def cmd_solve(args):
    cfg, env_cfg = resolve_config(args)
    mdp, path = load_env(args, env_cfg)
    m = execute_run(mdp, cfg, args.out, path)
    o = m["outcome"]
    log.info("%s: %s after %d iterations (residual %.3e)", cfg.algorithm.value, o["status"], o["iterations"], o["final_residual"])
    print(json.dumps(_jsonable(o), sort_keys=True))
    return EXIT_OK if o["converged"] else EXIT_NOT_CONVERGED


def _parse_overrides(items, qs):
    """``--override 3:tau=0.2,alpha=0.5`` -> {3.0: {'tau': 0.2, 'alpha': 0.5}}."""
    out = {}
    for item in items or []:
        head, sep, body = item.partition(":")
        if not sep or not body:
            raise InputError(f"override {item!r} must look like Q:field=value[,field=value]")
        try:
            q = _q_arg(head)
        except argparse.ArgumentTypeError as exc:
            raise InputError(str(exc)) from None
        if q not in qs:
            raise InputError(f"override for q={head} does not match any swept q")
        fields = {}
        for kv in body.split(","):
            k, eq, v = kv.partition("=")
            k = k.strip().replace("-", "_")
            if not eq or k not in SolverConfig.__dataclass_fields__ or k in ("q", "algorithm"):
                raise InputError(f"bad override field {kv!r}")
            ftype = type(getattr(SolverConfig(), k))
            try:
                fields[k] = (v.strip().lower() in ("1", "true", "yes")) if ftype is bool else ftype(v)
            except ValueError:
                raise InputError(f"override {kv!r}: cannot parse value") from None
        out.setdefault(q, {}).update(fields)
    return out


def _sweep_job(mdp_text, cfg_doc, out_dir, env_path):
    mdp = mdp_from_json(mdp_text)
    cfg = SolverConfig.from_dict(cfg_doc)
    try:
        m = execute_run(mdp, cfg, out_dir, env_path)
        o = m["outcome"]
        return o["initial_value"], o["iterations"], o["converged"], ""
    except Exception as exc:  # recorded per row; the sweep keeps going
        return math.nan, 0, False, f"{type(exc).__name__}: {exc}"


def _jobs(args):
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
    return 1


def cmd_sweep(args):
    try:
        qs = [_q_arg(t) for t in args.qs.split(",") if t.strip()] if args.qs else []
    except argparse.ArgumentTypeError as exc:
        raise InputError(str(exc)) from None
    if not qs:
        raise InputError("the q list is empty")
    if len(set(qs)) != len(qs):
        raise InputError("the q list has duplicates")
    base, env_cfg = resolve_config(args)
    mdp, path = load_env(args, env_cfg)
    overrides = _parse_overrides(args.override, qs)
    qs = sorted(qs)
    jobs = _jobs(args)
    if jobs < 1:
        raise InputError("--jobs must be >= 1")
    out = Path(args.out)
    text = mdp_to_json(mdp)
    tasks = []
    for q in qs:
        try:
            cfg = replace(base, q=q, **overrides.get(q, {}))
        except (TsallisMdpError, ValueError, TypeError) as exc:
            raise InputError(f"q={format_q(q)}: {exc}") from None
        tasks.append((text, cfg.to_dict(), out / f"q={format_q(q)}", path))
    if jobs == 1:
        results = [_sweep_job(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_job, *t) for t in tasks]
            results = [f.result() for f in futures]
    rows = []
    for q, (value, iters, conv, err) in zip(qs, results):
        if err:
            log.error("q=%s failed: %s", format_q(q), err)
        rows.append((format_q(q), _fmt(value), iters, "true" if conv else "false"))
    atomic_write_text(out / "aggregate.csv", _csv_text(SWEEP_HEADER, rows))
    log.info("wrote %s", out / "aggregate.csv")
    sys.stdout.write(_csv_text(SWEEP_HEADER, rows))
    return EXIT_OK if all(r[3] == "true" for r in rows) else EXIT_NOT_CONVERGED


def _values_per_iteration(mdp, trace):
    return [initial_value(mdp, pi) for _, pi in trace.history[1:]]


def cmd_compare(args):
    cfg, env_cfg = resolve_config(args, early_stop=False, record_history=True)
    if math.isinf(cfg.q):
        raise InputError("compare needs a finite q")
    mdp, path = load_env(args, env_cfg)
    out = Path(args.out)
    status = EXIT_OK
    try:
        _, pi_m, tm = run_mvi_q(mdp, replace(cfg, algorithm=Algorithm.MVI_Q))
    except DivergenceError as exc:
        log.error("MVI(q) diverged: %s", exc)
        tm, pi_m, status = exc.trace, None, EXIT_NOT_CONVERGED
    try:
        _, pi_n, tn = run_naive_lnq(mdp, replace(cfg, algorithm=Algorithm.NAIVE_LNQ))
    except DivergenceError as exc:
        # the baseline is allowed to blow up; its values stop where it did
        log.warning("naive baseline diverged: %s", exc)
        tn, pi_n = exc.trace, None
    vm, vn = _values_per_iteration(mdp, tm), _values_per_iteration(mdp, tn)
    n = max(len(vm), len(vn))
    pad = lambda v, i: _fmt(v[i]) if i < len(v) else ""  # noqa: E731
    rows = [(i + 1, pad(vm, i), pad(vn, i)) for i in range(n)]
    atomic_write_text(out / "compare.csv", _csv_text(COMPARE_HEADER, rows))
    fm = initial_value(mdp, pi_m) if pi_m is not None else math.nan
    fn = initial_value(mdp, pi_n) if pi_n is not None else math.nan
    # a diverged run counts as worse than any finite value
    km = -math.inf if math.isnan(fm) else fm
    kn = -math.inf if math.isnan(fn) else fn
    higher = "mviq" if km > kn else "naive" if kn > km else "tie"
    summary = [(_fmt(fm), _fmt(fn), _fmt(fm - fn), higher)]
    atomic_write_text(out / "summary.csv", _csv_text(SUMMARY_HEADER, summary))
    _write_json(
        out / "manifest.json",
        {
            "config": cfg.to_dict(),
            "environment": _env_block(mdp, path),
            "outcome": {"mviq_final": fm, "naive_final": fn, "higher": higher, "iterations": n},
            "artifacts": {"compare": "compare.csv", "summary": "summary.csv"},
        },
    )
    sys.stdout.write(_csv_text(SUMMARY_HEADER, summary))
    return status


def cmd_verify(args):
    from .verify import run_all

    results = run_all(seed=args.seed, cases=args.cases, inject_fault=args.inject_fault)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.seconds:7.2f}s  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        log.error("failed: %s", ", ".join(failed))
    return EXIT_OK if not failed else EXIT_NOT_CONVERGED


# --- entry point -------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="tsallis-mdp", description="Tsallis-regularized dynamic programming on tabular MDPs")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-env", help="write a generated MDP file")
    _add_env_args(g, required_kind=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_env)

    s = sub.add_parser("solve", help="run one solver")
    _add_env_args(s)
    _add_solver_args(s)
    s.add_argument("--out", default="run", help="output directory")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="run one solver per q")
    _add_env_args(w)
    _add_solver_args(w)
    w.add_argument("--qs", default="1,2,3,4,5,inf", help="comma-separated q values")
    w.add_argument("--override", action="append", help="per-q settings, e.g. 3:tau=0.2,alpha=0.5")
    w.add_argument("--jobs", type=int, help=f"parallel runs (default ${JOBS_ENV} or 1)")
    w.add_argument("--out", default="sweep", help="output directory")
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="MVI(q) against the naive ln_q baseline")
    _add_env_args(c)
    _add_solver_args(c, with_algo=False)
    c.add_argument("--out", default="compare", help="output directory")
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("verify", help="run the oracle and property checks")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cases", type=int, help="size of the randomized suites")
    v.add_argument("--inject-fault", action="store_true", help="flip the sparsemax support inequality")
    v.set_defaults(func=cmd_verify)
    return p


class _StderrHandler(logging.StreamHandler):
    """Looks up ``sys.stderr`` on every record so redirected streams are honored."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def _setup_logging(verbose):
    for h in [h for h in log.handlers if isinstance(h, _StderrHandler)]:
        log.removeHandler(h)
    handler = _StderrHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage; input errors are 1 here
        return EXIT_INPUT if exc.code else EXIT_OK
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except (ConvergenceError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (InputError, TsallisMdpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
