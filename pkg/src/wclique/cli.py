"""``wclique`` command line.

Single results go out as JSON, sweeps as CSV. Every JSON document carries
``"schema": 1`` and the resolved configuration, floats are written with 17
significant digits and nothing time- or host-dependent is included, so a
repeated command with the same seed reproduces its output byte for byte.
"""

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from . import __version__
from ._backend import get_backend, set_backend
from ._jsonio import SCHEMA, dumps, fmt_float
from .detectors import DEFAULT_BUDGET, DETECTORS, make_detector
from .distributions import PAIR_NAMES, RealSet, parse_pair_spec
from .divergences import check_relations, divergences, random_discrete_pair
from .model import read_instance, sample_null, sample_planted, write_instance
from .risk import estimate_risk, exact_lrt_risk, likelihood_moments, second_moment, thresholds
from .rng import derive_seed, generator

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


class CliError(Exception):
    """Bad invocation; reported as a JSON error object."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _pair(text):
    try:
        return parse_pair_spec(text)
    except ValueError as exc:
        raise CliError(f"invalid pair spec {text!r}: {exc}") from None


def _set(text):
    if text is None:
        return None
    try:
        return RealSet.parse(text)
    except ValueError as exc:
        raise CliError(f"invalid set {text!r}: {exc}") from None


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _doc(command, config, **payload):
    return {"schema": SCHEMA, "command": command, "config": config, **payload}


def _detector_config(args, pair):
    return make_detector(
        args.test,
        pair,
        k=args.k,
        delta=args.delta,
        budget=args.budget,
        set_a=_set(args.set),
        norm_method=args.norm_method,
    )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args):
    pair = _pair(args.pair)
    hyp = args.hypothesis or ("H1" if args.k >= 2 else "H0")
    if hyp == "H1":
        inst = sample_planted(args.n, args.k, pair, args.seed)
    else:
        inst = sample_null(args.n, pair.p, args.seed, args.k)
    if args.out is None or args.out == "-":
        buf = io.StringIO()
        write_instance(inst, buf)
        sys.stdout.write(buf.getvalue())
        return EXIT_OK
    write_instance(inst, args.out)
    config = {"n": args.n, "k": args.k, "pair": pair.spec(), "hypothesis": hyp, "seed": args.seed}
    sys.stdout.write(dumps(_doc("generate", config, path=str(args.out), hidden_set=inst.hidden_set)))
    return EXIT_OK


def cmd_detect(args):
    path = Path(args.input)
    if not path.exists():
        raise CliError(f"instance file not found: {path}")
    inst = read_instance(path)
    if args.k is None:
        args.k = inst.k
    pair = _pair(args.pair)
    verdict = _detector_config(args, pair)(inst.graph)
    config = {
        "test": args.test,
        "input": str(args.input),
        "n": inst.n,
        "k": args.k,
        "pair": pair.spec(),
        "delta": args.delta,
        "set": args.set,
        "budget": args.budget,
        "norm_method": args.norm_method,
        "instance_seed": inst.seed,
        "instance_hypothesis": inst.hypothesis.value,
    }
    _emit(dumps(_doc("detect", config, verdict=verdict)), args.out)
    return EXIT_OK


def cmd_divergence(args):
    pair = _pair(args.pair)
    rep = divergences(pair)
    config = {"pair": pair.spec()}
    _emit(dumps(_doc("divergence", config, abs_continuous=pair.abs_continuous, **rep.to_dict())), args.out)
    return EXIT_OK


def cmd_thresholds(args):
    pair = _pair(args.pair)
    rep = thresholds(args.n, pair, args.epsilon, args.delta, bc_k=args.bc_k, log_constant=args.log_constant)
    config = {
        "n": args.n,
        "pair": pair.spec(),
        "epsilon": args.epsilon,
        "delta": args.delta,
        "bc_k": args.bc_k,
        "log_constant": args.log_constant,
    }
    _emit(dumps(_doc("thresholds", config, **rep.to_dict())), args.out)
    return EXIT_OK


def _risk_config(args, pair, **extra):
    return {
        "test": args.test,
        "pair": pair.spec(),
        "trials": args.trials,
        "seed": args.seed,
        "delta": args.delta,
        "set": args.set,
        "budget": args.budget,
        "norm_method": args.norm_method,
        **extra,
    }


def cmd_risk(args):
    pair = _pair(args.pair)
    det = _detector_config(args, pair)
    est = estimate_risk(det, args.n, args.k, pair, args.trials, args.seed, workers=args.workers)
    config = _risk_config(args, pair, n=args.n, k=args.k)
    _emit(dumps(_doc("risk", config, **est.to_dict())), args.out)
    return EXIT_OK


def _parse_range(text):
    parts = text.split(":")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise CliError(f"bad range {text!r}; expected a:b or a:b:step") from None
    if len(vals) == 2:
        vals.append(1)
    if len(vals) != 3 or vals[2] <= 0 or vals[1] < vals[0]:
        raise CliError(f"bad range {text!r}; expected a:b[:step] with a <= b and step > 0")
    return list(range(vals[0], vals[1] + 1, vals[2]))


def _parse_ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"bad integer list {text!r}") from None


def cmd_sweep(args):
    pair = _pair(args.pair)
    tests = [t.strip() for t in args.test.split(",") if t.strip()]
    for t in tests:
        if t not in DETECTORS:
            raise CliError(f"unknown test {t!r}; choose from {', '.join(DETECTORS)}")
    ns = _parse_ints(args.n)
    ks = _parse_range(args.k_range)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "k", "test", "type1", "type2", "risk", "ci95"])
    smallest = {}
    for n in ns:
        for k in ks:
            for t in tests:
                det = make_detector(
                    t, pair, k=k, delta=args.delta, budget=args.budget, set_a=_set(args.set), norm_method=args.norm_method
                )
                seed = derive_seed(args.seed, n, k, DETECTORS.index(t))
                est = estimate_risk(det, n, k, pair, args.trials, seed, workers=args.workers)
                writer.writerow([n, k, t, fmt_float(est.type1), fmt_float(est.type2), fmt_float(est.risk),
                                 fmt_float(est.ci95_halfwidth)])
                key = f"{n}/{t}"
                if est.risk <= args.level and key not in smallest:
                    smallest[key] = k
    _emit(buf.getvalue(), args.out)
    if args.summary:
        guaranteed = {}
        for n in ns:
            if n < 3:
                continue
            try:
                rep = thresholds(n, pair, 1.0, args.delta)
            except ValueError:
                continue
            guaranteed[str(n)] = {
                "kl_threshold_k": rep.kl_threshold_k,
                "spectral_k_T1": rep.spectral_k_T1,
                "spectral_k_T2": rep.spectral_k_T2,
                "spectral_constants_asymptotic": rep.spectral_constants_asymptotic,
            }
        config = _risk_config(args, pair, n=ns, k_range=args.k_range, level=args.level)
        config["test"] = tests
        doc = _doc(
            "sweep",
            config,
            guaranteed_k=guaranteed,
            smallest_detecting_k={key: smallest.get(key) for key in (f"{n}/{t}" for n in ns for t in tests)},
        )
        Path(args.summary).write_text(dumps(doc))
    return EXIT_OK


def run_selfcheck(seed=0):
    """Divergence relations on random discrete pairs and enumeration oracles on tiny graphs."""
    checks = []

    def record(name, ok, **info):
        checks.append({"name": name, "ok": bool(ok), **info})

    rng = generator(derive_seed(seed, 0))
    bad = 0
    for _ in range(100):
        bad += bool(check_relations(divergences(random_discrete_pair(rng))))
    record("divergence_relations", bad == 0, pairs=100, violations=bad)

    pair = parse_pair_spec("bernoulli_dirac:0.5")
    worst = 0.0
    for n in (4, 5, 6):
        for k in (2, 3):
            enumerated = likelihood_moments(n, k, pair)["e0_L2"]
            worst = max(worst, abs(enumerated - second_moment(n, k, 2.0)[0]))
    record("second_moment_vs_enumeration", worst <= 1e-10, max_abs_error=worst)

    try:
        risk, _, root = exact_lrt_risk(5, 2, pair)
        sandwich = 1.0 - math.sqrt(max(0.0, 1.0 - root * root)) <= risk + 1e-12 and risk <= root + 1e-12
        record("exact_lrt_identity_and_sandwich", sandwich, risk=risk, root_likelihood=root)
    except ArithmeticError as exc:
        record("exact_lrt_identity_and_sandwich", False, message=str(exc))

    same = parse_pair_spec("bernoulli_bernoulli:0.5,0.5")
    risk_same = exact_lrt_risk(4, 2, same).risk
    record("exact_lrt_null_pair", abs(risk_same - 1.0) <= 1e-12, risk=risk_same)
    return checks


def cmd_selfcheck(args):
    checks = run_selfcheck(args.seed)
    ok = all(c["ok"] for c in checks)
    config = {"seed": args.seed}
    _emit(dumps(_doc("selfcheck", config, ok=ok, checks=checks)), args.out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_detector_flags(p, k_default=None):
    p.add_argument("--test", required=True, help=f"one of {', '.join(DETECTORS)}")
    p.add_argument("--pair", default="bernoulli_dirac:0.5", help="name:param1,param2 (default %(default)s)")
    p.add_argument("--k", type=int, default=k_default)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--set", default=None, help="weight set for support/t1, e.g. '[1,2);{3}'")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subsets to enumerate")
    p.add_argument("--norm-method", default="auto", choices=("auto", "dense", "power", "lanczos"))


def build_parser():
    parser = _Parser(prog="wclique", description="Weighted hidden clique detection toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--backend", choices=("numba", "numpy"), default=None, help="kernel implementation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a null or planted instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--pair", default="bernoulli_dirac:0.5")
    p.add_argument("--hypothesis", choices=("H0", "H1"), default=None, help="default H1 when k >= 2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="run one test on an instance file")
    _add_detector_flags(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("divergence", help="TV, KL, chi2, Hellinger and Bhattacharyya of a pair")
    p.add_argument("--pair", required=True, help=f"one of {', '.join(PAIR_NAMES)}, with optional :params")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("thresholds", help="detection and indistinguishability thresholds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pair", required=True)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--bc-k", type=int, default=2, help="clique size for the Bhattacharyya risk bound")
    p.add_argument("--log-constant", type=float, default=1.0, help="c in c*log n when KL is infinite")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("risk", help="Monte Carlo Type I / Type II of one test")
    _add_detector_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="default $WCLIQUE_WORKERS or 1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("sweep", help="risk over a grid of n, k and tests, as CSV")
    p.add_argument("--test", required=True, help="comma-separated test names")
    p.add_argument("--pair", default="bernoulli_dirac:0.5")
    p.add_argument("--n", required=True, help="comma-separated sizes")
    p.add_argument("--k-range", required=True, help="a:b[:step], inclusive of b")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--set", default=None)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--norm-method", default="auto", choices=("auto", "dense", "power", "lanczos"))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--level", type=float, default=0.1, help="risk level for the smallest detecting k")
    p.add_argument("--summary", default=None, help="JSON file for config, guaranteed and detecting k")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selfcheck", help="run the built-in oracle checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def _error(exc, code):
    err = {"schema": SCHEMA, "error": {"type": type(exc).__name__, "message": str(exc)}}
    sys.stderr.write(dumps(err))
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        return _error(exc, EXIT_ERROR)
    previous = None
    if args.backend:
        previous = set_backend(args.backend)
    try:
        return args.func(args)
    except CliError as exc:
        return _error(exc, EXIT_ERROR)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        return _error(exc, EXIT_FAIL)
    finally:
        if previous is not None and previous != get_backend():
            set_backend(previous)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
