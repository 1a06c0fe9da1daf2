"""The ``robust-loss-lab`` command line.

Exit codes: 0 when the command's checks pass, 1 when a check fails or the
numerics break down (divergence, degeneracy), 2 on a usage, configuration
or input-data error.
"""
import argparse
import logging
import sys
from typing import List, Optional

from robust_loss_lab.core.errors import (
    ConfigError,
    DomainError,
    LabelIndexError,
    RankError,
    RobustLossLabError,
    ShapeError,
)
from robust_loss_lab.harness.config import ExperimentConfig, update
from robust_loss_lab.harness.experiments import (
    cmd_check_symmetry,
    cmd_demo_mitigation,
    cmd_robustness_muh,
    cmd_sweep_alpha,
    cmd_verify_risk_identity,
)

log = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Bad input exits 2; numerical failures (divergence, degeneracy) exit 1.
INPUT_ERRORS = (ConfigError, ShapeError, RankError, LabelIndexError, DomainError)


def _csv_list(cast):
    def parse(text: str):
        try:
            return [cast(item.strip()) for item in text.split(",") if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}")
    return parse


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting, so ``main`` owns the exit code."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robust-loss-lab", description="Verify noise-robust losses and output regularizers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    common.add_argument("--out", help="directory for report.json and table CSVs")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    common.add_argument("--n-jobs", type=int, help="parallel workers for independent items")
    common.add_argument("--seeds", type=_csv_list(int), help="comma separated master seeds")

    sym = sub.add_parser("check-symmetry", parents=[common], help="test the label-sum symmetry of losses")
    sym.add_argument("--losses", type=_csv_list(str), help="comma separated loss config strings")
    sym.add_argument("--c", type=_csv_list(int), dest="n_classes", help="comma separated class counts")
    sym.add_argument("--trials", type=int)
    sym.add_argument("--tol", type=float)

    sub.add_parser("verify-risk-identity", parents=[common], help="check the noisy-risk identity over a grid")

    for name, text in (("robustness-muh", "compare clean and noisy minimisers"),
                       ("sweep-alpha", "asymptotic robustness along an alpha schedule"),
                       ("demo-mitigation", "accuracy across penalty coefficients")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--loss")
        p.add_argument("--regularizer")
        p.add_argument("--rho", type=float)
        p.add_argument("--model", choices=["linear", "mlp2"])
        p.add_argument("--data", help="dataset CSV instead of synthetic blobs")
        if name == "robustness-muh":
            p.add_argument("--trace", action="store_true", help="write optimizer traces")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Command defaults, then the config file, then flags."""
    config = ExperimentConfig.for_command(args.command)
    if args.config:
        config = ExperimentConfig.from_json(args.config, base=config)
    overrides = {}
    for key in ("loss", "regularizer", "rho", "seeds", "n_jobs"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if getattr(args, "trace", False):
        overrides["trace"] = True
    if getattr(args, "model", None):
        overrides["model"] = {"family": args.model}
    if getattr(args, "data", None):
        overrides["dataset"] = {"source": "csv", "path": args.data, "n_classes": None}
    if args.command == "check-symmetry":
        symmetry = {k: getattr(args, k) for k in ("losses", "n_classes", "trials", "tol") if getattr(args, k) is not None}
        if symmetry:
            overrides["symmetry"] = symmetry
    return update(config, overrides).validate()


def run(args: argparse.Namespace) -> bool:
    config = resolve_config(args)
    log.info(f"Running {args.command}")
    if args.command == "check-symmetry":
        s = config.symmetry
        report = cmd_check_symmetry(s.losses, s.n_classes, s.trials, s.tol, seed=config.seeds[0], out_dir=args.out)
    else:
        commands = {
            "verify-risk-identity": cmd_verify_risk_identity,
            "robustness-muh": cmd_robustness_muh,
            "sweep-alpha": cmd_sweep_alpha,
            "demo-mitigation": cmd_demo_mitigation,
        }
        report = commands[args.command](config, out_dir=args.out)
    report.write()
    print(report.render())
    log.info(f"{args.command} passed={report.passed}")
    return bool(report.passed)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    try:
        return EXIT_PASS if run(args) else EXIT_FAIL
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RobustLossLabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
