import argparse, logging, os, traceback
from config.design_variable_kind import GradcheckVariable

def _is_generator_name(source: str) -> bool:
    from scenes.generators import GENERATORS
    return source in GENERATORS

def validate_args(args):
    """
    Validates parsed arguments.

    Args:
        args: Parsed arguments object.
    Raises:
        ValueError: If validation fails.
    """
    if not os.path.exists(args.source) and not (args.command != "identify" and _is_generator_name(args.source)):
        raise ValueError(f"Input file does not exist: {args.source}")

    if args.command == "gradcheck":
        args.variables = [GradcheckVariable.from_string(name.strip()) for name in args.vars.split(",") if name.strip()]
        if not args.variables:
            raise ValueError("At least one gradient-check variable is required.")

    if args.command == "factor-stats" and args.samples <= 0:
        raise ValueError(f"--samples must be positive, got {args.samples}")

    output = getattr(args, "output", None)
    if args.command == "gradcheck" and output:
        output_dir = os.path.dirname(output)
        if output_dir and not os.path.exists(output_dir):
            raise ValueError(f"The directory for the gradient-check report does not exist: {output_dir}")

def parse_and_validate_console_args(cli_args=None):
    """
    Parses and validates console arguments.

    Args:
        cli_args: Optional CLI arguments for testing.
    Returns:
        argparse.Namespace: Parsed and validated arguments.
    Raises:
        RuntimeError: If argument parsing or validation fails.
    """
    try:
        parser = argparse.ArgumentParser(
            prog="heterodyn",
            description="Differentiable projective dynamics for heterogeneous solids with frictional contact.\n\n"
                "Simulate a scene, check its gradients against finite differences, identify "
                "material or initial-state parameters, or inspect the sparse inverse factor.",
            formatter_class=argparse.ArgumentDefaultsHelpFormatter
        )
        parser.add_argument('--profile', action='store_true', help='Profile the run and write profile_results.prof.')
        subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

        simulate = subparsers.add_parser("simulate", help="Run every frame of a scene and write trajectory and metrics.")
        simulate.add_argument('source', metavar='SCENE', help='Scene JSON file or built-in generator name.')
        simulate.add_argument('-o', '--output', type=str, metavar='DIR', help='Directory for trajectory.jsonl, metrics.csv and summary.json.')

        gradcheck = subparsers.add_parser("gradcheck", help="Compare adjoint gradients with central finite differences.")
        gradcheck.add_argument('source', metavar='SCENE', help='Scene JSON file or built-in generator name.')
        gradcheck.add_argument('--vars', type=str, default="v0", help='Comma-separated variables among q0, v0, f_ext, w, E.')
        gradcheck.add_argument('-o', '--output', type=str, metavar='FILE', help='Path of the JSON report.')
        gradcheck.add_argument('--seed', type=int, default=0, help='Seed of the random linear loss.')

        identify = subparsers.add_parser("identify", help="Solve an inverse problem with L-BFGS.")
        identify.add_argument('source', metavar='PROBLEM', help='Inverse-problem JSON file.')
        identify.add_argument('-o', '--output', type=str, metavar='DIR', help='Directory for result.json and loss_curve.csv.')

        factor_stats = subparsers.add_parser("factor-stats", help="Report fill, timing and exactness of the sparse inverse factor.")
        factor_stats.add_argument('source', metavar='SCENE', help='Scene JSON file or built-in generator name.')
        factor_stats.add_argument('--samples', type=int, default=100, help='Random vectors used for the exactness residual.')
        factor_stats.add_argument('--seed', type=int, default=0, help='Seed of the random vectors.')

        args = parser.parse_args(cli_args)
        validate_args(args)
        return args

    except SystemExit as e:
        if e.code == 0:  # --help
            raise
        logging.error(f"Argument parsing failed: {e}")
        raise RuntimeError("Failed to parse arguments. Please check your inputs.") from e

    except ValueError as e:
        logging.error(f"Validation failed: {e}")
        raise RuntimeError("Argument validation failed.") from e

    except Exception as e:
        logging.error(f"An unexpected error occurred while parsing arguments: {e}")
        logging.error(traceback.format_exc())
        raise RuntimeError("An unexpected error occurred during argument parsing.") from e
