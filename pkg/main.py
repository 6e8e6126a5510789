import cProfile, logging, sys
from typing import Any, Dict, Optional
from dotenv import load_dotenv

from config.config_manager import ConfigManager
from config.exceptions import ConfigError
from scenes.scene_builder import load_scene_config, build_scene
from scenes.inverse_problem import load_problem
from experiments.simulation_runner import run_simulate
from experiments.gradcheck_runner import run_gradcheck
from experiments.identification_runner import run_identify
from experiments.factor_stats import run_factor_stats
from utils.arg_parser import parse_and_validate_console_args
from utils.logging_config import setup_logging
from utils.run_name_generator import generate_run_name

EXIT_CONFIG_ERROR = 1
EXIT_GRADCHECK_FAILED = 2

def _log_level(name: str) -> int:
    level = logging.getLevelName(str(name).upper())
    return level if isinstance(level, int) else logging.INFO

def _configure_logging(logging_section: Dict[str, Any], scene_name: str, command: str) -> None:
    setup_logging(_log_level(logging_section.get('log_level', 'INFO')),
                  bool(logging_section.get('log_to_file', False)),
                  generate_run_name(scene_name, command))

def initialize_scene_config(source: str) -> ConfigManager:
    return load_scene_config(source)

def run_command(args) -> int:
    if args.command == "identify":
        problem = load_problem(args.source)
        _configure_logging(problem.logging, problem.name, args.command)
        run_identify(problem, args.output)
        return 0

    config_manager = initialize_scene_config(args.source)
    _configure_logging(config_manager.get_logging(), config_manager.get_scene_name(), args.command)
    scene = build_scene(config_manager)

    if args.command == "simulate":
        run_simulate(scene, args.output)
        return 0

    if args.command == "gradcheck":
        report = run_gradcheck(scene, args.variables, args.output, seed=args.seed)
        if not report["passed"]:
            logging.error(f"Gradient check failed on scene '{scene.name}'.")
            return EXIT_GRADCHECK_FAILED
        return 0

    run_factor_stats(scene, samples=args.samples, seed=args.seed)
    return 0

def main(cli_args: Optional[list] = None) -> int:
    load_dotenv()
    try:
        args = parse_and_validate_console_args(cli_args)
    except RuntimeError as e:
        logging.error(str(e))
        return EXIT_CONFIG_ERROR

    try:
        if args.profile:
            profiler = cProfile.Profile()
            exit_code = profiler.runcall(run_command, args)
            profiler.dump_stats("profile_results.prof")
            return exit_code
        return run_command(args)

    except ConfigError as e:
        logging.error(f"An error occurred while loading the configuration: {e}")
        return EXIT_CONFIG_ERROR

if __name__ == "__main__":
    sys.exit(main())
