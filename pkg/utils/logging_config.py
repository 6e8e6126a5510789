import logging, os
from logging.handlers import RotatingFileHandler
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

def setup_logging(
    log_level: int,
    log_to_file: bool = False,
    run_name: Optional[str] = None,
    max_file_size: int = 5_000_000,  # 5MB before rotation
    backup_count: int = 5
) -> None:
    """
    Sets up console logging and, optionally, a rotating log file per run.

    Args:
        log_level (int): The logging level (e.g., logging.INFO, logging.DEBUG).
        log_to_file (bool): Whether to log to a file.
        run_name (Optional[str]): Name of the run, used as the log file name.
        max_file_size (int): Maximum size of log file in bytes before rotation.
        backup_count (int): Number of backup log files to keep.
    """
    handlers = []

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handlers.append(console_handler)
    log_file_path = ""

    if log_to_file:
        log_dir = 'logs'
        os.makedirs(log_dir, exist_ok=True)
        log_file_path = os.path.join(log_dir, f"{run_name}.log" if run_name else 'heterodyn.log')

        file_handler = RotatingFileHandler(log_file_path, maxBytes=max_file_size, backupCount=backup_count, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    logging.basicConfig(level=log_level, handlers=handlers, force=True)
    logging.info(f"Logging initialized. Log level: {logging.getLevelName(log_level)}")

    if log_to_file:
        logging.info(f"File logging enabled. Logs are stored in: {log_file_path}")
