import json, os, logging
from typing import Any, Dict, Iterable
import numpy as np
import pandas as pd

def _to_serializable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")

def _ensure_parent(file_path: str) -> None:
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

def save_json_lines(records: Iterable[Dict[str, Any]], file_path: str) -> None:
    """Writes one JSON object per line (UTF-8)."""
    try:
        _ensure_parent(file_path)
        with open(file_path, 'w', encoding='utf-8') as handle:
            for record in records:
                handle.write(json.dumps(record, default=_to_serializable) + "\n")
        logging.info(f"Trajectory saved to {file_path}")

    except (OSError, IOError) as e:
        logging.error(f"Failed to save trajectory to {file_path}: {e}")

def save_metrics_csv(metrics: pd.DataFrame, file_path: str) -> None:
    try:
        _ensure_parent(file_path)
        metrics.to_csv(file_path, index=False, encoding='utf-8')
        logging.info(f"Metrics saved to {file_path}")

    except (OSError, IOError) as e:
        logging.error(f"Failed to save metrics to {file_path}: {e}")

def save_json_report(report: Dict[str, Any], file_path: str) -> None:
    try:
        _ensure_parent(file_path)
        with open(file_path, 'w', encoding='utf-8') as handle:
            json.dump(report, handle, indent=4, default=_to_serializable)
        logging.info(f"Report saved to {file_path}")

    except (OSError, IOError) as e:
        logging.error(f"Failed to save report to {file_path}: {e}")
