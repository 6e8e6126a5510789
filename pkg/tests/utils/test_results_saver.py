import json
from unittest.mock import patch
import numpy as np
import pandas as pd
from utils.results_saver import save_json_lines, save_json_report, save_metrics_csv

class TestResultsSaver:
    def test_json_lines_convert_numpy_values(self, tmp_path):
        path = tmp_path / "out" / "trajectory.jsonl"
        save_json_lines([{"frame": np.int64(0), "q": np.zeros((2, 3))}, {"frame": 1, "ok": np.bool_(True)}], str(path))

        lines = path.read_text(encoding='utf-8').splitlines()
        assert len(lines) == 2
        assert json.loads(lines[0]) == {"frame": 0, "q": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]}
        assert json.loads(lines[1])["ok"] is True

    def test_metrics_csv(self, tmp_path):
        path = tmp_path / "metrics.csv"
        save_metrics_csv(pd.DataFrame({"frame": [0, 1], "iterations": [4, 3]}), str(path))
        assert pd.read_csv(path)["iterations"].tolist() == [4, 3]

    def test_json_report(self, tmp_path):
        path = tmp_path / "report.json"
        save_json_report({"passed": np.bool_(False), "error": np.float64(0.5)}, str(path))
        assert json.loads(path.read_text(encoding='utf-8')) == {"passed": False, "error": 0.5}

    def test_write_failure_is_logged(self, tmp_path, caplog):
        with patch("builtins.open", side_effect=OSError("disk full")):
            save_json_report({"passed": True}, str(tmp_path / "report.json"))
        assert "Failed to save report" in caplog.text
