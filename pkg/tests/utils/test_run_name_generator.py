from unittest.mock import patch
from datetime import datetime
from utils.run_name_generator import generate_run_name

@patch("utils.run_name_generator.datetime")
def test_generate_run_name(mock_datetime):
    mock_datetime.now.return_value = datetime(2025, 1, 1, 12, 0)
    assert generate_run_name("two-tet", "factor-stats") == "factor_stats_two-tet_20250101_1200"

@patch("utils.run_name_generator.datetime")
def test_unsafe_characters_are_replaced(mock_datetime):
    mock_datetime.now.return_value = datetime(2025, 3, 9, 8, 5)
    assert generate_run_name("my scene/v2", "simulate") == "simulate_my_scene_v2_20250309_0805"

@patch("utils.run_name_generator.datetime")
def test_empty_scene_name(mock_datetime):
    mock_datetime.now.return_value = datetime(2025, 3, 9, 8, 5)
    assert generate_run_name("///", "identify") == "identify_scene_20250309_0805"
