import re
from datetime import datetime

def generate_run_name(scene_name: str, command: str) -> str:
    """
    Builds a descriptive, file-system safe run name such as ``gradcheck_two-tet_20250101_1200``.
    """
    safe_scene = re.sub(r'[^A-Za-z0-9_.-]+', '_', scene_name).strip('_') or "scene"
    start_time = datetime.now().strftime("%Y%m%d_%H%M")
    return f"{command.replace('-', '_')}_{safe_scene}_{start_time}"
