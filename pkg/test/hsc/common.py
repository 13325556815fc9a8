import sys
from pathlib import Path


def get_top_level_path() -> Path:
    # test/hsc/common.py -> repository root
    return Path(__file__).resolve().parents[2]


def add_hsc_to_sys_path():
    src = str(get_top_level_path() / "src")
    if src not in sys.path:
        sys.path.append(src)
