"""Access to the bundled task documents.

The five bundled tasks are reconstructions of public ARC training tasks,
verified against independent per-task reference transforms (see
tests/test_data.py). Set ARC_DATA_DIR to a directory of original task files
to use those instead.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from arclogic.grid import Task, parse_task

BUNDLED_TASK_IDS = ("08ed6ac7", "0a938d79", "150deff5", "7e0986d6", "a48eeaf7")


def task_path(task_id: str) -> Path:
    """Filesystem path for a task document; prefers ARC_DATA_DIR."""
    override = os.environ.get("ARC_DATA_DIR")
    if override:
        p = Path(override) / f"{task_id}.json"
        if p.exists():
            return p
    ref = resources.files("arclogic.data.tasks") / f"{task_id}.json"
    return Path(str(ref))


def load_task(task_id: str) -> Task:
    return parse_task(task_path(task_id).read_bytes(), task_id=task_id)
