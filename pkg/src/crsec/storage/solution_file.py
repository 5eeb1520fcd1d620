"""Solution files: the JSON form of a solved scheme."""

import json
from pathlib import Path
from typing import Any, Dict, Union

from ..sca.driver import Solution
from ..utils.exceptions import StorageError
from ..utils.logging import get_logger

logger = get_logger(__name__)


def solution_to_json(solution: Solution) -> str:
    return json.dumps(solution.to_dict(), indent=2) + "\n"


def save_solution(solution: Solution, path: Union[str, Path]) -> Path:
    """Write a solution file."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(solution_to_json(solution), encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Failed to write solution file {path}: {e}") from e

    logger.debug(f"Saved {solution.scheme} solution -> {path}")
    return path


def load_solution_dict(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a solution file back as plain data."""
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise StorageError(f"Failed to read solution file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise StorageError(f"Solution file {path} is not valid JSON: {e}") from e
