from pathlib import Path
from typing import Any, Dict, List

import orjson

HERE = Path(__file__).parent

# PUBLIC API


def get_sample_paths() -> List[Path]:
    """List all fixtures."""
    return list(HERE.glob("sample.*"))


def load_sample(command: str) -> Dict[str, Any]:
    """The sample input document for a CLI command, e.g. ``"wendl-certify"``."""
    return orjson.loads((HERE / f"sample.{command}.json").read_bytes())
