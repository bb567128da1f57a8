import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

SDK_DIR = Path(__file__).resolve().parent.parent.parent
DEFAULT_FIXTURES_DIR = SDK_DIR / "fixtures"


def _csv_env(name: str, default: str = ""):
    raw = os.environ.get(name, default)
    return [item.strip() for item in raw.split(",") if item.strip()]


LOG_LEVEL = os.environ.get("WALLKIT_LOG_LEVEL", "WARNING").upper()
DEFAULT_SEED = int(os.environ.get("WALLKIT_SEED", "7"))
EXTRA_FIXTURE_FILES = _csv_env("WALLKIT_FIXTURE_FILES")


def fixtures_dir() -> Path:
    """Fixture directory; WALLKIT_FIXTURES is re-read on every call so tests can repoint it."""
    override = os.environ.get("WALLKIT_FIXTURES", "")
    return Path(override) if override else DEFAULT_FIXTURES_DIR


def fixture_path(name: str) -> Path:
    return fixtures_dir() / name
