import os
import logging
from dotenv import load_dotenv

from fimgraph.errors import ConfigError

logger = logging.getLogger(__name__)

_env_loaded = False

LOG_LEVELS = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
}


def _getenv(name, default):
    """
    Read a setting, loading a local .env file the first time round.
    Real environment variables win over the .env file.
    """
    global _env_loaded
    if not _env_loaded:
        load_dotenv()
        _env_loaded = True
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    return value.strip()


def _positive_int(name, default):
    raw = _getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be at least 1, got {value}")
    return value


def get_log_level():
    """
    Logging level for the command line tool.
    Returns: int - a logging level, WARNING unless FIMGRAPH_LOG_LEVEL says otherwise
    """
    name = _getenv('FIMGRAPH_LOG_LEVEL', 'WARNING').upper()
    if name not in LOG_LEVELS:
        raise ConfigError(f"FIMGRAPH_LOG_LEVEL must be one of {sorted(LOG_LEVELS)}, got {name!r}")
    return LOG_LEVELS[name]


def get_complete_depth():
    """Depth used by `complete` when no --depth is given."""
    return _positive_int('FIMGRAPH_COMPLETE_DEPTH', 2)


def get_deck_workers():
    """Thread count for the brute-force deck search (1 = sequential)."""
    return _positive_int('FIMGRAPH_DECK_WORKERS', 4)


def get_bouquet_vertex():
    """Vertex id used for generated bouquets B_X."""
    vertex = _getenv('FIMGRAPH_BOUQUET_VERTEX', 'o')
    if any(ch.isspace() for ch in vertex) or vertex.startswith('#'):
        raise ConfigError(f"FIMGRAPH_BOUQUET_VERTEX is not a valid vertex id: {vertex!r}")
    return vertex
