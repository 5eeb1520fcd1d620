"""Channel file reading and writing.

A channel file is UTF-8 JSON::

    {
      "n_t": 2,
      "h1": [[re, im], [re, im]],
      "h2": [[re, im], [re, im]],
      "g1": [[re, im], [re, im]],
      "h3": [re, im],
      "g2": [re, im],
      "sigma2": {"u1": 1.0, "u2": 1.0, "u3": 1.0, "e1": 1.0, "e2": 1.0}
    }

Floats are written with their shortest round-trip representation, so a saved file
loads back to an identical ChannelSet. Unknown keys are rejected.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Union

from ..channel.model import ChannelSet, NoiseVariances
from ..utils.exceptions import ChannelFileError, InvalidDimensionError, StorageError
from ..utils.exceptions import ValidationError
from ..utils.logging import get_logger
from ..utils.validation import complex_to_pair, parse_complex_pair

logger = get_logger(__name__)

CHANNEL_KEYS = ("n_t", "h1", "h2", "g1", "h3", "g2", "sigma2")
NOISE_KEYS = ("u1", "u2", "u3", "e1", "e2")


def channel_to_dict(cs: ChannelSet) -> Dict[str, Any]:
    """Plain-data form of a channel set."""
    return {
        "n_t": cs.n_t,
        "h1": [complex_to_pair(v) for v in cs.h1],
        "h2": [complex_to_pair(v) for v in cs.h2],
        "g1": [complex_to_pair(v) for v in cs.g1],
        "h3": complex_to_pair(cs.h3),
        "g2": complex_to_pair(cs.g2),
        "sigma2": {key: float(getattr(cs.sigma2, key)) for key in NOISE_KEYS},
    }


def channel_to_json(cs: ChannelSet) -> str:
    """Canonical channel-file text."""
    return json.dumps(channel_to_dict(cs), indent=2) + "\n"


def channel_fingerprint(cs: ChannelSet) -> str:
    """Short SHA-256 digest of the canonical channel-file bytes.

    Equal to :func:`file_fingerprint` of the file :func:`save_channel_set` writes.
    """
    return _digest(channel_to_json(cs).encode("utf-8"))


def file_fingerprint(path: Union[str, Path]) -> str:
    """Short SHA-256 digest of a channel file as it sits on disk."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise StorageError(f"Failed to read channel file {path}: {e}") from e
    return _digest(data)


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def save_channel_set(cs: ChannelSet, path: Union[str, Path]) -> Path:
    """Write a channel file."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(channel_to_json(cs).encode("utf-8"))
    except OSError as e:
        raise StorageError(f"Failed to write channel file {path}: {e}") from e

    logger.debug(f"Saved channel set -> {path}")
    return path


def load_channel_set(path: Union[str, Path]) -> ChannelSet:
    """Read and validate a channel file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(f"Failed to read channel file {path}: {e}") from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChannelFileError(f"Invalid JSON in channel file {path}: {e}") from e

    return channel_from_dict(data)


def channel_from_dict(data: Any) -> ChannelSet:
    """Validate plain data and build a ChannelSet."""
    if not isinstance(data, dict):
        raise ChannelFileError("Channel file must contain a JSON object")

    for key in data:
        if key not in CHANNEL_KEYS:
            raise ChannelFileError(f"Unknown key in channel file: {key!r}", field=key)
    for key in CHANNEL_KEYS:
        if key not in data:
            raise ChannelFileError(f"Channel file is missing field {key!r}", field=key)

    n_t = data["n_t"]
    if not isinstance(n_t, int) or isinstance(n_t, bool):
        raise ChannelFileError(f"Field 'n_t' must be an integer, got {n_t!r}", field="n_t")

    vectors = {name: _parse_vector(data[name], name) for name in ("h1", "h2", "g1")}
    for name, values in vectors.items():
        if len(values) != n_t:
            raise InvalidDimensionError(
                f"Field {name!r} has length {len(values)} but n_t={n_t}"
            )

    return ChannelSet(
        n_t=n_t,
        h1=vectors["h1"],
        h2=vectors["h2"],
        g1=vectors["g1"],
        h3=_parse_scalar(data["h3"], "h3"),
        g2=_parse_scalar(data["g2"], "g2"),
        sigma2=_parse_noise(data["sigma2"]),
    )


def _parse_scalar(value: Any, name: str) -> complex:
    try:
        return parse_complex_pair(value, name)
    except ValidationError as e:
        raise ChannelFileError(str(e), field=name) from e


def _parse_vector(value: Any, name: str) -> List[complex]:
    if not isinstance(value, list):
        raise ChannelFileError(f"Field {name!r} must be a list of [re, im] pairs", field=name)
    return [_parse_scalar(entry, name) for entry in value]


def _parse_noise(value: Any) -> NoiseVariances:
    if not isinstance(value, dict):
        raise ChannelFileError("Field 'sigma2' must be an object", field="sigma2")
    for key in value:
        if key not in NOISE_KEYS:
            raise ChannelFileError(
                f"Unknown key in sigma2: {key!r}", field=f"sigma2.{key}"
            )
    for key in NOISE_KEYS:
        if key not in value:
            raise ChannelFileError(
                f"Field 'sigma2' is missing {key!r}", field=f"sigma2.{key}"
            )
    return NoiseVariances(**{key: value[key] for key in NOISE_KEYS})
