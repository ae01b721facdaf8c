"""Stable JSON/CSV text: shortest round-trip floats, non-finite floats as strings."""

import enum
import json
import math
import re

import numpy as np

SCHEMA = 1


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return repr(x)


_MARK = "\x00f:"
_MARK_RE = re.compile(r'"\\u0000f:([^"]*)"')


def _plain(obj):
    if isinstance(obj, enum.Enum):
        return _plain(obj.value)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # finite numbers are tagged and unquoted after dumping
        return _MARK + fmt_float(x) if math.isfinite(x) else fmt_float(x)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    text = json.dumps(_plain(obj), indent=2, sort_keys=True)
    return _MARK_RE.sub(r"\1", text) + "\n"
