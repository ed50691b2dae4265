import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Optional, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel

from config import thread_cap
from schema import EntropyProfile, LipschitzCertificate, WidthEstimate

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map fn over items, keeping input order; LIPWIDTH_THREADS caps the workers."""
    items = list(items)
    workers = thread_cap()
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def format_number(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _render(obj: Any) -> str:
    if isinstance(obj, BaseModel):
        return _render(obj.model_dump(by_alias=True))
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isinf(value) or math.isnan(value):
            return json.dumps(format_number(value))
        return format_number(value)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_render(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    raise TypeError(f"Unsupported type for JSON output: {type(obj).__name__}")


def dumps_json(obj: Any) -> str:
    """
    Render obj as JSON with every float at 17 significant digits.

    Args:
        obj: pydantic model, dict, list or scalar

    Returns:
        str: JSON text; infinities are written as the string "inf"
    """
    return _render(obj)


def write_text(text: str, path: Optional[str]) -> str:
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    return text


def csv_text(df: pd.DataFrame, doc_line: str) -> str:
    """
    Render a DataFrame as CSV preceded by a '#' documentation line

    Args:
        df (pandas.DataFrame): table to render
        doc_line (str): units and scale of the columns

    Returns:
        str: CSV text with a header row
    """
    buffer = io.StringIO()
    buffer.write(f"# {doc_line}\n")
    df.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()


def read_table(path: str) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def get_profile_dataframe(profile: EntropyProfile) -> pd.DataFrame:
    data = [{
        'n': b.n,
        'lower': b.lower,
        'upper': b.upper,
        'method': b.method
    } for b in profile.brackets]
    return pd.DataFrame(data, columns=['n', 'lower', 'upper', 'method'])


def get_width_dataframe(estimates: List[WidthEstimate]) -> pd.DataFrame:
    data = [{
        'n': e.n,
        'gamma': e.gamma,
        'upper': e.upper,
        'delta': e.delta
    } for e in estimates]
    return pd.DataFrame(data, columns=['n', 'gamma', 'upper', 'delta'])


def get_certificate_dataframe(certificate: LipschitzCertificate) -> pd.DataFrame:
    data = [{
        'j': j,
        'constant': value
    } for j, value in enumerate(certificate.recursion_trace)]
    return pd.DataFrame(data, columns=['j', 'constant'])


def profile_from_dataframe(df: pd.DataFrame, label: str = "") -> EntropyProfile:
    if df.empty:
        return EntropyProfile(label=label, brackets=[])
    brackets = [
        {'n': int(row['n']), 'lower': float(row['lower']), 'upper': float(row['upper']),
         'method': str(row.get('method', 'unknown'))}
        for _, row in df.iterrows()
    ]
    return EntropyProfile(label=label, brackets=brackets)


def widths_from_dataframe(df: pd.DataFrame) -> List[tuple]:
    """Rows of (n, gamma, upper) from a width table."""
    if df.empty:
        return []
    return [(int(row['n']), float(row['gamma']), float(row['upper'])) for _, row in df.iterrows()]
