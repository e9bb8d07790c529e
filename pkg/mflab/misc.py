import hashlib
import json
import os
import tempfile
from contextvars import Token
from copy import deepcopy
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Dict, Optional, Type, Union

import numpy as np
from deepmerge import Merger
from pydantic.main import BaseModel

from .ctx import app, span

if TYPE_CHECKING:  # pragma: no cover
    from .app import BaseApplication
    from .logger.span import Span


ENCODERS_BY_TYPE: Dict[Type[Any], Callable[[Any], Any]] = {
    set: sorted,
    frozenset: sorted,
    np.ndarray: lambda a: a.tolist(),
    np.bool_: bool,
    np.integer: int,
    np.floating: float,
    complex: lambda c: [c.real, c.imag],
    np.complexfloating: lambda c: [float(c.real), float(c.imag)],
}


def ctx_app_get() -> Optional['BaseApplication']:
    return app.get()


def ctx_app_set(ctx: 'BaseApplication') -> Token:
    return app.set(ctx)


def ctx_app_reset(token: Token) -> None:
    app.reset(token)


def ctx_span_get() -> Optional['Span']:
    return span.get()


def ctx_span_set(ctx: 'Span') -> Token:
    return span.set(ctx)


def ctx_span_reset(token: Token) -> None:
    span.reset(token)


def json_encoder(obj: Any) -> Any:
    if isinstance(obj, BaseModel):
        return obj.dict()
    elif isinstance(obj, Enum):
        return obj.value
    elif isinstance(obj, Path):
        return str(obj)
    elif is_dataclass(obj) and not isinstance(obj, type):
        return asdict(obj)

    for cls, encoder in ENCODERS_BY_TYPE.items():
        if isinstance(obj, cls):
            return encoder(obj)

    raise TypeError(
        f"Object of type '{obj.__class__.__name__}' is not JSON serializable"
    )


def json_encode(data: Any, **kwargs: Any) -> str:
    return json.dumps(data, default=json_encoder, **kwargs)


def config_hash(data: Dict[str, Any]) -> str:
    canonical = json_encode(data, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode()).hexdigest()


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return '%.16e' % value


dict_merger = Merger([(dict, "merge")], ["override"], ["override"])


def dict_merge(*args: dict) -> dict:
    if len(args) == 0:
        return {}

    first = deepcopy(args[0])
    for i in range(1, len(args)):
        dict_merger.merge(first, args[i])

    return first


def atomic_write(path: Union[str, Path], data: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(
        dir=str(path.parent), prefix='.%s.' % path.name, suffix='.tmp'
    )
    try:
        with os.fdopen(fd, 'w', newline='\n') as f:
            f.write(data)
        os.replace(tmp, str(path))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
