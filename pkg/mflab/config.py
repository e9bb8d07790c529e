from __future__ import annotations

import json
from io import BufferedIOBase, RawIOBase, TextIOBase
from typing import (
    IO,
    Any,
    Callable,
    Dict,
    List,
    Optional,
    Type,
    TypeVar,
    Union,
)

import yaml
from pydantic import ValidationError
from pydantic.main import BaseModel, Extra
from yaml import SafeDumper, SafeLoader

from .error import ConfigurationError
from .misc import config_hash, json_encoder

__all__ = ("BaseConfig", "Section", "validation_message")

T = TypeVar("T", bound="BaseConfig")
IO_TYPES = (RawIOBase, TextIOBase, BufferedIOBase)


class Section(BaseModel):
    """Config section: unknown keys are rejected."""

    class Config:
        validate_all = True
        extra = Extra.forbid
        use_enum_values = True


def validation_message(err: ValidationError) -> str:
    parts: List[str] = []
    for item in err.errors():
        path = '.'.join(str(p) for p in item['loc'] if p != '__root__')
        parts.append('%s: %s' % (path or '<root>', item['msg']))
    return '; '.join(parts)


def _read(stream: Union[str, IO]) -> str:
    if isinstance(stream, str):
        with open(stream) as f:
            return f.read()
    elif isinstance(stream, IO_TYPES):
        return stream.read()  # type: ignore
    else:
        raise ValueError


def _write(stream: Union[str, IO], data: str) -> None:
    if isinstance(stream, str):
        with open(stream, "w") as f:
            f.write(data)
    elif isinstance(stream, IO_TYPES):
        stream.write(data)  # type: ignore
    else:
        raise ValueError


class BaseConfig(BaseModel):
    @classmethod
    def from_dict(cls: Type[T], input_dict: Dict[str, Any]) -> T:
        try:
            return cls(**input_dict)
        except ValidationError as err:
            raise ConfigurationError(validation_message(err)) from err

    def to_dict(self, **kwargs: Any) -> Dict[str, Any]:
        return self.dict(**kwargs)

    @classmethod
    def load_json(
        cls, stream: Union[str, IO], loads: Optional[Callable] = None
    ) -> Dict[str, Any]:
        loads = loads or cls.__config__.json_loads
        return loads(_read(stream)) or {}

    @classmethod
    def load_yaml(
        cls, stream: Union[str, IO], load: Optional[Callable] = None
    ) -> Dict[str, Any]:
        load = load or cls.__config__.yaml_load
        return load(_read(stream), Loader=SafeLoader) or {}

    @classmethod
    def from_json(
        cls: Type[T],
        stream: Union[str, IO],
        loads: Optional[Callable] = None,
    ) -> T:
        return cls.from_dict(cls.load_json(stream, loads))

    def to_json(self, stream: Union[str, IO], **kwargs: Any) -> None:
        _write(stream, self.json(**{"indent": 4, **kwargs}))

    @classmethod
    def from_yaml(
        cls: Type[T],
        stream: Union[str, IO],
        load: Optional[Callable] = None,
    ) -> T:
        return cls.from_dict(cls.load_yaml(stream, load))

    def to_yaml(
        self,
        stream: Union[str, IO],
        dump: Optional[Callable] = None,
        **kwargs: Any,
    ) -> None:
        _write(stream, self.yaml_str(dump, **kwargs))

    def yaml_str(self, dump: Optional[Callable] = None, **kwargs: Any) -> str:
        dump = dump or self.__config__.yaml_dump
        json_obj = self.__config__.json_loads(self.json())
        return dump(
            json_obj,
            **{"Dumper": SafeDumper, "sort_keys": True, **kwargs},
        )

    def to_jsonschema(self, stream: Union[str, IO]) -> None:
        _write(stream, self.schema_json(by_alias=True, indent=4))

    def config_hash(self) -> str:
        return config_hash(json.loads(self.json()))

    class Config:
        validate_all = True
        extra = Extra.forbid
        arbitrary_types_allowed = True
        use_enum_values = True
        json_loads: Callable = json.loads
        json_dumps: Callable = json.dumps
        json_encoders = {complex: json_encoder}
        yaml_load: Callable = yaml.load
        yaml_dump: Callable = yaml.dump

    __config__: Config  # type: ignore
