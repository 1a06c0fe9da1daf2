"""A base class for all serialisable classes"""
import json
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Union

log = logging.getLogger(__name__)

JsonType = Dict[str, Any]


class Base(ABC):
    """A Base component for all class objects that persist as JSON.

    Subclasses describe themselves with ``to_dict`` and rebuild with
    ``from_dict``; arrays are stored as row-major nested lists.
    """

    @abstractmethod
    def to_dict(self) -> JsonType:
        raise NotImplementedError

    @classmethod
    @abstractmethod
    def from_dict(cls, data: JsonType) -> "Base":
        raise NotImplementedError

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Base":
        log.info(f"Loading {cls.__name__} from Path: {path}")
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: Union[str, Path]):
        log.info(f"Saving {type(self).__name__} to Path: {path}")
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
