from __future__ import annotations
from typing import (
    TYPE_CHECKING,
    overload,
    final,
    Any,
    Callable,
    TypeVar,
)
from abc import ABC

if TYPE_CHECKING:
    from sopwork.machine import Machine
    from sopwork.oracle import PatternOracle


__all__ = [
    # registries
    "machines",
    "patterns",
    # convenience callables
    "get_machine",
    "get_pattern",
    "register_machine",
    "register_pattern",
]


_NULL = object()
_F = TypeVar("_F", bound=Callable[..., Any])

GALLERY_PREFIX = "gallery:"



class RegGet:
    __slots__ = ("_mapping",)

    def __init__(self, mapping: dict):
        self._mapping = mapping

    @overload
    def __call__(self, __key: str, /) -> Any | None: ...
    @overload
    def __call__(self, __key: str, __default: Any, /) -> Any | None: ...
    def __call__(self, __key: str, __default: Any = _NULL, /) -> Any | None:
        try:
            return self._mapping[__key]
        except KeyError:
            if __default is not _NULL:
                return __default
            raise KeyError(f"{__key!r} is not registered (known: {', '.join(sorted(self._mapping))})") from None


class Registry(ABC, dict):
    """Name -> factory mapping. `get` is replaced by a `RegGet` whose
    missing-key error lists the registered names.
    """
    get: RegGet

    def __new__(cls, *args, **kwargs):
        reg_dict = super().__new__(cls, *args, **kwargs)
        reg_dict.get = RegGet(reg_dict)
        return reg_dict

    def register(self, name: str) -> Callable[[_F], _F]:
        def decorator(factory: _F) -> _F:
            if name in self:
                raise ValueError(f"{name!r} is already registered.")
            self[name] = factory
            return factory
        return decorator


@final
class MachineRegistry(Registry):
    """Factories returning `Machine` objects, keyed by gallery name."""


@final
class PatternRegistry(Registry):
    """Factories returning pattern oracles, keyed by pattern name. Factories
    accept the pattern's parameters as keyword arguments.
    """


machines = MachineRegistry()
patterns = PatternRegistry()

register_machine = machines.register
register_pattern = patterns.register


def get_machine(name: str, **params) -> Machine:
    """Instantiate a gallery machine. Accepts both `gallery:NAME` and `NAME`."""
    if name.startswith(GALLERY_PREFIX):
        name = name[len(GALLERY_PREFIX):]
    return machines.get(name)(**params)


def get_pattern(name: str, **params) -> PatternOracle:
    return patterns.get(name)(**params)
