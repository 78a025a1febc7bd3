"""The workbench's junk drawer."""
from __future__ import annotations
import itertools
import logging
from typing import Callable, Iterator
from .constants import BITS


class TypeGuard:
    """Creates a callable validator object for checking argument(s) against certain
    criteria.
    """

    def __init__(self, types: tuple[type | object, ...] = None, callback: Callable = None, type_err_msg: str = None, value_err_msg: str = None):
        """Args:
            * types (type | object, ...], optional): A tuple of types that will be passed
            as the second argument of `isinstance`; raises TypeError if <argument> are not
            instances of <types>. Defaults to None (no error).
            * callback (Callable, optional): Raises ValueError if the result of
            `callback(argument)` is falsey. Defaults to None (no error).
        """
        self._types    = types or (object,)
        self._callback = callback or (lambda x: True)

        if not type_err_msg:
            names = [getattr(t, "__qualname__", str(t)) for t in self._types]
            if len(names) == 1:
                type_err_msg = f"Value must be an instance of {names[0]!r} (got {{}})."
            else:
                type_err_msg = f"Value must be an instance of {', '.join(names[:-1])!r} or {names[-1]!r} (got {{}})."
        if not value_err_msg:
            value_err_msg = f"Result of `{self._callback.__qualname__}(<argument>)` is falsey (got type {{cls}} value {{value}})."

        self._type_err_msg = type_err_msg
        self._val_err_msg  = value_err_msg

    def __call__(self, argument: object):
        """Raise TypeError if the argument is not an instance of <types>, or
        ValueError if `callback(argument)` does not return True. Returns the
        argument, so guards can be used inline.
        """
        # `bool` is an `int`; naturals never accept it
        if isinstance(argument, bool) and bool not in self._types:
            raise TypeError(self._type_err_msg.format(repr(argument)))
        if not isinstance(argument, self._types):
            raise TypeError(self._type_err_msg.format(repr(argument)))
        if not self._callback(argument):
            raise ValueError(self._val_err_msg.format(cls=repr(type(argument).__qualname__), value=repr(argument)))
        return argument


def _is_bitstring(value: str) -> bool:
    return all(c in BITS for c in value)


natural   = TypeGuard((int,), lambda v: v >= 0, value_err_msg="Expected a natural number (got {value}).")
positive  = TypeGuard((int,), lambda v: v >= 1, value_err_msg="Expected a positive integer (got {value}).")
bitstring = TypeGuard((str,), _is_bitstring, value_err_msg="Expected a string over '0' and '1' (got {value}).")


class classproperty(property):
    """Descriptor/decorator for binding class-level read-only properties.
    Functionaly similar to chaining classmethod -> property decorators
    in Python 3.9 (which is deprecated in Python 3.11).
    """
    __slots__ = ("__wrapped__",)

    def __init__(self, fn):
        self.__wrapped__ = fn

    def __get__(self, instance, cls):
        return self.__wrapped__(cls)


####################################################################################
################################# Helper Functions #################################
####################################################################################

def shortlex(max_len: int, min_len: int = 0) -> Iterator[str]:
    """Yield every bit-string with `min_len <= len <= max_len`, shorter
    strings first and lexicographic ('0' < '1') within a length.
    """
    for k in range(min_len, max_len + 1):
        for bits in itertools.product(BITS, repeat=k):
            yield "".join(bits)


def strings_of_length(k: int) -> Iterator[str]:
    return shortlex(k, k)


def tower(n: int) -> int:
    """2^(2^n)."""
    return 1 << (1 << n)


def log(level: str, target: object, message: str, reason: str = "", *, logger: logging.Logger | None = None, exc_info=None, stacklevel=1):
    level = logging._nameToLevel[level.upper()]
    if reason:
        reason = f" ({reason})"
    msg = f" [{target}] {message}{reason}"
    return (logger or logging.getLogger("sopwork")).log(level, msg, exc_info=exc_info, stacklevel=stacklevel)
