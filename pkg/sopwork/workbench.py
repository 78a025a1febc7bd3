from __future__ import annotations
from enum import Enum
from typing import Any
from ._internal import constants
from ._internal.utilities import TypeGuard, classproperty, natural, positive, log


__all__ = [
    "SettingKey",
    "Workbench",
]



class SettingKey(str, Enum):
    FUEL             = "fuel"
    SEED             = "seed"
    EXHAUSTIVE_BOUND = "exhaustive_bound"
    PN_CAP           = "pn_cap"
    MAX_BITS         = "max_bits"
    ITERATION_CAP    = "iteration_cap"
    SAMPLE_DEPTH     = "sample_depth"


_DEFAULTS = {
    SettingKey.FUEL            : constants.DEFAULT_FUEL,
    SettingKey.SEED            : constants.DEFAULT_SEED,
    SettingKey.EXHAUSTIVE_BOUND: constants.EXHAUSTIVE_BOUND,
    SettingKey.PN_CAP          : constants.PN_CAP,
    SettingKey.MAX_BITS        : constants.MAX_BITS,
    SettingKey.ITERATION_CAP   : constants.ITERATION_CAP,
    SettingKey.SAMPLE_DEPTH    : constants.SAMPLE_DEPTH,
}

_GUARDS: dict[SettingKey, TypeGuard] = {
    SettingKey.FUEL            : natural,
    SettingKey.SEED            : TypeGuard((int,)),
    SettingKey.EXHAUSTIVE_BOUND: natural,
    SettingKey.PN_CAP          : natural,
    SettingKey.MAX_BITS        : positive,
    SettingKey.ITERATION_CAP   : positive,
    SettingKey.SAMPLE_DEPTH    : natural,
}


class Workbench:
    """Process-wide settings. Every library function that needs one of these
    accepts an explicit keyword override and falls back to the value here.

    Settings:
        * fuel (int): Step limit of a run when none is given. Defaults to 10**7.
        * seed (int): Seed of the library samplers and the CLI sweeps. Defaults to 0.
        * exhaustive_bound (int): Longest query length enumerated by exhaustive
        checks. Defaults to 16.
        * pn_cap (int): Largest iteration index accepted by `eval_pN`. Defaults to 64.
        * max_bits (int): Bit width above which arithmetic raises `ArithmeticOverflow`.
        Defaults to 2**20.
        * iteration_cap (int): Replay limit of the adversaries. Defaults to 64.
        * sample_depth (int): Height limit of sampled descriptions. Defaults to 4.
    """
    __slots__ = ()
    __itemdict__: dict[SettingKey, Any] = dict(_DEFAULTS)

    def __new__(cls, *args, **kwargs):
        raise TypeError(f"{cls.__qualname__!r} is not instantiable; use its class properties.")

    @classproperty
    def fuel(cls) -> int:
        return cls.__itemdict__[SettingKey.FUEL]

    @classproperty
    def seed(cls) -> int:
        return cls.__itemdict__[SettingKey.SEED]

    @classproperty
    def exhaustive_bound(cls) -> int:
        return cls.__itemdict__[SettingKey.EXHAUSTIVE_BOUND]

    @classproperty
    def pn_cap(cls) -> int:
        return cls.__itemdict__[SettingKey.PN_CAP]

    @classproperty
    def max_bits(cls) -> int:
        return cls.__itemdict__[SettingKey.MAX_BITS]

    @classproperty
    def iteration_cap(cls) -> int:
        return cls.__itemdict__[SettingKey.ITERATION_CAP]

    @classproperty
    def sample_depth(cls) -> int:
        return cls.__itemdict__[SettingKey.SAMPLE_DEPTH]

    @classmethod
    def configure(cls, **settings: Any) -> None:
        """Update one or more settings. Unknown names raise KeyError; values
        are validated before anything is stored.
        """
        staged = {}
        for name, value in settings.items():
            if value is None:
                continue
            try:
                key = SettingKey(name)
            except ValueError:
                raise KeyError(f"{name!r} is not a workbench setting.") from None
            staged[key] = _GUARDS[key](value)
        for key, value in staged.items():
            log("debug", "Workbench", f"{key.value} = {value}")
        cls.__itemdict__.update(staged)

    @classmethod
    def reset(cls) -> None:
        cls.__itemdict__.clear()
        cls.__itemdict__.update(_DEFAULTS)

    @classmethod
    def settings(cls) -> dict[str, Any]:
        return {key.value: value for key, value in cls.__itemdict__.items()}

    @classmethod
    def get(cls, name: str, override: Any = None) -> Any:
        if override is not None:
            return override
        return cls.__itemdict__[SettingKey(name)]
