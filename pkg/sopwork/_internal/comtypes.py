"""Type aliases and the verdict record shared across the workbench."""
import os
from typing import Any, NamedTuple, TypeAlias


Filepath : TypeAlias = str | os.PathLike
ExpVector: TypeAlias = tuple[int, ...]


class Verdict(NamedTuple):
    """Outcome of a bound check. Truthy exactly when the check passed.

    Args:
        * passed (bool): Whether the bound held.
        * witness (Any, optional): Least violating index, input or pair when
        the check failed. Defaults to None.
        * detail (str, optional): Human-readable account of the comparison.
    """
    passed : bool
    witness: Any = None
    detail : str = ""

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        witness = self.witness
        if isinstance(witness, tuple):
            witness = list(witness)
        return {"passed": self.passed, "witness": witness, "detail": self.detail}
