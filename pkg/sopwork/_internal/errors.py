from __future__ import annotations
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sopwork.machine import Program


class _SopworkErrorType(type):
    def __str__(cls) -> str:
        return f"<class {cls.__qualname__!r}>"  # no namespace path


class Error(Exception, metaclass=_SopworkErrorType):
    """Base class of every error raised by the workbench. Subclasses carry a
    `message` template with a single `{}` slot that receives an optional
    comment.
    """
    message = "Workbench error{}."

    def __init__(self, comment: str = "", *args):
        if comment:
            comment = f": {comment}"
        self.message = self.message.format(comment)
        super().__init__(self.message, *args)

    def __str__(self):
        return self.message


class ArithmeticOverflow(Error, OverflowError):
    """A value outgrew the configured bit cap (see `Workbench.max_bits`)."""
    message = "Arithmetic overflow{}."


class ArityError(Error, ValueError):
    """A polynomial node does not have exactly one variable per child plus the
    scalar slot.
    """
    message = "Arity mismatch{}."


class BudgetExceeded(Error, RuntimeError):
    message = "Exhaustion budget exceeded{}."


class MacroError(Error, ValueError):
    message = "Malformed program{}."


class ProgramFormatError(Error, ValueError):
    message = "Could not read document{}."


class OracleError(Error, ValueError):
    message = "Invalid oracle{}."


class LowerBoundError(Error):
    """A check would have produced a verdict that is unsound under a size
    function known only as a lower bound.
    """
    message = "Verdict unsound for a lower-bound size function{}."


class NonConvergence(Error, RuntimeError):
    message = "Construction did not reach a fixpoint{}."




def err_overflow(value: int, max_bits: int) -> ArithmeticOverflow:
    return ArithmeticOverflow(f"{value.bit_length()} bits > {max_bits}")


def err_arity(expected: int, got: int, where: str = "node") -> ArityError:
    return ArityError(f"{where} has arity {got}, expected {expected}")


def err_budget(what: str, n: int, bound: int) -> BudgetExceeded:
    return BudgetExceeded(f"{what} at length {n} exceeds the bound {bound}")


def err_unknown_tape(tape: str, program: Program | None = None) -> MacroError:
    if program is not None:
        return MacroError(f"tape {tape!r} is not declared (declared: {', '.join(program.tapes)})")
    return MacroError(f"tape {tape!r} is not declared")


def err_bad_symbol(symbol: object) -> MacroError:
    return MacroError(f"expected one of '0', '1', '_' (got {symbol!r})")

