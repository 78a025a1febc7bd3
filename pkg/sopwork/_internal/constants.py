"""Symbols, exit codes and defaults shared across the workbench."""
from enum import IntEnum, Enum


ZERO  = "0"
ONE   = "1"
BLANK = "_"
START = "^"  # read-only cell left of cell 0

BITS    = (ZERO, ONE)
SYMBOLS = (ZERO, ONE, BLANK)

INPUT  = "input"
OUTPUT = "output"
ORACLE = "oracle"
FIXED_TAPES = (INPUT, OUTPUT, ORACLE)

DEFAULT_FUEL       = 10**7
DEFAULT_SEED       = 0
EXHAUSTIVE_BOUND   = 16
PN_CAP             = 64
MAX_BITS           = 2**20
ITERATION_CAP      = 64
SAMPLE_DEPTH       = 4


class ExitCode(IntEnum):
    OK    = 0
    FAIL  = 1
    USAGE = 2
    FUEL  = 3
    PASS   = OK
    HALTED = OK


class Move(IntEnum):
    LEFT  = -1
    STAY  =  0
    RIGHT =  1
    L     = LEFT
    S     = STAY
    R     = RIGHT


class Status(str, Enum):
    HALTED         = "halted"
    FUEL_EXHAUSTED = "fuel-exhausted"
