"""Elementary operation kinds recorded on a tape."""
from enum import IntEnum


class OpKind(IntEnum):
    INPUT = 0
    ADD = 1
    SUB = 2
    MUL = 3
    DIV = 4
    NEG = 5
    RECIP = 6
    LN = 7
    EXP = 8
    SIN = 9
    COS = 10
    SQRT = 11
    TANH = 12
    ATAN2 = 13
    POW = 14

    @property
    def label(self):
        return self.name.lower()
