"""Exception hierarchy shared by every module.

Each error carries the CLI exit status it maps to: 1 for unparsable input,
2 for a violated precondition.
"""

from __future__ import annotations


class FoldcalcError(Exception):
    exit_code = 2


class ParseError(FoldcalcError):
    exit_code = 1


class PreconditionError(FoldcalcError):
    exit_code = 2
