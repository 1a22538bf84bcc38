"""junc: compiler toolchain for the Juniper FRP language.

Pipeline: tokenize -> parse -> resolve -> typecheck -> emit C++ (or run the
reference interpreter against a virtual pin/clock device).
"""

from .codegen import EmitUnit, emit_program
from .hal import VirtualDevice
from .interp import Interp, run_main
from .lexer import Token, TokenKind, tokenize
from .parser import parse_file, parse_module, parse_program
from .pretty import pretty_print
from .typecheck import TypedProgram, check_program

__all__ = [
    "EmitUnit",
    "Interp",
    "Token",
    "TokenKind",
    "TypedProgram",
    "VirtualDevice",
    "check_program",
    "emit_program",
    "parse_file",
    "parse_module",
    "parse_program",
    "pretty_print",
    "run_main",
    "tokenize",
]
