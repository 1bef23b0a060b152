from .ast import GateDef, QasmError, QasmProgram
from .expand import check_ion_compatible, expand
from .parser import parse_qasm

__all__ = ["GateDef", "QasmError", "QasmProgram", "check_ion_compatible", "expand", "parse_qasm"]
