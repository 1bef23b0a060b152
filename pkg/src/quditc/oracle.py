"""Dense reference simulator for qubit and qudit circuits.

Basis ordering: register element 0 is the least significant digit of the basis
index, so qudit ``q`` contributes ``level * d**q``. Outcome strings print
register element 0 rightmost.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ir import Barrier, Gate, QubitCircuitIR
from .qudit import Mapping, Ph, QBarrier, QuditCircuit, R, XX

DEFAULT_CAP = 1024


class CapExceeded(RuntimeError):
    pass


# -- single-qudit building blocks -------------------------------------------


def ket_bra(d: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return m


def sigma_x(d: int, i: int, j: int) -> np.ndarray:
    return ket_bra(d, j, i) + ket_bra(d, i, j)


def sigma_y(d: int, i: int, j: int) -> np.ndarray:
    return 1j * ket_bra(d, j, i) - 1j * ket_bra(d, i, j)


def sigma_z(d: int, i: int, j: int) -> np.ndarray:
    return ket_bra(d, i, i) - ket_bra(d, j, j)


def sigma_phi(d: int, i: int, j: int, phi: float) -> np.ndarray:
    return math.cos(phi) * sigma_x(d, i, j) + math.sin(phi) * sigma_y(d, i, j)


def proj(d: int, *levels: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    for lv in levels:
        m[lv, lv] = 1.0
    return m


def ph_matrix(d: int, level: int, theta: float) -> np.ndarray:
    m = np.eye(d, dtype=complex)
    m[level, level] = np.exp(1j * theta)
    return m


def r_matrix(d: int, i: int, j: int, theta: float, phi: float) -> np.ndarray:
    """Half-angle rotation exp(-i theta/2 sigma_phi^{ij}), closed form."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    m = np.eye(d, dtype=complex)
    m[i, i] = c
    m[j, j] = c
    m[j, i] = -1j * s * np.exp(1j * phi)
    m[i, j] = -1j * s * np.exp(-1j * phi)
    return m


def r_full_angle(d: int, i: int, j: int, theta: float, phi: float) -> np.ndarray:
    """exp(-i theta sigma_phi^{ij}): the 2*pi-periodic rotation used in algebra checks."""
    return r_matrix(d, i, j, 2 * theta, phi)


def rz_matrix(d: int, i: int, j: int, theta: float) -> np.ndarray:
    m = np.eye(d, dtype=complex)
    m[i, i] = np.exp(-1j * theta)
    m[j, j] = np.exp(1j * theta)
    return m


def xx_matrix(d: int, levels_a, levels_b, theta: float) -> np.ndarray:
    k = np.kron(sigma_x(d, *levels_a), sigma_x(d, *levels_b))
    return np.eye(d * d, dtype=complex) + (math.cos(theta) - 1) * (k @ k) - 1j * math.sin(theta) * k


def cz_level_matrix(d: int, i: int, j: int) -> np.ndarray:
    """CZ^{i|j}: phase -1 on |i,j>."""
    m = np.eye(d * d, dtype=complex)
    m[i * d + j, i * d + j] = -1
    return m


def cx_level_matrix(d: int, i: int, j: int, k: int) -> np.ndarray:
    """CX^{i|jk}: swap |i,j> and |i,k>."""
    m = np.eye(d * d, dtype=complex)
    a, b = i * d + j, i * d + k
    m[[a, b]] = m[[b, a]]
    return m


# -- qubit gate library ------------------------------------------------------


def _mcz(k: int) -> np.ndarray:
    m = np.eye(2**k, dtype=complex)
    m[-1, -1] = -1
    return m


def qubit_gate_matrix(name: str, params) -> np.ndarray:
    """Matrix of a native qubit gate; first listed qubit is the most significant factor."""
    if name == "rz":
        return ph_matrix(2, 1, params[0])
    if name == "r":
        return r_matrix(2, 0, 1, params[0], params[1])
    if name == "xx":
        return xx_matrix(2, (0, 1), (0, 1), params[0])
    if name == "U":
        t, p, lam = params
        c, s = math.cos(t / 2), math.sin(t / 2)
        return np.array(
            [[c, -np.exp(1j * lam) * s], [np.exp(1j * p) * s, np.exp(1j * (p + lam)) * c]],
            dtype=complex,
        )
    if name in ("cx", "CX"):
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    arity = mcz_arity(name)
    if arity:
        return _mcz(arity)
    raise KeyError(f"no matrix for qubit gate '{name}'")


def mcz_name(arity: int) -> str:
    if arity == 2:
        return "cz"
    if arity == 3:
        return "ccz"
    if arity == 4:
        return "cccz"
    return f"c{arity - 1}z"


def mcz_arity(name: str) -> int:
    """Number of qubits of a multicontrolled-Z gate name, or 0 if it is not one."""
    if name == "cz":
        return 2
    if name == "ccz":
        return 3
    if name == "cccz":
        return 4
    if len(name) >= 3 and name[0] == "c" and name[-1] == "z" and name[1:-1].isdigit():
        k = int(name[1:-1])
        return k + 1 if k >= 4 else 0
    return 0


# -- state application -------------------------------------------------------


def _apply(states: np.ndarray, matrix: np.ndarray, targets, n: int, d: int) -> np.ndarray:
    k = len(targets)
    cols = states.shape[1]
    t = states.reshape([d] * n + [cols])
    axes = [n - 1 - q for q in targets]
    g = matrix.reshape([d] * (2 * k))
    out = np.tensordot(g, t, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return out.reshape(d**n, cols)


def _check_cap(dim: int, cap: int) -> None:
    if dim > cap:
        raise CapExceeded(f"dimension {dim} exceeds the simulation cap {cap}")


def qudit_op_matrix(op, d: int) -> np.ndarray:
    if isinstance(op, Ph):
        return ph_matrix(d, op.level, op.theta)
    if isinstance(op, R):
        return r_matrix(d, op.i, op.j, op.theta, op.phi)
    if isinstance(op, XX):
        return xx_matrix(d, op.levels_a, op.levels_b, op.theta)
    raise TypeError(f"no matrix for {op!r}")


def apply_qudit_ops(ops, n_qudits: int, d: int, states: np.ndarray, cap: int = DEFAULT_CAP) -> np.ndarray:
    _check_cap(d**n_qudits, cap)
    out = np.array(states, dtype=complex)
    for op in ops:
        if isinstance(op, QBarrier):
            continue
        out = _apply(out, qudit_op_matrix(op, d), op.qudits, n_qudits, d)
    return out


def apply_qubit_ops(ops, n_qubits: int, states: np.ndarray, cap: int = DEFAULT_CAP) -> np.ndarray:
    _check_cap(2**n_qubits, cap)
    out = np.array(states, dtype=complex)
    for op in ops:
        if isinstance(op, Barrier):
            continue
        if not isinstance(op, Gate):
            raise ValueError(f"cannot simulate non-unitary operation {op}")
        out = _apply(out, qubit_gate_matrix(op.name, op.params), op.qubits, n_qubits, 2)
    return out


def gate_matrix(op, d: int, n_qudits: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Matrix of a single qudit op embedded in the ``n_qudits`` register."""
    dim = d**n_qudits
    return apply_qudit_ops([op], n_qudits, d, np.eye(dim, dtype=complex), cap)


def circuit_unitary(circuit, cap: int = DEFAULT_CAP) -> np.ndarray:
    if isinstance(circuit, QuditCircuit):
        dim = circuit.d**circuit.n_qudits
        _check_cap(dim, cap)
        return apply_qudit_ops(circuit.ops, circuit.n_qudits, circuit.d, np.eye(dim), cap)
    if isinstance(circuit, QubitCircuitIR):
        dim = 2**circuit.n_qubits
        _check_cap(dim, cap)
        return apply_qubit_ops(circuit.ops, circuit.n_qubits, np.eye(dim), cap)
    raise TypeError(f"unsupported circuit type {type(circuit).__name__}")


# -- embedding and equivalence ----------------------------------------------


def embedded_index(bits, mapping: Mapping, d: int) -> int:
    levels = [0] * mapping.n_qudits
    for n, bit in enumerate(bits):
        if bit:
            levels[mapping.qudits[n]] += 1 << mapping.slots[n]
    return sum(lv * d**q for q, lv in enumerate(levels))


def embedding_isometry(mapping: Mapping, d: int, n_qudits: int | None = None, cap: int = DEFAULT_CAP) -> np.ndarray:
    m = mapping.n_qudits if n_qudits is None else n_qudits
    n = mapping.n_qubits
    _check_cap(d**m, cap)
    _check_cap(2**n, cap)
    e = np.zeros((d**m, 2**n), dtype=complex)
    for x in range(2**n):
        bits = [(x >> k) & 1 for k in range(n)]
        e[embedded_index(bits, mapping, d), x] = 1.0
    return e


class EquivalenceMode(enum.Enum):
    GLOBAL_PHASE = "global"
    DIAGONAL_PHASE = "diagonal"


@dataclass(frozen=True)
class Equivalence:
    ok: bool
    deviation: float
    mode: EquivalenceMode


def check_equivalence(W, V, E, mode=EquivalenceMode.GLOBAL_PHASE, tol: float = 1e-9) -> Equivalence:
    """Compare a qudit unitary ``W`` (or the product ``W @ E``) with a qubit unitary ``V``."""
    W, V, E = np.asarray(W), np.asarray(V), np.asarray(E)
    we = W if W.shape == E.shape else W @ E
    ev = E @ V
    if mode is EquivalenceMode.GLOBAL_PHASE:
        k = np.unravel_index(np.argmax(np.abs(ev)), ev.shape)
        if abs(ev[k]) < 1e-15:
            dev = float(np.max(np.abs(we))) if we.size else 0.0
        else:
            c = we[k] / ev[k]
            c = c / abs(c) if abs(c) > 0 else 1.0
            dev = float(np.max(np.abs(we - c * ev)))
        return Equivalence(dev < tol, dev, mode)
    dev = 0.0
    for a, b in zip(we, ev):
        nb = float(np.vdot(b, b).real)
        if nb < 1e-30:
            dev = max(dev, float(np.max(np.abs(a))) if a.size else 0.0)
            continue
        c = np.vdot(b, a) / nb
        dev = max(dev, abs(abs(c) - 1.0), float(np.max(np.abs(a - c * b))))
    return Equivalence(dev < tol, dev, mode)


def format_state(digits) -> str:
    """Register element 0 is printed rightmost."""
    return "".join(str(x) for x in reversed(list(digits)))


def simulate_probabilities(circuit, basis_state=None, cap: int = DEFAULT_CAP, threshold: float = 1e-15) -> dict[str, float]:
    """Born probabilities for a basis-state input; keys print element 0 rightmost."""
    if isinstance(circuit, QuditCircuit):
        n, d = circuit.n_qudits, circuit.d
    elif isinstance(circuit, QubitCircuitIR):
        n, d = circuit.n_qubits, 2
    else:
        raise TypeError(f"unsupported circuit type {type(circuit).__name__}")
    _check_cap(d**n, cap)
    digits = [0] * n if basis_state is None else list(basis_state)
    if len(digits) != n or any(not 0 <= x < d for x in digits):
        raise ValueError(f"invalid basis state {basis_state!r}")
    psi = np.zeros((d**n, 1), dtype=complex)
    psi[sum(x * d**q for q, x in enumerate(digits)), 0] = 1.0
    if isinstance(circuit, QuditCircuit):
        psi = apply_qudit_ops(circuit.ops, n, d, psi, cap)
    else:
        psi = apply_qubit_ops([op for op in circuit.ops if isinstance(op, (Gate, Barrier))], n, psi, cap)
    probs = np.abs(psi[:, 0]) ** 2
    out = {}
    for idx in np.flatnonzero(probs > threshold):
        ds = [(int(idx) // d**q) % d for q in range(n)]
        out[format_state(ds)] = float(probs[idx])
    return out
