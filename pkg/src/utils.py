from functools import lru_cache
from typing import Iterable, Sequence, Tuple

import numpy as np


def fwht(values: np.ndarray) -> np.ndarray:
    """
    Unnormalized fast Walsh-Hadamard transform (in-place butterflies on a copy).
    out[s] = sum_x values[x] * (-1)^popcount(x & s), in basis-index bit order.
    """
    out = np.array(values, copy=True)
    size = out.shape[0]
    if size & (size - 1):
        raise ValueError(f"Walsh-Hadamard transform needs a power-of-two length, got {size}")
    h = 1
    while h < size:
        view = out.reshape(-1, 2, h)
        left = view[:, 0, :].copy()
        right = view[:, 1, :]
        view[:, 0, :] = left + right
        view[:, 1, :] = left - right
        h *= 2
    return out


@lru_cache(maxsize=32)
def basis_bits(m: int) -> np.ndarray:
    """
    (2^m, m) int8 matrix; row x holds the ket bits b_0..b_{m-1} of basis index x.
    Qubit 0 is the most significant bit.
    """
    idx = np.arange(2**m, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.int8)
    bits.setflags(write=False)
    return bits


def mask_to_index_bits(mask: int, m: int) -> int:
    """Translate a qubit mask (bit j <-> qubit j) into basis-index bit positions."""
    out = 0
    for j in range(m):
        if (mask >> j) & 1:
            out |= 1 << (m - 1 - j)
    return out


def index_bits_to_mask(index_mask: int, m: int) -> int:
    # the bit reversal is its own inverse
    return mask_to_index_bits(index_mask, m)


def mask_qubits(mask: int) -> Tuple[int, ...]:
    qubits = []
    j = 0
    while mask >> j:
        if (mask >> j) & 1:
            qubits.append(j)
        j += 1
    return tuple(qubits)


def qubits_to_mask(qubits: Iterable[int]) -> int:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return mask


def parity_signs(mask: int, m: int) -> np.ndarray:
    """(-1)^(parity of the masked qubits) for every basis index, as float64."""
    qubits = mask_qubits(mask)
    if not qubits:
        return np.ones(2**m)
    if max(qubits) >= m:
        raise ValueError(f"Mask {mask:#b} touches qubits outside a {m}-qubit register")
    parity = basis_bits(m)[:, list(qubits)].sum(axis=1) & 1
    return 1.0 - 2.0 * parity


def ket_string(index: int, m: int) -> str:
    return format(index, f"0{m}b") if m else ""


def ket_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out
