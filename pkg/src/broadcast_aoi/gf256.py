"""GF(2^8) arithmetic with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B)."""

import numpy as np

POLY = 0x11B
GENERATOR = 0x03  # 0x02 is not primitive for 0x11B


def gf_mul_slow(a: int, b: int) -> int:
    """Carry-less multiply then reduce; the table-free definition."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= POLY
    return result


def _build_tables():
    exp = np.zeros(512, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int16)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x = gf_mul_slow(x, GENERATOR)
    exp[255:510] = exp[:255]
    return exp, log


EXP, LOG = _build_tables()

MUL = np.zeros((256, 256), dtype=np.uint8)
MUL[1:, 1:] = EXP[LOG[1:, None] + LOG[None, 1:]]

INV = np.zeros(256, dtype=np.uint8)
INV[1:] = EXP[255 - LOG[1:]]


def gf_add(a: int, b: int) -> int:
    return a ^ b


def gf_mul(a: int, b: int) -> int:
    return int(MUL[a, b])


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return int(INV[a])


def scale(row: np.ndarray, a: int) -> np.ndarray:
    """Multiply every entry of a uint8 vector by the field element ``a``."""
    return MUL[a][row]
