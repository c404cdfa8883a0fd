"""
Discrete Fourier transform and cyclic convolution for arbitrary lengths.

The forward transform is the unnormalized y = Omega x with
Omega = (w^(ij)), w = exp(2*pi*i/n); the inverse is (1/n) Omega^H. Power-of-two
lengths go straight to numpy's FFT, every other length is reduced to a
power-of-two convolution with a chirp (Bluestein).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from ..config.settings import DftConfig
from .exceptions import UsageError

logger = logging.getLogger(__name__)

# Type aliases
ComplexVector = np.ndarray
RealVector = np.ndarray


class DftStrategy(Enum):
    """How a plan evaluates its transform"""
    RADIX2 = "power_of_two"
    CHIRP = "chirp"


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DftPlan:
    """Immutable transform plan for one length"""
    length: int
    strategy: DftStrategy
    padded_length: int
    chirp: Optional[np.ndarray] = None
    chirp_filter_spectrum: Optional[np.ndarray] = None


@lru_cache(maxsize=DftConfig.PLAN_CACHE_SIZE)
def create_plan(n: int) -> DftPlan:
    """
    Build (or fetch the cached) plan for length n.

    For the chirp strategy the table w_k = exp(i*pi*k^2/n) is formed from
    k^2 mod 2n so the phase stays exact for large k.
    """
    n = int(n)
    if n < 1:
        raise UsageError(f"DFT length must be positive, got {n}", error_code="BAD_LENGTH")

    if is_power_of_two(n):
        return DftPlan(length=n, strategy=DftStrategy.RADIX2, padded_length=n)

    padded = next_power_of_two(2 * n - 1)
    k = np.arange(n, dtype=np.int64)
    chirp = np.exp(1j * np.pi * ((k * k) % (2 * n)) / n)

    # Filter h_m = conj(w_m) laid out cyclically for m = -(n-1) .. n-1
    kernel = np.zeros(padded, dtype=complex)
    kernel[:n] = np.conj(chirp)
    kernel[padded - n + 1:] = np.conj(chirp[1:])[::-1]

    logger.debug(f"Chirp plan for n={n} padded to {padded}")
    return DftPlan(
        length=n,
        strategy=DftStrategy.CHIRP,
        padded_length=padded,
        chirp=_frozen(chirp),
        chirp_filter_spectrum=_frozen(np.fft.fft(kernel)),
    )


def _check_input(plan: DftPlan, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != plan.length:
        raise UsageError(
            f"Vector of length {x.shape[0] if x.ndim == 1 else x.shape} does not match plan length {plan.length}",
            error_code="LENGTH_MISMATCH",
            details={"expected": plan.length},
        )
    if not np.all(np.isfinite(x)):
        raise UsageError("Transform input contains NaN or Inf", error_code="NON_FINITE")
    return x.astype(complex, copy=False)


def dft_forward(plan: DftPlan, x: ComplexVector) -> ComplexVector:
    """Return Omega x (positive exponent, unnormalized)"""
    x = _check_input(plan, x)
    n = plan.length

    if plan.strategy is DftStrategy.RADIX2:
        # numpy's ifft carries the positive exponent and a 1/n factor
        return np.fft.ifft(x) * n

    # Omega x_k = w_k * sum_j (x_j w_j) conj(w_{k-j})
    weighted = np.fft.fft(x * plan.chirp, plan.padded_length)
    convolved = np.fft.ifft(weighted * plan.chirp_filter_spectrum)
    return plan.chirp * convolved[:n]


def dft_inverse(plan: DftPlan, y: ComplexVector) -> ComplexVector:
    """Return (1/n) Omega^H y"""
    y = _check_input(plan, y)
    return np.conj(dft_forward(plan, np.conj(y))) / plan.length


def cyclic_convolve(a: RealVector, b: RealVector) -> RealVector:
    """c_k = sum_j a_{(k-j) mod n} b_j, real part of the transform round trip"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise UsageError(
            f"Cyclic convolution needs equal lengths, got {a.shape} and {b.shape}",
            error_code="LENGTH_MISMATCH",
        )

    plan = create_plan(a.shape[0])
    product = dft_forward(plan, a) * dft_forward(plan, b)
    result = dft_inverse(plan, product)

    if logger.isEnabledFor(logging.DEBUG):
        residue = float(np.max(np.abs(result.imag), initial=0.0))
        scale = float(np.linalg.norm(a) * np.linalg.norm(b))
        if residue > DftConfig.CONVOLUTION_RTOL * max(scale, np.finfo(float).tiny):
            logger.debug(f"Imaginary residue {residue:.3e} exceeds tolerance for n={a.shape[0]}")

    return result.real.copy()


def linear_convolve(a: RealVector, b: RealVector, length: Optional[int] = None) -> RealVector:
    """Acyclic convolution of a and b truncated to `length` entries"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    full = a.shape[0] + b.shape[0] - 1
    length = full if length is None else int(length)

    padded = next_power_of_two(full)
    a_pad = np.zeros(padded)
    b_pad = np.zeros(padded)
    a_pad[:a.shape[0]] = a
    b_pad[:b.shape[0]] = b

    result = cyclic_convolve(a_pad, b_pad)[:min(length, full)]
    if length > full:
        result = np.concatenate([result, np.zeros(length - full)])
    return result
