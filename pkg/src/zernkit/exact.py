"""Exact integer/rational reference for the radial polynomials.

Coefficient expansion is integer-only (the binomial form guarantees integer
coefficients), evaluation is exact rational Horner, and reference tables are
rounded to binary64 exactly once at the very end. This replaces a fixed-
precision decimal reference: there is no precision to choose, and the
question "how many bits would have been enough?" becomes an experiment
(`precision_sweep`) instead of an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .modes import Mode, ModeSet, make_mode
from .tables import EvalMatrix, GridError

_MIN_SIGNIFICAND_BITS = 24  # binary32; anything below is meaningless here


@dataclass(frozen=True)
class ExactRadialPoly:
    """Integer-coefficient radial polynomial or one of its derivatives.

    ``terms`` holds (exponent, coefficient) pairs in descending exponent
    order. Exponents step by 2 (parity of n - deriv_order) and coefficients
    are exact arbitrary-size integers for every derivative order.
    """

    n: int
    m_abs: int
    deriv_order: int
    terms: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def coefficient_sum(self) -> int:
        """Value at rho = 1, an exact integer."""
        return sum(c for _, c in self.terms)


def radial_coefficients(n: int, m_abs: int) -> ExactRadialPoly:
    """Expand the radial polynomial for (n, |m|) into exact integer terms.

    The coefficient of rho^(n-2s) is (-1)^s C(n-s, s) C(n-2s, (n-|m|)/2 - s),
    computed entirely in integer arithmetic.
    """
    mode = make_mode(n, m_abs)
    if mode.m < 0:
        raise ValueError("m_abs must be non-negative")
    j = mode.jacobi_degree
    terms = tuple(
        (n - 2 * s, (-1) ** s * comb(n - s, s) * comb(n - 2 * s, j - s))
        for s in range(j + 1)
    )
    return ExactRadialPoly(n=mode.n, m_abs=mode.m_abs, deriv_order=0, terms=terms)


def differentiate_exact(poly: ExactRadialPoly, order: int) -> ExactRadialPoly:
    """Differentiate term-wise ``order`` times (1..3), exactly.

    Terms whose exponent reaches below zero vanish; the result can be the
    zero polynomial (empty terms).
    """
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1..3, got {order}")
    if poly.deriv_order != 0:
        raise ValueError("expected an underived polynomial")
    terms = poly.terms
    for _ in range(order):
        terms = tuple((e - 1, c * e) for e, c in terms if e >= 1)
    return ExactRadialPoly(
        n=poly.n, m_abs=poly.m_abs, deriv_order=order, terms=terms
    )


def eval_exact(poly: ExactRadialPoly, rho: Fraction | int) -> Fraction:
    """Exact rational Horner evaluation at rho in [0, 1]. No rounding anywhere."""
    rho = Fraction(rho)
    if rho < 0 or rho > 1:
        raise GridError(f"rho must lie in [0, 1], got {rho}")
    num, den = _eval_terms_rational(poly.terms, rho.numerator, rho.denominator)
    return Fraction(num, den)


def _eval_terms_rational(terms, a: int, b: int) -> tuple[int, int]:
    """Evaluate integer-coefficient terms at a/b as an unreduced num/den pair.

    Homogenized Horner: every operation is an exact integer multiply/add.
    """
    if not terms:
        return 0, 1
    top = terms[0][0]
    acc = terms[0][1]
    bpow = 1
    prev_e = top
    for e, c in terms[1:]:
        gap = prev_e - e
        bpow *= b**gap
        acc = acc * a**gap + c * bpow
        prev_e = e
    return acc * a**prev_e, b**top


def _eval_terms_float(terms, a: int, b: int) -> float:
    """Exact value of the terms at a/b, correctly rounded once to binary64."""
    num, den = _eval_terms_rational(terms, a, b)
    if num == 0:
        return 0.0
    return num / den  # big-int true division is correctly rounded


def _as_fractions(grid) -> tuple[Fraction, ...]:
    points = tuple(Fraction(x) for x in np.asarray(grid).tolist()) if isinstance(
        grid, np.ndarray
    ) else tuple(Fraction(x) for x in grid)
    for p in points:
        if p < 0 or p > 1:
            raise GridError(f"rho must lie in [0, 1], got {p}")
    return points


def oracle_table(modes: ModeSet, grid, deriv_order: int = 0) -> EvalMatrix:
    """Reference table: exact values correctly rounded once to binary64.

    Parameters
    ----------
    modes : sequence of Mode
        columns, in input order; duplicates and sign-flipped m share work
    grid : sequence of Fraction or float
        radial points; floats are converted exactly (binary64 is a subset
        of the rationals)
    deriv_order : int
        derivative order 0..3 applied to the radial polynomial

    Returns
    -------
    EvalMatrix
        one correctly rounded binary64 entry per point and mode
    """
    if deriv_order not in (0, 1, 2, 3):
        raise ValueError(f"derivative order must be 0..3, got {deriv_order}")
    modes = tuple(modes)
    points = _as_fractions(grid)
    values = np.empty((len(points), len(modes)), dtype=np.float64)
    cache: dict[tuple[int, int], np.ndarray] = {}
    for col, mode in enumerate(modes):
        key = (mode.n, mode.m_abs)
        column = cache.get(key)
        if column is None:
            poly = radial_coefficients(mode.n, mode.m_abs)
            if deriv_order:
                poly = differentiate_exact(poly, deriv_order)
            column = np.array(
                [
                    _eval_terms_float(poly.terms, p.numerator, p.denominator)
                    for p in points
                ],
                dtype=np.float64,
            )
            cache[key] = column
        values[:, col] = column
    return EvalMatrix(values=values, modes=modes, deriv_order=deriv_order)


@dataclass(frozen=True)
class ErrorRow:
    """Per-mode maximum absolute deviation from the reference."""

    n: int
    m: int
    deriv_order: int
    max_abs_err: float


def max_abs_error(candidate: EvalMatrix, reference: EvalMatrix) -> tuple[ErrorRow, ...]:
    """Per-mode max over the grid of |candidate - reference|, in binary64."""
    if candidate.values.shape != reference.values.shape:
        raise ValueError(
            f"shape mismatch: {candidate.values.shape} vs {reference.values.shape}"
        )
    if candidate.modes != reference.modes:
        raise ValueError("candidate and reference mode order differ")
    if candidate.deriv_order != reference.deriv_order:
        raise ValueError("candidate and reference derivative order differ")
    errs = np.max(np.abs(candidate.values - reference.values), axis=0)
    return tuple(
        ErrorRow(mode.n, mode.m, candidate.deriv_order, float(err))
        for mode, err in zip(candidate.modes, errs)
    )


# --- simulated p-bit significand arithmetic ---------------------------------
#
# A binary float value is (mant, exp) meaning mant * 2**exp with an integer
# mantissa. Rounding keeps at most p mantissa bits, ties to even. This is the
# deterministic definition of "p-bit arithmetic" used by precision_sweep:
# every add/multiply result is rounded; inputs are exact rationals rounded
# once on entry; powers are exact integer powers rounded once.


def _round_significand(mant: int, exp: int, bits: int) -> tuple[int, int]:
    """Round mant * 2**exp to at most ``bits`` mantissa bits, half-to-even."""
    if mant == 0:
        return 0, 0
    neg = mant < 0
    a = -mant if neg else mant
    drop = a.bit_length() - bits
    if drop <= 0:
        return mant, exp
    head = a >> drop
    rem = a & ((1 << drop) - 1)
    half = 1 << (drop - 1)
    if rem > half or (rem == half and (head & 1)):
        head += 1
    return (-head if neg else head), exp + drop


def _significand_from_fraction(num: int, den: int, bits: int) -> tuple[int, int]:
    """Round the positive rational num/den to ``bits`` mantissa bits, half-even."""
    if num == 0:
        return 0, 0
    shift = bits + 2 - (num.bit_length() - den.bit_length())
    if shift >= 0:
        q, r = divmod(num << shift, den)
    else:
        q, r = divmod(num, den << -shift)
    # q carries >= bits+1 significant bits; r != 0 is the sticky bit
    drop = q.bit_length() - bits
    head = q >> drop
    rem = q & ((1 << drop) - 1)
    half = 1 << (drop - 1)
    if rem > half or (rem == half and (r or (head & 1))):
        head += 1
    return head, drop - shift


def _significand_to_float(mant: int, exp: int) -> float:
    if mant == 0:
        return 0.0
    if exp >= 0:
        return float(mant << exp)
    return mant / (1 << -exp)  # correctly rounded big-int division


def _simulated_direct_value(
    coeffs: Sequence[tuple[int, int]], m_abs: int, x: tuple[int, int], bits: int
) -> tuple[int, int]:
    """Direct-sum evaluation in p-bit arithmetic.

    Mirrors the binary64 baseline: Horner over descending exponents in
    u = x*x, then one multiply by x**m. ``coeffs`` are the pre-rounded
    integer coefficients as (mant, exp) pairs, descending exponent order.
    """
    xm, xe = x
    um, ue = _round_significand(xm * xm, xe + xe, bits)
    am, ae = coeffs[0]
    for cm, ce in coeffs[1:]:
        am, ae = _round_significand(am * um, ae + ue, bits)
        shared = min(ae, ce)
        am, ae = _round_significand(
            (am << (ae - shared)) + (cm << (ce - shared)), shared, bits
        )
    if m_abs and xm == 0:
        return 0, 0
    if m_abs:
        pm, pe = _round_significand(xm**m_abs, xe * m_abs, bits)
        am, ae = _round_significand(am * pm, ae + pe, bits)
    return am, ae


def precision_sweep(
    n_max: int, mantissa_bits: Sequence[int], grid
) -> list[tuple[int, float]]:
    """Max binary64 deviation of p-bit direct evaluation from the exact oracle.

    For each precision p the direct sum is evaluated for every mode with
    n <= n_max (radial keys, m >= 0) at every grid point, rounding to the
    nearest p-bit significand after each operation, and the worst
    |float64(simulated) - float64(exact)| is reported.

    Returns (bits, max_deviation) pairs in the order the bits were given.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    bits_list = [int(b) for b in mantissa_bits]
    for b in bits_list:
        if b < _MIN_SIGNIFICAND_BITS:
            raise ValueError(
                f"significand below {_MIN_SIGNIFICAND_BITS} bits rejected, got {b}"
            )
    points = _as_fractions(grid)

    polys = [
        radial_coefficients(n, m)
        for n in range(n_max + 1)
        for m in range(n % 2, n + 1, 2)
    ]
    references = [
        [_eval_terms_float(p.terms, pt.numerator, pt.denominator) for pt in points]
        for p in polys
    ]

    results: list[tuple[int, float]] = []
    for bits in bits_list:
        xs = [
            _significand_from_fraction(pt.numerator, pt.denominator, bits)
            for pt in points
        ]
        worst = 0.0
        for poly, refs in zip(polys, references):
            coeffs = [_round_significand(c, 0, bits) for _, c in poly.terms]
            m_abs = poly.m_abs
            for x, ref in zip(xs, refs):
                value = _significand_to_float(
                    *_simulated_direct_value(coeffs, m_abs, x, bits)
                )
                dev = abs(value - ref)
                if dev > worst:
                    worst = dev
        results.append((bits, worst))
    return results
