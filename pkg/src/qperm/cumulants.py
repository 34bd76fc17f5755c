"""Moment and cumulant functions over the non-crossing lattice.

The recursive interval-extraction evaluator `nested_eval` is the common
engine: moments of a cumulant specification, cumulants of a moment
functional (Moebius inversion), free i.i.d. moments with a kernel filter,
and the vanishing-mixed-cumulants freeness test are all sums of nested
evaluations.

Scalars are exact rationals throughout; the matrix instantiation (values
and operand coefficients in M_d(C)) is the only approximate layer, with
tolerances stated at the call sites.  Operands are opaque algebra
elements: interleaved algebra factors are absorbed into neighbouring
operands, which is the deliberate narrowing of the fully general
operator-valued setting.
"""

import itertools
import operator
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BoundError, DimensionError, DomainError
from .partitions import enumerate_nc, is_noncrossing, kernel, leq, mobius_nc
from .weingarten import parse_rational, rational_str


@dataclass
class MomentFunctional:
    """Finitely supported word -> scalar map: a distribution at moment level.

    No trace or symmetry property is assumed.  If `involution` maps each
    symbol to its adjoint symbol, `state_like_violations` checks
    value(reverse(star(w))) == conj(value(w)) on the stored support.
    """

    alphabet: tuple
    k_max: int
    moments: dict
    unit_value: object = Fraction(1)
    involution: dict = None

    def value(self, word):
        word = tuple(word)
        if len(word) > self.k_max:
            raise BoundError(f"word length {len(word)} exceeds k_max={self.k_max}")
        if not word:
            return self.unit_value
        try:
            return self.moments[word]
        except KeyError:
            raise DomainError(f"moment undefined for word {word}") from None

    def state_like_violations(self, tol=0):
        if self.involution is None:
            raise DomainError("no involution declared")
        bad = []
        for word, val in self.moments.items():
            star = tuple(self.involution[s] for s in reversed(word))
            if star in self.moments:
                other = self.moments[star]
                expected = other.conjugate() if hasattr(other, "conjugate") else other
                if abs(val - expected) > tol:
                    bad.append((word, val, expected))
        return bad

    def to_json_dict(self):
        return {
            "alphabet": [str(a) for a in self.alphabet],
            "k_max": self.k_max,
            "moments": {
                ",".join(str(s) for s in w): rational_str(v)
                for w, v in sorted(self.moments.items())
            },
        }

    @classmethod
    def from_json_dict(cls, data):
        alphabet = tuple(data["alphabet"])
        moments = {
            tuple(key.split(",")): parse_rational(v)
            for key, v in data["moments"].items()
        }
        return cls(alphabet=alphabet, k_max=int(data["k_max"]), moments=moments)


@dataclass
class CumulantSpec:
    """Free cumulants by (block size, letter word); unset words are zero.

    Values are scalars, or d x d arrays for the matrix instantiation (a
    matrix value V means the block contributes V times the ordered product
    of the coefficients accumulated on the block's legs).
    """

    alphabet: tuple
    k_max: int
    values: dict

    def value(self, word):
        word = tuple(word)
        if not 1 <= len(word) <= self.k_max:
            raise BoundError(f"block size {len(word)} outside 1..{self.k_max}")
        return self.values.get(word, Fraction(0))

    def matrix_dim(self):
        for v in self.values.values():
            if isinstance(v, np.ndarray):
                return v.shape[0]
        return None

    def to_json_dict(self):
        if self.matrix_dim() is not None:
            raise DomainError("matrix-valued specifications do not serialize to JSON")
        return {
            "alphabet": [str(a) for a in self.alphabet],
            "k_max": self.k_max,
            "cumulants": {
                ",".join(str(s) for s in w): rational_str(v)
                for w, v in sorted(self.values.items())
            },
        }

    @classmethod
    def from_json_dict(cls, data):
        values = {
            tuple(key.split(",")): parse_rational(v)
            for key, v in data["cumulants"].items()
        }
        return cls(alphabet=tuple(data["alphabet"]), k_max=int(data["k_max"]), values=values)


def nested_eval(pi, block_fn, operands, multiply=operator.mul, choose_interval=None):
    """Collapse interval blocks of a non-crossing partition recursively.

    Each round finds the blocks that are intervals of the remaining
    positions, picks one (the first, unless `choose_interval` selects
    another of the offered intervals), applies `block_fn` to the tuple of
    current operand values on that block, and multiplies the result onto
    the preceding remaining operand (onto the following one, from the
    left, if the block is initial).  The value of the last block is the
    result.  For balanced block functions the outcome does not depend on
    the removal order.
    """
    ops = list(operands)
    if len(ops) != pi.ground_size:
        raise DimensionError(
            f"{len(ops)} operands for ground size {pi.ground_size}"
        )
    if not is_noncrossing(pi):
        raise DomainError(f"partition is not non-crossing: {pi}")
    pi_blocks = list(pi.blocks)
    values = dict(enumerate(ops, start=1))
    remaining = list(range(1, pi.ground_size + 1))
    while True:
        pos = {x: i for i, x in enumerate(remaining)}
        intervals = [
            b for b in pi_blocks if pos[b[-1]] - pos[b[0]] == len(b) - 1
        ]
        block = intervals[0] if choose_interval is None else choose_interval(intervals)
        result = block_fn(tuple(values[x] for x in block))
        if len(pi_blocks) == 1:
            return result
        pi_blocks.remove(block)
        dead = set(block)
        lo = pos[block[0]]
        if lo > 0:
            prev = remaining[lo - 1]
            values[prev] = multiply(values[prev], result)
        else:
            succ = remaining[pos[block[-1]] + 1]
            values[succ] = multiply(result, values[succ])
        remaining = [x for x in remaining if x not in dead]


class _Leg:
    """A letter with algebra coefficients accumulated on both sides."""

    __slots__ = ("left", "letter", "right")

    def __init__(self, left, letter, right):
        self.left = left
        self.letter = letter
        self.right = right


def _scalar_algebra():
    return Fraction(1), operator.mul, lambda c, v: c * v


def _matrix_algebra(d):
    one = np.eye(d, dtype=complex)

    def scale(coeff, value):
        if isinstance(value, np.ndarray):
            return np.asarray(coeff) @ np.asarray(value, dtype=complex)
        return complex(value) * coeff

    return one, operator.matmul, scale


def _spec_sum(spec, word, admissible, algebra=None):
    """Sum of nested block-value products over a set of NC partitions."""
    word = tuple(word)
    k = len(word)
    if k > spec.k_max:
        raise BoundError(f"degree {k} exceeds k_max={spec.k_max}")
    d = spec.matrix_dim()
    if algebra is None:
        algebra = _matrix_algebra(d) if d else _scalar_algebra()
    one, mul, scale = algebra

    def absorb(a, b):
        if isinstance(a, _Leg):
            return _Leg(a.left, a.letter, mul(a.right, b))
        return _Leg(mul(a, b.left), b.letter, b.right)

    def block_value(window):
        coeff = one
        for leg in window:
            coeff = mul(mul(coeff, leg.left), leg.right)
        return scale(coeff, spec.value(tuple(leg.letter for leg in window)))

    total = None
    for pi in admissible:
        operands = [_Leg(one, s, one) for s in word]
        term = nested_eval(pi, block_value, operands, multiply=absorb)
        total = term if total is None else total + term
    if total is None:
        return Fraction(0) if d is None else np.zeros((d, d), dtype=complex)
    return total


def cumulants_to_moments(spec, word):
    """Moment of a word from its free cumulants: sum over all of NC(k)."""
    return _spec_sum(spec, word, enumerate_nc(len(tuple(word))))


def moment_nested(mf, pi, word):
    """Nested moment function: intervals collapse through the functional."""
    word = tuple(word)
    if len(word) != pi.ground_size:
        raise DimensionError(
            f"word length {len(word)} differs from ground size {pi.ground_size}"
        )
    one, mul, scale = _scalar_algebra()

    def absorb(a, b):
        if isinstance(a, _Leg):
            return _Leg(a.left, a.letter, mul(a.right, b))
        return _Leg(mul(a, b.left), b.letter, b.right)

    def block_value(window):
        coeff = one
        for leg in window:
            coeff = mul(mul(coeff, leg.left), leg.right)
        return scale(coeff, mf.value(tuple(leg.letter for leg in window)))

    operands = [_Leg(one, s, one) for s in word]
    return nested_eval(pi, block_value, operands, multiply=absorb)


def moments_to_cumulants(mf, pi, word):
    """Cumulant function at pi by Moebius inversion over NC(k)."""
    word = tuple(word)
    k = len(word)
    if pi.ground_size != k:
        raise DimensionError(
            f"word length {k} differs from ground size {pi.ground_size}"
        )
    if not is_noncrossing(pi):
        raise DomainError(f"partition is not non-crossing: {pi}")
    total = Fraction(0)
    for sigma in enumerate_nc(k):
        if leq(sigma, pi):
            total += mobius_nc(sigma, pi) * moment_nested(mf, sigma, word)
    return total


def free_iid_moment(spec, letters, labels):
    """Moment of a free, identically distributed family: the sum over
    NC(k) is restricted to partitions below the kernel of the labels."""
    letters = tuple(letters)
    labels = tuple(labels)
    if len(letters) != len(labels):
        raise DimensionError(
            f"{len(letters)} letters vs {len(labels)} labels"
        )
    ker = kernel(labels)
    admissible = [pi for pi in enumerate_nc(len(letters)) if leq(pi, ker)]
    return _spec_sum(spec, letters, admissible)


@dataclass(frozen=True)
class FreenessVerdict:
    free: bool
    violations: tuple  # of (pi, word, value)
    tolerance: object
    words_checked: int


def freeness_check(mf, family_labels, tolerance=0, max_degree=None):
    """Report mixed cumulants that fail to vanish.

    family_labels maps each alphabet symbol to its family; for every word
    and every non-crossing pi not below the kernel of the word's family
    labels, the cumulant must be zero (exactly, for rational scalars;
    within `tolerance` otherwise).
    """
    degree = mf.k_max if max_degree is None else min(max_degree, mf.k_max)
    violations = []
    words = 0
    for k in range(1, degree + 1):
        ncs = enumerate_nc(k)
        for word in itertools.product(mf.alphabet, repeat=k):
            words += 1
            fams = tuple(family_labels[s] for s in word)
            ker = kernel(fams)
            nested = {}
            for pi in ncs:
                if leq(pi, ker):
                    continue
                value = Fraction(0)
                for sigma in ncs:
                    if leq(sigma, pi):
                        if sigma not in nested:
                            nested[sigma] = moment_nested(mf, sigma, word)
                        value += mobius_nc(sigma, pi) * nested[sigma]
                if abs(value) > tolerance:
                    violations.append((pi, word, value))
    return FreenessVerdict(
        free=not violations,
        violations=tuple(violations),
        tolerance=tolerance,
        words_checked=words,
    )


@dataclass(frozen=True)
class MatrixProbabilitySpace:
    """M_d (C) sitting inside M_d tensor M_m, with the trace-normalized
    block conditional expectation onto the d x d corner."""

    d: int
    m: int

    def embed(self, b):
        b = np.asarray(b, dtype=complex)
        if b.shape != (self.d, self.d):
            raise DimensionError(f"expected {(self.d, self.d)}, got {b.shape}")
        return np.kron(b, np.eye(self.m, dtype=complex))

    def expectation(self, a):
        a = np.asarray(a, dtype=complex)
        size = self.d * self.m
        if a.shape != (size, size):
            raise DimensionError(f"expected {(size, size)}, got {a.shape}")
        blocks = a.reshape(self.d, self.m, self.d, self.m)
        return np.trace(blocks, axis1=1, axis2=3) / self.m

    def identity(self):
        return np.eye(self.d * self.m, dtype=complex)


def matrix_expectation(space, element):
    """Identity-tensor-normalized partial trace onto the d x d algebra."""
    return space.expectation(element)
