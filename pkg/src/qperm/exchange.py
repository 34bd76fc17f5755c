"""Quantum and classical urn sequences, magic-unitary invariance testing,
and the finite de Finetti gap experiment.

The noncommutative urn x_j = sum_i lambda_i u_ij is realized purely at the
level of moments through the Haar integration formula; no Hilbert-space
operators are constructed.  Permutation magic unitaries and urn moments
are exact rationals; complex-projection magic unitaries carry a stated
absolute tolerance (default 1e-9).

Checking invariance against finitely many concrete magic unitaries is a
necessary condition for quantum exchangeability, not a decision
procedure: the definition quantifies over every magic unitary in every
unital C*-algebra.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cumulants import CumulantSpec, MomentFunctional, free_iid_moment, moments_to_cumulants
from .errors import BoundError, DimensionError, DomainError, InvariantViolation
from .partitions import SetPartition, enumerate_partitions, kernel, leq
from .weingarten import dk_value, haar_moment

DEFAULT_TOL = 1e-9


class MagicUnitary:
    """n x n array of d x d projection blocks with magic row/column sums.

    Exact instances hold Fraction scalars (d = 1); numeric instances hold
    complex d x d arrays and are validated within a tolerance.
    """

    def __init__(self, blocks, exact=None):
        rows = [list(r) for r in blocks]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionError("blocks must form a square array")
        first = rows[0][0]
        if exact is None:
            exact = not isinstance(first, np.ndarray)
        self.exact = exact
        if exact:
            self.d = 1
            self.blocks = tuple(tuple(Fraction(x) for x in r) for r in rows)
        else:
            arrs = [[np.asarray(x, dtype=complex) for x in r] for r in rows]
            d = arrs[0][0].shape[0]
            for r in arrs:
                for a in r:
                    if a.shape != (d, d):
                        raise DimensionError("all blocks must share one shape")
            self.d = d
            self.blocks = tuple(tuple(r) for r in arrs)
        self.n = n
        self._nonzero = tuple(
            tuple(self._block_nonzero(b) for b in row) for row in self.blocks
        )

    def _block_nonzero(self, b):
        if self.exact:
            return b != 0
        return bool(np.any(np.abs(b) > 1e-14))

    def block(self, i, j):
        return self.blocks[i - 1][j - 1]

    def block_is_zero(self, i, j):
        return not self._nonzero[i - 1][j - 1]

    def identity_block(self):
        return Fraction(1) if self.exact else np.eye(self.d, dtype=complex)

    def zero_block(self):
        return Fraction(0) if self.exact else np.zeros((self.d, self.d), dtype=complex)

    def permutation(self):
        """The permutation this unitary encodes, or None.

        Scalar projections are 0 or 1 and magic sums force one 1 per row
        and column, so every valid exact unitary with d = 1 is of this form.
        """
        if not self.exact:
            return None
        images = []
        for j in range(1, self.n + 1):
            column = [self.block(i, j) for i in range(1, self.n + 1)]
            ones = [i for i, x in enumerate(column, start=1) if x == 1]
            if len(ones) != 1 or any(x not in (0, 1) for x in column):
                return None
            images.append(ones[0])
        if sorted(images) != list(range(1, self.n + 1)):
            return None
        return tuple(images)

    def violations(self, tol=DEFAULT_TOL):
        """All failures of the magic relations, as human-readable strings."""
        if self.exact:
            close = lambda a, b: a == b
            adjoint = lambda a: a
            mul = lambda a, b: a * b
        else:
            close = lambda a, b: np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol
            adjoint = lambda a: a.conj().T
            mul = lambda a, b: a @ b
        one = self.identity_block()
        zero = self.zero_block()
        out = []
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                u = self.block(i, j)
                if not close(mul(u, u), u) or not close(adjoint(u), u):
                    out.append(f"block ({i},{j}) is not a projection")
        for i in range(1, self.n + 1):
            for k in range(1, self.n + 1):
                for l in range(k + 1, self.n + 1):
                    if not close(mul(self.block(i, k), self.block(i, l)), zero):
                        out.append(f"row {i}: blocks {k},{l} not orthogonal")
                    if not close(mul(self.block(k, i), self.block(l, i)), zero):
                        out.append(f"column {i}: blocks {k},{l} not orthogonal")
        for i in range(1, self.n + 1):
            row_sum = self.block(i, 1)
            col_sum = self.block(1, i)
            for k in range(2, self.n + 1):
                row_sum = row_sum + self.block(i, k)
                col_sum = col_sum + self.block(k, i)
            if not close(row_sum, one):
                out.append(f"row {i} does not sum to the identity")
            if not close(col_sum, one):
                out.append(f"column {i} does not sum to the identity")
        return out

    def is_valid(self, tol=DEFAULT_TOL):
        return not self.violations(tol)


def permutation_magic_unitary(perm):
    """Magic unitary of a permutation: block (i,j) = [i == perm(j)]."""
    perm = tuple(perm)
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise DomainError(f"not a permutation of 1..{n}: {perm}")
    blocks = [
        [Fraction(1) if i == perm[j - 1] else Fraction(0) for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ]
    return MagicUnitary(blocks, exact=True)


def all_permutation_magic_unitaries(n):
    for perm in itertools.permutations(range(1, n + 1)):
        yield permutation_magic_unitary(perm)


def rotated_projection(theta):
    """Rank-one projection onto the line at angle theta in R^2."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)


def two_projection_magic_unitary(p, q, tol=DEFAULT_TOL):
    """The 4 x 4 block pattern [[p,1-p,0,0],[1-p,p,0,0],[0,0,q,1-q],[0,0,1-q,q]].

    Noncommutative whenever p and q do not commute; this is the smallest
    concrete witness separating quantum from classical exchangeability.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if p.shape != q.shape or p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionError("p and q must be square matrices of equal size")
    for name, a in (("p", p), ("q", q)):
        if np.max(np.abs(a @ a - a)) > tol or np.max(np.abs(a.conj().T - a)) > tol:
            raise DomainError(f"{name} is not a projection")
    one = np.eye(p.shape[0], dtype=complex)
    z = np.zeros_like(one)
    blocks = [
        [p, one - p, z, z],
        [one - p, p, z, z],
        [z, z, q, one - q],
        [z, z, one - q, q],
    ]
    return MagicUnitary(blocks, exact=False)


@dataclass(frozen=True)
class InvarianceReport:
    max_deviation: object
    witness: tuple
    degree: int
    tolerance: object
    passed: bool


def _word_sum(mf, unitary, j_word, as_float):
    """sum_i mf(i) * U_{i1 j1} ... U_{ik jk}, pruning structurally zero paths."""
    n, k = unitary.n, len(j_word)
    total = unitary.zero_block()
    stack = [((), unitary.identity_block())]
    while stack:
        prefix, prod = stack.pop()
        t = len(prefix)
        if t == k:
            value = mf.value(prefix)
            if as_float:
                value = complex(value)
            total = total + value * prod
            continue
        for i in range(1, n + 1):
            if unitary.block_is_zero(i, j_word[t]):
                continue
            blk = unitary.block(i, j_word[t])
            nxt = prod * blk if unitary.exact else prod @ blk
            stack.append((prefix + (i,), nxt))
    return total


def invariance_check(mf, unitary, max_degree, tolerance=None):
    """Worst deviation of the quantum-permutation invariance condition.

    For every word j of length <= max_degree the coaction average
    sum_i mf(i) U_{i1 j1}...U_{ik jk} must equal mf(j) times the identity
    block.  Exact magic unitaries are checked with exact arithmetic;
    deviation 0 for every permutation unitary is classical exchangeability,
    passing a noncommutative unitary is the stronger quantum condition.
    """
    if max_degree > mf.k_max:
        raise BoundError(f"max_degree {max_degree} exceeds functional k_max {mf.k_max}")
    if tuple(mf.alphabet) != tuple(range(1, unitary.n + 1)):
        raise DimensionError(
            "moment functional must be indexed by the labels 1..n of the unitary"
        )
    exact = unitary.exact
    tol = (0 if exact else DEFAULT_TOL) if tolerance is None else tolerance
    worst = Fraction(0) if exact else 0.0
    witness = None
    perm = unitary.permutation()
    for k in range(1, max_degree + 1):
        for j_word in itertools.product(range(1, unitary.n + 1), repeat=k):
            if perm is not None:
                # the coaction sum collapses to a relabeling of the word
                dev = abs(mf.value(tuple(perm[x - 1] for x in j_word)) - mf.value(j_word))
            else:
                lhs = _word_sum(mf, unitary, j_word, as_float=not exact)
                rhs = mf.value(j_word)
                if exact:
                    dev = abs(lhs - rhs)
                else:
                    dev = float(
                        np.max(np.abs(lhs - complex(rhs) * np.eye(unitary.d)))
                    )
            if dev > worst:
                worst = dev
                witness = j_word
    return InvarianceReport(
        max_deviation=worst,
        witness=witness,
        degree=max_degree,
        tolerance=tol,
        passed=worst <= tol,
    )


def block_sum_identity(unitary, pi, j_word):
    """sum over index words i with pi <= ker i of the block product.

    An algebra identity forces the result to the identity when
    pi <= ker j and to zero otherwise, for every magic unitary.
    """
    j_word = tuple(j_word)
    if len(j_word) != pi.ground_size:
        raise DimensionError(
            f"word length {len(j_word)} differs from ground size {pi.ground_size}"
        )
    if not all(1 <= x <= unitary.n for x in j_word):
        raise BoundError(f"labels out of range 1..{unitary.n}: {j_word}")
    total = unitary.zero_block()
    blocks = pi.blocks
    for assignment in itertools.product(range(1, unitary.n + 1), repeat=len(blocks)):
        i_word = [0] * pi.ground_size
        for value, block in zip(assignment, blocks):
            for x in block:
                i_word[x - 1] = value
        prod = unitary.identity_block()
        dead = False
        for t, jt in enumerate(j_word):
            if unitary.block_is_zero(i_word[t], jt):
                dead = True
                break
            blk = unitary.block(i_word[t], jt)
            prod = prod * blk if unitary.exact else prod @ blk
        if not dead:
            total = total + prod
    return total


def block_sum_matches_indicator(unitary, pi, j_word, tol=DEFAULT_TOL):
    got = block_sum_identity(unitary, pi, j_word)
    expected = (
        unitary.identity_block()
        if leq(pi, kernel(j_word))
        else unitary.zero_block()
    )
    if unitary.exact:
        return got == expected
    return float(np.max(np.abs(got - expected))) <= tol


@dataclass(frozen=True)
class UrnModel:
    """Urn weights for the noncommutative urn x_j = sum_i lambda_i u_ij."""

    n: int
    lam: tuple

    def __post_init__(self):
        if self.n < 1:
            raise BoundError(f"n={self.n} must be >= 1")
        if len(self.lam) != self.n:
            raise DimensionError(f"need {self.n} weights, got {len(self.lam)}")
        object.__setattr__(self, "lam", tuple(Fraction(x) for x in self.lam))

    def marginal_moment(self, p):
        return sum(x**p for x in self.lam) / self.n


@lru_cache(maxsize=None)
def _injection_weight(model, tau):
    """m_lambda(tau): sum over injections of tau's blocks into {1..n} of the
    product of weights raised to block sizes.  Falling factorials count the
    ways to realize each distinct weight value; ties in lambda contribute
    through their multiplicity, never their position."""
    counts = {}
    for x in model.lam:
        counts[x] = counts.get(x, 0) + 1
    values = list(counts.items())
    sizes = [len(b) for b in tau.blocks]
    total = Fraction(0)
    for assign in itertools.product(range(len(values)), repeat=len(sizes)):
        used = {}
        for u in assign:
            used[u] = used.get(u, 0) + 1
        weight = Fraction(1)
        feasible = True
        for u, t in used.items():
            mult = values[u][1]
            if t > mult:
                feasible = False
                break
            for step in range(t):
                weight *= mult - step
        if not feasible:
            continue
        for bi, u in enumerate(assign):
            weight *= values[u][0] ** sizes[bi]
        total += weight
    return total


def _kernel_representative(tau):
    word = [0] * tau.ground_size
    for label, block in enumerate(tau.blocks, start=1):
        for x in block:
            word[x - 1] = label
    return tuple(word)


def urn_moment_quantum(model, j_word, method="auto"):
    """Haar-state moment of the noncommutative urn at the word j.

    Grouped by the kernel of the summation index: the Haar value of a
    generator word depends on i only through ker i, so the n^k sum
    collapses to a sum over P(k) weighted by injection counts.
    """
    j_word = tuple(j_word)
    k = len(j_word)
    if not all(1 <= x <= model.n for x in j_word):
        raise BoundError(f"labels out of range 1..{model.n}: {j_word}")
    total = Fraction(0)
    for tau in enumerate_partitions(k):
        if tau.block_count() > model.n:
            continue
        weight = _injection_weight(model, tau)
        if weight == 0:
            continue
        total += weight * haar_moment(model.n, _kernel_representative(tau), j_word, method=method)
    return total


def urn_moment_classical(model, j_word):
    """Moment of classical sampling without replacement: average over S_n."""
    if model.n > 8:
        raise BoundError(f"classical urn sweep limited to n <= 8, got {model.n}")
    j_word = tuple(j_word)
    if not all(1 <= x <= model.n for x in j_word):
        raise BoundError(f"labels out of range 1..{model.n}: {j_word}")
    total = Fraction(0)
    for perm in itertools.permutations(model.lam):
        term = Fraction(1)
        for t in j_word:
            term *= perm[t - 1]
        total += term
    return total / math.factorial(model.n)


def marginal_cumulant_spec(model, k_max, letter="x"):
    """Free cumulants of the single-variable marginal m_p = (1/n) sum lambda_i^p."""
    moments = {(letter,) * p: model.marginal_moment(p) for p in range(1, k_max + 1)}
    mf = MomentFunctional(alphabet=(letter,), k_max=k_max, moments=moments)
    values = {
        (letter,) * s: moments_to_cumulants(mf, SetPartition.full(s), (letter,) * s)
        for s in range(1, k_max + 1)
    }
    return CumulantSpec(alphabet=(letter,), k_max=k_max, values=values)


@dataclass(frozen=True)
class GapReport:
    n: int
    j_word: tuple
    urn_moment: Fraction
    free_moment: Fraction
    gap: Fraction
    bound: Fraction
    within_bound: bool


def definetti_gap(model, j_word, spec_mode="marginal"):
    """Distance of the quantum urn from its marginal-matched free model.

    The comparison free i.i.d. family has cumulants derived from the
    single-variable marginal, so that the two sides agree on one-letter
    moments; the gap must stay below d_k(n)/n.
    """
    if spec_mode != "marginal":
        raise DomainError(f"unknown spec_mode {spec_mode!r}")
    j_word = tuple(j_word)
    k = len(j_word)
    spec = marginal_cumulant_spec(model, k)
    urn = urn_moment_quantum(model, j_word)
    free = free_iid_moment(spec, ("x",) * k, j_word)
    gap = abs(urn - free)
    bound = dk_value(k, [model.n]).max_value / model.n
    if gap > bound:
        raise InvariantViolation(
            f"de Finetti gap {gap} exceeds d_k(n)/n = {bound} at n={model.n}, j={j_word}"
        )
    return GapReport(
        n=model.n,
        j_word=j_word,
        urn_moment=urn,
        free_moment=free,
        gap=gap,
        bound=bound,
        within_bound=True,
    )


def cesaro_variance(spec, n, letter="c", star=None):
    """Squared 2-norm of the Cesaro mean (1/n) sum_i rho_i(c) for a centered
    free i.i.d. family, via the pair-moment double sum; equals phi(c*c)/n."""
    if star is None:
        starred = letter + "*"
        star = starred if starred in spec.alphabet else letter
    if spec.value((letter,)) != 0 or spec.value((star,)) != 0:
        raise DomainError("cesaro_variance requires a centered letter (kappa_1 = 0)")
    total = Fraction(0)
    for i1 in range(1, n + 1):
        for i2 in range(1, n + 1):
            total += free_iid_moment(spec, (star, letter), (i1, i2))
    return total / n**2


def free_iid_functional(spec, n, k_max, letter="c"):
    """Joint moments of n free copies of one variable, indexed by labels."""
    moments = {}
    for k in range(1, k_max + 1):
        for labels in itertools.product(range(1, n + 1), repeat=k):
            moments[labels] = free_iid_moment(spec, (letter,) * k, labels)
    return MomentFunctional(alphabet=tuple(range(1, n + 1)), k_max=k_max, moments=moments)


def urn_functional(model, k_max):
    """Joint moments of the noncommutative urn sequence, indexed by labels."""
    moments = {}
    for k in range(1, k_max + 1):
        for labels in itertools.product(range(1, model.n + 1), repeat=k):
            moments[labels] = urn_moment_quantum(model, labels)
    return MomentFunctional(
        alphabet=tuple(range(1, model.n + 1)), k_max=k_max, moments=moments
    )


def tensor_iid_functional(single_moments, n, k_max):
    """Joint moments of classically independent identically distributed
    commuting variables: the moment of a word is the product over labels of
    the marginal moment at that label's multiplicity."""
    moments = {}
    for k in range(1, k_max + 1):
        for labels in itertools.product(range(1, n + 1), repeat=k):
            value = Fraction(1)
            for label in set(labels):
                value *= single_moments[labels.count(label)]
            moments[labels] = value
    return MomentFunctional(alphabet=tuple(range(1, n + 1)), k_max=k_max, moments=moments)


def bernoulli_moments(k_max):
    """Marginal moments of a symmetric +-1 coin: 1 at even order, 0 at odd."""
    return {p: Fraction(1 - p % 2) for p in range(1, k_max + 1)}
