"""Smooth-number sets A(Y, R) and the factorization decomposition.

A(Y, R) collects the integers 1 <= n <= Y whose prime factors all stay at or
below R. `decompose` rewrites a sum of |f| over A(Y, R) as the two direct
enumerations F and G: F runs f over the product grid v_1*...*v_r*u with each
v_i drawn from (M_i, M_i*R] and u from A(Y/(M_1...M_r), R); G charges
M_1...M_j * R^(j-1) * sup_{1<=y<=M_j} |f(y)| for each level j. For r = 1 and
nonnegative f the plain inequality sum <= F + G holds outright (every smooth
y > M_1 owns a divisor in (M_1, M_1*R], and the y <= M_1 stragglers are
covered by G), so the suite hard-asserts it; deeper nestings are only checked
as a bounded-ratio trend.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import fsum, isqrt
from typing import Callable, NamedTuple, Sequence

from .config import DEFAULT_CELL_BUDGET, check_budget
from .errors import DomainError


@dataclass(frozen=True)
class SmoothSet:
    """All R-smooth integers in [1, Y], sorted ascending."""

    bound_Y: int
    smoothness_R: int
    members: tuple[int, ...]

    def __contains__(self, n: int) -> bool:
        lo, hi = 0, len(self.members)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.members[mid] < n:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.members) and self.members[lo] == n

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p:: p] = bytearray(len(sieve[p * p:: p]))
    return [i for i in range(2, n + 1) if sieve[i]]


def enumerate_smooth(Y: int, R: int) -> SmoothSet:
    """A(Y, R) by depth-first products over the primes <= R.

    Builds members multiplicatively (1, then 1*p, 1*p*p', ...) rather than
    factoring every integer up to Y, so the cost scales with the output size.
    """
    if Y < 1 or R < 1:
        raise DomainError("enumerate_smooth needs Y >= 1 and R >= 1")
    primes = _primes_upto(min(R, Y))
    members: list[int] = []

    def walk(start: int, n: int) -> None:
        members.append(n)
        for i in range(start, len(primes)):
            m = n * primes[i]
            if m > Y:
                break  # primes ascend, so every later branch overshoots too
            walk(i, m)

    walk(0, 1)
    members.sort()
    return SmoothSet(bound_Y=Y, smoothness_R=R, members=tuple(members))


@dataclass(frozen=True)
class DecompositionParams:
    """Level sizes M_1..M_r plus the smoothness/splitting knobs R, eta, Z."""

    M: tuple[float, ...]
    R: int
    eta: float = 0.125
    Z: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "M", tuple(float(m) for m in self.M))
        if not self.M:
            raise DomainError("at least one level M_1 is required")
        if self.R < 1:
            raise DomainError("R must be a positive integer")
        if not 0.0 < self.eta < 1.0:
            raise DomainError("eta must lie in (0, 1)")
        if any(m < 1.0 for m in self.M):
            raise DomainError("every M_i must be >= 1")

    @property
    def r(self) -> int:
        return len(self.M)

    def validate(self, Y: int) -> None:
        if any(m >= Y for m in self.M):
            raise DomainError("every M_i must satisfy M_i < Y")
        if math.prod(self.M) >= Y:
            raise DomainError("M_1*...*M_r must stay below Y")

    @classmethod
    def lemma32_schedule(cls, Y: float, Z: float, eta: float = 0.125
                         ) -> "DecompositionParams":
        """The r = 1/eta level schedule with product M_1*...*M_r = Y/Z.

        With a = floor((1/eta)(1 - log Z / log Y)): levels above r - a get
        Y^eta, level r - a gets Y/(Z*Y^(a*eta)), levels below get 1. `a` is
        clamped to r - 1 so the balancing level always has an index; the
        unclamped value can reach r when Z is tiny.
        """
        if not 0.0 < eta < 1.0:
            raise DomainError("eta must lie in (0, 1)")
        if not 1.0 < Z < Y:
            raise DomainError("the schedule needs 1 < Z < Y")
        r = round(1.0 / eta)
        a = math.floor((1.0 / eta) * (1.0 - math.log(Z) / math.log(Y)))
        a = max(0, min(a, r - 1))
        levels = []
        for i in range(1, r + 1):
            if i > r - a:
                levels.append(Y ** eta)
            elif i == r - a:
                levels.append(Y / (Z * Y ** (a * eta)))
            else:
                levels.append(1.0)
        return cls(M=tuple(levels), R=max(1, math.floor(Y ** eta)),
                   eta=eta, Z=float(Z))


class Decomposition(NamedTuple):
    F: float
    G: float


def _v_range(m: float, R: int) -> range:
    """Integers in the half-open-left interval (m, m*R]."""
    return range(math.floor(m) + 1, math.floor(m * R) + 1)


def decompose(f: Callable[[int], float], Y: int, params: DecompositionParams,
              workers: int = 1, budget: int | None = None) -> Decomposition:
    """Direct enumeration of the two majorant sums (F, G).

    F = sum over the v-grid and u in A(Y/(M_1...M_r), R) of |f(v_1...v_r*u)|;
    G = sum_j M_1...M_j R^(j-1) sup_{1<=y<=M_j} |f(y)|. The budget counts
    every f evaluation the grid would make (default cap 10**8); `f` must be
    safe to call from worker threads.
    """
    params.validate(Y)
    Ms, R = params.M, params.R
    ranges = [_v_range(m, R) for m in Ms]
    u_bound = math.floor(Y / math.prod(Ms))
    u_set = enumerate_smooth(max(1, u_bound), R)
    grid = math.prod(len(rg) for rg in ranges)
    sup_points = sum(math.floor(m) for m in Ms)
    check_budget(grid * len(u_set) + sup_points,
                 DEFAULT_CELL_BUDGET if budget is None else budget,
                 what="decomposition cells")

    inner = ranges[1:]

    def outer_slice(v1: int) -> float:
        return fsum(
            fsum(abs(f(v1 * math.prod(vs) * u)) for u in u_set)
            for vs in itertools.product(*inner))

    v1s = list(ranges[0])
    if workers > 1 and len(v1s) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(outer_slice, v1s))
    else:
        partials = [outer_slice(v1) for v1 in v1s]
    F = fsum(partials)

    g_terms: list[float] = []
    lead = 1.0
    for j, m in enumerate(Ms):
        lead *= m
        sup = max((abs(f(y)) for y in range(1, math.floor(m) + 1)), default=0.0)
        g_terms.append(lead * R ** j * sup)
    G = fsum(g_terms)
    return Decomposition(F=F, G=G)
