"""Threshold secret sharing over a prime field.

A secret s is hidden as the constant term of a random polynomial f of degree
k-1; share i is the point (x_i, f(x_i)).  Any k shares reconstruct f(0) by
Lagrange interpolation, fewer than k reveal nothing.  Shares carry an epoch
counter so that proactive refreshes (adding a random zero-constant
polynomial) invalidate stale material.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    DuplicateX,
    IncompleteShareSet,
    InsufficientShares,
    InvalidCouncilSize,
    MixedEpoch,
    ZeroX,
)

DEFAULT_PRIME = 2**61 - 1


@dataclass(frozen=True)
class ThresholdPolicy:
    """Council size n and reconstruction threshold k, with k a strict majority."""

    n: int
    k: int


@dataclass(frozen=True)
class Share:
    x: int
    y: int
    k: int
    epoch: int = 0


def choose_threshold(n: int) -> ThresholdPolicy:
    """Smallest k with k >= (n+1)/2: a majority of holders must cooperate.

    The single-head council degenerates to k = 1.
    """
    if n < 1:
        raise InvalidCouncilSize(f"council size must be >= 1, got {n}")
    return ThresholdPolicy(n=n, k=n // 2 + 1)


def _eval_poly(coeffs: Sequence[int], x: int, prime: int) -> int:
    # Horner's rule; coeffs[0] is the constant term.
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % prime
    return acc


def _check_xs(xs: Sequence[int], prime: int) -> None:
    for x in xs:
        if x % prime == 0:
            raise ZeroX(f"share x coordinate {x} is zero in GF({prime})")
    if len({x % prime for x in xs}) != len(xs):
        raise DuplicateX("share x coordinates must be distinct")


def split_secret(
    secret: int,
    policy: ThresholdPolicy,
    xs: Sequence[int],
    seed: int,
    prime: int = DEFAULT_PRIME,
) -> tuple[Share, ...]:
    """Split a secret into one share per x coordinate, deterministically per seed."""
    if not 0 <= secret < prime:
        raise ValueError(f"secret must lie in [0, {prime})")
    if len(xs) != policy.n:
        raise ValueError(f"expected {policy.n} x coordinates, got {len(xs)}")
    _check_xs(xs, prime)
    rng = random.Random(seed)
    coeffs = [secret] + [rng.randrange(prime) for _ in range(policy.k - 1)]
    return tuple(Share(x % prime, _eval_poly(coeffs, x % prime, prime), policy.k, 0) for x in xs)


def _common_epoch(shares: Sequence[Share]) -> int:
    epochs = {s.epoch for s in shares}
    if len(epochs) > 1:
        raise MixedEpoch(f"shares span epochs {sorted(epochs)}")
    return epochs.pop()


def _lagrange_at(shares: Sequence[Share], x0: int, prime: int) -> int:
    # Sum of y_i * l_i(x0) where l_i is the Lagrange basis through the x's.
    total = 0
    for i, si in enumerate(shares):
        num, den = 1, 1
        for j, sj in enumerate(shares):
            if i == j:
                continue
            num = num * (x0 - sj.x) % prime
            den = den * (si.x - sj.x) % prime
        total = (total + si.y * num * pow(den, -1, prime)) % prime
    return total


def reconstruct(shares: Iterable[Share], k: int, prime: int = DEFAULT_PRIME) -> int:
    """Interpolate the secret at x = 0 from at least k same-epoch shares."""
    share_list = sorted(shares, key=lambda s: s.x)
    if len(share_list) < k:
        raise InsufficientShares(f"need at least {k} shares, got {len(share_list)}")
    _common_epoch(share_list)
    _check_xs([s.x for s in share_list], prime)
    return _lagrange_at(share_list, 0, prime)


def issue_share(
    quorum: Iterable[Share],
    new_x: int,
    k: int,
    prime: int = DEFAULT_PRIME,
) -> Share:
    """Derive the share at a fresh x from a reconstruction quorum.

    Computed as the sum of per-holder contributions y_i * l_i(new_x), so no
    single contribution equals the secret; the underlying polynomial never
    materialises in one place.
    """
    quorum_list = sorted(quorum, key=lambda s: s.x)
    if len(quorum_list) < k:
        raise InsufficientShares(f"need at least {k} shares, got {len(quorum_list)}")
    epoch = _common_epoch(quorum_list)
    new_x = new_x % prime
    if new_x == 0:
        raise ZeroX("new share coordinate must be nonzero")
    _check_xs([s.x for s in quorum_list] + [new_x], prime)
    return Share(new_x, _lagrange_at(quorum_list, new_x, prime), k, epoch)


def refresh_shares(
    shares: Iterable[Share],
    k: int,
    seed: int,
    prime: int = DEFAULT_PRIME,
    expected_n: Optional[int] = None,
) -> tuple[Share, ...]:
    """Proactively re-randomise the complete share set without moving the secret.

    Adds a random degree-(k-1) polynomial with zero constant term and bumps
    the epoch, so old and new shares can no longer be mixed.
    """
    share_list = sorted(shares, key=lambda s: s.x)
    if expected_n is not None and len(share_list) != expected_n:
        raise IncompleteShareSet(
            f"refresh needs all {expected_n} outstanding shares, got {len(share_list)}"
        )
    if not share_list:
        raise IncompleteShareSet("refresh needs at least one share")
    epoch = _common_epoch(share_list)
    _check_xs([s.x for s in share_list], prime)
    rng = random.Random(seed)
    blind = [0] + [rng.randrange(prime) for _ in range(k - 1)]
    return tuple(
        Share(s.x, (s.y + _eval_poly(blind, s.x, prime)) % prime, s.k, epoch + 1)
        for s in share_list
    )
