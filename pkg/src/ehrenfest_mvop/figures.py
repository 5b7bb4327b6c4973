"""Data behind the eigenvalue-curve figures.

``fig1``: eigenvalues ``Theta_q(lambda_j)`` of the q-deformed model over a grid
of q. ``fig2``: eigenvalues ``(1-q) K_1(j) + q K_k(j)`` of the two-component
multi-ball model over a range of k, with the subdominant-modulus eigenvalue
flagged. Both are computed exactly and rendered by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from ._numeric import DomainError, as_number
from .ehrenfest import ModelSpec, classical_eigenvalues, theta_for
from .scalar_orthopoly import krawtchouk_table


@dataclass(frozen=True)
class Fig1Row:
    q: object
    j: int
    eigenvalue: object


@dataclass(frozen=True)
class Fig2Row:
    k: int
    j: int
    eigenvalue: object
    is_subdominant: bool


def parse_grid(text: str) -> list[Fraction]:
    """``"start:stop:step"`` (inclusive) or a comma separated list of values."""
    if ":" in text:
        start, stop, step = (Fraction(p.strip()) for p in text.split(":"))
        if step <= 0 or stop < start:
            raise DomainError("grid needs step > 0 and stop >= start")
        count = int((stop - start) / step) + 1
        return [start + i * step for i in range(count)]
    return [Fraction(p.strip()) for p in text.split(",") if p.strip()]


def parse_k(text: str) -> list[int]:
    """``"5"``, ``"1,2,7"`` or an inclusive range ``"1..40"``."""
    if ".." in text:
        lo, hi = (int(p) for p in text.split(".."))
        return list(range(lo, hi + 1))
    return [int(p) for p in text.split(",") if p.strip()]


def fig1_rows(N: int, grid, exact: bool = True) -> list[Fig1Row]:
    lams = classical_eigenvalues(N, True)
    rows = []
    for q in grid:
        theta = theta_for(ModelSpec.q_deformed(N, Fraction(q)), True)
        for j, lam in enumerate(lams):
            rows.append(Fig1Row(as_number(q, exact), j, as_number(theta(lam), exact)))
    return rows


def fig2_rows(N: int, q, ks, exact: bool = True) -> list[Fig2Row]:
    q = as_number(q, True)
    if not 0 <= q <= 1:
        raise DomainError("q must lie in [0, 1]")
    if any(not 1 <= k <= N for k in ks):
        raise DomainError("every k must satisfy 1 <= k <= N")
    K = krawtchouk_table(N, True)
    rows = []
    for k in ks:
        eig = [(1 - q) * K[1, j] + q * K[k, j] for j in range(N + 1)]
        inside = [abs(v) for v in eig if abs(v) < 1]
        top = max(inside, default=None)
        for j, v in enumerate(eig):
            rows.append(Fig2Row(k, j, as_number(v, exact), top is not None and abs(v) == top))
    return rows


def curve_crossings(rows) -> set[Fraction]:
    """q values where two fig1 curves meet, from exact row data.

    Each curve ``q -> Theta_q(lambda_j)`` is affine in q; collinearity of
    every sample is asserted before lines are intersected.
    """
    curves: dict[int, list] = {}
    for r in rows:
        curves.setdefault(r.j, []).append((Fraction(r.q), Fraction(r.eigenvalue)))
    lines = {}
    for j, pts in curves.items():
        pts.sort()
        (q0, v0), (q1, v1) = pts[0], pts[-1]
        slope = (v1 - v0) / (q1 - q0)
        if any(v != v0 + slope * (q - q0) for q, v in pts):
            raise ValueError(f"curve {j} is not affine in q")
        lines[j] = (slope, v0 - slope * q0)
    lo = min(q for pts in curves.values() for q, _ in pts)
    hi = max(q for pts in curves.values() for q, _ in pts)
    out = set()
    for (s1, c1), (s2, c2) in combinations(lines.values(), 2):
        if s1 != s2:
            q = (c2 - c1) / (s1 - s2)
            if lo <= q <= hi:
                out.add(q)
    return out
