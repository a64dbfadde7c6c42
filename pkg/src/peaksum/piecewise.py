"""Piecewise-polynomial real functions with exact derivatives.

The function model used throughout the library: finitely many polynomial
pieces on closed intervals, and a single ``outside`` value (finite or +inf)
everywhere else.  The last piece may extend to +inf.  Polynomials make every
derivative exact, which keeps the asymptotic formulas free of
differentiation noise.

JSON wire format (used by the CLI and config files)::

    {"pieces": [{"a": 0.0, "b": 1.0, "coeffs": [c0, c1, ...]}, ...],
     "outside": "inf" | <number>}

Coefficients are ascending-degree.  Intervals must be non-overlapping and
sorted; evaluation at a shared endpoint uses the left piece.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = ["Piece", "PiecewiseFunction"]

_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Piece:
    a: float
    b: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise InputError("piece needs at least one coefficient")
        if not (self.b > self.a):
            raise InputError(f"piece interval [{self.a}, {self.b}] is empty")
        if math.isinf(self.a):
            raise InputError("piece cannot start at infinity")


class PiecewiseFunction:
    """Evaluable piecewise polynomial; +inf (or a constant) outside its pieces."""

    def __init__(self, pieces, outside: float = math.inf):
        ps = [p if isinstance(p, Piece) else Piece(p[0], p[1], tuple(float(c) for c in p[2]))
              for p in pieces]
        ps.sort(key=lambda p: p.a)
        for left, right in zip(ps, ps[1:]):
            if right.a < left.b - _EDGE_TOL:
                raise InputError(f"pieces overlap near x={right.a}")
        if not ps:
            raise InputError("need at least one piece")
        self.pieces: tuple[Piece, ...] = tuple(ps)
        self.outside = float(outside)
        self._starts = np.array([p.a for p in ps])
        self._ends = np.array([p.b for p in ps])

    # -- constructors -------------------------------------------------------

    @classmethod
    def polynomial(cls, coeffs, a: float, b: float, outside: float = math.inf):
        return cls([Piece(float(a), float(b), tuple(float(c) for c in coeffs))], outside)

    @classmethod
    def constant(cls, value: float, a: float = 0.0, b: float = math.inf,
                 outside: float = math.inf):
        return cls([Piece(float(a), float(b), (float(value),))], outside)

    # -- structure ----------------------------------------------------------

    @property
    def breakpoints(self) -> list[float]:
        """Sorted unique piece endpoints (finite ones only)."""
        pts = set()
        for p in self.pieces:
            pts.add(p.a)
            if math.isfinite(p.b):
                pts.add(p.b)
        return sorted(pts)

    @property
    def support_end(self) -> float:
        """Right end of the last piece (may be +inf)."""
        return self.pieces[-1].b

    @property
    def has_infinite_piece(self) -> bool:
        return math.isinf(self.pieces[-1].b)

    def piece_at(self, x: float) -> Piece | None:
        for p in self.pieces:
            if p.a - _EDGE_TOL <= x <= p.b + _EDGE_TOL:
                return p
        return None

    # -- evaluation ----------------------------------------------------------

    def __call__(self, x):
        if np.ndim(x) == 0:
            p = self.piece_at(float(x))
            if p is None:
                return self.outside
            return float(np.polynomial.polynomial.polyval(float(x), p.coeffs))
        return self.eval_array(np.asarray(x, dtype=float))

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        out = np.full(x.shape, self.outside, dtype=float)
        for p in self.pieces:
            m = (x >= p.a - _EDGE_TOL) & (x <= p.b + _EDGE_TOL)
            if m.any():
                out[m] = np.polynomial.polynomial.polyval(x[m], p.coeffs)
        return out

    def __neg__(self) -> "PiecewiseFunction":
        out = -self.outside if math.isfinite(self.outside) else self.outside
        return PiecewiseFunction(
            [Piece(p.a, p.b, tuple(-c for c in p.coeffs)) for p in self.pieces], out)

    def minus_linear(self, slope: float) -> "PiecewiseFunction":
        """Return x -> f(x) - slope*x on the same pieces (outside untouched)."""
        pieces = []
        for p in self.pieces:
            c = list(p.coeffs) + [0.0] * max(0, 2 - len(p.coeffs))
            c[1] -= slope
            pieces.append(Piece(p.a, p.b, tuple(c)))
        return PiecewiseFunction(pieces, self.outside)

    # -- calculus ------------------------------------------------------------

    def derivative(self, order: int = 1) -> "PiecewiseFunction":
        if order < 1:
            raise InputError("derivative order must be >= 1")
        pieces = []
        for p in self.pieces:
            c = np.asarray(p.coeffs, dtype=float)
            for _ in range(order):
                c = np.polynomial.polynomial.polyder(c)
            if c.size == 0:
                c = np.zeros(1)
            pieces.append(Piece(p.a, p.b, tuple(c.tolist())))
        out = 0.0 if math.isfinite(self.outside) else self.outside
        return PiecewiseFunction(pieces, out)

    def derivatives_at(self, x: float, max_order: int) -> list[float]:
        """[f(x), f'(x), ..., f^(max_order)(x)] from the piece containing x."""
        p = self.piece_at(x)
        if p is None:
            raise InputError(f"x={x} outside all pieces")
        c = np.asarray(p.coeffs, dtype=float)
        vals = [float(np.polynomial.polynomial.polyval(x, c))]
        for _ in range(max_order):
            c = np.polynomial.polynomial.polyder(c)
            if c.size == 0:
                c = np.zeros(1)
            vals.append(float(np.polynomial.polynomial.polyval(x, c)))
        return vals

    def piece_roots(self, piece: Piece, value: float = 0.0) -> list[float]:
        """Real roots of (piece polynomial - value) inside [a, b]."""
        c = np.asarray(piece.coeffs, dtype=float).copy()
        c[0] -= value
        c = np.trim_zeros(c, "b")
        if c.size <= 1:
            return []
        scale = max(abs(piece.a), abs(piece.b), 1.0)
        roots = np.polynomial.polynomial.polyroots(c)
        out = []
        for r in roots:
            if abs(r.imag) > 1e-9 * max(1.0, abs(r.real)):
                continue
            xr = float(r.real)
            if piece.a - 1e-10 * scale <= xr <= piece.b + 1e-10 * scale:
                out.append(max(piece.a, min(xr, piece.b)))
        return sorted(out)

    def solve(self, value: float, lo: float, hi: float) -> list[float]:
        """All x in [lo, hi] with f(x) = value, per-piece exact root finding."""
        sols = []
        for p in self.pieces:
            a, b = max(p.a, lo), min(p.b, hi)
            if a > b:
                continue
            for r in self.piece_roots(p, value):
                if a - _EDGE_TOL <= r <= b + _EDGE_TOL:
                    sols.append(min(max(r, a), b))
        sols.sort()
        dedup = []
        for s in sols:
            if not dedup or s - dedup[-1] > 1e-12:
                dedup.append(s)
        return dedup

    def minimum_candidates(self) -> list[tuple[float, float]]:
        """Candidate global-minimum locations: critical points and endpoints.

        Returns (x, f(x)) pairs sorted by value.  For an unbounded last piece
        only its critical points and start contribute; a piece decreasing
        toward +inf makes f unbounded below, which callers detect by the
        absence of any candidate beating the tail (handled downstream).
        """
        cands: list[tuple[float, float]] = []
        seen: list[float] = []

        def push(x: float):
            for s in seen:
                if abs(x - s) <= 1e-12 * max(1.0, abs(x)):
                    return
            seen.append(x)
            cands.append((x, float(self(x))))

        for p in self.pieces:
            push(p.a)
            if math.isfinite(p.b):
                push(p.b)
            dc = np.trim_zeros(
                np.polynomial.polynomial.polyder(np.asarray(p.coeffs, dtype=float)), "b")
            if dc.size <= 1:
                continue
            scale = max(abs(p.a), abs(p.b) if math.isfinite(p.b) else abs(p.a) + 1.0, 1.0)
            for r in np.polynomial.polynomial.polyroots(dc):
                if abs(r.imag) > 1e-9 * max(1.0, abs(r.real)):
                    continue
                xr = float(r.real)
                if p.a - 1e-10 * scale <= xr <= p.b + 1e-10 * scale:
                    push(max(p.a, min(xr, p.b)))
        cands.sort(key=lambda c: c[1])
        return cands

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        def num(v):
            return "inf" if math.isinf(v) else v
        return {
            "pieces": [{"a": p.a, "b": num(p.b), "coeffs": list(p.coeffs)} for p in self.pieces],
            "outside": num(self.outside),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseFunction":
        try:
            pieces = [Piece(float(p["a"]),
                            math.inf if p["b"] == "inf" else float(p["b"]),
                            tuple(float(c) for c in p["coeffs"]))
                      for p in d["pieces"]]
            outside = d.get("outside", "inf")
            outside = math.inf if outside == "inf" else float(outside)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed function JSON: {exc}") from exc
        return cls(pieces, outside)

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseFunction":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed function JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise InputError("function JSON must be an object")
        return cls.from_dict(d)

    def __repr__(self):
        return f"PiecewiseFunction({len(self.pieces)} pieces, outside={self.outside})"
