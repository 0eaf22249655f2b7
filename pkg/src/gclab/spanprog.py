"""Span program core: representation, classification, exact witnesses.

A span program is a finite-dimensional real state space with a free
subspace K, an input-dependent subspace H(x), and a nonzero initial vector
w0 orthogonal to K.  An input is positive when w0 lies in K + H(x).

Witnesses are computed exactly:

* positive: the min-norm w in H(x) with w - w0 in K, solved as a min-norm
  least-squares problem over H(x)-coordinates;
* negative: the closed-form q / ||q||^2 where q projects w0 onto
  K-perp ∩ H(x)-perp; its size is 1 / ||q||^2.

Exactly one of the two is feasible for every input; the infeasible side
reports size inf.

Domains may be lazy: ``hx`` can be a function of the input label, so
exponentially large domains never require a stored table.  ``complexity``
therefore always takes an explicit input list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import (
    as_matrix,
    complement_basis,
    orthonormal_columns,
    projector,
    residual_norm,
)

INF = math.inf

#: residual tolerance for membership / feasibility decisions, relative to ||w0||
FEAS_RTOL = 1e-9

_CACHE_CAP = 512


class SpanProgramError(ValueError):
    pass


class SpanProgram:
    """(dim, x -> H(x), K, w0) with cached orthonormal bases.

    ``hx`` is either a dict {label: generator matrix} or a callable
    label -> generator matrix; generator columns span H(x).  ``inputs`` is
    the explicit domain when one exists (None for lazy contracts).
    """

    def __init__(self, dim, w0, kgen=None, hx=None, inputs=None, name=None):
        self.dim = int(dim)
        self.w0 = np.asarray(w0, dtype=float).reshape(-1)
        if self.w0.shape[0] != self.dim:
            raise SpanProgramError("w0 length does not match dim")
        if np.linalg.norm(self.w0) == 0:
            raise SpanProgramError("w0 must be nonzero")
        self.kgen = as_matrix(kgen, self.dim)
        if hx is None:
            raise SpanProgramError("hx is required")
        self._hx = hx
        self.inputs = tuple(inputs) if inputs is not None else None
        self.name = name
        self._k_basis = None
        self._h_cache = {}
        kb = self.k_basis()
        if residual_norm(self.w0, complement_basis(kb, self.dim)) > FEAS_RTOL * np.linalg.norm(self.w0) * 10:
            raise SpanProgramError("w0 must be orthogonal to K")

    # -- cached bases ------------------------------------------------------
    def k_basis(self) -> np.ndarray:
        if self._k_basis is None:
            self._k_basis = orthonormal_columns(self.kgen)
        return self._k_basis

    def h_generators(self, x) -> np.ndarray:
        if callable(self._hx):
            return as_matrix(self._hx(x), self.dim)
        try:
            gen = self._hx[x]
        except KeyError:
            raise SpanProgramError(f"unknown input label {x!r}")
        return as_matrix(gen, self.dim)

    def h_basis(self, x) -> np.ndarray:
        key = x if isinstance(x, (str, int, tuple, frozenset, bytes, bool)) else None
        if key is not None and key in self._h_cache:
            return self._h_cache[key]
        basis = orthonormal_columns(self.h_generators(x))
        if key is not None:
            if len(self._h_cache) >= _CACHE_CAP:
                self._h_cache.clear()
            self._h_cache[key] = basis
        return basis

    def initial_norm_sq(self) -> float:
        return float(self.w0 @ self.w0)

    def __repr__(self):
        label = self.name or "SpanProgram"
        return f"<{label} dim={self.dim} |K|={self.k_basis().shape[1]}>"


@dataclass(frozen=True)
class WitnessReport:
    input: object
    sign: str  # "positive" | "negative"
    witness: object  # np.ndarray or None
    size: float
    feasible: bool


def _residual_scale(p: SpanProgram) -> float:
    return FEAS_RTOL * float(np.linalg.norm(p.w0))


def classify(p: SpanProgram, x) -> str:
    """"positive" iff w0 lies in K + H(x) (residual test)."""
    span = np.hstack([p.k_basis(), p.h_basis(x)])
    basis = orthonormal_columns(span)
    res = residual_norm(p.w0, basis)
    return "positive" if res <= max(_residual_scale(p), 1e-12) else "negative"


def positive_witness(p: SpanProgram, x) -> WitnessReport:
    """Min-norm w in H(x) with w - w0 in K; infeasible -> size inf."""
    hb = p.h_basis(x)
    if hb.shape[1] == 0:
        return WitnessReport(x, "positive", None, INF, False)
    kb = p.k_basis()
    # constraint: (I - P_K)(w - w0) = 0 with w = hb @ c and (I - P_K) w0 = w0;
    # the rank cutoff follows the package-wide relative threshold, otherwise
    # near-null directions of the constraint map distort the min-norm solve
    q = hb - kb @ (kb.T @ hb) if kb.shape[1] else hb
    c, *_ = np.linalg.lstsq(q, p.w0, rcond=FEAS_RTOL)
    resid = np.linalg.norm(q @ c - p.w0)
    if resid > max(_residual_scale(p), 1e-12):
        return WitnessReport(x, "positive", None, INF, False)
    w = hb @ c
    return WitnessReport(x, "positive", w, float(c @ c), True)


def negative_witness(p: SpanProgram, x) -> WitnessReport:
    """Closed-form min-norm vector in K-perp ∩ H(x)-perp with <w0|w> = 1."""
    joint = orthonormal_columns(np.hstack([p.k_basis(), p.h_basis(x)]))
    q = p.w0 - joint @ (joint.T @ p.w0) if joint.shape[1] else p.w0.copy()
    nq = float(q @ q)
    if nq <= (max(_residual_scale(p), 1e-12)) ** 2:
        return WitnessReport(x, "negative", None, INF, False)
    w = q / nq
    return WitnessReport(x, "negative", w, 1.0 / nq, True)


def witness_sizes(p: SpanProgram, x):
    """(w_plus, w_minus) with inf on the infeasible side."""
    pos = positive_witness(p, x)
    neg = negative_witness(p, x)
    return pos.size, neg.size


def scalar_multiply(p: SpanProgram, alpha: float) -> SpanProgram:
    """Scale the initial vector by sqrt(alpha); witnesses scale by alpha / 1/alpha."""
    if not alpha > 0:
        raise SpanProgramError("alpha must be positive")
    return SpanProgram(
        p.dim,
        math.sqrt(alpha) * p.w0,
        p.kgen,
        p._hx,
        inputs=p.inputs,
        name=f"{alpha}*{p.name}" if p.name else None,
    )


def negate(p: SpanProgram) -> SpanProgram:
    """Complement construction: H'(x) = H(x)^perp, K' = (K ⊕ w0)^perp, w0' = w0/||w0||^2."""
    kw = np.hstack([p.k_basis(), p.w0.reshape(-1, 1)])
    kprime = complement_basis(orthonormal_columns(kw), p.dim)
    w0p = p.w0 / float(p.w0 @ p.w0)

    def hx_neg(x, _p=p):
        return complement_basis(_p.h_basis(x), _p.dim)

    return SpanProgram(p.dim, w0p, kprime, hx_neg, inputs=p.inputs,
                       name=f"not({p.name})" if p.name else None)


def trivial(predicate, inputs=None, name=None) -> SpanProgram:
    """One-dimensional program: H(x) is the full space iff predicate(x)."""
    one = np.ones((1, 1))
    empty = np.zeros((1, 0))

    def hx(x):
        return one if predicate(x) else empty

    return SpanProgram(1, [1.0], None, hx, inputs=inputs, name=name or "trivial")


@dataclass(frozen=True)
class ComplexityReport:
    w_plus_max: float
    w_minus_max: float
    complexity: float
    has_positive: bool
    has_negative: bool


def complexity(p: SpanProgram, inputs) -> ComplexityReport:
    """Max witness sizes over the given inputs and C = sqrt(W+ * W-).

    A missing sign is reported as a 0-max with its flag cleared.
    """
    inputs = list(inputs)
    if not inputs:
        raise SpanProgramError("inputs must be nonempty")
    wp, wm = 0.0, 0.0
    has_p = has_n = False
    for x in inputs:
        if classify(p, x) == "positive":
            has_p = True
            wp = max(wp, positive_witness(p, x).size)
        else:
            has_n = True
            wm = max(wm, negative_witness(p, x).size)
    c = math.sqrt(wp * wm) if (has_p and has_n) else 0.0
    return ComplexityReport(wp, wm, c, has_p, has_n)


# -- JSON (explicit-domain form) ------------------------------------------

def program_to_json(p: SpanProgram) -> dict:
    if p.inputs is None:
        raise SpanProgramError("only explicit-domain programs serialize")
    return {
        "dim": p.dim,
        "w0": [float(v) for v in p.w0],
        "K": [[float(v) for v in col] for col in p.kgen.T],
        "inputs": {
            str(x): {"H": [[float(v) for v in col] for col in p.h_generators(x).T]}
            for x in p.inputs
        },
    }


def program_from_json(obj: dict) -> SpanProgram:
    dim = int(obj["dim"])
    kcols = obj.get("K", [])
    kgen = np.array(kcols, dtype=float).T if kcols else None
    table = {str(x): np.array(spec["H"], dtype=float).T if spec["H"] else np.zeros((dim, 0))
             for x, spec in obj["inputs"].items()}
    return SpanProgram(dim, obj["w0"], kgen, table, inputs=tuple(table))


def witness_to_json(rep: WitnessReport) -> dict:
    from ._util import json_number

    return {
        "input": str(rep.input),
        "sign": rep.sign,
        "witness": None if rep.witness is None else [float(v) for v in rep.witness],
        "size": json_number(rep.size),
        "feasible": rep.feasible,
    }
