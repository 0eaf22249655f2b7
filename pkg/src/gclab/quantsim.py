"""Exact state-vector verification of composed programs.

Everything here is dense complex linear algebra; probabilities are computed,
never sampled.  Three layers:

* reflections: the input reflection (per-edge block reflections through
  H^e(x)), the free-subspace reflection assembled from the per-edge free
  reflections and the circulation-space reflection, and the initial-vector
  preparation unitary;
* transducers: a two-subspace instance becomes the unitary
  U = (I - 2 P_R)(I (+) R_B)(I (+) R_A) on C^2 (+) H, with R spanned by
  |-> (+) -psi0; positive witnesses are -1 eigenvectors of U paired with
  |->, negative witnesses are +1 eigenvectors;
* the iterated algorithm: on C^K (x) C^2 (+) H, prepare the uniform
  |j>|0> state, run K rounds of the three reflections (round j reflects
  through the complement of |j>|-> (+) -(Wm/Wp)^(1/4) w0), and measure the
  qubit; the click probability decides the function value with probability
  at least 2/3 whenever the witness bounds are valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import decomp, graphcomp, netlab, spanprog
from ._linalg import projector

INF = math.inf

DEFAULT_MAX_K = 4096
DEFAULT_MAX_DIM = 4096


class SimulationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# reflections for a composition
# ---------------------------------------------------------------------------

@dataclass
class CompositionReflections:
    dim: int
    r_h: object  # callable x -> ndarray (dim x dim)
    r_k: np.ndarray
    c_w0: np.ndarray
    w0: np.ndarray
    edge_order: tuple
    offsets: tuple


def _block_reflection(dim, offsets, dims, blocks) -> np.ndarray:
    out = -np.eye(dim)
    for off, d, blk in zip(offsets, dims, blocks):
        out[off:off + d, off:off + d] = blk
    return out


def build_reflections(cg: graphcomp.CompositionGraph, x=None,
                      max_dim: int = DEFAULT_MAX_DIM) -> CompositionReflections:
    """Reflection operators of the composed program, as dense matrices.

    ``r_h`` is a function of the input (the only input-dependent part);
    ``r_k`` combines the per-edge free reflections with the circulation
    reflection of the derived network, and ``c_w0`` maps the first
    computational basis state to the normalized initial vector.
    """
    edges = cg.sorted_edges()
    progs = [cg.programs[eid].span_program() for eid, _, _ in edges]
    dims = [p.dim for p in progs]
    offsets = np.cumsum([0] + dims)
    dim = int(offsets[-1])
    if dim > max_dim:
        raise SimulationError(f"composed dimension {dim} exceeds the cap {max_dim}")

    emb = np.zeros((dim, len(edges)))
    for j, p in enumerate(progs):
        emb[offsets[j]:offsets[j] + dims[j], j] = p.w0 / math.sqrt(p.initial_norm_sq())

    rnet = cg.network({eid: p.initial_norm_sq() for (eid, _, _), p in zip(edges, progs)})
    rnet = netlab.ResistorNetwork(
        rnet.vertices, tuple(sorted(rnet.edges, key=lambda e: str(e.eid))), rnet.s, rnet.t)
    tree = decomp.auto_decompose(netlab.ResistorNetwork(rnet.vertices, rnet.edges))
    _, circ_proj = decomp.reflection_from_decomposition(
        netlab.ResistorNetwork(rnet.vertices, rnet.edges), tree)

    # reflection through the embedded circulation space, as a subspace of H
    circ_refl = 2.0 * (emb @ circ_proj @ emb.T) - np.eye(dim)
    per_edge_k = _block_reflection(
        dim, offsets, dims,
        [2.0 * projector(p.k_basis()) - np.eye(p.dim) for p in progs])
    r_k = -(per_edge_k @ circ_refl)

    flow, _ = netlab.min_energy_unit_flow(rnet)
    if flow is None:
        raise SimulationError("terminals disconnected under derived resistances")
    w0 = emb @ flow.vector(rnet)
    w0_hat = w0 / np.linalg.norm(w0)
    v = np.zeros(dim)
    v[0] = 1.0
    diff = v - w0_hat
    nd = np.linalg.norm(diff)
    if nd < 1e-14:
        c_w0 = np.eye(dim)
    else:
        diff = diff / nd
        c_w0 = np.eye(dim) - 2.0 * np.outer(diff, diff)

    def r_h(xx, _progs=progs, _offsets=offsets, _dims=dims, _dim=dim):
        return _block_reflection(
            _dim, _offsets, _dims,
            [2.0 * projector(p.h_basis(xx)) - np.eye(p.dim) for p in _progs])

    refl = CompositionReflections(dim, r_h, r_k, c_w0, w0, tuple(e[0] for e in edges),
                                  tuple(int(o) for o in offsets))
    if x is not None:
        refl.r_h = r_h  # callable form; callers evaluate at x
    return refl


def unitarity_defect(mat: np.ndarray) -> float:
    eye = np.eye(mat.shape[0])
    return float(np.linalg.norm(mat.conj().T @ mat - eye, 2))


def involution_defect(mat: np.ndarray) -> float:
    eye = np.eye(mat.shape[0])
    return float(np.linalg.norm(mat @ mat - eye, 2))


# ---------------------------------------------------------------------------
# two-subspace instances and transducers
# ---------------------------------------------------------------------------

@dataclass
class TwoSubspaceInstance:
    """dim, x -> (H_A basis, H_B basis, psi0) with psi0 orthogonal to H_B."""

    dim: int
    ha: object  # callable x -> generator matrix
    hb: object
    psi0: object  # callable x -> vector

    def parts(self, x):
        from ._linalg import as_matrix, orthonormal_columns

        a = orthonormal_columns(as_matrix(self.ha(x), self.dim))
        b = orthonormal_columns(as_matrix(self.hb(x), self.dim))
        v = np.asarray(self.psi0(x), dtype=float).reshape(-1)
        if b.shape[1] and np.linalg.norm(b.T @ v) > 1e-8 * np.linalg.norm(v):
            raise SimulationError("psi0 must be orthogonal to H_B")
        return a, b, v


def instance_from_program(p: spanprog.SpanProgram) -> TwoSubspaceInstance:
    """Span program as a two-subspace instance: H_A = H(x), H_B = K, psi0 = w0."""
    return TwoSubspaceInstance(
        p.dim,
        ha=lambda x: p.h_basis(x),
        hb=lambda x: p.k_basis(),
        psi0=lambda x: p.w0,
    )


_MINUS = np.array([1.0, -1.0]) / math.sqrt(2.0)


def to_transducer(inst: TwoSubspaceInstance, x) -> np.ndarray:
    """Unitary on C^2 (+) H implementing the sign computation.

    U = (I - 2 P_R) (I (+) R_B) (I (+) R_A), R = span{|-> (+) -psi0}.
    """
    a, b, psi0 = inst.parts(x)
    d = inst.dim
    full = 2 + d
    ra = np.eye(full, dtype=complex)
    ra[2:, 2:] = 2.0 * projector(a) - np.eye(d)
    rb = np.eye(full, dtype=complex)
    rb[2:, 2:] = 2.0 * projector(b) - np.eye(d)
    psi = np.zeros(full, dtype=complex)
    psi[:2] = _MINUS
    psi[2:] = -psi0
    psi = psi / np.linalg.norm(psi)
    refl = np.eye(full, dtype=complex) - 2.0 * np.outer(psi, psi.conj())
    return refl @ rb @ ra


def verify_transduction(u: np.ndarray, witness: np.ndarray, sign: str,
                        tol: float = 1e-9):
    """Check the eigen-relation: positive witnesses flip |->, negative fix it.

    Returns (ok, residual) for U(|-> (+) w) = -|-> (+) w (positive) or
    U(|-> (+) w) = |-> (+) w (negative).
    """
    d = u.shape[0] - 2
    w = np.asarray(witness, dtype=complex).reshape(-1)
    if w.shape[0] != d:
        raise SimulationError("witness dimension mismatch")
    vin = np.concatenate([_MINUS.astype(complex), w])
    vout = u @ vin
    if sign == "positive":
        expect = np.concatenate([-_MINUS.astype(complex), w])
    elif sign == "negative":
        expect = vin
    else:
        raise SimulationError("sign must be positive/negative")
    resid = float(np.linalg.norm(vout - expect))
    return resid <= tol * max(1.0, np.linalg.norm(vin)), resid


# ---------------------------------------------------------------------------
# the iterated span program algorithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationResult:
    input: object
    iterations: int
    click_probability: float  # P(measuring the qubit in |1>)
    output: int
    success_probability: float  # P(output == true function value)
    true_value: int
    norm_defect: float

    def to_json(self) -> dict:
        return {
            "input": str(self.input),
            "K": self.iterations,
            "click_probability": self.click_probability,
            "output": self.output,
            "success_probability": self.success_probability,
            "true_value": self.true_value,
            "norm_defect": self.norm_defect,
        }


def run_algorithm1(cg: graphcomp.CompositionGraph, w_plus: float, w_minus: float, x,
                   max_k: int = DEFAULT_MAX_K, max_dim: int = DEFAULT_MAX_DIM) -> SimulationResult:
    """Exact simulation of the iterated reflection algorithm.

    ``w_plus``/``w_minus`` are caller-supplied upper bounds on the composed
    witness sizes; the iteration count is K = ceil(18 sqrt(W+ W-)).  The
    state space is C^K (x) C^2 (+) H; the final measurement projects onto
    qubit value 1 (acting as 0 on the H summand).
    """
    if not (w_plus > 0 and w_minus > 0):
        raise SimulationError("witness bounds must be positive")
    k = max(1, math.ceil(18.0 * math.sqrt(w_plus * w_minus)))
    if k > max_k:
        raise SimulationError(f"K={k} exceeds the cap {max_k}")
    refl = build_reflections(cg, max_dim=max_dim)
    dh = refl.dim
    if 2 * k + dh > max_dim:
        raise SimulationError(f"state dimension {2 * k + dh} exceeds the cap {max_dim}")

    r_h = refl.r_h(x).astype(complex)
    r_k = refl.r_k.astype(complex)
    beta = (w_minus / w_plus) ** 0.25

    # state layout: [j, qubit] at 2j + b for j < K, then the H block
    state = np.zeros(2 * k + dh, dtype=complex)
    state[0:2 * k:2] = 1.0 / math.sqrt(k)

    h_slice = slice(2 * k, 2 * k + dh)
    w0 = refl.w0.astype(complex)
    v_h = -beta * w0
    v_norm_sq = 1.0 + float(beta * beta * (refl.w0 @ refl.w0))

    for j in range(k):
        state[h_slice] = r_h @ state[h_slice]
        state[h_slice] = r_k @ state[h_slice]
        # reflection through the complement of |j>|-> (+) -beta*w0
        amp_minus = (state[2 * j] - state[2 * j + 1]) / math.sqrt(2.0)
        overlap = amp_minus + np.vdot(v_h, state[h_slice])
        coef = 2.0 * overlap / v_norm_sq
        state[2 * j] -= coef / math.sqrt(2.0)
        state[2 * j + 1] += coef / math.sqrt(2.0)
        state[h_slice] -= coef * v_h

    click = float(np.sum(np.abs(state[1:2 * k:2]) ** 2))
    true_val = 1 if graphcomp.classify_connectivity(cg, x) else 0
    output = 1 if click >= 0.5 else 0
    success = click if true_val == 1 else 1.0 - click
    defect = abs(float(np.linalg.norm(state)) - 1.0)
    return SimulationResult(x, k, click, output, success, true_val, defect)


# ---------------------------------------------------------------------------
# dual adversary feasibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdversaryReport:
    max_residual: float
    objective: float
    feasible: bool
    pair_count: int


def adversary_feasibility(p: spanprog.SpanProgram, inputs, f=None,
                          tol: float = 1e-8) -> AdversaryReport:
    """Witness vectors scaled by 1/sqrt(2) against reflection oracles.

    Checks <w_x| (I - O_x O_y) |w_y> = [f(x) != f(y)] for all ordered pairs,
    with O_x the reflection through H(x); reports the max constraint
    residual and the objective max ||w_x||^2.
    """
    inputs = list(inputs)
    data = {}
    for x in inputs:
        sign = spanprog.classify(p, x)
        fx = 1 if sign == "positive" else 0
        if f is not None and int(f(x)) != fx:
            raise SimulationError(f"program disagrees with f on {x!r}")
        rep = (spanprog.positive_witness(p, x) if fx else spanprog.negative_witness(p, x))
        if not rep.feasible:
            raise SimulationError(f"no witness for {x!r}")
        oracle = 2.0 * projector(p.h_basis(x)) - np.eye(p.dim)
        data[x] = (fx, rep.witness / math.sqrt(2.0), oracle)

    max_resid = 0.0
    for x in inputs:
        fx, wx, ox = data[x]
        for y in inputs:
            fy, wy, oy = data[y]
            val = float(wx @ wy - wx @ (ox @ (oy @ wy)))
            target = 1.0 if fx != fy else 0.0
            max_resid = max(max_resid, abs(val - target))
    objective = max(float(w @ w) for _, w, _ in data.values())
    return AdversaryReport(max_resid, objective, max_resid <= tol, len(inputs) ** 2)
