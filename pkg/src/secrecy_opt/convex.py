"""Convex subproblem backends.

Two problem classes are served:

* :class:`SdpProblem` -- a linear objective over hermitian PSD blocks and
  nonnegative scalars with affine LMI / equality / inequality constraints.
  Solved by an interior-point PSD-cone backend (cvxopt conelp) on the exact
  real-symmetric embedding of the complex problem, with a cvxpy fallback.

* :class:`LogDetProblem` -- a concave sum of log-dets plus linear terms over
  trace-bounded PSD blocks.  Solved by projected gradient ascent with Armijo
  backtracking; no exponential-cone support needed.

Constraint and objective expressions are supplied as callables operating on
(blocks, scalars) with plain numpy semantics; since all expressions are
affine, their coefficients are extracted exactly by evaluating at basis
points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import SolverFailureError

Affine = Callable[..., np.ndarray]


# --- complex <-> real embedding -------------------------------------------

def embed_hermitian(a: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n embedding [[Re, -Im], [Im, Re]] of a hermitian
    n x n matrix; PSD-ness is preserved exactly in both directions."""
    re, im = np.real(a), np.imag(a)
    return np.block([[re, -im], [im, re]])


def deembed_hermitian(r: np.ndarray) -> np.ndarray:
    """Inverse of :func:`embed_hermitian` (averaging the redundant blocks)."""
    n = r.shape[0] // 2
    re = (r[:n, :n] + r[n:, n:]) / 2.0
    im = (r[n:, :n] - r[:n, n:]) / 2.0
    return re + 1j * im


# --- hermitian parameterization -------------------------------------------

def _hermitian_basis(n: int):
    """Real basis of the n x n hermitian matrices (n**2 elements)."""
    basis = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1j
            e[j, i] = -1j
            basis.append(e)
    return basis


@dataclass
class SdpProblem:
    """Linear-objective SDP over hermitian blocks and nonnegative scalars.

    ``objective`` is maximized.  Every callable receives ``(blocks, scalars)``
    where ``blocks`` is a list of hermitian numpy arrays and ``scalars`` a
    list of floats, and must be affine in them.  LMI expressions are
    hermitian-valued and constrained >= 0 (PSD); equalities are scalar == 0;
    inequalities are scalar <= 0.  Each hermitian block is itself constrained
    PSD and each scalar nonnegative.
    """

    block_shapes: list
    n_scalars: int
    objective: Affine
    lmi_constraints: list = field(default_factory=list)
    eq_constraints: list = field(default_factory=list)
    ineq_constraints: list = field(default_factory=list)


def _zeros_point(p: SdpProblem):
    return ([np.zeros((n, n), dtype=complex) for n in p.block_shapes],
            [0.0] * p.n_scalars)


def _basis_points(p: SdpProblem):
    """Yield (blocks, scalars) with exactly one basis element set."""
    for b, n in enumerate(p.block_shapes):
        for e in _hermitian_basis(n):
            blocks, scalars = _zeros_point(p)
            blocks[b] = e
            yield blocks, scalars
    for s in range(p.n_scalars):
        blocks, scalars = _zeros_point(p)
        scalars[s] = 1.0
        yield blocks, scalars


def _extract_affine(fun, p: SdpProblem):
    """Return (constant, [coefficient per parameter]) of an affine map."""
    f0 = np.asarray(fun(*_zeros_point(p)))
    coeffs = [np.asarray(fun(blocks, scalars)) - f0
              for blocks, scalars in _basis_points(p)]
    return f0, coeffs


def _vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=float).reshape(-1, order="F")


def _point_from_x(p: SdpProblem, x: np.ndarray):
    blocks = []
    pos = 0
    for n in p.block_shapes:
        q = np.zeros((n, n), dtype=complex)
        for e in _hermitian_basis(n):
            q = q + x[pos] * e
            pos += 1
        blocks.append(q)
    scalars = [float(v) for v in x[pos:]]
    return blocks, scalars


def solve_sdp(p: SdpProblem, accuracy: float = 1e-7):
    """Solve the SDP; returns (value, (blocks, scalars), status).

    status is one of 'optimal', 'infeasible', 'numerical-failure'; on
    numerical failure a SolverFailureError is raised carrying diagnostics.
    """
    import cvxopt
    import cvxopt.solvers

    m = sum(n * n for n in p.block_shapes) + p.n_scalars

    _, c_coeffs = _extract_affine(
        lambda blocks, scalars: np.real(p.objective(blocks, scalars)), p)
    c = -np.array([float(v) for v in c_coeffs])  # conelp minimizes

    # Linear cone: user inequalities plus nonnegativity of scalars.
    gl_rows, hl = [], []
    for fun in p.ineq_constraints:
        f0, coeffs = _extract_affine(
            lambda blocks, scalars, fun=fun: np.real(fun(blocks, scalars)), p)
        gl_rows.append([float(v) for v in coeffs])
        hl.append(-float(f0))
    offset = sum(n * n for n in p.block_shapes)
    for s in range(p.n_scalars):
        row = [0.0] * m
        row[offset + s] = -1.0
        gl_rows.append(row)
        hl.append(0.0)

    # PSD cones: block PSD-ness plus user LMIs, embedded to real symmetric.
    gs_mats, hs_mats, dims_s = [], [], []
    lmis = [
        (lambda blocks, scalars, b=b: blocks[b])
        for b in range(len(p.block_shapes))
    ] + list(p.lmi_constraints)
    for fun in lmis:
        f0, coeffs = _extract_affine(fun, p)
        h_emb = embed_hermitian(f0)
        g_cols = np.column_stack([-_vec(embed_hermitian(fi)) for fi in coeffs])
        gs_mats.append(g_cols)
        hs_mats.append(_vec(h_emb))
        dims_s.append(h_emb.shape[0])

    a_rows, b_vals = [], []
    for fun in p.eq_constraints:
        f0, coeffs = _extract_affine(
            lambda blocks, scalars, fun=fun: np.real(fun(blocks, scalars)), p)
        a_rows.append([float(v) for v in coeffs])
        b_vals.append(-float(f0))

    g = np.vstack([np.asarray(gl_rows).reshape(len(gl_rows), m)] + gs_mats) \
        if (gl_rows or gs_mats) else np.zeros((0, m))
    h = np.concatenate([np.asarray(hl)] + hs_mats) if (hl or hs_mats) \
        else np.zeros(0)
    a = np.asarray(a_rows).reshape(len(a_rows), m)
    b = np.asarray(b_vals)

    options = {"show_progress": False, "reltol": accuracy,
               "abstol": accuracy, "feastol": 1e-8, "maxiters": 200}
    dims = {"l": len(gl_rows), "q": [], "s": dims_s}
    try:
        sol = cvxopt.solvers.conelp(
            cvxopt.matrix(c), cvxopt.matrix(g), cvxopt.matrix(h), dims,
            cvxopt.matrix(a), cvxopt.matrix(b), options=options)
    except (ZeroDivisionError, ValueError, ArithmeticError) as exc:
        sol = {"status": f"exception: {exc}", "x": None}

    status = sol.get("status", "unknown")
    if status == "optimal":
        x = np.array(sol["x"]).ravel()
        value = float(-c @ x)
        return value, _point_from_x(p, x), "optimal"
    if status == "primal infeasible":
        return -np.inf, _point_from_x(p, np.zeros(m)), "infeasible"

    # interior-point backend struggled; retry through cvxpy on the same data
    value, x, fb_status = _cvxpy_fallback(c, g, h, dims, a, b)
    if fb_status == "optimal":
        return value, _point_from_x(p, x), "optimal"
    if fb_status == "infeasible":
        return -np.inf, _point_from_x(p, np.zeros(m)), "infeasible"
    raise SolverFailureError(
        "SDP solve failed", diagnostics={"conelp_status": status,
                                         "fallback_status": fb_status})


def _cvxpy_fallback(c, g, h, dims, a, b):
    import warnings

    import cvxpy as cp

    m = c.size
    x = cp.Variable(m)
    cons = []
    nl = dims["l"]
    if nl:
        cons.append(h[:nl] - g[:nl] @ x >= 0)
    pos = nl
    for d in dims["s"]:
        block = cp.reshape(h[pos: pos + d * d] - g[pos: pos + d * d] @ x,
                           (d, d), order="F")
        cons.append(block >> 0)
        pos += d * d
    if a.shape[0]:
        cons.append(a @ x == b)
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    for solver in ("CLARABEL", "SCS"):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prob.solve(solver=solver)
        except cp.error.SolverError:
            continue
        if prob.status in ("optimal", "optimal_inaccurate"):
            return float(-prob.value), np.asarray(x.value).ravel(), "optimal"
        if "infeasible" in (prob.status or ""):
            return -np.inf, None, "infeasible"
    return np.nan, None, "numerical-failure"


# --- concave log-det maximization -----------------------------------------

@dataclass
class LogDetTerm:
    """One concave piece log det(base + sum_b A_b Q_b A_b^H)."""

    base: np.ndarray
    factors: dict  # block index -> factor matrix A_b

    def argument(self, blocks) -> np.ndarray:
        arg = np.asarray(self.base, dtype=complex).copy()
        for b, a in self.factors.items():
            arg = arg + a @ blocks[b] @ a.conj().T
        return arg


@dataclass
class LogDetProblem:
    """Maximize sum of log-det terms plus Re tr(linear[b] @ Q_b) subject to
    each block PSD and a joint trace budget."""

    block_shapes: list
    logdet_terms: list
    linear: dict = field(default_factory=dict)  # block index -> coefficient
    trace_budget: float = 1.0


def _ldp_value(p: LogDetProblem, blocks):
    val = 0.0
    for term in p.logdet_terms:
        sign, logdet = np.linalg.slogdet(term.argument(blocks))
        if sign.real <= 0:
            return -np.inf
        val += logdet
    for b, coef in p.linear.items():
        val += float(np.real(np.trace(coef @ blocks[b])))
    return float(val)


def _ldp_gradient(p: LogDetProblem, blocks):
    grads = [np.zeros((n, n), dtype=complex) for n in p.block_shapes]
    for term in p.logdet_terms:
        inv = np.linalg.inv(term.argument(blocks))
        inv = (inv + inv.conj().T) / 2.0
        for b, a in term.factors.items():
            grads[b] = grads[b] + a.conj().T @ inv @ a
    for b, coef in p.linear.items():
        grads[b] = grads[b] + coef.conj().T
    return grads


def _project_blocks(blocks, budget):
    """Project onto {each block PSD, joint trace <= budget}: eigenvalue
    clipping followed by a water-level shift of the stacked eigenvalues."""
    eigs, vecs = [], []
    for q in blocks:
        w, v = np.linalg.eigh((q + q.conj().T) / 2.0)
        eigs.append(w)
        vecs.append(v)
    stacked = np.concatenate(eigs) if eigs else np.zeros(0)
    clipped = np.maximum(stacked, 0.0)
    if clipped.sum() > budget:
        # largest theta with sum max(lambda - theta, 0) == budget
        vals = np.sort(stacked)[::-1]
        csum = np.cumsum(vals)
        theta = 0.0
        for i in range(vals.size):
            theta = (csum[i] - budget) / (i + 1)
            if i + 1 == vals.size or vals[i + 1] <= theta:
                break
        clipped = np.maximum(stacked - theta, 0.0)
    out = []
    pos = 0
    for w, v in zip(eigs, vecs):
        lam = clipped[pos: pos + w.size]
        pos += w.size
        out.append((v * lam) @ v.conj().T)
    return out


def solve_logdet_max(p: LogDetProblem, tol: float = 1e-6,
                     init=None, max_iters: int = 200,
                     armijo_c: float = 1e-4, backtrack: float = 0.5):
    """Projected gradient ascent with Armijo backtracking.

    Returns (value, blocks, trace) where trace is the list of objective
    values per accepted iterate (monotone non-decreasing).  Hitting the
    iteration cap returns the best iterate found with a 'max-iterations'
    marker appended to the trace metadata via the returned status flag.
    """
    if init is None:
        blocks = [np.zeros((n, n), dtype=complex) for n in p.block_shapes]
    else:
        blocks = [np.asarray(q, dtype=complex).copy() for q in init]
        blocks = _project_blocks(blocks, p.trace_budget)

    value = _ldp_value(p, blocks)
    trace = [value]
    converged = False
    for _ in range(max_iters):
        grads = _ldp_gradient(p, blocks)
        step = 1.0
        accepted = False
        while step > 1e-12:
            cand = _project_blocks(
                [q + step * gq for q, gq in zip(blocks, grads)],
                p.trace_budget)
            gain_lin = sum(
                float(np.real(np.trace(gq.conj().T @ (cq - q))))
                for gq, cq, q in zip(grads, cand, blocks))
            cand_val = _ldp_value(p, cand)
            if cand_val >= value + armijo_c * gain_lin and np.isfinite(cand_val):
                accepted = True
                break
            step *= backtrack
        if not accepted:
            converged = True
            break
        improvement = cand_val - value
        blocks, value = cand, cand_val
        trace.append(value)
        if improvement <= tol * max(1.0, abs(value)):
            converged = True
            break
    return value, blocks, {"trace": trace, "converged": converged,
                           "iterations": len(trace) - 1}
