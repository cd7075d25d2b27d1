"""Second-order backpropagation and Newton-type weight updates.

For one layer's weights the error has four Wirtinger Hessian blocks, of
which only two are independent when E is real: H_ww (rows index the
conjugate cogradient, columns the unconjugated weights) and H_wbar_w
(columns the conjugated weights).  Both admit layerwise recursions in
per-sample node-pair tables:

  * curvature[t, j, b] scales conj(x_i) x_a to build H_ww,
  * residual_curvature[t, j] (a diagonal) and conj_curvature[t, j, b]
    together scale conj(x_i) conj(x_a) to build H_wbar_w.

At the output layer the curvature and residual tables are diagonal and
the conjugate table vanishes, which makes both output-layer blocks block
diagonal with one block per output node.  The Newton update solves the
coupled system over (w, wbar); the pseudo-Newton update drops the
H_wbar_w coupling and solves only with H_ww.  Both updates solve on the
per-node diagonal blocks: exact at the output layer, and the only
well-posed choice at hidden layers, where the full matrix is singular
by rank counting whenever sample count times output width is below the
layer's weight count.
"""

from dataclasses import dataclass

import numpy as np

from .gradient import delta_hidden, delta_output
from .linalg import solve
from .network import forward

__all__ = [
    "curvature_output",
    "curvature_hidden",
    "residual_curvature_output",
    "residual_curvature_hidden",
    "conj_curvature_output",
    "conj_curvature_hidden",
    "assemble_h_ww",
    "assemble_h_wbar_w",
    "BackwardTables",
    "backward_tables",
    "hessian_pair",
    "newton_update",
    "pseudo_newton_update",
]


def _diag_embed(vals):
    n, k = vals.shape
    out = np.zeros((n, k, k), dtype=complex)
    idx = np.arange(k)
    out[:, idx, idx] = vals
    return out


def curvature_output(topology, trace):
    """(N, C, C) diagonal table g'(conj(net)) g'(net) at the output layer."""
    act = topology.activation(topology.n_layers)
    net = trace.nets[-1]
    return _diag_embed(act.d1(np.conj(net)) * act.d1(net))


def curvature_hidden(topology, trace, curv_next, w_next, p):
    """Propagate the H_ww table from layer p+1 back to layer p.

    Note the asymmetric derivative pair: the row side evaluates g' at the
    conjugated net sum, the column side at the unconjugated one.
    """
    act = topology.activation(p)
    net = trace.nets[p - 1]
    core = np.einsum("ab,tac,cd->tbd", np.conj(w_next), curv_next, w_next)
    return core * act.d1(np.conj(net))[:, :, None] * act.d1(net)[:, None, :]


def residual_curvature_output(topology, trace, targets):
    """(N, C) diagonal of the residual-weighted g'' table at the output."""
    act = topology.activation(topology.n_layers)
    return (trace.outputs - targets) * act.d2(np.conj(trace.nets[-1]))


def residual_curvature_hidden(topology, trace, delta_next, w_next, p):
    """(N, K_p) diagonal: backpropagated deltas times g'' at layer p."""
    act = topology.activation(p)
    return (delta_next @ np.conj(w_next)) * act.d2(np.conj(trace.nets[p - 1]))


def conj_curvature_output(topology, trace):
    """The off-diagonal H_wbar_w table is identically zero at the output."""
    n, c = trace.nets[-1].shape
    return np.zeros((n, c, c), dtype=complex)


def conj_curvature_hidden(topology, trace, conj_next, resid_next, w_next, p):
    """Propagate the H_wbar_w table from layer p+1 back to layer p.

    Both derivative factors evaluate g' at the conjugated net sums, and
    the diagonal residual table of layer p+1 feeds the off-diagonal
    entries of layer p through the conjugated weights.
    """
    act = topology.activation(p)
    wc = np.conj(w_next)
    core = np.einsum("ab,tac,cd->tbd", wc, conj_next, wc)
    core += np.einsum("ab,ta,ad->tbd", wc, resid_next, wc)
    d1c = act.d1(np.conj(trace.nets[p - 1]))
    return core * d1c[:, :, None] * d1c[:, None, :]


def assemble_h_ww(curv_p, trace, p):
    """H_ww[(j,i),(b,a)] = mean_t curvature[t,j,b] conj(x_i) x_a."""
    x = trace.values[p - 1]
    n = x.shape[0]
    h = np.einsum("tjb,ti,ta->jiba", curv_p, np.conj(x), x) / n
    size = curv_p.shape[1] * x.shape[1]
    return h.reshape(size, size)


def assemble_h_wbar_w(conj_curv_p, resid_curv_p, trace, p):
    """H_wbar_w[(j,i),(b,a)] = mean_t table[t,j,b] conj(x_i) conj(x_a)."""
    x = np.conj(trace.values[p - 1])
    n = x.shape[0]
    table = conj_curv_p + _diag_embed(resid_curv_p)
    h = np.einsum("tjb,ti,ta->jiba", table, x, x) / n
    size = table.shape[1] * x.shape[1]
    return h.reshape(size, size)


@dataclass
class BackwardTables:
    """Full backward sweep at fixed weights, one entry per layer (index p-1)."""

    topology: object
    trace: object
    deltas: list
    curvature: list
    residual_curvature: list
    conj_curvature: list


def backward_tables(topology, weights, dataset):
    """Run forward and backward passes without updating any weights."""
    trace = forward(topology, weights, dataset.inputs)
    ell = topology.n_layers
    deltas = [None] * ell
    curv = [None] * ell
    resid = [None] * ell
    cconj = [None] * ell
    deltas[ell - 1] = delta_output(topology, trace, dataset.targets)
    curv[ell - 1] = curvature_output(topology, trace)
    resid[ell - 1] = residual_curvature_output(topology, trace, dataset.targets)
    cconj[ell - 1] = conj_curvature_output(topology, trace)
    for p in range(ell - 1, 0, -1):
        w_next = weights[p]
        deltas[p - 1] = delta_hidden(topology, trace, deltas[p], w_next, p)
        curv[p - 1] = curvature_hidden(topology, trace, curv[p], w_next, p)
        resid[p - 1] = residual_curvature_hidden(topology, trace, deltas[p], w_next, p)
        cconj[p - 1] = conj_curvature_hidden(topology, trace, cconj[p], resid[p], w_next, p)
    return BackwardTables(topology, trace, deltas, curv, resid, cconj)


def hessian_pair(tables, p):
    h_ww = assemble_h_ww(tables.curvature[p - 1], tables.trace, p)
    h_wbar_w = assemble_h_wbar_w(
        tables.conj_curvature[p - 1], tables.residual_curvature[p - 1], tables.trace, p
    )
    return h_ww, h_wbar_w


def _node_slices(n, n_nodes):
    width = n // n_nodes
    return [slice(j * width, (j + 1) * width) for j in range(n_nodes)]


def newton_update(h_ww, h_wbar_w, cograd_conj, n_nodes=1):
    """Solve the coupled Newton system for the weight step, node by node.

    Eliminating the conjugate half of the stacked (w, wbar) system gives
    a Schur complement in the w block:

      (H_ww - H_wbar_w H_wbar_wbar^{-1} H_w_wbar) dw
          = H_wbar_w H_wbar_wbar^{-1} (dE/dwbar)* - (dE/dw)*

    with H_wbar_wbar = conj(H_ww) and H_w_wbar = conj(H_wbar_w) since E
    is real.  The system is solved on the per-node diagonal blocks.  At
    the output layer the off-node blocks are identically zero, so this
    is the whole system.  At a hidden layer feeding C output nodes the
    curvature table has rank at most C per sample, so the full H_ww is
    rank-deficient whenever N*C is below the weight count (a 2-4-1 net
    on 4 samples caps it at rank 3 of 8) and the full solve would reject
    every step; the diagonal blocks stay well conditioned.  Raises
    SingularMatrix if any block solve breaks down.
    """
    v = np.asarray(cograd_conj)
    dw = np.empty_like(v)
    for sl in _node_slices(v.size, n_nodes):
        a = h_ww[sl, sl]
        g = h_wbar_w[sl, sl]
        stacked = np.column_stack([np.conj(g), np.conj(v[sl])])
        sol = solve(np.conj(a), stacked)
        t, u = sol[:, :-1], sol[:, -1]
        schur = a - g @ t
        rhs = g @ u - v[sl]
        dw[sl] = solve(schur, rhs)
    return dw


def pseudo_newton_update(h_ww, cograd_conj, n_nodes=1):
    """Newton step with the conjugate coupling dropped: H_ww dw = -(dE/dw)*.

    Solved on the same per-node diagonal blocks as newton_update and for
    the same reason.
    """
    v = np.asarray(cograd_conj)
    dw = np.empty_like(v)
    for sl in _node_slices(v.size, n_nodes):
        dw[sl] = solve(h_ww[sl, sl], -v[sl])
    return dw
