"""N-linear convolution functionals and the aggregate normal-form maps.

Two evaluation paths share the multiplier tables:

* ``lambda_apply`` — a generic, brute-force tuple sweep (the oracle path);
* cached *row groups* — per (radii, threshold, coefficients) we enumerate
  each multiplier's support once, canonically up to its argument symmetries,
  and keep only the rows where the (weighted) multiplier is nonzero.  A
  later evaluation at any time t is then a handful of vectorized gathers.

Orders 9 and 11 (and the five septic terms that arise as time derivatives
of lower-order boundary terms) are never enumerated at full arity: the
oscillation factor telescopes across the last-slot extension, so they
evaluate as an inner functional feeding one slot of an outer one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import cutoffs as X
from . import multipliers as mu
from .phase import PhaseParams, phase_mismatch
from .spectral import SolverConfig, SpectralField

_CHUNK = 2_000_000


class BudgetExceeded(RuntimeError):
    """The requested tuple sweep is larger than the configured budget."""

    def __init__(self, estimated: float, limit: float):
        super().__init__(
            f"estimated {estimated:.3g} tuples exceeds budget {limit:.3g}")
        self.estimated = estimated
        self.limit = limit


@dataclass(frozen=True)
class LambdaBudget:
    r3: int = 64
    r5: int = 16
    r7: int = 8
    max_tuples: float = 5e8
    chunk: int = _CHUNK


# ---------------------------------------------------------------------------
# generic brute-force path


def _as_field(f) -> SpectralField:
    if not isinstance(f, SpectralField):
        raise TypeError("fields must be SpectralField instances")
    return f


def lambda_apply(m: Callable, fields: Sequence[SpectralField], t: float,
                 params: PhaseParams, out_radius: int,
                 max_tuples: float = 5e8) -> SpectralField:
    """Weighted N-fold convolution with oscillation factor exp(-t*Phi).

    m receives a tuple of N integer arrays (one chunk of candidate tuples)
    and must return the multiplier values for those tuples.
    """
    fields = [_as_field(f) for f in fields]
    n = len(fields)
    radii = [f.K for f in fields]
    total = math.prod(2 * r + 1 for r in radii)
    if total > max_tuples:
        raise BudgetExceeded(total, max_tuples)
    out = np.zeros(2 * out_radius + 1, dtype=complex)
    arrays = [f.coeffs for f in fields]
    shape = tuple(2 * r + 1 for r in radii)
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(flat, shape)
        ks = tuple(ix.astype(np.int64) - r for ix, r in zip(idx, radii))
        prod = arrays[0][idx[0]].copy()
        for l in range(1, n):
            prod *= arrays[l][idx[l]]
        live = prod != 0
        if not live.any():
            continue
        ks = tuple(k[live] for k in ks)
        prod = prod[live]
        ksum = ks[0].copy()
        for k in ks[1:]:
            ksum = ksum + k
        inside = np.abs(ksum) <= out_radius
        if not inside.any():
            continue
        ks = tuple(k[inside] for k in ks)
        prod, ksum = prod[inside], ksum[inside]
        vals = np.asarray(m(tuple(k.astype(float) for k in ks)),
                          dtype=complex) * prod
        if t != 0.0:
            xi = phase_mismatch(ks, params)
            vals = vals * np.exp(-1j * t * np.asarray(xi, dtype=float))
        idx_out = (ksum + out_radius).astype(np.int64)
        out += np.bincount(idx_out, weights=vals.real,
                           minlength=out.size)
        out += 1j * np.bincount(idx_out, weights=vals.imag,
                                minlength=out.size)
    return SpectralField(out_radius, out)


# ---------------------------------------------------------------------------
# cached row groups (canonical enumeration up to argument symmetries)


def _canonical_block(radius: int, size: int):
    """Sorted tuples over [-radius, radius] and their orbit multiplicities."""
    modes = range(-radius, radius + 1)
    rows = np.array(list(combinations_with_replacement(modes, size)),
                    dtype=np.int32)
    if size == 1:
        return rows, np.ones(len(rows), dtype=np.int64)
    w = np.full(len(rows), math.factorial(size), dtype=np.int64)
    run = np.ones(len(rows), dtype=np.int64)
    for j in range(1, size):
        same = rows[:, j] == rows[:, j - 1]
        run = np.where(same, run + 1, 1)
        w //= np.where(same, run, 1)
    return rows, w


class _RowGroup:
    """Pruned support of a (sum of) multiplier(s) with equal-field blocks.

    cols[l] holds the l-th argument of each surviving canonical tuple;
    wm holds orbit-multiplicity * multiplier; xi the oscillation rate.
    """

    __slots__ = ("arity", "cols", "wm", "xi", "out_idx", "out_radius")

    def __init__(self, arity, cols, wm, xi, out_idx, out_radius):
        self.arity = arity
        self.cols = cols
        self.wm = wm
        self.xi = xi
        self.out_idx = out_idx
        self.out_radius = out_radius

    def evaluate(self, slot_arrays: Sequence[np.ndarray],
                 slot_offsets: Sequence[int], t: float,
                 out: np.ndarray) -> None:
        if self.wm.size == 0:
            return
        vals = self.wm * slot_arrays[0][self.cols[0] + slot_offsets[0]]
        for l in range(1, self.arity):
            vals = vals * slot_arrays[l][self.cols[l] + slot_offsets[l]]
        if t != 0.0:
            vals = vals * np.exp(-1j * t * self.xi)
        out += np.bincount(self.out_idx, weights=vals.real,
                           minlength=out.size)
        out += 1j * np.bincount(self.out_idx, weights=vals.imag,
                                minlength=out.size)


def _build_group(blocks: Tuple[Tuple[int, ...], ...],
                 block_radii: Sequence[int],
                 entries: Sequence[Tuple[Callable, Optional[Callable]]],
                 params: PhaseParams, out_radius: int,
                 max_tuples: float) -> _RowGroup:
    """Enumerate one block signature once and sum all entry multipliers.

    entries: (m, pregate) pairs; pregate must dominate m's support and is
    used to skip the expensive evaluation on dead rows.
    """
    arity = sum(len(b) for b in blocks)
    brows, bweights, sizes = [], [], []
    for b, r in zip(blocks, block_radii):
        rows, w = _canonical_block(r, len(b))
        brows.append(rows)
        bweights.append(w)
        sizes.append(len(rows))
    total = math.prod(sizes)
    if total > max_tuples:
        raise BudgetExceeded(total, max_tuples)

    keep_cols = [[] for _ in range(arity)]
    keep_wm, keep_xi, keep_out = [], [], []
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        bidx = np.unravel_index(flat, tuple(sizes))
        cols = [None] * arity
        weight = np.ones(flat.size, dtype=np.int64)
        for b, rows, w, ix in zip(blocks, brows, bweights, bidx):
            weight = weight * w[ix]
            sub = rows[ix]
            for j, slot in enumerate(b):
                cols[slot] = sub[:, j].astype(np.int64)
        ksum = cols[0].copy()
        for c in cols[1:]:
            ksum = ksum + c
        inside = np.abs(ksum) <= out_radius
        if not inside.any():
            continue
        cols = [c[inside] for c in cols]
        weight, ksum = weight[inside], ksum[inside]
        fks = tuple(c.astype(float) for c in cols)
        acc = np.zeros(ksum.size, dtype=complex)
        for m, pregate in entries:
            if pregate is None:
                acc += np.asarray(m(fks), dtype=complex)
            else:
                live = np.asarray(pregate(fks), dtype=float) != 0
                if live.any():
                    sub = tuple(k[live] for k in fks)
                    acc[live] += np.asarray(m(sub), dtype=complex)
        nz = acc != 0
        if not nz.any():
            continue
        cols = [c[nz] for c in cols]
        xi = np.asarray(phase_mismatch(tuple(cols), params), dtype=float)
        keep_xi.append(xi)
        keep_wm.append(acc[nz] * weight[nz])
        keep_out.append((ksum[nz] + out_radius).astype(np.int64))
        for l in range(arity):
            keep_cols[l].append(cols[l].astype(np.int32))

    def cat(parts, dtype):
        return (np.concatenate(parts) if parts
                else np.zeros(0, dtype=dtype))

    return _RowGroup(
        arity, [cat(p, np.int32) for p in keep_cols],
        cat(keep_wm, complex), cat(keep_xi, float),
        cat(keep_out, np.int64), out_radius)


# ---------------------------------------------------------------------------
# pregates: cheap dominating gates used to skip expensive multiplier rows


def _h1_any(ks, c: int):
    # nonzero only if some rearrangement can pass an H1-type separation test
    a = np.stack([np.abs(np.asarray(k, dtype=float)) for k in ks])
    a.sort(axis=0)
    return (c * a[-2] < a[-1]).astype(float)


def _pg_gt(L):
    return lambda ks: X.chi_gt(ks, L)


def _pg_le(L):
    return lambda ks: X.chi_le(ks, L)


def _pg_h1(ks):
    return X.chi_h1(ks)


def _pg_head_gate(L, n_head, greater):
    # gate on the leading sub-tuple with the trailing slots collapsed to
    # their sum, matching multiplier entries whose threshold cutoff acts on
    # extended arguments rather than on the full tuple
    def pre(ks):
        head = [np.abs(np.asarray(k, dtype=float)) for k in ks[:n_head]]
        head.append(np.abs(sum(np.asarray(k, dtype=float)
                                for k in ks[n_head:])))
        m = head[0]
        for h in head[1:]:
            m = np.maximum(m, h)
        return (m > L).astype(float) if greater else (m <= L).astype(float)

    return pre


# ---------------------------------------------------------------------------
# composite plans


@dataclass(frozen=True)
class CompositePlan:
    """[outer]_{ext1} [inner]_{ext2} product shape; the inner functional
    feeds the outer's last argument slot."""

    name: str
    outer_id: str
    outer_arity: int
    inner_id: str
    inner_arity: int

    def __post_init__(self):
        if (self.outer_id, self.inner_id) not in _VALID_PLANS:
            raise ValueError(f"no such composite shape {self.name!r}")


def _outer_multiplier(which: str, ctx: mu.MCtx) -> Callable:
    if which == "bdry3_gt":
        return lambda ks: (3 * mu._L_tilde_sum(3, (1, 2, 3, 4), ks, ctx)
                           * X.chi_gt(ks, ctx.L))
    if which == "bdry5_all_gt":
        return lambda ks: (5 * mu._L_tilde_sum(5, range(1, 9), ks, ctx)
                           * X.chi_gt(ks, ctx.L))
    if which == "bdry5_no2_gt":
        return lambda ks: (5 * mu._L_tilde_sum(5, (1, 3, 4, 5, 6, 7, 8),
                                               ks, ctx)
                           * X.chi_gt(ks, ctx.L))
    if which == "bdry5_2_gt":
        return lambda ks: (5 * mu._L_tilde(5, 2, ks, ctx)
                           * X.chi_gt(ks, ctx.L))
    if which == "bdry7_gt":
        return lambda ks: (7 * mu._L_tilde_sum(7, (1, 2), ks, ctx)
                           * X.chi_gt(ks, ctx.L))
    raise ValueError(f"unknown outer multiplier {which!r}")


def _inner_multiplier(which: str, ctx: mu.MCtx) -> Callable:
    if which == "quintic_coeff":
        return lambda ks: -mu.Q1_5(ks, ctx)
    if which == "cubic_res":
        return lambda ks: mu.Q_3(ks, ctx) * mu._sym3R3(ks)
    if which == "cubic_nonres":
        return lambda ks: -mu.Q_3(ks, ctx) * X.chi_nr1_3(ks)
    if which == "cubic_nonres_h":
        return lambda ks: (-mu.Q_3(ks, ctx) * X.chi_nr1_3(ks)
                           * (mu._sym3H22(ks) + X.chi_h3(ks)))
    raise ValueError(f"unknown inner multiplier {which!r}")


_VALID_PLANS = {
    ("bdry3_gt", "quintic_coeff"),      # septic, term 1
    ("bdry5_all_gt", "cubic_res"),      # septic, term 2
    ("bdry5_no2_gt", "cubic_nonres"),   # septic, terms 3+4
    ("bdry5_2_gt", "cubic_nonres_h"),   # septic, term 5
    ("bdry5_all_gt", "quintic_coeff"),  # 9-linear, term 1
    ("bdry7_gt", "cubic_res"),          # 9-linear, term 2
    ("bdry7_gt", "cubic_nonres"),       # 9-linear, term 3
    ("bdry7_gt", "quintic_coeff"),      # 11-linear
}

_G_PLANS = (
    CompositePlan("septic-1", "bdry3_gt", 3, "quintic_coeff", 5),
    CompositePlan("septic-2", "bdry5_all_gt", 5, "cubic_res", 3),
    CompositePlan("septic-3+4", "bdry5_no2_gt", 5, "cubic_nonres", 3),
    CompositePlan("septic-5", "bdry5_2_gt", 5, "cubic_nonres_h", 3),
    CompositePlan("9-linear-1", "bdry5_all_gt", 5, "quintic_coeff", 5),
    CompositePlan("9-linear-2", "bdry7_gt", 7, "cubic_res", 3),
    CompositePlan("9-linear-3", "bdry7_gt", 7, "cubic_nonres", 3),
    CompositePlan("11-linear-1", "bdry7_gt", 7, "quintic_coeff", 5),
)

_OUTER_PREGATE_H1 = {"bdry5_2_gt": 8 ** 3, "bdry7_gt": 8 ** 5}


def lambda_composite(plan: CompositePlan, fields: Sequence[SpectralField],
                     t: float, params: PhaseParams, out_radius: int,
                     clamp_inner: bool = True, coeffs=None, L: float = 1.0,
                     max_tuples: float = 5e8) -> SpectralField:
    """Evaluate the extended-product functional via the telescoping split:
    the inner functional (with its own oscillation factor) becomes the last
    field of the outer one.  With clamp_inner the intermediate field is cut
    at out_radius (Galerkin convention); without, the result equals the
    direct full-arity sweep exactly.
    """
    ctx = _float_ctx_from(params, coeffs, L)
    return _composite_raw(
        _outer_multiplier(plan.outer_id, ctx), plan.outer_arity,
        _inner_multiplier(plan.inner_id, ctx), plan.inner_arity,
        fields, t, params, out_radius, clamp_inner, max_tuples)


def _composite_raw(outer: Callable, n_out: int, inner: Callable, n_in: int,
                   fields, t, params, out_radius, clamp_inner, max_tuples):
    if len(fields) != n_out - 1 + n_in:
        raise ValueError("field count does not match the plan's arity")
    inner_fields = fields[n_out - 1:]
    r_in = out_radius if clamp_inner else sum(f.K for f in inner_fields)
    w = lambda_apply(inner, inner_fields, t, params, r_in, max_tuples)
    return lambda_apply(outer, list(fields[: n_out - 1]) + [w], t, params,
                        out_radius, max_tuples)


def _float_ctx_from(params: PhaseParams, coeffs=None, L=1.0) -> mu.MCtx:
    if coeffs is None:
        # phase-only context: gamma enters through params
        return mu.MCtx(gamma=float(params.gamma), e1=float(params.e1),
                       L=float(L))
    return mu.MCtx(alpha=float(coeffs.alpha), beta=float(coeffs.beta),
                   gamma=float(coeffs.gamma), delta=float(coeffs.delta),
                   e1=float(params.e1), L=float(L))


# ---------------------------------------------------------------------------
# the aggregate maps F and G: cached table groups


class _PlanGroups:
    __slots__ = ("plan", "inner_group", "outer_group")

    def __init__(self, plan, inner_group, outer_group):
        self.plan = plan
        self.inner_group = inner_group
        self.outer_group = outer_group


class _Tables:
    """All row groups for one (K, K5, K7, L, params, coeffs) combination."""

    def __init__(self, K: int, K5: int, K7: int, L: float,
                 params: PhaseParams, coeffs, max_tuples: float):
        self.K = K
        ctx = _float_ctx_from(params, coeffs, L)
        rad = {3: K, 5: K5, 7: K7}
        gt, le = _pg_gt(L), _pg_le(L)

        def build(blocks, vrad, entries, wrad=None):
            radii = [vrad] * len(blocks)
            if wrad is not None:
                radii[-1] = wrad
            return _build_group(blocks, radii, entries, params, K,
                                max_tuples)

        # ---- F: divided multipliers above the threshold -------------------
        f_specs = {}
        h1_gated = {(3, 1), (5, 1), (5, 2), (5, 3), (5, 4), (5, 5), (5, 6),
                    (7, 1), (7, 2)}
        for (N, i), blocks in mu._L_BLOCKS.items():
            pre = ((lambda ks: gt(ks) * _pg_h1(ks))
                   if (N, i) in h1_gated else gt)
            m = _bind_L(ctx, N, i, X.chi_gt)
            f_specs.setdefault((N, blocks), []).append((m, pre))
        self.f_groups = [build(blocks, rad[N], entries)
                         for (N, blocks), entries in f_specs.items()]

        # ---- G: direct terms ----------------------------------------------
        g_specs = {}

        def add(N, blocks, m, pre):
            g_specs.setdefault((N, blocks), []).append((m, pre))

        # boundary multipliers re-entering below the threshold, times Phi
        for (N, i), blocks in mu._L_BLOCKS.items():
            pre = ((lambda ks: le(ks) * _pg_h1(ks))
                   if (N, i) in h1_gated else le)
            add(N, blocks, _bind_L_phi(ctx, N, i), pre)
        # cubic flow multiplier
        add(3, mu._M_BLOCKS[(3, 1)], _bind_M(ctx, 3, 1), X.chi_r3)
        # quintic flow multipliers; the two cancelling pairs enter jointly
        gt_a3 = _pg_head_gate(L, 2, True)
        le_a3 = _pg_head_gate(L, 2, False)
        m5_pre = {2: X.chi_r1, 4: _pg_h1, 5: X.chi_r1,
                  6: gt_a3, 7: gt_a3, 8: gt_a3, 10: _pg_h1, 12: _pg_h1,
                  14: _pg_h1, 15: _pg_h1, 16: _pg_h1, 17: _pg_h1,
                  18: X.chi_nr11,
                  19: gt_a3, 20: le_a3, 21: gt_a3, 22: gt_a3, 23: gt_a3}
        for i in mu._M_INDEX[5]:
            if i in (1, 9, 11, 13):
                continue
            add(5, mu._M_BLOCKS[(5, i)], _bind_M(ctx, 5, i),
                m5_pre.get(i))
        add(5, mu._M_BLOCKS[(5, 1)],
            lambda ks: mu._joint_M1_M9_5(ks, ctx), _pg_h1)
        add(5, mu._M_BLOCKS[(5, 11)],
            lambda ks: mu._joint_M11_M13_5(ks, ctx), _pg_h1)
        # septic flow multipliers with a closed pointwise form
        gt_a5 = _pg_head_gate(L, 4, True)
        le_a5 = _pg_head_gate(L, 4, False)
        m7_pre = {6: _pg_h1, 7: _pg_h1, 8: _pg_h1, 9: _pg_h1,
                  10: X.chi_nr11, 11: gt_a5, 12: le_a5, 13: X.chi_nr12,
                  14: gt_a5, 15: X.chi_nr22}
        for i in range(6, 16):
            add(7, mu._M_BLOCKS[(7, i)], _bind_M(ctx, 7, i), m7_pre[i])
        self.g_groups = [build(blocks, rad[N], entries)
                         for (N, blocks), entries in g_specs.items()]

        # ---- G: composite terms -------------------------------------------
        inner_groups, outer_groups = {}, {}
        self.plan_groups = []
        for plan in _G_PLANS:
            if plan.inner_id not in inner_groups:
                n = plan.inner_arity
                inner_groups[plan.inner_id] = build(
                    (tuple(range(n)),), K7,
                    [(_inner_multiplier(plan.inner_id, ctx), None)])
            if plan.outer_id not in outer_groups:
                n = plan.outer_arity
                c = _OUTER_PREGATE_H1.get(plan.outer_id)
                pre = (gt if c is None
                       else (lambda ks, c=c: gt(ks) * _h1_any(ks, c)))
                outer_groups[plan.outer_id] = build(
                    (tuple(range(n - 1)), (n - 1,)), K7,
                    [(_outer_multiplier(plan.outer_id, ctx), pre)],
                    wrad=K)
            self.plan_groups.append(_PlanGroups(
                plan, inner_groups[plan.inner_id],
                outer_groups[plan.outer_id]))

    def eval_F(self, varr: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros(2 * self.K + 1, dtype=complex)
        offs = [self.K] * 8
        for g in self.f_groups:
            g.evaluate([varr] * g.arity, offs, t, out)
        return out

    def eval_G(self, varr: np.ndarray, t: float) -> np.ndarray:
        out = np.zeros(2 * self.K + 1, dtype=complex)
        offs = [self.K] * 8
        for g in self.g_groups:
            g.evaluate([varr] * g.arity, offs, t, out)
        for pg in self.plan_groups:
            w = np.zeros(2 * self.K + 1, dtype=complex)
            pg.inner_group.evaluate([varr] * pg.inner_group.arity, offs,
                                    t, w)
            n = pg.outer_group.arity
            pg.outer_group.evaluate([varr] * (n - 1) + [w], offs, t, out)
        return out


def _bind_L(ctx, N, i, gate):
    return lambda ks: mu._L_DISPATCH[N](i, ks, ctx) * gate(ks, ctx.L)


def _bind_L_phi(ctx, N, i):
    def m(ks):
        rate = np.asarray(mu.xiphi(ks, ctx), dtype=float)
        return (mu._L_DISPATCH[N](i, ks, ctx) * (1j * rate)
                * X.chi_le(ks, ctx.L))
    return m


def _bind_M(ctx, N, i):
    return lambda ks: mu._M_DISPATCH[N](i, ks, ctx)


_TABLE_CACHE: dict = {}


def _tables_for(K: int, config: SolverConfig, params: PhaseParams,
                coeffs) -> _Tables:
    K5, K7 = min(K, config.quintic_radius), min(K, config.septic_radius)
    L = float(config.nf_threshold)
    key = (K, K5, K7, L, float(coeffs.alpha), float(coeffs.beta),
           float(coeffs.gamma), float(coeffs.delta), float(params.e1),
           float(config.max_tuples))
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = _Tables(K, K5, K7, L, params, coeffs,
                                    config.max_tuples)
    return _TABLE_CACHE[key]


def eval_F(vhat: SpectralField, t: float, config: SolverConfig,
           params: PhaseParams, coeffs) -> SpectralField:
    """Boundary correction F of the normal-form decomposition."""
    tb = _tables_for(vhat.K, config, params, coeffs)
    return SpectralField(vhat.K, tb.eval_F(vhat.coeffs, t))


def eval_G(vhat: SpectralField, t: float, config: SolverConfig,
           params: PhaseParams, coeffs) -> SpectralField:
    """Flow part G: d/dt (vhat + F(vhat)) = G(vhat)."""
    tb = _tables_for(vhat.K, config, params, coeffs)
    return SpectralField(vhat.K, tb.eval_G(vhat.coeffs, t))


# ---------------------------------------------------------------------------
# interaction-representation right-hand side


_RHS_CACHE: dict = {}


def eval_rhs_fourier(vhat: SpectralField, t: float, params: PhaseParams,
                     coeffs, quintic_radius: Optional[int] = None,
                     max_tuples: float = 5e8) -> SpectralField:
    """d/dt vhat for the renormalized flow in interaction variables:
    non-resonant cubic + resonant cubic + quintic coefficient terms."""
    K = vhat.K
    qrad = K if quintic_radius is None else min(K, quintic_radius)
    ctx = _float_ctx_from(params, coeffs)
    key = (K, qrad, float(coeffs.alpha), float(coeffs.beta),
           float(coeffs.gamma), float(coeffs.delta), float(params.e1))
    if key not in _RHS_CACHE:
        cubic = _build_group(
            ((0, 1, 2),), [K],
            [(lambda ks: mu.Q_3(ks, ctx) * (mu._sym3R3(ks)
                                            - X.chi_nr1_3(ks)), None)],
            params, K, max_tuples)
        quintic = _build_group(
            ((0, 1, 2, 3, 4),), [qrad],
            [(lambda ks: -mu.Q1_5(ks, ctx), None)],
            params, K, max_tuples)
        _RHS_CACHE[key] = (cubic, quintic)
    cubic, quintic = _RHS_CACHE[key]
    out = np.zeros(2 * K + 1, dtype=complex)
    offs = [K] * 5
    cubic.evaluate([vhat.coeffs] * 3, offs, t, out)
    quintic.evaluate([vhat.coeffs] * 5, offs, t, out)
    return SpectralField(K, out)
