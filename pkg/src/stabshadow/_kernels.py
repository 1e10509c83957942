"""Compiled inner loops for bit-packed stabilizer arithmetic.

Everything here operates on LSB-first uint64 words (see :mod:`stabshadow.bits`)
and uses the counter-based splitmix64 stream from :mod:`stabshadow.rng`, so
results are bit-identical across platforms and across serial/parallel
execution.  Phase bookkeeping is mod 4 with the convention that a Pauli row
is ``i**phase`` times the Hermitian string built from {I, X, Y, Z} per qubit.
"""

from __future__ import annotations

import numpy as np
from llvmlite import ir
from numba import njit, prange, types
from numba.core import cgutils
from numba.extending import intrinsic

U64 = np.uint64
ONE = U64(1)
ZERO = U64(0)
FULL = U64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_SPLIT = U64(0x632BE59BD9B4E019)

_I_POW = np.array([1 + 0j, 1j, -1 + 0j, -1j], dtype=np.complex128)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _draw(seed, ctr):
    """Draw number ctr (0-based) of the stream with the given seed."""
    return _mix64(seed + U64(ctr + 1) * _GOLDEN)


@njit(cache=True, inline="always")
def _substream(seed, index):
    return _mix64(seed ^ _mix64(_SPLIT + U64(index)))


@intrinsic
def _pop64(typingctx, src):
    """Hardware popcount (llvm.ctpop.i64) returning int64."""
    if src not in (types.uint64, types.int64):
        return None
    sig = types.int64(types.uint64)

    def codegen(context, builder, signature, args):
        fnty = ir.FunctionType(ir.IntType(64), [ir.IntType(64)])
        fn = cgutils.get_or_insert_function(builder.module, fnty, "llvm.ctpop.i64")
        return builder.call(fn, [args[0]])

    return sig, codegen


# ---------------------------------------------------------------------------
# Pauli row algebra.  acc *= f with phase tracked mod 4 (i**phase times the
# Hermitian I/X/Y/Z string).  For two such rows:
#   ph(pq) = ph(p) + ph(q) + s(p) + s(q) + 2<p.z, q.x> - s(pq)   (mod 4)
# where s(v) = |v.x & v.z|.  When f is given in (-1)**r * X^a Z^b form the
# s(f) terms cancel and the update is ph + 2r + s(p) + 2<p.z, f.x> - s(pq).
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _mult_general(ax, az, aph, fxs, fzs, frow, fph, W):
    sa = np.int64(0)
    sf = np.int64(0)
    cz = np.int64(0)
    spq = np.int64(0)
    for w in range(W):
        axw = ax[w]
        azw = az[w]
        fxw = fxs[frow, w]
        fzw = fzs[frow, w]
        sa += _pop64(axw & azw)
        sf += _pop64(fxw & fzw)
        cz += _pop64(azw & fxw)
        nx = axw ^ fxw
        nz = azw ^ fzw
        spq += _pop64(nx & nz)
        ax[w] = nx
        az[w] = nz
    return (aph + fph + sa + sf + 2 * cz + 3 * spq) & 3


@njit(cache=True, inline="always")
def _mult_ximg(ax, az, aph, fxs, fzs, frow, rbit, W):
    """acc *= (-1)**rbit * (Hermitian string on support row frow of fxs/fzs)."""
    return _mult_general(ax, az, aph, fxs, fzs, frow, np.int64(2 * rbit), W)


@njit(cache=True, inline="always")
def _row_mult(xs, zs, ph, i, p, W):
    """Row i *= row p (rows of one tableau); returns nothing."""
    sa = np.int64(0)
    sf = np.int64(0)
    cz = np.int64(0)
    spq = np.int64(0)
    for w in range(W):
        axw = xs[i, w]
        azw = zs[i, w]
        fxw = xs[p, w]
        fzw = zs[p, w]
        sa += _pop64(axw & azw)
        sf += _pop64(fxw & fzw)
        cz += _pop64(azw & fxw)
        nx = axw ^ fxw
        nz = azw ^ fzw
        spq += _pop64(nx & nz)
        xs[i, w] = nx
        zs[i, w] = nz
    ph[i] = np.uint8((np.int64(ph[i]) + np.int64(ph[p]) + sa + sf + 2 * cz + 3 * spq) & 3)


# ---------------------------------------------------------------------------
# Clifford conjugation of packed Pauli rows via the generator images
#   U X_j U+ = (-1)^{r_j} X^{alpha_j} Z^{beta_j},
#   U Z_j U+ = (-1)^{s_j} X^{gamma_j} Z^{delta_j}.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _conjugate_rows(xs, zs, ph, n, W, al, be, ga, de, rv, sv, oxs, ozs, oph):
    R = xs.shape[0]
    accx = np.empty(W, np.uint64)
    accz = np.empty(W, np.uint64)
    for i in range(R):
        for w in range(W):
            accx[w] = ZERO
            accz[w] = ZERO
        aph = np.int64(ph[i])
        for j in range(n):
            wj = j >> 6
            mj = ONE << U64(j & 63)
            xj = (xs[i, wj] & mj) != ZERO
            zj = (zs[i, wj] & mj) != ZERO
            if xj:
                if zj:
                    aph += 1
                rbit = np.int64((rv[wj] >> U64(j & 63)) & ONE)
                aph = _mult_ximg(accx, accz, aph, al, be, j, rbit, W)
            if zj:
                sbit = np.int64((sv[wj] >> U64(j & 63)) & ONE)
                aph = _mult_ximg(accx, accz, aph, ga, de, j, sbit, W)
        for w in range(W):
            oxs[i, w] = accx[w]
            ozs[i, w] = accz[w]
        oph[i] = np.uint8(aph & 3)


# ---------------------------------------------------------------------------
# Z-basis measurement walk (Aaronson-Gottesman):
#   mode 0: sample every outcome (coins from the stream),
#   mode 1: outcomes forced from bbits; returns -1 branches on contradiction,
#   mode 2: deterministic walk taking 0 at every random branch.
# Returns (ctr, number of random branches) with -1 meaning probability 0.
# The tableau arrays are updated in place to the post-measurement state.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _measure_walk(xs, zs, ph, n, W, mode, bbits, seed, ctr):
    n2 = 2 * n
    sx = np.empty(W, np.uint64)
    sz = np.empty(W, np.uint64)
    nrand = 0
    for a in range(n):
        wa = a >> 6
        ma = ONE << U64(a & 63)
        p = -1
        for i in range(n, n2):
            if (xs[i, wa] & ma) != ZERO:
                p = i
                break
        if p >= 0:
            for i in range(n2):
                if i != p and i != p - n and (xs[i, wa] & ma) != ZERO:
                    _row_mult(xs, zs, ph, i, p, W)
            for w in range(W):
                xs[p - n, w] = xs[p, w]
                zs[p - n, w] = zs[p, w]
                xs[p, w] = ZERO
                zs[p, w] = ZERO
            ph[p - n] = ph[p]
            zs[p, wa] = ma
            if mode == 0:
                out = np.int64(_draw(seed, ctr) >> U64(63))
                ctr += 1
            elif mode == 1:
                out = np.int64((bbits[wa] >> U64(a & 63)) & ONE)
            else:
                out = np.int64(0)
            if mode != 1:
                if out:
                    bbits[wa] |= ma
                else:
                    bbits[wa] &= ~ma
            ph[p] = np.uint8(2 * out)
            nrand += 1
        else:
            for w in range(W):
                sx[w] = ZERO
                sz[w] = ZERO
            sph = np.int64(0)
            for k in range(n):
                if (xs[k, wa] & ma) != ZERO:
                    sph = _mult_general(sx, sz, sph, xs, zs, n + k, np.int64(ph[n + k]), W)
            out = (sph >> 1) & 1
            if mode == 1:
                if np.int64((bbits[wa] >> U64(a & 63)) & ONE) != out:
                    return ctr, -1
            else:
                if out:
                    bbits[wa] |= ma
                else:
                    bbits[wa] &= ~ma
    return ctr, nrand


# ---------------------------------------------------------------------------
# Koenig-Smolin uniform symplectic sampling, iterative over levels j = 1..n.
# Vectors are packed Pauli supports (x, z); level j acts on qubits [n-j, n).
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _symp_inner_vec(ax, az, bx, bz, w0, W):
    # parity(|a.x & b.z| + |a.z & b.x|) = parity(|(a.x & b.z) ^ (a.z & b.x)|)
    t = np.int64(0)
    for w in range(w0, W):
        t += _pop64((ax[w] & bz[w]) ^ (az[w] & bx[w]))
    return t & 1


@njit(cache=True, inline="always")
def _transvect_vec(vx, vz, kx, kz, w0, W):
    if _symp_inner_vec(kx, kz, vx, vz, w0, W):
        for w in range(w0, W):
            vx[w] ^= kx[w]
            vz[w] ^= kz[w]


@njit(cache=True)
def _transvect_rows4(Gx, Gz, r0, n2, k1x, k1z, k2x, k2z, k3x, k3z, k4x, k4z, w0, W):
    """Apply Z_k4 Z_k3 Z_k2 Z_k1 to rows r0..n2-1 in one fused pass.

    The conditions of the later transvections are corrected by the pairwise
    inner products of the k's, so one read pass over each row suffices.
    """
    a21 = _symp_inner_vec(k2x, k2z, k1x, k1z, w0, W)
    a31 = _symp_inner_vec(k3x, k3z, k1x, k1z, w0, W)
    a32 = _symp_inner_vec(k3x, k3z, k2x, k2z, w0, W)
    a41 = _symp_inner_vec(k4x, k4z, k1x, k1z, w0, W)
    a42 = _symp_inner_vec(k4x, k4z, k2x, k2z, w0, W)
    a43 = _symp_inner_vec(k4x, k4z, k3x, k3z, w0, W)
    for r in range(r0, n2):
        t1 = np.int64(0)
        t2 = np.int64(0)
        t3 = np.int64(0)
        t4 = np.int64(0)
        for w in range(w0, W):
            vx = Gx[r, w]
            vz = Gz[r, w]
            t1 += _pop64((k1x[w] & vz) ^ (k1z[w] & vx))
            t2 += _pop64((k2x[w] & vz) ^ (k2z[w] & vx))
            t3 += _pop64((k3x[w] & vz) ^ (k3z[w] & vx))
            t4 += _pop64((k4x[w] & vz) ^ (k4z[w] & vx))
        c1 = t1 & 1
        c2 = (t2 & 1) ^ (c1 & a21)
        c3 = (t3 & 1) ^ (c1 & a31) ^ (c2 & a32)
        c4 = (t4 & 1) ^ (c1 & a41) ^ (c2 & a42) ^ (c3 & a43)
        if c1:
            for w in range(w0, W):
                Gx[r, w] ^= k1x[w]
                Gz[r, w] ^= k1z[w]
        if c2:
            for w in range(w0, W):
                Gx[r, w] ^= k2x[w]
                Gz[r, w] ^= k2z[w]
        if c3:
            for w in range(w0, W):
                Gx[r, w] ^= k3x[w]
                Gz[r, w] ^= k3z[w]
        if c4:
            for w in range(w0, W):
                Gx[r, w] ^= k4x[w]
                Gz[r, w] ^= k4z[w]


@njit(cache=True)
def _find_transvection(xx, xz, yx, yz, q0, n, W, t0x, t0z, t1x, t1z, zx, zz):
    """Fill (t0, t1) with transvections mapping x to y (Koenig-Smolin Lemma 2)."""
    for w in range(W):
        t0x[w] = ZERO
        t0z[w] = ZERO
        t1x[w] = ZERO
        t1z[w] = ZERO
        zx[w] = ZERO
        zz[w] = ZERO
    eq = True
    for w in range(W):
        if xx[w] != yx[w] or xz[w] != yz[w]:
            eq = False
            break
    if eq:
        return
    if _symp_inner_vec(xx, xz, yx, yz, 0, W) == 1:
        for w in range(W):
            t0x[w] = xx[w] ^ yx[w]
            t0z[w] = xz[w] ^ yz[w]
        return
    found = False
    for q in range(q0, n):
        wq = q >> 6
        mq = ONE << U64(q & 63)
        if ((xx[wq] | xz[wq]) & mq) != ZERO and ((yx[wq] | yz[wq]) & mq) != ZERO:
            zxb = (xx[wq] ^ yx[wq]) & mq
            zzb = (xz[wq] ^ yz[wq]) & mq
            if zxb == ZERO and zzb == ZERO:
                zzb = mq
                if ((xx[wq] & mq) != ZERO) != ((xz[wq] & mq) != ZERO):
                    zxb = mq
            zx[wq] |= zxb
            zz[wq] |= zzb
            found = True
            break
    if not found:
        for q in range(q0, n):
            wq = q >> 6
            mq = ONE << U64(q & 63)
            if ((xx[wq] | xz[wq]) & mq) != ZERO and ((yx[wq] | yz[wq]) & mq) == ZERO:
                xb = (xx[wq] & mq) != ZERO
                zb = (xz[wq] & mq) != ZERO
                if xb == zb:
                    zz[wq] |= mq
                else:
                    if xb:
                        zz[wq] |= mq
                    if zb:
                        zx[wq] |= mq
                break
        for q in range(q0, n):
            wq = q >> 6
            mq = ONE << U64(q & 63)
            if ((xx[wq] | xz[wq]) & mq) == ZERO and ((yx[wq] | yz[wq]) & mq) != ZERO:
                xb = (yx[wq] & mq) != ZERO
                zb = (yz[wq] & mq) != ZERO
                if xb == zb:
                    zz[wq] |= mq
                else:
                    if xb:
                        zz[wq] |= mq
                    if zb:
                        zx[wq] |= mq
                break
    for w in range(W):
        t0x[w] = xx[w] ^ zx[w]
        t0z[w] = xz[w] ^ zz[w]
        t1x[w] = yx[w] ^ zx[w]
        t1z[w] = yz[w] ^ zz[w]


@njit(cache=True, inline="always")
def _fill_bits_range(vec, q0, q1, W, seed, ctr):
    """Random bits on positions [q0, q1), zero elsewhere; returns new ctr."""
    w0 = q0 >> 6
    for w in range(w0):
        vec[w] = ZERO
    for w in range(w0, W):
        v = _draw(seed, ctr)
        ctr += 1
        lo = w << 6
        if q0 > lo:
            v &= FULL << U64(q0 - lo)
        if q1 < lo + 64:
            v &= FULL >> U64(lo + 64 - q1)
        vec[w] = v
    return ctr


@njit(cache=True)
def _ks_symplectic(Gx, Gz, n, W, seed, ctr):
    """Fill rows 2j/2j+1 of G with uniformly random images of X_j/Z_j."""
    n2 = 2 * n
    for r in range(n2):
        for w in range(W):
            Gx[r, w] = ZERO
            Gz[r, w] = ZERO
    e1x = np.empty(W, np.uint64)
    e1z = np.empty(W, np.uint64)
    f1x = np.empty(W, np.uint64)
    f1z = np.empty(W, np.uint64)
    epx = np.empty(W, np.uint64)
    epz = np.empty(W, np.uint64)
    h0x = np.empty(W, np.uint64)
    h0z = np.empty(W, np.uint64)
    t0x = np.empty(W, np.uint64)
    t0z = np.empty(W, np.uint64)
    t1x = np.empty(W, np.uint64)
    t1z = np.empty(W, np.uint64)
    zx = np.empty(W, np.uint64)
    zz = np.empty(W, np.uint64)
    bitsbuf = np.empty(2 * W, np.uint64)
    for j in range(1, n + 1):
        Q = n - j
        wQ = Q >> 6
        mQ = ONE << U64(Q & 63)
        Gx[2 * Q, wQ] |= mQ
        Gz[2 * Q + 1, wQ] |= mQ
        for w in range(W):
            e1x[w] = ZERO
            e1z[w] = ZERO
        e1x[wQ] = mQ
        while True:
            ctr = _fill_bits_range(f1x, Q, n, W, seed, ctr)
            ctr = _fill_bits_range(f1z, Q, n, W, seed, ctr)
            nz = False
            for w in range(wQ, W):
                if f1x[w] != ZERO or f1z[w] != ZERO:
                    nz = True
                    break
            if nz:
                break
        _find_transvection(e1x, e1z, f1x, f1z, Q, n, W, t0x, t0z, t1x, t1z, zx, zz)
        nb = 2 * j - 1
        nwb = (nb + 63) >> 6
        for w in range(nwb):
            bitsbuf[w] = _draw(seed, ctr)
            ctr += 1
        b0 = np.int64(bitsbuf[0] & ONE)
        for w in range(W):
            epx[w] = e1x[w]
            epz[w] = e1z[w]
        for c in range(2, 2 * j):
            bidx = c - 1
            if (bitsbuf[bidx >> 6] >> U64(bidx & 63)) & ONE:
                q = Q + (c >> 1)
                if c & 1:
                    epz[q >> 6] |= ONE << U64(q & 63)
                else:
                    epx[q >> 6] |= ONE << U64(q & 63)
        for w in range(W):
            h0x[w] = epx[w]
            h0z[w] = epz[w]
        _transvect_vec(h0x, h0z, t0x, t0z, wQ, W)
        _transvect_vec(h0x, h0z, t1x, t1z, wQ, W)
        if b0 == 1:
            for w in range(W):
                f1x[w] = ZERO
                f1z[w] = ZERO
        _transvect_rows4(Gx, Gz, 2 * Q, n2, t0x, t0z, t1x, t1z, h0x, h0z, f1x, f1z, wQ, W)
    return ctr


@njit(cache=True)
def _sample_clifford_fill(al, be, ga, de, rv, sv, n, W, seed, ctr):
    """Uniform (Gamma, r, s): symplectic part first, then the sign vectors."""
    n2 = 2 * n
    Gx = np.empty((n2, W), np.uint64)
    Gz = np.empty((n2, W), np.uint64)
    ctr = _ks_symplectic(Gx, Gz, n, W, seed, ctr)
    for j in range(n):
        for w in range(W):
            al[j, w] = Gx[2 * j, w]
            be[j, w] = Gz[2 * j, w]
            ga[j, w] = Gx[2 * j + 1, w]
            de[j, w] = Gz[2 * j + 1, w]
    ctr = _fill_bits_range(rv, 0, n, W, seed, ctr)
    ctr = _fill_bits_range(sv, 0, n, W, seed, ctr)
    return ctr


# ---------------------------------------------------------------------------
# Batched snapshot pipelines.  Snapshot i of a run always consumes sub-stream
# (run_seed, idx0 + i), so results are independent of thread scheduling and
# of how index ranges are partitioned across workers.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _snapshot_member(mem_xs, mem_zs, mem_ph, cum, sseed, ctr, n, W, xs, zs, ph, bb):
    """Sample member, Clifford-rotate, measure.  Returns (ctr, nrand, member)."""
    S = mem_xs.shape[0]
    k = 0
    if S > 1:
        u = _draw(sseed, ctr) / 1.8446744073709552e19  # 2**64
        ctr += 1
        for m in range(S):
            k = m
            if u < cum[m]:
                break
    al = np.empty((n, W), np.uint64)
    be = np.empty((n, W), np.uint64)
    ga = np.empty((n, W), np.uint64)
    de = np.empty((n, W), np.uint64)
    rv = np.empty(W, np.uint64)
    sv = np.empty(W, np.uint64)
    ctr = _sample_clifford_fill(al, be, ga, de, rv, sv, n, W, sseed, ctr)
    _conjugate_rows(mem_xs[k], mem_zs[k], mem_ph[k], n, W, al, be, ga, de, rv, sv, xs, zs, ph)
    for w in range(W):
        bb[w] = ZERO
    ctr, nrand = _measure_walk(xs, zs, ph, n, W, 0, bb, sseed, ctr)
    return ctr, nrand, k


@njit(cache=True, parallel=True)
def _batch_selftarget(xs0, zs0, ph0, n, W, N, run_seed, idx0, out_est, out_b):
    """Fidelity snapshots when the target equals the prepared pure state.

    The forced walk on the rotated target would retrace the sampling walk, so
    abs(<b|U|psi>)**2 is exactly 2**-(random branches) of the measurement.
    """
    n2 = 2 * n
    dim1 = 2.0**n + 1.0
    mem_xs = xs0.reshape(1, n2, W)
    mem_zs = zs0.reshape(1, n2, W)
    mem_ph = ph0.reshape(1, n2)
    cum = np.ones(1, np.float64)
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        xs = np.empty((n2, W), np.uint64)
        zs = np.empty((n2, W), np.uint64)
        ph = np.empty(n2, np.uint8)
        _c, nrand, _k = _snapshot_member(mem_xs, mem_zs, mem_ph, cum, sseed, 0, n, W, xs, zs, ph, out_b[i])
        out_est[i] = dim1 * 2.0 ** (-nrand) - 1.0


@njit(cache=True, parallel=True)
def _batch_fidelity_ensemble(mem_xs, mem_zs, mem_ph, cum, txs, tzs, tph, n, W, N, run_seed, idx0, out_est):
    """Fidelity snapshots of an ensemble against a fixed stabilizer target."""
    n2 = 2 * n
    dim1 = 2.0**n + 1.0
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        xs = np.empty((n2, W), np.uint64)
        zs = np.empty((n2, W), np.uint64)
        ph = np.empty(n2, np.uint8)
        bb = np.empty(W, np.uint64)
        al = np.empty((n, W), np.uint64)
        be = np.empty((n, W), np.uint64)
        ga = np.empty((n, W), np.uint64)
        de = np.empty((n, W), np.uint64)
        rv = np.empty(W, np.uint64)
        sv = np.empty(W, np.uint64)
        S = mem_xs.shape[0]
        ctr = 0
        k = 0
        if S > 1:
            u = _draw(sseed, ctr) / 1.8446744073709552e19
            ctr += 1
            for m in range(S):
                k = m
                if u < cum[m]:
                    break
        ctr = _sample_clifford_fill(al, be, ga, de, rv, sv, n, W, sseed, ctr)
        _conjugate_rows(mem_xs[k], mem_zs[k], mem_ph[k], n, W, al, be, ga, de, rv, sv, xs, zs, ph)
        for w in range(W):
            bb[w] = ZERO
        ctr, _nr = _measure_walk(xs, zs, ph, n, W, 0, bb, sseed, ctr)
        _conjugate_rows(txs, tzs, tph, n, W, al, be, ga, de, rv, sv, xs, zs, ph)
        _c2, kexp = _measure_walk(xs, zs, ph, n, W, 1, bb, sseed, 0)
        if kexp < 0:
            out_est[i] = -1.0
        else:
            out_est[i] = dim1 * 2.0 ** (-kexp) - 1.0


@njit(cache=True, parallel=True)
def _batch_acquire(mem_xs, mem_zs, mem_ph, cum, n, W, N, run_seed, idx0,
                   out_al, out_be, out_ga, out_de, out_r, out_s, out_b):
    """Acquire N snapshots from a (possibly ensemble) tableau preparation."""
    n2 = 2 * n
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        xs = np.empty((n2, W), np.uint64)
        zs = np.empty((n2, W), np.uint64)
        ph = np.empty(n2, np.uint8)
        S = mem_xs.shape[0]
        ctr = 0
        k = 0
        if S > 1:
            u = _draw(sseed, ctr) / 1.8446744073709552e19
            ctr += 1
            for m in range(S):
                k = m
                if u < cum[m]:
                    break
        ctr = _sample_clifford_fill(out_al[i], out_be[i], out_ga[i], out_de[i],
                                    out_r[i], out_s[i], n, W, sseed, ctr)
        _conjugate_rows(mem_xs[k], mem_zs[k], mem_ph[k], n, W,
                        out_al[i], out_be[i], out_ga[i], out_de[i], out_r[i], out_s[i],
                        xs, zs, ph)
        for w in range(W):
            out_b[i, w] = ZERO
        ctr, _nr = _measure_walk(xs, zs, ph, n, W, 0, out_b[i], sseed, ctr)


@njit(cache=True, parallel=True)
def _batch_estimate_fidelity(al, be, ga, de, rv, sv, bs, txs, tzs, tph, n, W, out_est):
    """(2^n+1) * abs(<b_i|U_i|target>)**2 - 1 for every stored snapshot."""
    N = al.shape[0]
    n2 = 2 * n
    dim1 = 2.0**n + 1.0
    for i in prange(N):
        xs = np.empty((n2, W), np.uint64)
        zs = np.empty((n2, W), np.uint64)
        ph = np.empty(n2, np.uint8)
        _conjugate_rows(txs, tzs, tph, n, W, al[i], be[i], ga[i], de[i], rv[i], sv[i], xs, zs, ph)
        _c, kexp = _measure_walk(xs, zs, ph, n, W, 1, bs[i], 0, 0)
        if kexp < 0:
            out_est[i] = -1.0
        else:
            out_est[i] = dim1 * 2.0 ** (-kexp) - 1.0


@njit(cache=True, parallel=True)
def _batch_measure_z(xs0, zs0, ph0, n, W, N, run_seed, idx0, out_b):
    """Repeated Z-basis measurement of one fixed state (no rotation)."""
    n2 = 2 * n
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        xs = xs0.copy()
        zs = zs0.copy()
        ph = ph0.copy()
        for w in range(W):
            out_b[i, w] = ZERO
        _measure_walk(xs, zs, ph, n, W, 0, out_b[i], sseed, 0)


@njit(cache=True, parallel=True)
def _batch_sample_keys(n, W, N, run_seed, idx0, out_key):
    """Pack each sampled (Gamma, r, s) into an integer key (n <= 2 only)."""
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        al = np.empty((n, W), np.uint64)
        be = np.empty((n, W), np.uint64)
        ga = np.empty((n, W), np.uint64)
        de = np.empty((n, W), np.uint64)
        rv = np.empty(W, np.uint64)
        sv = np.empty(W, np.uint64)
        _sample_clifford_fill(al, be, ga, de, rv, sv, n, W, sseed, 0)
        key = np.int64(0)
        pos = 0
        for j in range(n):
            for b in range(n):
                key |= np.int64((al[j, 0] >> U64(b)) & ONE) << pos
                pos += 1
                key |= np.int64((be[j, 0] >> U64(b)) & ONE) << pos
                pos += 1
                key |= np.int64((ga[j, 0] >> U64(b)) & ONE) << pos
                pos += 1
                key |= np.int64((de[j, 0] >> U64(b)) & ONE) << pos
                pos += 1
        for j in range(n):
            key |= np.int64((rv[0] >> U64(j)) & ONE) << pos
            pos += 1
            key |= np.int64((sv[0] >> U64(j)) & ONE) << pos
            pos += 1
        out_key[i] = key


@njit(cache=True, parallel=True)
def _batch_orbit_keys(n, W, N, run_seed, idx0, out_key):
    """Canonical stabilizer-group key of U|0^n> for sampled U (n <= 2).

    The stabilizer rows of the rotated state are brought to a canonical
    reduced form by GF(2) elimination with full phase tracking, then packed
    (row bits and signs) into one integer.
    """
    n2 = 2 * n
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        al = np.empty((n, W), np.uint64)
        be = np.empty((n, W), np.uint64)
        ga = np.empty((n, W), np.uint64)
        de = np.empty((n, W), np.uint64)
        rv = np.empty(W, np.uint64)
        sv = np.empty(W, np.uint64)
        _sample_clifford_fill(al, be, ga, de, rv, sv, n, W, sseed, 0)
        # stabilizers of U|0^n>: images of Z_j
        xs = np.empty((n, W), np.uint64)
        zs = np.empty((n, W), np.uint64)
        ph = np.empty(n, np.uint8)
        for j in range(n):
            for w in range(W):
                xs[j, w] = ga[j, w]
                zs[j, w] = de[j, w]
            ph[j] = np.uint8(2 * np.int64((sv[0] >> U64(j)) & ONE))
        # canonical reduced form over columns (x_0..x_{n-1}, z_0..z_{n-1})
        rank = 0
        for col in range(2 * n):
            is_z = col >= n
            q = col - n if is_z else col
            wq = q >> 6
            mq = ONE << U64(q & 63)
            piv = -1
            for r in range(rank, n):
                hit = (zs[r, wq] & mq) != ZERO if is_z else (xs[r, wq] & mq) != ZERO
                if hit:
                    piv = r
                    break
            if piv < 0:
                continue
            if piv != rank:
                for w in range(W):
                    tx = xs[piv, w]
                    xs[piv, w] = xs[rank, w]
                    xs[rank, w] = tx
                    tz = zs[piv, w]
                    zs[piv, w] = zs[rank, w]
                    zs[rank, w] = tz
                tp = ph[piv]
                ph[piv] = ph[rank]
                ph[rank] = tp
            for r in range(n):
                if r == rank:
                    continue
                hit = (zs[r, wq] & mq) != ZERO if is_z else (xs[r, wq] & mq) != ZERO
                if hit:
                    _row_mult(xs, zs, ph, r, rank, W)
            rank += 1
            if rank == n:
                break
        key = np.int64(0)
        pos = 0
        for r in range(n):
            for q in range(n):
                key |= np.int64((xs[r, 0] >> U64(q)) & ONE) << pos
                pos += 1
                key |= np.int64((zs[r, 0] >> U64(q)) & ONE) << pos
                pos += 1
            key |= np.int64(ph[r] >> 1) << pos
            pos += 1
        out_key[i] = key


# ---------------------------------------------------------------------------
# Dense 3-qubit snapshot pipeline for the witness experiments: each snapshot
# yields the rotated-back basis state U+|b> as 8 amplitudes.
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _apply_pauli8(vec, out, xmask, zmask, ph):
    """out = i**ph * X^x Z^z vec on 3 qubits (XZ-ordered string form)."""
    for m in range(8):
        amp = vec[m]
        k = (ph + 2 * _pop64(U64(zmask & m))) & 3
        out[m ^ xmask] = _I_POW[k] * amp


@njit(cache=True, parallel=True)
def _batch_dense_ghz3(psi, N, run_seed, idx0, out_phi):
    """Sample 3-qubit Clifford snapshots of the dense state psi.

    Writes U_i^dagger |b_i> into out_phi[i].  Draw order per snapshot:
    Clifford sample first, then one draw for the measured outcome.
    """
    n = 3
    W = 1
    for i in prange(N):
        sseed = _substream(run_seed, idx0 + i)
        al = np.empty((n, W), np.uint64)
        be = np.empty((n, W), np.uint64)
        ga = np.empty((n, W), np.uint64)
        de = np.empty((n, W), np.uint64)
        rv = np.empty(W, np.uint64)
        sv = np.empty(W, np.uint64)
        ctr = _sample_clifford_fill(al, be, ga, de, rv, sv, n, W, sseed, 0)
        # |u0> = state stabilized by the images of Z_j (signs from s)
        v = np.zeros(8, np.complex128)
        tmp = np.zeros(8, np.complex128)
        u0 = np.zeros(8, np.complex128)
        ok = False
        for t in range(8):
            for m in range(8):
                v[m] = 0.0
            v[t] = 1.0
            for j in range(n):
                xm = np.int64(ga[j, 0] & U64(7))
                zm = np.int64(de[j, 0] & U64(7))
                # Hermitian image in X-before-Z form picks up i per Y factor
                sph = np.int64(2 * ((sv[0] >> U64(j)) & ONE)) + _pop64(U64(xm & zm))
                _apply_pauli8(v, tmp, xm, zm, sph & 3)
                for m in range(8):
                    v[m] = 0.5 * (v[m] + tmp[m])
            nrm2 = 0.0
            for m in range(8):
                nrm2 += v[m].real * v[m].real + v[m].imag * v[m].imag
            if nrm2 > 1e-9:
                s = 1.0 / np.sqrt(nrm2)
                for m in range(8):
                    u0[m] = v[m] * s
                ok = True
                break
        if ok:
            for m in range(8):
                if abs(u0[m]) > 1e-9:
                    fixer = np.conj(u0[m]) / abs(u0[m])
                    for mm in range(8):
                        u0[mm] = u0[mm] * fixer
                    break
        # columns U[:, b] = prod_j (X-image_j)^{b_j} |u0>
        U = np.zeros((8, 8), np.complex128)
        for b in range(8):
            for m in range(8):
                v[m] = u0[m]
            for j in range(n):
                if (b >> j) & 1:
                    xm = np.int64(al[j, 0] & U64(7))
                    zm = np.int64(be[j, 0] & U64(7))
                    rph = np.int64(2 * ((rv[0] >> U64(j)) & ONE)) + _pop64(U64(xm & zm))
                    _apply_pauli8(v, tmp, xm, zm, rph & 3)
                    for m in range(8):
                        v[m] = tmp[m]
            for m in range(8):
                U[m, b] = v[m]
        # w = U psi, Born sample
        probs = np.zeros(8, np.float64)
        tot = 0.0
        for m in range(8):
            acc = 0.0 + 0.0j
            for b in range(8):
                acc += U[m, b] * psi[b]
            probs[m] = acc.real * acc.real + acc.imag * acc.imag
            tot += probs[m]
        u = (_draw(sseed, ctr) / 1.8446744073709552e19) * tot
        bout = 7
        acc2 = 0.0
        for m in range(8):
            acc2 += probs[m]
            if u < acc2:
                bout = m
                break
        for c in range(8):
            out_phi[i, c] = np.conj(U[bout, c])
