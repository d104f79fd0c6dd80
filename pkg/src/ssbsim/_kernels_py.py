"""Pure-Python trial kernel.

Reference implementation of :func:`ssbsim._kernels.run_trials`.  Arithmetic
is spelled out on real and imaginary parts in exactly the order the
compiled kernel uses, so both produce bit-identical arrays.
"""

from math import sqrt

from .rng import GOLDEN, MASK64, mix64

_INV_2_53 = 1.0 / 9007199254740992.0


def _matvec(ar, ai, sr, si, dim):
    out_r = [0.0] * dim
    out_i = [0.0] * dim
    for row in range(dim):
        acc_r = 0.0
        acc_i = 0.0
        rr = ar[row]
        ri = ai[row]
        for k in range(dim):
            acc_r = acc_r + (rr[k] * sr[k] - ri[k] * si[k])
            acc_i = acc_i + (rr[k] * si[k] + ri[k] * sr[k])
        out_r[row] = acc_r
        out_i[row] = acc_i
    return out_r, out_i


def run_trials(seed, n, start_r, start_i, prep_r, prep_i, idx0, idx1,
               meas_r, meas_i, renorm, rev_r, rev_i, reverse, discard,
               tgt_r, tgt_i, outcomes, post_r, post_i, out_r, out_i, fid):
    dim = len(start_r)
    start_r, start_i = start_r.tolist(), start_i.tolist()
    prep_r, prep_i = prep_r.tolist(), prep_i.tolist()
    meas_r, meas_i = meas_r.tolist(), meas_i.tolist()
    rev_r, rev_i = rev_r.tolist(), rev_i.tolist()
    tgt_r, tgt_i = tgt_r.tolist(), tgt_i.tolist()

    res_m = [0] * n
    res_pr = [None] * n
    res_pi = [None] * n
    res_rr = [None] * n
    res_ri = [None] * n
    res_f = [0.0] * n
    zeros = [0.0] * dim

    for t in range(n):
        key = mix64((seed + (t + 1) * GOLDEN) & MASK64)
        u = (mix64((key + GOLDEN) & MASK64) >> 11) * _INV_2_53

        sr, si = _matvec(prep_r, prep_i, start_r, start_i, dim)
        p0 = sr[idx0] * sr[idx0] + si[idx0] * si[idx0]
        p1 = sr[idx1] * sr[idx1] + si[idx1] * si[idx1]

        # inverse CDF, skipping zero-probability branches
        m = -1
        last = 0
        acc = 0.0
        if p0 > 0.0:
            acc = acc + p0
            last = 0
            if u < acc:
                m = 0
        if m < 0 and p1 > 0.0:
            acc = acc + p1
            last = 1
            if u < acc:
                m = 1
        if m < 0:
            m = last

        vr, vi = _matvec(meas_r[m], meas_i[m], sr, si, dim)
        if renorm:
            n2 = 0.0
            for k in range(dim):
                n2 = n2 + (vr[k] * vr[k] + vi[k] * vi[k])
            nrm = sqrt(n2)
            vr = [x / nrm for x in vr]
            vi = [x / nrm for x in vi]

        res_m[t] = m
        res_pr[t] = vr
        res_pi[t] = vi
        if m == discard:
            res_rr[t] = zeros
            res_ri[t] = zeros
            res_f[t] = float("nan")
            continue

        if reverse:
            fr, fi = _matvec(rev_r[m], rev_i[m], vr, vi, dim)
            res_rr[t] = fr
            res_ri[t] = fi
        else:
            fr, fi = vr, vi
            res_rr[t] = zeros
            res_ri[t] = zeros

        ip_r = 0.0
        ip_i = 0.0
        for k in range(dim):
            ip_r = ip_r + (tgt_r[k] * fr[k] + tgt_i[k] * fi[k])
            ip_i = ip_i + (tgt_r[k] * fi[k] - tgt_i[k] * fr[k])
        res_f[t] = ip_r * ip_r + ip_i * ip_i

    outcomes[:] = res_m
    post_r[:] = res_pr
    post_i[:] = res_pi
    out_r[:] = res_rr
    out_i[:] = res_ri
    fid[:] = res_f
