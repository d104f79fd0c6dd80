# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial kernel; mirrors ssbsim._kernels_py operation for operation."""

from libc.math cimport sqrt, NAN
from libc.stdint cimport uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void matvec(const double[:, ::1] ar, const double[:, ::1] ai,
                        const double* sr, const double* si,
                        double* out_r, double* out_i, Py_ssize_t dim) noexcept nogil:
    cdef Py_ssize_t row, k
    cdef double acc_r, acc_i
    for row in range(dim):
        acc_r = 0.0
        acc_i = 0.0
        for k in range(dim):
            acc_r = acc_r + (ar[row, k] * sr[k] - ai[row, k] * si[k])
            acc_i = acc_i + (ar[row, k] * si[k] + ai[row, k] * sr[k])
        out_r[row] = acc_r
        out_i[row] = acc_i


def run_trials(uint64_t seed, Py_ssize_t n,
               const double[::1] start_r, const double[::1] start_i,
               const double[:, ::1] prep_r, const double[:, ::1] prep_i,
               Py_ssize_t idx0, Py_ssize_t idx1,
               const double[:, :, ::1] meas_r, const double[:, :, ::1] meas_i,
               bint renorm,
               const double[:, :, ::1] rev_r, const double[:, :, ::1] rev_i,
               bint reverse, int discard,
               const double[::1] tgt_r, const double[::1] tgt_i,
               signed char[::1] outcomes,
               double[:, ::1] post_r, double[:, ::1] post_i,
               double[:, ::1] out_r, double[:, ::1] out_i,
               double[::1] fid):
    cdef Py_ssize_t dim = start_r.shape[0]
    cdef Py_ssize_t t, k
    cdef uint64_t key
    cdef double u, p0, p1, acc, n2, nrm, ip_r, ip_i
    cdef int m, last
    cdef double s_r[4]
    cdef double s_i[4]
    cdef double sr0[4]
    cdef double si0[4]
    cdef double v_r[4]
    cdef double v_i[4]
    cdef double f_r[4]
    cdef double f_i[4]

    if dim > 4:
        raise ValueError("kernel supports dimension <= 4")
    for k in range(dim):
        sr0[k] = start_r[k]
        si0[k] = start_i[k]

    with nogil:
        for t in range(n):
            key = mix64(seed + <uint64_t>(t + 1) * GOLDEN)
            u = <double>(mix64(key + GOLDEN) >> 11) * INV_2_53

            matvec(prep_r, prep_i, sr0, si0, s_r, s_i, dim)
            p0 = s_r[idx0] * s_r[idx0] + s_i[idx0] * s_i[idx0]
            p1 = s_r[idx1] * s_r[idx1] + s_i[idx1] * s_i[idx1]

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

            matvec(meas_r[m], meas_i[m], s_r, s_i, v_r, v_i, dim)
            if renorm:
                n2 = 0.0
                for k in range(dim):
                    n2 = n2 + (v_r[k] * v_r[k] + v_i[k] * v_i[k])
                nrm = sqrt(n2)
                for k in range(dim):
                    v_r[k] = v_r[k] / nrm
                    v_i[k] = v_i[k] / nrm

            outcomes[t] = <signed char>m
            for k in range(dim):
                post_r[t, k] = v_r[k]
                post_i[t, k] = v_i[k]
            if m == discard:
                for k in range(dim):
                    out_r[t, k] = 0.0
                    out_i[t, k] = 0.0
                fid[t] = NAN
                continue

            if reverse:
                matvec(rev_r[m], rev_i[m], v_r, v_i, f_r, f_i, dim)
                for k in range(dim):
                    out_r[t, k] = f_r[k]
                    out_i[t, k] = f_i[k]
            else:
                for k in range(dim):
                    f_r[k] = v_r[k]
                    f_i[k] = v_i[k]
                    out_r[t, k] = 0.0
                    out_i[t, k] = 0.0

            ip_r = 0.0
            ip_i = 0.0
            for k in range(dim):
                ip_r = ip_r + (tgt_r[k] * f_r[k] + tgt_i[k] * f_i[k])
                ip_i = ip_i + (tgt_r[k] * f_i[k] - tgt_i[k] * f_r[k])
            fid[t] = ip_r * ip_r + ip_i * ip_i
