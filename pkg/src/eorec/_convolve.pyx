# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse-convolution kernel for truncated series products.

Same contract as eorec.series._convolve_py: items are [(int exponent,
coefficient)] lists, output is {exponent: coefficient} with exponents >=
cutoff dropped.  Coefficients are opaque Python objects supporting * and +;
the win over the pure loop is interpreter overhead on the pair iteration.
"""


def convolve(list items_a, list items_b, long long cutoff):
    cdef dict out = {}
    cdef long long ea, eb, e
    cdef object ca, cb, prod, acc
    cdef Py_ssize_t i, j, na, nb
    na = len(items_a)
    nb = len(items_b)
    cdef list exps_a = [0] * na
    cdef list coeffs_a = [None] * na
    for i in range(na):
        exps_a[i] = items_a[i][0]
        coeffs_a[i] = items_a[i][1]
    for j in range(nb):
        eb = items_b[j][0]
        cb = items_b[j][1]
        for i in range(na):
            ea = <long long> exps_a[i]
            e = ea + eb
            if e >= cutoff:
                continue
            ca = coeffs_a[i]
            prod = ca * cb
            acc = out.get(e)
            if acc is None:
                out[e] = prod
            else:
                out[e] = acc + prod
    return out
