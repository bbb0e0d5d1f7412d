# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner maximizers.

Mirrors ``_pyfallback`` draw-for-draw: randomness is pulled from the
caller's numpy Generator through its underlying bit generator, and
``random_standard_uniform`` / ``random_standard_normal`` consume the bit
stream exactly like ``Generator.random()`` / ``.standard_normal()``.
See the fallback module docstring for the full draw protocol.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, INFINITY
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_normal,
    random_standard_uniform,
)

NAME = "native"


cdef bitgen_t *_bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


def ascend_grid(const double[::1] base, const long[::1] dims, double noise_std,
                int restarts, int steps, long step_size, object gen):
    """Multi-start noisy hill climb on a C-order grid of scores."""
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t n = base.shape[0]
    cdef int ndim = dims.shape[0]
    if ndim > 16:
        raise ValueError("grids beyond 16 axes are not supported")
    cdef long[16] strides
    cdef int a
    strides[ndim - 1] = 1
    for a in range(ndim - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]

    cdef Py_ssize_t best_idx = -1, cur, nb, move_idx
    cdef double best_val = -INFINITY
    cdef double u, val, cur_val, move_val
    cdef long coord
    cdef int r, s
    with nogil:
        for r in range(restarts):
            u = random_standard_uniform(rng)
            cur = <Py_ssize_t> (u * n)
            if cur >= n:
                cur = n - 1
            cur_val = base[cur] + noise_std * random_standard_normal(rng)
            if cur_val > best_val or (cur_val == best_val and cur < best_idx):
                best_val = cur_val
                best_idx = cur
            for s in range(steps):
                move_idx = -1
                move_val = cur_val
                for a in range(ndim):
                    coord = (cur // strides[a]) % dims[a]
                    if coord - step_size >= 0:
                        nb = cur - step_size * strides[a]
                        val = base[nb] + noise_std * random_standard_normal(rng)
                        if val > best_val or (val == best_val and nb < best_idx):
                            best_val = val
                            best_idx = nb
                        if val > move_val:
                            move_val = val
                            move_idx = nb
                    if coord + step_size < dims[a]:
                        nb = cur + step_size * strides[a]
                        val = base[nb] + noise_std * random_standard_normal(rng)
                        if val > best_val or (val == best_val and nb < best_idx):
                            best_val = val
                            best_idx = nb
                        if val > move_val:
                            move_val = val
                            move_idx = nb
                if move_idx < 0:
                    break
                cur = move_idx
                cur_val = move_val
    return best_idx, best_val


def anneal_codes(const double[::1] base, const long[::1] codes,
                 const long[::1] code_to_index, int dim, double noise_std,
                 int restarts, int steps, double t0, double gamma, object gen):
    """Restarted simulated annealing over an enumerated set of bit-codes."""
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t n = base.shape[0]
    cdef double u, val, cur_val, temp
    cdef double best_val = -INFINITY
    cdef Py_ssize_t cur, cand
    cdef Py_ssize_t best_idx = -1
    cdef long cur_code, cand_code
    cdef int bit, r, s, accept
    with nogil:
        for r in range(restarts):
            u = random_standard_uniform(rng)
            cur = <Py_ssize_t> (u * n)
            if cur >= n:
                cur = n - 1
            cur_code = codes[cur]
            cur_val = base[cur] + noise_std * random_standard_normal(rng)
            if cur_val > best_val or (cur_val == best_val and cur < best_idx):
                best_val = cur_val
                best_idx = cur

            temp = t0
            for s in range(steps):
                u = random_standard_uniform(rng)
                bit = <int> (u * dim)
                if bit >= dim:
                    bit = dim - 1
                cand_code = cur_code ^ ((<long> 1) << bit)
                cand = code_to_index[cand_code]
                if cand >= 0:
                    val = base[cand] + noise_std * random_standard_normal(rng)
                    if val > best_val or (val == best_val and cand < best_idx):
                        best_val = val
                        best_idx = cand
                    if val >= cur_val:
                        accept = 1
                    else:
                        accept = random_standard_uniform(rng) < exp((val - cur_val) / temp)
                    if accept:
                        cur = cand
                        cur_code = cand_code
                        cur_val = val
                temp = temp * gamma
    return best_idx, best_val
