"""Pure-Python inner maximizers, draw-for-draw equal to the native ones.

The RNG protocol below is a contract shared with ``_native.pyx``; any
change here must be mirrored there or backend parity breaks.

``ascend_grid`` (noisy multi-start coordinate ascent), per restart:

1. one uniform  -> start index ``int(u * n)`` (clipped to n-1);
2. one normal   -> noisy score of the start point;
3. per step, one normal per in-bounds axis neighbor (axes ascending,
   -step then +step); move to the best neighbor if it strictly beats
   the current noisy score, else stop.

``anneal_codes`` (simulated annealing over feasible bit-codes), per
restart (temperature resets to ``t0`` each chain):

1. one uniform  -> start row ``int(u * n)``;
2. one normal   -> noisy score of the start;
3. per step, one uniform -> bit to flip; an infeasible flip consumes
   nothing else; a feasible one consumes one normal for the proposal
   score, and one more uniform only when the proposal is worse than
   the current score (Metropolis acceptance ``u < exp(delta / temp)``);
   the temperature decays geometrically every step either way.

Both return the best point *evaluated* anywhere (by noisy score), which
makes the pair of routines a maximizer of the perturbed objective
``base + noise`` over everything they looked at.  Exact score ties
resolve to the lowest index, so noise-free runs are reproducible even
on plateaus.
"""

import math

NAME = "python"


def ascend_grid(base, dims, noise_std, restarts, steps, step_size, gen):
    """Multi-start noisy hill climb on a C-order grid of scores.

    Returns ``(best_index, best_noisy_value)``.
    """
    n = base.shape[0]
    ndim = dims.shape[0]
    strides = [0] * ndim
    strides[ndim - 1] = 1
    for a in range(ndim - 2, -1, -1):
        strides[a] = strides[a + 1] * dims[a + 1]

    best_idx = -1
    best_val = -math.inf
    for _ in range(restarts):
        u = gen.random()
        cur = int(u * n)
        if cur >= n:
            cur = n - 1
        cur_val = base[cur] + noise_std * gen.standard_normal()
        if cur_val > best_val or (cur_val == best_val and cur < best_idx):
            best_val, best_idx = cur_val, cur
        for _ in range(steps):
            move_idx = -1
            move_val = cur_val
            for a in range(ndim):
                coord = (cur // strides[a]) % dims[a]
                if coord - step_size >= 0:
                    nb = cur - step_size * strides[a]
                    val = base[nb] + noise_std * gen.standard_normal()
                    if val > best_val or (val == best_val and nb < best_idx):
                        best_val, best_idx = val, nb
                    if val > move_val:
                        move_val, move_idx = val, nb
                if coord + step_size < dims[a]:
                    nb = cur + step_size * strides[a]
                    val = base[nb] + noise_std * gen.standard_normal()
                    if val > best_val or (val == best_val and nb < best_idx):
                        best_val, best_idx = val, nb
                    if val > move_val:
                        move_val, move_idx = val, nb
            if move_idx < 0:
                break
            cur, cur_val = move_idx, move_val
    return best_idx, best_val


def anneal_codes(
    base, codes, code_to_index, dim, noise_std, restarts, steps, t0, gamma, gen
):
    """Restarted simulated annealing over an enumerated set of bit-codes.

    ``base`` scores feasible rows; ``codes[i]`` is row i's bit-code and
    ``code_to_index`` inverts it (-1 marks infeasible codes).  Returns
    ``(best_index, best_noisy_value)``.
    """
    n = base.shape[0]
    best_idx = -1
    best_val = -math.inf
    for _ in range(restarts):
        u = gen.random()
        cur = int(u * n)
        if cur >= n:
            cur = n - 1
        cur_code = int(codes[cur])
        cur_val = base[cur] + noise_std * gen.standard_normal()
        if cur_val > best_val or (cur_val == best_val and cur < best_idx):
            best_val, best_idx = cur_val, cur

        temp = t0
        for _ in range(steps):
            u = gen.random()
            bit = int(u * dim)
            if bit >= dim:
                bit = dim - 1
            cand_code = cur_code ^ (1 << bit)
            cand = code_to_index[cand_code]
            if cand >= 0:
                val = base[cand] + noise_std * gen.standard_normal()
                if val > best_val or (val == best_val and cand < best_idx):
                    best_val, best_idx = val, int(cand)
                if val >= cur_val:
                    accept = True
                else:
                    accept = gen.random() < math.exp((val - cur_val) / temp)
                if accept:
                    cur, cur_code, cur_val = int(cand), cand_code, val
            temp *= gamma
    return best_idx, best_val
