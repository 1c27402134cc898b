"""Pure-numpy implementation of the log-mixture kernel."""

import numpy as np


def log_mixture_excess(rows_re, rows_im, c_re, c_im, noise_re, noise_im, sigma_sq, threads=1):
    n_rows, n_draws = noise_re.shape
    out = np.empty((n_rows, n_draws))
    inv_s2 = 1.0 / sigma_sq
    for r in range(n_rows):
        dr = rows_re[r] - c_re
        di = rows_im[r] - c_im
        wr = noise_re[r][:, None]
        wi = noise_im[r][:, None]
        e = -((dr * dr + di * di)[None, :] + 2.0 * (dr * wr + di * wi)) * inv_s2
        m = e.max(axis=1)
        out[r] = m + np.log(np.exp(e - m[:, None]).sum(axis=1))
    return out
