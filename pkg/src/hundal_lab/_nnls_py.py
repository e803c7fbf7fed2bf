"""Pure NumPy Lawson-Hanson kernel (fallback for ``_nnls_ext``)."""
import numpy as np

EPS = np.finfo(np.float64).eps
POLISH_CANDIDATES = 3


def _enter(gens, b, lam, passive, j, it, max_iter):
    """Add generator ``j`` to the passive set and restore primal feasibility.

    Works on copies. Returns ``(lam, passive, it, ok)``; ``ok`` is False when
    the iteration cap interrupted the inner loop.
    """
    lam = lam.copy()
    passive = passive.copy()
    passive[j] = True
    while True:
        idx = np.flatnonzero(passive)
        s, *_ = np.linalg.lstsq(gens[idx].T, b, rcond=None)
        if np.all(s > 0.0):
            break
        if it >= max_iter:
            return lam, passive, it, False
        it += 1
        cur = lam[idx]
        blocking = s <= 0.0
        denom = cur[blocking] - s[blocking]
        ratios = np.where(denom > 0.0, cur[blocking] / np.where(denom > 0.0, denom, 1.0), 0.0)
        k = int(np.argmin(ratios))
        cur = cur + ratios[k] * (s - cur)
        cur[np.flatnonzero(blocking)[k]] = 0.0
        lam[idx] = cur
        drop = idx[cur <= 0.0]
        lam[drop] = 0.0
        passive[drop] = False
    lam[:] = 0.0
    lam[idx] = s
    return lam, passive, it, True


def nnls_kernel(gens, b, tol, max_iter):
    """Active-set NNLS over the rows of ``gens``.

    Minimizes ``||b - lam @ gens||`` over ``lam >= 0``.

    Once every inactive dual value ``<r, g_j>`` is at most ``tol`` the method
    tries a polish step: the few inactive generators with the largest
    positive dual value are entered one at a time, and a move is kept only
    if the residual norm drops by more than its rounding error. This matters
    when generators are nearly orthogonal to the residual (dual values below
    ``tol`` although the fitted point is still far off).

    Parameters
    ----------
    gens : ndarray, shape (n, m)
        Generators stored as rows, C-contiguous float64.
    b : ndarray, shape (m,)
    tol : float
        Absolute dual-feasibility tolerance.
    max_iter : int
        Cap on the total number of outer plus inner iterations.

    Returns
    -------
    lam : ndarray, shape (n,)
    iterations : int
    converged : bool
    """
    n = gens.shape[0]
    lam = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    r = b.copy()
    w = gens @ r
    rnorm = np.linalg.norm(r)
    noise = 16.0 * EPS * (np.linalg.norm(b) + 1.0)
    it = 0
    while True:
        cand = np.where(passive, -np.inf, w)
        # argmax returns the first maximizer, i.e. the lowest index on ties
        j = int(np.argmax(cand))
        if cand[j] > tol:
            if it >= max_iter:
                return lam, it, False
            it += 1
            lam, passive, it, ok = _enter(gens, b, lam, passive, j, it, max_iter)
            if not ok:
                return lam, it, False
        else:
            accepted = False
            # stable sort keeps the lowest index first among ties
            for j in np.argsort(-cand, kind="stable")[:POLISH_CANDIDATES]:
                if cand[j] <= 0.0 or it >= max_iter:
                    break
                it += 1
                t_lam, t_passive, it, ok = _enter(gens, b, lam, passive, int(j), it, max_iter)
                if not ok:
                    break
                t_norm = np.linalg.norm(b - t_lam @ gens)
                if t_norm < rnorm - noise:
                    lam, passive, accepted = t_lam, t_passive, True
                    break
            if not accepted:
                return lam, it, True
        r = b - lam @ gens
        rnorm = np.linalg.norm(r)
        w = gens @ r
