"""Pure NumPy fallback for the fixed-mesh shooting kernel.

The equation ``y'' + c y' + g Q(s) y = 0`` is linear, so one Runge-Kutta
step is a 2x2 transfer matrix.  All step matrices are built at once with
array operations; only their ordered product is a Python loop.
"""
import numpy as np

RESCALE = 1e150


def shoot_kernel(h, Q, g, c, A, B):
    """Integrate from ``(y, y') = (1, 0)`` over steps ``h`` with stage values ``Q``.

    Parameters
    ----------
    h : (N,) step lengths
    Q : (N, S) equation coefficient at the S stage points of each step
    g, c : coupling and first-derivative coefficient
    A, B : Runge-Kutta matrix (S, S) and weights (S,)

    Returns
    -------
    y, dy : final state, divided by ``exp(log_scale)``
    nodes : sign changes of ``y`` between mesh points
    log_scale : accumulated natural-log rescaling
    """
    h = np.asarray(h, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n, stages = Q.shape
    # K[i] maps the step's initial state to stage slope i: (n, 2, 2)
    K = np.empty((stages, n, 2, 2))
    hh = h[:, None, None]
    eye = np.eye(2)
    for i in range(stages):
        acc = np.broadcast_to(eye, (n, 2, 2)).copy()
        for j in range(i):
            if A[i, j] != 0.0:
                acc += (A[i, j] * hh) * K[j]
        # slope matrix [[0, 1], [-g Q, -c]] applied to acc
        K[i, :, 0, :] = acc[:, 1, :]
        K[i, :, 1, :] = -g * Q[:, i, None] * acc[:, 0, :] - c * acc[:, 1, :]
    T = np.broadcast_to(eye, (n, 2, 2)).copy()
    for i in range(stages):
        T += (B[i] * hh) * K[i]

    y, dy = 1.0, 0.0
    nodes = 0
    log_scale = 0.0
    for m in T.tolist():
        ny = m[0][0] * y + m[0][1] * dy
        dy = m[1][0] * y + m[1][1] * dy
        if (ny < 0.0 < y) or (y < 0.0 < ny):
            nodes += 1
        y = ny
        big = max(abs(y), abs(dy))
        if big > RESCALE:
            y /= big
            dy /= big
            log_scale += np.log(big)
    return y, dy, nodes, log_scale
