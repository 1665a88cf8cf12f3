import itertools
import math

import numpy as np
import pytest

from lassodantzig.core import DesignMatrix, RegressionInstance


def orthonormal_design(n, rng):
    """n x n design with X^T X / n = I."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return DesignMatrix(math.sqrt(n) * Q)


def design_with_gram(P, n=None, rng=None):
    """Design whose Gram matrix equals P exactly (n >= M)."""
    P = np.asarray(P, dtype=float)
    M = P.shape[0]
    n = M if n is None else n
    L = np.linalg.cholesky(P)
    if rng is None:
        Q = np.eye(n)[:, :M]
    else:
        Q, _ = np.linalg.qr(rng.standard_normal((n, M)))
    return DesignMatrix(math.sqrt(n) * Q @ L.T)


def equicorrelated(M, rho):
    return (1 - rho) * np.eye(M) + rho * np.ones((M, M))


def instance_from_correlations(design, z):
    """Response y with X^T y / n = z (y in the column span)."""
    X = design.entries
    y = X @ np.linalg.solve(X.T @ X / design.n, np.asarray(z, dtype=float))
    return RegressionInstance(design, y)


def lasso_bruteforce(instance, r):
    """Minimize the weighted Lasso objective by enumerating support and sign patterns."""
    d = instance.design
    X, n, M = d.entries, d.n, d.M
    P = X.T @ X / n
    z = X.T @ instance.y / n
    w = r * d.column_norms

    def obj(b):
        res = instance.y - X @ b
        return res @ res / n + 2 * np.dot(w, np.abs(b))

    best, best_b = obj(np.zeros(M)), np.zeros(M)
    for k in range(1, M + 1):
        for J in itertools.combinations(range(M), k):
            J = list(J)
            PJ = P[np.ix_(J, J)]
            if np.linalg.matrix_rank(PJ) < k:
                continue
            for signs in itertools.product((-1.0, 1.0), repeat=k):
                bJ = np.linalg.solve(PJ, z[J] - w[J] * np.array(signs))
                if np.any(np.sign(bJ) != np.array(signs)):
                    continue
                b = np.zeros(M)
                b[J] = bJ
                v = obj(b)
                if v < best:
                    best, best_b = v, b
    return best_b, best


def lp_vertex_enumeration(c, A_ub, b_ub):
    """min c^T x, A x <= b, x >= 0 by enumerating basic solutions (tiny problems only)."""
    c = np.asarray(c, float)
    A = np.asarray(A_ub, float)
    b = np.asarray(b_ub, float)
    m, N = A.shape
    G = np.vstack([A, -np.eye(N)])
    h = np.concatenate([b, np.zeros(N)])
    best, best_x = math.inf, None
    for rows in itertools.combinations(range(m + N), N):
        sub = G[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(rows)])
        if np.all(G @ x <= h + 1e-9) and c @ x < best - 1e-12:
            best, best_x = float(c @ x), x
    return best_x, best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
