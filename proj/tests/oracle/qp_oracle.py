"""Independent nu-OCSVM dual solve with cvxpy, used to freeze objective values."""
import numpy as np
import cvxpy as cp

POINTS = np.array([[0.0, 0.0], [0.3, 0.1], [0.1, 0.4], [0.5, 0.5], [0.2, 0.25]])
NU = 0.4
GAMMA = 1.0


def rbf(a, b, gamma):
    return np.exp(-gamma * np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2))


def solve(points, nu, gamma):
    n = len(points)
    k = rbf(points, points, gamma)
    a = cp.Variable(n)
    upper = 1.0 / (nu * n)
    prob = cp.Problem(cp.Minimize(0.5 * cp.quad_form(a, cp.psd_wrap(k))),
                      [a >= 0, a <= upper, cp.sum(a) == 1])
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-14, tol_gap_rel=1e-14, tol_feas=1e-14)
    return a.value, 0.5 * a.value @ k @ a.value


if __name__ == "__main__":
    alpha, obj = solve(POINTS, NU, GAMMA)
    print("alpha", alpha)
    print("objective %.15f" % obj)
    k = rbf(POINTS, POINTS, GAMMA)
    g = k @ alpha
    print("gradient", g)
