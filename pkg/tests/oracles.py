"""Independent dense/loop implementations used as test oracles.

Nothing here imports from the package under test, so agreement is evidence
rather than tautology.
"""

import itertools

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])
LETTERS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def pauli_matrix(ops):
    return kron_all([LETTERS[c] for c in ops])


def embed(n, small, targets):
    """Dense 2^n matrix of ``small`` acting on ``targets`` (first = MSB), by enumeration."""
    dim = 2 ** n
    k = len(targets)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = sum(bits[q] << (k - 1 - i) for i, q in enumerate(targets))
        for sub_out in range(2 ** k):
            amp = small[sub_out, sub_in]
            if amp == 0:
                continue
            new = list(bits)
            for i, q in enumerate(targets):
                new[q] = (sub_out >> (k - 1 - i)) & 1
            row = sum(b << (n - 1 - q) for q, b in enumerate(new))
            out[row, col] += amp
    return out


def dft_matrix(n, inverse=False):
    N = 2 ** n
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    sign = -1 if inverse else 1
    return np.exp(sign * 2j * np.pi * j * k / N) / np.sqrt(N)


def centered_wavenumbers(n):
    N = 2 ** n
    return np.array([k if k < N // 2 else k - N for k in range(N)])


def brute_pauli_coefficients(mat):
    """{ops: Tr(M P)/2^n} over all 4^n strings, nonzero only."""
    n = int(np.log2(mat.shape[0]))
    out = {}
    for ops in itertools.product("IXYZ", repeat=n):
        s = "".join(ops)
        c = np.trace(mat @ pauli_matrix(s)) / 2 ** n
        if abs(c) > 1e-12:
            out[s] = c
    return out


def loop_momentum(psi, dx, dy, one_sided):
    """J from explicit loops: Im(conj(psi) * difference quotient)."""
    ny, nx = psi.shape
    J = np.zeros((2, ny, nx))
    for l in range(ny):
        for k in range(nx):
            p = psi[l, k]
            # x
            if one_sided and k == 0:
                d = (psi[l, k + 1] - p) / dx
            elif one_sided and k == nx - 1:
                d = (p - psi[l, k - 1]) / dx
            else:
                d = (psi[l, (k + 1) % nx] - psi[l, (k - 1) % nx]) / (2 * dx)
            J[0, l, k] = (np.conj(p) * d).imag
            if one_sided and l == 0:
                d = (psi[l + 1, k] - p) / dy
            elif one_sided and l == ny - 1:
                d = (p - psi[l - 1, k]) / dy
            else:
                d = (psi[(l + 1) % ny, k] - psi[(l - 1) % ny, k]) / (2 * dy)
            J[1, l, k] = (np.conj(p) * d).imag
    return J


def loop_theta_average(a, xs, ys, width):
    sums, counts = {}, {}
    for l, y in enumerate(ys):
        for k, x in enumerate(xs):
            b = int(np.floor(np.hypot(x, y) / width))
            sums[b] = sums.get(b, 0.0) + a[l, k]
            counts[b] = counts.get(b, 0) + 1
    return {b: sums[b] / counts[b] for b in sums}
