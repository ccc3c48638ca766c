"""Gadget matrices and the randomized re-randomization map for sparse-secret
LWE, plus the leftover-hash sanity check.

Everything in GadgetSet is exact integer arithmetic; the identities
(u^T Q_[n] = e_1^T, T T^T = 4I, T V = 0, W V = 2I, Z z = u) hold with zero
tolerance and are asserted at build time.
"""

import hashlib
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from scipy.stats import norm as _norm

from .distributions import LweBatch
from .numerics import _report, min_entropy_sparse
from .samplers import SecretVector, _gen, sample_discrete_gaussian, sample_sparse_secret, sample_uniform_modq

__all__ = [
    "GadgetSet",
    "PhiRandomness",
    "AsymptoticHypothesisWarning",
    "build_Q",
    "build_Z",
    "phi",
    "draw_phi_randomness",
    "sparse_reduction_driver",
    "lhl_check",
    "enumerate_sparse_vectors",
    "mod_matmul",
    "sample_invertible_matrix",
]

_MAX_Q = 2 ** 31  # int64 dot products of length <= 2n+5 stay exact below this


class AsymptoticHypothesisWarning(UserWarning):
    """A hypothesis that only holds asymptotically fails at this desk scale."""


@dataclass
class GadgetSet:
    """The integer gadget family for dimension n and sparsity k.

    Q is n x (2n+5); u sums the first k basis vectors; v = u^T Q without its
    first n columns; T = Q without its first column; V and W witness that the
    kernel of T is well-spread (columns of V span ker(T) and W V = 2I).
    Z is the signed permutation for one particular sparse vector, attached by
    build_Z.
    """

    n: int
    k: int
    Q: np.ndarray
    u: np.ndarray
    v: np.ndarray
    T: np.ndarray
    V: np.ndarray
    W: np.ndarray
    Z: np.ndarray = None


def _bidiagonal(n, cols, diag, sub, zero_row=None):
    m = np.zeros((n, cols), dtype=np.int64)
    for j in range(cols):
        if j < n:
            m[j, j] = diag
        if j + 1 < n:
            m[j + 1, j] = sub
    if zero_row is not None:
        m[zero_row, zero_row] = 0
    return m


def build_Q(n: int, k: int) -> GadgetSet:
    """Construct the gadget Q = [e1, X, -en, Y, en, e1, e1, ek, ek] and its witnesses.

    X and Y are the n x (n-1) bidiagonal blocks whose k-th row carries an
    abnormal zero on the diagonal, which is what makes u^T annihilate them on
    the first k rows.
    """
    if not (1 < k < n):
        raise ValueError(f"need 1 < k < n, got k={k}, n={n}")
    X = _bidiagonal(n, n - 1, -1, 1, zero_row=k - 1)
    Y = _bidiagonal(n, n - 1, 1, 1, zero_row=k - 1)
    eye = np.eye(n, dtype=np.int64)
    e1, ek, en = eye[:, [0]], eye[:, [k - 1]], eye[:, [n - 1]]
    Q = np.hstack([e1, X, -en, Y, en, e1, e1, ek, ek])

    u = np.zeros(n, dtype=np.int64)
    u[:k] = 1
    v = u @ Q[:, n:]
    T = Q[:, 1:]

    # kernel witnesses: full bidiagonal blocks (no abnormal zero) and one-hot rows
    Xf = _bidiagonal(n, n, -1, 1)
    Yf = _bidiagonal(n, n, 1, 1)
    row_km1 = np.zeros((1, n), dtype=np.int64)
    row_km1[0, k - 2] = 1
    zn = np.zeros((n, 1), dtype=np.int64)
    z1 = np.zeros((1, 1), dtype=np.int64)
    one = np.ones((1, 1), dtype=np.int64)
    zrow = np.zeros((1, n), dtype=np.int64)
    ek1 = eye[:, [k - 2]]
    V = np.block([
        [Yf, e1, zn, -ek1, zn],
        [-Xf, -e1, zn, -ek1, zn],
        [zrow, one, one, z1, z1],
        [zrow, one, -one, z1, z1],
        [-row_km1, z1, z1, one, one],
        [-row_km1, z1, z1, one, -one],
    ])
    Ip = np.eye(n, dtype=np.int64)
    Ip[k - 2, k - 2] = 0
    Ip[k - 2, k - 1] = 1
    Im = np.eye(n, dtype=np.int64)
    Im[k - 2, k - 2] = 0
    Im[k - 2, k - 1] = -1
    row_k = np.zeros((1, n), dtype=np.int64)
    row_k[0, k - 1] = 1
    z2row = np.zeros((1, 2 * n), dtype=np.int64)
    W = np.block([
        [Ip, Im, zn, zn, zn, zn],
        [z2row, one, one, z1, z1],
        [z2row, one, -one, z1, z1],
        [row_k, -row_k, z1, z1, one, one],
        [z2row, z1, z1, one, -one],
    ])

    gs = GadgetSet(n, k, Q, u, v, T, V, W)
    _check_gadget(gs)
    return gs


def _check_gadget(gs: GadgetSet):
    n, k = gs.n, gs.k
    e1 = np.zeros(n, dtype=np.int64)
    e1[0] = 1
    assert np.array_equal(gs.u @ gs.Q[:, :n], e1)
    assert int(gs.v @ gs.v) == 4 * k and int(np.abs(gs.v).max()) == 2
    assert np.array_equal(gs.T @ gs.T.T, 4 * np.eye(n, dtype=np.int64))
    assert not np.any(gs.T @ gs.V)
    assert np.array_equal(gs.W @ gs.V, 2 * np.eye(n + 4, dtype=np.int64))


def build_Z(z) -> np.ndarray:
    """Signed permutation Z with Z = Z^T = Z^{-1} and Z z = u, for sparse z.

    Nonzero coordinates past position k are swapped into the zero slots among
    the first k coordinates; the pairing is the order-preserving bijection
    (smallest index to smallest index) so the output is reproducible.
    """
    if isinstance(z, SecretVector):
        z = z.entries
    z = np.asarray(z, dtype=np.int64)
    n = z.shape[0]
    k = int(np.count_nonzero(z))
    if k == 0 or not np.all(np.isin(z[z != 0], (-1, 1))):
        raise ValueError("z must be a nonzero vector over {-1,0,+1}")
    in_k = np.arange(n) < k
    t_low = np.flatnonzero((z != 0) & in_k)
    t_high = np.flatnonzero((z != 0) & ~in_k)
    t_low_star = np.flatnonzero((z == 0) & in_k)
    t_high_star = np.flatnonzero((z == 0) & ~in_k)
    Z = np.zeros((n, n), dtype=np.int64)
    Z[t_low, t_low] = z[t_low]
    Z[t_high_star, t_high_star] = 1
    for i, j in zip(t_high, t_low_star):
        Z[j, i] = z[i]
        Z[i, j] = z[i]
    return Z


def mod_matmul(A, B, q: int) -> np.ndarray:
    """(A @ B) mod q over int64, chunking the inner dimension to avoid overflow."""
    if q > _MAX_Q:
        raise ValueError(f"modulus must be at most 2^31, got {q}")
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    inner = A.shape[-1]
    safe = max(1, (2 ** 62) // max(1, (q - 1) ** 2))
    if inner <= safe:
        return np.mod(A @ B, q)
    out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    for lo in range(0, inner, safe):
        hi = min(inner, lo + safe)
        out = np.mod(out + np.mod(A[..., lo:hi], q) @ np.mod(B[lo:hi], q), q)
    return out


@dataclass
class PhiRandomness:
    """The injected randomness of one re-randomization run."""

    z: SecretVector          # sparse secret planted into the output
    s: np.ndarray            # uniform column over Z_q^m
    a: np.ndarray            # uniform row over Z_q^{n-1}
    e: np.ndarray            # integer noise of width 2*sigma, length m
    G: np.ndarray            # integer noise of width sigma, m x (n+5)

    def digests(self):
        def h(arr):
            return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()
        return {"s": h(self.s), "a": h(self.a), "e": h(self.e), "G": h(self.G)}


def draw_phi_randomness(n: int, k: int, q: int, sigma: float, m: int, rng) -> PhiRandomness:
    z = sample_sparse_secret(n, k, rng)
    s = sample_uniform_modq(q, 1, rng, m)[:, 0]
    a = sample_uniform_modq(q, n - 1, rng)
    e = np.round(sample_discrete_gaussian(2.0 * sigma, 0.0, rng, m)).astype(np.int64)
    G = np.round(sample_discrete_gaussian(sigma, 0.0, rng, m * (n + 5))).astype(np.int64).reshape(m, n + 5)
    return PhiRandomness(z, s, a, e, G)


def phi(B, q: int, sigma: float = None, rand: PhiRandomness = None, rng=None, gadget: GadgetSet = None):
    """Re-randomize an m x (n-1) residue matrix B into a sample batch (X, x).

    X = [s, s a^T + B, G] Q^T Z mod q and x = s + e mod q. With fresh
    randomness, uniform B turns into sparse-secret LWE rows with secret z and
    noise width 2*sigma*sqrt(k+1); the per-row witness x - X z = e - G v mod q
    is an exact identity. Injecting `rand` makes the map deterministic.

    Returns (LweBatch, PhiRandomness).
    """
    B = np.asarray(B, dtype=np.int64)
    if q > _MAX_Q:
        raise ValueError(f"modulus must be at most 2^31, got {q}")
    m, n1 = B.shape
    n = n1 + 1
    if rand is None:
        if sigma is None or rng is None:
            raise ValueError("need sigma and rng when randomness is not injected")
        k = gadget.k if gadget is not None else None
        if k is None:
            raise ValueError("need gadget (for k) when randomness is not injected")
        rand = draw_phi_randomness(n, k, q, sigma, m, rng)
    z = rand.z
    if z.n != n:
        raise ValueError(f"z dimension {z.n} does not match B ({n})")
    if rand.s.shape != (m,) or rand.a.shape != (n - 1,) or rand.e.shape != (m,) or rand.G.shape != (m, n + 5):
        raise ValueError("injected randomness has mismatched shapes")
    if gadget is None or gadget.n != n or gadget.k != z.k:
        gadget = build_Q(n, z.k)
    Z = build_Z(z)

    M = np.empty((m, 2 * n + 5), dtype=np.int64)
    M[:, 0] = rand.s
    M[:, 1:n] = np.mod(rand.s[:, None] * rand.a[None, :] + B, q)
    M[:, n:] = np.mod(rand.G, q)
    X = mod_matmul(M, np.mod(gadget.Q.T @ Z, q), q)
    x = np.mod(rand.s + rand.e, q)
    return LweBatch(X, x, q, "zq", "zq"), rand


def _warn_if(cond, msg):
    if cond:
        warnings.warn(msg, AsymptoticHypothesisWarning, stacklevel=3)


def sparse_reduction_driver(oracle, n: int, k: int, q: int, sigma: float, ell: int, rng,
                            c_slack: float = 4.0, gadget: GadgetSet = None):
    """Consume one (A, B) pair from the base oracle, discard A, re-randomize B.

    The oracle yields pairs (A in Z_q^{ell x (n-1)}, B in Z_q^{m x (n-1)}); B is
    either uniform or carries a matrix-secret linear structure, and the output
    is correspondingly a sparse-secret LWE batch or a re-randomized LWE batch.
    Returns (LweBatch, transcript) where the transcript records the planted
    sparse vector and digests of all injected randomness for later audit.
    """
    try:
        A, B = next(oracle) if hasattr(oracle, "__next__") else oracle()
    except StopIteration:
        raise RuntimeError("base oracle exhausted") from None
    if A is not None and A.shape[1] != n - 1:
        raise ValueError("oracle A-part has wrong width")
    B = np.asarray(B, dtype=np.int64)
    m = B.shape[0]
    _warn_if(
        min_entropy_sparse(n, k) < (ell + 1) * math.log2(q) + c_slack,
        f"entropy hypothesis fails at desk scale: k*log2(n/k) ~ {min_entropy_sparse(n, k):.1f} "
        f"< (ell+1)*log2(q)+c_slack ~ {(ell + 1) * math.log2(q) + c_slack:.1f}",
    )
    _warn_if(
        sigma < 4.0 * math.sqrt(c_slack + math.log(n) + math.log(m)),
        f"noise hypothesis fails at desk scale: sigma={sigma} "
        f"< 4*sqrt(c_slack+ln n+ln m) ~ {4.0 * math.sqrt(c_slack + math.log(n) + math.log(m)):.2f}",
    )
    batch, rand = phi(B, q, sigma=sigma, rng=rng, gadget=gadget or build_Q(n, k))
    transcript = {
        "map": "sparse-rerandomize",
        "n": n, "k": k, "q": q, "sigma": sigma, "ell": ell, "m": m,
        "seed": getattr(rng, "seed", None),
        "stream": getattr(rng, "stream", None),
        "z": rand.z.as_dict(),
        "randomness_sha256": rand.digests(),
    }
    return batch, transcript, rand


def enumerate_sparse_vectors(n: int, k: int, limit: int = 5_000_000) -> np.ndarray:
    """All k-sparse sign vectors, ordered by support then sign pattern.

    Supports ascend lexicographically; for each support, sign patterns follow
    itertools.product over (+1, -1). The order is the tie-breaking order of the
    brute-force solver, so it is part of the observable behaviour.
    """
    count = math.comb(n, k) * 2 ** k
    if count > limit:
        raise ValueError(f"enumeration of {count} sparse vectors exceeds limit {limit}")
    out = np.zeros((count, n), dtype=np.int64)
    row = 0
    for support in itertools.combinations(range(n), k):
        for signs in itertools.product((1, -1), repeat=k):
            out[row, list(support)] = signs
            row += 1
    return out


def sample_invertible_matrix(dim: int, q: int, rng) -> np.ndarray:
    """Uniform invertible matrix over Z_q by rejection; prime q only.

    Composite moduli would need a different invertibility test and are
    untested here.
    """
    if not _is_prime(q):
        raise ValueError(f"invertible-matrix sampling implemented for prime q only, got {q}")
    while True:
        Wm = sample_uniform_modq(q, dim, rng, dim)
        if _det_mod_prime(Wm, q) != 0:
            return Wm


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def _det_mod_prime(M, q: int) -> int:
    a = np.mod(np.asarray(M, dtype=np.int64), q).copy()
    n = a.shape[0]
    det = 1
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r, col] % q:
                piv = r
                break
        if piv is None:
            return 0
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            det = (-det) % q
        det = (det * a[col, col]) % q
        inv = pow(int(a[col, col]), q - 2, q)
        a[col] = (a[col] * inv) % q
        for r in range(col + 1, n):
            if a[r, col]:
                a[r] = (a[r] - a[r, col] * a[col]) % q
    return det % q


def mat_inv_mod_prime(M, q: int) -> np.ndarray:
    """Inverse of a matrix over Z_q, prime q, by Gauss-Jordan elimination."""
    if not _is_prime(q):
        raise ValueError("prime modulus required")
    a = np.mod(np.asarray(M, dtype=np.int64), q).copy()
    n = a.shape[0]
    aug = np.hstack([a, np.eye(n, dtype=np.int64)])
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r, col] % q:
                piv = r
                break
        if piv is None:
            raise ValueError("matrix is singular mod q")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        inv = pow(int(aug[col, col]), q - 2, q)
        aug[col] = (aug[col] * inv) % q
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % q
    return aug[:, n:]


def lhl_check(ell: int, n: int, k: int, q: int, trials: int, rng,
              threshold: float = 0.01, secret: SecretVector = None):
    """Monte Carlo check of the leftover-hash bound for sparse secrets.

    For each trial draws A over Z_q^{ell x n} and computes the exact
    statistical distance between (A, A s mod q) with s uniform over the sparse
    sign vectors (or a fixed injected secret) and (A, uniform), by enumerating
    the conditional distribution. The average is compared against the bound
    2^{-(H - ell*log2 q)/2} implied by the entropy of the secret set.

    Returns a TestReport whose statistic is the TV estimate; the p-value is the
    one-sided normal tail for "true TV <= bound" given the Monte Carlo error.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    if secret is None:
        S = enumerate_sparse_vectors(n, k, limit=2_000_000)
    else:
        S = secret.entries[None, :]
    g = _gen(rng)
    total_cells = float(q) ** ell
    tvs = np.empty(trials)
    for t in range(trials):
        A = sample_uniform_modq(q, n, g, ell)
        vals = np.mod(S @ A.T, q)  # one row per candidate secret, ell columns
        if ell == 1:
            counts = np.bincount(vals[:, 0], minlength=q)
            occupied = counts[counts > 0]
        else:
            _, occ = np.unique(vals, axis=0, return_counts=True)
            occupied = occ
        p_occ = occupied / S.shape[0]
        tv = 0.5 * (np.abs(p_occ - 1.0 / total_cells).sum()
                    + (total_cells - occupied.size) / total_cells)
        tvs[t] = tv
    entropy = 0.0 if secret is not None else min_entropy_sparse(n, k)
    slack = entropy - ell * math.log2(q)
    bound = min(1.0, 2.0 ** (-slack / 2.0)) if slack > 0 else 1.0
    est = float(tvs.mean())
    se = float(tvs.std(ddof=1) / math.sqrt(trials))
    if se == 0.0:
        p = 1.0 if est <= bound else 0.0
    else:
        p = float(_norm.sf((est - bound) / se))
    return _report("lhl", est, p, trials, threshold)
