"""Hermitian band-matrix arithmetic with complex-operation accounting.

Storage is diagonal-wise: a matrix of order n and bandwidth q keeps the main
diagonal plus q sub-diagonals in a (q+1, n) array; the upper triangle is
implied by Hermitian symmetry. Counters record the complex multiplications,
additions and divisions the banded scalar algorithms perform, independent of
how the inner products are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class OpCounter:
    """Tally of complex multiplications / additions / divisions."""

    cm: int = 0
    ca: int = 0
    cd: int = 0

    def add(self, cm: int = 0, ca: int = 0, cd: int = 0) -> None:
        self.cm += int(cm)
        self.ca += int(ca)
        self.cd += int(cd)

    def merge(self, other: "OpCounter") -> None:
        self.add(other.cm, other.ca, other.cd)

    @property
    def total(self) -> int:
        return self.cm + self.ca + self.cd

    def copy(self) -> "OpCounter":
        return OpCounter(self.cm, self.ca, self.cd)


@dataclass(frozen=True)
class BandHermitianMatrix:
    """Hermitian matrix of order n stored as main + q sub-diagonals."""

    order: int
    bandwidth: int
    diagonals: np.ndarray  # (bandwidth + 1, order); diagonals[d, j] = M[j+d, j]

    def entry(self, r: int, c: int) -> complex:
        if r < c:
            return np.conj(self.entry(c, r))
        d = r - c
        if d > self.bandwidth:
            return 0.0 + 0.0j
        return complex(self.diagonals[d, c])

    def to_dense(self) -> np.ndarray:
        n, q = self.order, self.bandwidth
        m = np.zeros((n, n), dtype=complex)
        for d in range(q + 1):
            idx = np.arange(n - d)
            m[idx + d, idx] = self.diagonals[d, :n - d]
            if d > 0:
                m[idx, idx + d] = np.conj(self.diagonals[d, :n - d])
        return m

    @classmethod
    def from_dense(cls, dense: np.ndarray, bandwidth: int) -> "BandHermitianMatrix":
        dense = np.asarray(dense, dtype=complex)
        n = dense.shape[0]
        diags = np.zeros((bandwidth + 1, n), dtype=complex)
        for d in range(bandwidth + 1):
            idx = np.arange(n - d)
            diags[d, :n - d] = dense[idx + d, idx]
        return cls(order=n, bandwidth=bandwidth, diagonals=diags)


@dataclass(frozen=True)
class BandLdl:
    """Unit-lower-triangular band factor and positive diagonal, M = L D L^H."""

    order: int
    bandwidth: int
    lower: np.ndarray  # (bandwidth + 1, order); lower[0] == 1
    d: np.ndarray      # (order,) real positive

    def l_dense(self) -> np.ndarray:
        n, q = self.order, self.bandwidth
        m = np.zeros((n, n), dtype=complex)
        for u in range(q + 1):
            idx = np.arange(n - u)
            m[idx + u, idx] = self.lower[u, :n - u]
        return m

    def reconstruct(self) -> np.ndarray:
        l = self.l_dense()
        return l @ np.diag(self.d) @ l.conj().T


def _band_window_rows(eff) -> np.ndarray:
    """Row-windowed copy of the truncated channel: (n, q+1) with
    w[r, t] = dense[r, r - guard_count + t] where that column exists."""
    n, k_data = eff.dense.shape
    q = eff.q
    pad = np.zeros((n, n + q + 1), dtype=complex)
    pad[:, eff.guard_count:eff.guard_count + k_data] = eff.dense
    s0, s1 = pad.strides
    view = np.lib.stride_tricks.as_strided(pad, shape=(n, q + 1),
                                           strides=(s0 + s1, s1))
    return view.copy()


def band_gram(eff, n0: float, counter: OpCounter | None = None) -> BandHermitianMatrix:
    """M = Hu Hu^H + n0 I restricted to its band, Hu the truncated channel.

    Only the main and q sub-diagonals are formed. The counter is charged per
    band entry with one multiplication per overlapping column and one fewer
    addition, plus one addition per diagonal entry for the noise shift.
    """
    if n0 < 0:
        raise ValueError("noise variance must be nonnegative")
    counter = counter if counter is not None else OpCounter()
    n, k_data = eff.dense.shape
    q = eff.q
    qg = eff.guard_count
    w = _band_window_rows(eff)
    # shifted-window views so all q+1 diagonals contract in one einsum:
    # diags[d, j] = sum_t w[j+d, t] * conj(w[j, t+d])
    rows_pad = np.zeros((n + q, q + 1), dtype=complex)
    rows_pad[:n] = w
    cols_pad = np.zeros((n, 2 * q + 2), dtype=complex)
    cols_pad[:, :q + 1] = np.conj(w)
    sr0, sr1 = rows_pad.strides
    sc0, sc1 = cols_pad.strides
    shifted_rows = np.lib.stride_tricks.as_strided(
        rows_pad, shape=(q + 1, n, q + 1), strides=(sr0, sr0, sr1))
    shifted_cols = np.lib.stride_tricks.as_strided(
        cols_pad, shape=(q + 1, n, q + 1), strides=(sc1, sc0, sc1))
    diags = np.einsum("djt,djt->dj", shifted_rows, shifted_cols)
    diags[0, :] = diags[0, :].real + n0
    dd = np.arange(q + 1)[:, None]
    jj = np.arange(n)[None, :]
    ov = np.minimum(jj - qg + q, k_data - 1) - np.maximum(jj + dd - qg, 0) + 1
    ov = np.clip(ov, 0, None)
    ov[jj + dd > n - 1] = 0
    counter.add(cm=int(ov.sum()), ca=int(np.maximum(ov - 1, 0).sum()) + n)
    return BandHermitianMatrix(order=n, bandwidth=q, diagonals=diags)


def _row_major_pad(lower: np.ndarray) -> np.ndarray:
    """Repack a diag-major band factor as rows: pad[i, 2q + k - i] = L[i, k]."""
    q = lower.shape[0] - 1
    n = lower.shape[1]
    pad = np.zeros((n, 2 * q + 1), dtype=complex)
    for u in range(q + 1):
        pad[u:, 2 * q - u] = lower[u, :n - u]
    return pad


def ldl_band(m: BandHermitianMatrix, counter: OpCounter | None = None) -> BandLdl:
    """Root-free factorization M = L D L^H for a positive definite band matrix.

    Raises LinAlgError on a non-positive pivot (relative tolerance 1e-14
    against the largest diagonal of M).
    """
    counter = counter if counter is not None else OpCounter()
    n, q = m.order, m.bandwidth
    # row-major padded storage, lpad[i, 2q + (k - i)] = L[i, k]; the left
    # q columns stay zero so strided reads of out-of-band entries vanish
    lpad = np.zeros((n, 2 * q + 1), dtype=complex)
    lpad[:, 2 * q] = 1.0
    lflat = lpad.reshape(-1)
    stride_row = 2 * q + 1
    item = lpad.itemsize
    dvec = np.zeros(n)
    tol = 1e-14 * float(np.max(np.abs(m.diagonals[0].real))) if n else 0.0
    us_all = np.arange(0, q + 1)
    for j in range(n):
        kmin = max(0, j - q)
        width = j - kmin
        row_j = lpad[j, 2 * q - width:2 * q]
        v = dvec[kmin:j] * np.conj(row_j)
        counter.add(cm=width)
        dj = float((m.diagonals[0, j] - row_j @ v).real)
        counter.add(cm=width, ca=width)
        if dj <= tol:
            raise np.linalg.LinAlgError(
                f"matrix is not positive definite at pivot {j} (d = {dj:.3e})")
        dvec[j] = dj
        r = min(q, n - 1 - j)
        if r:
            col_m = m.diagonals[1:r + 1, j]
            if width:
                # block[a, b] = L[j+1+a, kmin+b], a strided window over lpad
                base = (j + 1) * stride_row + 2 * q + kmin - j - 1
                block = np.lib.stride_tricks.as_strided(
                    lflat[base:], shape=(r, width),
                    strides=((stride_row - 1) * item, item))
                acc = block @ v
            else:
                acc = 0.0
            lcol = (col_m - acc) / dj
            lpad[np.arange(j + 1, j + r + 1), 2 * q - 1 - np.arange(r)] = lcol
            tcounts = np.clip(np.minimum(width, q - 1 - us_all[:r]), 0, None)
            counter.add(cm=int(tcounts.sum()), ca=int(tcounts.sum()), cd=r)
    lower = np.zeros((q + 1, n), dtype=complex)
    for u in range(q + 1):
        lower[u, :n - u] = lpad[u:, 2 * q - u]
    return BandLdl(order=n, bandwidth=q, lower=lower, d=dvec)


def solve_band(fact: BandLdl, y, counter: OpCounter | None = None) -> np.ndarray:
    """Solve L D L^H x = y by band forward / diagonal / backward substitution."""
    counter = counter if counter is not None else OpCounter()
    n, q = fact.order, fact.bandwidth
    y = np.asarray(y, dtype=complex)
    if y.shape != (n,):
        raise ValueError(f"expected right-hand side of length {n}")
    if np.any(fact.d == 0):
        raise np.linalg.LinAlgError("zero diagonal entry in the factorization")
    lband = fact.lower
    lpad = _row_major_pad(lband)
    f = np.empty(n, dtype=complex)
    cm_fwd = 0
    for i in range(n):
        t = i - max(0, i - q)
        acc = lpad[i, 2 * q - t:2 * q] @ f[i - t:i] if t else 0.0
        f[i] = y[i] - acc
        cm_fwd += t
    counter.add(cm=cm_fwd, ca=cm_fwd)
    g = f / fact.d
    counter.add(cd=n)
    x = np.empty(n, dtype=complex)
    cm_bwd = 0
    for i in range(n - 1, -1, -1):
        r = min(q, n - 1 - i)
        acc = np.conj(lband[1:r + 1, i]) @ x[i + 1:i + 1 + r] if r else 0.0
        x[i] = g[i] - acc
        cm_bwd += r
    counter.add(cm=cm_bwd, ca=cm_bwd)
    return x
