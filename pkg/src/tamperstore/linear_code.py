"""Binary linear codes exposing syndrome computation and syndrome decoding.

Three families are registered:

* table codes (n <= 24): exhaustive coset-leader decoding, exact;
* primitive narrow-sense BCH codes with Berlekamp-Massey decoding, for
  moderate lengths;
* concatenated codes, shortened Reed-Solomon over GF(2^8) outside and a
  first-order Reed-Muller [128, 8, 64] inside, for the large guaranteed
  correction radii the protocol recipe needs (a fraction of n close to
  1/8 at small message lengths, which no moderate-length BCH reaches).

``t_corr`` is a guarantee: every error pattern of weight <= t_corr is
decoded exactly.  Heavier patterns may decode to a wrong pattern or
return failure (None); failure is a value, not an exception.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import Bits
from .gf2 import GF2Field, _prime_factors

_RM_M = 7  # inner Reed-Muller order parameter: [2^m, m+1, 2^(m-1)]


class NoCodeError(ValueError):
    """No registered code reaches the requested parameters."""

    def __init__(self, message: str, best: "CodeSpec | None" = None):
        super().__init__(message)
        self.best = best


# ---------------------------------------------------------------------------
# GF(2) linear algebra on 0/1 numpy arrays
# ---------------------------------------------------------------------------

def gf2_row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    m = mat.copy() % 2
    pivots = []
    row = 0
    for col in range(m.shape[1]):
        if row == m.shape[0]:
            break
        hit = np.nonzero(m[row:, col])[0]
        if hit.size == 0:
            continue
        m[[row, row + hit[0]]] = m[[row + hit[0], row]]
        others = np.nonzero(m[:, col])[0]
        others = others[others != row]
        m[others] ^= m[row]
        pivots.append(col)
        row += 1
    return m, pivots


def gf2_rank(mat: np.ndarray) -> int:
    return len(gf2_row_reduce(mat)[1])


def gf2_nullspace(mat: np.ndarray) -> np.ndarray:
    """Rows form a basis of the right null space."""
    reduced, pivots = gf2_row_reduce(mat)
    n = mat.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = reduced[r, fc]
    return basis


def gf2_right_inverse(mat: np.ndarray) -> np.ndarray:
    """B with mat @ B == I (mod 2); requires full row rank."""
    rows, cols = mat.shape
    aug = np.concatenate([mat % 2, np.eye(rows, dtype=np.uint8)], axis=1)
    reduced, pivots = gf2_row_reduce(aug)
    pivots = [p for p in pivots if p < cols]
    if len(pivots) != rows:
        raise ValueError("matrix does not have full row rank")
    inv = np.zeros((cols, rows), dtype=np.uint8)
    for r, pc in enumerate(pivots):
        inv[pc] = reduced[r, cols:]
    return inv


# ---------------------------------------------------------------------------
# GF(2^m) symbol arithmetic via exp/log tables
# ---------------------------------------------------------------------------

class GFTable:
    """Exp/log tables over GF(2^m) with a deterministically chosen generator."""

    def __init__(self, m: int):
        self.m = m
        self.field = GF2Field(m)
        self.order = (1 << m) - 1
        factors = _prime_factors(self.order)
        gen = None
        for cand in range(2, 1 << m):
            if all(self.field.pow_int(cand, self.order // p) != 1 for p in factors):
                gen = cand
                break
        self.generator = gen
        exp = np.empty(2 * self.order, dtype=np.int64)
        acc = 1
        for i in range(self.order):
            exp[i] = acc
            acc = self.field.mul_int(acc, gen)
        exp[self.order :] = exp[: self.order]
        self.exp = exp
        log = np.zeros(1 << m, dtype=np.int64)
        log[exp[: self.order]] = np.arange(self.order)
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero symbol")
        return int(self.exp[self.order - self.log[a]])

    def pow_alpha(self, e: int) -> int:
        """generator ** e for any integer e."""
        return int(self.exp[e % self.order])

    def poly_eval(self, coeffs: list[int], x: int) -> int:
        """Evaluate sum coeffs[i] * x^i (Horner)."""
        acc = 0
        for c in reversed(coeffs):
            acc = self.mul(acc, x) ^ c
        return acc


@lru_cache(maxsize=None)
def _gf_table(m: int) -> GFTable:
    return GFTable(m)


def _berlekamp_massey(table: GFTable, syndromes: list[int]) -> list[int]:
    """Minimal LFSR (error locator) for the given syndrome sequence."""
    C, B = [1], [1]
    L, shift, b = 0, 1, 1
    for n, sn in enumerate(syndromes):
        d = sn
        for i in range(1, L + 1):
            if i < len(C):
                d ^= table.mul(C[i], syndromes[n - i])
        if d == 0:
            shift += 1
            continue
        coef = table.mul(d, table.inv(b))
        T = list(C)
        C = C + [0] * max(0, len(B) + shift - len(C))
        for i, bi in enumerate(B):
            C[i + shift] ^= table.mul(coef, bi)
        if 2 * L <= n:
            L = n + 1 - L
            B, b, shift = T, d, 1
        else:
            shift += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C if len(C) - 1 == L else []


# ---------------------------------------------------------------------------
# code interface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CodeSpec:
    """Registry entry: parameters plus a constructor key."""

    name: str
    n: int
    kappa: int
    t_corr: int
    family: str

    @property
    def ratio(self) -> float:
        return self.t_corr / self.n


class LinearCode:
    name: str
    n: int
    kappa: int
    t_corr: int

    def syn(self, x: Bits) -> Bits:
        raise NotImplementedError

    def syn_dec(self, s: Bits) -> Bits | None:
        raise NotImplementedError

    @property
    def syndrome_len(self) -> int:
        return self.n - self.kappa

    def _check_word(self, x: Bits) -> None:
        if x.length != self.n:
            raise ValueError(f"word length {x.length}, expected {self.n}")

    def _check_syndrome(self, s: Bits) -> None:
        if s.length != self.syndrome_len:
            raise ValueError(f"syndrome length {s.length}, expected {self.syndrome_len}")

    def parity_check_matrix(self) -> np.ndarray:
        raise NotImplementedError

    def export_parity_check(self, path) -> None:
        h = self.parity_check_matrix()
        with open(path, "w") as fh:
            for row in h:
                fh.write("".join(str(int(v)) for v in row) + "\n")

    @property
    def spec(self) -> CodeSpec:
        return CodeSpec(self.name, self.n, self.kappa, self.t_corr, type(self).__name__)

    def __repr__(self):
        return f"{type(self).__name__}({self.name}: n={self.n}, k={self.kappa}, t={self.t_corr})"


class MatrixCode(LinearCode):
    """Code defined by an explicit parity-check matrix; exhaustive coset table.

    Only for n <= 24.  The decoder is exact: it returns the minimum-weight
    pattern in the syndrome's coset, or failure when that pattern is
    heavier than the guaranteed radius.
    """

    MAX_N = 24

    def __init__(self, h: np.ndarray, name: str = ""):
        h = np.asarray(h, dtype=np.uint8) % 2
        if h.shape[1] > self.MAX_N:
            raise ValueError(f"table decoding capped at n = {self.MAX_N}")
        if gf2_rank(h) != h.shape[0]:
            raise ValueError("parity-check matrix must have full row rank")
        self._h = h
        self.n = int(h.shape[1])
        self.kappa = self.n - int(h.shape[0])
        self.name = name or f"matrix({self.n},{self.kappa})"
        self._columns = np.array(
            [sum(int(b) << i for i, b in enumerate(col)) for col in h.T], dtype=np.int64
        )
        self._leaders = self._build_coset_table()
        d = self._min_distance()
        self.t_corr = (d - 1) // 2

    def _syndrome_int(self, pattern: int) -> int:
        s = 0
        p = pattern
        while p:
            low = p & -p
            s ^= int(self._columns[low.bit_length() - 1])
            p ^= low
        return s

    def _build_coset_table(self) -> np.ndarray:
        size = 1 << (self.n - self.kappa)
        leaders = np.full(size, -1, dtype=np.int64)
        leaders[0] = 0
        found = 1
        for weight in range(1, self.n + 1):
            if found == size:
                break
            for positions in itertools.combinations(range(self.n), weight):
                pattern = sum(1 << p for p in positions)
                s = self._syndrome_int(pattern)
                if leaders[s] < 0:
                    leaders[s] = pattern
                    found += 1
                    if found == size:
                        break
        return leaders

    def _min_distance(self) -> int:
        gen = gf2_nullspace(self._h)
        best = self.n
        for msg in range(1, 1 << gen.shape[0]):
            cw = np.zeros(self.n, dtype=np.uint8)
            m = msg
            while m:
                low = m & -m
                cw ^= gen[low.bit_length() - 1]
                m ^= low
            best = min(best, int(cw.sum()))
        return best

    def syn(self, x: Bits) -> Bits:
        self._check_word(x)
        return Bits(self._syndrome_int(x.value), self.syndrome_len)

    def syn_dec(self, s: Bits) -> Bits | None:
        self._check_syndrome(s)
        leader = int(self._leaders[s.value])
        if leader.bit_count() > self.t_corr:
            return None
        return Bits(leader, self.n)

    def parity_check_matrix(self) -> np.ndarray:
        return self._h.copy()

    @classmethod
    def from_parity_check_file(cls, path, name: str = "") -> "MatrixCode":
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([int(c) for c in line])
        return cls(np.array(rows, dtype=np.uint8), name)


def repetition_code(n: int) -> MatrixCode:
    if n < 3 or n % 2 == 0:
        raise ValueError("repetition length must be odd and >= 3")
    h = np.zeros((n - 1, n), dtype=np.uint8)
    h[:, 0] = 1
    h[np.arange(n - 1), np.arange(1, n)] = 1
    return MatrixCode(h, f"repetition({n})")


def hamming_code(r: int) -> MatrixCode:
    """Hamming code with parameters (2^r - 1, 2^r - 1 - r)."""
    n = (1 << r) - 1
    h = np.array([[(i >> b) & 1 for i in range(1, n + 1)] for b in range(r)], np.uint8)
    return MatrixCode(h, f"hamming({n},{n - r})")


def golay_code() -> MatrixCode:
    """The perfect binary (23, 12, 7) code, built from its cyclic generator."""
    g = 0b101011100011  # x^11 + x^9 + x^7 + x^6 + x^5 + x + 1
    rows = []
    for i in range(12):
        word = g << i
        rows.append([(word >> b) & 1 for b in range(23)])
    gen = np.array(rows, dtype=np.uint8)
    return MatrixCode(gf2_nullspace(gen), "golay(23,12)")


# ---------------------------------------------------------------------------
# primitive narrow-sense BCH codes
# ---------------------------------------------------------------------------

def _cyclotomic_cosets(n: int, upto: int) -> list[list[int]]:
    seen = set()
    cosets = []
    for j in range(1, upto + 1):
        if j in seen:
            continue
        coset, cur = [], j
        while cur not in coset:
            coset.append(cur)
            seen.add(cur)
            cur = (cur * 2) % n
        cosets.append(coset)
    return cosets


def bch_dimension(m: int, t: int) -> int:
    """Message length of the (2^m - 1) BCH code with designed radius t."""
    n = (1 << m) - 1
    return n - sum(len(c) for c in _cyclotomic_cosets(n, 2 * t))


class BchCode(LinearCode):
    def __init__(self, m: int, t: int):
        self.m = m
        self.t = t
        self.n = (1 << m) - 1
        if not 1 <= t <= self.n // 2:
            raise ValueError("designed radius out of range")
        self.table = _gf_table(m)
        gen_poly = [1]
        for coset in _cyclotomic_cosets(self.n, 2 * t):
            for j in coset:
                root = self.table.pow_alpha(j)  # multiply by (X + alpha^j)
                gen_poly = [
                    (gen_poly[i - 1] if i > 0 else 0)
                    ^ self.table.mul(root, gen_poly[i] if i < len(gen_poly) else 0)
                    for i in range(len(gen_poly) + 1)
                ]
        if any(c not in (0, 1) for c in gen_poly):
            raise AssertionError("generator polynomial not binary")
        self._gen_int = sum(c << i for i, c in enumerate(gen_poly))
        self.kappa = self.n - (len(gen_poly) - 1)
        if self.kappa <= 0:
            raise ValueError("degenerate BCH code (kappa <= 0)")
        self.t_corr = t
        self.name = f"bch({self.n},{self.kappa},t={t})"

    def syn(self, x: Bits) -> Bits:
        self._check_word(x)
        from .gf2 import poly_divmod

        return Bits(poly_divmod(x.value, self._gen_int)[1], self.syndrome_len)

    def _power_syndromes(self, s: Bits) -> list[int]:
        positions = [i for i in range(s.length) if (s.value >> i) & 1]
        out = []
        for j in range(1, 2 * self.t + 1):
            acc = 0
            for p in positions:
                acc ^= self.table.pow_alpha(j * p)
            out.append(acc)
        return out

    def syn_dec(self, s: Bits) -> Bits | None:
        self._check_syndrome(s)
        if s.value == 0:
            return Bits.zeros(self.n)
        synd = self._power_syndromes(s)
        if all(v == 0 for v in synd):
            # nonzero remainder cannot be error-free within the designed radius
            return None
        locator = _berlekamp_massey(self.table, synd)
        if not locator or len(locator) - 1 > self.t:
            return None
        degree = len(locator) - 1
        pattern = 0
        roots = 0
        for i in range(self.n):
            if self.table.poly_eval(locator, self.table.pow_alpha(-i)) == 0:
                pattern |= 1 << i
                roots += 1
        if roots != degree:
            return None
        err = Bits(pattern, self.n)
        if self.syn(err) != s:
            return None
        return err

    def parity_check_matrix(self) -> np.ndarray:
        # syndrome map x -> x mod g as an explicit matrix
        from .gf2 import poly_divmod

        cols = []
        for i in range(self.n):
            rem = poly_divmod(1 << i, self._gen_int)[1]
            cols.append([(rem >> b) & 1 for b in range(self.syndrome_len)])
        return np.array(cols, dtype=np.uint8).T


# ---------------------------------------------------------------------------
# concatenated code: shortened Reed-Solomon outside, first-order RM inside
# ---------------------------------------------------------------------------

class _InnerRM:
    """First-order Reed-Muller [2^m, m+1, 2^(m-1)] with exact ML decoding."""

    def __init__(self, m: int = _RM_M):
        self.m = m
        self.n = 1 << m
        self.k = m + 1
        self.t_corr = (1 << (m - 1)) // 2 - 1
        v = np.arange(self.n)
        rows = [np.ones(self.n, dtype=np.uint8)]
        for j in range(m):
            rows.append(((v >> j) & 1).astype(np.uint8))
        self.gen = np.array(rows)  # k x n
        self.extract = np.zeros((self.k, self.n), dtype=np.uint8)  # msg from codeword
        self.extract[0, 0] = 1
        for j in range(m):
            self.extract[j + 1, 0] = 1
            self.extract[j + 1, 1 << j] = 1
        self.h = gf2_nullspace(self.gen)  # (n-k) x n
        self.preimage = gf2_right_inverse(self.h)  # n x (n-k)

    def encode(self, msgs: np.ndarray) -> np.ndarray:
        """(N, k) messages -> (N, n) codewords."""
        return (msgs.astype(np.int16) @ self.gen.astype(np.int16)) % 2

    def decode_ml(self, words: np.ndarray) -> np.ndarray:
        """(N, n) words -> (N, k) nearest-codeword messages, by Hadamard transform."""
        T = (1 - 2 * words.astype(np.int32)).copy()
        N, n = T.shape
        h = 1
        while h < n:
            T = T.reshape(N, n // (2 * h), 2, h)
            a = T[:, :, 0, :].copy()
            b = T[:, :, 1, :].copy()
            T[:, :, 0, :] = a + b
            T[:, :, 1, :] = a - b
            T = T.reshape(N, n)
            h *= 2
        best = np.argmax(np.abs(T), axis=1)
        signs = T[np.arange(N), best] < 0
        msgs = np.zeros((N, self.k), dtype=np.uint8)
        msgs[:, 0] = signs
        for j in range(self.m):
            msgs[:, j + 1] = (best >> j) & 1
        return msgs


@lru_cache(maxsize=None)
def _inner_rm(m: int = _RM_M) -> _InnerRM:
    return _InnerRM(m)


class RmRsCode(LinearCode):
    """Concatenation: shortened RS(N, K) over GF(2^8) outside, RM(1,7) inside.

    A block contributes a wrong outer symbol only when it holds more than
    the inner radius of errors, so every pattern of weight up to
    (t_out + 1) * (t_in + 1) - 1 is corrected.
    """

    def __init__(self, outer_n: int, outer_k: int):
        inner = _inner_rm()
        self.inner = inner
        symbol_bits = inner.k
        self.table = _gf_table(symbol_bits)
        if not 1 <= outer_k < outer_n <= self.table.order:
            raise ValueError("outer parameters out of range")
        self.outer_n = outer_n
        self.outer_k = outer_k
        self.redundancy = outer_n - outer_k
        self.t_out = self.redundancy // 2
        self.n = outer_n * inner.n
        self.kappa = outer_k * symbol_bits
        self.t_corr = (self.t_out + 1) * (inner.t_corr + 1) - 1
        self.name = f"rs({outer_n},{outer_k})*rm(1,{inner.m})"
        # LU-style inverse of the syndrome map restricted to the first
        # `redundancy` symbol positions, for syndrome preimages
        r = self.redundancy
        v = np.zeros((r, r), dtype=np.int64)
        for j in range(1, r + 1):
            for i in range(r):
                v[j - 1, i] = self.table.pow_alpha(j * i)
        self._v_inv = self._invert_symbol_matrix(v)
        self._sym_weights = 1 << np.arange(symbol_bits, dtype=np.int64)

    # -- symbol-matrix helpers ------------------------------------------------

    def _invert_symbol_matrix(self, mat: np.ndarray) -> np.ndarray:
        t = self.table
        r = mat.shape[0]
        a = mat.copy()
        inv = np.eye(r, dtype=np.int64)
        for col in range(r):
            piv = next(row for row in range(col, r) if a[row, col] != 0)
            a[[col, piv]] = a[[piv, col]]
            inv[[col, piv]] = inv[[piv, col]]
            scale = t.inv(int(a[col, col]))
            for j in range(r):
                a[col, j] = t.mul(int(a[col, j]), scale)
                inv[col, j] = t.mul(int(inv[col, j]), scale)
            for row in range(r):
                if row != col and a[row, col] != 0:
                    factor = int(a[row, col])
                    for j in range(r):
                        a[row, j] ^= t.mul(factor, int(a[col, j]))
                        inv[row, j] ^= t.mul(factor, int(inv[col, j]))
        return inv

    def _rs_syndromes(self, symbols: np.ndarray) -> np.ndarray:
        t = self.table
        nz = np.nonzero(symbols)[0]
        out = np.zeros(self.redundancy, dtype=np.int64)
        if nz.size == 0:
            return out
        logs = t.log[symbols[nz]]
        for j in range(1, self.redundancy + 1):
            terms = t.exp[(logs + j * nz) % t.order]
            out[j - 1] = np.bitwise_xor.reduce(terms)
        return out

    def _rs_preimage(self, syndromes: np.ndarray) -> np.ndarray:
        """Symbols supported on the first `redundancy` positions hitting them."""
        t = self.table
        out = np.zeros(self.outer_n, dtype=np.int64)
        for i in range(self.redundancy):
            acc = 0
            for j in range(self.redundancy):
                acc ^= t.mul(int(self._v_inv[i, j]), int(syndromes[j]))
            out[i] = acc
        return out

    def _rs_decode(self, symbols: np.ndarray) -> np.ndarray | None:
        """Errors-only bounded-distance decode toward the zero-syndrome codeword."""
        t = self.table
        synd = [int(v) for v in self._rs_syndromes(symbols)]
        if all(v == 0 for v in synd):
            return symbols
        locator = _berlekamp_massey(t, synd)
        if not locator or len(locator) - 1 > self.t_out:
            return None
        degree = len(locator) - 1
        positions = [
            i
            for i in range(self.outer_n)
            if t.poly_eval(locator, t.pow_alpha(-i)) == 0
        ]
        if len(positions) != degree:
            return None
        # Forney: omega = S(X) * locator(X) mod X^redundancy
        omega = [0] * self.redundancy
        for i, s in enumerate(synd):
            if s == 0:
                continue
            for j, lj in enumerate(locator):
                if i + j < self.redundancy and lj:
                    omega[i + j] ^= t.mul(s, lj)
        deriv = [locator[i] if i % 2 == 1 else 0 for i in range(1, len(locator))]
        fixed = symbols.copy()
        for i in positions:
            x_inv = t.pow_alpha(-i)
            num = t.poly_eval(omega, x_inv)
            den = t.poly_eval(deriv, x_inv)
            if den == 0:
                return None
            fixed[i] ^= t.mul(num, t.inv(den))
        if np.any(self._rs_syndromes(fixed)):
            return None
        return fixed

    # -- bit-level interface ----------------------------------------------------

    def _blocks(self, x: Bits) -> np.ndarray:
        return x.to_array().reshape(self.outer_n, self.inner.n)

    def _symbols_of(self, msg_bits: np.ndarray) -> np.ndarray:
        return (msg_bits.astype(np.int64) @ self._sym_weights).astype(np.int64)

    def syn(self, x: Bits) -> Bits:
        self._check_word(x)
        blocks = self._blocks(x)
        inner_syn = (blocks.astype(np.int16) @ self.inner.h.T.astype(np.int16)) % 2
        msgs = (blocks.astype(np.int16) @ self.inner.extract.T.astype(np.int16)) % 2
        outer_syn = self._rs_syndromes(self._symbols_of(msgs))
        inner_bits = Bits.from_array(inner_syn.reshape(-1).astype(np.uint8))
        outer_bits_arr = (
            (outer_syn[:, None] >> np.arange(self.inner.k)[None, :]) & 1
        ).astype(np.uint8)
        return inner_bits.concat(Bits.from_array(outer_bits_arr.reshape(-1)))

    def syn_dec(self, s: Bits) -> Bits | None:
        self._check_syndrome(s)
        if s.value == 0:
            return Bits.zeros(self.n)
        inner_len = self.outer_n * (self.inner.n - self.inner.k)
        arr = s.to_array()
        inner_syn = arr[:inner_len].reshape(self.outer_n, self.inner.n - self.inner.k)
        outer_syn = (
            arr[inner_len:]
            .reshape(self.redundancy, self.inner.k)
            .astype(np.int64)
            @ self._sym_weights
        )
        # candidate word with the requested syndrome
        y0 = (inner_syn.astype(np.int16) @ self.inner.preimage.T.astype(np.int16)) % 2
        msgs0 = (y0.astype(np.int16) @ self.inner.extract.T.astype(np.int16)) % 2
        gap = self._rs_syndromes(self._symbols_of(msgs0))
        gap ^= outer_syn
        delta = self._rs_preimage(gap)
        delta_bits = ((delta[:, None] >> np.arange(self.inner.k)[None, :]) & 1).astype(
            np.uint8
        )
        y0 = (y0 + self.inner.encode(delta_bits)) % 2
        # decode y0 toward the code
        inner_msgs = self.inner.decode_ml(y0)
        fixed = self._rs_decode(self._symbols_of(inner_msgs))
        if fixed is None:
            return None
        fixed_bits = ((fixed[:, None] >> np.arange(self.inner.k)[None, :]) & 1).astype(
            np.uint8
        )
        codeword = self.inner.encode(fixed_bits)
        return Bits.from_array(((y0 + codeword) % 2).reshape(-1).astype(np.uint8))

    def parity_check_matrix(self) -> np.ndarray:
        t = self.table
        k, n1 = self.inner.k, self.inner.n
        rows = np.zeros((self.syndrome_len, self.n), dtype=np.uint8)
        r_in = n1 - k
        for i in range(self.outer_n):
            rows[i * r_in : (i + 1) * r_in, i * n1 : (i + 1) * n1] = self.inner.h
        base = self.outer_n * r_in
        for j in range(1, self.redundancy + 1):
            for i in range(self.outer_n):
                coeff = t.pow_alpha(j * i)
                # bit matrix of multiplication by coeff, composed with extraction
                mult = np.zeros((k, k), dtype=np.uint8)
                for b in range(k):
                    prod = t.mul(coeff, 1 << b)
                    mult[:, b] = [(prod >> bb) & 1 for bb in range(k)]
                block = (mult.astype(np.int16) @ self.inner.extract.astype(np.int16)) % 2
                rows[base + (j - 1) * k : base + j * k, i * n1 : (i + 1) * n1] = block
        return rows


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_BCH_MENU = [(m, t) for m in (4, 5, 6, 7, 8) for t in (1, 2, 3, 5, 7, 11, 15, 21, 27, 31, 43, 55)]
_RMRS_MENU = [
    (n, k)
    for n in (12, 16, 20, 24, 28, 32, 36, 40, 44, 48, 52, 56, 60, 64, 72, 76, 80, 88, 96, 112, 128, 160, 192, 224, 255)
    for k in (2, 3, 4, 5, 6, 8, 10, 12, 16)
    if k < n
]


class CodeRegistry:
    """Parameter search over the three families; construction is lazy."""

    def __init__(self):
        self._specs: list[tuple[CodeSpec, tuple]] = []
        for n in (3, 5, 7, 9, 11):
            self._specs.append(
                (CodeSpec(f"repetition({n})", n, 1, (n - 1) // 2, "MatrixCode"), ("rep", n))
            )
        for r in (3, 4):
            n = (1 << r) - 1
            self._specs.append(
                (CodeSpec(f"hamming({n},{n - r})", n, n - r, 1, "MatrixCode"), ("hamming", r))
            )
        self._specs.append((CodeSpec("golay(23,12)", 23, 12, 3, "MatrixCode"), ("golay",)))
        for m, t in _BCH_MENU:
            n = (1 << m) - 1
            kappa = bch_dimension(m, t)
            if kappa <= 0:
                continue
            self._specs.append(
                (CodeSpec(f"bch({n},{kappa},t={t})", n, kappa, t, "BchCode"), ("bch", m, t))
            )
        inner = 1 << _RM_M
        t_in = (1 << (_RM_M - 1)) // 2 - 1
        for n_out, k_out in _RMRS_MENU:
            t_corr = ((n_out - k_out) // 2 + 1) * (t_in + 1) - 1
            self._specs.append(
                (
                    CodeSpec(
                        f"rs({n_out},{k_out})*rm(1,{_RM_M})",
                        n_out * inner,
                        k_out * (_RM_M + 1),
                        t_corr,
                        "RmRsCode",
                    ),
                    ("rmrs", n_out, k_out),
                )
            )
        self._cache: dict[tuple, LinearCode] = {}

    def specs(self) -> list[CodeSpec]:
        return [spec for spec, _ in self._specs]

    def build(self, spec: CodeSpec) -> LinearCode:
        for candidate, key in self._specs:
            if candidate == spec:
                if key not in self._cache:
                    self._cache[key] = self._construct(key)
                return self._cache[key]
        raise KeyError(spec)

    def by_name(self, name: str) -> LinearCode:
        for candidate, _ in self._specs:
            if candidate.name == name:
                return self.build(candidate)
        raise KeyError(name)

    @staticmethod
    def _construct(key: tuple) -> LinearCode:
        kind = key[0]
        if kind == "rep":
            return repetition_code(key[1])
        if kind == "hamming":
            return hamming_code(key[1])
        if kind == "golay":
            return golay_code()
        if kind == "bch":
            return BchCode(key[1], key[2])
        if kind == "rmrs":
            return RmRsCode(key[1], key[2])
        raise KeyError(key)


_DEFAULT_REGISTRY: CodeRegistry | None = None


def default_registry() -> CodeRegistry:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = CodeRegistry()
    return _DEFAULT_REGISTRY


def choose_code(
    kappa_min: int, beta_corr: float, registry: CodeRegistry | None = None
) -> LinearCode:
    """Smallest registered code with message length >= kappa_min whose
    guaranteed radius fraction t_corr / n is at least beta_corr."""
    if beta_corr >= 0.5:
        raise NoCodeError(f"no code can correct error rate {beta_corr} >= 1/2")
    registry = registry or default_registry()
    feasible = []
    best = None
    for spec in registry.specs():
        if spec.kappa < kappa_min:
            continue
        if best is None or spec.ratio > best.ratio:
            best = spec
        if spec.ratio >= beta_corr:
            feasible.append(spec)
    if not feasible:
        raise NoCodeError(
            f"no registered code has kappa >= {kappa_min} and t/n >= {beta_corr}"
            + (f"; best achievable ratio is {best.ratio:.4f} ({best.name})" if best else ""),
            best,
        )
    winner = min(feasible, key=lambda s: (s.n, -s.t_corr, -s.kappa))
    return registry.build(winner)
