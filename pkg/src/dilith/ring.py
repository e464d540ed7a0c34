"""Arithmetic in R_q = Z_q[X]/(X^n + 1) for NTT-friendly moduli.

The ring is parametrised by an odd prime q and a power-of-two dimension n
with q = 1 mod 2n.  Under that congruence Z_q contains a primitive 2n-th
root of unity w, and evaluating a polynomial at the odd powers
w, w^3, ..., w^(2n-1) is an algebra isomorphism R_q -> Z_q^n.  The forward
and inverse transforms here implement exactly that evaluation map (and its
n^-1-scaled inverse), in O(n log n) butterfly form, so that negacyclic
multiplication reduces to a pointwise product.

Coefficients are stored as residues in [0, q) in int64 numpy arrays.
Products of residues can reach 100 bits for q up to 2^50, which does not
fit in int64; `mulmod` therefore computes an approximate quotient in
float64 and corrects it, a Barrett-style reduction that is bit-exact for
q < 2^50 (checked against big-integer arithmetic in the test suite).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy


class NotPrime(ValueError):
    """Modulus is not an odd prime."""


class NotPowerOfTwo(ValueError):
    """Ring dimension is not a power of two."""


class BadCongruence(ValueError):
    """q != 1 mod 2n, so no primitive 2n-th root of unity exists."""


class DimensionMismatch(ValueError):
    """Element length does not match the ring dimension."""


class StreamExhausted(RuntimeError):
    """A sampler consumed an implausible amount of XOF output."""


_MAX_LOG2_Q = 50  # mulmod's float-assisted reduction is exact below this


def mulmod(a: np.ndarray, b, q: int) -> np.ndarray:
    """Element-wise a*b mod q on int64 arrays, exact for q < 2^50.

    The quotient is estimated in float64 (error at most 1 for q < 2^50)
    and the remainder is recovered through wrapping uint64 arithmetic,
    then corrected into [0, q).
    """
    a64 = np.asarray(a, dtype=np.int64)
    b64 = np.asarray(b, dtype=np.int64)
    quo = np.floor(a64.astype(np.float64) * b64.astype(np.float64) / float(q))
    with np.errstate(over="ignore"):
        wide = a64.astype(np.uint64) * b64.astype(np.uint64)
        wide -= quo.astype(np.uint64) * np.uint64(q)
    r = wide.astype(np.int64)
    r = np.where(r < 0, r + q, r)
    r = np.where(r >= q, r - q, r)
    return r


def mod_pm(r: int, alpha: int) -> int:
    """Centred representative of r modulo alpha.

    Odd alpha maps into [-(alpha-1)/2, (alpha-1)/2]; even alpha uses the
    half-open range (-alpha/2, alpha/2] so that the upper boundary alpha/2
    is kept (mod_pm(alpha//2, alpha) == alpha//2).
    """
    r = r % alpha
    half = alpha // 2 if alpha % 2 == 0 else (alpha - 1) // 2
    return r - alpha if r > half else r


def mod_pm_vec(arr: np.ndarray, alpha: int) -> np.ndarray:
    """Vectorised mod_pm with the same even/odd range conventions."""
    r = np.mod(arr, alpha)
    half = alpha // 2 if alpha % 2 == 0 else (alpha - 1) // 2
    return np.where(r > half, r - alpha, r)


@dataclass(frozen=True, eq=False)
class RingElement:
    """A polynomial of R_q: n coefficients stored as residues in [0, q)."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    def __eq__(self, other):
        return isinstance(other, RingElement) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"RingElement({self.coeffs.tolist()})"


@dataclass(frozen=True, eq=False)
class RingVector:
    """A fixed-length vector over R_q."""

    elems: tuple[RingElement, ...]

    def __len__(self):
        return len(self.elems)

    def __getitem__(self, i):
        return self.elems[i]

    def __iter__(self):
        return iter(self.elems)

    def __eq__(self, other):
        return (
            isinstance(other, RingVector)
            and len(self.elems) == len(other.elems)
            and all(a == b for a, b in zip(self.elems, other.elems))
        )


@dataclass(frozen=True, eq=False)
class RingContext:
    """Precomputed data for one (q, n) ring: root of unity and twiddles."""

    q: int
    n: int
    g: int  # smallest generator of the multiplicative group of Z_q
    w: int  # primitive 2n-th root of unity, w = g^((q-1)/(2n))
    n_inv: int
    # transform tables
    psi: np.ndarray  # w^j, the pre-multiplication twist
    psi_inv_scaled: np.ndarray  # n^-1 * w^-j, inverse untwist with scaling folded in
    fwd_twiddles: tuple[np.ndarray, ...]  # per-stage powers of w^2
    inv_twiddles: tuple[np.ndarray, ...]  # per-stage powers of w^-2
    bitrev: np.ndarray

    def element(self, coeffs) -> RingElement:
        """Build an element from any integer sequence, reducing mod q."""
        arr = np.asarray([c % self.q for c in coeffs], dtype=np.int64)
        if arr.shape != (self.n,):
            raise DimensionMismatch(f"expected {self.n} coefficients, got {arr.shape}")
        return RingElement(arr)

    def zero(self) -> RingElement:
        return RingElement(np.zeros(self.n, dtype=np.int64))

    def one(self) -> RingElement:
        arr = np.zeros(self.n, dtype=np.int64)
        arr[0] = 1
        return RingElement(arr)

    def vector(self, elems) -> RingVector:
        return RingVector(tuple(elems))


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


@lru_cache(maxsize=None)
def make_ring(q: int, n: int) -> RingContext:
    """Construct the ring context for (q, n), validating all preconditions.

    The generator g is found by ascending search, certified by checking
    g^((q-1)/p) != 1 for every prime factor p of q-1 (factored with sympy).
    """
    if n < 2 or n & (n - 1) != 0:
        raise NotPowerOfTwo(f"n = {n} is not a power of two >= 2")
    if q % 2 == 0 or not sympy.isprime(q):
        raise NotPrime(f"q = {q} is not an odd prime")
    if q.bit_length() > _MAX_LOG2_Q:
        raise NotPrime(f"q = {q} exceeds the supported 2^{_MAX_LOG2_Q} bound")
    if q % (2 * n) != 1:
        raise BadCongruence(f"q = {q} is not 1 mod 2n = {2 * n}")

    prime_factors = list(sympy.factorint(q - 1))
    g = 2
    while any(pow(g, (q - 1) // p, q) == 1 for p in prime_factors):
        g += 1
    w = pow(g, (q - 1) // (2 * n), q)
    # order 2n: w^n = -1 rules out every proper power-of-two divisor
    assert pow(w, n, q) == q - 1 and pow(w, 2 * n, q) == 1

    w2 = pow(w, 2, q)
    w2_inv = pow(w2, -1, q)
    psi = np.array([pow(w, j, q) for j in range(n)], dtype=np.int64)
    n_inv = pow(n, -1, q)
    w_inv = pow(w, -1, q)
    psi_inv_scaled = np.array(
        [n_inv * pow(w_inv, j, q) % q for j in range(n)], dtype=np.int64
    )

    def stages(root: int) -> tuple[np.ndarray, ...]:
        out = []
        m = 2
        while m <= n:
            base = pow(root, n // m, q)
            out.append(np.array([pow(base, j, q) for j in range(m // 2)], dtype=np.int64))
            m *= 2
        return tuple(out)

    return RingContext(
        q=q,
        n=n,
        g=g,
        w=w,
        n_inv=n_inv,
        psi=psi,
        psi_inv_scaled=psi_inv_scaled,
        fwd_twiddles=stages(w2),
        inv_twiddles=stages(w2_inv),
        bitrev=_bit_reverse_indices(n),
    )


def _dit_transform(ctx: RingContext, arr: np.ndarray, twiddles) -> np.ndarray:
    """Cyclic DFT of the last axis, natural order in and out."""
    q = ctx.q
    x = arr[..., ctx.bitrev]
    for tw in twiddles:
        half = tw.shape[0]
        m = 2 * half
        x = x.reshape(arr.shape[:-1] + (ctx.n // m, m))
        even = x[..., :half]
        t = mulmod(x[..., half:], tw, q)
        x = np.concatenate(((even + t) % q, (even - t) % q), axis=-1)
    return x.reshape(arr.shape)


def ntt_forward_batch(ctx: RingContext, arr: np.ndarray) -> np.ndarray:
    """Forward transform of one or more elements stacked on the last axis."""
    if arr.shape[-1] != ctx.n:
        raise DimensionMismatch(f"expected last axis {ctx.n}, got {arr.shape[-1]}")
    return _dit_transform(ctx, mulmod(arr, ctx.psi, ctx.q), ctx.fwd_twiddles)


def ntt_inverse_batch(ctx: RingContext, arr: np.ndarray) -> np.ndarray:
    if arr.shape[-1] != ctx.n:
        raise DimensionMismatch(f"expected last axis {ctx.n}, got {arr.shape[-1]}")
    x = _dit_transform(ctx, arr, ctx.inv_twiddles)
    return mulmod(x, ctx.psi_inv_scaled, ctx.q)


def ntt_forward(ctx: RingContext, a: RingElement) -> RingElement:
    """Evaluate a at the odd powers of w; a ring isomorphism onto Z_q^n."""
    return RingElement(ntt_forward_batch(ctx, a.coeffs))


def ntt_inverse(ctx: RingContext, a_hat: RingElement) -> RingElement:
    """Exact inverse of ntt_forward."""
    return RingElement(ntt_inverse_batch(ctx, a_hat.coeffs))


def ring_add(ctx: RingContext, a: RingElement, b: RingElement) -> RingElement:
    return RingElement((a.coeffs + b.coeffs) % ctx.q)


def ring_sub(ctx: RingContext, a: RingElement, b: RingElement) -> RingElement:
    return RingElement((a.coeffs - b.coeffs) % ctx.q)


def ring_mul(ctx: RingContext, a: RingElement, b: RingElement) -> RingElement:
    """Negacyclic product via forward transform, pointwise multiply, inverse."""
    ah = ntt_forward_batch(ctx, a.coeffs)
    bh = ntt_forward_batch(ctx, b.coeffs)
    return RingElement(ntt_inverse_batch(ctx, mulmod(ah, bh, ctx.q)))


def schoolbook_mul(ctx: RingContext, a: RingElement, b: RingElement) -> RingElement:
    """O(n^2) negacyclic product, the transform-free oracle.

    The full convolution is computed exactly by splitting each coefficient
    into two halves so every partial convolution fits in int64, then
    recombining with Python integers before reducing mod X^n + 1 and q.
    """
    if a.coeffs.shape != (ctx.n,) or b.coeffs.shape != (ctx.n,):
        raise DimensionMismatch("operand dimension mismatch")
    shift = (ctx.q.bit_length() + 1) // 2
    mask = (1 << shift) - 1
    a_lo, a_hi = a.coeffs & mask, a.coeffs >> shift
    b_lo, b_hi = b.coeffs & mask, b.coeffs >> shift
    hh = np.convolve(a_hi, b_hi)
    mid = np.convolve(a_hi, b_lo) + np.convolve(a_lo, b_hi)
    ll = np.convolve(a_lo, b_lo)
    full = [
        (int(hh[i]) << (2 * shift)) + (int(mid[i]) << shift) + int(ll[i])
        for i in range(2 * ctx.n - 1)
    ]
    full.append(0)
    out = [(full[i] - full[i + ctx.n]) % ctx.q for i in range(ctx.n)]
    return RingElement(np.array(out, dtype=np.int64))


def inf_norm(ctx: RingContext, v: RingElement | RingVector) -> int:
    """Max over coefficients of |mod_pm(., q)|; for vectors, over components."""
    if isinstance(v, RingVector):
        return max((inf_norm(ctx, e) for e in v), default=0)
    return int(np.abs(mod_pm_vec(v.coeffs, ctx.q)).max())


class XofStream:
    """Deterministic extendable byte/bit stream from a (seed, tag) pair.

    Backed by SHAKE-256 over the length-prefixed tag followed by the seed,
    so distinct tags give independent streams and equal inputs replay
    identically.  Bits are consumed LSB-first from the byte stream; `read`
    is byte-aligned and intended for use before any bit-level draws.
    """

    _CAP = 1 << 31  # safety valve: a correct caller never gets near this

    def __init__(self, seed: bytes, tag: bytes):
        h = hashlib.shake_256()
        h.update(len(tag).to_bytes(2, "little"))
        h.update(tag)
        h.update(seed)
        self._h = h
        self._buf = b""
        self._bitpos = 0

    def _ensure(self, nbytes: int) -> None:
        if nbytes > self._CAP:
            raise StreamExhausted(f"stream would exceed {self._CAP} bytes")
        if len(self._buf) < nbytes:
            self._buf = self._h.digest(max(nbytes, 2 * len(self._buf), 256))

    def read(self, nbytes: int) -> bytes:
        if self._bitpos % 8 != 0:
            raise ValueError("byte read from bit-misaligned stream")
        start = self._bitpos // 8
        self._ensure(start + nbytes)
        self._bitpos += 8 * nbytes
        return self._buf[start : start + nbytes]

    def bits(self, width: int) -> int:
        """Next `width` bits as an unsigned integer, LSB-first."""
        if not 1 <= width <= 52:
            raise ValueError("chunk width out of range")
        end = self._bitpos + width
        self._ensure((end + 7) // 8)
        byte0 = self._bitpos // 8
        # width <= 52 and an offset < 8 always fit inside eight bytes
        window = int.from_bytes(self._buf[byte0 : byte0 + 8], "little")
        val = (window >> (self._bitpos % 8)) & ((1 << width) - 1)
        self._bitpos = end
        return val

    def bit_chunks(self, width: int, count: int) -> np.ndarray:
        """Next count*width bits as `count` unsigned ints of `width` bits."""
        if not 1 <= width <= 52:
            raise ValueError("chunk width out of range")
        start, total = self._bitpos, width * count
        end = start + total
        self._ensure((end + 7) // 8)
        raw = np.frombuffer(self._buf[start // 8 : (end + 7) // 8], dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[start % 8 : start % 8 + total]
        weights = np.power(2.0, np.arange(width))
        vals = bits.reshape(count, width).astype(np.float64) @ weights
        self._bitpos = end
        return vals.astype(np.int64)

    def rewind_bits(self, nbits: int) -> None:
        """Give back the most recent `nbits` bits (used by batched rejection)."""
        if nbits < 0 or nbits > self._bitpos:
            raise ValueError("cannot rewind past the start of the stream")
        self._bitpos -= nbits


def _sample_rejection(stream: XofStream, count: int, width: int, bound: int) -> np.ndarray:
    """First `count` chunk draws below `bound`, consuming exactly the bits used.

    Chunks of `width` bits are drawn in order and values >= bound are
    rejected; any over-read past the draw that completes the sample is
    rewound so a shared stream continues deterministically.
    """
    accept = bound / float(1 << width)
    out = np.empty(count, dtype=np.int64)
    filled = 0
    while filled < count:
        want = count - filled
        batch = int(want / accept) + 16
        chunk = stream.bit_chunks(width, batch)
        good = np.flatnonzero(chunk < bound)
        if good.shape[0] >= want:
            last = good[want - 1]
            stream.rewind_bits((batch - 1 - int(last)) * width)
            out[filled:] = chunk[good[:want]]
            return out
        out[filled : filled + good.shape[0]] = chunk[good]
        filled += good.shape[0]
    return out


def sample_uniform_ring(stream: XofStream, ctx: RingContext) -> RingElement:
    """Uniform element of R_q by rejection from ceil(log2 q)-bit chunks."""
    vals = _sample_rejection(stream, ctx.n, ctx.q.bit_length(), ctx.q)
    return RingElement(vals)


def sample_bounded(stream: XofStream, ctx: RingContext, eta: int) -> RingElement:
    """Uniform element of S_eta, coefficients in [-eta, eta] as residues."""
    if eta < 1 or 2 * eta + 1 > ctx.q:
        raise ValueError(f"eta = {eta} out of range for q = {ctx.q}")
    m = 2 * eta + 1
    vals = _sample_rejection(stream, ctx.n, (m - 1).bit_length(), m)
    return RingElement((vals - eta) % ctx.q)
