"""The simplified signature scheme: Gen, Sign, Verify over R_q.

Key generation draws the public matrix A and the short secrets from
domain-separated XOF streams, so a 32-byte seed fully determines the key
pair.  Signing is the usual rejection loop: sample a masking vector y,
commit to the high bits of A*y, derive the sparse challenge c from a hash
of that commitment and the message, and accept z = y + c*s1 only when the
two infinity-norm bounds hold.  Everything is deterministic given the
secret key and message, with the per-attempt randomness drawn from a
stream keyed by (signing key, message digest, attempt counter).

This functional scheme keeps t uncompressed: there is no low-order-bit
rounding of the public key and no hint mechanism.  The size formulas in
`estimator` account for the compressed variant; see the README for the
divergence.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import ring
from .params import ParameterSet
from .ring import RingContext, RingElement, RingVector, XofStream

# domain-separation tags for every stream the scheme derives
_TAG_RHO = b"dilith/rho"
_TAG_KEY = b"dilith/K"
_TAG_S1 = b"dilith/s1/"
_TAG_S2 = b"dilith/s2/"
_TAG_A = b"dilith/A/"
_TAG_MSG = b"dilith/msg"
_TAG_Y = b"dilith/y/"
_TAG_BALL = b"dilith/ball"
_TAG_CHAL = b"dilith/chal"

SEED_BYTES = 32
MAX_SIGN_ATTEMPTS = 1024


class BadParams(ValueError):
    """Parameters violate a structural precondition (e.g. 2*gamma2 | q-1)."""


class MaxAttemptsExceeded(RuntimeError):
    """The signing loop hit its attempt cap; parameters are misconfigured."""


@dataclass(frozen=True)
class PublicKey:
    params: ParameterSet
    rho: bytes
    t: RingVector  # length k


@dataclass(frozen=True)
class SecretKey:
    params: ParameterSet
    rho: bytes
    key: bytes  # signing seed K
    s1: RingVector  # length l, inf-norm <= eta
    s2: RingVector  # length k, inf-norm <= eta
    t: RingVector


@dataclass(frozen=True)
class KeyPair:
    pk: PublicKey
    sk: SecretKey


@dataclass(frozen=True)
class Signature:
    z: RingVector  # length l, inf-norm < gamma1 - beta
    c: RingElement  # tau coefficients in {-1, 1}, rest zero


@lru_cache(maxsize=None)
def ring_context(q: int, n: int) -> RingContext:
    return ring.make_ring(q, n)


def _ctx(params: ParameterSet) -> RingContext:
    return ring_context(params.q, params.n)


# ---------------------------------------------------------------------------
# decompose / high bits / low bits


def decompose(r: int, gamma2: int, q: int) -> tuple[int, int]:
    """Split a residue as r = 2*gamma2*high + low mod q with |low| <= gamma2.

    Requires 2*gamma2 | q - 1.  The wrap-around residues just below q fold
    into high = 0 with low shifted down by one, which keeps high inside
    [0, (q-1)/(2*gamma2) - 1].
    """
    alpha = 2 * gamma2
    if (q - 1) % alpha != 0:
        raise BadParams(f"2*gamma2 = {alpha} does not divide q - 1 = {q - 1}")
    r = r % q
    low = ring.mod_pm(r, alpha)
    if r - low == q - 1:
        return 0, low - 1
    return (r - low) // alpha, low


def _decompose_vec(arr: np.ndarray, gamma2: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    alpha = 2 * gamma2
    if (q - 1) % alpha != 0:
        raise BadParams(f"2*gamma2 = {alpha} does not divide q - 1 = {q - 1}")
    low = ring.mod_pm_vec(arr, alpha)
    wrap = (arr - low) == (q - 1)
    high = np.where(wrap, 0, (arr - low) // alpha)
    low = np.where(wrap, low - 1, low)
    return high, low


def high_bits(ctx: RingContext, v: RingVector, gamma2: int) -> RingVector:
    """Coefficient-wise high parts, as small nonnegative residues."""
    out = []
    for e in v:
        hi, _ = _decompose_vec(e.coeffs, gamma2, ctx.q)
        out.append(RingElement(hi))
    return RingVector(tuple(out))


def low_bits(ctx: RingContext, v: RingVector, gamma2: int) -> RingVector:
    """Coefficient-wise centred low parts, re-encoded mod q."""
    out = []
    for e in v:
        _, lo = _decompose_vec(e.coeffs, gamma2, ctx.q)
        out.append(RingElement(np.mod(lo, ctx.q)))
    return RingVector(tuple(out))


def high_bits_width(params: ParameterSet) -> int:
    """Bits per packed high coefficient: ceil(log2((q-1)/(2*gamma2)))."""
    m = (params.q - 1) // (2 * params.gamma2)
    return max((m - 1).bit_length(), 1)


def pack_w1(params: ParameterSet, w1: RingVector) -> bytes:
    """Canonical injective byte encoding of a high-bits vector."""
    width = high_bits_width(params)
    flat = np.concatenate([e.coeffs for e in w1])
    return pack_bits(flat, width)


def pack_bits(values: np.ndarray, width: int) -> bytes:
    """Pack unsigned ints into a little-endian-bit-order byte string."""
    vals = np.asarray(values, dtype=np.int64)
    bits = (vals[:, None] >> np.arange(width, dtype=np.int64)) & 1
    return np.packbits(bits.astype(np.uint8).ravel(), bitorder="little").tobytes()


def unpack_bits(data: bytes, width: int, count: int) -> np.ndarray:
    """Inverse of pack_bits; ignores any padding bits in the final byte."""
    need = (width * count + 7) // 8
    if len(data) < need:
        raise ValueError("bit field shorter than declared")
    bits = np.unpackbits(np.frombuffer(data[:need], dtype=np.uint8), bitorder="little")
    bits = bits[: width * count].reshape(count, width).astype(np.float64)
    return (bits @ np.power(2.0, np.arange(width))).astype(np.int64)


# ---------------------------------------------------------------------------
# challenge sampling


def sample_in_ball(ctx: RingContext, tau: int, seed: bytes) -> RingElement:
    """Polynomial with exactly tau coefficients in {-1, 1}, rest zero.

    Fisher-Yates driven by XofStream(seed, ball tag): positions n-tau..n-1
    each swap with a rejection-sampled index j <= i, and the freed slot
    receives a stream sign bit.
    """
    n, q = ctx.n, ctx.q
    if not 1 <= tau <= n:
        raise ValueError(f"tau = {tau} out of range for n = {n}")
    stream = XofStream(seed, _TAG_BALL)
    width = (n - 1).bit_length()
    c = np.zeros(n, dtype=np.int64)
    for i in range(n - tau, n):
        j = stream.bits(width)
        while j > i:
            j = stream.bits(width)
        sign = stream.bits(1)
        c[i] = c[j]
        c[j] = q - 1 if sign else 1
    return RingElement(c)


def hash_to_challenge(params: ParameterSet, data: bytes) -> RingElement:
    """H: bytes -> B_tau.  XOF-digest the input, then sample in the ball."""
    digest = XofStream(data, _TAG_CHAL).read(32)
    return sample_in_ball(_ctx(params), params.tau, digest)


# ---------------------------------------------------------------------------
# key generation


def expand_a(rho: bytes, params: ParameterSet) -> list[list[RingElement]]:
    """Deterministic k x l matrix over R_q; entry (i, j) has its own stream."""
    ctx = _ctx(params)
    return [
        [
            ring.sample_uniform_ring(
                XofStream(rho, _TAG_A + struct.pack("<HH", i, j)), ctx
            )
            for j in range(params.l)
        ]
        for i in range(params.k)
    ]


@lru_cache(maxsize=8)
def _expand_a_ntt(params: ParameterSet, rho: bytes) -> np.ndarray:
    """NTT-domain matrix A as a (k, l, n) array, cached per (params, rho)."""
    ctx = _ctx(params)
    rows = []
    for row in expand_a(rho, params):
        rows.append(np.stack([ring.ntt_forward_batch(ctx, e.coeffs) for e in row]))
    a_hat = np.stack(rows)
    a_hat.setflags(write=False)
    return a_hat


def _stack(v: RingVector) -> np.ndarray:
    return np.stack([e.coeffs for e in v])


def _unstack(arr: np.ndarray) -> RingVector:
    return RingVector(tuple(RingElement(row) for row in arr))


def _matvec_ntt(ctx: RingContext, a_hat: np.ndarray, v_hat: np.ndarray) -> np.ndarray:
    """(k, l, n) NTT-domain matrix times (l, n) NTT-domain vector."""
    prods = ring.mulmod(a_hat, v_hat[None, :, :], ctx.q)
    return prods.sum(axis=1) % ctx.q


def keygen(params: ParameterSet, seed: bytes) -> KeyPair:
    """Deterministic key pair from a 32-byte seed: t = A*s1 + s2."""
    if len(seed) != SEED_BYTES:
        raise ValueError(f"seed must be {SEED_BYTES} bytes")
    ctx = _ctx(params)
    rho = XofStream(seed, _TAG_RHO).read(32)
    key = XofStream(seed, _TAG_KEY).read(32)
    s1 = RingVector(tuple(
        ring.sample_bounded(XofStream(seed, _TAG_S1 + struct.pack("<H", j)), ctx, params.eta)
        for j in range(params.l)
    ))
    s2 = RingVector(tuple(
        ring.sample_bounded(XofStream(seed, _TAG_S2 + struct.pack("<H", i)), ctx, params.eta)
        for i in range(params.k)
    ))
    a_hat = _expand_a_ntt(params, rho)
    s1_hat = ring.ntt_forward_batch(ctx, _stack(s1))
    t_arr = (ring.ntt_inverse_batch(ctx, _matvec_ntt(ctx, a_hat, s1_hat)) + _stack(s2)) % ctx.q
    t = _unstack(t_arr)
    return KeyPair(
        pk=PublicKey(params=params, rho=rho, t=t),
        sk=SecretKey(params=params, rho=rho, key=key, s1=s1, s2=s2, t=t),
    )


# ---------------------------------------------------------------------------
# signing and verification


def _message_digest(message: bytes) -> bytes:
    return XofStream(message, _TAG_MSG).read(32)


def _inf_norm_arr(arr: np.ndarray, q: int) -> int:
    return int(np.abs(ring.mod_pm_vec(arr, q)).max())


def sign_with_attempts(
    sk: SecretKey, message: bytes, max_attempts: int = MAX_SIGN_ATTEMPTS
) -> tuple[Signature, int]:
    """Sign deterministically; returns the signature and the attempt count."""
    params = sk.params
    ctx = _ctx(params)
    q, gamma1, gamma2, beta = params.q, params.gamma1, params.gamma2, params.beta
    a_hat = _expand_a_ntt(params, sk.rho)
    s1_hat = ring.ntt_forward_batch(ctx, _stack(sk.s1))
    s2_hat = ring.ntt_forward_batch(ctx, _stack(sk.s2))
    mu = _message_digest(message)
    y_seed = sk.key + mu

    for kappa in range(max_attempts):
        ystream = XofStream(y_seed, _TAG_Y + struct.pack("<I", kappa))
        y = np.stack([
            ring.sample_bounded(ystream, ctx, gamma1 - 1).coeffs
            for _ in range(params.l)
        ])
        y_hat = ring.ntt_forward_batch(ctx, y)
        w = ring.ntt_inverse_batch(ctx, _matvec_ntt(ctx, a_hat, y_hat))
        w1 = high_bits(ctx, _unstack(w), gamma2)
        c = hash_to_challenge(params, pack_w1(params, w1) + message)
        c_hat = ring.ntt_forward_batch(ctx, c.coeffs)
        z = (y + ring.ntt_inverse_batch(ctx, ring.mulmod(s1_hat, c_hat, q))) % q
        if _inf_norm_arr(z, q) >= gamma1 - beta:
            continue
        w_minus_cs2 = (w - ring.ntt_inverse_batch(ctx, ring.mulmod(s2_hat, c_hat, q))) % q
        _, lo = _decompose_vec(w_minus_cs2, gamma2, q)
        if int(np.abs(lo).max()) >= gamma2 - beta:
            continue
        return Signature(z=_unstack(z), c=c), kappa + 1
    raise MaxAttemptsExceeded(f"no accepted signature in {max_attempts} attempts")


def sign(sk: SecretKey, message: bytes, max_attempts: int = MAX_SIGN_ATTEMPTS) -> Signature:
    return sign_with_attempts(sk, message, max_attempts)[0]


def verify(pk: PublicKey, message: bytes, sig: Signature) -> bool:
    """Recompute the high-bits commitment from A*z - c*t and check the hash."""
    params = pk.params
    ctx = _ctx(params)
    q = params.q
    z = _stack(sig.z)
    if z.shape != (params.l, params.n) or sig.c.coeffs.shape != (params.n,):
        raise ring.DimensionMismatch("signature shape does not match parameters")
    if _inf_norm_arr(z, q) >= params.gamma1 - params.beta:
        return False
    a_hat = _expand_a_ntt(params, pk.rho)
    z_hat = ring.ntt_forward_batch(ctx, z)
    c_hat = ring.ntt_forward_batch(ctx, sig.c.coeffs)
    t_hat = ring.ntt_forward_batch(ctx, _stack(pk.t))
    az = _matvec_ntt(ctx, a_hat, z_hat)
    w_hat = (az - ring.mulmod(t_hat, c_hat, q)) % q
    w1 = high_bits(ctx, _unstack(ring.ntt_inverse_batch(ctx, w_hat)), params.gamma2)
    expected = hash_to_challenge(params, pack_w1(params, w1) + message)
    return expected == sig.c
