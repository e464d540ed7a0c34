"""Bit-exact v1 file formats for keys and signatures.

Every file starts with a 4-byte magic, a 1-byte format version, and a
1-byte parameter-set id.  Built-in sets are referenced by id; the sentinel
id 0xFF is followed by an inline parameter block so that keys for custom
sets remain self-describing.  All coefficient fields are packed
little-endian-bit-order at fixed widths:

    public key   rho (32 bytes) || t at ceil(log2 q) bits per coefficient
    secret key   rho || K || s1, s2 at ceil(log2(2*eta+1)) bits (offset by
                 eta) || t as in the public key
    signature    z at ceil(log2(2*gamma1)) bits, coefficient offset by
                 gamma1 - 1 || challenge as tau (position, sign-bit) pairs
                 with strictly increasing ceil(log2 n)-bit positions

Sections are byte-aligned and deserialisation enforces exact file length.
"""

from __future__ import annotations

import struct

import numpy as np

from . import ring
from .params import BUILTIN, CUSTOM_ID, ID_PARAMS, PARAMS_ID, ParameterSet
from .ring import RingElement, RingVector
from .scheme import (
    PublicKey,
    SecretKey,
    Signature,
    pack_bits,
    ring_context,
    unpack_bits,
)

MAGIC_PK = b"DLPK"
MAGIC_SK = b"DLSK"
MAGIC_SIG = b"DLSG"
VERSION = 1

_INLINE_PARAMS = struct.Struct("<11QBB")  # q n k l d tau g1 g2 eta beta eta' level flags


class BadMagic(ValueError):
    """File does not start with the expected magic/version."""


class BadParamsId(ValueError):
    """Unknown parameter-set id byte."""


class TruncatedInput(ValueError):
    """File is shorter than its declared contents."""


class NonCanonical(ValueError):
    """Decodes to an out-of-range or non-normalised value."""


def q_width(params: ParameterSet) -> int:
    return params.q.bit_length()


def eta_width(params: ParameterSet) -> int:
    return (2 * params.eta).bit_length()


def z_width(params: ParameterSet) -> int:
    return (2 * params.gamma1 - 1).bit_length()


def pos_width(params: ParameterSet) -> int:
    return (params.n - 1).bit_length()


def _field_bytes(count: int, width: int) -> int:
    return (count * width + 7) // 8


def public_key_size(params: ParameterSet) -> int:
    body = 32 + _field_bytes(params.k * params.n, q_width(params))
    return len(_header(params)) + body


def _header(params: ParameterSet, magic: bytes = MAGIC_PK) -> bytes:
    pid = PARAMS_ID.get(params.name)
    if pid is not None and BUILTIN[params.name] == params:
        return magic + bytes([VERSION, pid])
    flags = (1 if params.msis_term else 0)
    blob = _INLINE_PARAMS.pack(
        params.q, params.n, params.k, params.l, params.d, params.tau,
        params.gamma1, params.gamma2, params.eta, params.beta,
        params.eta_prime or 0, params.level, flags,
    )
    return magic + bytes([VERSION, CUSTOM_ID]) + blob


def _parse_header(data: bytes, magic: bytes) -> tuple[ParameterSet, int]:
    if len(data) < 6:
        raise TruncatedInput("file shorter than its header")
    if data[:4] != magic:
        raise BadMagic(f"expected magic {magic!r}")
    if data[4] != VERSION:
        raise BadMagic(f"unsupported format version {data[4]}")
    pid = data[5]
    if pid == CUSTOM_ID:
        if len(data) < 6 + _INLINE_PARAMS.size:
            raise TruncatedInput("missing inline parameter block")
        (q, n, k, l, d, tau, g1, g2, eta, beta, ep, level, flags) = _INLINE_PARAMS.unpack(
            data[6 : 6 + _INLINE_PARAMS.size]
        )
        params = ParameterSet(
            name="custom", q=q, n=n, k=k, l=l, d=d, tau=tau, gamma1=g1,
            gamma2=g2, eta=eta, beta=beta, eta_prime=ep or None,
            level=level, msis_term=bool(flags & 1),
        )
        return params, 6 + _INLINE_PARAMS.size
    name = ID_PARAMS.get(pid)
    if name is None:
        raise BadParamsId(f"unknown parameter-set id {pid}")
    return BUILTIN[name], 6


def _take(data: bytes, offset: int, nbytes: int, what: str) -> bytes:
    if len(data) < offset + nbytes:
        raise TruncatedInput(f"file ends inside {what}")
    return data[offset : offset + nbytes]


def _pack_vector(v: RingVector, width: int, offset: int = 0) -> bytes:
    flat = np.concatenate([e.coeffs for e in v]) + offset
    return pack_bits(flat, width)


def _unpack_vector(
    data: bytes, count: int, n: int, width: int, bound: int, what: str
) -> list[np.ndarray]:
    vals = unpack_bits(data, width, count * n)
    if int(vals.max(initial=0)) >= bound:
        raise NonCanonical(f"{what} coefficient out of range")
    return list(vals.reshape(count, n))


# ---------------------------------------------------------------------------
# public key


def serialize_public_key(pk: PublicKey) -> bytes:
    return _header(pk.params, MAGIC_PK) + pk.rho + _pack_vector(pk.t, q_width(pk.params))


def deserialize_public_key(data: bytes) -> PublicKey:
    params, off = _parse_header(data, MAGIC_PK)
    rho = _take(data, off, 32, "seed")
    off += 32
    t_bytes = _field_bytes(params.k * params.n, q_width(params))
    body = _take(data, off, t_bytes, "public vector")
    if len(data) != off + t_bytes:
        raise NonCanonical("trailing bytes after public vector")
    rows = _unpack_vector(body, params.k, params.n, q_width(params), params.q, "public")
    t = RingVector(tuple(RingElement(r) for r in rows))
    return PublicKey(params=params, rho=rho, t=t)


# ---------------------------------------------------------------------------
# secret key


def serialize_secret_key(sk: SecretKey) -> bytes:
    p = sk.params
    ctx = ring_context(p.q, p.n)
    ew = eta_width(p)
    s1 = np.concatenate([ring.mod_pm_vec(e.coeffs, p.q) for e in sk.s1]) + p.eta
    s2 = np.concatenate([ring.mod_pm_vec(e.coeffs, p.q) for e in sk.s2]) + p.eta
    if s1.min() < 0 or s2.min() < 0 or max(s1.max(), s2.max()) > 2 * p.eta:
        raise ValueError("secret coefficients exceed the eta bound")
    return (
        _header(p, MAGIC_SK)
        + sk.rho
        + sk.key
        + pack_bits(s1, ew)
        + pack_bits(s2, ew)
        + _pack_vector(sk.t, q_width(p))
    )


def deserialize_secret_key(data: bytes) -> SecretKey:
    params, off = _parse_header(data, MAGIC_SK)
    rho = _take(data, off, 32, "seed")
    key = _take(data, off + 32, 32, "signing seed")
    off += 64
    ew = eta_width(params)
    n, q = params.n, params.q
    s1_bytes = _field_bytes(params.l * n, ew)
    s2_bytes = _field_bytes(params.k * n, ew)
    t_bytes = _field_bytes(params.k * n, q_width(params))
    if len(data) != off + s1_bytes + s2_bytes + t_bytes:
        if len(data) < off + s1_bytes + s2_bytes + t_bytes:
            raise TruncatedInput("file ends inside secret fields")
        raise NonCanonical("trailing bytes after secret fields")

    def short_vec(raw: bytes, count: int, what: str) -> RingVector:
        vals = unpack_bits(raw, ew, count * n)
        if int(vals.max(initial=0)) > 2 * params.eta:
            raise NonCanonical(f"{what} coefficient out of range")
        rows = (vals - params.eta).reshape(count, n) % q
        return RingVector(tuple(RingElement(r) for r in rows))

    s1 = short_vec(data[off : off + s1_bytes], params.l, "s1")
    off += s1_bytes
    s2 = short_vec(data[off : off + s2_bytes], params.k, "s2")
    off += s2_bytes
    rows = _unpack_vector(data[off:], params.k, n, q_width(params), q, "public")
    t = RingVector(tuple(RingElement(r) for r in rows))
    return SecretKey(params=params, rho=rho, key=key, s1=s1, s2=s2, t=t)


# ---------------------------------------------------------------------------
# signature


def serialize_signature(params: ParameterSet, sig: Signature) -> bytes:
    zw = z_width(params)
    z = np.concatenate([ring.mod_pm_vec(e.coeffs, params.q) for e in sig.z])
    z = z + (params.gamma1 - 1)
    if z.min() < 0 or z.max() > 2 * params.gamma1 - 2:
        raise ValueError("z coefficient outside the packable range")
    c_signed = ring.mod_pm_vec(sig.c.coeffs, params.q)
    positions = np.flatnonzero(c_signed)
    if positions.shape[0] != params.tau or not np.all(np.isin(c_signed[positions], (-1, 1))):
        raise ValueError("challenge is not in the expected sparse ball")
    pw = pos_width(params)
    pairs = np.empty(2 * params.tau, dtype=np.int64)
    pair_widths = [pw, 1] * params.tau
    pairs[0::2] = positions
    pairs[1::2] = (c_signed[positions] < 0).astype(np.int64)
    # interleave fixed-width fields by packing one bit-stream manually
    bits = []
    for val, width in zip(pairs, pair_widths):
        bits.append((int(val) >> np.arange(width)) & 1)
    c_bytes = np.packbits(np.concatenate(bits).astype(np.uint8), bitorder="little").tobytes()
    return _header(params, MAGIC_SIG) + pack_bits(z, zw) + c_bytes


def deserialize_signature(data: bytes) -> tuple[ParameterSet, Signature]:
    params, off = _parse_header(data, MAGIC_SIG)
    n, q = params.n, params.q
    zw = z_width(params)
    pw = pos_width(params)
    z_bytes = _field_bytes(params.l * n, zw)
    c_bytes = (params.tau * (pw + 1) + 7) // 8
    if len(data) < off + z_bytes + c_bytes:
        raise TruncatedInput("file ends inside signature fields")
    if len(data) != off + z_bytes + c_bytes:
        raise NonCanonical("trailing bytes after signature fields")

    z_vals = unpack_bits(data[off : off + z_bytes], zw, params.l * n)
    if int(z_vals.max(initial=0)) > 2 * params.gamma1 - 2:
        raise NonCanonical("z coefficient out of range")
    z_rows = (z_vals - (params.gamma1 - 1)).reshape(params.l, n) % q
    z = RingVector(tuple(RingElement(r) for r in z_rows))

    cbits = np.unpackbits(
        np.frombuffer(data[off + z_bytes :], dtype=np.uint8), bitorder="little"
    )[: params.tau * (pw + 1)]
    c = np.zeros(n, dtype=np.int64)
    prev = -1
    pos_weights = np.power(2.0, np.arange(pw))
    for i in range(params.tau):
        field = cbits[i * (pw + 1) : (i + 1) * (pw + 1)]
        pos = int(field[:pw].astype(np.float64) @ pos_weights)
        sign = int(field[pw])
        if pos <= prev or pos >= n:
            raise NonCanonical("challenge positions not strictly increasing")
        prev = pos
        c[pos] = q - 1 if sign else 1
    return params, Signature(z=z, c=RingElement(c))
