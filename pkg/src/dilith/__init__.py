"""Simplified Dilithium over NTT-friendly rings, with a Core-SVP parameter
estimator, operation-count models, and brute-force lemma verification."""

from .params import BUILTIN, GROUPS, ParameterSet, builtin
from .ring import RingContext, RingElement, RingVector, XofStream, make_ring
from .scheme import KeyPair, PublicKey, SecretKey, Signature, keygen, sign, verify

__all__ = [
    "BUILTIN",
    "GROUPS",
    "ParameterSet",
    "builtin",
    "RingContext",
    "RingElement",
    "RingVector",
    "XofStream",
    "make_ring",
    "KeyPair",
    "PublicKey",
    "SecretKey",
    "Signature",
    "keygen",
    "sign",
    "verify",
]

__version__ = "0.1.0"
