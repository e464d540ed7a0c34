"""Parameter sets for the signature scheme and its security analysis.

A ParameterSet bundles the eleven scheme integers.  The built-in registry
covers three comparison groups: the original Dilithium proposal sets
("dil-*"), the q = 5 mod 8 QROM variant sets ("qrom-*"), and the
NTT-friendly sets of this work ("ours-*" against each baseline plus the
"nist-*" recommended levels).  beta is stored explicitly so that loaded
parameter files can be checked against beta = tau * eta.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

Q0 = 12439554041857  # = 2^11 * 3 * 19 * 1447 * 73643 + 1, so q = 1 mod 1024
Q_DIL = 2**23 - 8191
Q_QROM = 2**45 - 21283


class UnknownParamsId(KeyError):
    """Requested parameter-set id is not in the built-in registry."""


class BadParamsFile(ValueError):
    """A parameter file is missing fields or fails validation."""


@dataclass(frozen=True)
class ParameterSet:
    name: str
    q: int
    n: int
    k: int
    l: int
    d: int
    tau: int
    gamma1: int
    gamma2: int
    eta: int
    beta: int
    eta_prime: int | None = None
    level: int = 3  # NIST level, selects the query bound for the reduction loss
    msis_term: bool = True  # whether the security statement carries an MSIS term

    def to_json_dict(self) -> dict:
        return asdict(self)


def _mk(name, q, n, kl, d, tau, gamma1, gamma2, eta, eta_prime, level, msis_term=True):
    k, l = kl
    return ParameterSet(
        name=name, q=q, n=n, k=k, l=l, d=d, tau=tau,
        gamma1=gamma1, gamma2=gamma2, eta=eta, beta=tau * eta,
        eta_prime=eta_prime, level=level, msis_term=msis_term,
    )


BUILTIN: dict[str, ParameterSet] = {
    p.name: p
    for p in [
        # baseline Dilithium sets (d = 13, n = 256)
        _mk("dil-sl2", Q_DIL, 256, (4, 4), 13, 39, 2**17, 95232, 2, None, 2),
        _mk("dil-sl3", Q_DIL, 256, (6, 5), 13, 49, 2**19, 261888, 4, None, 3),
        _mk("dil-sl5", Q_DIL, 256, (8, 7), 13, 60, 2**19, 261888, 2, None, 5),
        # NTT-friendly sets matched against the Dilithium baselines
        _mk("ours-sl2", Q0, 512, (10, 4), 15, 40, 220929, 441858, 2, 8, 2),
        _mk("ours-sl3", Q0, 512, (12, 8), 15, 40, 370432, 740864, 2, 4, 3),
        _mk("ours-sl5", Q0, 512, (16, 13), 15, 40, 555648, 1111296, 2, 2, 5),
        # q = 5 mod 8 QROM variant; its security statement has no MSIS term
        _mk("qrom-rec", Q_QROM, 512, (4, 4), 15, 46, 905679, 905679, 7, None, 3, False),
        _mk("qrom-vh", Q_QROM, 512, (5, 5), 15, 46, 905679, 905679, 3, None, 3, False),
        # NTT-friendly sets matched against the QROM variant (query bound 2^96)
        _mk("ours-rec", Q0, 512, (12, 5), 15, 40, 279949, 555648, 2, 5, 3),
        _mk("ours-vh", Q0, 512, (13, 8), 15, 40, 370432, 740864, 2, 4, 3),
        # recommended sets at the NIST levels
        _mk("nist-sl1", Q0, 512, (7, 7), 15, 40, 277824, 555648, 2, 7, 1),
        _mk("nist-sl2", Q0, 512, (9, 9), 15, 40, 329916, 659832, 2, 5, 2),
        _mk("nist-sl3", Q0, 512, (10, 10), 15, 40, 370432, 740864, 2, 4, 3),
        _mk("nist-sl5", Q0, 512, (13, 13), 15, 40, 555648, 1111296, 2, 2, 5),
    ]
}

# comparison groups, in presentation order
GROUPS: dict[str, tuple[str, ...]] = {
    "dilithium": ("dil-sl2", "dil-sl3", "dil-sl5", "ours-sl2", "ours-sl3", "ours-sl5"),
    "dilithium-qrom": ("qrom-rec", "qrom-vh", "ours-rec", "ours-vh"),
    "nist-levels": ("nist-sl1", "nist-sl2", "nist-sl3", "nist-sl5"),
}

# wire ids for key/signature file headers; 0xFF marks an inline custom set
PARAMS_ID: dict[str, int] = {name: i + 1 for i, name in enumerate(BUILTIN)}
ID_PARAMS: dict[int, str] = {v: k for k, v in PARAMS_ID.items()}
CUSTOM_ID = 0xFF


def builtin(name: str) -> ParameterSet:
    try:
        return BUILTIN[name]
    except KeyError:
        raise UnknownParamsId(name) from None


_REQUIRED_FIELDS = (
    "name", "q", "n", "k", "l", "d", "tau", "gamma1", "gamma2", "eta", "beta",
)


def from_json_dict(doc: dict) -> ParameterSet:
    missing = [f for f in _REQUIRED_FIELDS if f not in doc]
    if missing:
        raise BadParamsFile(f"missing fields: {', '.join(missing)}")
    for f in _REQUIRED_FIELDS[1:]:
        if not isinstance(doc[f], int) or isinstance(doc[f], bool) or doc[f] <= 0:
            raise BadParamsFile(f"field {f} must be a positive integer")
    ep = doc.get("eta_prime")
    if ep is not None and (not isinstance(ep, int) or ep <= 0):
        raise BadParamsFile("eta_prime must be a positive integer or null")
    level = doc.get("level", 3)
    if level not in (1, 2, 3, 4, 5):
        raise BadParamsFile("level must be in 1..5")
    return ParameterSet(
        name=str(doc["name"]),
        q=doc["q"], n=doc["n"], k=doc["k"], l=doc["l"], d=doc["d"],
        tau=doc["tau"], gamma1=doc["gamma1"], gamma2=doc["gamma2"],
        eta=doc["eta"], beta=doc["beta"], eta_prime=ep, level=level,
        msis_term=bool(doc.get("msis_term", True)),
    )


def load_params_file(path: str) -> ParameterSet:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise BadParamsFile(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise BadParamsFile("top-level JSON value must be an object")
    return from_json_dict(doc)
