"""Decomposition dictionaries: EBL, its products, the Takagi basis, noisy variants."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import channels
from .channels import QuantumOperation
from .linalg import I2, X, Y, Z, kron

SQ2 = np.sqrt(2.0)
S_GATE = np.diag([1, 1j]).astype(complex)
H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / SQ2
K_GATE = S_GATE @ H_GATE

# (label, Kraus operator, kind, gate recipe); recipes are documentation only
_EBL_TABLE = [
    ("[1]", I2, "unitary", ""),
    ("[sigma_X]", X, "unitary", "[H][S]^2[H]"),
    ("[sigma_Y]", Y, "unitary", "[H][S]^2[H][S]^2"),
    ("[sigma_Z]", Z, "unitary", "[S]^2"),
    ("[R_X]", (I2 + 1j * X) / SQ2, "unitary", "[H][S]^3[H]"),
    ("[R_Y]", (I2 + 1j * Y) / SQ2, "unitary", "[S][H][S]^3[H][S]^3"),
    ("[R_Z]", (I2 + 1j * Z) / SQ2, "unitary", "[S]^3"),
    ("[R_YZ]", (Y + Z) / SQ2, "unitary", "[H][S]^3[H][S]^2"),
    ("[R_ZX]", (Z + X) / SQ2, "unitary", "[S]^3[H][S]^3[H][S]^3"),
    ("[R_XY]", (X + Y) / SQ2, "unitary", "[H][S]^2[H][S]^3"),
    ("[pi_X]", (I2 + X) / 2, "projective", "[S][H][S][H][P0][H][S]^3[H][S]^3"),
    ("[pi_Y]", (I2 + Y) / 2, "projective", "[H][S]^3[H][P0][H][S][H]"),
    ("[pi_Z]", (I2 + Z) / 2, "projective", "[P0]"),
    ("[pi_YZ]", (Y + 1j * Z) / 2, "projective", "[S][H][S][H][P0][H][S][H][S]^3"),
    ("[pi_ZX]", (Z + 1j * X) / 2, "projective", "[H][S]^3[H][P0][H][S][H][S]^2"),
    ("[pi_XY]", (X + 1j * Y) / 2, "projective", "[P0][H][S]^2[H]"),
]


@dataclass(frozen=True, eq=False)
class BasisElement:
    index: int
    label: str
    operation: QuantumOperation
    recipe: str = ""

    @property
    def trace_preserving(self) -> bool:
        return self.operation.trace_preserving


@dataclass(frozen=True, eq=False)
class BasisSet:
    name: str
    elements: tuple[BasisElement, ...]
    qubits: int
    completeness_class: str = "unverified"

    def __post_init__(self):
        if self.completeness_class not in ("all-linear", "cptp-only", "unverified"):
            raise ValueError(f"bad completeness class {self.completeness_class!r}")
        labels = [e.label for e in self.elements]
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be unique")
        for i, e in enumerate(self.elements):
            if e.index != i:
                raise ValueError("element indices must be contiguous from 0")
            if e.operation.qubits != self.qubits:
                raise ValueError(f"element {e.label} acts on {e.operation.qubits} qubits")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i) -> BasisElement:
        return self.elements[i]

    @property
    def operations(self) -> list[QuantumOperation]:
        return [e.operation for e in self.elements]

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.elements]

    @cached_property
    def choi_stack(self) -> np.ndarray:
        """Choi matrices stacked along axis 0, shape ``(len, 4^k, 4^k)``."""
        stack = np.stack([channels.choi_of(op) for op in self.operations])
        stack.setflags(write=False)
        return stack

    def to_json(self) -> str:
        return json.dumps(basis_to_dict(self), indent=1)


def basis_to_dict(s: BasisSet) -> dict:
    return {
        "name": s.name,
        "qubits": s.qubits,
        "completeness_class": s.completeness_class,
        "elements": [
            {
                "index": e.index,
                "label": e.label,
                "recipe": e.recipe,
                "trace_preserving": e.trace_preserving,
                "kind": e.operation.kind,
                "kraus": [{"real": k.real.tolist(), "imag": k.imag.tolist()} for k in e.operation.kraus],
            }
            for e in s.elements
        ],
    }


def basis_from_dict(doc: dict) -> BasisSet:
    elements = []
    for e in doc["elements"]:
        ks = tuple(np.array(k["real"]) + 1j * np.array(k["imag"]) for k in e["kraus"])
        op = QuantumOperation(ks, doc["qubits"], e.get("kind", "general"))
        elements.append(BasisElement(e["index"], e["label"], op, e.get("recipe", "")))
    return BasisSet(doc["name"], tuple(elements), doc["qubits"], doc.get("completeness_class", "unverified"))


@lru_cache(maxsize=None)
def ebl_single_qubit() -> BasisSet:
    elements = tuple(
        BasisElement(i, label, QuantumOperation((m,), 1, kind), recipe)
        for i, (label, m, kind, recipe) in enumerate(_EBL_TABLE)
    )
    return BasisSet("ebl", elements, 1, "all-linear")


def product_basis(a: BasisSet, b: BasisSet, name: str | None = None) -> BasisSet:
    elements = []
    for ea in a:
        for eb in b:
            op = channels.tensor(ea.operation, eb.operation)
            recipe = f"{ea.recipe or '[1]'} (x) {eb.recipe or '[1]'}"
            elements.append(BasisElement(len(elements), f"{ea.label}{eb.label}", op, recipe))
    cls = "all-linear" if a.completeness_class == b.completeness_class == "all-linear" else "unverified"
    return BasisSet(name or f"{a.name}x{b.name}", tuple(elements), a.qubits + b.qubits, cls)


@lru_cache(maxsize=None)
def ebl_product(k: int = 2) -> BasisSet:
    if k < 1:
        raise ValueError("k must be positive")
    s = ebl_single_qubit()
    out = s
    for _ in range(k - 1):
        out = product_basis(out, s)
    return BasisSet(f"ebl^{k}" if k > 1 else "ebl", out.elements, k, out.completeness_class)


# --- Takagi two-qubit basis -------------------------------------------------

P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
CX = kron(P0, I2) + kron(P1, X)
CS = kron(P0, I2) + kron(P1, S_GATE)
CH = kron(P0, I2) + kron(P1, H_GATE)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
ISWAP = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _hadamard_eigenprojectors() -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(H_GATE)
    minus, plus = v[:, [0]], v[:, [1]]
    return plus @ plus.conj().T, minus @ minus.conj().T


_HP, _HM = _hadamard_eigenprojectors()
CHX = kron(_HP, I2) + kron(_HM, X)

_KD = K_GATE.conj().T
# conjugating unitaries V, with U conjugated by V meaning V^dag U V
_NINE = [
    ("I", kron(I2, I2)),
    ("K1", kron(K_GATE, I2)),
    ("K2", kron(I2, K_GATE)),
    ("K1d", kron(_KD, I2)),
    ("K2d", kron(I2, _KD)),
    ("K1K2", kron(K_GATE, K_GATE)),
    ("K1K2d", kron(K_GATE, _KD)),
    ("K1dK2", kron(_KD, K_GATE)),
    ("K1dK2d", kron(_KD, _KD)),
]
_SWAP_CONJ = [("I", kron(I2, I2)), ("K2", kron(I2, K_GATE)), ("K2d", kron(I2, _KD))]
_ISWAP_CONJ = [
    ("I", kron(I2, I2)),
    ("K1", kron(K_GATE, I2)),
    ("K2", kron(I2, K_GATE)),
    ("K1K2", kron(K_GATE, K_GATE)),
    ("K2d", kron(I2, _KD)),
    ("K1K2d", kron(K_GATE, _KD)),
]

X1 = kron(X, I2)
H1 = kron(H_GATE, I2)
TAKAGI_FAMILIES = [
    ("CX", CX, _NINE),
    ("X1.CX.X1", X1 @ CX @ X1, _NINE),
    ("CS", CS, _NINE),
    ("CH", CH, _NINE),
    ("C_HX", CHX, _NINE),
    ("CX.H1", CX @ H1, _NINE),
    ("SW", SWAP, _SWAP_CONJ),
    ("iSW", ISWAP, _ISWAP_CONJ),
    ("SW.H1", SWAP @ H1, _NINE),
]


@lru_cache(maxsize=None)
def takagi_two_qubit() -> BasisSet:
    ebl = ebl_single_qubit()
    first = [e for e in ebl if e.index < 13]
    elements = []
    for ea in first:
        for eb in first:
            op = channels.tensor(ea.operation, eb.operation)
            n = len(elements) + 1
            elements.append(BasisElement(n - 1, f"B_{n}", op, f"{ea.label}{eb.label}"))
    for fam, u, conjugators in TAKAGI_FAMILIES:
        for cname, v in conjugators:
            n = len(elements) + 1
            m = v.conj().T @ u @ v
            op = QuantumOperation((m,), 2, "unitary", True)
            recipe = fam if cname == "I" else f"{cname}^dag {fam} {cname}"
            elements.append(BasisElement(n - 1, f"B_{n}", op, recipe))
    return BasisSet("takagi", tuple(elements), 2, "cptp-only")


def apply_noise(s: BasisSet, noise: QuantumOperation) -> BasisSet:
    """Replace every element ``B`` by ``noise o B``."""
    if noise.qubits != s.qubits:
        raise ValueError(f"noise acts on {noise.qubits} qubits, basis on {s.qubits}")
    cp, tp = channels.classify(noise)
    if not (cp and tp):
        raise ValueError("noise must be CPTP")
    elements = tuple(
        BasisElement(e.index, e.label, channels.compose(noise, e.operation), e.recipe) for e in s
    )
    return BasisSet(f"noisy({s.name})", elements, s.qubits, s.completeness_class)


def noisy_basis(s: BasisSet, p: float) -> BasisSet:
    return apply_noise(s, channels.depolarizing(s.qubits, p))


def get_basis(name: str) -> BasisSet:
    """Look up a basis by CLI name: ``ebl``, ``ebl-product``, ``takagi``, ``noisy:<p>``."""
    if name == "ebl":
        return ebl_single_qubit()
    if name in ("ebl-product", "ebl2"):
        return ebl_product(2)
    if name == "takagi":
        return takagi_two_qubit()
    if name.startswith("noisy:"):
        return noisy_basis(ebl_product(2), float(name.split(":", 1)[1]))
    raise ValueError(f"unknown basis {name!r}")


def vectorized_rank(s: BasisSet, tol: float = 1e-9) -> int:
    stack = s.choi_stack.reshape(len(s), -1)
    return int(np.linalg.matrix_rank(stack, tol=tol))

