"""Named spin-chain Hamiltonians on a line of qubits.

All models are built from 1- and 2-local Pauli strings with real couplings;
every term has an even number of Y factors, so each Hamiltonian lands in the
-1 eigenspace of the transpose involution by construction.

Couplings accept either a scalar (broadcast over all bonds/sites) or a
sequence matching the bond/site count.  Site i of the label is the i-th
character from the left; bonds pair neighbouring sites, with an optional
wrap-around bond under periodic boundary conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Mapping, Sequence

from .errors import ConfigError
from .pauli import AlgebraElement, PauliString

MODEL_NAMES = ("tfim", "xy", "tfxy", "heisenberg", "kitaev_even", "kitaev_odd")

#: coupling keys each model understands ("J" bonds, "h" sites)
_MODEL_COUPLINGS = {
    "tfim": ("J", "h"),
    "xy": ("J",),
    "tfxy": ("J", "h"),
    "heisenberg": ("J",),
    "kitaev_even": ("J",),
    "kitaev_odd": ("J",),
}

MIN_SITES = 2
MAX_SITES = 10


@dataclass(frozen=True)
class ModelSpec:
    """A model name plus the knobs that pin down a concrete Hamiltonian."""

    name: str
    n: int = 4
    couplings: Mapping[str, float | Sequence[float]] | None = None
    boundary: str = "open"

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise ConfigError(
                f"unknown model {self.name!r}; choose one of {', '.join(MODEL_NAMES)}"
            )
        if not (MIN_SITES <= self.n <= MAX_SITES):
            raise ConfigError(f"model size must be {MIN_SITES}..{MAX_SITES} sites, got {self.n}")
        if self.boundary not in ("open", "periodic"):
            raise ConfigError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        if self.name == "kitaev_even" and self.n % 2 != 0:
            raise ConfigError(f"kitaev_even needs an even site count, got {self.n}")
        if self.name == "kitaev_odd" and self.n % 2 != 1:
            raise ConfigError(f"kitaev_odd needs an odd site count, got {self.n}")
        allowed = _MODEL_COUPLINGS[self.name]
        for key in self.couplings or {}:
            if key not in allowed:
                raise ConfigError(
                    f"model {self.name!r} takes couplings {allowed}, got {key!r}"
                )

    def bonds(self) -> list[tuple[int, int]]:
        out = [(i, i + 1) for i in range(self.n - 1)]
        if self.boundary == "periodic":
            out.append((self.n - 1, 0))
        return out

    def coupling_values(self, key: str, count: int) -> list[float]:
        """Broadcast a scalar or check a sequence against the needed count."""
        raw = (self.couplings or {}).get(key, 1.0)
        if isinstance(raw, (int, float)):
            return [float(raw)] * count
        vals = [float(v) for v in raw]
        if len(vals) != count:
            raise ConfigError(
                f"coupling {key!r} needs {count} values for {self.name} "
                f"on {self.n} sites, got {len(vals)}"
            )
        return vals

    def to_dict(self) -> dict:
        c = None
        if self.couplings is not None:
            c = {k: (list(v) if isinstance(v, Sequence) else v) for k, v in self.couplings.items()}
        return {"name": self.name, "n": self.n, "couplings": c, "boundary": self.boundary}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelSpec":
        return cls(
            name=d["name"],
            n=int(d.get("n", 4)),
            couplings=d.get("couplings"),
            boundary=d.get("boundary", "open"),
        )


def _two_site(n: int, a: int, b: int, kind: str) -> PauliString:
    mask = (1 << a) | (1 << b)
    if kind == "XX":
        return PauliString(n, mask, 0)
    if kind == "YY":
        return PauliString(n, mask, mask)
    if kind == "ZZ":
        return PauliString(n, 0, mask)
    raise ValueError(kind)


def _add(terms: dict, p: PauliString, c: float) -> None:
    terms[p] = terms.get(p, 0.0) + c


def build_model(spec: ModelSpec) -> AlgebraElement:
    """Assemble the Hamiltonian for a model spec as a real Pauli sum."""
    n = spec.n
    bonds = spec.bonds()
    terms: dict[PauliString, float] = {}
    if spec.name in ("tfim", "xy", "tfxy", "heisenberg"):
        j = spec.coupling_values("J", len(bonds))
        kinds = {
            "tfim": ("XX",),
            "xy": ("XX", "YY"),
            "tfxy": ("XX", "YY"),
            "heisenberg": ("XX", "YY", "ZZ"),
        }[spec.name]
        for (a, b), jv in zip(bonds, j):
            for kind in kinds:
                _add(terms, _two_site(n, a, b, kind), jv)
        if spec.name in ("tfim", "tfxy"):
            h = spec.coupling_values("h", n)
            for a, hv in enumerate(h):
                _add(terms, PauliString(n, 0, 1 << a), hv)
    else:  # kitaev chains: bonds alternate XX, YY starting from XX
        j = spec.coupling_values("J", len(bonds))
        for idx, ((a, b), jv) in enumerate(zip(bonds, j), start=1):
            kind = "XX" if idx % 2 == 1 else "YY"
            _add(terms, _two_site(n, a, b, kind), jv)
    return AlgebraElement(n, terms)


def default_benchmark_specs() -> tuple[ModelSpec, ...]:
    """The standard comparison set: every model at its smallest natural size >= 4."""
    return (
        ModelSpec("tfim", 4),
        ModelSpec("xy", 4),
        ModelSpec("tfxy", 4),
        ModelSpec("heisenberg", 4),
        ModelSpec("kitaev_even", 4),
        ModelSpec("kitaev_odd", 5),
    )
