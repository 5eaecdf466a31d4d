"""
Segment Hamiltonians for a fiber carrying a two-mode polarization qubit.

Modes 0 and 1 are the photon polarizations ``b1, b2``; modes 2.. are
truncated bosonic bath modes ``a_m`` standing in for the fiber material.
Units: hbar = 1, frequencies in rad/s, lengths in m, ``tau = delta / v``.
The zero-point offsets of the free photon Hamiltonian are dropped.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .fock import FockError, FockOperator, FockSpace, annihilation, creation, number, op_distance
from .monomials import PI, SET_A, SET_B, SET_C, Monomial

HERMITIAN_TOL = 1e-12


class ConfigError(ValueError):
    """Bad model configuration (unknown key, invalid value)."""


def _from_mapping(cls, data: Mapping, what: str):
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {what}: {', '.join(unknown)}")
    return cls(**data)


@dataclass(frozen=True)
class BathMode:
    nu_rad_s: float
    g1_rad_s: float = 0.0
    g2_rad_s: float = 0.0


@dataclass(frozen=True)
class FiberModel:
    num_segments: int
    delta_m: float
    speed_m_s: float
    omega1_rad_s: float
    omega2_rad_s: float
    bath_modes: tuple = (BathMode(0.0),)
    epsilon: float = 0.0
    seed: int = 0
    dim_per_mode: int = 4
    degenerate: bool = False

    def __post_init__(self):
        modes = tuple(b if isinstance(b, BathMode) else _from_mapping(BathMode, b, "bath_modes")
                      for b in self.bath_modes)
        object.__setattr__(self, "bath_modes", modes)
        if self.num_segments < 1 or self.num_segments % 2:
            raise ConfigError("num_segments must be a positive even number")
        if not (self.delta_m > 0 and self.speed_m_s > 0):
            raise ConfigError("delta_m and speed_m_s must be positive")
        if not 1 <= len(self.bath_modes) <= 2:
            raise ConfigError("one or two bath modes are supported")
        if self.degenerate and self.omega1_rad_s != self.omega2_rad_s:
            raise ConfigError("degenerate model requires omega1_rad_s == omega2_rad_s")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be nonnegative")

    @property
    def tau_s(self) -> float:
        return self.delta_m / self.speed_m_s

    @property
    def length_m(self) -> float:
        return self.num_segments * self.delta_m

    @property
    def total_time_s(self) -> float:
        return self.num_segments * self.tau_s

    @property
    def space(self) -> FockSpace:
        return FockSpace(2 + len(self.bath_modes), self.dim_per_mode)

    @property
    def bath_indices(self) -> list[int]:
        return list(range(2, 2 + len(self.bath_modes)))

    def with_(self, **changes) -> "FiberModel":
        return replace(self, **changes)

    def with_coupling(self, g1: float, g2: Optional[float] = None) -> "FiberModel":
        g2 = g1 if g2 is None else g2
        return replace(self, bath_modes=tuple(replace(b, g1_rad_s=g1, g2_rad_s=g2) for b in self.bath_modes))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bath_modes"] = [asdict(b) for b in self.bath_modes]
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "FiberModel":
        data = dict(data)
        data["bath_modes"] = tuple(data.get("bath_modes", ({"nu_rad_s": 0.0},)))
        try:
            return _from_mapping(cls, data, "model")
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_json(cls, path) -> "FiberModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _hermitian(space: FockSpace, m: np.ndarray) -> FockOperator:
    op = FockOperator(space, m)
    if not op.is_hermitian(HERMITIAN_TOL):
        raise FockError("built operator is not Hermitian")
    return FockOperator(space, 0.5 * (m + m.conj().T), hermitian=True)


def build_H0(model: FiberModel, k: int = 1) -> FockOperator:
    """Free photon + bath Hamiltonian; diagonal in the number basis."""
    sp = model.space
    occ = sp.occupation_table().astype(float)
    freqs = np.array([model.omega1_rad_s, model.omega2_rad_s] + [b.nu_rad_s for b in model.bath_modes])
    return FockOperator(sp, np.diag(occ @ freqs).astype(complex), hermitian=True)


def build_HIl(model: FiberModel, k: int = 1) -> FockOperator:
    """``sum_m [g1 (b1 a_m^dag + h.c.) + g2 (b2 a_m^dag + h.c.)]``."""
    sp = model.space
    total = np.zeros((sp.dim, sp.dim), dtype=complex)
    b = [annihilation(sp, 0).matrix, annihilation(sp, 1).matrix]
    for idx, bath in zip(model.bath_indices, model.bath_modes):
        a = annihilation(sp, idx).matrix
        for bj, g in zip(b, (bath.g1_rad_s, bath.g2_rad_s)):
            term = g * bj @ a.conj().T
            total += term + term.conj().T
    return _hermitian(sp, total)


def bath_factor(model: FiberModel, kind: str = "position") -> FockOperator:
    """Hermitian bath operator multiplying photon-only terms."""
    sp = model.space
    if kind == "identity":
        return sp.identity()
    if kind != "position":
        raise ValueError(f"unknown bath factor {kind!r}")
    x = sum(
        (annihilation(sp, i).matrix + creation(sp, i).matrix for i in model.bath_indices),
        np.zeros((sp.dim, sp.dim), dtype=complex),
    )
    return FockOperator(sp, x, hermitian=True)


def build_monomial(model: FiberModel, m: Monomial, coupling: complex = 1.0,
                   bath: str = "position") -> FockOperator:
    """``(c M + c^* M^dag) (x) X_bath`` for a photon monomial ``M``."""
    sp = model.space
    term = (complex(coupling) * complex(m.weight)) * m.to_operator(sp).matrix
    photon = term + term.conj().T
    return _hermitian(sp, photon @ bath_factor(model, bath).matrix)


_SELECTORS = {"A": SET_A, "B": SET_B, "C": SET_C}


def build_bilinear(model: FiberModel, selector: str, couplings, bath: str = "position") -> FockOperator:
    """Hermitian combination over one of the bilinear sets A, B, C.

    ``couplings`` is either a sequence aligned with the set's members or a
    mapping from member to coupling; every member is Hermitized separately.
    """
    members = _SELECTORS[selector]
    if isinstance(couplings, Mapping):
        pairs = [(m, couplings.get(m, 0.0)) for m in members]
    else:
        couplings = list(couplings)
        if len(couplings) != len(members):
            raise ValueError(f"set {selector} has {len(members)} members")
        pairs = list(zip(members, couplings))
    sp = model.space
    total = sp.zero()
    for m, c in pairs:
        if c:
            total = total + build_monomial(model, m, c, bath)
    return _hermitian(sp, total.matrix)


@dataclass(frozen=True)
class InhomogeneityDraw:
    P: FockOperator
    Q: FockOperator
    k: int


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (a + a.conj().T)
    return h / np.linalg.norm(h, 2)


def draw_inhomogeneity(model: FiberModel, k: int, draw: int = 0) -> InhomogeneityDraw:
    """Segment-``k`` corrections ``eps P_k``, ``eps Q_k``, keyed by ``(seed, draw, k)``.

    Each generator is seeded independently so segments can be drawn in any order.
    """
    sp = model.space
    mats = []
    for which in (0, 1):
        rng = np.random.default_rng([model.seed, draw, k, which])
        mats.append(model.epsilon * _random_hermitian(rng, sp.dim))
    return InhomogeneityDraw(FockOperator(sp, mats[0], hermitian=True),
                             FockOperator(sp, mats[1], hermitian=True), k)


@dataclass(frozen=True)
class SegmentHamiltonian:
    H0: FockOperator
    HIl: FockOperator
    HIq: Optional[FockOperator] = None
    k: int = 1
    draw: Optional[InhomogeneityDraw] = None

    def total(self) -> FockOperator:
        h = self.H0 + self.HIl
        if self.HIq is not None:
            h = h + self.HIq
        if self.draw is not None:
            h = h + self.draw.P + self.draw.Q
        return FockOperator(h.space, h.matrix, hermitian=True)


def check_parity_flip(h0: FockOperator, hil: FockOperator, tol: float = 1e-12) -> float:
    """Residual of ``Pi (H0 + HIl) Pi = H0 - HIl``."""
    pi = PI.unitary(h0.space)
    lhs = (h0 + hil).conjugate_by(pi)
    return op_distance(lhs, h0 - hil)


def build_segment(model: FiberModel, k: int = 1, extra: Optional[FockOperator] = None,
                  draw: Optional[int] = None) -> SegmentHamiltonian:
    h0 = build_H0(model, k)
    hil = build_HIl(model, k)
    residual = check_parity_flip(h0, hil)
    if residual > 1e-12:
        raise FockError(f"parity flip violated at build time (residual {residual:.3e})")
    inh = draw_inhomogeneity(model, k, draw) if (draw is not None and model.epsilon > 0) else None
    return SegmentHamiltonian(h0, hil, extra, k, inh)
