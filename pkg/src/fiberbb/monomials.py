"""
First-order cancellation calculus for two-mode photon monomials.

A monomial ``b1^dag^r b1^s b2^dag^k b2^l`` is written ``Monomial(r, s, k, l)``.
A control sequence ``[m, E_m, ..., 2, E_2, 1, E_1]`` applies ``E_1`` first,
then fiber segment 1, then ``E_2``, and so on. With cumulative controls
``C_s = E_s ... E_1`` the propagator factors as

    U = C_m * prod_s (C_s^dag exp(-i H tau) C_s)

so to first order in ``tau`` a term ``M`` of ``H`` is replaced by the
toggled sum ``sum_s C_s^dag M C_s``. A monomial is *eliminated* when that
sum vanishes.

Every control element is summarised by its 2x2 mode matrix ``A`` with
``U^dag b U = A b``. For a phase shifter ``exp(i(alpha n1 + beta n2))``
this is ``diag(e^{i alpha}, e^{i beta})`` and the monomial picks up the
scalar ``exp(-i[(r-s) alpha + (k-l) beta])``; sums of those are decided
exactly in Z[zeta]. Beam splitters mix monomials and go through the
polynomial path.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .cyclotomic import CyclotomicInteger, root_sum, root_sum_float
from .fock import FockOperator, FockSpace, annihilation, creation, matrix_exponential, phase_rotation

EXPONENT_CAP = 4
ELIMINATION_TOL = 1e-12

Exponents = tuple[int, int, int, int]


@dataclass(frozen=True, order=True)
class Monomial:
    r: int
    s: int
    k: int
    l: int
    weight: complex = field(default=1.0, compare=False)
    cap: int = field(default=EXPONENT_CAP, compare=False, repr=False)

    def __post_init__(self):
        for e in self.exponents:
            if not isinstance(e, (int, np.integer)) or e < 0:
                raise ValueError("monomial exponents must be nonnegative integers")
            if e > self.cap:
                raise ValueError(f"exponent {e} exceeds cap {self.cap}")

    @property
    def exponents(self) -> Exponents:
        return (self.r, self.s, self.k, self.l)

    @property
    def degree(self) -> int:
        return self.r + self.s + self.k + self.l

    @property
    def number_conserving(self) -> bool:
        return self.r == self.s and self.k == self.l

    def adjoint(self) -> "Monomial":
        return Monomial(self.s, self.r, self.l, self.k, complex(self.weight).conjugate(), self.cap)

    def with_weight(self, weight: complex) -> "Monomial":
        return Monomial(self.r, self.s, self.k, self.l, weight, self.cap)

    def label(self) -> str:
        parts = []
        for name, c, a in (("b1", self.r, self.s), ("b2", self.k, self.l)):
            if c:
                parts.append(f"{name}^dag" + (f"^{c}" if c > 1 else ""))
            if a:
                parts.append(name + (f"^{a}" if a > 1 else ""))
        return " ".join(parts) or "1"

    def literal(self) -> str:
        return f"c({self.r},{self.k})a({self.s},{self.l})"

    def to_operator(self, space: FockSpace, modes: tuple[int, int] = (0, 1)) -> FockOperator:
        c1, a1 = creation(space, modes[0]), annihilation(space, modes[0])
        c2, a2 = creation(space, modes[1]), annihilation(space, modes[1])
        op = c1.power(self.r) @ a1.power(self.s) @ c2.power(self.k) @ a2.power(self.l)
        return complex(self.weight) * op


LINEAR = (Monomial(1, 0, 0, 0), Monomial(0, 1, 0, 0), Monomial(0, 0, 1, 0), Monomial(0, 0, 0, 1))
SET_A = (
    Monomial(1, 0, 0, 1),  # b1^dag b2
    Monomial(0, 1, 1, 0),  # b2^dag b1
    Monomial(2, 0, 0, 0),
    Monomial(0, 0, 2, 0),
    Monomial(0, 2, 0, 0),
    Monomial(0, 0, 0, 2),
)
SET_B = (Monomial(0, 1, 0, 1), Monomial(1, 0, 1, 0))
SET_C = (Monomial(1, 1, 0, 0), Monomial(0, 0, 1, 1))
BILINEAR = SET_A + SET_B + SET_C
NAMED_SETS = {"linear": LINEAR, "A": SET_A, "B": SET_B, "C": SET_C, "bilinear": BILINEAR}


def monomial_key(m: Monomial) -> tuple:
    return (m.degree, m.r, m.s, m.k, m.l)


def _reduce_angle(a) -> Fraction:
    return Fraction(a) % 2


@dataclass(frozen=True)
class PhaseShifter:
    """``exp(i pi (alpha n1 + beta n2))``; angles are stored in units of pi, mod 2."""

    alpha: Fraction
    beta: Fraction
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _reduce_angle(self.alpha))
        object.__setattr__(self, "beta", _reduce_angle(self.beta))

    @property
    def exact(self) -> bool:
        return True

    def mode_matrix(self) -> np.ndarray:
        return np.diag([np.exp(1j * np.pi * float(self.alpha)), np.exp(1j * np.pi * float(self.beta))])

    def dag(self) -> "PhaseShifter":
        return PhaseShifter(-self.alpha, -self.beta, (self.name + "^dag") if self.name else "")

    def unitary(self, space: FockSpace, modes: tuple[int, int] = (0, 1)) -> FockOperator:
        angles = [0.0] * space.num_modes
        angles[modes[0]] = math.pi * float(self.alpha)
        angles[modes[1]] = math.pi * float(self.beta)
        return phase_rotation(space, angles)

    def __str__(self):
        return self.name or f"P({self.alpha},{self.beta})"


def phase_of(element: PhaseShifter, m: Monomial) -> Fraction:
    """Conjugation phase of ``m`` under ``element`` in units of pi, reduced mod 2.

    ``P m P^dag = exp(i pi * phase) m`` with phase ``(r-s) alpha + (k-l) beta``.
    """
    return ((m.r - m.s) * element.alpha + (m.k - m.l) * element.beta) % 2


@dataclass(frozen=True)
class BeamSplitter:
    """Polarization mixer with ``U^dag b1 U = cos(2 theta) b1 + sin(2 theta) b2``.

    ``theta`` is in units of pi, waveplate convention: ``theta = 1/4`` swaps the
    two modes (``b1 -> b2``, ``b2 -> -b1``), ``theta = 1/8`` is the 50:50 mixer.
    """

    theta: Fraction
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta) % 1)

    @property
    def exact(self) -> bool:
        return False

    def mode_matrix(self) -> np.ndarray:
        c, s = math.cos(2 * math.pi * float(self.theta)), math.sin(2 * math.pi * float(self.theta))
        return np.array([[c, s], [-s, c]], dtype=complex)

    def dag(self) -> "BeamSplitter":
        return BeamSplitter(-self.theta, (self.name + "^dag") if self.name else "")

    def unitary(self, space: FockSpace, modes: tuple[int, int] = (0, 1)) -> FockOperator:
        c1, a1 = creation(space, modes[0]), annihilation(space, modes[0])
        c2, a2 = creation(space, modes[1]), annihilation(space, modes[1])
        gen = 1j * (c1 @ a2 - c2 @ a1)  # Hermitian
        return matrix_exponential(gen, -2j * math.pi * float(self.theta))

    def __str__(self):
        return self.name or f"BS({self.theta})"


@dataclass(frozen=True)
class Composite:
    """Operator product ``factors[0] @ factors[1] @ ...`` (last factor acts first)."""

    factors: tuple
    name: str = field(default="", compare=False)

    @property
    def exact(self) -> bool:
        return all(f.exact for f in self.factors)

    def mode_matrix(self) -> np.ndarray:
        return reduce(np.matmul, (f.mode_matrix() for f in self.factors))

    def dag(self) -> "Composite":
        return Composite(tuple(f.dag() for f in reversed(self.factors)))

    def unitary(self, space: FockSpace, modes: tuple[int, int] = (0, 1)) -> FockOperator:
        return reduce(lambda x, y: x @ y, (f.unitary(space, modes) for f in self.factors))

    def __str__(self):
        return self.name or "*".join(str(f) for f in self.factors)


ControlElement = Union[PhaseShifter, BeamSplitter, Composite]


def compose(*elements: ControlElement, name: str = "") -> ControlElement:
    """Operator product of control elements; phase shifters collapse exactly."""
    flat = []
    for e in elements:
        flat.extend(e.factors if isinstance(e, Composite) else [e])
    if all(isinstance(e, PhaseShifter) for e in flat):
        return PhaseShifter(sum((e.alpha for e in flat), Fraction(0)),
                            sum((e.beta for e in flat), Fraction(0)), name)
    return Composite(tuple(flat), name)


IDENTITY = PhaseShifter(0, 0, "I")
PI = PhaseShifter(1, 1, "Pi")
PI1 = PhaseShifter(1, 0, "Pi1")
PI2 = PhaseShifter(0, 1, "Pi2")
GAMMA = PhaseShifter(Fraction(1, 2), Fraction(-1, 2), "G")
GAMMA_DAG = PhaseShifter(Fraction(-1, 2), Fraction(1, 2), "Gd")
PI_GAMMA_DAG = compose(PI, GAMMA_DAG, name="PiGd")  # (1/2, 3/2)
PI_GAMMA = compose(PI, GAMMA, name="PiG")  # (3/2, 1/2)
PI_GAMMA_PI1 = compose(PI, GAMMA, PI1, name="PiGPi1")  # (5/2, 1/2) -> (1/2, 1/2)
SWAP = BeamSplitter(Fraction(1, 4), "BS")
NAMED_ELEMENTS = {
    e.name: e for e in (IDENTITY, PI, PI1, PI2, GAMMA, GAMMA_DAG, PI_GAMMA_DAG, PI_GAMMA, PI_GAMMA_PI1, SWAP)
}


@dataclass(frozen=True)
class ControlSequence:
    """Control elements in application order: ``elements[0]`` precedes segment 1."""

    elements: tuple
    name: str = field(default="", compare=False)

    def __len__(self):
        return len(self.elements)

    @classmethod
    def from_notation(cls, items: Sequence, name: str = "") -> "ControlSequence":
        """Build from the bracket notation ``[m, E_m, ..., 1, E_1]`` given as a list."""
        items = list(items)
        if len(items) % 2:
            raise ValueError("notation must alternate segment labels and elements")
        labels = items[0::2]
        elems = items[1::2]
        m = len(labels)
        if list(labels) != list(range(m, 0, -1)):
            raise ValueError(f"segment labels must read {m}..1, got {labels}")
        return cls(tuple(reversed(elems)), name)

    def notation(self) -> list:
        out = []
        for s in range(len(self.elements), 0, -1):
            out.extend([s, self.elements[s - 1]])
        return out

    def __str__(self):
        return "[" + ",".join(str(x) for x in self.notation()) + "]"

    @property
    def exact(self) -> bool:
        return all(isinstance(e, PhaseShifter) for e in self.elements)

    def cumulative(self) -> list:
        """``C_1 .. C_m`` as elements (phase shifters when exact, else Composites)."""
        out, acc = [], IDENTITY
        for e in self.elements:
            acc = compose(e, acc)
            out.append(acc)
        return out

    def total(self) -> ControlElement:
        return self.cumulative()[-1] if self.elements else IDENTITY

    def is_cyclic(self) -> bool:
        t = self.total()
        if isinstance(t, PhaseShifter):
            return t.alpha == 0 and t.beta == 0
        return bool(np.allclose(t.mode_matrix(), np.eye(2), atol=1e-12))

    def repeat(self, times: int) -> "ControlSequence":
        return ControlSequence(self.elements * times, self.name)

    def schedule(self, num_segments: int) -> list:
        """Element preceding each of ``num_segments`` segments, repeating the period."""
        m = len(self.elements)
        if m == 0 or num_segments % m:
            raise ValueError(f"{num_segments} segments is not a whole number of periods of {m}")
        return list(self.elements) * (num_segments // m)


def _seq(items, name):
    return ControlSequence.from_notation(items, name)


OMEGA12 = _seq([2, PI, 1, PI], "omega12")
OMEGA1234 = _seq([4, PI, 3, PI_GAMMA_DAG, 2, PI, 1, PI_GAMMA], "omega1234")
EIGHT_STEP = _seq(
    [8, PI, 7, PI_GAMMA_DAG, 6, PI, 5, PI_GAMMA_PI1, 4, PI, 3, PI_GAMMA_DAG, 2, PI, 1, PI_GAMMA_PI1],
    "eightstep",
)
# Reconstruction of the nondegenerate construction: the eight-step block run once
# in the frame of a mode swap and once directly. 16 segments, 16 shifters + 2 splitters.
SIXTEEN_STEP = ControlSequence(
    (compose(PI_GAMMA_PI1, SWAP.dag(), name="PiGPi1*BSd"),)
    + EIGHT_STEP.elements[1:]
    + (compose(PI_GAMMA_PI1, SWAP, name="PiGPi1*BS"),)
    + EIGHT_STEP.elements[1:],
    "sixteenstep",
)
IDENTITY_PAIR = _seq([2, IDENTITY, 1, IDENTITY], "identity")
NAMED_SEQUENCES = {s.name: s for s in (OMEGA12, OMEGA1234, EIGHT_STEP, SIXTEEN_STEP, IDENTITY_PAIR)}


def pair_sequence(shifter: PhaseShifter) -> ControlSequence:
    """``[2, P^dag, 1, P]``: segment 1 sees ``P``, segment 2 the identity."""
    return ControlSequence((shifter, shifter.dag()), f"pair({shifter})")


# --- polynomial path --------------------------------------------------------

Polynomial = dict  # Exponents -> complex


def _linear_power(coeffs: tuple[complex, complex], power: int) -> dict:
    """Expand ``(c0 x + c1 y)**power`` into ``{(i, j): coef}``."""
    return {
        (i, power - i): math.comb(power, i) * coeffs[0] ** i * coeffs[1] ** (power - i)
        for i in range(power + 1)
    }


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (a, b), u in p.items():
        for (c, d), v in q.items():
            key = (a + c, b + d)
            out[key] = out.get(key, 0) + u * v
    return out


def transform_monomial(m: Monomial, mode_matrix: np.ndarray) -> Polynomial:
    """``U^dag m U`` as a polynomial when ``U^dag b U = A b``.

    Passive transforms preserve normal order, so creators and annihilators
    expand independently.
    """
    a = np.asarray(mode_matrix, dtype=complex)
    ac = a.conj()
    cre = _poly_mul(_linear_power((ac[0, 0], ac[0, 1]), m.r), _linear_power((ac[1, 0], ac[1, 1]), m.k))
    ann = _poly_mul(_linear_power((a[0, 0], a[0, 1]), m.s), _linear_power((a[1, 0], a[1, 1]), m.l))
    out: Polynomial = {}
    w = complex(m.weight)
    for (p, q), u in cre.items():
        for (x, y), v in ann.items():
            key = (p, x, q, y)
            out[key] = out.get(key, 0) + w * u * v
    return out


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + v
    return out


def poly_is_zero(p: Polynomial, tol: float = ELIMINATION_TOL) -> bool:
    return all(abs(v) < tol for v in p.values())


def poly_modulo_total_number(p: Polynomial, tol: float = ELIMINATION_TOL) -> bool:
    """True if ``p`` is a multiple of ``n1 + n2`` (harmless for one-photon qubits)."""
    rest = {k: v for k, v in p.items() if abs(v) >= tol}
    if set(rest) - {(1, 1, 0, 0), (0, 0, 1, 1)}:
        return False
    return abs(rest.get((1, 1, 0, 0), 0) - rest.get((0, 0, 1, 1), 0)) < tol


def poly_to_operator(p: Polynomial, space: FockSpace, modes=(0, 1)) -> FockOperator:
    total = space.zero()
    for (r, s, k, l), c in sorted(p.items()):
        if c != 0:
            total = total + Monomial(r, s, k, l, c, cap=max(r, s, k, l, EXPONENT_CAP)).to_operator(space, modes)
    return total


# --- survival weights -------------------------------------------------------


@dataclass(frozen=True)
class SurvivalWeight:
    """First-order weight of ``monomial`` after a control sequence.

    ``exact`` holds the Z[zeta] value for phase-shifter sequences; ``value``
    is its complex evaluation (coefficient of ``monomial`` itself on the
    beam-splitter path). ``polynomial`` is the full toggled sum.
    """

    monomial: Monomial
    value: complex
    polynomial: Polynomial
    exact: Optional[CyclotomicInteger] = None
    warnings: tuple = ()

    @property
    def eliminated(self) -> bool:
        if self.exact is not None:
            return self.exact.is_zero()
        return poly_is_zero(self.polynomial)

    @property
    def harmless(self) -> bool:
        return not self.eliminated and poly_modulo_total_number(self.polynomial)

    @property
    def gaussian(self) -> Optional[tuple[int, int]]:
        return None if self.exact is None else self.exact.gaussian()


def _exact_phases(seq: ControlSequence, m: Monomial) -> list[Fraction]:
    return [phase_of(c, m) for c in seq.cumulative()]


def survival_weight(seq: ControlSequence, m: Monomial) -> SurvivalWeight:
    """``sum_s C_s^dag m C_s`` for the cumulative controls of ``seq``."""
    notes = () if seq.is_cyclic() or not len(seq) else ("non-cyclic",)
    if notes:
        warnings.warn(f"sequence {seq} is not cyclic", RuntimeWarning, stacklevel=2)
    key = m.exponents
    if seq.exact:
        # C^dag m C = exp(-i pi phase) m
        exact = root_sum(_exact_phases(seq, m), sign=-1)
        value = complex(exact) * complex(m.weight)
        poly = {key: value} if len(seq) else {}
        return SurvivalWeight(m, value, poly, exact, notes)
    poly: Polynomial = {}
    for c in seq.cumulative():
        poly = poly_add(poly, transform_monomial(m, c.mode_matrix()))
    return SurvivalWeight(m, complex(poly.get(key, 0)), poly, None, notes)


def survival_weight_float(seq: ControlSequence, m: Monomial, dps: int = 40):
    """High-precision float evaluation of the exact path (phase shifters only)."""
    if not seq.exact:
        raise ValueError("float path is defined for phase-shifter sequences")
    return root_sum_float(_exact_phases(seq, m), sign=-1, dps=dps)


@dataclass
class ClassificationReport:
    eliminated: list
    surviving: list  # (Monomial, SurvivalWeight)
    harmless: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    warnings: tuple = ()

    @property
    def all_eliminated(self) -> bool:
        return not self.surviving

    def as_rows(self) -> list[tuple[str, str, str]]:
        rows = [(m.literal(), "eliminated", "0") for m in self.eliminated]
        rows += [(m.literal(), "harmless", _fmt_weight(w)) for m, w in self.harmless]
        rows += [
            (m.literal(), "survives" + (f" ({self.flags[m]})" if m in self.flags else ""), _fmt_weight(w))
            for m, w in self.surviving
        ]
        return rows


def _fmt_weight(w: SurvivalWeight) -> str:
    g = w.gaussian
    if g is not None:
        return f"{g[0]}{g[1]:+d}i"
    return f"{w.value.real:.6g}{w.value.imag:+.6g}i"


def classify(seq: ControlSequence, terms: Iterable[Monomial], total_number_harmless: bool = False):
    """Partition ``terms`` into eliminated / surviving at first order.

    With ``total_number_harmless`` a residual proportional to ``n1 + n2`` is
    reported separately as harmless instead of surviving.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        weights = [survival_weight(seq, m) for m in sorted(set(terms), key=monomial_key)]
    rep = ClassificationReport([], [])
    for w in weights:
        if w.eliminated:
            rep.eliminated.append(w.monomial)
        elif total_number_harmless and w.harmless:
            rep.harmless.append((w.monomial, w))
        else:
            rep.surviving.append((w.monomial, w))
            if w.monomial.number_conserving:
                rep.flags[w.monomial] = "degenerate-harmless"
    if weights:
        rep.warnings = weights[0].warnings
    return rep


# --- matrix oracle ----------------------------------------------------------


def _oracle_space(m: Monomial) -> FockSpace:
    return FockSpace(2, max(4, m.r + m.k + 1, m.s + m.l + 1))


def low_sector_mask(space: FockSpace, modes=(0, 1)) -> np.ndarray:
    """Basis states with ``n1 + n2 <= d - 1``, where truncation is invisible to passive optics."""
    occ = space.occupation_table()
    return occ[:, modes[0]] + occ[:, modes[1]] <= space.dim_per_mode - 1


def toggled_matrix(seq: ControlSequence, m: Monomial, space: FockSpace, modes=(0, 1)) -> np.ndarray:
    mm = m.to_operator(space, modes).matrix
    total = np.zeros_like(mm)
    for c in seq.cumulative():
        u = c.unitary(space, modes).matrix
        total += u.conj().T @ mm @ u
    return total


def matrix_check(seq: ControlSequence, m: Monomial, space: Optional[FockSpace] = None) -> float:
    """Norm of ``sum_s C_s^dag M C_s`` built from Fock matrices.

    Restricted to the sectors ``n1 + n2 <= d - 1`` so that beam splitters
    act exactly despite truncation.
    """
    space = space or _oracle_space(m)
    mask = low_sector_mask(space)
    total = toggled_matrix(seq, m, space)
    return float(np.linalg.norm(total[np.ix_(mask, mask)], 2))


def oracle_residual(seq: ControlSequence, m: Monomial, space: Optional[FockSpace] = None) -> float:
    """``|| matrix sum - symbolic polynomial ||`` on the faithful sectors."""
    space = space or _oracle_space(m)
    mask = low_sector_mask(space)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        w = survival_weight(seq, m)
    predicted = poly_to_operator(w.polynomial, space).matrix
    diff = toggled_matrix(seq, m, space) - predicted
    return float(np.linalg.norm(diff[np.ix_(mask, mask)], 2))


def monomials_up_to(max_exponent: int) -> list[Monomial]:
    return [Monomial(*e) for e in product(range(max_exponent + 1), repeat=4) if any(e)]
