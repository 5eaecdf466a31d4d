"""
Spatial bang-bang propagation along a segmented fiber.

The fiber is ``N`` piecewise-constant segments of duration ``tau``. Before
segment ``k`` the control element scheduled for it acts instantaneously,
so the transport operator is

    U' = exp(-i H_N tau) E_N ... exp(-i H_2 tau) E_2 exp(-i H_1 tau) E_1

and is compared with the decoherence-free transport ``exp(-i H0 T)``.
Qubit metrics are read off the photon modes after tracing out the bath:
``|0>_L = b1^dag |vac>``, ``|1>_L = b2^dag |vac>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .fock import (
    FockOperator,
    FockState,
    FockSpace,
    evolution,
    matrix_exponential,
    op_distance,
    partial_trace,
)
from .hamiltonian import FiberModel, SegmentHamiltonian, build_H0, build_HIl, build_segment
from .monomials import PI, ControlSequence

SYSTEM_MODES = (0, 1)


def qubit_indices(d: int) -> tuple[int, int]:
    """Indices of ``|1,0>`` and ``|0,1>`` in the two-mode photon space."""
    return d, 1


def qubit_state(model: FiberModel, a: complex = 1 / math.sqrt(2), b: complex = 1 / math.sqrt(2),
                bath_occupation: float = 0.0) -> FockState:
    """``(a |0>_L + b |1>_L) (x) bath``; bath in vacuum or a truncated thermal state."""
    sp = model.space
    d = sp.dim_per_mode
    sys_vec = np.zeros(d * d, dtype=complex)
    i0, i1 = qubit_indices(d)
    sys_vec[i0], sys_vec[i1] = a, b
    sys_vec /= np.linalg.norm(sys_vec)
    nb = len(model.bath_modes)
    if bath_occupation <= 0:
        bath = np.zeros(d ** nb, dtype=complex)
        bath[0] = 1.0
        return FockState(sp, np.kron(sys_vec, bath))
    x = bath_occupation / (1 + bath_occupation)
    p = x ** np.arange(d)
    p /= p.sum()
    bath_rho = np.diag(p).astype(complex)
    for _ in range(nb - 1):
        bath_rho = np.kron(bath_rho, np.diag(p))
    rho = np.kron(np.outer(sys_vec, sys_vec.conj()), bath_rho)
    return FockState(sp, rho / np.trace(rho))


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity; trace formula when either argument is pure."""
    for x, y in ((rho, sigma), (sigma, rho)):
        if abs(np.real(np.trace(x @ x)) - 1.0) < 1e-12:
            return float(np.real(np.trace(x @ y)))
    s = scipy.linalg.sqrtm(rho)
    return float(np.real(np.trace(scipy.linalg.sqrtm(s @ sigma @ s))) ** 2)


def qubit_block(system_rho: np.ndarray, d: int) -> np.ndarray:
    i0, i1 = qubit_indices(d)
    idx = [i0, i1]
    return system_rho[np.ix_(idx, idx)]


@dataclass
class PropagationResult:
    unitary: FockOperator
    final_state: FockState
    system_state: FockState
    fidelity: float
    coherence: float
    purity: float
    qubit_population: float
    diagnostics: list = field(default_factory=list)


def propagator(model: FiberModel, controls: Optional[ControlSequence] = None,
               extra: Optional[FockOperator] = None, draw: Optional[int] = None,
               return_steps: bool = False):
    """Right-to-left product of segment evolutions and control unitaries."""
    sp = model.space
    n, tau = model.num_segments, model.tau_s
    schedule = controls.schedule(n) if controls is not None and len(controls) else [None] * n
    homogeneous = draw is None or model.epsilon == 0
    if homogeneous:
        seg_u = evolution(build_segment(model, 1, extra).total(), tau).matrix
    cache: dict = {}
    u = np.eye(sp.dim, dtype=complex)
    steps = []
    for k, element in enumerate(schedule, start=1):
        if homogeneous:
            seg = seg_u
        else:
            seg = evolution(build_segment(model, k, extra, draw).total(), tau).matrix
        if element is not None:
            if element not in cache:
                cache[element] = element.unitary(sp, SYSTEM_MODES).matrix
            u = cache[element] @ u
        u = seg @ u
        if return_steps:
            steps.append(u.copy())
    out = FockOperator(sp, u)
    return (out, steps) if return_steps else out



def ideal_transport(model: FiberModel) -> FockOperator:
    return evolution(build_H0(model), model.total_time_s)


def _metrics(model: FiberModel, final: FockState, ideal: FockState):
    d = model.dim_per_mode
    rho_sys = partial_trace(final.to_density(), SYSTEM_MODES)
    ideal_sys = partial_trace(ideal.to_density(), SYSTEM_MODES)
    fid = state_fidelity(ideal_sys.data, rho_sys.data)
    block = qubit_block(rho_sys.data, d)
    pop = float(np.real(np.trace(block)))
    coherence = float(abs(block[0, 1]))
    purity = float(np.real(np.trace(block @ block)) / pop ** 2) if pop > 1e-14 else float("nan")
    return rho_sys, fid, coherence, purity, pop


def evolve(model: FiberModel, controls: Optional[ControlSequence] = None,
           initial: Optional[FockState] = None, extra: Optional[FockOperator] = None,
           draw: Optional[int] = None, diagnostics: bool = False) -> PropagationResult:
    """Transport ``initial`` through the fiber and score it against ideal transport."""
    initial = initial if initial is not None else qubit_state(model)
    if initial.space != model.space:
        raise ValueError("initial state does not live on the model's Fock space")
    if extra is not None and not extra.is_hermitian():
        raise ValueError("extra Hamiltonian term must be Hermitian")
    u, steps = propagator(model, controls, extra, draw, return_steps=True)
    final = initial.evolve(u)
    ideal = initial.evolve(ideal_transport(model))
    rho_sys, fid, coherence, purity, pop = _metrics(model, final, ideal)
    diag = []
    if diagnostics:
        d = model.dim_per_mode
        for k, uk in enumerate(steps, start=1):
            st = initial.evolve(FockOperator(model.space, uk))
            blk = qubit_block(partial_trace(st.to_density(), SYSTEM_MODES).data, d)
            diag.append({"segment": k, "qubit_population": float(np.real(np.trace(blk))),
                         "coherence": float(abs(blk[0, 1]))})
    return PropagationResult(u, final, rho_sys, fid, coherence, purity, pop, diag)


def pair_cancellation_residual(seg: SegmentHamiltonian, tau: float, shifter=PI) -> float:
    """``min_phi || e^{-iH tau} P e^{-iH tau} P - e^{i phi} e^{-2 i H0 tau} ||``."""
    sp = seg.H0.space
    u = evolution(seg.total(), tau)
    p = shifter.unitary(sp, SYSTEM_MODES)
    lhs = u @ p @ u @ p
    return op_distance(lhs, evolution(seg.H0, 2 * tau), phase_invariant=True)


@dataclass
class ScalingFit:
    order: float
    taus: list
    errors: list
    degenerate: bool = False


def scaling_order(model: FiberModel, controls: Optional[ControlSequence], taus: Sequence[float],
                  total_time: Optional[float] = None) -> ScalingFit:
    """Log-log slope of ``||U'(T) - exp(-i H0 T)||`` against ``tau`` at fixed ``T``."""
    total_time = total_time or model.total_time_s
    errors = []
    for tau in taus:
        n = int(round(total_time / tau))
        if abs(n * tau - total_time) > 1e-9 * total_time:
            raise ValueError(f"tau={tau} does not divide T={total_time}")
        m = model.with_(num_segments=n, delta_m=tau * model.speed_m_s)
        errors.append(op_distance(propagator(m, controls), ideal_transport(m), phase_invariant=True))
    errors_arr = np.array(errors)
    if errors_arr.max() < 1e-12:
        return ScalingFit(float("nan"), list(taus), errors, degenerate=True)
    slope = np.polyfit(np.log(np.asarray(taus)), np.log(errors_arr), 1)[0]
    return ScalingFit(float(slope), list(taus), errors)


@dataclass
class LambShiftReport:
    hermiticity_residual: float
    generator_norm: float
    purity_before: float
    purity_after: float
    overlap: complex
    pair_residual_plain: float
    pair_residual_corrected: float

    @property
    def purity_change(self) -> float:
        return abs(self.purity_after - self.purity_before)


def lamb_shift_generator(model: FiberModel) -> FockOperator:
    """``H' = -i [H_I^l, H0]``, the second-order pair residual generator."""
    h0, hil = build_H0(model), build_HIl(model)
    return FockOperator(model.space, -1j * hil.commutator(h0).matrix)


def lamb_shift_check(model: FiberModel, tau: Optional[float] = None,
                     initial: Optional[FockState] = None) -> LambShiftReport:
    tau = model.tau_s if tau is None else tau
    hp = lamb_shift_generator(model)
    herm = float(np.max(np.abs(hp.matrix - hp.matrix.conj().T), initial=0.0))
    initial = initial if initial is not None else qubit_state(model)
    v = matrix_exponential(FockOperator(model.space, 0.5 * (hp.matrix + hp.matrix.conj().T)), -1j * tau ** 2)
    after = initial.evolve(v)
    d = model.dim_per_mode

    def purity(st):
        blk = qubit_block(partial_trace(st.to_density(), SYSTEM_MODES).data, d)
        return float(np.real(np.trace(blk @ blk)) / np.real(np.trace(blk)) ** 2)

    overlap = complex(np.vdot(initial.data, after.data)) if not initial.is_density else complex("nan")
    seg = build_segment(model)
    h0 = seg.H0
    u = evolution(seg.total(), tau)
    p = PI.unitary(model.space, SYSTEM_MODES)
    pair = u @ p @ u @ p
    free = evolution(h0, 2 * tau)
    plain = op_distance(pair, free)
    corrected = op_distance(pair, free @ v)
    return LambShiftReport(herm, hp.norm(), purity(initial), purity(after), overlap, plain, corrected)


@dataclass
class DecayEstimate:
    mean: float
    stderr: float
    samples: list


def inhomogeneous_decay(model: FiberModel, controls: Optional[ControlSequence] = None,
                        ensemble_size: int = 200, initial: Optional[FockState] = None) -> DecayEstimate:
    """Mean extra coherence factor caused by Gaussian segment inhomogeneity.

    Each sample is ``|rho_01|`` with draws ``(seed, i)`` divided by the
    ``epsilon = 0`` coherence of the same fiber.
    """
    initial = initial if initial is not None else qubit_state(model)
    reference = evolve(model.with_(epsilon=0.0), controls, initial).coherence
    if model.epsilon == 0:
        return DecayEstimate(1.0, 0.0, [1.0] * ensemble_size)
    samples = [evolve(model, controls, initial, draw=i).coherence / reference for i in range(ensemble_size)]
    arr = np.array(samples)
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return DecayEstimate(float(arr.mean()), stderr, samples)
