"""
Breadth-first synthesis of decoupling sequences.

A prefix ``E_1 .. E_L`` is summarised by its state: the cumulative control
``C_L`` and the partial toggled sums of every target monomial. Two prefixes
with equal state have identical futures, so the frontier is kept per state
(canonical-form pruning) together with up to ``cap`` of the
lexicographically smallest prefixes that reach it.

Phase-shifter alphabets are handled exactly (angles as fractions of pi,
partial sums in Z[zeta]); alphabets containing beam splitters fall back to
mode matrices and polynomial sums rounded to ``ROUND_DIGITS``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import CyclotomicInteger, root_sum
from .monomials import (
    ControlSequence,
    Monomial,
    PhaseShifter,
    compose,
    monomial_key,
    phase_of,
    poly_add,
    poly_modulo_total_number,
    transform_monomial,
)

MAX_STEPS = 20
MAX_DENOMINATOR = 8
ROUND_DIGITS = 9


@dataclass
class SearchResult:
    length: int | None
    sequences: list[ControlSequence]
    truncated: bool = False
    states_explored: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.length is not None


def _check_alphabet(alphabet: Sequence) -> bool:
    exact = True
    for e in alphabet:
        if isinstance(e, PhaseShifter):
            if max(e.alpha.denominator, e.beta.denominator) > MAX_DENOMINATOR:
                raise ValueError(f"{e}: angle denominators above {MAX_DENOMINATOR} are not supported")
        else:
            exact = False
    return exact


class _ExactState:
    """Cumulative phase shifter + partial Z[zeta] sums."""

    def __init__(self, targets):
        self.targets = targets

    def start(self):
        return (PhaseShifter(0, 0), tuple(CyclotomicInteger.zero() for _ in self.targets))

    def step(self, state, element):
        acc, sums = state
        acc = compose(element, acc)
        sums = tuple(
            s + root_sum([phase_of(acc, m)], sign=-1) for s, m in zip(sums, self.targets)
        )
        return (PhaseShifter(acc.alpha, acc.beta), sums)

    def key(self, state):
        acc, sums = state
        return (acc.alpha, acc.beta, sums)

    def solved(self, state, require_cyclic, harmless):
        acc, sums = state
        if require_cyclic and (acc.alpha or acc.beta):
            return False
        return all(s.is_zero() for s in sums)


class _FloatState:
    """Cumulative mode matrix + partial polynomial sums, compared after rounding."""

    def __init__(self, targets):
        self.targets = targets

    def start(self):
        return (np.eye(2, dtype=complex), tuple({} for _ in self.targets))

    def step(self, state, element):
        acc, sums = state
        acc = element.mode_matrix() @ acc
        sums = tuple(poly_add(s, transform_monomial(m, acc)) for s, m in zip(sums, self.targets))
        return (acc, sums)

    @staticmethod
    def _round(z):
        z = complex(z)
        return (round(z.real, ROUND_DIGITS) + 0.0, round(z.imag, ROUND_DIGITS) + 0.0)

    def key(self, state):
        acc, sums = state
        mat = tuple(self._round(z) for z in acc.ravel())
        polys = tuple(
            tuple(sorted((k, self._round(v)) for k, v in s.items() if abs(v) >= 10 ** -ROUND_DIGITS))
            for s in sums
        )
        return (mat, polys)

    def solved(self, state, require_cyclic, harmless):
        acc, sums = state
        if require_cyclic and not np.allclose(acc, np.eye(2), atol=1e-9):
            return False
        for s in sums:
            if all(abs(v) < 1e-9 for v in s.values()):
                continue
            if harmless and poly_modulo_total_number(s, tol=1e-9):
                continue
            return False
        return True


def search_sequences(
    targets: Iterable[Monomial],
    alphabet: Sequence,
    max_steps: int = 8,
    cap: int = 32,
    max_states: int = 200_000,
    require_cyclic: bool = True,
    total_number_harmless: bool = False,
) -> SearchResult:
    """All minimal-length sequences over ``alphabet`` eliminating ``targets``.

    Solutions are sorted by the alphabet-index sequence ``(E_1, E_2, ...)``
    and at most ``cap`` are returned. ``truncated`` is set when a per-state
    prefix list hit ``cap`` or the frontier exceeded ``max_states``.
    """
    if max_steps > MAX_STEPS:
        raise ValueError(f"max_steps is limited to {MAX_STEPS}")
    targets = sorted(set(targets), key=monomial_key)
    alphabet = list(alphabet)
    if not targets:
        return SearchResult(0, [ControlSequence(())])
    if not alphabet:
        return SearchResult(None, [], notes=["empty alphabet"])
    ops = _ExactState(targets) if _check_alphabet(alphabet) else _FloatState(targets)

    frontier = {}
    start = ops.start()
    frontier[ops.key(start)] = (start, [()])
    explored = 0
    truncated = False
    for length in range(1, max_steps + 1):
        nxt: dict = {}
        for _, (state, prefixes) in sorted(frontier.items(), key=lambda kv: kv[1][1][0]):
            for idx, element in enumerate(alphabet):
                new_state = ops.step(state, element)
                key = ops.key(new_state)
                extended = [p + (idx,) for p in prefixes]
                if key in nxt:
                    merged = sorted(set(nxt[key][1]) | set(extended))
                    if len(merged) > cap:
                        truncated = True
                        merged = merged[:cap]
                    nxt[key] = (nxt[key][0], merged)
                else:
                    if len(extended) > cap:
                        truncated = True
                        extended = extended[:cap]
                    nxt[key] = (new_state, extended)
        explored += len(nxt)
        solutions = sorted(
            p
            for state, prefixes in nxt.values()
            if ops.solved(state, require_cyclic, total_number_harmless)
            for p in prefixes
        )
        if solutions:
            if len(solutions) > cap:
                truncated = True
            seqs = [ControlSequence(tuple(alphabet[i] for i in p)) for p in solutions[:cap]]
            return SearchResult(length, seqs, truncated, explored)
        if len(nxt) > max_states:
            return SearchResult(
                None, [], True, explored, [f"frontier exceeded {max_states} states at length {length}"]
            )
        frontier = nxt
    return SearchResult(None, [], truncated, explored, [f"no solution up to length {max_steps}"])
