"""
Text literals for control sequences and term sets.

Sequences::

    omega12 | omega1234 | eightstep | sixteenstep | identity
    [8,Pi,7,PiGd,6,Pi,5,PiGPi1,4,Pi,3,PiGd,2,Pi,1,PiGPi1]

Elements inside brackets are named shifters (``I Pi Pi1 Pi2 G Gd PiG PiGd
PiGPi1``), ``P(alpha,beta)`` with angles in units of pi, ``BS(theta)`` or
the named swap ``BS``, optionally suffixed with ``^dag``, and joined with
``*`` for an operator product (rightmost acts first).

Terms: a comma-separated list of set names (``linear A B C bilinear``) and
monomials ``[coef*]c(r,k)a(s,l)`` for ``coef b1^dag^r b2^dag^k b1^s b2^l``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .monomials import (
    NAMED_ELEMENTS,
    NAMED_SEQUENCES,
    NAMED_SETS,
    BeamSplitter,
    ControlSequence,
    Monomial,
    PhaseShifter,
    compose,
    monomial_key,
)


class ParseError(ValueError):
    pass


_ELEMENTS_CI = {k.lower(): v for k, v in NAMED_ELEMENTS.items()}
_SEQUENCES_CI = {k.lower(): v for k, v in NAMED_SEQUENCES.items()}
_SETS_CI = {k.lower(): v for k, v in NAMED_SETS.items()}

_CALL = re.compile(r"^(P|BS)\((.*)\)$", re.IGNORECASE)
_TERM = re.compile(r"^(?:(?P<coef>[^*]+)\*)?c\((?P<r>\d+),(?P<k>\d+)\)a\((?P<s>\d+),(?P<l>\d+)\)$")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad angle {text!r} (expected a rational number of pi)") from None


def parse_element(text: str):
    """One control element; see the module docstring for the forms."""
    text = text.strip().replace(" ", "")
    if not text:
        raise ParseError("empty control element")
    factors = text.split("*")
    if len(factors) > 1:
        return compose(*(parse_element(f) for f in factors), name=text)
    dag = False
    if text.lower().endswith("^dag"):
        dag, text = True, text[:-4]
    if text.lower() in _ELEMENTS_CI:
        el = _ELEMENTS_CI[text.lower()]
    else:
        m = _CALL.match(text)
        if not m:
            raise ParseError(f"unknown control element {text!r}")
        args = [a for a in m.group(2).split(",")]
        if m.group(1).upper() == "P":
            if len(args) != 2:
                raise ParseError(f"P takes two angles, got {text!r}")
            el = PhaseShifter(_fraction(args[0]), _fraction(args[1]))
        else:
            if len(args) != 1:
                raise ParseError(f"BS takes one angle, got {text!r}")
            el = BeamSplitter(_fraction(args[0]))
    return el.dag() if dag else el


def _split_top(text: str) -> list[str]:
    """Split on commas not enclosed in parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses")
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError("unbalanced parentheses")
    out.append("".join(cur))
    return [t.strip() for t in out]


def parse_sequence(text: str) -> ControlSequence:
    text = text.strip()
    if text.lower() in _SEQUENCES_CI:
        return _SEQUENCES_CI[text.lower()]
    if not (text.startswith("[") and text.endswith("]")):
        names = ", ".join(sorted(NAMED_SEQUENCES))
        raise ParseError(f"unknown sequence {text!r}; use one of {names} or [m,E_m,...,1,E_1]")
    body = text[1:-1].strip()
    if not body:
        return ControlSequence(())
    items = _split_top(body)
    if len(items) % 2:
        raise ParseError("sequence must alternate segment labels and elements")
    notation = []
    for i, tok in enumerate(items):
        if i % 2 == 0:
            if not tok.isdigit():
                raise ParseError(f"expected a segment label, got {tok!r}")
            notation.append(int(tok))
        else:
            notation.append(parse_element(tok))
    try:
        return ControlSequence.from_notation(notation, name=text)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_terms(text: str) -> list[Monomial]:
    """Sorted, de-duplicated monomials named by ``text``."""
    out: list[Monomial] = []
    for tok in _split_top(text.replace(" ", "")):
        if not tok:
            raise ParseError("empty term")
        if tok.lower() in _SETS_CI:
            out.extend(_SETS_CI[tok.lower()])
            continue
        m = _TERM.match(tok)
        if not m:
            raise ParseError(f"unknown term {tok!r}; use a set name or c(r,k)a(s,l)")
        coef = 1.0
        if m.group("coef"):
            try:
                coef = complex(m.group("coef"))
            except ValueError:
                raise ParseError(f"bad coefficient {m.group('coef')!r}") from None
        exps = [int(m.group(x)) for x in "rskl"]
        if not any(exps):
            raise ParseError("the constant term c(0,0)a(0,0) is not an interaction")
        try:
            out.append(Monomial(*exps, weight=coef))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    uniq = {}
    for m in out:
        uniq.setdefault(m, m)
    return sorted(uniq.values(), key=monomial_key)
