"""Exact arithmetic for intersection forms and spin 4-manifold invariants.

Everything here is integer/rational and exact: signatures come from the
pivoted LDL inertia over rationals, mod-2 reductions are done on
``fractions.Fraction`` values, and no floating point ever enters.  The
identities tying the invariants together (well-definedness of the lifted
Rohlin invariant, of the Cappell-Shaneson invariant, and the mod-2
agreement between them) hold at the level of rational arithmetic and are
exposed as checkable operations.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import ContractViolation
from .linalg import Inertia, rational_ldl_inertia

__all__ = [
    "Mod2Rational",
    "IntersectionForm",
    "KOElement",
    "AlphaS1",
    "builtin_form",
    "builtin_form_names",
    "diag_form",
    "form_from_rows",
    "direct_sum",
    "negate",
    "parse_form_spec",
    "rohlin",
    "ko_group",
    "alpha_n",
    "alpha_s1",
    "w_invariant",
    "w_mod2_equals_rohlin",
    "w_welldefined_delta",
    "beta",
    "beta_welldefined_check",
    "w_cs",
    "w_cs_mod2_matches_beta",
    "novikov_glue_signature",
]

RationalLike = Union[int, str, Fraction, "Mod2Rational"]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Mod2Rational):
        return x.value
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise ContractViolation(f"{x!r} is not an exact rational")


@dataclass(frozen=True)
class Mod2Rational:
    """An exact rational remembered together with its residue mod 2Z."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))

    @property
    def residue(self) -> Fraction:
        """Canonical representative of value mod 2Z in [0, 2)."""
        return self.value - 2 * math.floor(self.value / 2)

    def same_mod2(self, other: "Mod2Rational") -> bool:
        return self.residue == other.residue

    def __str__(self):
        return f"{self.value} = {self.residue} (mod 2)"


@dataclass(frozen=True)
class IntersectionForm:
    """Exact symmetric integer bilinear form with cached inertia data."""

    name: str
    matrix: tuple
    rank: int
    signature: int
    inertia: Inertia

    def __str__(self):
        return f"{self.name}: rank {self.rank}, signature {self.signature}"


def form_from_rows(name: str, rows: Sequence[Sequence[int]]) -> IntersectionForm:
    matrix = tuple(tuple(int(x) for x in row) for row in rows)
    n = len(matrix)
    if n == 0 or any(len(r) != n for r in matrix):
        raise ContractViolation("form matrix must be square and nonempty")
    for i in range(n):
        for j in range(n):
            if matrix[i][j] != matrix[j][i]:
                raise ContractViolation("form matrix must be symmetric")
    inertia = rational_ldl_inertia(matrix)
    return IntersectionForm(name=name, matrix=matrix, rank=n,
                            signature=inertia.signature, inertia=inertia)


_E8_ROWS = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, 0),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, -1),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, 0, 0, -1, 0, 0, 2),
)

_H_ROWS = ((0, 1), (1, 0))


def diag_form(entries: Sequence[int]) -> IntersectionForm:
    ents = tuple(int(e) for e in entries)
    if not ents:
        raise ContractViolation("diagonal form needs at least one entry")
    rows = [[ents[i] if i == j else 0 for j in range(len(ents))] for i in range(len(ents))]
    return form_from_rows("Diag(" + ",".join(str(e) for e in ents) + ")", rows)


def direct_sum(*forms: IntersectionForm) -> IntersectionForm:
    if not forms:
        raise ContractViolation("direct sum of nothing")
    if len(forms) == 1:
        return forms[0]
    total = sum(f.rank for f in forms)
    rows = [[0] * total for _ in range(total)]
    offset = 0
    for f in forms:
        for i in range(f.rank):
            for j in range(f.rank):
                rows[offset + i][offset + j] = f.matrix[i][j]
        offset += f.rank
    return form_from_rows("+".join(f.name for f in forms), rows)


def negate(form: IntersectionForm) -> IntersectionForm:
    rows = [[-x for x in row] for row in form.matrix]
    name = form.name[1:] if form.name.startswith("-") else "-" + form.name
    return form_from_rows(name, rows)


def builtin_form_names() -> tuple:
    return ("E8", "H", "K3", "Diag(...)")


def builtin_form(name: str) -> IntersectionForm:
    """Named forms: E8 (even positive definite, signature +8), H (the
    hyperbolic plane), K3 = 2(-E8) + 3H (signature -16, rank 22), and
    Diag(d1,d2,...)."""
    key = name.strip()
    if key == "E8":
        return form_from_rows("E8", _E8_ROWS)
    if key == "H":
        return form_from_rows("H", _H_ROWS)
    if key == "K3":
        e8 = builtin_form("E8")
        h = builtin_form("H")
        k3 = direct_sum(negate(e8), negate(e8), h, h, h)
        return IntersectionForm(name="K3", matrix=k3.matrix, rank=k3.rank,
                                signature=k3.signature, inertia=k3.inertia)
    m = re.fullmatch(r"Diag\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\)", key)
    if m:
        return diag_form([int(tok) for tok in m.group(1).split(",")])
    raise ContractViolation(f"unknown form name {name!r}")


_TERM_RE = re.compile(r"^(-)?(\d+)?(E8|H|K3|Diag\(\s*-?\d+(?:\s*,\s*-?\d+)*\s*\))$")


def parse_form_spec(spec: str) -> IntersectionForm:
    """Evaluate a sum like ``-E8+E8+3H``: names joined by '+', an optional
    '-' prefix negating a term, an optional integer count repeating it."""
    text = spec.replace(" ", "")
    if not text:
        raise ContractViolation("empty form spec")
    # split on '+' but keep a leading '-' attached to its term
    terms = []
    for raw in text.split("+"):
        if raw == "":
            raise ContractViolation(f"malformed form spec {spec!r}")
        m = _TERM_RE.match(raw)
        if not m:
            raise ContractViolation(f"malformed term {raw!r} in form spec")
        neg, count, name = m.group(1), m.group(2), m.group(3)
        f = builtin_form(name)
        if neg:
            f = negate(f)
        terms.extend([f] * (int(count) if count else 1))
    return direct_sum(*terms)


def rohlin(sig_w: int, strict: bool = False) -> Mod2Rational:
    """Rohlin invariant sign(W)/8 mod 2 of the spin boundary of W.

    ``strict`` insists on 8 | sign(W), which holds for any closed-spin
    compatible bounding; a violation flags a non-spin or wrong-boundary
    input.
    """
    if strict and sig_w % 8 != 0:
        raise ContractViolation(f"signature {sig_w} is not divisible by 8")
    return Mod2Rational(Fraction(int(sig_w), 8))


def ko_group(k: int) -> str:
    r = k % 8
    if r in (0, 4):
        return "Z"
    if r in (1, 2):
        return "Z2"
    return "0"


@dataclass(frozen=True)
class KOElement:
    """Element of KO_n: an integer for n = 0, 4 (mod 8), a bit for
    n = 1, 2 (mod 8), trivial otherwise."""

    n: int
    group: str
    value: int

    def __post_init__(self):
        if self.group != ko_group(self.n):
            raise ContractViolation(f"KO_{self.n} is not {self.group}")
        if self.group == "Z2" and self.value not in (0, 1):
            raise ContractViolation("Z/2 element must be 0 or 1")
        if self.group == "0" and self.value != 0:
            raise ContractViolation("trivial group has only 0")

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self):
        if self.group == "0":
            return f"0 in KO_{self.n} = 0"
        tag = "Z" if self.group == "Z" else "Z/2"
        return f"{self.value} in KO_{self.n} = {tag}"


def alpha_n(n: int, *, ind_plus: int = None, dim_ker: int = None,
            dim_ker_plus: int = None, sign: int = None) -> KOElement:
    """KO-valued index of the untwisted operator in dimension n:
    ind D+ for n = 0 (8), (1/2) ind D+ for n = 4 (8), dim ker D mod 2 for
    n = 1 (8), dim ker D+ mod 2 for n = 2 (8), zero otherwise.  For n = 4
    the signature variant converts through -sign/16.
    """
    given = {k: v for k, v in (("ind_plus", ind_plus), ("dim_ker", dim_ker),
                               ("dim_ker_plus", dim_ker_plus), ("sign", sign))
             if v is not None}
    r = n % 8
    if r == 0:
        if set(given) != {"ind_plus"}:
            raise ContractViolation("dimension 0 mod 8 takes ind_plus")
        return KOElement(n, "Z", int(ind_plus))
    if r == 4:
        if set(given) == {"ind_plus"}:
            if ind_plus % 2 != 0:
                raise ContractViolation("chiral index must be even (quaternionic)")
            return KOElement(n, "Z", int(ind_plus) // 2)
        if set(given) == {"sign"}:
            if sign % 16 != 0:
                raise ContractViolation(f"signature {sign} is not divisible by 16")
            return KOElement(n, "Z", -int(sign) // 16)
        raise ContractViolation("dimension 4 mod 8 takes ind_plus or sign")
    if r == 1:
        if set(given) != {"dim_ker"}:
            raise ContractViolation("dimension 1 mod 8 takes dim_ker")
        return KOElement(n, "Z2", int(dim_ker) % 2)
    if r == 2:
        if set(given) != {"dim_ker_plus"}:
            raise ContractViolation("dimension 2 mod 8 takes dim_ker_plus")
        return KOElement(n, "Z2", int(dim_ker_plus) % 2)
    if given:
        raise ContractViolation(f"KO_{n} is trivial; no data expected")
    return KOElement(n, "0", 0)


@dataclass(frozen=True)
class AlphaS1:
    """Index class of a manifold mapped to the circle: a component in
    dimension n plus a fiber component in dimension n - 1."""

    top: KOElement
    fiber: KOElement

    @property
    def is_zero(self) -> bool:
        return self.top.is_zero and self.fiber.is_zero


def alpha_s1(n: int, alpha_top: KOElement, alpha_fiber: KOElement) -> AlphaS1:
    if alpha_top.n % 8 != n % 8:
        raise ContractViolation("top component lives in the wrong dimension")
    if alpha_fiber.n % 8 != (n - 1) % 8:
        raise ContractViolation("fiber component lives in the wrong dimension")
    return AlphaS1(top=alpha_top, fiber=alpha_fiber)


def w_invariant(ind_plus: int, sig_w: int) -> Fraction:
    """Integral lift of the Rohlin invariant: ind + sign(W)/8 as an exact
    rational (an integer exactly when 8 | sign(W))."""
    return Fraction(int(ind_plus)) + Fraction(int(sig_w), 8)


def w_mod2_equals_rohlin(ind_plus: int, sig_w: int) -> bool:
    """The lift reduces mod 2 to the Rohlin invariant.  The chiral index
    is even (quaternionic linearity), so the difference w - sign/8 = ind
    lies in 2Z; an odd index is rejected as a contract violation."""
    if ind_plus % 2 != 0:
        raise ContractViolation("chiral index must be even (quaternionic)")
    diff = w_invariant(ind_plus, sig_w) - Fraction(int(sig_w), 8)
    return diff % 2 == 0


def w_welldefined_delta(sig_w: int, sig_w_prime: int) -> Fraction:
    """Index jump between two bounding choices: exactly (sign W - sign W')/8,
    which cancels the signature correction and makes the lift independent
    of the choice."""
    return Fraction(int(sig_w) - int(sig_w_prime), 8)


def beta(rho_y: RationalLike, sig_v: int, strict: bool = False) -> Mod2Rational:
    """Cappell-Shaneson invariant rho(Y) - sign(V)/16 mod 2.

    ``strict`` insists on 16 | sign(V) (the classical Z/2-valued case);
    by default the value is kept as a rational mod 2Z.
    """
    if strict and sig_v % 16 != 0:
        raise ContractViolation(f"signature {sig_v} is not divisible by 16")
    return Mod2Rational(_as_fraction(rho_y) - Fraction(int(sig_v), 16))


def beta_welldefined_check(rho0: RationalLike, sig_v0: int, sig_w_cobordism: int) -> bool:
    """Moving the cut across a cobordism W changes the data by
    rho -> rho + sign(W)/8 and sign(V) -> sign(V) + 2 sign(W); the two
    corrections cancel mod 2 exactly, for every rational input."""
    rho1 = _as_fraction(rho0) + Fraction(int(sig_w_cobordism), 8)
    sig_v1 = int(sig_v0) + 2 * int(sig_w_cobordism)
    return beta(rho1, sig_v1).same_mod2(beta(rho0, sig_v0))


def w_cs(ind_plus: int, sig_w: int, sig_v: int) -> Fraction:
    """Integral lift of the Cappell-Shaneson invariant:
    ind + sign(W)/8 - sign(V)/16, exactly."""
    return Fraction(int(ind_plus)) + Fraction(int(sig_w), 8) - Fraction(int(sig_v), 16)


def w_cs_mod2_matches_beta(ind_plus: int, sig_w: int, sig_v: int) -> bool:
    """For even chiral index, w_cs reduces mod 2 to beta(rohlin(sig_w), sig_v)."""
    if ind_plus % 2 != 0:
        raise ContractViolation("chiral index must be even (quaternionic)")
    lift = Mod2Rational(w_cs(ind_plus, sig_w, sig_v))
    return lift.same_mod2(beta(rohlin(sig_w), sig_v))


def novikov_glue_signature(sig_w: int, sig_w_prime: int) -> int:
    """Signature of the closed manifold glued from -W and W' along their
    common boundary: additivity gives sign(W') - sign(W)."""
    return int(sig_w_prime) - int(sig_w)
