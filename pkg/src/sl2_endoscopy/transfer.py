"""Transfer factors, the transfer f -> f^E and the fundamental-lemma check."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Literal

from src.sl2_endoscopy.arith.cyclo import ONE, ZERO, CycloValue, q_power
from src.sl2_endoscopy.arith.local_field import LocalElem
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.matrices import TestFunction
from src.sl2_endoscopy.orbital import OrbitalCell, orbital, unipotent_kappa_orbital
from src.sl2_endoscopy.quad_ext import ExtElem, ExtKind, KappaChar, QuadExt, lambda_const
from src.sl2_endoscopy.utils.exceptions import ExtensionError, OracleSizeError, RegularityError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)

ConstantMode = Literal["default", "fl"]
Normalization = Literal["F", "E"]


@dataclass
class TransferFactor:
    """Delta(t) = c * eps(b) * D(b)."""

    ext_label: str
    constant: CycloValue
    value: CycloValue
    normalization: str


def transfer_constant(E: QuadExt, mode: ConstantMode = "default") -> CycloValue:
    """c = lambda^-1 by default, c = 1 in the fundamental-lemma normalization."""
    if mode == "fl":
        return ONE
    if mode == "default":
        return lambda_const(E).inverse()
    raise ValueError(f"unknown constant mode {mode!r}")


def tau_gap_val2(E: QuadExt) -> int:
    """2 v(tau - conj(tau)): v(disc) away from characteristic 2, 2 v(t) in it."""
    if E.base.characteristic == 2:
        return 2 * E.t.val
    return E.disc.val


def weyl_factor(E: QuadExt, b: LocalElem, normalization: Normalization = "F") -> CycloValue:
    """D(b) = |b (tau - conj(tau))|, with the E-normalized absolute value squared."""
    if b.is_zero():
        raise RegularityError("weyl_factor")
    e2 = -(2 * b.val + tau_gap_val2(E))
    if normalization == "E":
        e2 *= 2
    elif normalization != "F":
        raise ValueError(f"unknown normalization {normalization!r}")
    return q_power(E.base.p, E.base.f, e2)


def transfer_factor(
    E: QuadExt,
    t: ExtElem,
    mode: ConstantMode = "default",
    normalization: Normalization = "F",
    constant: CycloValue | None = None,
) -> TransferFactor:
    """
    Transfer factor at a regular elliptic t = a + b tau.

    Raises:
        ExtensionError: If E is split
        RegularityError: If b = 0
    """
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError("transfer factors are attached to elliptic tori")
    if t.b.is_zero():
        raise RegularityError("transfer_factor")
    c = constant if constant is not None else transfer_constant(E, mode)
    value = c * E.epsilon(t.b) * weyl_factor(E, t.b, normalization)
    return TransferFactor(ext_label=E.label, constant=c, value=value, normalization=normalization)


def kappa_germ_constant(E: QuadExt) -> Fraction:
    """c_2 = (q + 1) / (q - 1), the limit of Delta * O^eps near the center for unramified E."""
    if E.kind != ExtKind.UNRAMIFIED:
        raise ExtensionError("the kappa-germ constant is attached to the unramified torus")
    return Fraction(E.q + 1, E.q - 1)


def central_sign(t: ExtElem) -> int:
    if not t.b.is_zero():
        raise ValueError("element is regular")
    if (t.a - 1).is_zero():
        return 1
    if (t.a + 1).is_zero():
        return -1
    raise RegularityError("central_sign")


def central_transfer(E: QuadExt, z: int, f: TestFunction, mode: ConstantMode = "default") -> CycloValue:
    """f^E(z) = c * c_2 * O^eps(z nu, f) for z = +-1; zero for ramified E."""
    if E.kind == ExtKind.RAMIFIED:
        return ZERO
    c = transfer_constant(E, mode)
    unipotent = unipotent_kappa_orbital(E.base, z, KappaChar(E), f)
    return c * kappa_germ_constant(E) * unipotent


def transfer_value(E: QuadExt, t: ExtElem, f: TestFunction, mode: ConstantMode = "default") -> CycloValue:
    """f^E(t) for t in the norm-one torus of a field E."""
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError("use split_transfer for the split torus")
    if t.b.is_zero():
        return central_transfer(E, central_sign(t), f, mode)
    delta = transfer_factor(E, t, mode).value
    return delta * orbital(E, t, f, KappaChar(E)).value


def split_mass(q: int, r: int, v: int) -> Fraction:
    """Measure of {n in F : diag(a, 1/a) u(n) lies in the r-th cell}, v = |v(a)|."""
    if r < v:
        return Fraction(0)
    if r == v:
        return Fraction(q**r)
    return q**r * (1 - Fraction(1, q))


def split_transfer(f: TestFunction, a: LocalElem) -> Fraction:
    """f^E(a) = integral over F of f([[a, n], [0, 1/a]]) dn for the split torus."""
    if a.is_zero():
        raise ValueError("a must be a unit of F")
    q = a.field.q
    v = abs(a.val)
    return sum((c * split_mass(q, r, v) for r, c in f), Fraction(0))


# Norm-one torus

def torus_quotient(E: QuadExt, k: int) -> list[ExtElem]:
    """Representatives x / conj(x) of E^1 / E^1_k, one per class, identity first."""
    if k < 1:
        raise ValueError("level must be at least 1")
    E.require_standard_basis("torus_quotient")
    F = E.base
    size = F.q ** (2 * k)
    if size > settings.ORACLE_SIZE_GUARD:
        raise OracleSizeError("torus_quotient", size, settings.ORACLE_SIZE_GUARD)
    digits = list(product(F.residue.elements, repeat=k))
    seen: dict[tuple, ExtElem] = {}
    shifts = [E.element(1)] + ([E.tau] if E.kind == ExtKind.RAMIFIED else [])
    for shift in shifts:
        for c_digits, d_digits in product(digits, digits):
            if E.kind == ExtKind.RAMIFIED and c_digits[0] == 0:
                continue
            if c_digits[0] == 0 and d_digits[0] == 0:
                continue
            x = ExtElem(E, F.from_digits(c_digits), F.from_digits(d_digits)) * shift
            t = x / x.conjugate()
            seen.setdefault(t.key(k), t)
    identity = E.element(1).key(k)
    reps = [seen.pop(identity)] + list(seen.values())
    logger.debug(f"E^1/E^1_{k} for {E.label} has {len(reps)} classes", extra={"level": k, "order": len(reps)})
    return reps


def split_torus_reps(E: QuadExt, k: int) -> list[LocalElem]:
    """
    Representatives a = pi^v u of the split torus diag(a, 1/a) modulo 1 + pi^k O,
    with 0 <= v <= k (f^E(a) = f^E(1/a)) and u running over (O / pi^k)^x, identity first.
    """
    if k < 1:
        raise ValueError("level must be at least 1")
    F = E.base
    size = (k + 1) * (F.q - 1) * F.q ** (k - 1)
    if size > settings.ORACLE_SIZE_GUARD:
        raise OracleSizeError("split_torus_reps", size, settings.ORACLE_SIZE_GUARD)
    units = [F.from_digits(digits) for digits in product(F.residue.elements, repeat=k) if digits[0] != 0]
    units.sort(key=lambda u: u.unit_digits(k) != F.one().unit_digits(k))
    return [u.shift(v) for v in range(k + 1) for u in units]


def torus_sequence(E: QuadExt, n: int, unit: int = 1) -> ExtElem | None:
    """
    A norm-one t = x / conj(x) with v(b) = n, x = 1 + pi^m u tau for the first
    m that reaches it; u is the lift of residue ``unit``.

    Returns None when no element of this shape has v(b) = n.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    F = E.base
    u = F.residue_lift(unit)
    for m in range(0, n + 1):
        x = E.element(1) + E.tau * u.shift(m)
        t = x / x.conjugate()
        if not t.b.is_zero() and t.b.val == n:
            return t
    return None


@dataclass
class TransferTable:
    """Values of f^E on representatives of E^1 / E^1_k (of F^x / 1 + pi^k O for split E)."""

    ext_label: str
    level: int
    mode: str
    entries: list[tuple[ExtElem | LocalElem, CycloValue]] = field(default_factory=list)


def transfer(E: QuadExt, f: TestFunction, level: int, mode: ConstantMode = "default") -> TransferTable:
    """Tabulate f^E at one level."""
    table = TransferTable(ext_label=E.label, level=level, mode=mode)
    if E.kind == ExtKind.SPLIT:
        for a in split_torus_reps(E, level):
            table.entries.append((a, CycloValue.rational(split_transfer(f, a))))
        return table
    for rep in torus_quotient(E, level):
        table.entries.append((rep, transfer_value(E, rep, f, mode)))
    return table


def _coset_key(rep: ExtElem | LocalElem, k: int) -> tuple:
    if isinstance(rep, LocalElem):
        return (rep.val, tuple(rep.unit_digits(k)))
    return rep.key(k) if k else ()


def smooth_level(E: QuadExt, f: TestFunction, max_level: int = 2, mode: ConstantMode = "default") -> int | None:
    """Smallest k <= max_level such that f^E is constant on E^1_k-cosets, sampled at level max_level + 1."""
    table = transfer(E, f, max_level + 1, mode)
    for k in range(0, max_level + 1):
        groups: dict[tuple, CycloValue] = {}
        constant = True
        for rep, value in table.entries:
            key = _coset_key(rep, k)
            if key in groups and groups[key] != value:
                constant = False
                break
            groups.setdefault(key, value)
        if constant:
            return k
    return None


# Fundamental lemma

@dataclass
class FLRow:
    """One row of the fundamental-lemma check."""

    label: str
    expected: Fraction
    value: CycloValue | None
    valuation: int | None = None
    stable: Fraction | None = None
    epsilon: Fraction | None = None
    delta: CycloValue | None = None
    cells: list[OrbitalCell] = field(default_factory=list)
    realized: bool = True
    regular: bool = False

    @property
    def passed(self) -> bool:
        return self.realized and self.value is not None and self.value == self.expected


@dataclass
class FLReport:
    ext_label: str
    kind: str
    status: str
    rows: list[FLRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "passed"

    @property
    def realized_regular(self) -> int:
        return sum(1 for row in self.rows if row.regular and row.realized)


def fl_check(E: QuadExt, depth: int = 4, level: int = 1) -> FLReport:
    """
    Check that the transfer of 1_K is the unit of the endoscopic torus:
    1 on O_E^1 for unramified E, the indicator of O^x for split E.

    Ramified E is reported as not applicable.
    """
    f = TestFunction.unit()
    report = FLReport(ext_label=E.label, kind=E.kind.value, status="passed")
    if E.kind == ExtKind.RAMIFIED:
        report.status = "not_applicable"
        return report

    if E.kind == ExtKind.SPLIT:
        F = E.base
        for j in range(-depth, depth + 1):
            for unit in F.residue.units[:2]:
                a = F.residue_lift(unit).shift(j)
                expected = Fraction(1 if j == 0 else 0)
                report.rows.append(
                    FLRow(label=f"a={a}", expected=expected, value=CycloValue.rational(split_transfer(f, a)), valuation=j)
                )
    else:
        for n in range(0, depth + 1):
            t = torus_sequence(E, n)
            if t is None:
                report.rows.append(
                    FLRow(label=f"t_{n}", expected=Fraction(1), value=None, valuation=n, realized=False, regular=True)
                )
                continue
            stable = orbital(E, t, f)
            eps = orbital(E, t, f, KappaChar(E))
            delta = transfer_factor(E, t, mode="fl").value
            report.rows.append(
                FLRow(
                    label=f"t_{n}",
                    expected=Fraction(1),
                    value=delta * eps.value,
                    valuation=n,
                    stable=stable.value.as_fraction(),
                    epsilon=eps.value.as_fraction(),
                    delta=delta,
                    cells=eps.cells,
                    regular=True,
                )
            )
        for z in (1, -1):
            report.rows.append(FLRow(label=f"z={z}", expected=Fraction(1), value=central_transfer(E, z, f, "fl")))
        for rep, value in transfer(E, f, level, "fl").entries:
            report.rows.append(FLRow(label=f"class {rep}", expected=Fraction(1), value=value))

    if not all(row.passed for row in report.rows if row.realized):
        report.status = "failed"
    elif E.kind != ExtKind.SPLIT and report.realized_regular == 0:
        report.status = "inconclusive"
    logger.info(
        f"Fundamental-lemma check for {E.label}: {report.status}",
        extra={"ext": E.label, "status": report.status, "probes": len(report.rows)},
    )
    return report
