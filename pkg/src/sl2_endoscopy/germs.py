"""Germ profiles near the center: stable and kappa columns, germ fits and the Shalika comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from src.sl2_endoscopy.arith.cyclo import CycloValue
from src.sl2_endoscopy.arith.local_field import LocalElem, LocalField
from src.sl2_endoscopy.arith.squares import square_class_representatives
from src.sl2_endoscopy.matrices import Mat2, TestFunction, hecke_eval
from src.sl2_endoscopy.orbital import orbital, stable_orbital, unipotent_kappa_orbital
from src.sl2_endoscopy.quad_ext import ExtKind, KappaChar, QuadExt, canonical_ext
from src.sl2_endoscopy.transfer import (
    ConstantMode,
    central_transfer,
    torus_sequence,
    transfer_factor,
    weyl_factor,
)
from src.sl2_endoscopy.utils.exceptions import ExtensionError, ShalikaUnavailableError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class GermRow:
    n: int
    realized: bool
    marker: int | None = None
    stable: Fraction | None = None
    epsilon: Fraction | None = None
    delta_epsilon: CycloValue | None = None
    weyl_stable: CycloValue | None = None


@dataclass
class UnitSweep:
    """The approach t_n with b_n = pi^n u for one residue unit u."""

    unit: int
    rows: list[GermRow] = field(default_factory=list)
    n0: int | None = None

    @property
    def markers(self) -> set[int]:
        return {row.marker for row in self.rows if row.realized}


@dataclass
class GermProfile:
    """Columns O^1, O^eps, Delta O^eps and D O^1 along t_n -> 1."""

    ext_label: str
    f_label: str
    central_value: CycloValue
    rows: list[GermRow] = field(default_factory=list)
    n0: int | None = None
    affine: tuple[Fraction, Fraction] | None = None
    sweeps: list[UnitSweep] = field(default_factory=list)


def _realized(rows: list[GermRow]) -> list[GermRow]:
    return [row for row in rows if row.realized]


def _fit_affine(q: int, rows: list[GermRow]) -> tuple[Fraction, Fraction] | None:
    """Fit O^1 = alpha + beta q^n on two rows and check the rest."""
    if len(rows) < 2:
        return None
    r1, r2 = rows[0], rows[1]
    beta = (r2.stable - r1.stable) / (q**r2.n - q**r1.n)
    alpha = r1.stable - beta * q**r1.n
    if all(row.stable == alpha + beta * q**row.n for row in rows):
        return alpha, beta
    return None


def sweep_units(F: LocalField) -> list[int]:
    """Residue units standing for the unit square classes: 1, and a non-square when p is odd."""
    if F.p == 2:
        return [1]
    return [1, F.residue.first_nonsquare]


def _germ_rows(E: QuadExt, f: TestFunction, ns: list[int], unit: int, mode: ConstantMode) -> list[GermRow]:
    rows = []
    for n in ns:
        t = torus_sequence(E, n, unit)
        if t is None:
            rows.append(GermRow(n=n, realized=False))
            continue
        stable = orbital(E, t, f).value
        eps = orbital(E, t, f, KappaChar(E)).value
        rows.append(
            GermRow(
                n=n,
                realized=True,
                marker=E.epsilon(t.b),
                stable=stable.as_fraction(),
                epsilon=eps.as_fraction(),
                delta_epsilon=transfer_factor(E, t, mode).value * eps,
                weyl_stable=weyl_factor(E, t.b) * stable,
            )
        )
    return rows


def _first_constant(rows: list[GermRow], central: CycloValue) -> int | None:
    realized = _realized(rows)
    for i, row in enumerate(realized):
        if all(later.delta_epsilon == central for later in realized[i:]):
            return row.n
    return None


def germ_profile(
    E: QuadExt, f: TestFunction, n_range: Iterable[int], mode: ConstantMode = "default"
) -> GermProfile:
    """
    Tabulate the germ columns on t_n for n in n_range, once per unit in
    sweep_units so that each rational class near the center gets its own n0.

    The top-level rows, n0 and affine fit belong to the sweep with unit 1.
    Levels with no norm-one element of valuation n are kept as unrealized rows.
    """
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError("germ profiles are taken on an elliptic torus")
    ns = list(n_range)
    profile = GermProfile(ext_label=E.label, f_label=f.label, central_value=central_transfer(E, 1, f, mode))
    for unit in sweep_units(E.base):
        rows = _germ_rows(E, f, ns, unit, mode)
        profile.sweeps.append(UnitSweep(unit=unit, rows=rows, n0=_first_constant(rows, profile.central_value)))

    first = profile.sweeps[0]
    profile.rows = first.rows
    profile.n0 = first.n0
    profile.affine = _fit_affine(E.q, _realized(first.rows))
    logger.debug(
        f"Germ profile of {f.label} on {E.label}: n0={[s.n0 for s in profile.sweeps]}",
        extra={"ext": E.label, "n0": profile.n0, "rows": len(profile.rows), "sweeps": len(profile.sweeps)},
    )
    return profile


def closed_form_stable(E: QuadExt, n: int) -> Fraction:
    """O^1(t_n, 1_K) in closed form."""
    q = E.q
    if E.kind == ExtKind.UNRAMIFIED:
        return 1 + (1 + Fraction(1, q)) * q * Fraction(q**n - 1, q - 1)
    if E.kind == ExtKind.RAMIFIED:
        return Fraction(2 * (q ** (n + 1) - 1), q - 1)
    raise ExtensionError("closed forms are given for elliptic tori")


def expected_germs(E: QuadExt, n: int) -> tuple[Fraction, Fraction]:
    """(Gamma_1, Gamma_nu) at t_n."""
    q = E.q
    gamma_1 = Fraction(-2, q - 1)
    if E.kind == ExtKind.UNRAMIFIED:
        return gamma_1, Fraction(q**n * (q + 1), q - 1)
    if E.kind == ExtKind.RAMIFIED:
        return gamma_1, Fraction(2 * q ** (n + 1), q - 1)
    raise ExtensionError("germs are taken on an elliptic torus")


@dataclass
class GermFit:
    n: int
    gamma_1: Fraction
    gamma_nu: Fraction
    verified: bool
    kappa_constant: CycloValue | None = None


def _identity_value(F: LocalField, f: TestFunction) -> Fraction:
    return hecke_eval(f, Mat2.identity(F))


def germ_coefficients(E: QuadExt, n: int) -> GermFit:
    """
    Fit O^1(t_n, f) = Gamma_1 f(1) + Gamma_nu O^1(nu, f) from 1_K and the first
    cell, then verify on the second cell. For unramified E also report
    Gamma^eps * Delta, which should be the central constant c_2.
    """
    t = torus_sequence(E, n)
    if t is None:
        raise ValueError(f"no norm-one element with v(b) = {n} on {E.label}")
    F = E.base
    trivial = KappaChar()
    unit, cell1, cell2 = TestFunction.unit(), TestFunction.cell(1), TestFunction.cell(2)

    def nu(f: TestFunction) -> Fraction:
        return unipotent_kappa_orbital(F, 1, trivial, f).as_fraction()

    gamma_nu = stable_orbital(E, t, cell1) / nu(cell1)
    gamma_1 = (stable_orbital(E, t, unit) - gamma_nu * nu(unit)) / _identity_value(F, unit)
    predicted = gamma_1 * _identity_value(F, cell2) + gamma_nu * nu(cell2)
    fit = GermFit(n=n, gamma_1=gamma_1, gamma_nu=gamma_nu, verified=predicted == stable_orbital(E, t, cell2))

    if E.kind == ExtKind.UNRAMIFIED:
        eps_t = orbital(E, t, unit, KappaChar(E)).value
        eps_nu = unipotent_kappa_orbital(F, 1, KappaChar(E), unit)
        fit.kappa_constant = eps_t / eps_nu * transfer_factor(E, t, mode="fl").value
    return fit


# Shalika comparison, odd residue characteristic

def direct_class_integral(F: LocalField, eta: LocalElem, f: TestFunction) -> Fraction:
    """
    Integral of f(u(n)) over n in eta (F^x)^2: half of each shell v(n) = j with
    j = v(eta) mod 2.
    """
    q = F.q
    parity = eta.val % 2
    half_shell = (1 - Fraction(1, q)) / 2
    total = Fraction(0)
    for r, c in f:
        if r == 0:
            # shells j >= 0 with j = parity (mod 2)
            total += c * half_shell * Fraction(1, q**parity) / (1 - Fraction(1, q**2))
        elif r % 2 == parity:
            total += c * half_shell * q**r
    return total


@dataclass
class ShalikaRow:
    eta: str
    direct: Fraction
    fourier: Fraction

    @property
    def agrees(self) -> bool:
        return self.direct == self.fourier


@dataclass
class ShalikaReport:
    ext_label: str
    rows: list[ShalikaRow] = field(default_factory=list)
    additive: bool = False
    reconstruction: list[tuple[int, Fraction, Fraction]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.additive
            and all(row.agrees for row in self.rows)
            and all(lhs == rhs for _, lhs, rhs in self.reconstruction)
        )


def quadratic_characters(F: LocalField) -> list[KappaChar]:
    """The trivial character and eps_E for each quadratic extension, p odd."""
    if F.p == 2:
        raise ShalikaUnavailableError(F.p)
    return [
        KappaChar(),
        KappaChar(canonical_ext(F, ExtKind.UNRAMIFIED)),
        KappaChar(canonical_ext(F, ExtKind.RAMIFIED, 0)),
        KappaChar(canonical_ext(F, ExtKind.RAMIFIED, 1)),
    ]


def shalika_compare(E: QuadExt, f: TestFunction, n_range: Iterable[int]) -> ShalikaReport:
    """
    Compare O(eta nu, f) computed directly with (1/4) sum_kappa kappa(eta) O^kappa(nu, f),
    check that the four classes add up to the stable unipotent integral, and
    rebuild O^1(t_n, f) from Gamma_1 f(1) + Gamma_nu sum_eta O(eta nu, f).

    Raises:
        ShalikaUnavailableError: In residue characteristic 2
    """
    F = E.base
    if F.p == 2:
        raise ShalikaUnavailableError(F.p)
    characters = quadratic_characters(F)
    kappa_values = [unipotent_kappa_orbital(F, 1, kappa, f).as_fraction() for kappa in characters]
    report = ShalikaReport(ext_label=E.label)
    total = Fraction(0)
    for eta in square_class_representatives(F):
        fourier = sum((kappa(eta) * value for kappa, value in zip(characters, kappa_values)), Fraction(0)) / 4
        direct = direct_class_integral(F, eta, f)
        total += direct
        report.rows.append(ShalikaRow(eta=str(eta), direct=direct, fourier=fourier))
    report.additive = total == kappa_values[0]

    if E.kind != ExtKind.SPLIT:
        f_one = _identity_value(F, f)
        for n in n_range:
            t = torus_sequence(E, n)
            if t is None:
                continue
            fit = germ_coefficients(E, n)
            rebuilt = fit.gamma_1 * f_one + fit.gamma_nu * total
            report.reconstruction.append((n, stable_orbital(E, t, f), rebuilt))
    return report
