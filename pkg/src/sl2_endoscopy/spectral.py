"""Torus characters, the character identity Delta * Xi, Weyl-integration checks and intertwining scalars."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm

from sympy import Rational, series, symbols

from src.sl2_endoscopy.arith.cyclo import ZERO, CycloValue
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.matrices import TestFunction
from src.sl2_endoscopy.orbital import measure_constant, rational_orbital
from src.sl2_endoscopy.quad_ext import ExtElem, ExtKind, QuadExt, lambda_const
from src.sl2_endoscopy.transfer import torus_quotient, torus_sequence, transfer_factor, transfer_value, weyl_factor
from src.sl2_endoscopy.utils.exceptions import ExtensionError, PrecisionError, RegularityError
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


def smith_normal_form(rows: list[list[int]], ncols: int) -> tuple[list[int], list[list[int]]]:
    """
    Diagonal of the Smith form of an integer matrix and the column transform V
    with U A V = D.
    """
    A = [list(row) for row in rows]
    m = len(A)
    V = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    diag: list[int] = []

    def swap_columns(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def subtract_column(j: int, t: int, factor: int) -> None:
        for row in A:
            row[j] -= factor * row[t]
        for row in V:
            row[j] -= factor * row[t]

    t = 0
    while t < min(m, ncols):
        pivot = None
        for i in range(t, m):
            for j in range(t, ncols):
                if A[i][j] and (pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        A[t], A[pivot[0]] = A[pivot[0]], A[t]
        swap_columns(t, pivot[1])

        cleared = True
        for i in range(t + 1, m):
            factor = A[i][t] // A[t][t]
            if factor:
                A[i] = [x - factor * y for x, y in zip(A[i], A[t])]
            cleared = cleared and A[i][t] == 0
        for j in range(t + 1, ncols):
            factor = A[t][j] // A[t][t]
            if factor:
                subtract_column(j, t, factor)
            cleared = cleared and A[t][j] == 0
        if not cleared:
            continue

        bad = next((i for i in range(t + 1, m) for j in range(t + 1, ncols) if A[i][j] % A[t][t]), None)
        if bad is not None:
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
        diag.append(A[t][t])
        t += 1
    diag += [0] * (ncols - len(diag))
    return diag, V


class TorusGroup:
    """
    The finite abelian group E^1 / E^1_k with an explicit decomposition
    into cyclic factors Z/d_1 x ... x Z/d_s.
    """

    def __init__(self, E: QuadExt, k: int):
        if E.kind == ExtKind.SPLIT:
            raise ExtensionError("the norm-one torus of a split algebra is not compact")
        self.ext = E
        self.level = k
        self.reps = torus_quotient(E, k)
        self.index = {rep.key(k): i for i, rep in enumerate(self.reps)}
        self.table = [[self.index[(x * y).key(k)] for y in self.reps] for x in self.reps]
        self.inverse = [self.index[x.conjugate().key(k)] for x in self.reps]
        self._decompose()
        logger.debug(
            f"E^1/E^1_{k} for {E.label} decomposes as {self.invariants}",
            extra={"ext": E.label, "level": k, "invariants": self.invariants},
        )

    @property
    def order(self) -> int:
        return len(self.reps)

    def _closure(self, gens: list[int]) -> set[int]:
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def _decompose(self) -> None:
        gens: list[int] = []
        span = {0}
        for i in range(self.order):
            if i not in span:
                gens.append(i)
                span = self._closure(gens)
        self.generators = gens

        s = len(gens)
        words: dict[int, list[int]] = {0: [0] * s}
        relations: set[tuple[int, ...]] = set()
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for j, g in enumerate(gens):
                y = self.table[x][g]
                step = list(words[x])
                step[j] += 1
                if y not in words:
                    words[y] = step
                    queue.append(y)
                else:
                    relation = tuple(a - b for a, b in zip(step, words[y]))
                    if any(relation):
                        relations.add(relation)

        diag, V = smith_normal_form(sorted(relations), s) if s else ([], [])
        keep = [i for i, d in enumerate(diag) if d != 1]
        self.invariants = [diag[i] for i in keep]
        self.coords = []
        for x in range(self.order):
            w = words[x]
            full = [sum(w[r] * V[r][i] for r in range(s)) for i in range(s)]
            self.coords.append(tuple(full[i] % diag[i] for i in keep))

    @property
    def exponent(self) -> int:
        return lcm(*self.invariants) if self.invariants else 1

    def locate(self, t: ExtElem) -> int:
        return self.index[t.key(self.level)]


@dataclass(frozen=True)
class TorusChar:
    """theta_j(x) = prod zeta_{d_i}^{j_i x_i} on E^1 / E^1_k."""

    group: TorusGroup
    exponents: tuple[int, ...]

    @property
    def order(self) -> int:
        return lcm(*(d // gcd(j, d) for j, d in zip(self.exponents, self.group.invariants))) if self.exponents else 1

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def at_index(self, i: int) -> CycloValue:
        M = self.group.exponent
        e = sum(j * c * (M // d) for j, c, d in zip(self.exponents, self.group.coords[i], self.group.invariants))
        return CycloValue.zeta(M, e % M) if M > 1 else CycloValue.rational(1)

    def __call__(self, t: ExtElem) -> CycloValue:
        return self.at_index(self.group.locate(t))

    @property
    def conductor_level(self) -> int:
        """Smallest j such that theta is trivial on E^1_j."""
        G = self.group
        for j in range(0, G.level + 1):
            one = G.reps[0].key(j) if j else ()
            if all(self.at_index(i) == 1 for i, rep in enumerate(G.reps) if (rep.key(j) if j else ()) == one):
                return j
        return G.level

    @property
    def label(self) -> str:
        return "theta(" + ",".join(str(j) for j in self.exponents) + ")"


def enumerate_torus_chars(E: QuadExt, k: int) -> list[TorusChar]:
    """All characters of E^1 / E^1_k, the trivial one first."""
    G = TorusGroup(E, k)
    return [TorusChar(G, exps) for exps in product(*(range(d) for d in G.invariants))]


def xi_value(E: QuadExt, theta: TorusChar, t: ExtElem, marker: int | None = None) -> CycloValue:
    """
    Xi_theta(t) = lambda eps(-1) eps(b) (theta(t) + theta(t^-1)) / |t - t^-1|,
    with eps(b) replaced by the class marker when one is given.
    """
    if t.b.is_zero():
        raise RegularityError("xi_value")
    sign = E.epsilon(t.b) if marker is None else marker
    pair = theta(t) + theta(t.conjugate())
    return lambda_const(E) * E.epsilon(-1) * sign * pair / weyl_factor(E, t.b)


@dataclass
class IdentityCheck:
    lhs: CycloValue
    rhs: CycloValue

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def iden_check(E: QuadExt, theta: TorusChar, t: ExtElem) -> IdentityCheck:
    """Delta(t) Xi_theta(t) against eps(-1) (theta(t) + theta(t^-1))."""
    lhs = transfer_factor(E, t).value * xi_value(E, theta, t)
    rhs = (theta(t) + theta(t.conjugate())) * E.epsilon(-1)
    return IdentityCheck(lhs=lhs, rhs=rhs)


def orthogonality_integral(theta: TorusChar) -> Fraction:
    """Average of |theta(x) + theta(x^-1)|^2 over E^1: 2, or 4 when theta^2 = 1."""
    G = theta.group
    total = ZERO
    for i in range(G.order):
        pair = theta.at_index(i) + theta.at_index(G.inverse[i])
        total = total + pair * pair.conjugate()
    return (total / G.order).as_fraction()


def inverse_char(theta: TorusChar) -> TorusChar:
    return TorusChar(theta.group, tuple((-j) % d for j, d in zip(theta.exponents, theta.group.invariants)))


def galois_symmetric(E: QuadExt, theta: TorusChar, t: ExtElem) -> bool:
    """Xi_theta(t) = Xi_{theta^-1}(t)."""
    return xi_value(E, theta, t) == xi_value(E, inverse_char(theta), t)


def column_orthogonality(characters: list[TorusChar]) -> bool:
    """sum over the dual of |theta(g)|^2 equals the group order at every g."""
    G = characters[0].group
    for i in range(G.order):
        total = ZERO
        for theta in characters:
            value = theta.at_index(i)
            total = total + value * value.conjugate()
        if total != G.order:
            return False
    return True


def torus_class_structure(E: QuadExt) -> list[tuple[int, int]]:
    """(w_T, class sign) for the rational classes of tori isomorphic to E^1."""
    if E.kind == ExtKind.SPLIT:
        raise ExtensionError("torus class structure is given for elliptic tori")
    if E.epsilon(-1) == 1:
        return [(2, 1), (2, -1)]
    return [(1, 1)]


# Weyl integration

@dataclass
class WeylReport:
    ext_label: str
    theta: str
    status: str
    lhs: CycloValue | None = None
    rhs: CycloValue | None = None
    low_part: CycloValue | None = None
    tail: CycloValue | None = None
    shell_density: str = ""
    reason: str = ""


def weyl_integrand(E: QuadExt, theta: TorusChar, f: TestFunction, t: ExtElem) -> CycloValue:
    """sum over torus classes of w^-1 |t - t^-1|^2 Xi(t) O(t, f), taken with the class marker."""
    D = weyl_factor(E, t.b)
    b_sign = E.epsilon(t.b)
    total = ZERO
    for w, s in torus_class_structure(E):
        marker = s * b_sign
        orbital_value = rational_orbital(E, t, f, marker)
        total = total + D * D * xi_value(E, theta, t, marker) * orbital_value / w
    return total


def shell_density(E: QuadExt, f: TestFunction) -> Fraction:
    """
    sum_r c_r (-1)^r C(pi^-r): the Weyl integrand at t z (z = +-1, t near 1)
    divided by theta(z), on any shell inside the level-k neighbourhood.

    For unramified E the factor D(b) eps(b) O^eps(t, f) does not depend on v(b):
    D = q^-n, eps(b) = (-1)^n and O^eps(t_n, f) = (-q)^n times this sum.
    """
    if E.kind != ExtKind.UNRAMIFIED:
        raise ExtensionError("the shell density is constant only around the unramified torus center")
    return sum((c * (-1) ** r * measure_constant(E, r) for r, c in f), Fraction(0))


def weyl_spectral_check(E: QuadExt, theta: TorusChar, f: TestFunction | None = None) -> WeylReport:
    """
    Compare the integral of f^E theta over E^1 with the Weyl-integration
    expression for the virtual character.

    Off the level-k neighbourhood of the center the integrand is summed over
    the quotient; on it the integrand is the constant shell density, so the
    tail is exact. The first TAIL_VERIFY_TERMS shells are also evaluated
    directly and must agree with it.
    """
    f = f or TestFunction.unit()
    report = WeylReport(ext_label=E.label, theta=theta.label, status="inconclusive")
    F = E.base
    if E.kind != ExtKind.UNRAMIFIED or (F.p == 2 and F.characteristic == 0):
        report.reason = "decided for unramified E with odd residue characteristic or characteristic 2"
        return report
    G = theta.group
    k, q = G.level, F.q
    if G.order != (q + 1) * q ** (k - 1):
        report.reason = f"|E^1/E^1_{k}| = {G.order} differs from (q+1) q^(k-1)"
        return report

    report.lhs = sum((transfer_value(E, rep, f) * theta.at_index(i) for i, rep in enumerate(G.reps)), ZERO) / G.order

    centers = {E.element(1).key(k), E.element(-1).key(k)}
    low = ZERO
    for rep in G.reps:
        if rep.key(k) not in centers:
            low = low + weyl_integrand(E, theta, f, rep)
    report.low_part = low / G.order

    char2 = F.characteristic == 2
    signs = (1,) if char2 else (1, -1)
    density = shell_density(E, f)
    center_weight = sum((theta(E.element(z)) for z in signs), ZERO)
    report.shell_density = str(density)

    def quotient_order(j: int) -> int:
        return (q + 1) * q ** (j - 1)

    for j in range(k, k + settings.TAIL_VERIFY_TERMS):
        t = torus_sequence(E, 2 * j if char2 else j)
        if t is None:
            raise ExtensionError(f"no torus element on shell {j}")
        try:
            direct = sum((weyl_integrand(E, theta, f, t * E.element(z)) for z in signs), ZERO)
        except PrecisionError as e:
            report.reason = f"shell {j} is beyond the working precision: {e}"
            return report
        if direct != center_weight * density:
            report.status = "mismatch"
            report.reason = f"shell {j} integrand differs from the shell density"
            return report

    report.tail = center_weight * density / G.order
    report.rhs = report.low_part + report.tail
    report.status = "verified" if report.lhs == report.rhs else "mismatch"
    logger.info(
        f"Weyl check for {theta.label} on {E.label}: {report.status}",
        extra={"ext": E.label, "theta": theta.label, "status": report.status},
    )
    return report


# Intertwining operators

@dataclass
class IntertwiningReport:
    q: int
    x: Fraction | None
    value: Fraction | None
    pole: bool
    series_matches: bool


_X = symbols("x")


def intertwining_scalar(q: int, s: int | None = None, x: Fraction | None = None, order: int = 20) -> IntertwiningReport:
    """
    Z(s) / Z(1 + s) = (1 - q^-1 x) / (1 - x) with x = q^-s, and a check of its
    expansion 1 + (1 - 1/q) sum x^n up to the given order.
    """
    if (s is None) == (x is None):
        raise ValueError("give exactly one of s and x")
    x = Fraction(q) ** (-s) if s is not None else Fraction(x)
    expr = (1 - _X / q) / (1 - _X)
    expansion = series(expr, _X, 0, order + 1).removeO()
    expected = 1 + sum((1 - Rational(1, q)) * _X**n for n in range(1, order + 1))
    matches = (expansion - expected).expand() == 0
    if x == 1:
        return IntertwiningReport(q=q, x=x, value=None, pole=True, series_matches=matches)
    value = (1 - x / q) / (1 - x)
    return IntertwiningReport(q=q, x=x, value=value, pole=False, series_matches=matches)
