"""Command-line surface: one subcommand per computation, reports on standard output."""

from __future__ import annotations

import argparse
import asyncio
import random
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from pydantic import ValidationError

from src.sl2_endoscopy.arith.cyclo import CycloValue
from src.sl2_endoscopy.arith.local_field import LocalField
from src.sl2_endoscopy.arith.parsing import parse_field_spec
from src.sl2_endoscopy.arith.squares import square_class_count
from src.sl2_endoscopy.checks.suite import CheckSuite
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.germs import germ_coefficients, germ_profile, shalika_compare
from src.sl2_endoscopy.matrices import TestFunction, embed, stable_class_split
from src.sl2_endoscopy.oracle import (
    oracle_char2_squares,
    oracle_conjugacy,
    oracle_norm_membership,
    oracle_split_transfer,
    oracle_square_class_count,
    oracle_unipotent_sum,
    oracle_unit_quotient,
)
from src.sl2_endoscopy.orbital import OrbitalReport, measure_constant, orbital, unipotent_kappa_orbital
from src.sl2_endoscopy.quad_ext import ExtKind, KappaChar, QuadExt, lambda_const, parse_ext_spec
from src.sl2_endoscopy.schemas import (
    CharIdentityRowModel,
    OracleRowModel,
    OrthogonalityRowModel,
    ReportBase,
    RunConfig,
)
from src.sl2_endoscopy.services.report_service import ReportService, exact, render
from src.sl2_endoscopy.spectral import (
    column_orthogonality,
    enumerate_torus_chars,
    galois_symmetric,
    iden_check,
    orthogonality_integral,
    torus_class_structure,
    weyl_spectral_check,
)
from src.sl2_endoscopy.transfer import (
    central_sign,
    fl_check,
    smooth_level,
    split_transfer,
    transfer,
    transfer_factor,
    torus_sequence,
)
from src.sl2_endoscopy.utils.exceptions import (
    ExtensionError,
    FieldConstructionError,
    KappaError,
    OracleSizeError,
    ParseError,
    PrecisionError,
    RegularityError,
    ShalikaUnavailableError,
)
from src.sl2_endoscopy.utils.logger import add_correlation_id, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

DEFAULTS: dict[str, Any] = {
    "field": "Qp:p=3,prec=12",
    "ext": "unramified",
    "f": "unit",
    "a": None,
    "b": None,
    "x": None,
    "kappa": None,
    "depth": 4,
    "level": 1,
    "n_range": "0..4",
    "conductor": 0,
    "oracle": "unit-quotient",
    "c_mode": "default",
    "normalization": "F",
    "quick": False,
    "format": "json",
    "seed": settings.DEFAULT_SEED,
}

INT_KEYS = {"depth", "level", "conductor", "seed"}

ORACLES = (
    "unit-quotient",
    "norm-membership",
    "conjugacy",
    "square-classes",
    "char2-squares",
    "unipotent",
    "split-transfer",
)

_VERDICT_EXIT = {
    "ok": EXIT_OK,
    "passed": EXIT_OK,
    "failed": EXIT_FAILED,
    "inconclusive": EXIT_INCONCLUSIVE,
    "not_applicable": EXIT_INCONCLUSIVE,
}


class UsageError(Exception):
    """A missing or inconsistent command-line parameter."""


def load_config_file(path: str) -> dict[str, Any]:
    """
    Read key=value lines, '#' starting a comment.

    Raises:
        ParseError: On a line without '=' or with an unknown key
    """
    text = Path(path).read_text()
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(raw, 0, f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS:
            raise ParseError(raw, 0, f"{path}:{lineno}: unknown key {key!r}")
        value = value.strip().strip('"').strip("'")
        if key in INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError as e:
                raise ParseError(raw, raw.index("=") + 1, f"{path}:{lineno}: {key} must be an integer", original_error=e) from e
        elif key == "quick":
            values[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            values[key] = value
    return values


def merge_options(args: argparse.Namespace) -> dict[str, Any]:
    """Settings defaults, then the --config file, then explicit flags."""
    options = dict(DEFAULTS)
    if args.config:
        options.update(load_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    return options


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override its values")
    common.add_argument("--field", help="Field spec, e.g. 'Qp:p=3,prec=12' or 'Fq:p=2,f=1,prec=20'")
    common.add_argument("--ext", help="split | unramified | ramified[N] | ext:t=..,d=..")
    common.add_argument("--f", help="Test function as cell:coefficient pairs, or 'unit'")
    common.add_argument("--a", help="First coordinate of t = a + b tau")
    common.add_argument("--b", help="Second coordinate of t = a + b tau")
    common.add_argument("--x", help="Element of F")
    common.add_argument("--kappa", help="Extension spec of kappa, or '1' for the trivial character")
    common.add_argument("--depth", type=int, help="Probe depth")
    common.add_argument("--level", type=int, help="Level k of E^1 / E^1_k")
    common.add_argument("--n-range", dest="n_range", help="Inclusive range lo..hi")
    common.add_argument("--conductor", type=int, help="Exponent of the conductor of psi")
    common.add_argument("--oracle", choices=ORACLES, help="Oracle comparison to run")
    common.add_argument("--c-mode", dest="c_mode", choices=["default", "fl"], help="c = 1/lambda or c = 1")
    common.add_argument("--normalization", choices=["F", "E"], help="Absolute value used in D(b)")
    common.add_argument("--quick", action="store_const", const=True, default=None, help="Reduced parameter sets")
    common.add_argument("--format", choices=["json", "csv"], help="Output format")
    common.add_argument("--seed", type=int, help="Seed for sampled checks")

    parser = argparse.ArgumentParser(
        prog="sl2-endoscopy",
        description="Exact orbital integrals, transfer and character identities for SL(2) over local fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("classify-ext", "Kind, presentation and eps(-1) of E/F"),
        ("epsilon", "eps_{E/F}(x)"),
        ("lambda", "lambda(E/F, psi)"),
        ("orbital", "Stable orbital integral O^1(t, f)"),
        ("kappa-orbital", "kappa-orbital integral at a regular or central element"),
        ("transfer", "Tabulate f^E on E^1 / E^1_k"),
        ("fl-check", "Check that the transfer of 1_K is the unit of the torus"),
        ("germ-expand", "Germ columns of f on t_n"),
        ("shalika-compare", "Shalika germs by Fourier analysis against direct integrals"),
        ("char-identity", "Delta Xi_theta = eps(-1) (theta + theta^-1) on sampled t"),
        ("orthogonality", "Average of |theta + theta^-1|^2 per character"),
        ("weyl-check", "Weyl integration against the spectral side"),
        ("oracle", "Compare closed forms with brute-force enumeration"),
        ("verify-all", "Run the acceptance suite"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


class CommandRunner:
    """Executes one subcommand against a merged option set."""

    def __init__(self, command: str, options: dict[str, Any]):
        self.command = command
        self.options = options
        self.config = RunConfig(command=command, **options)
        self.service = ReportService(self.config)

    # helpers

    @property
    def field(self) -> LocalField:
        return parse_field_spec(self.options["field"])

    @property
    def ext(self) -> QuadExt:
        return parse_ext_spec(self.field, self.options["ext"])

    @property
    def test_function(self) -> TestFunction:
        return TestFunction.parse(self.options["f"])

    def require(self, *keys: str) -> None:
        missing = [k for k in keys if self.options.get(k) is None]
        if missing:
            raise UsageError(f"{self.command} needs " + ", ".join(f"--{k.replace('_', '-')}" for k in missing))

    def n_values(self) -> range:
        lo, hi = self.config.n_range.split("..")
        return range(int(lo), int(hi) + 1)

    def kappa(self, E: QuadExt) -> KappaChar:
        spec = self.options["kappa"]
        if spec is None:
            return KappaChar(E) if E.is_field else KappaChar()
        if spec.strip() in ("1", "trivial"):
            return KappaChar()
        return KappaChar(parse_ext_spec(E.base, spec))

    def run(self) -> ReportBase:
        handler: Callable[[], ReportBase] = getattr(self, "cmd_" + self.command.replace("-", "_"))
        return handler()

    # extensions and constants

    def cmd_classify_ext(self) -> ReportBase:
        return self.service.classify(self.ext)

    def cmd_epsilon(self) -> ReportBase:
        self.require("x")
        E = self.ext
        return self.service.epsilon(E, self.options["x"], E.epsilon(E.base.element(self.options["x"])))

    def cmd_lambda(self) -> ReportBase:
        E = self.ext
        conductor = self.options["conductor"]
        return self.service.lambda_value(E, conductor, lambda_const(E, conductor))

    # orbital integrals and transfer

    def cmd_orbital(self) -> ReportBase:
        self.require("a", "b")
        E = self.ext
        t = E.element(self.options["a"], self.options["b"])
        f = self.test_function
        return self.service.orbital(E, str(t), f.label, orbital(E, t, f))

    def cmd_kappa_orbital(self) -> ReportBase:
        self.require("a")
        E = self.ext
        f = self.test_function
        kappa = self.kappa(E)
        t = E.element(self.options["a"], self.options["b"] or 0)
        if t.b.is_zero():
            # central element z: the kappa-orbital integral of z nu
            z = central_sign(t)
            value = unipotent_kappa_orbital(E.base, z, kappa, f)
            report = orbital_report_stub(kappa, value)
            return self.service.orbital(E, f"{z}*nu", f.label, report)
        return self.service.orbital(E, str(t), f.label, orbital(E, t, f, kappa))

    def cmd_transfer(self) -> ReportBase:
        E = self.ext
        f = self.test_function
        mode = self.options["c_mode"]
        level = self.options["level"]
        table = transfer(E, f, level, mode)
        report = self.service.transfer(table, f.label, smooth_level(E, f, max_level=level, mode=mode))
        if self.options["a"] is not None and self.options["b"] is not None:
            if E.kind == ExtKind.SPLIT:
                raise UsageError("transfer factors are attached to elliptic tori; drop --a and --b for split E")
            t = E.element(self.options["a"], self.options["b"])
            factor = transfer_factor(E, t, mode, self.options["normalization"])
            report.factor_at = str(t)
            report.factor = exact(factor.value)
        return report

    def cmd_fl_check(self) -> ReportBase:
        E = self.ext
        return self.service.fl_check(fl_check(E, depth=self.options["depth"], level=self.options["level"]))

    # germs

    def cmd_germ_expand(self) -> ReportBase:
        E = self.ext
        f = self.test_function
        profile = germ_profile(E, f, self.n_values(), self.options["c_mode"])
        fits = [germ_coefficients(E, row.n) for row in profile.rows if row.realized]
        return self.service.germs(profile, fits)

    def cmd_shalika_compare(self) -> ReportBase:
        E = self.ext
        f = self.test_function
        try:
            report = shalika_compare(E, f, self.n_values())
        except ShalikaUnavailableError as e:
            logger.warning(f"Shalika comparison unavailable: {e.reason}", extra={"field_name": E.base.name})
            return self.service.shalika(E, f.label, None, reason=e.reason)
        return self.service.shalika(E, f.label, report)

    # spectral identities

    def cmd_char_identity(self) -> ReportBase:
        E = self.ext
        level = self.options["level"]
        characters = enumerate_torus_chars(E, level)
        group = characters[0].group
        regular = [rep for rep in group.reps if not rep.b.is_zero()]
        rng = random.Random(f"{self.options['seed']}:char-identity")
        sample = rng.sample(regular, min(20, len(regular)))
        rows = []
        for theta in characters:
            for t in sample:
                check = iden_check(E, theta, t)
                rows.append(
                    CharIdentityRowModel(
                        theta=theta.label,
                        t=str(t),
                        lhs=exact(check.lhs),
                        rhs=exact(check.rhs),
                        holds=check.holds,
                        galois_symmetric=galois_symmetric(E, theta, t),
                    )
                )
        return self.service.char_identity(E, level, list(group.invariants), column_orthogonality(characters), rows)

    def cmd_orthogonality(self) -> ReportBase:
        E = self.ext
        level = self.options["level"]
        rows = [
            OrthogonalityRowModel(
                theta=theta.label,
                order=theta.order,
                conductor_level=theta.conductor_level,
                integral=exact(orthogonality_integral(theta)),
                expected=4 if theta.order <= 2 else 2,
            )
            for theta in enumerate_torus_chars(E, level)
        ]
        return self.service.orthogonality(E, level, torus_class_structure(E), rows)

    def cmd_weyl_check(self) -> ReportBase:
        E = self.ext
        f = self.test_function
        level = self.options["level"]
        reports = [weyl_spectral_check(E, theta, f) for theta in enumerate_torus_chars(E, level)]
        return self.service.weyl(E, level, reports)

    # oracles

    def cmd_oracle(self) -> ReportBase:
        name = self.options["oracle"]
        rows = ORACLE_RUNNERS[name](self)
        return self.service.oracle(name, rows)

    # suite

    def cmd_verify_all(self) -> ReportBase:
        suite = CheckSuite(quick=self.options["quick"], seed=self.options["seed"])
        aggregated = asyncio.run(suite.execute())
        return self.service.suite(aggregated)


def orbital_report_stub(kappa: KappaChar, value: CycloValue) -> OrbitalReport:
    """An OrbitalReport with no cells, for integrals over a unipotent class."""
    return OrbitalReport(value=value, kappa=kappa.label, normalization="unipotent")


def _row(probe: str, formula: Any, oracle: Any) -> OracleRowModel:
    return OracleRowModel(probe=probe, formula=str(formula), oracle=str(oracle), agrees=formula == oracle)


def _oracle_unit_quotient(runner: CommandRunner) -> list[OracleRowModel]:
    E = runner.ext
    return [
        _row(f"C(pi^-{m})", measure_constant(E, m), oracle_unit_quotient(E, m))
        for m in range(0, min(runner.options["depth"], 2) + 1)
    ]


def _oracle_norm_membership(runner: CommandRunner) -> list[OracleRowModel]:
    E = runner.ext
    F = E.base
    k = E.norm_level() if E.is_field else 1
    rows = []
    for shift in (0, 1):
        for d in F.residue.units:
            x = F.residue_lift(d).shift(shift)
            rows.append(_row(f"eps({x}) = 1", E.epsilon(x) == 1, oracle_norm_membership(E, x, k)))
    return rows


def _oracle_conjugacy(runner: CommandRunner) -> list[OracleRowModel]:
    E = runner.ext
    if not E.is_field:
        raise UsageError("the conjugacy oracle compares classes in an elliptic torus")
    F = E.base
    k = min(runner.options["depth"], 2)
    rows = [_row("1 ~ 1 over SL", True, oracle_conjugacy(embed(E.element(1)), embed(E.element(1)), k))]
    t = torus_sequence(E, 0)
    if t is None:
        return rows
    M, M_bar = embed(t), embed(t.conjugate())
    rows.append(_row(f"{t} ~ its conjugate over SL", E.epsilon(-1) == 1, oracle_conjugacy(M, M_bar, k)))
    split = stable_class_split(E, t)
    first, second = split.representatives
    if second.is_integral() and first.is_integral():
        rows.append(_row("rational classes GL-conjugate", True, oracle_conjugacy(first, second, k, "GL")))
        rows.append(_row("rational classes SL-conjugate", False, oracle_conjugacy(first, second, k, "SL")))
    logger.debug(f"Conjugacy oracle on {E.label} at level {k}", extra={"ext": E.label, "probes": len(rows)})
    return rows


def _oracle_square_classes(runner: CommandRunner) -> list[OracleRowModel]:
    F = runner.field
    return [
        _row(f"|F^x / (F^x)^2 (1 + pi^{k} O)|", square_class_count(F, k), oracle_square_class_count(F, k))
        for k in range(1, runner.options["depth"] + 1)
    ]


def _oracle_char2_squares(runner: CommandRunner) -> list[OracleRowModel]:
    F = runner.field
    if F.characteristic != 2:
        raise UsageError("char2-squares needs a Laurent field in characteristic 2")
    rows = []
    for k in range(1, runner.options["depth"] + 1):
        squares = oracle_char2_squares(F, k)
        expected = (F.q - 1) * F.q ** ((k + 1) // 2 - 1)
        rows.append(_row(f"unit squares mod pi^{k}", expected, len(squares)))
        rows.append(_row(f"odd digits vanish mod pi^{k}", True, all(not any(s[1::2]) for s in squares)))
    return rows


def _oracle_unipotent(runner: CommandRunner) -> list[OracleRowModel]:
    E = runner.ext
    F = E.base
    f = runner.test_function
    kappa = runner.kappa(E)
    if F.p == 2 and not kappa.is_trivial:
        raise UsageError("the unipotent oracle samples kappa at class representatives, which needs p odd")
    unit = TestFunction.unit()
    ball_mass = unipotent_kappa_orbital(F, 1, kappa, unit).as_fraction()
    whole = unipotent_kappa_orbital(F, 1, kappa, f).as_fraction()
    rows = []
    for depth in range(1, runner.options["depth"] + 1):
        ball = ball_mass * kappa(F.one().shift(depth)) * f.coeff(0) / F.q**depth
        rows.append(_row(f"O^kappa(nu, f) off pi^{depth} O", whole - ball, oracle_unipotent_sum(F, kappa, f, depth)))
    return rows


def _oracle_split_transfer(runner: CommandRunner) -> list[OracleRowModel]:
    F = runner.field
    f = runner.test_function
    bound = min(runner.options["depth"], 2)
    rows = []
    for j in range(-bound, bound + 1):
        a = F.one().shift(j)
        rows.append(_row(f"f^T(a), v(a) = {j}", split_transfer(f, a), oracle_split_transfer(F, f, a)))
    return rows


ORACLE_RUNNERS: dict[str, Callable[[CommandRunner], list[OracleRowModel]]] = {
    "unit-quotient": _oracle_unit_quotient,
    "norm-membership": _oracle_norm_membership,
    "conjugacy": _oracle_conjugacy,
    "square-classes": _oracle_square_classes,
    "char2-squares": _oracle_char2_squares,
    "unipotent": _oracle_unipotent,
    "split-transfer": _oracle_split_transfer,
}


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run one subcommand and print its report.

    Returns:
        0 pass, 1 identity failure, 2 usage error, 3 inconclusive or not applicable
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    correlation_id = add_correlation_id(logger)
    logger.info(f"Running {args.command}", extra={"command": args.command, "invocation": correlation_id})

    try:
        options = merge_options(args)
        report = CommandRunner(args.command, options).run()
    except ParseError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except (
        UsageError,
        ValidationError,
        ValueError,
        ExtensionError,
        RegularityError,
        KappaError,
        FieldConstructionError,
        OracleSizeError,
        ZeroDivisionError,
        OSError,
    ) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except PrecisionError as e:
        logger.warning(f"Inconclusive: {e}", extra={"command": args.command})
        sys.stderr.write(f"inconclusive: {e}\n")
        return EXIT_INCONCLUSIVE
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True, extra={"command": args.command})
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILED

    sys.stdout.write(render(report, options["format"]) + "\n")
    code = _VERDICT_EXIT[report.verdict]
    logger.info(
        f"{args.command} finished: {report.verdict}",
        extra={"command": args.command, "verdict": report.verdict, "exit_code": code},
    )
    return code


if __name__ == "__main__":
    sys.exit(main())
