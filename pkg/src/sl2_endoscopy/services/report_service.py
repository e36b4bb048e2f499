"""Service turning computation results into report models and rendering them."""

import csv
import io
from fractions import Fraction
from typing import Any

from pydantic import BaseModel

from src.sl2_endoscopy.arith.cyclo import CycloValue
from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.germs import GermFit, GermProfile, ShalikaReport
from src.sl2_endoscopy.orbital import OrbitalReport
from src.sl2_endoscopy.quad_ext import ExtKind, QuadExt
from src.sl2_endoscopy.schemas import (
    CharIdentityReport,
    CharIdentityRowModel,
    CheckResultModel,
    ClassifyReport,
    EpsilonReport,
    ExactValue,
    FLReportModel,
    FLRowModel,
    GermFitModel,
    GermReportModel,
    GermRowModel,
    GermSweepModel,
    LambdaReport,
    OracleReportModel,
    OracleRowModel,
    OrbitalCellModel,
    OrbitalReportModel,
    OrthogonalityReport,
    OrthogonalityRowModel,
    ReconstructionModel,
    ReportBase,
    RunConfig,
    ShalikaReportModel,
    ShalikaRowModel,
    SuiteReportModel,
    TransferEntryModel,
    TransferReportModel,
    WeylReportModel,
    WeylRowModel,
)
from src.sl2_endoscopy.spectral import WeylReport
from src.sl2_endoscopy.transfer import FLReport, TransferTable
from src.sl2_endoscopy.utils.logger import get_logger

logger = get_logger(__name__)


def exact(value: CycloValue | Fraction | int) -> ExactValue:
    """Exact string plus, when configured, a float rendering."""
    value = CycloValue.coerce(value)
    if not settings.INCLUDE_APPROXIMATIONS:
        return ExactValue(exact=str(value))
    z = value.to_complex()
    imag = round(z.imag, 12)
    return ExactValue(exact=str(value), approx=round(z.real, 12), approx_imag=imag if imag else None)


def maybe_exact(value: CycloValue | Fraction | int | None) -> ExactValue | None:
    return None if value is None else exact(value)


class ReportService:
    """Builds reports that embed the configuration which produced them."""

    def __init__(self, config: RunConfig):
        """
        Initialize report service.

        Args:
            config: Run configuration embedded in every report
        """
        self.config = config

    def _base(self) -> dict[str, Any]:
        return {"command": self.config.command, "config": self.config}

    def classify(self, E: QuadExt) -> ClassifyReport:
        wild = E.kind == ExtKind.RAMIFIED and E.base.characteristic == 2
        return ClassifyReport(
            **self._base(),
            field_name=E.base.name,
            ext_label=E.label,
            kind=E.kind.value,
            t=E.t_text,
            d=E.d_text,
            discriminant=None if E.disc is None else str(E.disc),
            artin_schreier=None if E.as_constant is None else str(E.as_constant),
            standard_basis=E.standard_basis,
            epsilon_minus_one=E.epsilon(-1),
            norm_level=E.norm_level() if wild else None,
        )

    def epsilon(self, E: QuadExt, x: str, value: int) -> EpsilonReport:
        return EpsilonReport(**self._base(), ext_label=E.label, x=x, value=value)

    def lambda_value(self, E: QuadExt, conductor: int, value: CycloValue) -> LambdaReport:
        return LambdaReport(
            **self._base(),
            ext_label=E.label,
            conductor=conductor,
            value=exact(value),
            squared=exact(value * value),
            epsilon_minus_one=E.epsilon(-1),
            canonical=E.lambda_canonical,
        )

    def orbital(self, E: QuadExt, t: str, f: str, report: OrbitalReport) -> OrbitalReportModel:
        cells = [
            OrbitalCellModel(
                m=cell.m,
                measure=exact(cell.measure),
                sign=cell.sign,
                f_value=exact(cell.f_value),
                contribution=exact(cell.contribution),
            )
            for cell in report.cells
        ]
        return OrbitalReportModel(
            **self._base(),
            ext_label=E.label,
            t=t,
            f=f,
            kappa=report.kappa,
            value=exact(report.value),
            vanishing=report.vanishing,
            normalization=report.normalization,
            cells=cells,
        )

    def transfer(self, table: TransferTable, f: str, smooth: int | None) -> TransferReportModel:
        return TransferReportModel(
            **self._base(),
            ext_label=table.ext_label,
            f=f,
            level=table.level,
            mode=table.mode,
            smooth_level=smooth,
            entries=[TransferEntryModel(t=str(rep), value=exact(value)) for rep, value in table.entries],
        )

    def fl_check(self, report: FLReport) -> FLReportModel:
        rows = [
            FLRowModel(
                label=row.label,
                expected=exact(row.expected),
                value=maybe_exact(row.value),
                valuation=row.valuation,
                stable=maybe_exact(row.stable),
                epsilon=maybe_exact(row.epsilon),
                delta=maybe_exact(row.delta),
                realized=row.realized,
                passed=row.passed if row.realized else None,
            )
            for row in report.rows
        ]
        return FLReportModel(
            **self._base(),
            verdict=report.status,
            ext_label=report.ext_label,
            kind=report.kind,
            fl_pass=report.passed,
            rows=rows,
        )

    def germs(self, profile: GermProfile, fits: list[GermFit]) -> GermReportModel:
        rows = [
            GermRowModel(
                n=row.n,
                realized=row.realized,
                marker=row.marker,
                stable=maybe_exact(row.stable),
                epsilon=maybe_exact(row.epsilon),
                delta_epsilon=maybe_exact(row.delta_epsilon),
                weyl_stable=maybe_exact(row.weyl_stable),
            )
            for row in profile.rows
        ]
        fit_models = [
            GermFitModel(
                n=fit.n,
                gamma_1=exact(fit.gamma_1),
                gamma_nu=exact(fit.gamma_nu),
                verified=fit.verified,
                kappa_constant=maybe_exact(fit.kappa_constant),
            )
            for fit in fits
        ]
        return GermReportModel(
            **self._base(),
            ext_label=profile.ext_label,
            f=profile.f_label,
            central_value=exact(profile.central_value),
            n0=profile.n0,
            affine=None if profile.affine is None else [exact(x) for x in profile.affine],
            rows=rows,
            sweeps=[
                GermSweepModel(unit=s.unit, markers=sorted(s.markers), n0=s.n0) for s in profile.sweeps
            ],
            fits=fit_models,
        )

    def shalika(self, E: QuadExt, f: str, report: ShalikaReport | None, reason: str | None = None) -> ShalikaReportModel:
        if report is None:
            return ShalikaReportModel(
                **self._base(), verdict="not_applicable", ext_label=E.label, f=f, available=False, reason=reason
            )
        return ShalikaReportModel(
            **self._base(),
            verdict="passed" if report.passed else "failed",
            ext_label=E.label,
            f=f,
            available=True,
            additive=report.additive,
            rows=[
                ShalikaRowModel(eta=row.eta, direct=exact(row.direct), fourier=exact(row.fourier), agrees=row.agrees)
                for row in report.rows
            ],
            reconstruction=[
                ReconstructionModel(n=n, stable=exact(lhs), rebuilt=exact(rhs)) for n, lhs, rhs in report.reconstruction
            ],
        )

    def char_identity(
        self, E: QuadExt, level: int, invariants: list[int], columns: bool, rows: list[CharIdentityRowModel]
    ) -> CharIdentityReport:
        passed = columns and all(row.holds and row.galois_symmetric for row in rows)
        return CharIdentityReport(
            **self._base(),
            verdict="passed" if passed else "failed",
            ext_label=E.label,
            level=level,
            invariants=invariants,
            column_orthogonality=columns,
            rows=rows,
        )

    def orthogonality(
        self, E: QuadExt, level: int, classes: list[tuple[int, int]], rows: list[OrthogonalityRowModel]
    ) -> OrthogonalityReport:
        passed = all(row.integral.exact == str(row.expected) for row in rows)
        return OrthogonalityReport(
            **self._base(),
            verdict="passed" if passed else "failed",
            ext_label=E.label,
            level=level,
            torus_classes=[list(c) for c in classes],
            rows=rows,
        )

    def weyl(self, E: QuadExt, level: int, reports: list[WeylReport]) -> WeylReportModel:
        rows = [
            WeylRowModel(
                theta=r.theta,
                status=r.status,
                lhs=maybe_exact(r.lhs),
                rhs=maybe_exact(r.rhs),
                low_part=maybe_exact(r.low_part),
                tail=maybe_exact(r.tail),
                shell_density=r.shell_density,
                reason=r.reason,
            )
            for r in reports
        ]
        statuses = {r.status for r in reports}
        if "mismatch" in statuses:
            verdict = "failed"
        elif "inconclusive" in statuses:
            verdict = "inconclusive"
        else:
            verdict = "passed"
        return WeylReportModel(**self._base(), verdict=verdict, ext_label=E.label, level=level, rows=rows)

    def oracle(self, name: str, rows: list[OracleRowModel]) -> OracleReportModel:
        verdict = "passed" if all(row.agrees for row in rows) else "failed"
        return OracleReportModel(**self._base(), verdict=verdict, oracle=name, rows=rows)

    def suite(self, aggregated: dict[str, Any], include_timings: bool = False) -> SuiteReportModel:
        results = []
        for result in aggregated["check_results"]:
            outcome = result["outcome"]
            results.append(
                CheckResultModel(
                    check_name=result["check_name"],
                    description=result["description"],
                    status=result["status"],
                    verdict="failed" if outcome is None else outcome.verdict,
                    probes=0 if outcome is None else outcome.probes,
                    failures=[] if outcome is None else outcome.failures,
                    notes={} if outcome is None else outcome.notes,
                    execution_time=result["execution_time"] if include_timings else None,
                    error_message=result.get("error_message"),
                )
            )
        report = SuiteReportModel(
            **self._base(),
            verdict=aggregated["verdict"],
            mode=aggregated["mode"],
            run_id=aggregated["run_id"] if include_timings else None,
            check_results=results,
            total_execution_time=aggregated["total_execution_time"] if include_timings else None,
        )
        logger.info(
            f"Suite report built: {report.verdict}",
            extra={"verdict": report.verdict, "checks": len(results)},
        )
        return report


def _flatten(row: BaseModel) -> dict[str, str]:
    flat: dict[str, str] = {}
    for key, value in row.model_dump().items():
        if isinstance(value, dict) and "exact" in value:
            flat[key] = value["exact"]
        elif value is None:
            flat[key] = ""
        else:
            flat[key] = str(value)
    return flat


def render(report: ReportBase, fmt: str = "json") -> str:
    """JSON of the whole report, or CSV of its primary table."""
    if fmt == "json":
        return report.model_dump_json(indent=2)
    rows = [_flatten(row) for row in report.table()]
    buffer = io.StringIO()
    if not rows:
        flat = {k: v for k, v in _flatten(report).items() if k not in ("config",)}
        rows = [flat]
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()
