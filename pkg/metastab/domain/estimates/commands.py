import click

from metastab.cli.common import RunOutput, common_options, config_option, emit, load_config
from metastab.cli.report import timestamp
from metastab.domain.estimates.engine import estimate_tables
from metastab.domain.estimates.schemas import EstimatesReportRead

TABLE_COLUMNS = ("table", "field", "alpha", "concentration", "resolution", "value", "lhs", "rhs")


def _rows(report: EstimatesReportRead) -> list[tuple]:
    rows = [("curl_residual", name, None, None, None, value, None, None) for name, value in report.curl_residuals.items()]
    rows += [("weighted_ratio", r.field, r.alpha, r.concentration, None, r.ratio, r.numerator, r.denominator) for r in report.ratios]
    rows += [("trace", c.field, None, None, c.resolution, c.ratio, c.lhs, c.rhs_product) for c in report.trace_checks]
    rows += [("trace_fit", f.worst_field, None, None, f.resolution, f.constant, None, None) for f in report.trace_fits]
    return rows


@click.command("estimates")
@config_option
@common_options
@click.pass_context
def estimates_command(ctx, config_path, out_dir, strict, seed):
    """Tabulate the anti-curl weighted ratios and the normal-trace constant."""
    started_at = timestamp()
    config = load_config(config_path, "estimates", seed)
    report = EstimatesReportRead.model_validate(
        estimate_tables(
            config.alphas,
            config.concentrations,
            config.resolutions,
            config.curl_points,
            config.seed,
            config.anticurl,
            config.trace,
        )
    )
    fits = ", ".join(f"C({f.resolution}) = {f.constant:.6g}" for f in report.trace_fits)
    output = RunOutput(
        payload=report,
        columns=TABLE_COLUMNS,
        rows=_rows(report),
        summary=f"estimates: {len(report.ratios)} ratios" + (f", {fits}" if fits else ""),
    )
    emit(ctx, config, started_at, output, out_dir, strict)
