import click

from metastab.cli.common import RunOutput, common_options, config_option, emit, load_config
from metastab.cli.report import timestamp
from metastab.domain.mie.models import SWEEP_COLUMNS
from metastab.domain.mie.schemas import SweepReportRead
from metastab.domain.mie.sweep import delta_sweep


@click.command("mie-sweep")
@config_option
@common_options
@click.pass_context
def mie_sweep_command(ctx, config_path, out_dir, strict, seed):
    """Sweep the loss δ down to zero for the layered sphere and flag resonance."""
    started_at = timestamp()
    config = load_config(config_path, "mie-sweep", seed)
    report = SweepReportRead.model_validate(delta_sweep(config.build_problem(), config.deltas))

    flags = ["resonant" if report.resonant else "non-resonant"]
    if report.lap_convergent:
        flags.append("LAP-convergent")
    summary = f"mie-sweep: {len(report.rows)} deltas, {', '.join(flags)}"
    if report.blowup_exponent is not None:
        summary += f", blow-up exponent {report.blowup_exponent:.3f}"

    output = RunOutput(
        payload=report,
        columns=SWEEP_COLUMNS,
        rows=[tuple(getattr(row, name) for name in SWEEP_COLUMNS) for row in report.rows],
        violated=report.resonant,
        summary=summary,
    )
    emit(ctx, config, started_at, output, out_dir, strict)
