import click

from metastab.cli.common import RunOutput, common_options, emit
from metastab.cli.config import CheckComplementingConfig, parse_tensor, parse_vector
from metastab.cli.report import timestamp
from metastab.domain.complementing.engine import check_complementing, run_agreement
from metastab.domain.complementing.models import CauchyPair, CauchyStatus
from metastab.domain.complementing.schemas import AgreementRead, CauchyVerdictRead

VERDICT_COLUMNS = ("status", "margin", "det_q", "scale", "witness_x", "witness_y", "witness_z")
AGREEMENT_COLUMNS = ("trials", "agreements", "violated", "disagreements", "rate")


def _vector(ctx, param, value):
    try:
        return parse_vector(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc), ctx=ctx, param=param) from exc


def _single(config: CheckComplementingConfig) -> RunOutput:
    pair = CauchyPair(parse_tensor(config.a1), parse_tensor(config.a2), config.e)
    verdict = CauchyVerdictRead.model_validate(check_complementing(pair))
    witness = verdict.witness or [None, None, None]
    return RunOutput(
        payload=verdict,
        columns=VERDICT_COLUMNS,
        rows=[(verdict.status, verdict.margin, verdict.det_q, verdict.scale, *witness)],
        violated=verdict.status != CauchyStatus.SATISFIED,
        summary=verdict.model_dump_json(),
    )


def _agreement(config: CheckComplementingConfig) -> RunOutput:
    summary = AgreementRead.model_validate(run_agreement(config.random, config.seed, config.directions))
    return RunOutput(
        payload=summary,
        columns=AGREEMENT_COLUMNS,
        rows=[(summary.trials, summary.agreements, summary.violated, len(summary.disagreements), summary.rate)],
        violated=bool(summary.disagreements),
        summary=summary.model_dump_json(),
    )


@click.command("check-complementing")
@click.option("--a1", default="I", show_default=True, help="First tensor, e.g. I, 2I, diag(4,0.25,1).")
@click.option("--a2", default="2I", show_default=True, help="Second tensor.")
@click.option("--e", "e", default="0,0,1", show_default=True, callback=_vector, help="Normal direction.")
@click.option("--random", "n_random", type=click.IntRange(min=1), default=None, help="Run the criterion/oracle harness on N random triples.")
@click.option("--directions", type=click.IntRange(min=8), default=720, show_default=True)
@common_options
@click.pass_context
def check_complementing_command(ctx, a1, a2, e, n_random, directions, out_dir, strict, seed):
    """Decide the complementing condition for one (A1, A2, e) triple or a seeded random batch."""
    started_at = timestamp()
    config = CheckComplementingConfig(a1=a1, a2=a2, e=e, random=n_random, directions=directions, seed=seed or 0)
    output = _agreement(config) if config.random else _single(config)
    emit(ctx, config, started_at, output, out_dir, strict)
