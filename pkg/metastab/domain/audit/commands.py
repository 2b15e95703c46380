import click

from metastab.cli.common import RunOutput, common_options, config_option, emit, load_config
from metastab.cli.config import AuditConfig
from metastab.cli.report import timestamp
from metastab.domain.audit.engine import audit_cor_adn, audit_cor_isotropic3, audit_thm1, audit_thm2, largest_certified_tau
from metastab.domain.audit.models import AuditReport, Theorem, Verdict
from metastab.domain.audit.schemas import AuditReportRead
from metastab.domain.geometry.engine import convex_reflection, normal_reflection
from metastab.domain.geometry.models import DiffeoMap
from metastab.domain.geometry.surfaces import Surface

RECORD_COLUMNS = ("index", "x", "y", "z", "component", "eps_margin", "mu_margin")
COMPONENT_COLUMNS = (
    "component",
    "n_samples",
    "c_eps",
    "c_mu",
    "eps_orientation",
    "mu_orientation",
    "fitted_alpha_eps",
    "fitted_alpha_mu",
    "certified",
)
BETA_COLUMNS = ("beta", "curvature_sign", "gamma_eps", "gamma_mu", "gamma", "certified")


def _reflection(config: AuditConfig, surface: Surface, tau: float) -> DiffeoMap:
    if config.reflection == "convex":
        return convex_reflection(surface, config.beta, tau, config.curvature_sign)
    return normal_reflection(surface, tau)


def run_audit(config: AuditConfig) -> AuditReport:
    materials = config.materials.build()
    surface = config.surface.build()

    if config.theorem == Theorem.THM1:
        return audit_thm1(materials, surface, config.n_samples, assumptions=config.assumptions)
    if config.theorem == Theorem.COR_ADN:
        return audit_cor_adn(materials, surface, config.n_samples)
    if config.theorem == Theorem.COR_ISOTROPIC3:
        return audit_cor_isotropic3(
            materials,
            surface,
            config.beta,
            config.tau,
            config.betas,
            n_surface=config.n_samples or 128,
            n_depth=config.n_depth,
            assumptions=config.assumptions,
        )

    n_surface = config.n_samples or 256
    report = audit_thm2(
        materials,
        surface,
        _reflection(config, surface, config.tau),
        config.tau,
        config.alpha1,
        config.alpha2,
        n_surface,
        config.n_depth,
        config.assumptions,
    )
    if config.taus:
        best_tau = largest_certified_tau(
            materials,
            surface,
            lambda t: _reflection(config, surface, t),
            config.alpha1,
            config.alpha2,
            config.taus,
            n_surface,
            config.n_depth,
        )
        if best_tau is not None:
            report.parameters["largest_certified_tau"] = best_tau
    return report


def _series(report: AuditReportRead) -> tuple[tuple[str, ...], list[tuple]]:
    if report.theorem == Theorem.COR_ISOTROPIC3:
        rows = [(r.beta, r.curvature_sign, r.gamma_eps, r.gamma_mu, min(r.gamma_eps, r.gamma_mu), r.certified) for r in report.beta_table]
        return BETA_COLUMNS, rows
    if report.theorem == Theorem.THM2:
        rows = [
            (c.label, c.n_samples, c.c_eps, c.c_mu, c.eps_orientation, c.mu_orientation, c.fitted_alpha_eps, c.fitted_alpha_mu, c.certified)
            for c in report.components
        ]
        return COMPONENT_COLUMNS, rows
    rows = [(r.index, *r.location, r.component, r.eps_margin, r.mu_margin) for r in report.records]
    return RECORD_COLUMNS, rows


def _summary(report: AuditReportRead) -> str:
    text = f"{report.theorem.value}: {report.verdict.value} (min margin {report.min_margin:.6g})"
    if report.best_beta is not None:
        text += f", best beta {report.best_beta:g} with gamma {report.best_gamma:.6g}"
    return text


@click.command("audit")
@config_option
@common_options
@click.pass_context
def audit_command(ctx, config_path, out_dir, strict, seed):
    """Audit the hypotheses of one stability theorem on a configured interface."""
    started_at = timestamp()
    config = load_config(config_path, "audit", seed)
    report = AuditReportRead.model_validate(run_audit(config))
    columns, rows = _series(report)
    output = RunOutput(
        payload=report,
        columns=columns,
        rows=rows,
        violated=report.verdict != Verdict.APPLIES,
        summary=_summary(report),
    )
    emit(ctx, config, started_at, output, out_dir, strict)
