use poisson_grad::potential::{
    check_grad_consistency, check_gradient_growth, check_periodicity, check_positivity,
    check_value_growth, CheckReport, SampleSpec,
};
use poisson_grad::{GridSpec, Potential};

use crate::config::{CheckName, ChecksConfig};
use crate::error::CliError;

fn missing(name: &str, detail: &str) -> CheckReport {
    CheckReport {
        name: name.to_string(),
        passed: false,
        samples: 0,
        violations: 0,
        worst: f64::NAN,
        detail: detail.to_string(),
    }
}

/// Runs the configured hypothesis checks in order.
///
/// A hypothesis whose data is not declared at all (no periods, no envelope)
/// counts as failed: it cannot hold for a potential that does not state it.
pub fn run_checks(
    cfg: &ChecksConfig,
    f: &dyn Potential,
    grid: &GridSpec,
) -> Result<Vec<CheckReport>, CliError> {
    let mut sampler =
        SampleSpec::new(cfg.samples, cfg.seed, grid.extents().to_vec()).with_radius(cfg.radius);
    if let Some(periods) = f.periods() {
        // Probe just inside a period too, where wrap-around bugs show.
        sampler = sampler.with_anchor(periods.iter().map(|p| 0.999 * p).collect());
    }
    let env = f.growth();
    let mut out = Vec::with_capacity(cfg.run.len());
    for name in &cfg.run {
        let report = match name {
            CheckName::Periodicity => match f.periods() {
                Some(_) => check_periodicity(f, &sampler)?,
                None => missing("periodicity", "potential declares no periods"),
            },
            CheckName::Positivity => check_positivity(f, &sampler),
            CheckName::GradientGrowth => match &env {
                Some(env) => check_gradient_growth(f, env, &sampler),
                None => missing("gradient_growth", "potential declares no growth envelope"),
            },
            CheckName::ValueGrowth => match &env {
                Some(env) if env.has_value_bound() => check_value_growth(f, env, &sampler),
                _ => missing("value_growth", "growth envelope declares no value bound"),
            },
            CheckName::GradConsistency => check_grad_consistency(f, &sampler),
        };
        out.push(report);
    }
    Ok(out)
}

pub fn format_table(reports: &[CheckReport]) -> String {
    let mut s = format!(
        "{:<18} {:>6} {:>8} {:>10} {:>13}  detail\n",
        "check", "result", "samples", "violations", "worst"
    );
    for r in reports {
        s.push_str(&format!(
            "{:<18} {:>6} {:>8} {:>10} {:>13.5e}  {}\n",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            r.samples,
            r.violations,
            r.worst,
            r.detail
        ));
    }
    s
}
