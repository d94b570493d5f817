//! Post-hoc verification of the certificate conditions and descent
//! properties against a recorded trace. Every check is a pure function of
//! the trace, so re-running it is deterministic; corrupted fixtures must
//! fail their checks, which the tests exercise directly.

use crate::driver::IterationRecord;
use crate::maps::MapConstants;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The trace does not contain the structure the check needs
    /// (e.g. no stabilization index).
    NotApplicable,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not applicable",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub verdict: Verdict,
    /// Worst slack encountered (positive means violation before tolerance).
    pub worst_slack: f64,
    pub detail: String,
}

impl CheckReport {
    fn pass(name: &'static str, worst_slack: f64, detail: String) -> Self {
        CheckReport {
            name,
            verdict: Verdict::Pass,
            worst_slack,
            detail,
        }
    }

    fn fail(name: &'static str, worst_slack: f64, detail: String) -> Self {
        CheckReport {
            name,
            verdict: Verdict::Fail,
            worst_slack,
            detail,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConditionsReport {
    pub c1: CheckReport,
    pub c2: CheckReport,
    pub c3: CheckReport,
    pub c4: CheckReport,
}

impl ConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.c1.verdict.passed()
            && self.c2.verdict.passed()
            && self.c3.verdict.passed()
            && self.c4.verdict.passed()
    }
}

fn per_step_check<F>(name: &'static str, records: &[IterationRecord], slack_of: F, bound_scale: f64) -> CheckReport
where
    F: Fn(&IterationRecord) -> f64,
{
    let mut worst = f64::NEG_INFINITY;
    let mut worst_k = 0;
    let mut ok = true;
    for rec in records {
        let allowed = bound_scale * (1.0 + rec.step_x);
        let slack = slack_of(rec) - allowed;
        if slack > worst {
            worst = slack;
            worst_k = rec.k;
        }
        if slack > 0.0 {
            ok = false;
        }
    }
    if records.is_empty() {
        worst = 0.0;
    }
    let detail = format!("worst slack {worst:.3e} at k = {worst_k} over {} steps", records.len());
    if ok {
        CheckReport::pass(name, worst, detail)
    } else {
        CheckReport::fail(name, worst, detail)
    }
}

/// Checks the per-step certificate conditions recorded by the driver against
/// the declared (a, b, c), with slack 10·inner_tol·(1 + step) per step, and
/// the trace-tail surrogate of the semicontinuity condition: h(u^k) over the
/// last quarter of the trace must not exceed h at the final iterate by more
/// than 1e-6. The surrogate stands in for the sequential condition, which
/// quantifies over subsequences and cannot be checked literally.
pub fn check_c1_c4(
    records: &[IterationRecord],
    _constants: &MapConstants,
    inner_tol: f64,
) -> ConditionsReport {
    let scale = 10.0 * inner_tol;
    let c1 = per_step_check("C1 sufficient descent", records, |r| r.c1_slack, scale);
    let c2 = per_step_check("C2 gradient bound", records, |r| r.c2_slack, scale);
    let c3 = per_step_check("C3 subgradient bound", records, |r| r.c3_slack, scale);

    let c4 = if records.is_empty() {
        CheckReport::pass("C4 tail semicontinuity", 0.0, "empty trace".into())
    } else {
        let h_final = records[records.len() - 1].h_u;
        let tail_from = records.len() - records.len().div_ceil(4);
        let mut worst = f64::NEG_INFINITY;
        let mut ok = true;
        for rec in &records[tail_from..] {
            let slack = rec.h_u - h_final - 1e-6;
            worst = worst.max(slack);
            if slack > 0.0 {
                ok = false;
            }
        }
        let detail = format!(
            "tail h(u) vs final {h_final:.6e}, worst excess {worst:.3e} from k = {tail_from}"
        );
        if ok {
            CheckReport::pass("C4 tail semicontinuity", worst, detail)
        } else {
            CheckReport::fail("C4 tail semicontinuity", worst, detail)
        }
    };
    ConditionsReport { c1, c2, c3, c4 }
}

/// Checks the post-stabilization descent property: for every k ≥ k_statio,
/// E(z^k, x^{k−1}) − E(z^{k+1}, x^k) ≥ tau·||x^{k+1} − x^k||² with relative
/// slack 1e-10·(1 + |E|). Pre-stabilization records are excluded.
pub fn check_lyapunov_descent(
    records: &[IterationRecord],
    k_statio: Option<usize>,
    tau: f64,
) -> CheckReport {
    let name = "Lyapunov descent after stabilization";
    let Some(k0) = k_statio else {
        return CheckReport {
            name,
            verdict: Verdict::NotApplicable,
            worst_slack: 0.0,
            detail: "no stabilization index in the trace".into(),
        };
    };
    let mut worst = f64::NEG_INFINITY;
    let mut worst_k = k0;
    let mut ok = true;
    for rec in records.iter().filter(|r| r.k >= k0) {
        let decrease = rec.lyapunov_prev - rec.lyapunov_next;
        let required = tau * rec.step_x * rec.step_x;
        let slack = required - decrease - 1e-10 * (1.0 + rec.lyapunov_prev.abs());
        if slack > worst {
            worst = slack;
            worst_k = rec.k;
        }
        if slack > 0.0 {
            ok = false;
        }
    }
    let detail = format!("checked k ≥ {k0}, worst slack {worst:.3e} at k = {worst_k}");
    if ok {
        CheckReport::pass(name, worst, detail)
    } else {
        CheckReport::fail(name, worst, detail)
    }
}

/// Heuristic Cauchy check on a converged trace: the last-quarter share of
/// the total primal movement must be at most 5%.
pub fn check_finite_length(records: &[IterationRecord]) -> CheckReport {
    let name = "finite length (tail ratio)";
    let total: f64 = records.iter().map(|r| r.step_x).sum();
    if records.is_empty() || total == 0.0 {
        return CheckReport::pass(name, 0.0, "no movement recorded".into());
    }
    let tail_from = records.len() - records.len().div_ceil(4);
    let tail: f64 = records[tail_from..].iter().map(|r| r.step_x).sum();
    let ratio = tail / total;
    let detail = format!("tail ratio {ratio:.4} over {} steps", records.len());
    if ratio <= 0.05 {
        CheckReport::pass(name, ratio - 0.05, detail)
    } else {
        CheckReport::fail(name, ratio - 0.05, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::KktResiduals;

    fn record(k: usize, step_x: f64) -> IterationRecord {
        IterationRecord {
            k,
            rho: 1.0,
            beta: 1.0,
            step_x,
            step_y: 0.0,
            laug: 0.0,
            lyapunov_prev: 0.0,
            lyapunov_next: 0.0,
            in_zone: true,
            lyap_test_pass: true,
            kkt: KktResiduals {
                stationarity: 0.0,
                feasibility: 0.0,
                dual: 0.0,
            },
            c1_slack: 0.0,
            c2_slack: 0.0,
            c3_slack: 0.0,
            h_u: 0.0,
        }
    }

    fn constants() -> MapConstants {
        MapConstants {
            a: 1.0,
            b: 1.0,
            c: 0.0,
        }
    }

    #[test]
    fn finite_length_passes_on_geometric_decay() {
        let records: Vec<_> = (0..40).map(|k| record(k, 0.5f64.powi(k as i32))).collect();
        assert_eq!(check_finite_length(&records).verdict, Verdict::Pass);
    }

    #[test]
    fn finite_length_fails_on_constant_steps() {
        let records: Vec<_> = (0..40).map(|k| record(k, 1.0)).collect();
        assert_eq!(check_finite_length(&records).verdict, Verdict::Fail);
    }

    #[test]
    fn single_record_trace_passes_vacuously() {
        let records = vec![record(0, 0.0)];
        let report = check_c1_c4(&records, &constants(), 1e-10);
        assert!(report.all_pass());
    }

    #[test]
    fn c1_check_detects_injected_violation() {
        let mut records: Vec<_> = (0..10).map(|k| record(k, 0.1)).collect();
        records[7].c1_slack = 1.0; // descent shortfall way beyond tolerance
        let report = check_c1_c4(&records, &constants(), 1e-10);
        assert_eq!(report.c1.verdict, Verdict::Fail);
        assert_eq!(report.c2.verdict, Verdict::Pass);
    }

    #[test]
    fn c4_check_detects_tail_jump() {
        let mut records: Vec<_> = (0..20).map(|k| record(k, 0.1)).collect();
        // h spikes inside the tail window above the final value
        records[18].h_u = 1.0;
        let report = check_c1_c4(&records, &constants(), 1e-10);
        assert_eq!(report.c4.verdict, Verdict::Fail);
    }

    #[test]
    fn lyapunov_check_excludes_prestabilization_and_flags_violations() {
        let mut records: Vec<_> = (0..10)
            .map(|k| {
                let mut r = record(k, 0.1);
                // decrease 0.01 ≥ tau·0.01 for tau ≤ 1
                r.lyapunov_prev = 1.0 - 0.01 * k as f64;
                r.lyapunov_next = 1.0 - 0.01 * (k + 1) as f64;
                r
            })
            .collect();
        // a gross violation before stabilization must be ignored
        records[1].lyapunov_next = records[1].lyapunov_prev + 5.0;
        let report = check_lyapunov_descent(&records, Some(3), 0.5);
        assert_eq!(report.verdict, Verdict::Pass);
        // the same violation after stabilization must be flagged
        records[7].lyapunov_next = records[7].lyapunov_prev + 5.0;
        let report = check_lyapunov_descent(&records, Some(3), 0.5);
        assert_eq!(report.verdict, Verdict::Fail);
        // and without a stabilization index the check is not applicable
        let report = check_lyapunov_descent(&records, None, 0.5);
        assert_eq!(report.verdict, Verdict::NotApplicable);
    }
}
