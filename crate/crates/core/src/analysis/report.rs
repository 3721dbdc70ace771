use serde::{Deserialize, Serialize};

/// Slack factor for every inequality check: absolute tolerance is this
/// times `‖f‖²` (squared-norm inequalities) or `‖f‖` (norm inequalities).
pub const SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: u64,
    pub step: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; negative for a violation.
    pub slack: f64,
}

/// Outcome of checking one inequality over one or more instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub instances_run: usize,
    /// Instances whose hypothesis could not be certified.
    pub skipped: usize,
    /// Number of individual inequality evaluations.
    pub evaluations: usize,
    pub violations: Vec<Violation>,
    pub passed: bool,
    /// Relative tolerance; see [`SLACK`].
    pub tolerance: f64,
    pub min_slack: Option<f64>,
    pub max_ratio: Option<f64>,
}

impl CheckReport {
    pub fn new(check_name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            instances_run: 0,
            skipped: 0,
            evaluations: 0,
            violations: Vec::new(),
            passed: true,
            tolerance,
            min_slack: None,
            max_ratio: None,
        }
    }

    /// Records `lhs <= rhs + abs_tol`; returns whether it held.
    pub fn evaluate(
        &mut self,
        instance: u64,
        step: usize,
        lhs: f64,
        rhs: f64,
        abs_tol: f64,
    ) -> bool {
        self.evaluations += 1;
        let slack = rhs - lhs;
        self.min_slack = Some(self.min_slack.map_or(slack, |s| s.min(slack)));
        let ok = lhs <= rhs + abs_tol;
        if !ok {
            self.violations.push(Violation {
                instance,
                step,
                lhs,
                rhs,
                slack,
            });
            self.passed = false;
        }
        ok
    }

    pub fn note_ratio(&mut self, ratio: f64) {
        self.max_ratio = Some(self.max_ratio.map_or(ratio, |r| r.max(ratio)));
    }

    /// Folds `other` into `self`, relabelling its violations as `instance`.
    pub fn absorb(&mut self, instance: u64, other: CheckReport) {
        self.instances_run += other.instances_run;
        self.skipped += other.skipped;
        self.evaluations += other.evaluations;
        for mut v in other.violations {
            v.instance = instance;
            self.violations.push(v);
        }
        if let Some(s) = other.min_slack {
            self.min_slack = Some(self.min_slack.map_or(s, |x| x.min(s)));
        }
        if let Some(r) = other.max_ratio {
            self.note_ratio(r);
        }
        self.passed = self.violations.is_empty();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
