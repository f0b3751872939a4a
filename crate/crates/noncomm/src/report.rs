//! Verification reports as flat `key=value` text.
//!
//! The report file holds only values that are a function of the input and
//! the seed; wall-clock timings go to a separate `<report>.timings` file.

use std::fmt::Write as _;

use noncomm_core::machale;
use noncomm_core::{GroupOrder, Perm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Build,
    Order,
    Center,
    Perfectness,
    T,
    Classes,
    Witnesses,
    Checks,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Build,
        Stage::Order,
        Stage::Center,
        Stage::Perfectness,
        Stage::T,
        Stage::Classes,
        Stage::Witnesses,
        Stage::Checks,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Build => "build",
            Stage::Order => "order",
            Stage::Center => "center",
            Stage::Perfectness => "perfectness",
            Stage::T => "t",
            Stage::Classes => "classes",
            Stage::Witnesses => "witnesses",
            Stage::Checks => "checks",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// A search budget ran out; the answer is unknown.
    Budget,
    /// The stage produced a result contradicting the claim.
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageFailure {
    pub stage: Stage,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub seed: u64,
    pub degree: usize,
    pub generators: usize,
    pub order: Option<GroupOrder>,
    pub center_order: Option<GroupOrder>,
    pub t: Option<Perm>,
    pub perfect: Option<bool>,
    pub class_count: Option<usize>,
    pub witnessed: Option<usize>,
    pub commutator_free: Option<usize>,
    pub witnesses_check: Option<bool>,
    pub t_noncommutator: Option<bool>,
    pub failure: Option<StageFailure>,
    /// Seconds per completed stage, in pipeline order.
    pub timings: Vec<(Stage, f64)>,
}

impl VerificationReport {
    /// All constants of the theorem matched and both checks passed.
    pub fn theorem_reproduced(&self) -> bool {
        self.failure.is_none()
            && self.order.as_ref().is_some_and(|o| *o == machale::ORDER)
            && self.center_order.as_ref().is_some_and(|o| *o == 2)
            && self.perfect == Some(true)
            && self.class_count == Some(machale::CLASS_COUNT)
            && self.witnessed == Some(machale::CLASS_COUNT - 1)
            && self.witnesses_check == Some(true)
            && self.t_noncommutator == Some(true)
    }

    /// The group was shown to have exactly one noncommutator, whatever it is.
    pub fn one_noncommutator(&self) -> bool {
        self.failure.is_none()
            && self.perfect == Some(true)
            && self.witnesses_check == Some(true)
            && self.t_noncommutator == Some(true)
            && matches!((self.class_count, self.witnessed), (Some(c), Some(w)) if w + 1 == c)
    }

    pub fn summary(&self) -> String {
        if self.theorem_reproduced() {
            return "THEOREM REPRODUCED".to_string();
        }
        match &self.failure {
            Some(f) => format!("FAILED at stage {}: {}", f.stage.name(), f.message),
            None if self.one_noncommutator() => "ONE NONCOMMUTATOR (theorem constants not matched)".to_string(),
            None => "NOT REPRODUCED".to_string(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: &dyn std::fmt::Display| {
            writeln!(out, "{key}={value}").unwrap();
        };
        put("seed", &self.seed);
        put("degree", &self.degree);
        put("generators", &self.generators);
        if let Some(v) = &self.order {
            put("order", v);
        }
        if let Some(v) = &self.center_order {
            put("center_order", v);
        }
        if let Some(v) = &self.perfect {
            put("perfect", v);
        }
        if let Some(v) = &self.t {
            put("t", &v.to_cycle_string());
        }
        if let Some(v) = &self.class_count {
            put("class_count", v);
        }
        if let Some(v) = &self.witnessed {
            put("witnessed", v);
        }
        if let Some(v) = &self.commutator_free {
            put("commutator_free", v);
        }
        if let Some(v) = &self.witnesses_check {
            put("witnesses_check", v);
        }
        if let Some(v) = &self.t_noncommutator {
            put("t_noncommutator", v);
        }
        if let Some(f) = &self.failure {
            put("failed_stage", &f.stage.name());
            put("failure", &f.message);
        }
        put("one_noncommutator", &self.one_noncommutator());
        put("theorem_reproduced", &self.theorem_reproduced());
        out
    }

    pub fn timings_text(&self) -> String {
        let mut out = String::new();
        for (stage, secs) in &self.timings {
            writeln!(out, "stage.{}.seconds={secs:.6}", stage.name()).unwrap();
        }
        let total: f64 = self.timings.iter().map(|(_, s)| s).sum();
        writeln!(out, "total.seconds={total:.6}").unwrap();
        out
    }
}
