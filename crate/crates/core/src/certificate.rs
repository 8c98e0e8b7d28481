//! Numeric upper bounds carrying the list of inequalities that produced them.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    /// Short identifier of the inequality or quantity.
    pub step: String,
    pub detail: String,
    pub value: f64,
}

/// An upper bound on a normalized sum `|S|/N`. Values at or above 1 are vacuous.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedBound {
    pub value: f64,
    pub vacuous: bool,
    pub trace: Vec<TraceEntry>,
}

impl CertifiedBound {
    pub fn new(value: f64) -> Self {
        CertifiedBound { value, vacuous: value >= 1.0, trace: Vec::new() }
    }

    /// The bound 1, valid for every one-bounded summand.
    pub fn trivial(reason: &str) -> Self {
        Self::new(1.0).with("trivial", reason, 1.0)
    }

    pub fn with(mut self, step: &str, detail: &str, value: f64) -> Self {
        self.trace.push(TraceEntry { step: step.into(), detail: detail.into(), value });
        self
    }

    pub fn push(&mut self, step: &str, detail: &str, value: f64) {
        self.trace.push(TraceEntry { step: step.into(), detail: detail.into(), value });
    }

    /// Replace the value by `min(value, 1)`, noting the cap in the trace.
    pub fn capped(mut self) -> Self {
        if self.value > 1.0 {
            self.push("cap", "bound exceeds the trivial bound 1", 1.0);
            self.value = 1.0;
        }
        self.vacuous = self.value >= 1.0;
        self
    }

    /// Keep whichever of two bounds is smaller, merging both traces.
    pub fn min(self, other: CertifiedBound) -> CertifiedBound {
        let (mut keep, drop) = if other.value < self.value { (other, self) } else { (self, other) };
        for t in drop.trace {
            keep.trace.push(TraceEntry { step: format!("unused:{}", t.step), detail: t.detail, value: t.value });
        }
        keep
    }

    /// Entries whose step name is `step`.
    pub fn entry(&self, step: &str) -> Option<&TraceEntry> {
        self.trace.iter().find(|t| t.step == step)
    }
}

impl fmt::Display for CertifiedBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6e}{}", self.value, if self.vacuous { " (vacuous)" } else { "" })
    }
}
