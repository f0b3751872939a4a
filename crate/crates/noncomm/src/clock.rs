use std::time::{Duration, Instant};

use noncomm_core::backtrack::{Deadline, SearchBudget};

/// Deadline measured on the process clock from the moment of creation.
#[derive(Clone, Copy, Debug)]
pub struct WallClock {
    until: Instant,
}

impl WallClock {
    pub fn after(limit: Duration) -> WallClock {
        WallClock { until: Instant::now() + limit }
    }
}

impl Deadline for WallClock {
    fn expired(&self) -> bool {
        Instant::now() >= self.until
    }
}

/// Search limits from the command line.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BudgetSpec {
    pub nodes: Option<u64>,
    pub seconds: Option<f64>,
}

impl BudgetSpec {
    /// Starts the clock (if any) and returns it with the node limit; build
    /// the [`SearchBudget`] with [`budget`].
    pub fn start(&self) -> Option<WallClock> {
        self.seconds.map(|s| WallClock::after(Duration::from_secs_f64(s.max(0.0))))
    }
}

pub fn budget<'a>(spec: &BudgetSpec, clock: Option<&'a WallClock>) -> SearchBudget<'a> {
    let mut b = SearchBudget { max_nodes: spec.nodes, deadline: None };
    if let Some(c) = clock {
        b = b.with_deadline(c);
    }
    b
}
