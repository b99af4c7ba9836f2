//! Linear back-off for expensive bound refreshes.

/// Attempts fire once `counter` reaches the waiting period; every successful
/// attempt lengthens the period by one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackoffSchedule {
    waiting: u64,
    counter: u64,
}

impl Default for BackoffSchedule {
    fn default() -> Self {
        BackoffSchedule { waiting: 1, counter: 0 }
    }
}

impl BackoffSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn waiting_period(&self) -> u64 {
        self.waiting
    }

    /// Advances one step and reports whether an attempt is due now.
    pub fn tick(&mut self) -> bool {
        self.counter += 1;
        if self.counter >= self.waiting {
            self.counter = 0;
            true
        } else {
            false
        }
    }

    /// Records the outcome of an attempt granted by [`tick`](Self::tick).
    pub fn record(&mut self, success: bool) {
        if success {
            self.waiting += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attempts(steps: u64, succeed: bool) -> Vec<u64> {
        let mut s = BackoffSchedule::new();
        let mut out = Vec::new();
        for step in 1..=steps {
            if s.tick() {
                out.push(step);
                s.record(succeed);
            }
        }
        out
    }

    #[test]
    fn gaps_grow_linearly_after_successes() {
        assert_eq!(attempts(21, true), vec![1, 3, 6, 10, 15, 21]);
    }

    #[test]
    fn failures_keep_the_period() {
        assert_eq!(attempts(4, false), vec![1, 2, 3, 4]);
    }
}
