//! Tester verdicts with enough embedded configuration to reproduce the
//! run. `canonical_json` strips wall-clock fields so two runs from the
//! same seed compare byte-identical.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub verdict: bool,
    pub micros: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub answer: Answer,
    pub trials: Vec<TrialOutcome>,
    pub elapsed_micros: u64,
    pub config: serde_json::Value,
    pub witness: Option<String>,
}

impl TestReport {
    /// Answer = yes iff some trial returned nonzero; witness names the
    /// first such trial.
    pub fn from_trials(
        config: serde_json::Value,
        trials: Vec<TrialOutcome>,
        elapsed_micros: u64,
    ) -> Self {
        let hit = trials.iter().position(|t| t.verdict);
        TestReport {
            answer: if hit.is_some() { Answer::Yes } else { Answer::No },
            witness: hit.map(|i| format!("trial {} (seed {}) returned nonzero", i + 1, trials[i].seed)),
            trials,
            elapsed_micros,
            config,
        }
    }

    pub fn yes(&self) -> bool {
        self.answer == Answer::Yes
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with all timing fields zeroed; byte-identical across
    /// re-runs of the same seed and config.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.elapsed_micros = 0;
        for t in &mut clone.trials {
            t.micros = 0;
        }
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }
}
