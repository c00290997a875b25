//! Hard size and time limits for exponential searches.

use std::time::{Duration, Instant};

use thiserror::Error;

pub const BUDGET_ENV: &str = "FOCUSWIDTH_BUDGET_MS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetExceeded {
    #[error("input has {actual} vertices, budget allows {limit}")]
    Vertices { actual: usize, limit: usize },
    #[error("pattern has {actual} vertices, budget allows {limit}")]
    Pattern { actual: usize, limit: usize },
    #[error("time cap of {0:?} exceeded")]
    Time(Duration),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_pattern: usize,
    pub time_cap: Duration,
}

impl Default for OracleBudget {
    /// Generous desk-scale limits; the time cap honours `FOCUSWIDTH_BUDGET_MS`.
    fn default() -> Self {
        let ms = std::env::var(BUDGET_ENV).ok().and_then(|v| v.parse::<u64>().ok()).unwrap_or(120_000);
        OracleBudget { max_vertices: 24, max_pattern: 12, time_cap: Duration::from_millis(ms) }
    }
}

impl OracleBudget {
    pub fn check_vertices(&self, n: usize) -> Result<(), BudgetExceeded> {
        if n > self.max_vertices {
            return Err(BudgetExceeded::Vertices { actual: n, limit: self.max_vertices });
        }
        Ok(())
    }

    pub fn check_pattern(&self, n: usize) -> Result<(), BudgetExceeded> {
        if n > self.max_pattern {
            return Err(BudgetExceeded::Pattern { actual: n, limit: self.max_pattern });
        }
        Ok(())
    }

    pub fn clock(&self) -> Clock {
        Clock { deadline: Instant::now() + self.time_cap, cap: self.time_cap, ticks: 0 }
    }
}

/// Cheap deadline check, sampling the system clock every few thousand ticks.
pub struct Clock {
    deadline: Instant,
    cap: Duration,
    ticks: u32,
}

impl Clock {
    pub fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 4096 == 0 && Instant::now() > self.deadline {
            return Err(BudgetExceeded::Time(self.cap));
        }
        Ok(())
    }
}
