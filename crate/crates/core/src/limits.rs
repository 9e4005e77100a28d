//! Time, memory, and interrupt limits shared by grounding and search.

use std::cell::Cell;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Default memory limit in kilobytes.
pub const DEFAULT_MAX_KBYTES: u64 = 48_000;

/// Why a computation stopped before finishing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    TimeLimit,
    MemoryLimit,
    Interrupted,
}

/// Central accounting of elapsed time and allocated bytes. Allocations
/// are charged explicitly by the code that makes them.
#[derive(Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    max_bytes: Option<u64>,
    used: Cell<u64>,
    peak: Cell<u64>,
    interrupt: Option<Arc<AtomicBool>>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::unlimited()
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            deadline: None,
            max_bytes: None,
            used: Cell::new(0),
            peak: Cell::new(0),
            interrupt: None,
        }
    }

    pub fn new(max_seconds: Option<f64>, max_kbytes: Option<u64>) -> Self {
        Budget {
            deadline: max_seconds.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
            max_bytes: max_kbytes.map(|k| k.saturating_mul(1024)),
            ..Budget::unlimited()
        }
    }

    pub fn with_interrupt(mut self, flag: Arc<AtomicBool>) -> Self {
        self.interrupt = Some(flag);
        self
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }

    /// Checks the clock and the interrupt flag.
    pub fn check(&self) -> Result<(), Stop> {
        if let Some(flag) = &self.interrupt {
            if flag.load(Ordering::Relaxed) {
                return Err(Stop::Interrupted);
            }
        }
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Stop::TimeLimit),
            _ => Ok(()),
        }
    }

    pub fn charge(&self, bytes: u64) -> Result<(), Stop> {
        let used = self.used.get().saturating_add(bytes);
        if let Some(max) = self.max_bytes {
            if used > max {
                return Err(Stop::MemoryLimit);
            }
        }
        self.used.set(used);
        self.peak.set(self.peak.get().max(used));
        Ok(())
    }

    pub fn release(&self, bytes: u64) {
        self.used.set(self.used.get().saturating_sub(bytes));
    }

    pub fn used_bytes(&self) -> u64 {
        self.used.get()
    }

    pub fn peak_bytes(&self) -> u64 {
        self.peak.get()
    }
}
