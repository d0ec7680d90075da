/// Tolerances and resource caps shared by every check and construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Dead zone for equality and sign comparisons of payoff/potential differences.
    pub eps: f64,
    /// Largest joint-action space enumerated by brute-force routines.
    pub joint_cap: usize,
    /// Largest joint-action space for which dense transition kernels are built.
    pub kernel_cap: usize,
    pub execution: Execution,
}

pub const DEFAULT_EPS: f64 = 1e-9;
pub const DEFAULT_JOINT_CAP: usize = 10_000_000;
pub const DEFAULT_KERNEL_CAP: usize = 4096;

impl Default for Settings {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            joint_cap: DEFAULT_JOINT_CAP,
            kernel_cap: DEFAULT_KERNEL_CAP,
            execution: Execution::default(),
        }
    }
}

impl Settings {
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_joint_cap(mut self, cap: usize) -> Self {
        self.joint_cap = cap;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// How enumeration loops are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled,
    /// and falls back to sequential evaluation otherwise.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}
