use std::fmt;

use asymblis::engine::{admissible, Kernel, ShapeCase};
use asymblis::{Side, Strategy};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Routine {
    Potrf,
    Getrf,
    Sytrd,
}

impl Routine {
    pub const ALL: [Routine; 3] = [Routine::Potrf, Routine::Getrf, Routine::Sytrd];

    pub fn name(self) -> &'static str {
        match self {
            Routine::Potrf => "potrf",
            Routine::Getrf => "getrf",
            Routine::Sytrd => "sytrd",
        }
    }
}

/// What a bench row measures: one level-3 kernel in one shape case, or a
/// factorization of a square matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Workload {
    Kernel(ShapeCase),
    Routine(Routine),
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workload::Kernel(c) => write!(f, "{}/{}", c.kernel(), c),
            Workload::Routine(r) => f.write_str(r.name()),
        }
    }
}

impl Workload {
    /// Resolves `--kernel` / `--shape`. A kernel without a shape gets its
    /// first shape case; routines only accept `square`.
    pub fn resolve(kernel: &str, shape: Option<&str>) -> Result<Self, CliError> {
        if let Some(r) = Routine::ALL.into_iter().find(|r| r.name().eq_ignore_ascii_case(kernel)) {
            return match shape {
                None => Ok(Workload::Routine(r)),
                Some(s) if s.eq_ignore_ascii_case("square") => Ok(Workload::Routine(r)),
                Some(s) => Err(CliError::Usage(format!("{} only runs on square matrices, not shape '{s}'", r.name()))),
            };
        }
        let k: Kernel = kernel.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        let cases = ShapeCase::for_kernel(k);
        let case = match shape {
            None => cases[0],
            Some(s) => {
                let c: ShapeCase = s.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
                if c.kernel() != k {
                    let names: Vec<_> = cases.iter().map(|c| c.name()).collect();
                    return Err(CliError::Usage(format!(
                        "shape '{c}' does not belong to {k}; use one of: {}",
                        names.join(", ")
                    )));
                }
                c
            }
        };
        Ok(Workload::Kernel(case))
    }

    pub fn admissible(self) -> &'static [Strategy] {
        match self {
            Workload::Kernel(c) => admissible(c.kernel(), c.side()),
            // Strategy of the level-3 updates inside the factorization.
            Workload::Routine(_) => admissible(Kernel::Syrk, Side::Left),
        }
    }

    pub fn check(self, strategy: Strategy) -> Result<(), CliError> {
        if self.admissible().contains(&strategy) {
            return Ok(());
        }
        let names: Vec<_> = self.admissible().iter().map(|s| s.name()).collect();
        Err(CliError::Usage(format!(
            "strategy {strategy} is not admissible for {self}; admissible: {}",
            names.join(", ")
        )))
    }

    /// `(m, n, k)` of one grid point.
    pub fn dims(self, size: usize, panel: usize) -> (usize, usize, usize) {
        match self {
            Workload::Kernel(c) => c.dims(size, panel),
            Workload::Routine(_) => (size, size, size),
        }
    }
}
