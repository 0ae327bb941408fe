//! Machine models, partition arithmetic and the asymmetric-execution simulator.

mod machine;
mod partition;
mod sim;

pub use machine::{CoreClassDesc, MachineMode, MachineModel, Strategy};
pub use partition::{dispense_chunks, shares_to_ranges, split_even, split_ranges, split_static, Chunk, Dispenser};
pub use sim::{ideal_peak, simulate, simulate_with, ClaimGranularity, SimReport, SimSlab};
