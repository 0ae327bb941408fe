//! Deterministic simulation of one Loop-3 epoch on an asymmetric machine.
//!
//! Packing and synchronization are free in this model: it measures how well
//! a strategy partitions the iteration space, not cache behaviour, so its
//! makespans are not performance predictions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::machine::{MachineMode, MachineModel, Strategy};
use super::partition::{split_even, split_static};
use crate::error::{Error, Result};

/// Who claims from the dynamic dispenser.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClaimGranularity {
    /// Every core claims its class stride on its own and consumes the slab
    /// at `width · cost / speed`.
    #[default]
    PerCore,
    /// A whole class claims one stride and its cores share the slab evenly.
    PerClass,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimSlab {
    pub core: usize,
    pub start: usize,
    pub width: usize,
    pub t_begin: f64,
    pub t_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub busy: Vec<f64>,
    pub idle: Vec<f64>,
    pub makespan: f64,
    pub ideal_makespan: f64,
    pub idle_fraction: f64,
    pub slabs: Vec<SimSlab>,
}

impl SimReport {
    fn finish(busy: Vec<f64>, makespan: f64, ideal_makespan: f64, slabs: Vec<SimSlab>) -> Self {
        let idle: Vec<f64> = busy.iter().map(|b| (makespan - b).max(0.0)).collect();
        let idle_fraction = if makespan > 0.0 {
            1.0 - busy.iter().sum::<f64>() / (makespan * busy.len() as f64)
        } else {
            0.0
        };
        SimReport {
            busy,
            idle,
            makespan,
            ideal_makespan,
            idle_fraction,
            slabs,
        }
    }

    /// makespan / ideal_makespan.
    pub fn slowdown(&self) -> f64 {
        if self.ideal_makespan > 0.0 {
            self.makespan / self.ideal_makespan
        } else {
            1.0
        }
    }
}

/// Simulates `total_work_units` Loop-3 iterations, each costing
/// `per_chunk_cost` units of work on a speed-1 core.
pub fn simulate(
    total_work_units: usize,
    machine: &MachineModel,
    strategy: Strategy,
    per_chunk_cost: f64,
) -> Result<SimReport> {
    simulate_with(total_work_units, machine, strategy, per_chunk_cost, ClaimGranularity::PerCore)
}

pub fn simulate_with(
    total_work_units: usize,
    machine: &MachineModel,
    strategy: Strategy,
    per_chunk_cost: f64,
    granularity: ClaimGranularity,
) -> Result<SimReport> {
    if machine.mode != MachineMode::Simulated {
        return Err(Error::NotSimulated);
    }
    machine.validate()?;
    let ideal = total_work_units as f64 * per_chunk_cost / machine.aggregate_speed();
    let report = match strategy {
        Strategy::D3S4 | Strategy::D3S5 => match granularity {
            ClaimGranularity::PerCore => dynamic_per_core(total_work_units, machine, per_chunk_cost),
            ClaimGranularity::PerClass => dynamic_per_class(total_work_units, machine, per_chunk_cost),
        },
        Strategy::ObS4 => {
            let ranges = split_even(total_work_units, machine.total_cores());
            static_assignment(machine, per_chunk_cost, ranges)
        }
        Strategy::S3 => {
            let speeds = core_speeds(machine);
            let shares = split_static(total_work_units, &speeds)?;
            static_assignment(machine, per_chunk_cost, super::partition::shares_to_ranges(&shares))
        }
        Strategy::S1S4 | Strategy::S3S5 => {
            let class_weights: Vec<f64> = machine
                .classes
                .iter()
                .map(|c| c.core_count as f64 * c.relative_speed)
                .collect();
            let class_shares = split_static(total_work_units, &class_weights)?;
            let mut shares = Vec::with_capacity(machine.total_cores());
            for (class, &share) in machine.classes.iter().zip(&class_shares) {
                shares.extend(split_static(share, &vec![1.0; class.core_count])?);
            }
            static_assignment(machine, per_chunk_cost, super::partition::shares_to_ranges(&shares))
        }
    };
    let (busy, makespan, slabs) = report;
    Ok(SimReport::finish(busy, makespan, ideal, slabs))
}

fn core_speeds(machine: &MachineModel) -> Vec<f64> {
    machine
        .core_classes()
        .into_iter()
        .map(|c| machine.classes[c].relative_speed)
        .collect()
}

type Outcome = (Vec<f64>, f64, Vec<SimSlab>);

fn static_assignment(machine: &MachineModel, cost: f64, ranges: Vec<std::ops::Range<usize>>) -> Outcome {
    let speeds = core_speeds(machine);
    let mut busy = vec![0.0; speeds.len()];
    let mut slabs = Vec::new();
    let mut makespan: f64 = 0.0;
    for (core, r) in ranges.into_iter().enumerate() {
        if r.is_empty() {
            continue;
        }
        let t = r.len() as f64 * cost / speeds[core];
        busy[core] = t;
        makespan = makespan.max(t);
        slabs.push(SimSlab {
            core,
            start: r.start,
            width: r.len(),
            t_begin: 0.0,
            t_end: t,
        });
    }
    (busy, makespan, slabs)
}

#[derive(PartialEq)]
struct Ready {
    time: f64,
    who: usize,
}

impl Eq for Ready {}

impl Ord for Ready {
    // min-heap on time, ties broken by lower index (fast classes come first)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.who.cmp(&self.who))
    }
}

impl PartialOrd for Ready {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dynamic_per_core(total: usize, machine: &MachineModel, cost: f64) -> Outcome {
    let classes = machine.core_classes();
    let mut busy = vec![0.0; classes.len()];
    let mut slabs = Vec::new();
    let mut heap: BinaryHeap<Ready> = (0..classes.len()).map(|who| Ready { time: 0.0, who }).collect();
    let mut cursor = 0;
    let mut makespan: f64 = 0.0;
    while cursor < total {
        let Some(Ready { time, who }) = heap.pop() else { break };
        let class = &machine.classes[classes[who]];
        let width = class.mc_stride.min(total - cursor);
        let dt = width as f64 * cost / class.relative_speed;
        slabs.push(SimSlab {
            core: who,
            start: cursor,
            width,
            t_begin: time,
            t_end: time + dt,
        });
        cursor += width;
        busy[who] += dt;
        makespan = makespan.max(time + dt);
        heap.push(Ready { time: time + dt, who });
    }
    (busy, makespan, slabs)
}

fn dynamic_per_class(total: usize, machine: &MachineModel, cost: f64) -> Outcome {
    let classes = machine.core_classes();
    let mut busy = vec![0.0; classes.len()];
    let mut slabs = Vec::new();
    let mut heap: BinaryHeap<Ready> = (0..machine.classes.len()).map(|who| Ready { time: 0.0, who }).collect();
    let mut cursor = 0;
    let mut makespan: f64 = 0.0;
    while cursor < total {
        let Some(Ready { time, who }) = heap.pop() else { break };
        let class = &machine.classes[who];
        let width = class.mc_stride.min(total - cursor);
        let dt = width as f64 * cost / (class.relative_speed * class.core_count as f64);
        for (core, _) in classes.iter().enumerate().filter(|(_, &c)| c == who) {
            busy[core] += dt;
            slabs.push(SimSlab {
                core,
                start: cursor,
                width,
                t_begin: time,
                t_end: time + dt,
            });
        }
        cursor += width;
        makespan = makespan.max(time + dt);
        heap.push(Ready { time: time + dt, who });
    }
    (busy, makespan, slabs)
}

/// Aggregate peak: Σ over classes of core count × measured serial rate.
pub fn ideal_peak(machine: &MachineModel, serial_rates: &[(String, f64)]) -> Result<f64> {
    machine
        .classes
        .iter()
        .map(|c| {
            serial_rates
                .iter()
                .find(|(name, _)| *name == c.name)
                .map(|(_, rate)| c.core_count as f64 * rate)
                .ok_or_else(|| Error::MissingClassRate(c.name.clone()))
        })
        .sum()
}
