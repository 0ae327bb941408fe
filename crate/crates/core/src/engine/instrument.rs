use std::collections::HashMap;
use std::ops::Range;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;

/// One element store into the output operand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WriteEvent {
    pub region: u32,
    pub epoch: u32,
    pub worker: u32,
    pub row: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkEvent {
    pub region: u32,
    pub epoch: u32,
    pub class: usize,
    pub rows: Range<usize>,
}

/// Records output writes and Loop-3 claims of instrumented kernel calls.
/// Every parallel region gets a fresh id; inside a region an epoch is the
/// stretch between two global synchronization points.
#[derive(Debug, Default)]
pub struct Instrumentation {
    record_writes: bool,
    regions: AtomicU32,
    writes: Mutex<Vec<WriteEvent>>,
    chunks: Mutex<Vec<ChunkEvent>>,
}

impl Instrumentation {
    pub fn new(record_writes: bool) -> Self {
        Instrumentation {
            record_writes,
            ..Default::default()
        }
    }

    pub(crate) fn begin_region(&self) -> u32 {
        self.regions.fetch_add(1, Ordering::Relaxed)
    }

    pub(crate) fn write_tile(&self, region: u32, epoch: u32, worker: usize, rows: Range<usize>, cols: Range<usize>, upper_only: bool) {
        if !self.record_writes {
            return;
        }
        let mut log = self.writes.lock().unwrap();
        for j in cols {
            for i in rows.clone() {
                if upper_only && i > j {
                    continue;
                }
                log.push(WriteEvent {
                    region,
                    epoch,
                    worker: worker as u32,
                    row: i as u32,
                    col: j as u32,
                });
            }
        }
    }

    pub(crate) fn chunk(&self, region: u32, epoch: u32, class: usize, rows: Range<usize>) {
        self.chunks.lock().unwrap().push(ChunkEvent { region, epoch, class, rows });
    }

    pub fn writes(&self) -> Vec<WriteEvent> {
        self.writes.lock().unwrap().clone()
    }

    pub fn chunks(&self) -> Vec<ChunkEvent> {
        self.chunks.lock().unwrap().clone()
    }

    /// Number of elements written by two or more distinct workers within
    /// the same epoch of the same region.
    pub fn collisions(&self) -> usize {
        let log = self.writes.lock().unwrap();
        let mut owner: HashMap<(u32, u32, u32, u32), u32> = HashMap::new();
        let mut bad = std::collections::HashSet::new();
        for w in log.iter() {
            let key = (w.region, w.epoch, w.row, w.col);
            match owner.get(&key) {
                Some(&o) if o != w.worker => {
                    bad.insert(key);
                }
                Some(_) => {}
                None => {
                    owner.insert(key, w.worker);
                }
            }
        }
        bad.len()
    }

    /// Distinct workers that wrote anything.
    pub fn writers(&self) -> usize {
        let log = self.writes.lock().unwrap();
        let mut ws: Vec<u32> = log.iter().map(|w| w.worker).collect();
        ws.sort_unstable();
        ws.dedup();
        ws.len()
    }

    /// Chunks dispensed in region `region`, in claim order.
    pub fn chunks_in(&self, region: u32) -> Vec<ChunkEvent> {
        self.chunks.lock().unwrap().iter().filter(|c| c.region == region).cloned().collect()
    }

    pub fn regions(&self) -> u32 {
        self.regions.load(Ordering::Relaxed)
    }

    pub fn clear(&self) {
        self.writes.lock().unwrap().clear();
        self.chunks.lock().unwrap().clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_cross_worker_overlap_only_within_an_epoch() {
        let ins = Instrumentation::new(true);
        ins.write_tile(0, 1, 0, 0..2, 0..2, false);
        ins.write_tile(0, 1, 0, 0..2, 0..2, false);
        ins.write_tile(0, 3, 1, 0..2, 0..2, false);
        ins.write_tile(1, 1, 1, 0..2, 0..2, false);
        assert_eq!(ins.collisions(), 0);
        ins.write_tile(0, 1, 2, 1..3, 1..2, false);
        assert_eq!(ins.collisions(), 1);
        assert_eq!(ins.writers(), 3);
    }

    #[test]
    fn upper_only_skips_strict_lower() {
        let ins = Instrumentation::new(true);
        ins.write_tile(0, 0, 0, 0..3, 0..3, true);
        assert_eq!(ins.writes().len(), 6);
    }
}
