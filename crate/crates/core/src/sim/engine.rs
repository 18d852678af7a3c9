//! Cycle loop.
//!
//! Work is taken from the angle-major unit queue in batches of `n·D` units;
//! every core owns `D` ray slots and visits them round-robin, one per cycle.
//! A batch must finish issuing before the next one is dispatched. Values are
//! computed with the fixed-point datapath at issue time, so timing never
//! changes them.

use std::fmt::Write as _;

use super::config::{ArchConfig, EnergyParams};
use super::schedule::{all_units, bank_of, WorkUnit};
use crate::error::{Error, Result};
use crate::fxp::{contribution_fxp, step_with_alu, Alu, Fxp, FxpState, FxpTables, RayConsts};
use crate::grid::{FcmiParams, GridDims, MiMap, OccupancyGrid, SensorConfig};

/// Occupancy bank reads per cycle (two ports).
pub const OCC_READ_PORTS: u32 = 2;
/// MI bank read/write pairs per cycle (one read and one write port).
pub const MI_PORTS: u32 = 1;

/// Map-wide lower bound on latency, `H·W·|Θ| / (n·F)`.
pub fn lower_bound_latency(dims: GridDims, ray_count: usize, n_cores: usize, clock_hz: f64) -> f64 {
    (dims.cell_count() * ray_count) as f64 / (n_cores as f64 * clock_hz)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StallCounts {
    pub bank_conflict: u64,
    pub feedback_wait: u64,
    pub drain: u64,
}

impl StallCounts {
    pub fn total(&self) -> u64 {
        self.bank_conflict + self.feedback_wait + self.drain
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BankAccess {
    pub occ_reads: u64,
    pub mi_reads: u64,
    pub mi_writes: u64,
}

impl BankAccess {
    pub fn total(&self) -> u64 {
        self.occ_reads + self.mi_reads + self.mi_writes
    }
}

/// Inputs of the energy model.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ActivityCounts {
    pub busy_cycles: u64,
    pub stall_cycles: u64,
    pub mem_accesses: u64,
    pub latency_s: f64,
}

pub fn energy_of(counts: &ActivityCounts, params: &EnergyParams) -> f64 {
    params.e_core_cycle * counts.busy_cycles as f64
        + params.e_stall_cycle * counts.stall_cycles as f64
        + params.e_mem_access * counts.mem_accesses as f64
        + params.e_static_per_s * counts.latency_s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub total_cycles: u64,
    pub latency_s: f64,
    pub lower_bound_s: f64,
    pub stalls: StallCounts,
    pub busy_cycles: Vec<u64>,
    pub per_core_busy: Vec<f64>,
    pub energy_j: f64,
    pub memory_accesses: Vec<BankAccess>,
    pub cell_visits: u64,
    pub batches: u64,
    pub saturations: u64,
}

impl SimReport {
    pub fn activity(&self) -> ActivityCounts {
        ActivityCounts {
            busy_cycles: self.busy_cycles.iter().sum(),
            stall_cycles: self.stalls.total(),
            mem_accesses: self.memory_accesses.iter().map(BankAccess::total).sum(),
            latency_s: self.latency_s,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k},{v}");
        };
        row("total_cycles", self.total_cycles.to_string());
        row("latency_s", self.latency_s.to_string());
        row("lower_bound_s", self.lower_bound_s.to_string());
        row(
            "latency_over_bound",
            (self.latency_s / self.lower_bound_s).to_string(),
        );
        row("stall.bank_conflict", self.stalls.bank_conflict.to_string());
        row("stall.feedback_wait", self.stalls.feedback_wait.to_string());
        row("stall.drain", self.stalls.drain.to_string());
        for (i, b) in self.per_core_busy.iter().enumerate() {
            row(&format!("busy.core{i}"), b.to_string());
        }
        for (i, m) in self.memory_accesses.iter().enumerate() {
            row(&format!("mem.bank{i}.occ_reads"), m.occ_reads.to_string());
            row(&format!("mem.bank{i}.mi_reads"), m.mi_reads.to_string());
            row(&format!("mem.bank{i}.mi_writes"), m.mi_writes.to_string());
        }
        row("cell_visits", self.cell_visits.to_string());
        row("saturations", self.saturations.to_string());
        row("energy_j", self.energy_j.to_string());
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "cycles {}  latency {:.6} ms  bound {:.6} ms  ratio {:.4}\n\
             stalls: bank {}  feedback {}  drain {}\n\
             energy {:.4} mJ  saturations {}\n",
            self.total_cycles,
            self.latency_s * 1e3,
            self.lower_bound_s * 1e3,
            self.latency_s / self.lower_bound_s,
            self.stalls.bank_conflict,
            self.stalls.feedback_wait,
            self.stalls.drain,
            self.energy_j * 1e3,
            self.saturations,
        )
    }
}

#[derive(Default)]
struct Slot {
    unit: Option<WorkUnit>,
    seg: usize,
    pos: usize,
    state: FxpState,
    last_issue: u64,
}

pub fn simulate(
    grid: &OccupancyGrid,
    sensor: &SensorConfig,
    params: &FcmiParams<f64>,
    config: &ArchConfig,
) -> Result<(MiMap<Fxp>, SimReport)> {
    config.validate()?;
    let dims = grid.dims();
    if dims.height > config.max_map || dims.width > config.max_map {
        return Err(Error::Capacity {
            height: dims.height,
            width: dims.width,
            max: config.max_map,
        });
    }
    let tables = FxpTables::build(params);
    let rays: Vec<RayConsts> = sensor.angles().map(|a| RayConsts::new(a, sensor)).collect();
    let n = config.n_cores;
    let depth = config.effective_depth();
    let banks = config.effective_banks();
    let fb = u64::from(config.pipeline.feedback_depth());
    let stages = u64::from(config.pipeline.total_stages);

    let alu = Alu::default();
    let mut mi = MiMap::zeros(dims);
    let mut stalls = StallCounts::default();
    let mut busy = vec![0u64; n];
    let mut mem = vec![BankAccess::default(); banks];
    let mut occ_used = vec![0u32; banks];
    // Every cell reaches its MI bank exactly `stages - 1` cycles after issue,
    // so counting per issue cycle is the same as counting per arrival cycle.
    let mut mi_used = vec![0u32; banks];
    // MI updates waiting for their bank's port pair.
    let queue_cap = MI_PORTS + config.mi_queue_depth as u32;
    let mut backlog = vec![0u32; banks];
    let mut slots: Vec<Slot> = (0..n * depth).map(|_| Slot::default()).collect();
    let mut queue = all_units(dims, sensor, config.features.wrapping);
    let mut issued = vec![false; n];
    let mut t = 0u64;
    let mut last_issue = None;
    let mut batches = 0u64;

    loop {
        let mut remaining = 0usize;
        for j in 0..n * depth {
            let Some(unit) = queue.next() else { break };
            let s = &mut slots[(j % n) * depth + j / n];
            *s = Slot {
                unit: Some(unit),
                ..Slot::default()
            };
            remaining += 1;
        }
        if remaining == 0 {
            break;
        }
        batches += 1;
        // Slot currently served by every core. It moves on only once each
        // core has issued its cell for this slot, keeping the rays of a slot
        // on the same step.
        let mut slot = 0usize;
        issued.fill(false);
        while remaining > 0 {
            occ_used.fill(0);
            mi_used.fill(0);
            let mut group_done = true;
            for core in 0..n {
                let s = &mut slots[core * depth + slot];
                let Some(unit) = &s.unit else {
                    stalls.drain += 1;
                    continue;
                };
                if issued[core] {
                    stalls.bank_conflict += 1;
                    continue;
                }
                // Dependency on the previous cell of this slot: the recursion
                // within a segment, or the refill after a wrap.
                if (s.pos > 0 || s.seg > 0) && t < s.last_issue + fb {
                    if s.pos > 0 {
                        stalls.feedback_wait += 1;
                    } else {
                        stalls.drain += 1;
                    }
                    group_done = false;
                    continue;
                }
                let cell = unit.segments[s.seg][s.pos];
                let bank = bank_of(cell, banks);
                if occ_used[bank] >= OCC_READ_PORTS || backlog[bank] + mi_used[bank] >= queue_cap {
                    stalls.bank_conflict += 1;
                    group_done = false;
                    continue;
                }
                occ_used[bank] += 1;
                mi_used[bank] += 1;
                mem[bank].occ_reads += 1;
                mem[bank].mi_reads += 1;
                mem[bank].mi_writes += 1;
                busy[core] += 1;
                issued[core] = true;

                let ray = rays[unit.angle_index];
                s.state = step_with_alu(&s.state, grid.get(cell), ray.width, &tables, &alu);
                let v = contribution_fxp(&s.state, ray.delta_theta, &tables, &alu);
                let acc = mi.slot(cell);
                *acc = alu.add(*acc, v);

                s.last_issue = t;
                last_issue = Some(t);
                s.pos += 1;
                if s.pos == unit.segments[s.seg].len() {
                    s.pos = 0;
                    s.seg += 1;
                    s.state = FxpState::default();
                    if s.seg == unit.segments.len() {
                        s.unit = None;
                        remaining -= 1;
                    }
                }
            }
            for (b, u) in backlog.iter_mut().zip(&mi_used) {
                *b = (*b + *u).saturating_sub(MI_PORTS);
            }
            if group_done {
                slot = (slot + 1) % depth;
                issued.fill(false);
            }
            t += 1;
        }
    }

    // pipeline drain after the last issue, then whatever is still queued
    let queued = u64::from(backlog.iter().copied().max().unwrap_or(0));
    let total_cycles = last_issue.map_or(0, |l| l + stages + queued);
    stalls.drain += (total_cycles - t) * n as u64;
    let clock = config.clock_hz;
    let latency_s = total_cycles as f64 / clock;
    let mut report = SimReport {
        total_cycles,
        latency_s,
        lower_bound_s: lower_bound_latency(dims, sensor.ray_count(), n, clock),
        stalls,
        per_core_busy: busy
            .iter()
            .map(|&b| {
                if total_cycles == 0 {
                    0.0
                } else {
                    b as f64 / total_cycles as f64
                }
            })
            .collect(),
        cell_visits: busy.iter().sum(),
        busy_cycles: busy,
        energy_j: 0.0,
        memory_accesses: mem,
        batches,
        saturations: alu.saturations(),
    };
    report.energy_j = energy_of(&report.activity(), &config.energy);
    Ok((mi, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n_cores: usize,
    pub total_cycles: u64,
    pub latency_s: f64,
    pub lower_bound_s: f64,
    pub energy_j: f64,
}

/// Runs `simulate` once per core count with `B = n`. Runs execute on
/// separate threads; rows come back in `n_list` order.
pub fn scaling_sweep(
    grid: &OccupancyGrid,
    sensor: &SensorConfig,
    params: &FcmiParams<f64>,
    base: &ArchConfig,
    n_list: &[usize],
) -> Result<Vec<SweepRow>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| {
                let cfg = ArchConfig {
                    n_cores: n,
                    n_banks: n,
                    ..base.clone()
                };
                scope.spawn(move || {
                    let (_, r) = simulate(grid, sensor, params, &cfg)?;
                    Ok(SweepRow {
                        n_cores: n,
                        total_cycles: r.total_cycles,
                        latency_s: r.latency_s,
                        lower_bound_s: r.lower_bound_s,
                        energy_j: r.energy_j,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("n_cores,total_cycles,latency_s,lower_bound_s,latency_times_n,energy_j\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n_cores,
            r.total_cycles,
            r.latency_s,
            r.lower_bound_s,
            r.latency_s * r.n_cores as f64,
            r.energy_j
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fxp::compute_mi_map_fxp;
    use crate::grid::OccLevel;

    fn small_grid() -> OccupancyGrid {
        let levels: Vec<u8> = (0..12 * 12)
            .map(|i| [0u8, 50, 100, 30, 0, 0, 70][i % 7])
            .collect();
        OccupancyGrid::from_levels(GridDims::square(12), 0.1, &levels).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        let d = GridDims::square(201);
        let lb = lower_bound_latency(d, 60, 16, 1e8);
        assert!((lb - 2_424_060.0 / 1.6e9).abs() < 1e-18);
        assert!((lb / 1.51504e-3 - 1.0).abs() < 5e-6);
        assert!(
            (lower_bound_latency(GridDims::square(256), 60, 16, 1e8) - 2.4576e-3).abs() < 1e-12
        );
        assert_eq!(
            lower_bound_latency(d, 60, 1, 1e8) / lower_bound_latency(d, 60, 16, 1e8),
            16.0
        );
    }

    #[test]
    fn energy_terms() {
        let c = ActivityCounts {
            busy_cycles: 10,
            stall_cycles: 4,
            mem_accesses: 7,
            latency_s: 1e-3,
        };
        assert_eq!(energy_of(&c, &EnergyParams::ZERO), 0.0);
        let only_static = EnergyParams {
            e_static_per_s: 1.0,
            ..EnergyParams::ZERO
        };
        assert!((energy_of(&c, &only_static) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn small_run_accounting() {
        let g = small_grid();
        let s = SensorConfig::new(8);
        let p = FcmiParams::default();
        let (mi, r) = simulate(&g, &s, &p, &ArchConfig::with_cores(4)).unwrap();
        assert_eq!(mi, compute_mi_map_fxp(&g, &s, &p));
        assert_eq!(r.cell_visits, 12 * 12 * 8);
        assert_eq!(
            r.busy_cycles.iter().sum::<u64>() + r.stalls.total(),
            4 * r.total_cycles
        );
        assert!(r.latency_s >= r.lower_bound_s);
    }

    #[test]
    fn capacity_is_enforced() {
        let g = OccupancyGrid::filled(GridDims::square(12), 0.1, OccLevel::UNKNOWN).unwrap();
        let cfg = ArchConfig {
            max_map: 8,
            ..ArchConfig::default()
        };
        assert!(matches!(
            simulate(&g, &SensorConfig::new(4), &FcmiParams::default(), &cfg),
            Err(Error::Capacity { .. })
        ));
    }
}
