//! Regenerates the bundled scenes, test grids and golden files under `data/`.
//!
//! cargo run --release -p fcmi-core --example gen_data -- <data dir>

use std::fs;
use std::path::{Path, PathBuf};

use fcmi_core::explore::scenes::{generate, SceneKind};
use fcmi_core::explore::{run_trial, PlatformProfile, TrialConfig};
use fcmi_core::io::{write_grid, write_mi_map};
use fcmi_core::{
    compute_mi_map, compute_mi_map_fxp, FcmiParams, FxpTables, OccLevel, OccupancyGrid,
    SensorConfig,
};

const SCENE_SIDE: usize = 64;
const GRID_SIDE: usize = 201;

/// Free / unknown / occupied view of a log-odds map.
fn trinary(grid: &OccupancyGrid) -> OccupancyGrid {
    let cells = grid
        .cells()
        .iter()
        .map(|l| match l.level() {
            0..=39 => OccLevel::FREE,
            40..=60 => OccLevel::UNKNOWN,
            _ => OccLevel::OCCUPIED,
        })
        .collect();
    OccupancyGrid::new(grid.dims(), grid.resolution(), cells).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    for sub in ["scenes", "grids", "golden"] {
        fs::create_dir_all(root.join(sub))?;
    }
    let params = FcmiParams::default();
    let sensor = SensorConfig::new(60);

    for (k, kind) in SceneKind::ALL.into_iter().enumerate() {
        let scene = generate(kind, SCENE_SIDE, 0.1, 100 + k as u64);
        write_grid(
            root.join("scenes").join(format!("{}.txt", kind.name())),
            &scene.to_grid(),
        )?;

        // a partly explored map of a larger scene of the same kind
        let big = generate(kind, GRID_SIDE, 0.1, 200 + k as u64);
        let cfg = TrialConfig {
            max_steps: 1200,
            ..TrialConfig::default()
        };
        let log = run_trial(&big, &cfg, &params, &PlatformProfile::fpga(), 1)?;
        let grid = trinary(&log.final_grid);
        let path = root
            .join("grids")
            .join(format!("{}_{GRID_SIDE}.txt", kind.name()));
        write_grid(&path, &grid)?;

        let (ref_map, fxp_map) = (
            compute_mi_map(&grid, &sensor, &params),
            compute_mi_map_fxp(&grid, &sensor, &params),
        );
        let fxp_real = fxp_map.map(|v| v.to_real());
        let (max, mean) = ref_map
            .normalized()
            .abs_diff_stats(&fxp_real.normalized())?;
        let raw = &log.final_grid;
        let (rmax, _) = compute_mi_map(raw, &sensor, &params)
            .normalized()
            .abs_diff_stats(
                &compute_mi_map_fxp(raw, &sensor, &params)
                    .map(|v| v.to_real())
                    .normalized(),
            )?;
        println!(
            "{}: trinary max {max:.5} mean {mean:.2e}; log-odds map max {rmax:.5}",
            path.display()
        );
        if kind == SceneKind::Rooms {
            let stem = format!("{}_{GRID_SIDE}", kind.name());
            write_mi_map(
                root.join("golden").join(format!("{stem}.ref.txt")),
                &ref_map.normalized(),
            )?;
            write_mi_map(
                root.join("golden").join(format!("{stem}.fxp.txt")),
                &fxp_real,
            )?;
        }
    }
    fs::write(
        root.join("golden/tables.txt"),
        FxpTables::build(&params).dump(),
    )?;
    fs::write(root.join("default.cfg"), default_cfg())?;
    println!("wrote {}", Path::new(&root).display());
    Ok(())
}

fn default_cfg() -> String {
    format!(
        "# accelerator defaults: 16 cores, diagonal banks, 8-way ray interleaving\n{}",
        fcmi_core::ArchConfig::default().to_text()
    )
}
