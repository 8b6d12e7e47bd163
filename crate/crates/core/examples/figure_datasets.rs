//! Writes every figure dataset to a directory (default `figures/`).

use std::path::PathBuf;

use modecoupler::sweep::{figure_dataset, FigureId};

fn main() -> modecoupler::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    for id in FigureId::ALL {
        let table = figure_dataset(id, 64)?;
        let path = dir.join(format!("{id}.csv"));
        table.write_files(&path)?;
        let best = table.rows.iter().filter_map(|r| r.observable("c")).fold(0.0, f64::max);
        println!("{id}: {} rows, max C = {best:.4} -> {}", table.rows.len(), path.display());
    }
    Ok(())
}
