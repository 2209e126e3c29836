//! Comma-separated grid files.
//!
//! Lines starting with `#` carry metadata and are ignored on read. Floats are
//! written in shortest round-trip form so a file reproduces the grid exactly.

use super::sim::{GridCell, SimGrid};
use crate::error::{Error, Result};

pub const TABLE_HEADER: &str =
    "n,g,mean_infidelity,mean_bures_sq,stderr,stderr_bures_sq,trials,flags";

/// Renders `grid` with each metadata line prefixed by `# `.
pub fn write_table(grid: &SimGrid, metadata: &[String]) -> String {
    let mut out = String::new();
    for line in metadata {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for c in &grid.cells {
        out.push_str(&format!(
            "{},{:?},{:?},{:?},{:?},{:?},{},{}\n",
            c.n,
            c.g,
            c.mean_infidelity,
            c.mean_bures_sq,
            c.stderr,
            c.stderr_bures_sq,
            c.trials,
            c.degenerate
        ));
    }
    out
}

fn field<T: std::str::FromStr>(value: &str, name: &str, line_no: usize) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Table(format!("line {line_no}: bad {name} value {value:?}")))
}

pub fn read_table(text: &str) -> Result<SimGrid> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h == TABLE_HEADER => {}
        Some((no, h)) => return Err(Error::Table(format!("line {no}: unexpected header {h:?}"))),
        None => return Err(Error::EmptyGrid),
    }
    let mut cells = Vec::new();
    for (no, line) in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 8 {
            return Err(Error::Table(format!(
                "line {no}: expected 8 fields, found {}",
                parts.len()
            )));
        }
        cells.push(GridCell {
            n: field(parts[0], "n", no)?,
            g: field(parts[1], "g", no)?,
            mean_infidelity: field(parts[2], "mean_infidelity", no)?,
            mean_bures_sq: field(parts[3], "mean_bures_sq", no)?,
            stderr: field(parts[4], "stderr", no)?,
            stderr_bures_sq: field(parts[5], "stderr_bures_sq", no)?,
            trials: field(parts[6], "trials", no)?,
            degenerate: field(parts[7], "flags", no)?,
        });
    }
    SimGrid::from_cells(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::sim::{simulate_grid, SimConfig};

    #[test]
    fn round_trip_is_exact() {
        let grid = simulate_grid(&SimConfig::new(
            vec![10, 30, 90],
            vec![0.6, 0.8, 1.0],
            5,
            11,
        ))
        .unwrap();
        let text = write_table(&grid, &["schema_version=1".into(), "seed=11".into()]);
        assert!(text.starts_with("# schema_version=1\n# seed=11\n"));
        assert_eq!(read_table(&text).unwrap(), grid);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(read_table(""), Err(Error::EmptyGrid)));
        assert!(read_table("n,g\n1,2\n").is_err());
        let bad = format!("{TABLE_HEADER}\n10,0.7,x,0,0,0,1,0\n");
        assert!(matches!(read_table(&bad), Err(Error::Table(_))));
        let short = format!("{TABLE_HEADER}\n10,0.7,0.1\n");
        assert!(read_table(&short).is_err());
        assert!(matches!(read_table(TABLE_HEADER), Err(Error::EmptyGrid)));
    }
}
