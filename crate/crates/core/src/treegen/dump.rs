use std::io::Write;

use super::{CondensationStats, TreeState};
use crate::error::Result;

/// Writes `# cmj tree n=.. mode=.. seed=..`, the given `# key = value`
/// config lines, then `id,parent,weight,outdeg[,birth_time]` rows. The root's
/// parent field is empty.
pub fn write_tree_csv<W: Write>(tree: &TreeState, config: &[String], mut out: W) -> Result<()> {
    writeln!(out, "# cmj tree n={} mode={} seed={} replica={}", tree.len(), tree.mode.id(), tree.seed, tree.replica)?;
    for line in config {
        writeln!(out, "# {line}")?;
    }
    let bt = tree.birth_time.as_deref();
    if bt.is_some() {
        writeln!(out, "id,parent,weight,outdeg,birth_time")?;
    } else {
        writeln!(out, "id,parent,weight,outdeg")?;
    }
    for i in 0..tree.len() {
        let p = tree.parent[i];
        let ps = if p == 0 { String::new() } else { p.to_string() };
        write!(out, "{},{},{:e},{}", i + 1, ps, tree.weight[i], tree.outdeg[i])?;
        if let Some(bt) = bt {
            write!(out, ",{:e}", bt[i])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Stats as pretty JSON, keys in stable order.
pub fn write_stats_json<W: Write>(stats: &CondensationStats, mut out: W) -> Result<()> {
    let s = serde_json::to_string_pretty(stats).map_err(|e| crate::Error::Io(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}
