use std::path::Path;

use anyhow::{bail, Context, Result};
use momentnet::TrainConfig;

/// Parses a comma-separated list of sizes. `a,b,...,c` continues the
/// arithmetic progression `a, b, ...` up to `c`.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    let mut out: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        if items[i] == "..." {
            let (Some(&end), [.., a, b]) = (items.get(i + 1), out.as_slice()) else {
                bail!("`...` needs two values before it and one after in {s:?}");
            };
            let end: usize = end.parse().with_context(|| format!("bad size {end:?}"))?;
            let (a, b) = (*a, *b);
            if b <= a || end < b || (end - b) % (b - a) != 0 {
                bail!("{a},{b},...,{end} is not an increasing arithmetic progression");
            }
            let mut v = b + (b - a);
            while v <= end {
                out.push(v);
                v += b - a;
            }
            i += 2;
            continue;
        }
        out.push(items[i].parse().with_context(|| format!("bad size {:?}", items[i]))?);
        i += 1;
    }
    if out.is_empty() {
        bail!("empty size list");
    }
    Ok(out)
}

/// Loads a key = value training config (or the defaults) and applies
/// `KEY=VALUE` overrides in order.
pub fn train_config(path: Option<&Path>, overrides: &[String], seed: Option<u64>) -> Result<TrainConfig> {
    let mut cfg = match path {
        Some(p) => TrainConfig::read(p)?,
        None => TrainConfig::default(),
    };
    for o in overrides {
        let Some((k, v)) = o.split_once('=') else {
            bail!("override {o:?} is not KEY=VALUE");
        };
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}
