//! Sampled comments as NDJSON, one `SampledComment` per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use keyness_core::SampledComment;

use crate::error::{json_err, unreadable, unwritable, Error, Result};

pub fn write_samples(path: &Path, samples: &[SampledComment]) -> Result<()> {
    let file = File::create(path).map_err(unwritable(path))?;
    let mut w = BufWriter::new(file);
    for s in samples {
        serde_json::to_writer(&mut w, s).map_err(json_err(path))?;
        w.write_all(b"\n").map_err(unwritable(path))?;
    }
    w.flush().map_err(unwritable(path))
}

pub fn read_samples(path: &Path) -> Result<Vec<SampledComment>> {
    let file = File::open(path).map_err(unreadable(path))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(unreadable(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let s = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(s);
    }
    Ok(out)
}
