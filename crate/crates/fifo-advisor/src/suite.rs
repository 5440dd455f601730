// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fifo_advisor_core::benchgen::{self, SUITE_VERSION};

use crate::format::write_trace;

/// Writes every suite benchmark to `<out_dir>/<name>.trace`, creating the
/// directory if needed. Returns the paths in suite order.
pub fn generate_suite(out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for entry in benchgen::suite() {
        let program = benchgen::generate(&entry.spec)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", entry.name)))?;
        let path = out_dir.join(format!("{}.trace", entry.name));
        let text = format!("# benchmark suite v{SUITE_VERSION}: {}\n{}", entry.name, write_trace(&program));
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
