//! File plumbing shared by the commands: buffered writes, manifests and
//! path resolution.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use photon_stats::Error as CoreError;

use crate::error::{in_file, io_err, CliError, Result};

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(io_err(path))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Creates `path` (and its parent directory) and hands a buffered writer to
/// `body`.
pub fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> photon_stats::Result<()>,
{
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| match e {
        CoreError::Io(source) => CliError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::InFile {
            path: path.to_path_buf(),
            source: other,
        },
    })?;
    w.flush().map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_file(path, |w| Ok(w.write_all(text.as_bytes())?))
}

/// Writes a CSV table with the given header.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    write_file(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for row in rows {
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    })
}

/// Entries of a manifest relative to its own directory.
pub fn resolve(manifest: &Path, entry: &str) -> PathBuf {
    let p = Path::new(entry);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new("")).join(p)
    }
}

/// Rows of a CSV manifest whose header must begin with `header`; extra
/// trailing columns are allowed when `optional` names them.
pub fn read_manifest(
    path: &Path,
    header: &[&str],
    optional: &[&str],
) -> Result<Vec<csv::StringRecord>> {
    let bytes = read_bytes(path)?;
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let malformed = |offset: u64, message: String| CliError::InFile {
        path: path.to_path_buf(),
        source: CoreError::Malformed { offset, message },
    };
    let got = r.headers().map_err(|e| in_file(path)(e.into()))?.clone();
    let n = got.len();
    let ok = n >= header.len()
        && n <= header.len() + optional.len()
        && got
            .iter()
            .zip(header.iter().chain(optional))
            .all(|(a, b)| a == *b);
    if !ok {
        let want: Vec<&str> = header.iter().chain(optional).copied().collect();
        return Err(malformed(
            0,
            format!("expected header `{}`", want.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| in_file(path)(e.into()))?;
        rows.push(rec);
    }
    Ok(rows)
}

/// Parses column `i` of a manifest row as a number.
pub fn number(path: &Path, rec: &csv::StringRecord, i: usize, name: &str) -> Result<f64> {
    let offset = rec.position().map_or(0, |p| p.byte());
    rec.get(i)
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::InFile {
            path: path.to_path_buf(),
            source: CoreError::Malformed {
                offset,
                message: format!("column {name} is not a number"),
            },
        })
}

/// `100` for 100 μW, `12.5` for 12.5 μW.
pub fn power_label(p: f64) -> String {
    format!("{p}uW")
}
