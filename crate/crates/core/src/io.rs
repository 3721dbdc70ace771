//! File formats.
//!
//! * Dictionary, binary: magic `GLABDICT`, then `m` and `N` as `u64` LE, then
//!   `m*N` `f64` LE in column-major order.
//! * Dictionary, text: CSV, one row per ambient dimension, `N` columns,
//!   17 significant digits.
//! * Sparse vector: CSV lines `index,coefficient`.
//! * Dense vector: CSV, one value per line.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Dictionary;
use crate::SparseVector;

pub const MAGIC: &[u8; 8] = b"GLABDICT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictFormat {
    Binary,
    Csv,
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Format(format!("bad number {s:?}: {e}")))
}

/// Builds a dictionary from stored atoms; see [`Dictionary::from_unit_columns`].
pub fn from_stored_atoms(atoms: DMatrix<f64>, label: impl Into<String>) -> Result<Dictionary> {
    Dictionary::from_unit_columns(atoms, label)
}

pub fn encode_binary(dict: &Dictionary) -> Vec<u8> {
    let (m, n) = (dict.ambient_dim(), dict.num_atoms());
    let mut out = Vec::with_capacity(24 + 8 * m * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m as u64).to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for x in dict.atoms().as_slice() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8], label: &str) -> Result<Dictionary> {
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing GLABDICT header".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
    let (m, n) = (word(8) as usize, word(16) as usize);
    let expected = m
        .checked_mul(n)
        .and_then(|k| k.checked_mul(8))
        .and_then(|k| k.checked_add(24))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for {m}x{n}, found {}",
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if m == 0 || n == 0 {
        return Err(Error::Format("empty dictionary".into()));
    }
    from_stored_atoms(DMatrix::from_vec(m, n, data), label)
}

pub fn encode_csv(dict: &Dictionary) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in dict.atoms().row_iter() {
        w.write_record(row.iter().map(|&x| fmt_f64(x)))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn decode_csv(bytes: &[u8], label: &str) -> Result<Dictionary> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(rec.iter().map(parse_f64).collect::<Result<_>>()?);
    }
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 {
        return Err(Error::Format("empty dictionary".into()));
    }
    let atoms = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    from_stored_atoms(atoms, label)
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dictionary".into())
}

pub fn write_dictionary(dict: &Dictionary, path: &Path, format: DictFormat) -> Result<()> {
    let bytes = match format {
        DictFormat::Binary => encode_binary(dict),
        DictFormat::Csv => encode_csv(dict)?,
    };
    fs::File::create(path)?.write_all(&bytes)?;
    Ok(())
}

/// Reads either format; binary files are recognized by their magic.
pub fn read_dictionary(path: &Path) -> Result<Dictionary> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let label = label_of(path);
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes, &label)
    } else {
        decode_csv(&bytes, &label)
    }
}

pub fn encode_vector(v: &DVector<f64>) -> Vec<u8> {
    let mut out = String::new();
    for &x in v.iter() {
        out.push_str(&fmt_f64(x));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn decode_vector(bytes: &[u8]) -> Result<DVector<f64>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(bytes);
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        for field in rec.iter() {
            values.push(parse_f64(field)?);
        }
    }
    Ok(DVector::from_vec(values))
}

pub fn write_vector(v: &DVector<f64>, path: &Path) -> Result<()> {
    fs::write(path, encode_vector(v))?;
    Ok(())
}

pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    decode_vector(&fs::read(path)?)
}

pub fn encode_sparse(v: &SparseVector) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for (i, c) in v.iter() {
        w.write_record([i.to_string(), fmt_f64(c)])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn decode_sparse(bytes: &[u8], num_atoms: usize, label: &str) -> Result<SparseVector> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(bytes);
    let mut entries = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Format(format!(
                "expected index,coefficient, got {rec:?}"
            )));
        }
        let index = rec[0]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Format(format!("bad index {:?}: {e}", &rec[0])))?;
        entries.push((index, parse_f64(&rec[1])?));
    }
    SparseVector::new(entries, num_atoms, label)
}
