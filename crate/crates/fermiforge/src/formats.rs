//! Line-oriented operator files, JSON helpers and the binary RDM format.
//!
//! Operator files hold one term per line, `(<re>,<im>) [<body>]`, where the
//! body is a Pauli word (`X0 Z1`) or a ladder sequence (`0^ 1`). A bare real
//! number is accepted as the coefficient. Blank lines and `#` comments are
//! skipped.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use fermiforge_core::num_complex::Complex64;
use fermiforge_core::postprocess::RdmPair;
use fermiforge_core::{FermionOperator, PauliWord, QubitOperator};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl FormatError {
    fn syntax(line: usize, message: impl Into<String>) -> FormatError {
        FormatError::Syntax {
            line,
            message: message.into(),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| FormatError::Invalid(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

/// `path` relative to the directory holding `anchor`, unless already absolute.
pub fn resolve(anchor: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    anchor
        .parent()
        .map_or_else(|| path.to_path_buf(), |dir| dir.join(path))
}

fn parse_float(s: &str, line: usize) -> Result<f64, FormatError> {
    s.trim()
        .parse()
        .map_err(|_| FormatError::syntax(line, format!("bad number '{}'", s.trim())))
}

/// Splits one non-comment line into its coefficient and bracket body.
fn split_term(raw: &str, line: usize) -> Result<(Complex64, &str), FormatError> {
    let text = raw.trim();
    let open = text
        .find('[')
        .ok_or_else(|| FormatError::syntax(line, "missing '[' before the term body"))?;
    if !text.ends_with(']') {
        return Err(FormatError::syntax(line, "term body must end with ']'"));
    }
    let coeff = text[..open].trim();
    let body = &text[open + 1..text.len() - 1];
    let c = if let Some(inner) = coeff.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| FormatError::syntax(line, "unterminated '(' in coefficient"))?;
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| FormatError::syntax(line, "complex coefficient must be (re,im)"))?;
        Complex64::new(parse_float(re, line)?, parse_float(im, line)?)
    } else if coeff.is_empty() {
        return Err(FormatError::syntax(line, "missing coefficient"));
    } else {
        Complex64::new(parse_float(coeff, line)?, 0.0)
    };
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(FormatError::syntax(line, "coefficient is not finite"));
    }
    Ok((c, body))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_qubit_operator(text: &str) -> Result<QubitOperator, FormatError> {
    let mut op = QubitOperator::zero();
    for (line, l) in content_lines(text) {
        let (c, body) = split_term(l, line)?;
        let word = PauliWord::parse(body).map_err(|m| FormatError::syntax(line, m))?;
        op.add_term(word, c);
    }
    Ok(op)
}

pub fn parse_fermion_operator(text: &str) -> Result<FermionOperator, FormatError> {
    let mut op = FermionOperator::zero();
    for (line, l) in content_lines(text) {
        let (c, body) = split_term(l, line)?;
        let ops =
            FermionOperator::parse_sequence(body).map_err(|m| FormatError::syntax(line, m))?;
        op.add_term(ops, c);
    }
    Ok(op)
}

pub fn read_qubit_operator(path: &Path) -> Result<QubitOperator, FormatError> {
    parse_qubit_operator(&read_text(path)?).map_err(|e| in_file(path, e))
}

pub fn read_fermion_operator(path: &Path) -> Result<FermionOperator, FormatError> {
    parse_fermion_operator(&read_text(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: FormatError) -> FormatError {
    match e {
        FormatError::Syntax { line, message } => {
            FormatError::Invalid(format!("{}:{line}: {message}", path.display()))
        }
        other => other,
    }
}

pub const RDM_MAGIC: &str = "fermiforge-rdm";
pub const RDM_CONVENTION: &str = "one[p][q]=<a+_p a_q>; two[p][q][r][s]=<a+_p a+_q a_s a_r>";

/// First line of an RDM file. The payload that follows is the 1-RDM then the
/// 2-RDM, row-major little-endian f64.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdmHeader {
    pub format: String,
    pub version: u32,
    pub convention: String,
    pub n_orbitals: usize,
    #[serde(default)]
    pub n_electrons: Option<usize>,
    pub shapes: Vec<Vec<usize>>,
    pub dtype: String,
}

pub fn write_rdm<W: Write>(w: &mut W, rdm: &RdmPair) -> io::Result<()> {
    let n = rdm.n_orbitals;
    let header = RdmHeader {
        format: RDM_MAGIC.into(),
        version: 1,
        convention: RDM_CONVENTION.into(),
        n_orbitals: n,
        n_electrons: rdm.n_electrons,
        shapes: vec![vec![n, n], vec![n, n, n, n]],
        dtype: "<f8".into(),
    };
    serde_json::to_writer(&mut *w, &header)?;
    w.write_all(b"\n")?;
    for v in rdm.one.iter().chain(&rdm.two) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_rdm<R: Read>(r: &mut R) -> Result<RdmPair, FormatError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|source| FormatError::Io {
            path: PathBuf::from("<rdm>"),
            source,
        })?;
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| FormatError::Invalid("RDM file has no header line".into()))?;
    let header: RdmHeader = serde_json::from_slice(&bytes[..split])
        .map_err(|e| FormatError::Invalid(format!("bad RDM header: {e}")))?;
    if header.format != RDM_MAGIC || header.version != 1 || header.dtype != "<f8" {
        return Err(FormatError::Invalid(
            "not a version 1 fermiforge RDM file".into(),
        ));
    }
    if header.convention != RDM_CONVENTION {
        return Err(FormatError::Invalid(format!(
            "unsupported RDM convention '{}'",
            header.convention
        )));
    }
    let n = header.n_orbitals;
    let payload = &bytes[split + 1..];
    let expected = (n * n + n * n * n * n) * 8;
    if payload.len() != expected {
        return Err(FormatError::Invalid(format!(
            "RDM payload has {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let mut rdm = RdmPair::zeros(n);
    rdm.one.copy_from_slice(&values[..n * n]);
    rdm.two.copy_from_slice(&values[n * n..]);
    rdm.n_electrons = header.n_electrons;
    Ok(rdm)
}
