//! File schemas: channel specs, codebooks, and CSV emission.
//!
//! Channel spec (JSON): `x_symbols`, `y_symbols`, `z_symbols` are arrays of
//! symbol labels; `w` is an array of `[x, y, z, prob]` quadruples naming
//! symbols by label. Omitted triples are zero. Probabilities are decimal
//! numbers or exact fractions written `"n/d"`. The declared symbol order is
//! canonical and survives round trips.

use std::path::Path;

use serde::{Deserialize, Serialize};

use consensus_lab_core::channel::{Alphabet, BroadcastChannel};
use consensus_lab_core::coding::Codebook;

use crate::LabError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub x_symbols: Vec<String>,
    pub y_symbols: Vec<String>,
    pub z_symbols: Vec<String>,
    pub w: Vec<(String, String, String, ProbEntry)>,
}

/// A probability written either as a number or as an exact fraction "n/d".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbEntry {
    Number(f64),
    Fraction(String),
}

impl ProbEntry {
    pub fn value(&self) -> Result<f64, LabError> {
        match self {
            ProbEntry::Number(v) => Ok(*v),
            ProbEntry::Fraction(text) => {
                let (num, den) = text
                    .split_once('/')
                    .ok_or_else(|| LabError::BadFraction { text: text.clone() })?;
                let num: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| LabError::BadFraction { text: text.clone() })?;
                let den: f64 = den
                    .trim()
                    .parse()
                    .map_err(|_| LabError::BadFraction { text: text.clone() })?;
                if den <= 0.0 || !den.is_finite() {
                    return Err(LabError::BadFraction { text: text.clone() });
                }
                Ok(num / den)
            }
        }
    }
}

fn schema_error(path: &str, err: &serde_json::Error) -> LabError {
    LabError::Schema {
        path: path.to_string(),
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

pub fn parse_channel_str(text: &str, path: &str) -> Result<BroadcastChannel, LabError> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| schema_error(path, &e))?;
    channel_from_file(&file)
}

pub fn read_channel(path: &Path) -> Result<BroadcastChannel, LabError> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_channel_str(&text, &path.display().to_string())
}

pub fn channel_from_file(file: &ChannelFile) -> Result<BroadcastChannel, LabError> {
    let xa = Alphabet::new(file.x_symbols.iter().cloned())?;
    let ya = Alphabet::new(file.y_symbols.iter().cloned())?;
    let za = Alphabet::new(file.z_symbols.iter().cloned())?;
    let (ny, nz) = (ya.len(), za.len());
    let mut w = vec![0.0; xa.len() * ny * nz];
    let mut seen = vec![false; w.len()];
    for (xs, ys, zs, prob) in &file.w {
        let x = xa.index_of(xs).ok_or(LabError::UnknownSymbol {
            context: "w entry x symbol",
            symbol: xs.clone(),
        })?;
        let y = ya.index_of(ys).ok_or(LabError::UnknownSymbol {
            context: "w entry y symbol",
            symbol: ys.clone(),
        })?;
        let z = za.index_of(zs).ok_or(LabError::UnknownSymbol {
            context: "w entry z symbol",
            symbol: zs.clone(),
        })?;
        let idx = (x * ny + y) * nz + z;
        if seen[idx] {
            return Err(LabError::DuplicateEntry {
                x: xs.clone(),
                y: ys.clone(),
                z: zs.clone(),
            });
        }
        seen[idx] = true;
        w[idx] = prob.value()?;
    }
    Ok(BroadcastChannel::new(xa, ya, za, w)?)
}

pub fn channel_to_file(channel: &BroadcastChannel) -> ChannelFile {
    let mut w = Vec::new();
    for x in 0..channel.x_alphabet().len() {
        for (y, z, p) in channel.support_of(x) {
            w.push((
                channel.x_alphabet().symbol(x).to_string(),
                channel.y_alphabet().symbol(y).to_string(),
                channel.z_alphabet().symbol(z).to_string(),
                ProbEntry::Number(p),
            ));
        }
    }
    ChannelFile {
        x_symbols: channel.x_alphabet().symbols().to_vec(),
        y_symbols: channel.y_alphabet().symbols().to_vec(),
        z_symbols: channel.z_alphabet().symbols().to_vec(),
        w,
    }
}

pub fn write_channel(channel: &BroadcastChannel, path: &Path) -> Result<(), LabError> {
    let text = serde_json::to_string_pretty(&channel_to_file(channel)).expect("serializable");
    std::fs::write(path, text).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Codebook file: symbols must be single characters so codewords can be
/// written as plain strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodebookFile {
    pub n: usize,
    pub k: usize,
    pub symbols: Vec<String>,
    pub min_distance: usize,
    pub codewords: Vec<String>,
}

pub fn codebook_to_file(codebook: &Codebook, symbols: &[String]) -> Result<CodebookFile, LabError> {
    if symbols.len() != codebook.alphabet_size() {
        return Err(LabError::Usage("symbol list does not match codebook alphabet".into()));
    }
    if symbols.iter().any(|s| s.chars().count() != 1) {
        return Err(LabError::Usage(
            "codebook files need single-character symbols".into(),
        ));
    }
    let codewords = codebook
        .words()
        .iter()
        .map(|w| w.iter().map(|&s| symbols[s].chars().next().expect("checked")).collect())
        .collect();
    Ok(CodebookFile {
        n: codebook.n(),
        k: codebook.k(),
        symbols: symbols.to_vec(),
        min_distance: codebook.declared_min_distance(),
        codewords,
    })
}

pub fn codebook_from_file(file: &CodebookFile) -> Result<Codebook, LabError> {
    let mut words = Vec::with_capacity(file.codewords.len());
    for text in &file.codewords {
        let mut word = Vec::with_capacity(file.n);
        for ch in text.chars() {
            let sym = ch.to_string();
            let idx = file
                .symbols
                .iter()
                .position(|s| *s == sym)
                .ok_or(LabError::UnknownSymbol { context: "codeword symbol", symbol: sym })?;
            word.push(idx);
        }
        words.push(word);
    }
    Ok(Codebook::from_words(
        file.symbols.len(),
        words,
        file.min_distance,
        None,
    )?)
}

pub fn read_codebook_file(path: &Path) -> Result<CodebookFile, LabError> {
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| schema_error(&path.display().to_string(), &e))
}

pub fn read_codebook(path: &Path) -> Result<Codebook, LabError> {
    codebook_from_file(&read_codebook_file(path)?)
}

/// Re-indexes codebook words onto a channel's input alphabet by symbol
/// name, so a codebook file can be used with any channel that names those
/// inputs.
pub fn map_codebook_to_inputs(
    file: &CodebookFile,
    inputs: &Alphabet,
) -> Result<Codebook, LabError> {
    let translation: Vec<usize> = file
        .symbols
        .iter()
        .map(|s| {
            inputs.index_of(s).ok_or(LabError::UnknownSymbol {
                context: "codebook symbol not a channel input",
                symbol: s.clone(),
            })
        })
        .collect::<Result<_, _>>()?;
    let base = codebook_from_file(file)?;
    let words = base
        .words()
        .iter()
        .map(|w| w.iter().map(|&s| translation[s]).collect())
        .collect();
    Ok(Codebook::from_words(
        inputs.len(),
        words,
        base.declared_min_distance(),
        None,
    )?)
}

pub fn write_codebook(
    codebook: &Codebook,
    symbols: &[String],
    path: &Path,
) -> Result<(), LabError> {
    let file = codebook_to_file(codebook, symbols)?;
    let text = serde_json::to_string_pretty(&file).expect("serializable");
    std::fs::write(path, text).map_err(|source| LabError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// CSV with a schema comment line, a header row, and numeric rows.
pub struct CsvDoc {
    lines: Vec<String>,
}

impl CsvDoc {
    pub fn new(schema: &str, header: &[&str]) -> Self {
        CsvDoc { lines: vec![format!("# schema {schema}"), header.join(",")] }
    }

    pub fn push_row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}
