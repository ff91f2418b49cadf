//! The `antpres-1` text format.
//!
//! ```text
//! format = antpres-1
//! n = 2
//! q = 2
//! lambda = [h_0, h_1, …]
//! S = [[i_1, i_2, i_3], …]
//! ```
//!
//! Indices are 0-based in the canonical subspace order; every cyclic
//! rotation of a tuple is listed. Blank lines and `#` comments are ignored
//! on input; output is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use super::{PresentationData, Tuple};
use crate::finite_geometry::GeometryParams;
use crate::{Error, Result};

pub const FORMAT_TAG: &str = "antpres-1";

const KEYS: [&str; 5] = ["format", "n", "q", "lambda", "S"];

fn parse_err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<PresentationData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text)
}

pub fn save(data: &PresentationData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_text(data)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse(text: &str) -> Result<PresentationData> {
    let mut fields: [Option<(usize, &str)>; 5] = [None; 5];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_err(line_no, "?", "expected `key = value`"));
        };
        let key = key.trim();
        let Some(slot) = KEYS.iter().position(|k| *k == key) else {
            return Err(parse_err(line_no, key, "unknown field"));
        };
        if fields[slot].is_some() {
            return Err(parse_err(line_no, key, "field given twice"));
        }
        fields[slot] = Some((line_no, value.trim()));
    }
    let get = |k: usize| {
        fields[k].ok_or_else(|| parse_err(text.lines().count(), KEYS[k], "missing field"))
    };

    let (line, tag) = get(0)?;
    if tag != FORMAT_TAG {
        return Err(parse_err(
            line,
            "format",
            format!("expected `{FORMAT_TAG}`, got `{tag}`"),
        ));
    }
    let (n_line, n_text) = get(1)?;
    let n: usize = n_text
        .parse()
        .map_err(|_| parse_err(n_line, "n", format!("`{n_text}` is not an integer")))?;
    let (q_line, q_text) = get(2)?;
    let q: u32 = q_text
        .parse()
        .map_err(|_| parse_err(q_line, "q", format!("`{q_text}` is not an integer")))?;
    let params = GeometryParams::new(n, q).map_err(|e| parse_err(q_line, "n/q", e.to_string()))?;

    let (l_line, l_text) = get(3)?;
    let lambda = parse_flat(l_text).map_err(|m| parse_err(l_line, "lambda", m))?;
    let (s_line, s_text) = get(4)?;
    let tuples = parse_nested(s_text).map_err(|m| parse_err(s_line, "S", m))?;

    PresentationData::new(params, lambda, tuples)
}

fn parse_flat(text: &str) -> std::result::Result<Vec<usize>, String> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{text}`"))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<usize>()
                .map_err(|_| format!("`{x}` is not a non-negative integer"))
        })
        .collect()
}

fn parse_nested(text: &str) -> std::result::Result<Vec<Tuple>, String> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected a bracketed list, got `{text}`"))?
        .trim();
    let mut out = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let end = rest
            .find(']')
            .ok_or_else(|| "unterminated inner list".to_string())?;
        out.push(parse_flat(rest[..=end].trim())?);
        rest = rest[end + 1..].trim_start();
        if let Some(after) = rest.strip_prefix(',') {
            rest = after.trim_start();
            if rest.is_empty() {
                return Err("trailing comma".into());
            }
        } else if !rest.is_empty() {
            return Err(format!("expected `,` before `{rest}`"));
        }
    }
    Ok(out)
}

fn join(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(", "))
}

pub fn to_text(data: &PresentationData) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "format = {FORMAT_TAG}");
    let _ = writeln!(out, "n = {}", data.params.n());
    let _ = writeln!(out, "q = {}", data.params.q());
    let _ = writeln!(out, "lambda = {}", join(&data.lambda));
    let tuples: Vec<String> = data.tuples.iter().map(|t| join(t)).collect();
    let _ = writeln!(out, "S = [{}]", tuples.join(", "));
    out
}
