//! Text configuration format for the tone stack model.
//!
//! One `key = value` per line, `#` starts a comment:
//!
//! ```text
//! version = 1                  # optional, must come first
//! r1 = 56k
//! rt = 220k
//! rm = 25k
//! rb = 1M
//! c1 = 220p
//! c2 = 22n
//! c3 = 22n
//! t = 0                        # controls, each in [0, 1]
//! m = 0
//! b = 1
//! vin = 5
//! grid = logspace(0, 5, 50)    # 10^0 .. 10^5 Hz, 50 points
//! convention = physical        # physical | paper_script
//! mode = complex_sum           # complex_sum | magnitude_sum
//! taper = linear               # linear | audio (bass pot)
//! load_compat = false          # true adds a 1k source and 1M load
//! sweep = bass, 0.1            # optional: control, step
//! ```
//!
//! Numbers take an optional scale suffix followed by optional unit letters
//! (`Ω`, `ohm`, `ohms`, `F`), which are ignored:
//!
//! | suffix | scale |
//! |--------|-------|
//! | `p`    | 1e-12 |
//! | `n`    | 1e-9  |
//! | `u`    | 1e-6  |
//! | `m`    | 1e-3  |
//! | `k`    | 1e3   |
//! | `M`    | 1e6   |
//!
//! Suffixes are case-sensitive: `m` is milli and `M` is mega. SPICE-style
//! `K`, `MEG` and friends are rejected rather than guessed at.
//!
//! Missing keys keep their defaults (the stock 5F6-A values, `t = 0`,
//! `m = 0`, `b = 1`, `vin = 5`). Unknown or repeated keys are errors.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{
    BassTaper, Control, ControlSettings, SignConvention, Termination, ToneStackComponents,
};
use crate::error::Result;
use crate::response::{log_grid, AnalysisOptions, FrequencyGrid, OutputMode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub exp_min: f64,
    pub exp_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            exp_min: 0.0,
            exp_max: 5.0,
            points: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub control: Control,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigDocument {
    pub components: ToneStackComponents,
    pub controls: ControlSettings,
    pub grid: GridSpec,
    pub vin: f64,
    pub convention: SignConvention,
    pub mode: OutputMode,
    pub taper: BassTaper,
    /// Adds the 1 kΩ source and 1 MΩ load of the surrounding amplifier.
    pub load_compat: bool,
    pub sweep: Option<SweepSpec>,
}

impl Default for ConfigDocument {
    fn default() -> Self {
        Self {
            components: ToneStackComponents::BASSMAN_5F6A,
            controls: ControlSettings::DEFAULT,
            grid: GridSpec::default(),
            vin: 5.0,
            convention: SignConvention::Physical,
            mode: OutputMode::ComplexSum,
            taper: BassTaper::Linear,
            load_compat: false,
            sweep: None,
        }
    }
}

impl ConfigDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        log_grid(self.grid.exp_min, self.grid.exp_max, self.grid.points)
    }

    pub fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            convention: self.convention,
            mode: self.mode,
            taper: self.taper,
            termination: if self.load_compat {
                Termination::AMPLIFIER
            } else {
                Termination::IDEAL
            },
        }
    }
}

/// A positioned parse failure. `line` and `column` are 1-based; the column
/// counts characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

/// Error inside a value, positioned by byte offset into that value.
struct ValueError {
    offset: usize,
    message: String,
}

impl ValueError {
    fn at(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

fn column_of(line: &str, byte_offset: usize) -> usize {
    line[..byte_offset].chars().count() + 1
}

/// Token starting at `byte_offset`: up to the next whitespace or delimiter.
fn token_at(line: &str, byte_offset: usize) -> String {
    line[byte_offset..]
        .chars()
        .take_while(|c| !c.is_whitespace() && !matches!(c, ',' | '(' | ')' | '#'))
        .collect()
}

struct Entry<'a> {
    key: &'a str,
    key_offset: usize,
    value: &'a str,
    value_offset: usize,
}

fn split_entry(line: &str, line_no: usize) -> Result<Option<Entry<'_>>, ParseError> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    if content.trim().is_empty() {
        return Ok(None);
    }
    let start = content.len() - content.trim_start().len();
    let Some(eq) = content.find('=') else {
        return Err(ParseError {
            line: line_no,
            column: column_of(line, start),
            message: "expected `key = value`".into(),
            token: token_at(line, start),
        });
    };
    let key = content[..eq].trim();
    if key.is_empty() {
        return Err(ParseError {
            line: line_no,
            column: column_of(line, eq),
            message: "missing key before `=`".into(),
            token: "=".into(),
        });
    }
    let raw_value = &content[eq + 1..];
    let value = raw_value.trim();
    let value_offset = eq + 1 + (raw_value.len() - raw_value.trim_start().len());
    if value.is_empty() {
        return Err(ParseError {
            line: line_no,
            column: column_of(line, eq) + 1,
            message: format!("missing value for `{key}`"),
            token: String::new(),
        });
    }
    Ok(Some(Entry {
        key,
        key_offset: start,
        value,
        value_offset,
    }))
}

/// Parses a configuration document.
pub fn parse(source: &str) -> Result<ConfigDocument, ParseError> {
    let mut doc = ConfigDocument::new();
    let mut seen = HashSet::new();
    let mut first = true;

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let Some(entry) = split_entry(line, line_no)? else {
            continue;
        };
        let key_error = |message: String| ParseError {
            line: line_no,
            column: column_of(line, entry.key_offset),
            message,
            token: entry.key.to_string(),
        };

        if entry.key == "version" {
            if !first {
                return Err(key_error("`version` must be the first setting".into()));
            }
            first = false;
            if entry.value != FORMAT_VERSION.to_string() {
                return Err(ParseError {
                    line: line_no,
                    column: column_of(line, entry.value_offset),
                    message: format!("unsupported format version `{}`", entry.value),
                    token: entry.value.to_string(),
                });
            }
            continue;
        }
        first = false;
        if !seen.insert(entry.key) {
            return Err(key_error(format!("duplicate key `{}`", entry.key)));
        }
        apply_entry(&mut doc, line, line_no, &entry)?;
    }
    Ok(doc)
}

/// Applies a single `key=value` override on top of `doc`. Errors are
/// reported at line 1 of `text`.
pub fn apply_override(doc: &mut ConfigDocument, text: &str) -> Result<(), ParseError> {
    match split_entry(text, 1)? {
        Some(entry) if entry.key == "version" => Err(ParseError {
            line: 1,
            column: column_of(text, entry.key_offset),
            message: "`version` cannot be overridden".into(),
            token: entry.key.into(),
        }),
        Some(entry) => apply_entry(doc, text, 1, &entry),
        None => Err(ParseError {
            line: 1,
            column: 1,
            message: "expected `key = value`".into(),
            token: String::new(),
        }),
    }
}

fn apply_entry(
    doc: &mut ConfigDocument,
    line: &str,
    line_no: usize,
    entry: &Entry<'_>,
) -> Result<(), ParseError> {
    let value = entry.value;
    let located = |e: ValueError| {
        let offset = entry.value_offset + e.offset;
        ParseError {
            line: line_no,
            column: column_of(line, offset),
            message: e.message,
            token: token_at(line, offset),
        }
    };
    let whole = |message: String| ParseError {
        line: line_no,
        column: column_of(line, entry.value_offset),
        message,
        token: value.to_string(),
    };

    let c = &mut doc.components;
    match entry.key {
        "r1" | "rt" | "rm" | "rb" | "c1" | "c2" | "c3" => {
            let q = parse_quantity(value).map_err(located)?;
            if q <= 0.0 {
                return Err(whole(format!(
                    "component `{}` must be positive, got {q}",
                    entry.key
                )));
            }
            let slot = match entry.key {
                "r1" => &mut c.r1,
                "rt" => &mut c.rt,
                "rm" => &mut c.rm,
                "rb" => &mut c.rb,
                "c1" => &mut c.c1,
                "c2" => &mut c.c2,
                _ => &mut c.c3,
            };
            *slot = q;
        }
        "t" | "m" | "b" => {
            let q = parse_quantity(value).map_err(located)?;
            let control = match entry.key {
                "t" => Control::Treble,
                "m" => Control::Mid,
                _ => Control::Bass,
            };
            doc.controls = doc.controls.with(control, q).map_err(|_| {
                whole(format!(
                    "control `{}` out of range [0, 1], got {q}",
                    entry.key
                ))
            })?;
        }
        "vin" => {
            let q = parse_quantity(value).map_err(located)?;
            if q == 0.0 {
                return Err(whole("vin must be nonzero".into()));
            }
            doc.vin = q;
        }
        "grid" => doc.grid = parse_grid(value).map_err(located)?,
        "convention" => {
            doc.convention = SignConvention::from_str(value).map_err(|e| whole(e.to_string()))?
        }
        "mode" => doc.mode = OutputMode::from_str(value).map_err(|e| whole(e.to_string()))?,
        "taper" => doc.taper = BassTaper::from_str(value).map_err(|e| whole(e.to_string()))?,
        "load_compat" => {
            doc.load_compat = match value {
                "true" => true,
                "false" => false,
                other => return Err(whole(format!("expected true or false, got `{other}`"))),
            }
        }
        "sweep" => doc.sweep = parse_sweep(value).map_err(located)?,
        other => {
            return Err(ParseError {
                line: line_no,
                column: column_of(line, entry.key_offset),
                message: format!("unknown key `{other}`"),
                token: other.to_string(),
            })
        }
    }
    Ok(())
}

fn scan_digits(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    i
}

const UNITS: [&str; 4] = ["Ω", "ohms", "ohm", "F"];

/// Parses a number with optional engineering suffix and unit.
fn parse_quantity(text: &str) -> Result<f64, ValueError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_end = scan_digits(bytes, i);
    let mut digits = int_end - i;
    i = int_end;
    if bytes.get(i) == Some(&b'.') {
        let frac_end = scan_digits(bytes, i + 1);
        digits += frac_end - i - 1;
        i = frac_end;
    }
    if digits == 0 {
        return Err(ValueError::at(0, format!("malformed number `{text}`")));
    }
    let coefficient = &text[..i];

    let mut exponent: i32 = 0;
    if matches!(bytes.get(i), Some(b'e' | b'E')) {
        let mut j = i + 1;
        if matches!(bytes.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        let end = scan_digits(bytes, j);
        if end == j {
            return Err(ValueError::at(i, "malformed exponent"));
        }
        exponent = text[i + 1..end]
            .parse()
            .map_err(|_| ValueError::at(i, "exponent out of range"))?;
        i = end;
    }

    let rest = &text[i..];
    let (shift, suffix_len) = match rest.chars().next() {
        None => (0, 0),
        Some(_) if rest.len() >= 3 && rest[..3].eq_ignore_ascii_case("meg") => {
            return Err(ValueError::at(
                i,
                "ambiguous suffix `meg`: use `M` for mega (suffixes are case-sensitive)",
            ));
        }
        Some('p') => (-12, 1),
        Some('n') => (-9, 1),
        Some('u') => (-6, 1),
        Some('m') => (-3, 1),
        Some('k') => (3, 1),
        Some('M') => (6, 1),
        Some(c @ ('K' | 'U' | 'N' | 'P')) => {
            return Err(ValueError::at(
                i,
                format!(
                    "ambiguous suffix `{c}`: suffixes are case-sensitive, use `{}`",
                    c.to_ascii_lowercase()
                ),
            ));
        }
        Some(_) if UNITS.iter().any(|u| rest.starts_with(u)) => (0, 0),
        Some(c) => return Err(ValueError::at(i, format!("unknown suffix `{c}`"))),
    };

    let unit_start = i + suffix_len;
    let unit = &text[unit_start..];
    if !unit.is_empty() && !UNITS.contains(&unit) {
        let message = if suffix_len > 0 && unit.starts_with(['p', 'n', 'u', 'm', 'k', 'M', 'K']) {
            "ambiguous value: more than one scale suffix".to_string()
        } else {
            format!("unexpected trailing text `{unit}`")
        };
        return Err(ValueError::at(unit_start, message));
    }

    let total = exponent
        .checked_add(shift)
        .ok_or_else(|| ValueError::at(0, "exponent out of range"))?;
    let mut normalized = coefficient.to_string();
    if normalized.ends_with('.') {
        normalized.push('0');
    }
    let value: f64 = format!("{normalized}e{total}")
        .parse()
        .map_err(|_| ValueError::at(0, format!("malformed number `{text}`")))?;
    if !value.is_finite() {
        return Err(ValueError::at(0, "value out of range"));
    }
    Ok(value)
}

/// Splits `text` at commas, returning each trimmed piece with its byte offset.
fn split_args(text: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for piece in text.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        out.push((base + start + lead, piece.trim()));
        start += piece.len() + 1;
    }
    out
}

fn parse_plain(text: &str, offset: usize) -> Result<f64, ValueError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ValueError::at(offset, format!("malformed number `{text}`"))),
    }
}

fn parse_grid(text: &str) -> Result<GridSpec, ValueError> {
    let expected = "expected `logspace(exp_min, exp_max, n)`";
    let Some(after) = text.strip_prefix("logspace") else {
        return Err(ValueError::at(0, expected));
    };
    let open = text.len() - after.trim_start().len();
    if !text[open..].starts_with('(') {
        return Err(ValueError::at(open.min(text.len()), expected));
    }
    let Some(inner) = text[open + 1..].strip_suffix(')') else {
        return Err(ValueError::at(text.len() - 1, "missing closing `)`"));
    };
    let args = split_args(inner, open + 1);
    if args.len() != 3 {
        return Err(ValueError::at(
            open,
            format!("logspace takes 3 arguments, got {}", args.len()),
        ));
    }
    let exp_min = parse_plain(args[0].1, args[0].0)?;
    let exp_max = parse_plain(args[1].1, args[1].0)?;
    let points: usize = args[2]
        .1
        .parse()
        .map_err(|_| ValueError::at(args[2].0, format!("malformed point count `{}`", args[2].1)))?;
    if exp_min >= exp_max {
        return Err(ValueError::at(args[1].0, "exp_max must exceed exp_min"));
    }
    if points < 2 {
        return Err(ValueError::at(
            args[2].0,
            "logspace needs at least 2 points",
        ));
    }
    Ok(GridSpec {
        exp_min,
        exp_max,
        points,
    })
}

fn parse_sweep(text: &str) -> Result<Option<SweepSpec>, ValueError> {
    if text == "none" {
        return Ok(None);
    }
    let args = split_args(text, 0);
    if args.len() != 2 {
        return Err(ValueError::at(
            0,
            "expected `<bass|mid|treble>, <step>` or `none`",
        ));
    }
    let control =
        Control::from_str(args[0].1).map_err(|e| ValueError::at(args[0].0, e.to_string()))?;
    let step = parse_plain(args[1].1, args[1].0)?;
    if !(step > 0.0 && step <= 1.0) {
        return Err(ValueError::at(
            args[1].0,
            format!("sweep step must lie in (0, 1], got {step}"),
        ));
    }
    Ok(Some(SweepSpec { control, step }))
}

/// Formats `x` with the engineering suffix that puts the mantissa in
/// `[1, 1000)`. Values outside the suffix range fall back to exponent form.
pub fn format_engineering(x: f64) -> String {
    let sci = format!("{x:e}");
    let (mantissa, exp) = sci.split_once('e').expect("`{:e}` always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let suffix_exp = exp.div_euclid(3) * 3;
    let suffix = match suffix_exp {
        -12 => "p",
        -9 => "n",
        -6 => "u",
        -3 => "m",
        0 => "",
        3 => "k",
        6 => "M",
        _ => return sci,
    };
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let int_len = (exp - suffix_exp) as usize + 1;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if digits.len() <= int_len {
        out.push_str(&digits);
        out.push_str(&"0".repeat(int_len - digits.len()));
    } else {
        let _ = write!(out, "{}.{}", &digits[..int_len], &digits[int_len..]);
    }
    out.push_str(suffix);
    out
}

/// Canonical text form of `doc`. `parse(&serialize(doc))` returns `doc`.
pub fn serialize(doc: &ConfigDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "version = {FORMAT_VERSION}");
    for (name, value) in doc.components.named_values() {
        let _ = writeln!(out, "{name} = {}", format_engineering(value));
    }
    let c = &doc.controls;
    let _ = writeln!(out, "t = {}", c.t());
    let _ = writeln!(out, "m = {}", c.m());
    let _ = writeln!(out, "b = {}", c.b());
    let _ = writeln!(out, "vin = {}", doc.vin);
    let g = &doc.grid;
    let _ = writeln!(
        out,
        "grid = logspace({}, {}, {})",
        g.exp_min, g.exp_max, g.points
    );
    let _ = writeln!(out, "convention = {}", doc.convention.as_str());
    let _ = writeln!(out, "mode = {}", doc.mode.as_str());
    let _ = writeln!(out, "taper = {}", doc.taper.as_str());
    let _ = writeln!(out, "load_compat = {}", doc.load_compat);
    if let Some(s) = doc.sweep {
        let _ = writeln!(out, "sweep = {}, {}", s.control, s.step);
    }
    out
}
