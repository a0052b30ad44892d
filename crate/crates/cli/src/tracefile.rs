//! Plain-text trace files.
//!
//! ```text
//! tilecache-trace v1 n=<n> events=<count>
//! <id> <0|1>
//! ...
//! ```
//!
//! One event per line, space separated, every line newline-terminated, no
//! trailing blank line. Import is strict: the header must match, every id
//! must lie inside `[0, 3n^2)`, the write flag must be `0` or `1`, and the
//! line count must equal the header's `events` field.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use tilecache_core::trace::{AccessEvent, AccessTrace, IdScheme};

#[derive(Debug)]
pub enum TraceFileError {
    Io(io::Error),
    /// Malformed content; `line` is 1-based, line 1 is the header.
    Parse {
        line: usize,
        reason: String,
    },
}

impl fmt::Display for TraceFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceFileError::Io(e) => write!(f, "{e}"),
            TraceFileError::Parse { line, reason } => {
                write!(f, "trace file line {line}: {reason}")
            }
        }
    }
}

impl std::error::Error for TraceFileError {}

impl From<io::Error> for TraceFileError {
    fn from(e: io::Error) -> Self {
        TraceFileError::Io(e)
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> TraceFileError {
    TraceFileError::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn write<W: Write>(mut out: W, trace: &AccessTrace) -> io::Result<()> {
    writeln!(
        out,
        "tilecache-trace v1 n={} events={}",
        trace.meta.n,
        trace.events.len()
    )?;
    for ev in &trace.events {
        writeln!(out, "{} {}", ev.id, u8::from(ev.write))?;
    }
    Ok(())
}

pub fn write_path(path: &Path, trace: &AccessTrace) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write(&mut out, trace)?;
    out.flush()
}

/// Reads a trace file back as `(n, events)`.
pub fn read<R: BufRead>(input: R) -> Result<(u32, Vec<AccessEvent>), TraceFileError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))??;
    let mut fields = header.split(' ');
    if fields.next() != Some("tilecache-trace") || fields.next() != Some("v1") {
        return Err(parse_err(
            1,
            "expected header `tilecache-trace v1 n=<n> events=<count>`",
        ));
    }
    let n: u32 = field(fields.next(), "n", 1)?;
    let count: u64 = field(fields.next(), "events", 1)?;
    if fields.next().is_some() {
        return Err(parse_err(1, "trailing fields in header"));
    }
    let scheme = IdScheme::new(n).map_err(|e| parse_err(1, e.to_string()))?;

    let mut events = Vec::with_capacity(count.min(1 << 24) as usize);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        let (id, flag) = line
            .split_once(' ')
            .ok_or_else(|| parse_err(lineno, "expected `<id> <0|1>`"))?;
        let id: u32 = id
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad id `{id}`")))?;
        if !scheme.contains(id) {
            return Err(parse_err(
                lineno,
                format!("id {id} outside [0, {}) for n={n}", scheme.id_space()),
            ));
        }
        let write = match flag {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(lineno, format!("bad write flag `{other}`"))),
        };
        events.push(AccessEvent { id, write });
    }
    if events.len() as u64 != count {
        return Err(parse_err(
            events.len() + 2,
            format!("header promises {count} events, found {}", events.len()),
        ));
    }
    Ok((n, events))
}

pub fn read_path(path: &Path) -> Result<(u32, Vec<AccessEvent>), TraceFileError> {
    read(BufReader::new(File::open(path)?))
}

fn field<T: std::str::FromStr>(
    field: Option<&str>,
    key: &str,
    line: usize,
) -> Result<T, TraceFileError> {
    field
        .and_then(|f| f.strip_prefix(key))
        .and_then(|f| f.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(line, format!("missing or malformed `{key}=` field")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tilecache_core::trace::{generate_trace, BlockSpec};

    #[test]
    fn round_trip() {
        let trace = generate_trace(4, BlockSpec::new(2, 2, 1).unwrap()).unwrap();
        let mut buf = Vec::new();
        write(&mut buf, &trace).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("tilecache-trace v1 n=4 events=192\n"));
        assert!(text.ends_with('\n'));
        assert!(!text.ends_with("\n\n"));
        let (n, events) = read(&buf[..]).unwrap();
        assert_eq!(n, 4);
        assert_eq!(events, trace.events);
    }

    #[test]
    fn rejects_out_of_range_ids() {
        let text = "tilecache-trace v1 n=2 events=1\n12 0\n";
        let err = read(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, TraceFileError::Parse { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn rejects_malformed_input() {
        for (text, line) in [
            ("", 1),
            ("something else\n", 1),
            ("tilecache-trace v2 n=2 events=0\n", 1),
            ("tilecache-trace v1 n=0 events=0\n", 1),
            ("tilecache-trace v1 n=2 events=1\n", 2), // count mismatch
            ("tilecache-trace v1 n=2 events=1\n3 2\n", 2), // bad flag
            ("tilecache-trace v1 n=2 events=1\n3\n", 2), // missing flag
            ("tilecache-trace v1 n=2 events=1\n3 0\n\n", 3), // trailing blank line
            ("tilecache-trace v1 n=2 events=1\nx 0\n", 2), // bad id
        ] {
            match read(text.as_bytes()) {
                Err(TraceFileError::Parse { line: l, .. }) => {
                    assert_eq!(l, line, "wrong line for {text:?}")
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn empty_trace_is_valid() {
        let (n, events) = read("tilecache-trace v1 n=3 events=0\n".as_bytes()).unwrap();
        assert_eq!(n, 3);
        assert!(events.is_empty());
    }
}
