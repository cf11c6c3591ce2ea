//! Versioned event files.
//!
//! Layout: a UTF-8 header of `key value` lines opened by
//! `LEGGETT-EVENTS v1` and closed by `end`, then six little-endian `f64`
//! per event (`n_A` then `n_B`, x/y/z each).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::sampler::{EventSample, RNG_ALGORITHM};
use crate::catalog::ProductionChannel;
use crate::error::{Error, Result};
use crate::quantum::Direction;

pub const EVENT_FILE_MAGIC: &str = "LEGGETT-EVENTS v1";

pub fn write_events(path: impl AsRef<Path>, sample: &EventSample) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_events_to(&mut w, sample)?;
    w.flush()?;
    Ok(())
}

pub fn write_events_to(w: &mut impl Write, sample: &EventSample) -> Result<()> {
    writeln!(w, "{EVENT_FILE_MAGIC}")?;
    writeln!(w, "seed {}", sample.seed())?;
    writeln!(w, "rng {RNG_ALGORITHM}")?;
    writeln!(w, "n_events {}", sample.n_events())?;
    writeln!(w, "catalog_sha256 {}", sample.catalog_hash().unwrap_or("-"))?;
    writeln!(w, "channel {}", serde_json::to_string(sample.channel())?)?;
    writeln!(w, "end")?;
    let mut buf = Vec::with_capacity(48 * 4096);
    for chunk in sample.pairs().chunks(4096) {
        buf.clear();
        for (a, b) in chunk {
            for x in a.components().into_iter().chain(b.components()) {
                buf.extend_from_slice(&x.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_events(path: impl AsRef<Path>) -> Result<EventSample> {
    read_events_from(&mut BufReader::new(File::open(path)?))
}

pub fn read_events_from(r: &mut impl BufRead) -> Result<EventSample> {
    let mut line = String::new();
    let mut lineno = 0;
    let mut next = |r: &mut dyn BufRead, line: &mut String| -> Result<usize> {
        line.clear();
        lineno += 1;
        if r.read_line(line)? == 0 {
            return Err(Error::Parse { line: lineno, msg: "unexpected end of header".into() });
        }
        Ok(lineno)
    };
    let ln = next(r, &mut line)?;
    if line.trim_end() != EVENT_FILE_MAGIC {
        return Err(Error::Parse { line: ln, msg: format!("expected {EVENT_FILE_MAGIC:?}") });
    }
    let (mut seed, mut n, mut hash, mut channel) = (None, None, None, None);
    loop {
        let ln = next(r, &mut line)?;
        let text = line.trim_end();
        if text == "end" {
            break;
        }
        let (key, value) = text.split_once(' ').unwrap_or((text, ""));
        let perr = |msg: String| Error::Parse { line: ln, msg };
        match key {
            "seed" => seed = Some(value.parse::<u64>().map_err(|e| perr(format!("seed: {e}")))?),
            "n_events" => n = Some(value.parse::<usize>().map_err(|e| perr(format!("n_events: {e}")))?),
            "catalog_sha256" => hash = (value != "-").then(|| value.to_string()),
            "channel" => channel = Some(serde_json::from_str::<ProductionChannel>(value)?),
            "rng" => {}
            _ => return Err(perr(format!("unknown header key {key:?}"))),
        }
    }
    let missing = |k: &str| Error::Parse { line: lineno, msg: format!("header lacks {k}") };
    let seed = seed.ok_or_else(|| missing("seed"))?;
    let n = n.ok_or_else(|| missing("n_events"))?;
    let channel = channel.ok_or_else(|| missing("channel"))?;

    let mut pairs = Vec::with_capacity(n);
    let mut rec = [0u8; 48];
    for _ in 0..n {
        r.read_exact(&mut rec)?;
        let v: [f64; 6] = std::array::from_fn(|i| f64::from_le_bytes(rec[8 * i..8 * i + 8].try_into().unwrap()));
        pairs.push((Direction::new(v[0], v[1], v[2])?, Direction::new(v[3], v[4], v[5])?));
    }
    if r.read(&mut rec)? != 0 {
        return Err(Error::InvalidArgument("trailing bytes after last event".into()));
    }
    Ok(EventSample::new(pairs, seed, channel, hash))
}
