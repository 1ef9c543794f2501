//! I/Q sample files.
//!
//! Binary layout, little-endian:
//!
//! ```text
//! offset  size  field
//! 0       8     magic "MDSIG-IQ"
//! 8       4     u32 format version (1)
//! 12      4     u32 reserved (0)
//! 16      4     u32 sample count N
//! 20      8     f64 sample rate, Hz
//! 28      8     f64 carrier frequency, Hz
//! 36      16·N  interleaved f64 (re, im)
//! ```
//!
//! The CSV form writes `# sample_rate=<Hz>` and `# fc=<Hz>` comment lines
//! followed by one `re,im` pair per line.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::IqSeries;
use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

pub const IQ_MAGIC: &[u8; 8] = b"MDSIG-IQ";
pub const IQ_VERSION: u32 = 1;

pub fn encode_iq(iq: &IqSeries, fc: f64) -> Result<Vec<u8>> {
    let count = u32::try_from(iq.len()).map_err(|_| Error::shape("too many samples for an I/Q file"))?;
    let mut w = ByteWriter::with_header(IQ_MAGIC, IQ_VERSION);
    w.u32(count);
    w.f64(iq.sample_rate);
    w.f64(fc);
    for s in &iq.samples {
        w.f64(s.re);
        w.f64(s.im);
    }
    Ok(w.into_bytes())
}

pub fn decode_iq(bytes: &[u8]) -> Result<(IqSeries, f64)> {
    let mut r = ByteReader::with_header(bytes, IQ_MAGIC, IQ_VERSION)?;
    let count = r.u32()? as usize;
    let sample_rate = r.f64()?;
    let fc = r.f64()?;
    if r.remaining() != count * 16 {
        return Err(Error::Format(format!(
            "I/Q payload holds {} bytes, header announces {count} samples",
            r.remaining()
        )));
    }
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let re = r.f64()?;
        let im = r.f64()?;
        samples.push(Complex64::new(re, im));
    }
    Ok((IqSeries::new(samples, sample_rate)?, fc))
}

pub fn write_iq(path: &Path, iq: &IqSeries, fc: f64) -> Result<()> {
    let bytes = encode_iq(iq, fc)?;
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

pub fn read_iq(path: &Path) -> Result<(IqSeries, f64)> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_iq(&bytes)
}

pub fn write_iq_csv(path: &Path, iq: &IqSeries, fc: f64) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# sample_rate={}\n# fc={}\n", iq.sample_rate, fc));
    for s in &iq.samples {
        out.push_str(&format!("{},{}\n", s.re, s.im));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_iq_csv(path: &Path) -> Result<(IqSeries, f64)> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut sample_rate = None;
    let mut fc = 0.0;
    let mut samples = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.trim().split_once('=') {
                match key.trim() {
                    "sample_rate" => sample_rate = Some(parse(value)?),
                    "fc" => fc = parse(value)?,
                    _ => {}
                }
            }
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected 're,im'", lineno + 1)))?;
        samples.push(Complex64::new(parse(re)?, parse(im)?));
    }
    let sample_rate = sample_rate.ok_or_else(|| Error::Parse("missing '# sample_rate=' header".into()))?;
    Ok((IqSeries::new(samples, sample_rate)?, fc))
}
