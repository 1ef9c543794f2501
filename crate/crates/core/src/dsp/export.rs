//! Spectrogram and cube serialisation.
//!
//! * PGM: binary `P5`, 8-bit, top row = highest Doppler bin. Pixels map
//!   `10·log10(v)` linearly from `max_db + PGM_FLOOR_DB` (black) to `max_db`
//!   (white); values at or below the floor, including zeros, are black.
//! * CSV: one line per Doppler bin, `freq_hz,v_0,...,v_{T-1}`, preceded by a
//!   `# time_s,...` comment line with the frame times.
//! * Spectrogram binary (`MDSGSPEC` v1): u32 rows, u32 cols, rows × f64
//!   frequency axis, cols × f64 time axis, row-major f64 values.
//! * Cube binary (`MDSGCUBE` v1): u32 n_range, u32 n_doppler, u32 n_frames,
//!   f64 range_bin_m, f64 doppler_bin_hz, f64 frame_rate, then f64 values in
//!   frame-major order (frame, range, doppler).

use super::{RangeDopplerCube, Spectrogram};
use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

pub const SPEC_MAGIC: &[u8; 8] = b"MDSGSPEC";
pub const CUBE_MAGIC: &[u8; 8] = b"MDSGCUBE";
/// Dynamic range shown in PGM renderings, dB below the image maximum.
pub const PGM_FLOOR_DB: f64 = -60.0;

pub fn spectrogram_to_pgm(spec: &Spectrogram) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", spec.n_time, spec.n_freq).into_bytes();
    let max = spec.values.iter().cloned().fold(0.0, f64::max);
    let max_db = if max > 0.0 { 10.0 * max.log10() } else { 0.0 };
    for row in (0..spec.n_freq).rev() {
        for &v in spec.row(row) {
            let px = if max > 0.0 && v > 0.0 {
                let rel = (10.0 * v.log10() - max_db - PGM_FLOOR_DB) / -PGM_FLOOR_DB;
                (255.0 * rel.clamp(0.0, 1.0)).round() as u8
            } else {
                0
            };
            out.push(px);
        }
    }
    out
}

pub fn spectrogram_to_csv(spec: &Spectrogram) -> String {
    let mut out = String::from("# time_s");
    for t in &spec.time_axis {
        out.push_str(&format!(",{t}"));
    }
    out.push('\n');
    for r in 0..spec.n_freq {
        out.push_str(&format!("{}", spec.freq_axis[r]));
        for v in spec.row(r) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

fn dim(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::shape(format!("dimension {n} too large")))
}

pub fn encode_spectrogram(spec: &Spectrogram) -> Result<Vec<u8>> {
    let mut w = ByteWriter::with_header(SPEC_MAGIC, 1);
    w.u32(dim(spec.n_freq)?);
    w.u32(dim(spec.n_time)?);
    for v in spec.freq_axis.iter().chain(&spec.time_axis).chain(&spec.values) {
        w.f64(*v);
    }
    Ok(w.into_bytes())
}

pub fn decode_spectrogram(bytes: &[u8]) -> Result<Spectrogram> {
    let mut r = ByteReader::with_header(bytes, SPEC_MAGIC, 1)?;
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    if r.remaining() != 8 * (rows + cols + rows * cols) {
        return Err(Error::Format("spectrogram payload size mismatch".into()));
    }
    let mut take = |n: usize| (0..n).map(|_| r.f64()).collect::<Result<Vec<_>>>();
    let freq_axis = take(rows)?;
    let time_axis = take(cols)?;
    let values = take(rows * cols)?;
    Spectrogram::new(rows, cols, values, freq_axis, time_axis)
}

pub fn encode_cube(cube: &RangeDopplerCube) -> Result<Vec<u8>> {
    let mut w = ByteWriter::with_header(CUBE_MAGIC, 1);
    w.u32(dim(cube.n_range)?);
    w.u32(dim(cube.n_doppler)?);
    w.u32(dim(cube.n_frames)?);
    w.f64(cube.range_bin_m);
    w.f64(cube.doppler_bin_hz);
    w.f64(cube.frame_rate);
    for v in &cube.values {
        w.f64(*v);
    }
    Ok(w.into_bytes())
}

pub fn decode_cube(bytes: &[u8]) -> Result<RangeDopplerCube> {
    let mut r = ByteReader::with_header(bytes, CUBE_MAGIC, 1)?;
    let n_range = r.u32()? as usize;
    let n_doppler = r.u32()? as usize;
    let n_frames = r.u32()? as usize;
    let range_bin_m = r.f64()?;
    let doppler_bin_hz = r.f64()?;
    let frame_rate = r.f64()?;
    let n = n_range * n_doppler * n_frames;
    if r.remaining() != 8 * n {
        return Err(Error::Format("cube payload size mismatch".into()));
    }
    let values = (0..n).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    Ok(RangeDopplerCube { n_range, n_doppler, n_frames, values, range_bin_m, doppler_bin_hz, frame_rate })
}
