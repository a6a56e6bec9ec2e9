//! Binary frame files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic  = "SFRM"
//! 4       2     format version (u16) = 1
//! 6       4     channel_id (u32)
//! 10      8     N, number of samples (u64)
//! 18      8     sample_rate (f64)
//! 26      16·N  samples: N interleaved (re: f64, im: f64) pairs
//! ```
//!
//! The sample index origin is not carried; frames read back start at index 0.

use num_complex::Complex64;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::signalgen::{ChannelId, SignalFrame};

pub const MAGIC: [u8; 4] = *b"SFRM";
pub const FORMAT_VERSION: u16 = 1;

/// Serialized byte length of a frame of `n` samples.
pub fn encoded_len(n: usize) -> usize {
    26 + 16 * n
}

/// Encodes a frame into the documented layout.
pub fn encode(frame: &SignalFrame) -> Vec<u8> {
    let mut buf = Vec::with_capacity(encoded_len(frame.len()));
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&frame.channel_id.0.to_le_bytes());
    buf.extend_from_slice(&(frame.len() as u64).to_le_bytes());
    buf.extend_from_slice(&frame.sample_rate.to_le_bytes());
    for s in frame.samples() {
        buf.extend_from_slice(&s.re.to_le_bytes());
        buf.extend_from_slice(&s.im.to_le_bytes());
    }
    buf
}

/// Decodes a frame, validating magic, version, and length.
pub fn decode(bytes: &[u8]) -> Result<SignalFrame> {
    if bytes.len() < 26 {
        return Err(Error::Format(format!(
            "frame header needs 26 bytes, got {}",
            bytes.len()
        )));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::Format("bad frame magic".into()));
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported frame version {version}")));
    }
    let channel_id = ChannelId(u32::from_le_bytes(bytes[6..10].try_into().unwrap()));
    let n = u64::from_le_bytes(bytes[10..18].try_into().unwrap()) as usize;
    let sample_rate = f64::from_le_bytes(bytes[18..26].try_into().unwrap());
    if n == 0 {
        return Err(Error::Format("frame declares zero samples".into()));
    }
    let expected = encoded_len(n);
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "frame of {n} samples needs {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let off = 26 + 16 * k;
        let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
        samples.push(Complex64::new(re, im));
    }
    SignalFrame::new(samples, 0, channel_id, sample_rate)
        .map_err(|e| Error::Format(format!("frame payload invalid: {e}")))
}

/// Writes a frame file.
pub fn write_frame<W: Write>(mut w: W, frame: &SignalFrame) -> Result<()> {
    w.write_all(&encode(frame))?;
    Ok(())
}

/// Reads a frame file to the end.
pub fn read_frame<R: Read>(mut r: R) -> Result<SignalFrame> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signalgen::gen_noise;

    #[test]
    fn roundtrip_preserves_every_sample_bit() {
        let mut frame = gen_noise(33, 1.0, 8).unwrap();
        frame.channel_id = ChannelId(7);
        let bytes = encode(&frame);
        assert_eq!(bytes.len(), encoded_len(33));
        let back = decode(&bytes).unwrap();
        assert_eq!(back.samples(), frame.samples());
        assert_eq!(back.channel_id, ChannelId(7));
        assert_eq!(back.sample_rate, frame.sample_rate);
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let frame = gen_noise(4, 1.0, 8).unwrap();
        let good = encode(&frame);

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(decode(&bad_magic).is_err());

        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(decode(&bad_version).is_err());

        assert!(decode(&good[..good.len() - 1]).is_err());
        assert!(decode(&good[..10]).is_err());

        let mut zero_n = good.clone();
        zero_n[10..18].copy_from_slice(&0u64.to_le_bytes());
        assert!(decode(&zero_n[..26]).is_err());
    }
}
