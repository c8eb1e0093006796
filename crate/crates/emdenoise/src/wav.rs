//! 16-bit PCM mono WAV files.

use std::io::Cursor;
use std::path::Path;

use emdenoise_core::Signal;

use crate::fsio::write_atomic;
use crate::{Error, Result};

const FULL_SCALE: f64 = 32768.0;

/// Reads a 16-bit PCM mono WAV; samples are scaled by 1/32768.
pub fn load_wav(path: &Path) -> Result<Signal> {
    let reader = hound::WavReader::open(path).map_err(|e| hound_error(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedChannels { path: path.into(), channels: spec.channels });
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        let kind = match spec.sample_format {
            hound::SampleFormat::Int => "integer",
            hound::SampleFormat::Float => "float",
        };
        return Err(Error::UnsupportedEncoding {
            path: path.into(),
            detail: format!("{}-bit {kind}", spec.bits_per_sample),
        });
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / FULL_SCALE))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| hound_error(path, e))?;
    Ok(Signal::new(samples, spec.sample_rate)?)
}

/// Quantizes to 16-bit PCM. Samples outside [-1, 1] are an error; +1 maps
/// to the largest code, 32767.
pub fn encode_wav(signal: &Signal) -> Result<Vec<u8>> {
    let codes = signal
        .samples()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::SampleRange { index, value });
            }
            Ok((value * FULL_SCALE).round().min(i16::MAX as f64) as i16)
        })
        .collect::<Result<Vec<i16>>>()?;
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut buf = Cursor::new(Vec::new());
    {
        let mut w = hound::WavWriter::new(&mut buf, spec).map_err(|e| hound_error(Path::new("<memory>"), e))?;
        for c in codes {
            w.write_sample(c).map_err(|e| hound_error(Path::new("<memory>"), e))?;
        }
        w.finalize().map_err(|e| hound_error(Path::new("<memory>"), e))?;
    }
    Ok(buf.into_inner())
}

pub fn write_wav(signal: &Signal, path: &Path) -> Result<()> {
    let bytes = encode_wav(signal)?;
    write_atomic(path, |w| w.write_all(&bytes).map_err(|e| Error::io(path, e)))
}

fn hound_error(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::io(path, io),
        hound::Error::Unsupported => {
            Error::UnsupportedEncoding { path: path.into(), detail: "format not handled by the reader".into() }
        }
        other => Error::MalformedWav { path: path.into(), detail: other.to_string() },
    }
}
